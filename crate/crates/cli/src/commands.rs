//! Command implementations. Each command maps a resolved configuration to a
//! table; grid points run in parallel and come back in grid order.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use ringsqueeze::cavity_io::{jsi, output_moments, quadrature_variance, variance_extrema, Detunings, SeedAmplitudes};
use ringsqueeze::interferometer::{
    phase_sensitivity_coherent, phase_sensitivity_numeric_with_step, phase_sensitivity_squeezed,
    pole_coherent_amplitude,
};
use ringsqueeze::meanfield::{compare_models, SolverConfig};
use ringsqueeze::params::{derive_rates, fwm_gain, power_for_sigma, sigma_from_power, threshold_power};
use ringsqueeze::{
    to_db, CavityRatesF64, Error as ModelError, InjectionF64, PhysicalConstantsF64, SensorSpecF64,
};

use crate::config::{ConfigError, RunConfig, Scale, Sweep, DEFAULT_ALPHA_C, DEFAULT_SIGMA_N};
use crate::table::{ResultTable, Row};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Rates,
    Squeezing,
    Jsi,
    Meanfield,
    Sensitivity,
    Pole,
    Improvement,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Rates,
        Command::Squeezing,
        Command::Jsi,
        Command::Meanfield,
        Command::Sensitivity,
        Command::Pole,
        Command::Improvement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::Squeezing => "squeezing",
            Command::Jsi => "jsi",
            Command::Meanfield => "meanfield",
            Command::Sensitivity => "sensitivity",
            Command::Pole => "pole",
            Command::Improvement => "improvement",
        }
    }

    /// Grid used when the configuration has no sweep block.
    pub fn default_sweep(self) -> Option<Sweep> {
        match self {
            Command::Rates | Command::Jsi => None,
            Command::Squeezing => Some(Sweep::new("analysis.lo_phase", 0.0, PI, 181, Scale::Linear)),
            Command::Meanfield => Some(Sweep::new("pump.sigma_n", 0.5, 1.1, 61, Scale::Linear)),
            Command::Sensitivity => Some(Sweep::new("sensor.power", 1e-14, 1e-6, 161, Scale::Log)),
            Command::Pole => Some(Sweep::new("sensor.alpha_c", 1e2, 1e5, 301, Scale::Log)),
            Command::Improvement => Some(Sweep::new("sensor.length", 1e-3, 30.0, 121, Scale::Log)),
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// Device quantities shared by all commands at one configuration point.
#[derive(Debug, Clone, Copy)]
pub struct Device {
    pub consts: PhysicalConstantsF64,
    pub rates: CavityRatesF64,
    pub g: f64,
    pub omega: f64,
    pub p_th: f64,
}

impl Device {
    pub fn new(cfg: &RunConfig) -> Result<Self, ModelError> {
        let consts = PhysicalConstantsF64::codata2018();
        let rates = derive_rates(&cfg.geometry, &consts)?;
        let g = fwm_gain(&cfg.geometry, &consts)?.g;
        let omega = consts.angular_frequency(cfg.geometry.lambda_p);
        let p_th = threshold_power(&rates, g, omega, cfg.pump.delta_p, &consts)?;
        Ok(Self {
            consts,
            rates,
            g,
            omega,
            p_th,
        })
    }

    /// Injection set by either the bus power or the normalized level.
    pub fn injection(&self, cfg: &RunConfig) -> Result<InjectionF64, ModelError> {
        self.injection_on(&self.rates, cfg)
    }

    fn injection_on(&self, rates: &CavityRatesF64, cfg: &RunConfig) -> Result<InjectionF64, ModelError> {
        let inj = match cfg.pump.power {
            Some(p) => sigma_from_power(p, rates, self.g, self.omega, cfg.pump.delta_p, &self.consts)?,
            None => InjectionF64::from_normalized(sigma_n(cfg), rates)?,
        };
        Ok(inj.with_phase(inj.phase() + 2.0 * cfg.pump.phase))
    }

    /// Bus pump power, W.
    pub fn pump_power(&self, cfg: &RunConfig) -> Result<f64, ModelError> {
        match cfg.pump.power {
            Some(p) => Ok(p),
            None => power_for_sigma(sigma_n(cfg), &self.rates, self.g, self.omega, cfg.pump.delta_p, &self.consts),
        }
    }

    /// Sensor description; the pump flux is charged when `sensor.charge_pump`.
    pub fn sensor(&self, cfg: &RunConfig) -> Result<SensorSpecF64, ModelError> {
        let s = &cfg.sensor;
        let mut spec = SensorSpecF64::new(s.phi, s.eta.unwrap_or(1.0), s.alpha_c.unwrap_or(DEFAULT_ALPHA_C))?;
        if let Some(length) = s.length {
            spec = spec.with_length(s.alpha_loss, length)?;
        }
        if let Some(p) = s.power {
            spec = spec.with_coherent_power(p, self.omega, &self.consts)?;
        }
        if s.charge_pump {
            let flux = self.pump_power(cfg)? / (self.consts.hbar * self.omega);
            spec = spec.with_pump_flux(flux)?;
        }
        Ok(spec.with_squeeze_phase(s.squeeze_phase))
    }
}

fn sigma_n(cfg: &RunConfig) -> f64 {
    cfg.pump.sigma_n.unwrap_or(DEFAULT_SIGMA_N)
}

fn at(cfg: &RunConfig, key: &str, v: f64) -> RunConfig {
    let mut c = cfg.clone();
    c.set_numeric(key, v).expect("sweep variable was validated");
    c
}

/// Runs `eval` at every grid point in parallel, in grid order. Each row
/// starts with the swept value; failed points keep it and carry a flag.
fn sweep_rows<F>(cfg: &RunConfig, sweep: &Sweep, width: usize, eval: F) -> Vec<Row>
where
    F: Fn(&RunConfig) -> Result<Vec<f64>, ModelError> + Sync,
{
    sweep
        .values()
        .par_iter()
        .map(|&v| {
            let point = at(cfg, &sweep.variable, v);
            match eval(&point) {
                Ok(mut vals) => {
                    vals.insert(0, v);
                    Row::ok(vals)
                }
                Err(e) => Row::failed(vec![v], 1, width, &e),
            }
        })
        .collect()
}

fn single_row<F>(cfg: &RunConfig, width: usize, eval: F) -> Vec<Row>
where
    F: Fn(&RunConfig) -> Result<Vec<f64>, ModelError>,
{
    match eval(cfg) {
        Ok(v) => vec![Row::ok(v)],
        Err(e) => vec![Row::failed(Vec::new(), 0, width, &e)],
    }
}

/// Evaluates `cmd` over its grid. Only configuration problems are errors;
/// physics failures become flagged rows.
pub fn run_command(cmd: Command, cfg: &RunConfig) -> Result<ResultTable, ConfigError> {
    let sweep = cfg.sweep.clone().or_else(|| cmd.default_sweep());
    let canonical = format!("command = {}\n{}", cmd.name(), cfg.canonical());
    let mut columns: Vec<&str> = Vec::new();
    if let Some(s) = &sweep {
        columns.push(&s.variable);
    }
    let rows = match cmd {
        Command::Rates => {
            columns.extend(["kappa", "gamma", "total", "g", "p_th", "sigma_n", "pump_power"]);
            let eval = |c: &RunConfig| {
                let d = Device::new(c)?;
                let inj = d.injection(c)?;
                Ok(vec![
                    d.rates.kappa(),
                    d.rates.gamma(),
                    d.rates.total(),
                    d.g,
                    d.p_th,
                    inj.normalized(),
                    d.pump_power(c)?,
                ])
            };
            rows_for(cfg, sweep.as_ref(), columns.len(), eval)
        }
        Command::Squeezing => {
            columns.extend(["sigma_n", "variance", "variance_db", "v_sq_db", "v_anti_db"]);
            let eval = |c: &RunConfig| {
                let d = Device::new(c)?;
                let inj = d.injection(c)?;
                let v = quadrature_variance(&d.rates, &inj, c.analysis.lo_phase)?;
                let (sq, anti) = variance_extrema(&d.rates, &inj)?;
                Ok(vec![inj.normalized(), v, to_db(v), to_db(sq), to_db(anti)])
            };
            rows_for(cfg, sweep.as_ref(), columns.len(), eval)
        }
        Command::Jsi => {
            if cfg.sweep.is_some() {
                return Err(ConfigError {
                    line: None,
                    key: "sweep.variable".into(),
                    message: "`jsi` evaluates its own 2-D grid (analysis.jsi_points, analysis.jsi_span); remove the sweep block".into(),
                });
            }
            columns.extend(["dw_s", "dw_i", "jsi", "jsi_normalized"]);
            jsi_rows(cfg)
        }
        Command::Meanfield => {
            columns.extend(["sigma_n", "ns_lin", "ns_mf", "np_lin", "np_mf", "relative_error"]);
            meanfield_rows(cfg, sweep.as_ref(), columns.len())
        }
        Command::Sensitivity => {
            columns.extend(["alpha_c", "dphi_coherent", "dphi_squeezed", "snl", "improvement"]);
            let h = cfg.analysis.fd_step;
            let eval = |c: &RunConfig| {
                let d = Device::new(c)?;
                let inj = d.injection(c)?;
                let spec = d.sensor(c)?;
                let pair = output_moments(&d.rates, &inj, &Detunings::zero(), &SeedAmplitudes::vacuum())?;
                let coherent = phase_sensitivity_coherent(&spec)?;
                let rep = phase_sensitivity_numeric_with_step(&spec, Some(&pair), h)?;
                Ok(vec![spec.alpha_c.norm(), coherent, rep.dphi, rep.snl, coherent / rep.dphi])
            };
            rows_for(cfg, sweep.as_ref(), columns.len(), eval)
        }
        Command::Pole => {
            columns.extend(["alpha_c", "pole_alpha_c", "dphi_coherent", "dphi_squeezed"]);
            let eval = |c: &RunConfig| {
                let d = Device::new(c)?;
                let inj = d.injection(c)?;
                let spec = d.sensor(c)?;
                Ok(vec![
                    spec.alpha_c.norm(),
                    pole_coherent_amplitude(&d.rates, &inj)?,
                    phase_sensitivity_coherent(&spec)?,
                    phase_sensitivity_squeezed(&spec, &d.rates, &inj)?,
                ])
            };
            rows_for(cfg, sweep.as_ref(), columns.len(), eval)
        }
        Command::Improvement => {
            columns.insert(0, "decay_ratio");
            columns.extend(["eta", "improvement"]);
            improvement_rows(cfg, sweep.as_ref(), columns.len())
        }
    };
    let mut table = ResultTable::new(&columns, &canonical);
    for r in rows {
        table.push(r);
    }
    Ok(table)
}

fn rows_for<F>(cfg: &RunConfig, sweep: Option<&Sweep>, width: usize, eval: F) -> Vec<Row>
where
    F: Fn(&RunConfig) -> Result<Vec<f64>, ModelError> + Sync,
{
    match sweep {
        Some(s) => sweep_rows(cfg, s, width, eval),
        None => single_row(cfg, width, eval),
    }
}

fn jsi_rows(cfg: &RunConfig) -> Vec<Row> {
    let n = cfg.analysis.jsi_points;
    let setup = Device::new(cfg).and_then(|d| Ok((d, d.injection(cfg)?)));
    let (d, inj) = match setup {
        Ok(x) => x,
        Err(e) => return vec![Row::failed(Vec::new(), 0, 4, &e)],
    };
    let half = cfg.analysis.jsi_span * d.rates.total();
    let axis = Sweep::new("dw", -half, half, n, Scale::Linear).values();
    let peak = jsi(&d.rates, &inj, 0.0, 0.0);
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (ws, wi) = (axis[k / n], axis[k % n]);
            match (&jsi(&d.rates, &inj, ws, wi), &peak) {
                (Ok(v), Ok(p)) => Row::ok(vec![ws, wi, *v, v / p]),
                (Err(e), _) | (_, Err(e)) => Row::failed(vec![ws, wi], 2, 4, e),
            }
        })
        .collect()
}

fn meanfield_rows(cfg: &RunConfig, sweep: Option<&Sweep>, width: usize) -> Vec<Row> {
    let eval = |c: &RunConfig| -> Result<(Vec<f64>, bool), ModelError> {
        let d = Device::new(c)?;
        let sn = match c.pump.power {
            Some(p) => p / d.p_th,
            None => sigma_n(c),
        };
        let solver = SolverConfig::for_rates(&d.rates);
        let m = compare_models(&d.rates, d.g, sn, &solver)?;
        let above = !m.ns_lin.is_finite();
        Ok((vec![sn, m.ns_lin, m.ns_mf, m.np_lin, m.np_mf, m.relative_error()], above))
    };
    let one = |c: &RunConfig, lead: Option<f64>| {
        let mut row = match eval(c) {
            Ok((vals, above)) => Row {
                values: vals,
                // the linearized model has no steady state here; the mean-field columns stay valid
                flag: above.then_some("threshold"),
            },
            Err(e) => Row::failed(Vec::new(), 0, width - lead.is_some() as usize, &e),
        };
        if let Some(v) = lead {
            row.values.insert(0, v);
        }
        row
    };
    match sweep {
        Some(s) => s
            .values()
            .par_iter()
            .map(|&v| one(&at(cfg, &s.variable, v), Some(v)))
            .collect(),
        None => vec![one(cfg, None)],
    }
}

/// Long-format improvement table: one block per decay ratio, the ratio set
/// through the intrinsic loss at fixed extraction rate.
fn improvement_rows(cfg: &RunConfig, sweep: Option<&Sweep>, width: usize) -> Vec<Row> {
    let values = sweep.map(|s| s.values());
    let points: Vec<(f64, Option<f64>)> = cfg
        .analysis
        .decay_ratios
        .iter()
        .flat_map(|&dr| match &values {
            Some(vs) => vs.iter().map(|&v| (dr, Some(v))).collect::<Vec<_>>(),
            None => vec![(dr, None)],
        })
        .collect();
    points
        .par_iter()
        .map(|&(dr, v)| {
            let c = match (sweep, v) {
                (Some(s), Some(v)) => at(cfg, &s.variable, v),
                _ => cfg.clone(),
            };
            let mut lead = vec![dr];
            lead.extend(v);
            let eval = || -> Result<Vec<f64>, ModelError> {
                let d = Device::new(&c)?;
                let rates = d.rates.with_decay_ratio(dr)?;
                let inj = d.injection_on(&rates, &c)?;
                let spec = d.sensor(&c)?;
                let coherent = phase_sensitivity_coherent(&spec)?;
                let squeezed = phase_sensitivity_squeezed(&spec, &rates, &inj)?;
                Ok(vec![spec.eta, coherent / squeezed])
            };
            match eval() {
                Ok(vals) => {
                    lead.extend(vals);
                    Row::ok(lead)
                }
                Err(e) => {
                    let keep = lead.len();
                    Row::failed(lead, keep, width, &e)
                }
            }
        })
        .collect()
}
