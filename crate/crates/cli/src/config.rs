//! Flat `section.key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;

use ringsqueeze::params::RingGeometry;
use ringsqueeze::Error as ModelError;

/// Configuration error with the offending key and, when it came from a
/// config line, its 1-based line number.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl Sweep {
    pub fn new(variable: &str, start: f64, stop: f64, points: usize, scale: Scale) -> Self {
        Self {
            variable: variable.to_string(),
            start,
            stop,
            points,
            scale,
        }
    }

    /// Grid values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    return self.stop;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => self.start + t * (self.stop - self.start),
                    Scale::Log => (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PumpBlock {
    pub power: Option<f64>,
    pub sigma_n: Option<f64>,
    pub delta_p: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorBlock {
    pub phi: f64,
    pub eta: Option<f64>,
    pub length: Option<f64>,
    pub alpha_c: Option<f64>,
    pub power: Option<f64>,
    pub alpha_loss: f64,
    pub charge_pump: bool,
    pub squeeze_phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisBlock {
    pub lo_phase: f64,
    pub decay_ratios: Vec<f64>,
    pub jsi_points: usize,
    pub jsi_span: f64,
    pub fd_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub geometry: RingGeometry<f64>,
    pub pump: PumpBlock,
    pub sensor: SensorBlock,
    pub sweep: Option<Sweep>,
    pub analysis: AnalysisBlock,
}

pub const DEFAULT_SIGMA_N: f64 = 0.99895;
pub const DEFAULT_ALPHA_C: f64 = 1e5;

impl Default for RunConfig {
    fn default() -> Self {
        let geometry = RingGeometry::si3n4_reference();
        Self {
            geometry,
            pump: PumpBlock {
                power: None,
                sigma_n: None,
                delta_p: 0.0,
                phase: 0.0,
            },
            sensor: SensorBlock {
                phi: std::f64::consts::FRAC_PI_2,
                eta: None,
                length: None,
                alpha_c: None,
                power: None,
                alpha_loss: geometry.alpha_loss,
                charge_pump: true,
                squeeze_phase: 0.0,
            },
            sweep: None,
            analysis: AnalysisBlock {
                lo_phase: 0.0,
                decay_ratios: vec![10.0, 31.5, 100.0, 1000.0],
                jsi_points: 200,
                jsi_span: 3.0,
                fd_step: 1e-6,
            },
        }
    }
}

/// Keys that take a single real value, in canonical order.
pub const NUMERIC_KEYS: &[&str] = &[
    "geometry.ring_length",
    "geometry.n_eff",
    "geometry.n_g",
    "geometry.cross_coupling",
    "geometry.alpha_loss",
    "geometry.n2",
    "geometry.a_eff",
    "geometry.lambda_p",
    "pump.power",
    "pump.sigma_n",
    "pump.delta_p",
    "pump.phase",
    "sensor.phi",
    "sensor.eta",
    "sensor.length",
    "sensor.alpha_c",
    "sensor.power",
    "sensor.alpha_loss",
    "sensor.squeeze_phase",
    "analysis.lo_phase",
    "analysis.jsi_span",
    "analysis.fd_step",
];

const OTHER_KEYS: &[&str] = &[
    "sensor.charge_pump",
    "analysis.decay_ratios",
    "analysis.jsi_points",
    "sweep.variable",
    "sweep.start",
    "sweep.stop",
    "sweep.points",
    "sweep.scale",
];

impl RunConfig {
    /// Sets a numeric key. Setting one of two alternative keys clears the
    /// other (`pump.power`/`pump.sigma_n`, `sensor.eta`/`sensor.length`,
    /// `sensor.alpha_c`/`sensor.power`).
    pub fn set_numeric(&mut self, key: &str, v: f64) -> Result<(), String> {
        let g = &mut self.geometry;
        match key {
            "geometry.ring_length" => g.ring_length = v,
            "geometry.n_eff" => g.n_eff = v,
            "geometry.n_g" => g.n_g = v,
            "geometry.cross_coupling" => g.cross_coupling = v,
            "geometry.alpha_loss" => g.alpha_loss = v,
            "geometry.n2" => g.n2 = v,
            "geometry.a_eff" => g.a_eff = v,
            "geometry.lambda_p" => g.lambda_p = v,
            "pump.power" => {
                self.pump.power = Some(v);
                self.pump.sigma_n = None;
            }
            "pump.sigma_n" => {
                self.pump.sigma_n = Some(v);
                self.pump.power = None;
            }
            "pump.delta_p" => self.pump.delta_p = v,
            "pump.phase" => self.pump.phase = v,
            "sensor.phi" => self.sensor.phi = v,
            "sensor.eta" => {
                self.sensor.eta = Some(v);
                self.sensor.length = None;
            }
            "sensor.length" => {
                self.sensor.length = Some(v);
                self.sensor.eta = None;
            }
            "sensor.alpha_c" => {
                self.sensor.alpha_c = Some(v);
                self.sensor.power = None;
            }
            "sensor.power" => {
                self.sensor.power = Some(v);
                self.sensor.alpha_c = None;
            }
            "sensor.alpha_loss" => self.sensor.alpha_loss = v,
            "sensor.squeeze_phase" => self.sensor.squeeze_phase = v,
            "analysis.lo_phase" => self.analysis.lo_phase = v,
            "analysis.jsi_span" => self.analysis.jsi_span = v,
            "analysis.fd_step" => self.analysis.fd_step = v,
            _ => return Err(format!("not a numeric key (numeric keys: {})", NUMERIC_KEYS.join(", "))),
        }
        Ok(())
    }

    /// Canonical text of the resolved configuration; hashed into the output
    /// metadata.
    pub fn canonical(&self) -> String {
        let g = &self.geometry;
        let opt = |v: Option<f64>| v.map_or("unset".to_string(), |x| format!("{x:?}"));
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("geometry.ring_length", format!("{:?}", g.ring_length));
        line("geometry.n_eff", format!("{:?}", g.n_eff));
        line("geometry.n_g", format!("{:?}", g.n_g));
        line("geometry.cross_coupling", format!("{:?}", g.cross_coupling));
        line("geometry.alpha_loss", format!("{:?}", g.alpha_loss));
        line("geometry.n2", format!("{:?}", g.n2));
        line("geometry.a_eff", format!("{:?}", g.a_eff));
        line("geometry.lambda_p", format!("{:?}", g.lambda_p));
        line("pump.power", opt(self.pump.power));
        line("pump.sigma_n", opt(self.pump.sigma_n));
        line("pump.delta_p", format!("{:?}", self.pump.delta_p));
        line("pump.phase", format!("{:?}", self.pump.phase));
        line("sensor.phi", format!("{:?}", self.sensor.phi));
        line("sensor.eta", opt(self.sensor.eta));
        line("sensor.length", opt(self.sensor.length));
        line("sensor.alpha_c", opt(self.sensor.alpha_c));
        line("sensor.power", opt(self.sensor.power));
        line("sensor.alpha_loss", format!("{:?}", self.sensor.alpha_loss));
        line("sensor.charge_pump", format!("{}", self.sensor.charge_pump));
        line("sensor.squeeze_phase", format!("{:?}", self.sensor.squeeze_phase));
        line("analysis.lo_phase", format!("{:?}", self.analysis.lo_phase));
        line("analysis.decay_ratios", format!("{:?}", self.analysis.decay_ratios));
        line("analysis.jsi_points", format!("{}", self.analysis.jsi_points));
        line("analysis.jsi_span", format!("{:?}", self.analysis.jsi_span));
        line("analysis.fd_step", format!("{:?}", self.analysis.fd_step));
        match &self.sweep {
            Some(s) => {
                line("sweep.variable", s.variable.clone());
                line("sweep.start", format!("{:?}", s.start));
                line("sweep.stop", format!("{:?}", s.stop));
                line("sweep.points", format!("{}", s.points));
                line("sweep.scale", format!("{:?}", s.scale).to_lowercase());
            }
            None => line("sweep.variable", "unset".into()),
        }
        out
    }
}

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override,
}

fn err(origin: Option<Origin>, key: &str, message: impl Into<String>) -> ConfigError {
    let (line, key) = match origin {
        Some(Origin::Line(l)) => (Some(l), key.to_string()),
        Some(Origin::Override) => (None, format!("--set {key}")),
        None => (None, key.to_string()),
    };
    ConfigError {
        line,
        key,
        message: message.into(),
    }
}

/// Raw key/value entries with their origins, later entries overriding.
#[derive(Debug, Default, Clone)]
pub struct Entries {
    map: BTreeMap<String, (String, Origin)>,
}

impl Entries {
    /// Parses config text. Duplicate keys within one file are an error.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut e = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                line: Some(line_no),
                key: content.to_string(),
                message: "expected `section.key = value`".into(),
            })?;
            let key = key.trim();
            let origin = Origin::Line(line_no);
            check_key(key, Some(origin))?;
            if let Some((_, Origin::Line(prev))) = e.map.get(key) {
                return Err(err(Some(origin), key, format!("duplicate key (first set on line {prev})")));
            }
            e.map.insert(key.to_string(), (value.trim().to_string(), origin));
        }
        Ok(e)
    }

    /// Applies a `section.key=value` override.
    pub fn set_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError {
            line: None,
            key: format!("--set {assignment}"),
            message: "expected `section.key=value`".into(),
        })?;
        let key = key.trim();
        check_key(key, Some(Origin::Override))?;
        self.map.insert(key.to_string(), (value.trim().to_string(), Origin::Override));
        Ok(())
    }

    fn origin(&self, key: &str) -> Option<Origin> {
        self.map.get(key).map(|(_, o)| *o)
    }
}

fn check_key(key: &str, origin: Option<Origin>) -> Result<(), ConfigError> {
    if key.split_once('.').is_none() {
        return Err(err(origin, key, "keys have the form `section.key`"));
    }
    if !NUMERIC_KEYS.contains(&key) && !OTHER_KEYS.contains(&key) {
        return Err(err(origin, key, "unknown key"));
    }
    Ok(())
}

fn parse_f64(value: &str, key: &str, origin: Option<Origin>) -> Result<f64, ConfigError> {
    let v: f64 = value
        .parse()
        .map_err(|_| err(origin, key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(err(origin, key, "must be finite"));
    }
    Ok(v)
}

fn parse_count(value: &str, key: &str, origin: Option<Origin>) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| err(origin, key, format!("`{value}` is not a non-negative integer")))
}

/// Parses config text into a validated configuration with defaults filled.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    resolve(&Entries::parse(text)?)
}

/// Builds and validates a configuration from parsed entries.
pub fn resolve(entries: &Entries) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let get = |k: &str| entries.map.get(k).map(|(v, o)| (v.as_str(), Some(*o)));

    for pair in [
        ("pump.power", "pump.sigma_n"),
        ("sensor.eta", "sensor.length"),
        ("sensor.alpha_c", "sensor.power"),
    ] {
        if let (Some((_, oa)), Some((_, ob))) = (get(pair.0), get(pair.1)) {
            // an override of one alternative replaces a file value of the other
            match (oa, ob) {
                (Some(Origin::Override), Some(Origin::Line(_))) | (Some(Origin::Line(_)), Some(Origin::Override)) => {}
                _ => {
                    return Err(err(ob, pair.1, format!("conflicts with {}; set only one", pair.0)));
                }
            }
        }
    }

    // file values first, overrides last, so alternatives resolve in favour of --set
    let mut numeric: Vec<(&str, &str, Option<Origin>)> = NUMERIC_KEYS
        .iter()
        .filter_map(|k| get(k).map(|(v, o)| (*k, v, o)))
        .collect();
    numeric.sort_by_key(|(_, _, o)| matches!(o, Some(Origin::Override)));
    for (key, value, origin) in numeric {
        let v = parse_f64(value, key, origin)?;
        cfg.set_numeric(key, v).map_err(|m| err(origin, key, m))?;
    }

    if let Some((v, o)) = get("sensor.charge_pump") {
        cfg.sensor.charge_pump = match v {
            "true" | "yes" | "1" => true,
            "false" | "no" | "0" => false,
            _ => return Err(err(o, "sensor.charge_pump", format!("`{v}` is not a boolean"))),
        };
    }
    if let Some((v, o)) = get("analysis.decay_ratios") {
        let list: Result<Vec<f64>, _> = v
            .split(',')
            .map(|x| parse_f64(x.trim(), "analysis.decay_ratios", o))
            .collect();
        let list = list?;
        if list.is_empty() || list.iter().any(|&x| x <= 0.0) {
            return Err(err(o, "analysis.decay_ratios", "needs one or more positive values"));
        }
        cfg.analysis.decay_ratios = list;
    }
    if let Some((v, o)) = get("analysis.jsi_points") {
        let n = parse_count(v, "analysis.jsi_points", o)?;
        if n < 2 {
            return Err(err(o, "analysis.jsi_points", "must be >= 2"));
        }
        cfg.analysis.jsi_points = n;
    }

    cfg.sweep = parse_sweep(entries)?;
    validate(&cfg, entries)?;
    Ok(cfg)
}

fn parse_sweep(entries: &Entries) -> Result<Option<Sweep>, ConfigError> {
    let keys = ["sweep.variable", "sweep.start", "sweep.stop", "sweep.points", "sweep.scale"];
    let present: Vec<&str> = keys.iter().copied().filter(|k| entries.map.contains_key(*k)).collect();
    if present.is_empty() {
        return Ok(None);
    }
    let get = |k: &str| entries.map.get(k).map(|(v, o)| (v.as_str(), Some(*o)));
    let first = entries.origin(present[0]);
    let need = |k: &str| get(k).ok_or_else(|| err(first, k, "missing required key for a sweep"));
    let (var, vo) = need("sweep.variable")?;
    if !NUMERIC_KEYS.contains(&var) {
        return Err(err(vo, "sweep.variable", format!("`{var}` is not a numeric config key")));
    }
    let (s, so) = need("sweep.start")?;
    let start = parse_f64(s, "sweep.start", so)?;
    let (s, so) = need("sweep.stop")?;
    let stop = parse_f64(s, "sweep.stop", so)?;
    let (p, po) = need("sweep.points")?;
    let points = parse_count(p, "sweep.points", po)?;
    if points < 2 {
        return Err(err(po, "sweep.points", "must be >= 2"));
    }
    let scale = match get("sweep.scale") {
        None => Scale::Linear,
        Some(("linear", _)) => Scale::Linear,
        Some(("log", o)) => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(err(o, "sweep.scale", "log sweeps need positive start and stop"));
            }
            Scale::Log
        }
        Some((v, o)) => return Err(err(o, "sweep.scale", format!("`{v}` is not `linear` or `log`"))),
    };
    Ok(Some(Sweep {
        variable: var.to_string(),
        start,
        stop,
        points,
        scale,
    }))
}

fn validate(cfg: &RunConfig, entries: &Entries) -> Result<(), ConfigError> {
    let at = |k: &str| entries.origin(k);
    if let Err(ModelError::Domain { name, reason }) = cfg.geometry.validate() {
        let key = format!("geometry.{name}");
        return Err(err(at(&key), &key, reason));
    }
    let checks: [(&str, bool, &str); 12] = [
        ("pump.power", cfg.pump.power.is_none_or(|p| p >= 0.0), "must be >= 0"),
        ("pump.sigma_n", cfg.pump.sigma_n.is_none_or(|s| s >= 0.0), "must be >= 0"),
        ("sensor.eta", cfg.sensor.eta.is_none_or(|e| e > 0.0 && e <= 1.0), "must lie in (0, 1]"),
        ("sensor.length", cfg.sensor.length.is_none_or(|l| l >= 0.0), "must be >= 0"),
        ("sensor.alpha_c", cfg.sensor.alpha_c.is_none_or(|a| a >= 0.0), "must be >= 0"),
        ("sensor.power", cfg.sensor.power.is_none_or(|p| p >= 0.0), "must be >= 0"),
        ("sensor.alpha_loss", cfg.sensor.alpha_loss >= 0.0, "must be >= 0"),
        ("analysis.jsi_span", cfg.analysis.jsi_span > 0.0, "must be > 0"),
        ("analysis.fd_step", cfg.analysis.fd_step > 0.0, "must be > 0"),
        ("pump.delta_p", cfg.pump.delta_p.is_finite(), "must be finite"),
        ("sensor.phi", cfg.sensor.phi.is_finite(), "must be finite"),
        ("analysis.lo_phase", cfg.analysis.lo_phase.is_finite(), "must be finite"),
    ];
    for (key, ok, msg) in checks {
        if !ok {
            return Err(err(at(key), key, msg));
        }
    }
    Ok(())
}
