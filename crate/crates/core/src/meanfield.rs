//! Mean-field moment equations for the pumped ring.
//!
//! Two models are integrated side by side. The mean-field one keeps the pump
//! as a dynamical mode, factorizing every mixed pump/pair moment
//! (`<a_p^dag a_p a_s a_i> -> <a_p^dag a_p><a_s a_i>` and the analogous
//! products), so pair generation depletes the pump. The linearized one fixes
//! the pump at its undepleted value and keeps only the pair moments.
//!
//! All equations are written in the frame rotating at the carriers with a
//! resonant drive, so steady states are fixed points.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::params::CavityRates;
use crate::scalar::{lit, Cplx, Real};

/// Moments above which an integration is reported as divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e30;

/// Tracked intracavity moments.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentState<T> {
    /// `<a_p>`
    pub ap: Cplx<T>,
    /// `<a_p a_p>`
    pub app: Cplx<T>,
    /// `<a_p^dag a_p>`
    pub np: T,
    /// `<a_s^dag a_s>`
    pub ns: T,
    /// `<a_i^dag a_i>`
    pub ni: T,
    /// `<a_s a_i>`
    pub msi: Cplx<T>,
}

const DIM: usize = 9;

impl<T: Real> MomentState<T> {
    pub fn vacuum() -> Self {
        Self {
            ap: Cplx::zero(),
            app: Cplx::zero(),
            np: T::zero(),
            ns: T::zero(),
            ni: T::zero(),
            msi: Cplx::zero(),
        }
    }

    /// Coherent pump of amplitude `ap`, signal and idler in vacuum.
    pub fn coherent_pump(ap: Cplx<T>) -> Self {
        Self {
            ap,
            app: ap * ap,
            np: ap.norm_sqr(),
            ..Self::vacuum()
        }
    }

    fn to_array(self) -> [T; DIM] {
        [
            self.ap.re,
            self.ap.im,
            self.app.re,
            self.app.im,
            self.np,
            self.ns,
            self.ni,
            self.msi.re,
            self.msi.im,
        ]
    }

    fn from_array(a: [T; DIM]) -> Self {
        Self {
            ap: Cplx::new(a[0], a[1]),
            app: Cplx::new(a[2], a[3]),
            np: a[4],
            ns: a[5],
            ni: a[6],
            msi: Cplx::new(a[7], a[8]),
        }
    }
}

/// Time derivative of the mean-field moments with bus drive `alpha_l`
/// (sqrt(Hz)) and FWM gain `g` (1/s).
pub fn mf_derivatives<T: Real>(s: &MomentState<T>, rates: &CavityRates<T>, g: T, alpha_l: Cplx<T>) -> MomentState<T> {
    let big = rates.total();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let drive = alpha_l.scale(rates.kappa().sqrt());
    let pair_drain = (s.app * s.msi.conj()).re;
    MomentState {
        ap: s.ap.scale(-half * big) + drive - (s.ap.conj() * s.msi).scale(two * g),
        app: s.app.scale(-big) + (drive * s.ap).scale(two) - s.msi.scale(g * (four * s.np + two)),
        np: -big * s.np + two * (drive.conj() * s.ap).re - four * g * pair_drain,
        ns: -big * s.ns + two * g * pair_drain,
        ni: -big * s.ni + two * g * pair_drain,
        msi: s.msi.scale(-big) + s.app.scale(g * (s.ns + s.ni + T::one())),
    }
}

/// Time derivative of the linearized pair moments at fixed injection
/// `sigma`. The pump entries of `s` are carried unchanged.
pub fn lin_derivatives<T: Real>(s: &MomentState<T>, rates: &CavityRates<T>, sigma: Cplx<T>) -> MomentState<T> {
    let big = rates.total();
    let half = lit::<T>(0.5);
    let gain = (sigma.conj() * s.msi).re;
    MomentState {
        ap: Cplx::zero(),
        app: Cplx::zero(),
        np: T::zero(),
        ns: -big * s.ns + gain,
        ni: -big * s.ni + gain,
        msi: s.msi.scale(-big) + sigma.scale(half * (s.ns + s.ni + T::one())),
    }
}

/// Time stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with step `dt`.
    Rk4,
    /// Dormand-Prince 5(4) with step control; `dt` is the first step.
    DormandPrince,
}

/// Integrator settings. Times in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub dt: T,
    pub t_max: T,
    /// Steady state is declared once the largest relative change per
    /// `time_scale` drops below this.
    pub convergence_tol: T,
    /// Reference time for the convergence test, normally `1/Gamma`.
    pub time_scale: T,
    pub method: Method,
}

impl<T: Real> SolverConfig<T> {
    /// `dt = 0.01/Gamma`, `t_max = 200/Gamma`, tolerance `1e-9`, adaptive.
    pub fn for_rates(rates: &CavityRates<T>) -> Self {
        let tau = T::one() / rates.total();
        Self {
            dt: lit::<T>(0.01) * tau,
            t_max: lit::<T>(200.0) * tau,
            convergence_tol: lit(1e-9),
            time_scale: tau,
            method: Method::DormandPrince,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) {
            return Err(Error::domain("dt", "must be > 0"));
        }
        if !(self.convergence_tol > T::zero()) {
            return Err(Error::domain("convergence_tol", "must be > 0"));
        }
        if !(self.t_max >= self.dt) {
            return Err(Error::domain("t_max", "must be >= dt"));
        }
        if !(self.time_scale > T::zero()) {
            return Err(Error::domain("time_scale", "must be > 0"));
        }
        Ok(())
    }
}

/// Integrated steady state with the time it took to reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState<T> {
    pub state: MomentState<T>,
    pub time: T,
}

fn axpy<T: Real>(y: &[T; DIM], h: T, terms: &[(T, &[T; DIM])]) -> [T; DIM] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..DIM {
            out[i] += h * *c * k[i];
        }
    }
    out
}

fn magnitude<T: Real>(y: &[T; DIM]) -> T {
    y.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Largest relative rate of change per `tau`. Components below `1e-9` of
/// `peak` (the largest magnitude seen so far) count as zero, so decay to
/// vacuum converges too.
fn residual<T: Real>(y: &[T; DIM], f: &[T; DIM], tau: T, peak: T) -> T {
    let big = peak.max(magnitude(y));
    let floor = T::min_positive_value().max(lit::<T>(1e-9) * big);
    y.iter()
        .zip(f)
        .fold(T::zero(), |acc, (&x, &d)| acc.max((d * tau).abs() / (x.abs() + floor)))
}

fn check_finite<T: Real>(y: &[T; DIM], t: T) -> Result<()> {
    let limit = lit::<T>(DIVERGENCE_LIMIT);
    if y.iter().any(|v| !(v.abs() <= limit)) {
        return Err(Error::Divergence {
            time: t.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Integrate `derivative` from `initial` until the moments stop changing.
///
/// Fails with [`Error::Divergence`] when any moment exceeds
/// [`DIVERGENCE_LIMIT`] and with [`Error::NotConverged`] at `t_max`.
pub fn steady_state<T, F>(derivative: F, initial: MomentState<T>, cfg: &SolverConfig<T>) -> Result<SteadyState<T>>
where
    T: Real,
    F: Fn(&MomentState<T>) -> MomentState<T>,
{
    cfg.validate()?;
    let f = |y: &[T; DIM]| derivative(&MomentState::from_array(*y)).to_array();
    let mut y = initial.to_array();
    check_finite(&y, T::zero())?;
    let mut t = T::zero();
    let mut k1 = f(&y);
    let mut peak = magnitude(&y);
    let mut res = residual(&y, &k1, cfg.time_scale, peak);
    if res < cfg.convergence_tol {
        return Ok(SteadyState { state: initial, time: t });
    }
    let mut h = cfg.dt;
    while t < cfg.t_max {
        match cfg.method {
            Method::Rk4 => {
                let two = lit::<T>(2.0);
                let half = lit::<T>(0.5);
                let k2 = f(&axpy(&y, h, &[(half, &k1)]));
                let k3 = f(&axpy(&y, h, &[(half, &k2)]));
                let k4 = f(&axpy(&y, h, &[(T::one(), &k3)]));
                let sixth = T::one() / lit(6.0);
                y = axpy(&y, h * sixth, &[(T::one(), &k1), (two, &k2), (two, &k3), (T::one(), &k4)]);
                t += h;
                k1 = f(&y);
            }
            Method::DormandPrince => {
                let (y_new, k_new, err) = dp_step(&f, &y, &k1, h);
                let tol_scale = |i: usize| T::min_positive_value() + lit::<T>(1e-20) * peak + lit::<T>(1e-10) * y[i].abs().max(y_new[i].abs());
                let e = (0..DIM).fold(T::zero(), |acc, i| acc.max(err[i].abs() / tol_scale(i)));
                if !e.is_finite() {
                    return Err(Error::Divergence {
                        time: t.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let factor = if e == T::zero() {
                    lit(5.0)
                } else {
                    (lit::<T>(0.9) * e.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
                };
                if e <= T::one() {
                    t += h;
                    y = y_new;
                    k1 = k_new;
                    h *= factor;
                } else {
                    h *= factor;
                    continue;
                }
            }
        }
        check_finite(&y, t)?;
        peak = peak.max(magnitude(&y));
        res = residual(&y, &k1, cfg.time_scale, peak);
        if res < cfg.convergence_tol {
            return Ok(SteadyState {
                state: MomentState::from_array(y),
                time: t,
            });
        }
    }
    Err(Error::NotConverged {
        t_max: cfg.t_max.to_f64().unwrap_or(f64::NAN),
        residual: res.to_f64().unwrap_or(f64::NAN),
    })
}

/// One Dormand-Prince step: new state, derivative there, error estimate.
#[allow(clippy::type_complexity)]
fn dp_step<T: Real, F: Fn(&[T; DIM]) -> [T; DIM]>(f: &F, y: &[T; DIM], k1: &[T; DIM], h: T) -> ([T; DIM], [T; DIM], [T; DIM]) {
    let c = |x: f64| lit::<T>(x);
    let k2 = f(&axpy(y, h, &[(c(1.0 / 5.0), k1)]));
    let k3 = f(&axpy(y, h, &[(c(3.0 / 40.0), k1), (c(9.0 / 40.0), &k2)]));
    let k4 = f(&axpy(y, h, &[(c(44.0 / 45.0), k1), (c(-56.0 / 15.0), &k2), (c(32.0 / 9.0), &k3)]));
    let k5 = f(&axpy(
        y,
        h,
        &[
            (c(19372.0 / 6561.0), k1),
            (c(-25360.0 / 2187.0), &k2),
            (c(64448.0 / 6561.0), &k3),
            (c(-212.0 / 729.0), &k4),
        ],
    ));
    let k6 = f(&axpy(
        y,
        h,
        &[
            (c(9017.0 / 3168.0), k1),
            (c(-355.0 / 33.0), &k2),
            (c(46732.0 / 5247.0), &k3),
            (c(49.0 / 176.0), &k4),
            (c(-5103.0 / 18656.0), &k5),
        ],
    ));
    let y5 = axpy(
        y,
        h,
        &[
            (c(35.0 / 384.0), k1),
            (c(500.0 / 1113.0), &k3),
            (c(125.0 / 192.0), &k4),
            (c(-2187.0 / 6784.0), &k5),
            (c(11.0 / 84.0), &k6),
        ],
    );
    let k7 = f(&y5);
    let e = [
        c(71.0 / 57600.0),
        c(-71.0 / 16695.0),
        c(71.0 / 1920.0),
        c(-17253.0 / 339200.0),
        c(22.0 / 525.0),
        c(-1.0 / 40.0),
    ];
    let err = axpy(
        &[T::zero(); DIM],
        h,
        &[(e[0], k1), (e[1], &k3), (e[2], &k4), (e[3], &k5), (e[4], &k6), (e[5], &k7)],
    );
    (y5, k7, err)
}

/// Analytic steady state of the linearized pair moments,
/// `n_s = sigma^2 / (2 (Gamma^2 - sigma^2))`, `m_si = sigma (2 n_s + 1) / (2 Gamma)`.
pub fn linearized_steady_state<T: Real>(rates: &CavityRates<T>, sigma: Cplx<T>) -> Result<MomentState<T>> {
    let big = rates.total();
    if !(big > T::zero()) {
        return Err(Error::DegenerateCavity);
    }
    let s = sigma.norm() / big;
    if !(s < T::one()) {
        return Err(Error::Divergence { time: f64::INFINITY });
    }
    let ns = s * s / (lit::<T>(2.0) * (T::one() - s * s));
    let msi = sigma.scale((lit::<T>(2.0) * ns + T::one()) / (lit::<T>(2.0) * big));
    Ok(MomentState {
        ns,
        ni: ns,
        msi,
        ..MomentState::vacuum()
    })
}

/// Bus amplitude (real) that makes the undepleted injection `sigma_n Gamma`.
pub fn drive_for_sigma<T: Real>(rates: &CavityRates<T>, g: T, sigma_n: T) -> Result<Cplx<T>> {
    if !(g > T::zero()) || !(rates.kappa() > T::zero()) {
        return Err(Error::domain("g", "gain and coupling must be > 0"));
    }
    if !(sigma_n >= T::zero()) {
        return Err(Error::domain("sigma_n", "must be >= 0"));
    }
    let big = rates.total();
    let flux = sigma_n * big * big * big / (lit::<T>(8.0) * g * rates.kappa());
    Ok(Cplx::new(flux.sqrt(), T::zero()))
}

/// Linearized versus mean-field steady state at one pump level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelComparison<T> {
    pub sigma_n: T,
    /// Linearized `n_s`; infinite at and above threshold.
    pub ns_lin: T,
    pub ns_mf: T,
    /// Undepleted pump photon number.
    pub np_lin: T,
    pub np_mf: T,
}

impl<T: Real> ModelComparison<T> {
    /// `|ns_lin - ns_mf| / ns_mf`.
    pub fn relative_error(&self) -> T {
        (self.ns_lin - self.ns_mf).abs() / self.ns_mf
    }
}

/// Solve both models at normalized injection `sigma_n`.
///
/// The horizon of `cfg` is stretched by `1/|1 - sigma_n|`: close to
/// threshold the slowest mode relaxes at roughly `Gamma |1 - sigma_n|`.
pub fn compare_models<T: Real>(rates: &CavityRates<T>, g: T, sigma_n: T, cfg: &SolverConfig<T>) -> Result<ModelComparison<T>> {
    let alpha_l = drive_for_sigma(rates, g, sigma_n)?;
    let big = rates.total();
    let ap0 = alpha_l.scale(lit::<T>(2.0) * rates.kappa().sqrt() / big);
    let np_lin = ap0.norm_sqr();
    let sigma = (ap0 * ap0).scale(lit::<T>(2.0) * g);
    let mut start = MomentState::coherent_pump(ap0);
    let mut cfg = *cfg;
    let lin = if sigma_n < T::one() {
        linearized_steady_state(rates, sigma)
    } else {
        Err(Error::Threshold {
            sigma_n: sigma_n.to_f64().unwrap_or(f64::NAN),
        })
    };
    let ns_lin = match lin {
        // a pair population beyond the pump photon number is no useful start
        Ok(lin) if lin.ns < np_lin => {
            start.ns = lin.ns;
            start.ni = lin.ni;
            start.msi = lin.msi;
            lin.ns
        }
        Ok(lin) => lin.ns,
        Err(_) => T::infinity(),
    };
    cfg.t_max /= (T::one() - sigma_n).abs().max(lit(1e-6));
    let mf = steady_state(|s| mf_derivatives(s, rates, g, alpha_l), start, &cfg)?;
    Ok(ModelComparison {
        sigma_n,
        ns_lin,
        ns_mf: mf.state.ns,
        np_lin,
        np_mf: mf.state.np,
    })
}

/// Largest `sigma_n` below threshold at which the linearized `n_s` stays
/// within `error_tol` (relative) of the mean-field value. Bisection.
pub fn validity_bound<T: Real>(rates: &CavityRates<T>, g: T, error_tol: T) -> Result<T> {
    if !(error_tol > T::zero() && error_tol < lit(0.5)) {
        return Err(Error::domain("error_tol", "must lie in (0, 0.5)"));
    }
    let cfg = SolverConfig::for_rates(rates);
    let ok = |sn: T| -> Result<bool> { Ok(compare_models(rates, g, sn, &cfg)?.relative_error() <= error_tol) };
    let mut lo = lit::<T>(1e-2);
    if !ok(lo)? {
        return Ok(T::zero());
    }
    let mut hi = T::one() - lit::<T>(1e-7).max(T::epsilon() * lit(8.0));
    if ok(hi)? {
        return Ok(hi);
    }
    for _ in 0..60 {
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < lit(1e-7) {
            break;
        }
    }
    Ok(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive_rates, fwm_gain, PhysicalConstants, RingGeometry};
    use approx::assert_relative_eq;

    fn reference_rates() -> (CavityRates<f64>, f64) {
        let geom = RingGeometry::si3n4_reference();
        let consts = PhysicalConstants::codata2018();
        (derive_rates(&geom, &consts).unwrap(), fwm_gain(&geom, &consts).unwrap().g)
    }

    #[test]
    fn vacuum_is_fixed_point() {
        let (r, g) = reference_rates();
        let d = mf_derivatives(&MomentState::vacuum(), &r, g, Cplx::zero());
        assert_eq!(d.to_array(), [0.0; DIM]);
        let cfg = SolverConfig::for_rates(&r);
        let s = steady_state(|s| mf_derivatives(s, &r, g, Cplx::zero()), MomentState::vacuum(), &cfg).unwrap();
        assert_eq!(s.state, MomentState::vacuum());
    }

    #[test]
    fn uncoupled_pump_reaches_empty_cavity_value() {
        let (r, _) = reference_rates();
        let alpha_l = Cplx::new(1.0e8, 0.0);
        let cfg = SolverConfig::for_rates(&r);
        let s = steady_state(|s| mf_derivatives(s, &r, 0.0, alpha_l), MomentState::vacuum(), &cfg).unwrap();
        let expect = 4.0 * r.kappa() * alpha_l.norm_sqr() / r.total().powi(2);
        assert_relative_eq!(s.state.np, expect, max_relative = 1e-8);
        assert_relative_eq!(s.state.ap.norm_sqr(), expect, max_relative = 1e-8);
        assert_eq!(s.state.ns, 0.0);
    }

    #[test]
    fn linearized_decays_without_injection() {
        let (r, _) = reference_rates();
        let start = MomentState {
            ns: 3.0,
            ni: 3.0,
            msi: Cplx::new(1.0, 0.5),
            ..MomentState::vacuum()
        };
        let mut cfg = SolverConfig::for_rates(&r);
        cfg.t_max *= 10.0;
        cfg.convergence_tol = 1e-6;
        let s = steady_state(|s| lin_derivatives(s, &r, Cplx::zero()), start, &cfg).unwrap();
        assert!(s.state.ns < 1e-6 && s.state.msi.norm() < 1e-6);
    }

    #[test]
    fn linearized_fixed_point_matches_integration() {
        let (r, _) = reference_rates();
        for sn in [0.2, 0.5, 0.9] {
            let sigma = Cplx::new(sn * r.total(), 0.0);
            let analytic = linearized_steady_state(&r, sigma).unwrap();
            let d = lin_derivatives(&analytic, &r, sigma);
            assert!(d.ns.abs() * (1.0 / r.total()) < 1e-12 * analytic.ns);
            let mut cfg = SolverConfig::for_rates(&r);
            cfg.t_max *= 20.0;
            let s = steady_state(|s| lin_derivatives(s, &r, sigma), MomentState::vacuum(), &cfg).unwrap();
            assert_relative_eq!(s.state.ns, analytic.ns, max_relative = 1e-7);
            assert_relative_eq!(s.state.msi.re, analytic.msi.re, max_relative = 1e-7);
        }
    }

    #[test]
    fn linearized_at_threshold_has_no_steady_state() {
        let (r, _) = reference_rates();
        let sigma = Cplx::new(r.total(), 0.0);
        assert!(matches!(linearized_steady_state(&r, sigma), Err(Error::Divergence { .. })));
        let above = Cplx::new(1.3 * r.total(), 0.0);
        let mut cfg = SolverConfig::for_rates(&r);
        cfg.t_max = 1e6 / r.total();
        let out = steady_state(|s| lin_derivatives(s, &r, above), MomentState::vacuum(), &cfg);
        assert!(matches!(out, Err(Error::Divergence { .. })), "{out:?}");
    }

    #[test]
    fn models_agree_well_below_threshold() {
        let (r, g) = reference_rates();
        let cfg = SolverConfig::for_rates(&r);
        for sn in [0.1, 0.5, 0.9] {
            let c = compare_models(&r, g, sn, &cfg).unwrap();
            assert!(c.relative_error() < 0.01, "{sn}: {c:?}");
            assert!(c.np_mf <= c.np_lin);
        }
    }

    #[test]
    fn mean_field_matches_intracavity_number() {
        let (r, g) = reference_rates();
        let cfg = SolverConfig::for_rates(&r);
        let c = compare_models(&r, g, 0.95, &cfg).unwrap();
        let inj = crate::params::Injection::from_normalized(0.95, &r).unwrap();
        let oracle = crate::cavity_io::intracavity_photon_number(&r, &inj).unwrap();
        assert_relative_eq!(c.ns_mf, oracle, max_relative = 0.05);
    }

    #[test]
    fn pump_depletes_above_threshold() {
        let (r, g) = reference_rates();
        let cfg = SolverConfig::for_rates(&r);
        let c = compare_models(&r, g, 1.05, &cfg).unwrap();
        assert!(c.ns_lin.is_infinite());
        assert_relative_eq!(c.np_mf, r.total() / (2.0 * g), max_relative = 0.01);
        assert!(c.np_lin > 1.04 * c.np_mf);
        assert!(c.ns_mf.is_finite() && c.ns_mf > 0.0);
    }

    #[test]
    fn steady_states_are_physical() {
        let (r, g) = reference_rates();
        let cfg = SolverConfig::for_rates(&r);
        let mut last_np = 0.0;
        for sn in [0.3, 0.7, 0.99, 1.02, 1.2] {
            let alpha_l = drive_for_sigma(&r, g, sn).unwrap();
            let ap0 = alpha_l * (2.0 * r.kappa().sqrt() / r.total());
            let start = MomentState::coherent_pump(ap0);
            let mut c = cfg;
            c.t_max = 1e6 / r.total();
            let s = steady_state(|s| mf_derivatives(s, &r, g, alpha_l), start, &c).unwrap().state;
            assert!(s.np >= 0.0 && s.ns >= 0.0 && s.ni >= 0.0);
            assert!(s.ap.norm_sqr() <= s.np * (1.0 + 1e-9));
            assert!(s.msi.norm_sqr() <= s.ns * (s.ni + 1.0) * (1.0 + 1e-9));
            assert_relative_eq!(s.ns, s.ni, max_relative = 1e-12);
            assert!(s.np >= last_np);
            last_np = s.np;
        }
    }

    #[test]
    fn fixed_step_is_insensitive_to_halving_dt() {
        let (r, g) = reference_rates();
        let alpha_l = drive_for_sigma(&r, g, 0.5).unwrap();
        let mut cfg = SolverConfig::for_rates(&r).with_method(Method::Rk4);
        cfg.t_max = 400.0 / r.total();
        let a = steady_state(|s| mf_derivatives(s, &r, g, alpha_l), MomentState::vacuum(), &cfg).unwrap();
        cfg.dt /= 2.0;
        let b = steady_state(|s| mf_derivatives(s, &r, g, alpha_l), MomentState::vacuum(), &cfg).unwrap();
        assert_relative_eq!(a.state.ns, b.state.ns, max_relative = 1e-7);
        assert_relative_eq!(a.state.np, b.state.np, max_relative = 1e-7);
    }

    #[test]
    fn short_horizon_reports_non_convergence() {
        let (r, g) = reference_rates();
        let alpha_l = drive_for_sigma(&r, g, 0.5).unwrap();
        let mut cfg = SolverConfig::for_rates(&r);
        cfg.t_max = 2.0 / r.total();
        let out = steady_state(|s| mf_derivatives(s, &r, g, alpha_l), MomentState::vacuum(), &cfg);
        assert!(matches!(out, Err(Error::NotConverged { .. })), "{out:?}");
    }

    #[test]
    fn bad_config_rejected() {
        let (r, _) = reference_rates();
        let mut cfg = SolverConfig::for_rates(&r);
        cfg.dt = 0.0;
        assert!(steady_state(|s| *s, MomentState::vacuum(), &cfg).is_err());
        assert!(validity_bound(&r, 1.0, 0.0).is_err());
        assert!(validity_bound(&r, 1.0, 0.5).is_err());
    }
}
