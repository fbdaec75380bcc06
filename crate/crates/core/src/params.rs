//! Device parameters and the rates derived from them.
//!
//! Converts a physical microring description (length, indices, coupling,
//! propagation loss, Kerr nonlinearity) into the cavity decay rates, the
//! four-wave-mixing gain, the intracavity pump and the injection parameter
//! that drive the input-output and interferometer models.

use crate::error::{Error, Result};
use crate::scalar::{cplx, lit, Cplx, Real};

/// Fundamental constants (CODATA 2018).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    /// Speed of light in vacuum, m/s.
    pub c: T,
    /// Reduced Planck constant, J s.
    pub hbar: T,
    /// Vacuum permittivity, F/m.
    pub eps0: T,
}

impl<T: Real> PhysicalConstants<T> {
    pub fn codata2018() -> Self {
        Self {
            c: lit(299_792_458.0),
            hbar: lit(1.054_571_817e-34),
            eps0: lit(8.854_187_812_8e-12),
        }
    }

    /// Angular frequency of light with vacuum wavelength `lambda`.
    pub fn angular_frequency(&self, lambda: T) -> T {
        T::TAU() * self.c / lambda
    }
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Physical description of the ring and its bus waveguide. SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingGeometry<T> {
    /// Ring circumference, m.
    pub ring_length: T,
    pub n_eff: T,
    pub n_g: T,
    /// Power fraction coupled to the bus per round trip.
    pub cross_coupling: T,
    /// Propagation loss, 1/m.
    pub alpha_loss: T,
    /// Nonlinear refractive index, m^2/W.
    pub n2: T,
    /// Effective mode area, m^2.
    pub a_eff: T,
    /// Pump vacuum wavelength, m.
    pub lambda_p: T,
}

impl<T: Real> RingGeometry<T> {
    /// Si3N4 ring of 220 um radius pumped at 1550 nm: the reference device
    /// used for all default studies.
    pub fn si3n4_reference() -> Self {
        Self {
            ring_length: T::TAU() * lit(220e-6),
            n_eff: lit(1.801),
            n_g: lit(2.10087),
            cross_coupling: lit(0.01),
            alpha_loss: lit(0.23),
            n2: lit(2.4e-19),
            a_eff: lit(1.05564e-12),
            lambda_p: lit(1550e-9),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("ring_length", self.ring_length),
            ("n_eff", self.n_eff),
            ("n_g", self.n_g),
            ("cross_coupling", self.cross_coupling),
            ("alpha_loss", self.alpha_loss),
            ("n2", self.n2),
            ("a_eff", self.a_eff),
            ("lambda_p", self.lambda_p),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::domain(name, "must be finite"));
            }
        }
        if self.ring_length <= T::zero() {
            return Err(Error::domain("ring_length", "must be > 0"));
        }
        if self.n_eff < T::one() {
            return Err(Error::domain("n_eff", "must be >= 1"));
        }
        if self.n_g < T::one() {
            return Err(Error::domain("n_g", "must be >= 1"));
        }
        if self.cross_coupling < T::zero() || self.cross_coupling > T::one() {
            return Err(Error::domain("cross_coupling", "must lie in [0, 1]"));
        }
        if self.alpha_loss < T::zero() {
            return Err(Error::domain("alpha_loss", "must be >= 0"));
        }
        if self.a_eff <= T::zero() {
            return Err(Error::domain("a_eff", "must be > 0"));
        }
        if self.lambda_p <= T::zero() {
            return Err(Error::domain("lambda_p", "must be > 0"));
        }
        Ok(())
    }
}

/// Cavity decay rates, all in 1/s.
///
/// Fields are private so that `total == kappa + gamma` holds exactly for
/// every value in existence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityRates<T> {
    kappa: T,
    gamma: T,
    total: T,
    round_trip: T,
    transmission: T,
}

impl<T: Real> CavityRates<T> {
    /// Rates from explicit coupling and loss values. The round-trip time and
    /// transmission rate are unknown here and set to NaN.
    pub fn from_decay(kappa: T, gamma: T) -> Result<Self> {
        if !(kappa >= T::zero()) || !kappa.is_finite() {
            return Err(Error::domain("kappa", "must be finite and >= 0"));
        }
        if !(gamma >= T::zero()) || !gamma.is_finite() {
            return Err(Error::domain("gamma", "must be finite and >= 0"));
        }
        Ok(Self {
            kappa,
            gamma,
            total: kappa + gamma,
            round_trip: T::nan(),
            transmission: T::nan(),
        })
    }

    /// Coupling rate to the bus waveguide.
    pub fn kappa(&self) -> T {
        self.kappa
    }

    /// Intrinsic loss rate.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Total decay `kappa + gamma`; also the oscillation threshold of the
    /// injection parameter.
    pub fn total(&self) -> T {
        self.total
    }

    pub fn round_trip(&self) -> T {
        self.round_trip
    }

    /// Rate of photons staying in ring or bus per round trip, `(1-X)/t_round`.
    pub fn transmission(&self) -> T {
        self.transmission
    }

    /// Coupling-to-loss ratio `kappa / gamma`.
    pub fn decay_ratio(&self) -> T {
        self.kappa / self.gamma
    }

    /// Same coupling, intrinsic loss chosen so that `kappa/gamma = ratio`.
    pub fn with_decay_ratio(&self, ratio: T) -> Result<Self> {
        if !(ratio > T::zero()) {
            return Err(Error::domain("decay_ratio", "must be > 0"));
        }
        let mut r = Self::from_decay(self.kappa, self.kappa / ratio)?;
        r.round_trip = self.round_trip;
        r.transmission = self.transmission;
        Ok(r)
    }
}

/// Coupling, loss and transmission rates of a ring from its geometry.
pub fn derive_rates<T: Real>(geom: &RingGeometry<T>, consts: &PhysicalConstants<T>) -> Result<CavityRates<T>> {
    geom.validate()?;
    let round_trip = geom.n_eff * geom.ring_length / consts.c;
    let per_trip = consts.c / (geom.n_eff * geom.ring_length);
    let kappa = geom.cross_coupling * per_trip;
    // 1 - exp(-x) without cancellation for short, low-loss rings
    let gamma = -(-geom.alpha_loss * geom.ring_length).exp_m1() * per_trip;
    let transmission = (T::one() - geom.cross_coupling) * per_trip;
    Ok(CavityRates {
        kappa,
        gamma,
        total: kappa + gamma,
        round_trip,
        transmission,
    })
}

/// Power transmission of a waveguide section, `exp(-alpha_loss * length)`.
pub fn efficiency<T: Real>(alpha_loss: T, length: T) -> T {
    (-alpha_loss * length).exp()
}

/// Nonlinear coupling strength of the ring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwmStrength<T> {
    /// Four-wave-mixing gain, 1/s.
    pub g: T,
    /// Nonlinear waveguide parameter, 1/(W m).
    pub gamma_nl: T,
    /// Group velocity, m/s.
    pub v_g: T,
}

/// Four-wave-mixing gain in the degenerate approximation
/// `g = hbar w_p^2 v_g^2 n2 / (c A_eff L)`.
pub fn fwm_gain<T: Real>(geom: &RingGeometry<T>, consts: &PhysicalConstants<T>) -> Result<FwmStrength<T>> {
    let omega_p = consts.angular_frequency(geom.lambda_p);
    fwm_gain_nondegenerate(geom, consts, omega_p, omega_p)
}

/// Four-wave-mixing gain with the signal and idler frequencies kept,
/// `g = hbar w_p (w_p^2 w_s w_i)^{1/4} v_g^2 n2 / (c A_eff L)`.
pub fn fwm_gain_nondegenerate<T: Real>(
    geom: &RingGeometry<T>,
    consts: &PhysicalConstants<T>,
    omega_s: T,
    omega_i: T,
) -> Result<FwmStrength<T>> {
    geom.validate()?;
    if !(omega_s > T::zero()) || !(omega_i > T::zero()) {
        return Err(Error::domain("omega", "signal and idler frequencies must be > 0"));
    }
    let omega_p = consts.angular_frequency(geom.lambda_p);
    let v_g = consts.c / geom.n_g;
    let gamma_nl = omega_p * geom.n2 / (consts.c * geom.a_eff);
    // (w_p^2 w_s w_i)^{1/4}, factored to stay inside the f32 range
    let mean_freq = omega_p.sqrt() * (omega_s.sqrt() * omega_i.sqrt()).sqrt();
    let g = consts.hbar * mean_freq * v_g * v_g * gamma_nl / geom.ring_length;
    Ok(FwmStrength { g, gamma_nl, v_g })
}

/// Nonlinear refractive index from the third-order susceptibility,
/// `n2 = 3 chi3 / (4 eps0 c n_eff^2)`.
pub fn n2_from_chi3<T: Real>(chi3: T, n_eff: T, consts: &PhysicalConstants<T>) -> T {
    lit::<T>(3.0) * chi3 / (lit::<T>(4.0) * consts.eps0 * consts.c * n_eff * n_eff)
}

/// Inverse of [`n2_from_chi3`].
pub fn chi3_from_n2<T: Real>(n2: T, n_eff: T, consts: &PhysicalConstants<T>) -> T {
    lit::<T>(4.0) * consts.eps0 * consts.c * n_eff * n_eff * n2 / lit(3.0)
}

/// Bus-waveguide pump amplitude `sqrt(P / hbar w) e^{i phi}` in sqrt(Hz).
pub fn pump_amplitude<T: Real>(power: T, omega: T, phase: T, consts: &PhysicalConstants<T>) -> Result<Cplx<T>> {
    if !(omega > T::zero()) {
        return Err(Error::domain("omega", "must be > 0"));
    }
    if !(power >= T::zero()) {
        return Err(Error::domain("power", "must be >= 0"));
    }
    Ok(Cplx::from_polar((power / (consts.hbar * omega)).sqrt(), phase))
}

/// Coherent pump in the bus waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec<T> {
    /// Power, W.
    pub power: T,
    /// Phase, rad.
    pub phase: T,
    /// Angular frequency, rad/s.
    pub omega: T,
    /// Photon-flux amplitude, sqrt(Hz).
    pub amplitude: Cplx<T>,
}

impl<T: Real> PumpSpec<T> {
    pub fn new(power: T, lambda: T, phase: T, consts: &PhysicalConstants<T>) -> Result<Self> {
        if !(lambda > T::zero()) {
            return Err(Error::domain("lambda", "must be > 0"));
        }
        let omega = consts.angular_frequency(lambda);
        let amplitude = pump_amplitude(power, omega, phase, consts)?;
        Ok(Self {
            power,
            phase,
            omega,
            amplitude,
        })
    }

    /// Photon flux `|alpha_l|^2`, Hz.
    pub fn flux(&self) -> T {
        self.amplitude.norm_sqr()
    }
}

/// Steady-state intracavity pump `sqrt(kappa) alpha_l / (Gamma/2 - i Delta_p)`.
pub fn intracavity_pump<T: Real>(alpha_l: Cplx<T>, rates: &CavityRates<T>, delta_p: T) -> Result<Cplx<T>> {
    let denom = cplx(rates.total() / lit(2.0), -delta_p);
    if denom.norm() == T::zero() {
        return Err(Error::DegenerateCavity);
    }
    Ok(alpha_l.scale(rates.kappa().sqrt()) / denom)
}

/// Injection parameter `sigma = |sigma| e^{i phi_sigma}` together with its
/// threshold. Fields are private to keep `sigma_n = |sigma| / sigma_th`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Injection<T> {
    magnitude: T,
    phase: T,
    fwm_detuning: T,
    threshold: T,
    normalized: T,
}

impl<T: Real> Injection<T> {
    fn build(magnitude: T, phase: T, rates: &CavityRates<T>) -> Result<Self> {
        if !(magnitude >= T::zero()) || !magnitude.is_finite() {
            return Err(Error::domain("sigma", "magnitude must be finite and >= 0"));
        }
        let threshold = rates.total();
        let normalized = if threshold > T::zero() {
            magnitude / threshold
        } else if magnitude == T::zero() {
            T::zero()
        } else {
            T::infinity()
        };
        Ok(Self {
            magnitude,
            phase,
            fwm_detuning: T::zero(),
            threshold,
            normalized,
        })
    }

    /// Injection of given magnitude relative to threshold, zero phase.
    pub fn from_normalized(sigma_n: T, rates: &CavityRates<T>) -> Result<Self> {
        if !(sigma_n >= T::zero()) || !sigma_n.is_finite() {
            return Err(Error::domain("sigma_n", "must be finite and >= 0"));
        }
        let mut inj = Self::build(sigma_n * rates.total(), T::zero(), rates)?;
        inj.normalized = sigma_n;
        Ok(inj)
    }

    /// Injection from a complex value of sigma.
    pub fn from_complex(sigma: Cplx<T>, rates: &CavityRates<T>) -> Result<Self> {
        Self::build(sigma.norm(), sigma.arg(), rates)
    }

    pub fn with_phase(mut self, phase: T) -> Self {
        self.phase = phase;
        self
    }

    /// Carries a four-wave-mixing frequency mismatch `w_s + w_i - 2 w_p`.
    pub fn with_fwm_detuning(mut self, delta_sigma: T) -> Self {
        self.fwm_detuning = delta_sigma;
        self
    }

    pub fn magnitude(&self) -> T {
        self.magnitude
    }

    pub fn phase(&self) -> T {
        self.phase
    }

    pub fn fwm_detuning(&self) -> T {
        self.fwm_detuning
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    /// `|sigma| / sigma_th`; exactly 1 at the oscillation threshold.
    pub fn normalized(&self) -> T {
        self.normalized
    }

    pub fn value(&self) -> Cplx<T> {
        Cplx::from_polar(self.magnitude, self.phase)
    }
}

/// `sigma = 2 g alpha_p^2` for a coherent intracavity pump.
pub fn injection_from_pump<T: Real>(g: T, alpha_p: Cplx<T>, rates: &CavityRates<T>) -> Result<Injection<T>> {
    let sigma = (alpha_p * alpha_p).scale(lit::<T>(2.0) * g);
    let inj = Injection::build(lit::<T>(2.0) * g * alpha_p.norm_sqr(), T::zero(), rates)?;
    let phase = if sigma.norm() > T::zero() {
        lit::<T>(2.0) * alpha_p.arg()
    } else {
        T::zero()
    };
    Ok(inj.with_phase(phase))
}

fn check_gain<T: Real>(rates: &CavityRates<T>, g: T, omega_p: T) -> Result<()> {
    if !(g > T::zero()) {
        return Err(Error::domain("g", "no threshold without nonlinear gain"));
    }
    if !(rates.kappa() > T::zero()) {
        return Err(Error::domain("kappa", "no threshold without bus coupling"));
    }
    if !(omega_p > T::zero()) {
        return Err(Error::domain("omega_p", "must be > 0"));
    }
    Ok(())
}

/// Bus-waveguide pump power at which `|sigma|` reaches `Gamma`,
/// `Gamma hbar w_p |Gamma/2 - i Delta_p|^2 / (2 g kappa)`.
pub fn threshold_power<T: Real>(
    rates: &CavityRates<T>,
    g: T,
    omega_p: T,
    delta_p: T,
    consts: &PhysicalConstants<T>,
) -> Result<T> {
    check_gain(rates, g, omega_p)?;
    let lorentz = cplx(rates.total() / lit(2.0), -delta_p).norm_sqr();
    Ok(rates.total() * consts.hbar * omega_p * lorentz / (lit::<T>(2.0) * g * rates.kappa()))
}

/// Injection produced by bus pump power `power`,
/// `sigma = 2 g kappa / (Gamma/2 - i Delta_p)^2 * P / (hbar w_p)`.
pub fn sigma_from_power<T: Real>(
    power: T,
    rates: &CavityRates<T>,
    g: T,
    omega_p: T,
    delta_p: T,
    consts: &PhysicalConstants<T>,
) -> Result<Injection<T>> {
    check_gain(rates, g, omega_p)?;
    if !(power >= T::zero()) {
        return Err(Error::domain("power", "must be >= 0"));
    }
    let denom = cplx(rates.total() / lit(2.0), -delta_p);
    let flux = power / (consts.hbar * omega_p);
    let magnitude = lit::<T>(2.0) * g * rates.kappa() * flux / denom.norm_sqr();
    // arg of 1/denom^2
    let phase = if magnitude > T::zero() {
        -lit::<T>(2.0) * denom.arg()
    } else {
        T::zero()
    };
    Ok(Injection::build(magnitude, phase, rates)?.with_phase(phase))
}

/// Bus pump power that yields normalized injection `sigma_n`.
pub fn power_for_sigma<T: Real>(
    sigma_n: T,
    rates: &CavityRates<T>,
    g: T,
    omega_p: T,
    delta_p: T,
    consts: &PhysicalConstants<T>,
) -> Result<T> {
    Ok(sigma_n * threshold_power(rates, g, omega_p, delta_p, consts)?)
}

/// Cold-cavity resonance `w_m = 2 pi m c / (n_eff L)`.
pub fn resonance_frequency<T: Real>(geom: &RingGeometry<T>, mode_index: u32, consts: &PhysicalConstants<T>) -> Result<T> {
    if mode_index == 0 {
        return Err(Error::domain("mode_index", "must be >= 1"));
    }
    if !(geom.ring_length > T::zero()) || !(geom.n_eff > T::zero()) {
        return Err(Error::domain("ring_length", "n_eff * L must be > 0"));
    }
    let m = T::from_u32(mode_index).expect("u32 fits in float");
    Ok(T::TAU() * m * consts.c / (geom.n_eff * geom.ring_length))
}

/// Mode index whose resonance lies closest to vacuum wavelength `lambda`.
pub fn nearest_mode_index<T: Real>(geom: &RingGeometry<T>, lambda: T) -> Result<u32> {
    if !(lambda > T::zero()) {
        return Err(Error::domain("lambda", "must be > 0"));
    }
    let m = (geom.n_eff * geom.ring_length / lambda).round();
    m.to_u32()
        .filter(|&m| m >= 1)
        .map(Ok)
        .unwrap_or(Ok(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> (RingGeometry<f64>, PhysicalConstants<f64>, CavityRates<f64>) {
        let geom = RingGeometry::si3n4_reference();
        let consts = PhysicalConstants::codata2018();
        let rates = derive_rates(&geom, &consts).unwrap();
        (geom, consts, rates)
    }

    #[test]
    fn reference_rates_match_reported_values() {
        let (_, _, rates) = reference();
        assert_relative_eq!(rates.kappa(), 1208e6, max_relative = 0.01);
        assert_relative_eq!(rates.gamma(), 38.3e6, max_relative = 0.01);
        // frozen from an independent double-precision evaluation
        assert_relative_eq!(rates.kappa(), 1_204_216_132.259084, max_relative = 1e-12);
        assert_relative_eq!(rates.gamma(), 38_279_458.930_057_45, max_relative = 1e-9);
    }

    #[test]
    fn uncoupled_lossless_ring_has_no_decay() {
        let (mut geom, consts, _) = reference();
        geom.cross_coupling = 0.0;
        geom.alpha_loss = 0.0;
        let r = derive_rates(&geom, &consts).unwrap();
        assert_eq!(r.kappa(), 0.0);
        assert_eq!(r.gamma(), 0.0);
        assert_eq!(r.total(), 0.0);
    }

    #[test]
    fn full_coupling_is_one_over_round_trip() {
        let (mut geom, consts, _) = reference();
        geom.cross_coupling = 1.0;
        let r = derive_rates(&geom, &consts).unwrap();
        assert_eq!(r.kappa(), consts.c / (geom.n_eff * geom.ring_length));
        assert_eq!(r.transmission(), 0.0);
        assert_relative_eq!(r.round_trip(), geom.n_eff * geom.ring_length / consts.c);
    }

    #[test]
    fn zero_length_rejected() {
        let (mut geom, consts, _) = reference();
        geom.ring_length = 0.0;
        assert!(matches!(derive_rates(&geom, &consts), Err(Error::Domain { name: "ring_length", .. })));
        assert!(fwm_gain(&geom, &consts).is_err());
    }

    #[test]
    fn cross_coupling_range_checked() {
        let (mut geom, consts, _) = reference();
        geom.cross_coupling = 1.5;
        assert!(matches!(derive_rates(&geom, &consts), Err(Error::Domain { name: "cross_coupling", .. })));
    }

    #[test]
    fn efficiency_values() {
        assert_eq!(efficiency(0.0, 123.0), 1.0);
        assert_relative_eq!(efficiency(0.23, 2.0 / 0.23), (-2.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(efficiency(0.23, 2.0 / 0.23), 0.1353, max_relative = 1e-3);
        let l = std::f64::consts::TAU * 220e-6;
        assert_relative_eq!(efficiency(0.23, l), (-3.179e-4f64).exp(), max_relative = 1e-6);
        assert_relative_eq!(efficiency(0.23, l), 0.999_682_121_357_581_8, max_relative = 1e-14);
    }

    #[test]
    fn gain_matches_hand_evaluation() {
        let (geom, consts, _) = reference();
        let f = fwm_gain(&geom, &consts).unwrap();
        // hand evaluation of hbar w^2 v_g^2 n2 / (c A_eff L) with CODATA values
        assert_relative_eq!(f.g, 1.739_919_299_980_388_5, max_relative = 1e-10);
        assert_relative_eq!(f.g, 1.5, max_relative = 0.25);
        assert_relative_eq!(f.v_g, consts.c / geom.n_g);
        let omega = consts.angular_frequency(geom.lambda_p);
        assert_relative_eq!(f.gamma_nl, omega * geom.n2 / (consts.c * geom.a_eff));
    }

    #[test]
    fn gain_scaling() {
        let (mut geom, consts, _) = reference();
        let g1 = fwm_gain(&geom, &consts).unwrap().g;
        geom.ring_length *= 2.0;
        let g2 = fwm_gain(&geom, &consts).unwrap().g;
        assert_relative_eq!(g2, g1 / 2.0, max_relative = 1e-14);
        geom.n2 = 0.0;
        assert_eq!(fwm_gain(&geom, &consts).unwrap().g, 0.0);
    }

    #[test]
    fn nondegenerate_gain_reduces_to_degenerate() {
        let (geom, consts, _) = reference();
        let w = consts.angular_frequency(geom.lambda_p);
        let a = fwm_gain(&geom, &consts).unwrap().g;
        let b = fwm_gain_nondegenerate(&geom, &consts, w, w).unwrap().g;
        assert_relative_eq!(a, b, max_relative = 1e-15);
        let c = fwm_gain_nondegenerate(&geom, &consts, w * 1.001, w * 0.999).unwrap().g;
        assert!(c < a && c > 0.999_999 * a);
    }

    #[test]
    fn chi3_n2_identities() {
        let consts = PhysicalConstants::<f64>::codata2018();
        let n_eff = 1.801;
        assert_eq!(n2_from_chi3(0.0, n_eff, &consts), 0.0);
        let unit = 4.0 * consts.eps0 * consts.c * n_eff * n_eff / 3.0;
        assert_relative_eq!(n2_from_chi3(unit, n_eff, &consts), 1.0, max_relative = 1e-15);
        for x in [1e-22, 3.3e-21, 7.1e-20] {
            assert_relative_eq!(chi3_from_n2(n2_from_chi3(x, n_eff, &consts), n_eff, &consts), x, max_relative = 1e-12);
        }
    }

    #[test]
    fn pump_amplitude_values() {
        let consts = PhysicalConstants::<f64>::codata2018();
        let w = consts.angular_frequency(1550e-9);
        assert_eq!(pump_amplitude(0.0, w, 0.3, &consts).unwrap().norm(), 0.0);
        let unit = pump_amplitude(consts.hbar * w, w, 0.7, &consts).unwrap();
        assert_relative_eq!(unit.re, 0.7f64.cos(), max_relative = 1e-14);
        assert_relative_eq!(unit.im, 0.7f64.sin(), max_relative = 1e-14);
        let a = pump_amplitude(14.12e-3, w, 0.0, &consts).unwrap();
        assert_relative_eq!(a.norm_sqr(), 1.101_766_752_647_471_2e17, max_relative = 1e-12);
        assert!(pump_amplitude(1.0, 0.0, 0.0, &consts).is_err());
        let spec = PumpSpec::new(14.12e-3, 1550e-9, 0.0, &consts).unwrap();
        assert_relative_eq!(spec.flux(), spec.power / (consts.hbar * spec.omega), max_relative = 1e-12);
    }

    #[test]
    fn intracavity_pump_on_resonance() {
        let rates = CavityRates::<f64>::from_decay(2.0e9, 0.0).unwrap();
        let a = cplx(3.0e8, -1.0e8);
        assert_eq!(intracavity_pump(Cplx::new(0.0, 0.0), &rates, 0.0).unwrap(), Cplx::new(0.0, 0.0));
        let ap = intracavity_pump(a, &rates, 0.0).unwrap();
        let expect = a * (2.0 / rates.kappa().sqrt());
        assert_relative_eq!(ap.re, expect.re, max_relative = 1e-14);
        assert_relative_eq!(ap.im, expect.im, max_relative = 1e-14);
    }

    #[test]
    fn intracavity_pump_lorentzian_half_width() {
        let (_, _, rates) = reference();
        let a = cplx(1.0e8, 0.0);
        let peak = intracavity_pump(a, &rates, 0.0).unwrap().norm_sqr();
        for d in [-0.5, 0.5] {
            let v = intracavity_pump(a, &rates, d * rates.total()).unwrap().norm_sqr();
            assert_relative_eq!(v, peak / 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn degenerate_cavity_rejected() {
        let rates = CavityRates::from_decay(0.0, 0.0).unwrap();
        assert_eq!(intracavity_pump(cplx(1.0, 0.0), &rates, 0.0), Err(Error::DegenerateCavity));
        assert!(intracavity_pump(cplx(1.0, 0.0), &rates, 1.0).is_ok());
    }

    #[test]
    fn injection_from_pump_values() {
        let rates = CavityRates::from_decay(1.0e9, 0.2e9).unwrap();
        let zero = injection_from_pump(1.5, cplx(0.0, 0.0), &rates).unwrap();
        assert_eq!(zero.magnitude(), 0.0);
        let ap = Cplx::from_polar(4.1e8f64.sqrt(), 0.0);
        let inj = injection_from_pump(1.5, ap, &rates).unwrap();
        assert_relative_eq!(inj.magnitude(), 1.23e9, max_relative = 1e-12);
        assert_relative_eq!(inj.normalized(), 1.23e9 / 1.2e9, max_relative = 1e-12);
        assert_eq!(inj.threshold(), rates.total());
        let rotated = injection_from_pump(1.5, Cplx::from_polar(2.0, std::f64::consts::FRAC_PI_4), &rates).unwrap();
        assert_relative_eq!(rotated.phase(), std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn threshold_power_reference() {
        let (geom, consts, rates) = reference();
        let g = fwm_gain(&geom, &consts).unwrap().g;
        let w = consts.angular_frequency(geom.lambda_p);
        let p_th = threshold_power(&rates, g, w, 0.0, &consts).unwrap();
        assert_relative_eq!(p_th, 0.014_665_810_517_627_496, max_relative = 1e-10);
        assert_relative_eq!(p_th * 0.99895, 14.12e-3, max_relative = 0.15);
        let closed = rates.total().powi(3) * consts.hbar * w / (8.0 * g * rates.kappa());
        assert_relative_eq!(p_th, closed, max_relative = 1e-13);
        let half = threshold_power(&rates, 2.0 * g, w, 0.0, &consts).unwrap();
        assert_relative_eq!(half, p_th / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn threshold_needs_gain_and_coupling() {
        let (_, consts, rates) = reference();
        assert!(threshold_power(&rates, 0.0, 1e15, 0.0, &consts).is_err());
        let uncoupled = CavityRates::from_decay(0.0, 1e7).unwrap();
        assert!(threshold_power(&uncoupled, 1.0, 1e15, 0.0, &consts).is_err());
        assert!(sigma_from_power(1e-3, &uncoupled, 1.0, 1e15, 0.0, &consts).is_err());
    }

    #[test]
    fn sigma_from_power_is_linear_and_inverts_threshold() {
        let (geom, consts, rates) = reference();
        let g = fwm_gain(&geom, &consts).unwrap().g;
        let w = consts.angular_frequency(geom.lambda_p);
        for delta in [0.0, 0.3 * rates.total(), -2.0 * rates.total()] {
            let p_th = threshold_power(&rates, g, w, delta, &consts).unwrap();
            let inj = sigma_from_power(p_th, &rates, g, w, delta, &consts).unwrap();
            assert_relative_eq!(inj.normalized(), 1.0, max_relative = 1e-12);
        }
        let p_th = threshold_power(&rates, g, w, 0.0, &consts).unwrap();
        assert_eq!(sigma_from_power(0.0, &rates, g, w, 0.0, &consts).unwrap().normalized(), 0.0);
        assert_relative_eq!(
            sigma_from_power(0.5 * p_th, &rates, g, w, 0.0, &consts).unwrap().normalized(),
            0.5,
            max_relative = 1e-12
        );
        let p = 3.1e-3;
        let base = sigma_from_power(p, &rates, g, w, 0.0, &consts).unwrap().normalized();
        for a in [0.1, 0.5, 2.0] {
            let s = sigma_from_power(a * p, &rates, g, w, 0.0, &consts).unwrap().normalized();
            assert_relative_eq!(s, a * base, max_relative = 1e-12);
        }
    }

    #[test]
    fn pump_chain_agrees_with_sigma_from_power() {
        let (geom, consts, rates) = reference();
        let g = fwm_gain(&geom, &consts).unwrap().g;
        let pump = PumpSpec::new(5e-3, geom.lambda_p, 0.0, &consts).unwrap();
        let ap = intracavity_pump(pump.amplitude, &rates, 0.0).unwrap();
        let a = injection_from_pump(g, ap, &rates).unwrap();
        let b = sigma_from_power(5e-3, &rates, g, pump.omega, 0.0, &consts).unwrap();
        assert_relative_eq!(a.magnitude(), b.magnitude(), max_relative = 1e-12);
    }

    #[test]
    fn resonance_frequencies() {
        let (geom, consts, _) = reference();
        let w1 = resonance_frequency(&geom, 7, &consts).unwrap();
        let w2 = resonance_frequency(&geom, 14, &consts).unwrap();
        assert_relative_eq!(w2, 2.0 * w1, max_relative = 1e-15);
        assert!(resonance_frequency(&geom, 0, &consts).is_err());

        let m = nearest_mode_index(&geom, geom.lambda_p).unwrap();
        assert_eq!(m, 1606);
        let lambda_r = std::f64::consts::TAU * consts.c / resonance_frequency(&geom, m, &consts).unwrap();
        let fsr = geom.lambda_p * geom.lambda_p / (geom.n_eff * geom.ring_length);
        assert!((lambda_r - geom.lambda_p).abs() < fsr);

        let mut unit = geom;
        unit.n_eff = 1.0;
        unit.ring_length = consts.c;
        assert_relative_eq!(resonance_frequency(&unit, 3, &consts).unwrap(), std::f64::consts::TAU * 3.0, max_relative = 1e-15);
    }

    #[test]
    fn decay_ratio_override_keeps_kappa() {
        let (_, _, rates) = reference();
        let r = rates.with_decay_ratio(100.0).unwrap();
        assert_eq!(r.kappa(), rates.kappa());
        assert_relative_eq!(r.decay_ratio(), 100.0, max_relative = 1e-14);
        assert_eq!(r.total(), r.kappa() + r.gamma());
    }

    #[test]
    fn single_precision_rates() {
        let geom = RingGeometry::<f32>::si3n4_reference();
        let consts = PhysicalConstants::<f32>::codata2018();
        let rates = derive_rates(&geom, &consts).unwrap();
        assert_relative_eq!(rates.kappa(), 1.204_216e9, max_relative = 1e-5);
        let g = fwm_gain(&geom, &consts).unwrap().g;
        assert_relative_eq!(g, 1.739_919, max_relative = 1e-4);
    }
}
