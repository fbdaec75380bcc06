//! Lossy Mach-Zehnder interferometer fed by a coherent and a two-mode
//! squeezed port, read out by intensity difference.
//!
//! The beam splitter is `(1/sqrt 2) [[1, 1], [1, -1]]`, the phase shifter
//! `diag(e^{i phi/2}, e^{-i phi/2})`, and path loss acts as a beam splitter
//! of transmission `eta` that mixes in vacuum. Port 0 carries the coherent
//! drive, port 1 the squeezed light.
//!
//! The signal and idler fields entering port 1 are lumped into one mode
//! `A = b_s + b_i` with `<A^dag A> = 2 n_s`, `<A A> = 2 m_si` and
//! commutator `[A, A^dag] = 2`. Its anomalous moment is rotated onto the
//! squeezing-aligned axis (largest noise reduction at `phi = pi/2`) unless a
//! relative phase offset is requested.

pub mod cumulant;

use num_traits::Zero;

use crate::cavity_io::{photon_flux, OutputMoments};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::params::{efficiency, CavityRates, Injection, PhysicalConstants};
use crate::scalar::{lit, real, Cplx, Real};

/// Central-difference step for the phase derivative, rad.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Slopes smaller than this make the sensitivity a pole.
pub const POLE_SLOPE: f64 = 1e-30;

/// Sensor arm and drive description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorSpec<T> {
    /// Interferometer phase, rad.
    pub phi: T,
    /// Path power transmission, `0 < eta <= 1`.
    pub eta: T,
    /// Coherent amplitude at port 0, sqrt(Hz).
    pub alpha_c: Cplx<T>,
    /// Pump photon flux `|alpha_l|^2` charged to the shot-noise budget, Hz.
    pub pump_flux: T,
    /// Offset of the squeezed port's anomalous phase from optimal alignment, rad.
    pub squeeze_phase: T,
}

impl<T: Real> SensorSpec<T> {
    pub fn new(phi: T, eta: T, alpha_c: T) -> Result<Self> {
        let spec = Self {
            phi,
            eta,
            alpha_c: real(alpha_c),
            pump_flux: T::zero(),
            squeeze_phase: T::zero(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Transmission from a sensor arm of `length` with loss `alpha_loss`.
    pub fn with_length(mut self, alpha_loss: T, length: T) -> Result<Self> {
        if !(alpha_loss >= T::zero()) || !(length >= T::zero()) {
            return Err(Error::domain("sensor_length", "length and loss must be >= 0"));
        }
        self.eta = efficiency(alpha_loss, length);
        self.validate()?;
        Ok(self)
    }

    pub fn with_pump_flux(mut self, flux: T) -> Result<Self> {
        if !(flux >= T::zero()) {
            return Err(Error::domain("pump_flux", "must be >= 0"));
        }
        self.pump_flux = flux;
        Ok(self)
    }

    /// Coherent amplitude from a drive power at angular frequency `omega`.
    pub fn with_coherent_power(mut self, power: T, omega: T, consts: &PhysicalConstants<T>) -> Result<Self> {
        self.alpha_c = crate::params::pump_amplitude(power, omega, T::zero(), consts)?;
        Ok(self)
    }

    pub fn with_phi(mut self, phi: T) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_squeeze_phase(mut self, offset: T) -> Self {
        self.squeeze_phase = offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > T::zero() && self.eta <= T::one()) {
            return Err(Error::domain("eta", "must lie in (0, 1]"));
        }
        if !self.phi.is_finite() {
            return Err(Error::domain("phi", "must be finite"));
        }
        if !(self.alpha_c.norm().is_finite()) {
            return Err(Error::domain("alpha_c", "must be finite"));
        }
        Ok(())
    }
}

/// Gaussian state of the two spatial ports in moment form.
///
/// `number[(j,k)] = <da_j^dag da_k>`, `anomalous[(j,k)] = <da_j da_k>`,
/// `commutator[(j,k)] = [a_j, a_k^dag]`, with `da = a - <a>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPortState<T: Real> {
    pub mean: [Cplx<T>; 2],
    pub number: Mat2<T>,
    pub anomalous: Mat2<T>,
    pub commutator: Mat2<T>,
}

impl<T: Real> GaussianPortState<T> {
    pub fn vacuum() -> Self {
        Self {
            mean: [Cplx::zero(); 2],
            number: Mat2::zeros(),
            anomalous: Mat2::zeros(),
            commutator: Mat2::identity(),
        }
    }

    /// Coherent amplitude at port 0, vacuum at port 1.
    pub fn coherent(alpha_c: Cplx<T>) -> Self {
        let mut s = Self::vacuum();
        s.mean[0] = alpha_c;
        s
    }

    /// Adds the lumped signal+idler mode at port 1. The anomalous moment is
    /// placed at phase `offset` from the squeezing-aligned axis.
    pub fn with_squeezed_port(mut self, pair: &OutputMoments<T>, offset: T) -> Self {
        let two = lit::<T>(2.0);
        self.mean[1] = pair.first_s + pair.first_i;
        self.number[(1, 1)] = real(pair.n_s + pair.n_i);
        self.anomalous[(1, 1)] = Cplx::from_polar(two * pair.m_si.norm(), offset);
        self.commutator[(1, 1)] = real(two);
        self
    }

    /// `<a_j^dag a_j>` including the coherent part.
    pub fn photon_number(&self, j: usize) -> T {
        self.number[(j, j)].re + self.mean[j].norm_sqr()
    }

    pub fn total_photons(&self) -> T {
        self.photon_number(0) + self.photon_number(1)
    }
}

fn beam_splitter<T: Real>() -> Mat2<T> {
    let h = real(T::FRAC_1_SQRT_2());
    Mat2::from_rows([[h, h], [h, -h]])
}

/// Output port moments after beam splitter, phase shifter, loss and second
/// beam splitter.
pub fn mzi_transform<T: Real>(input: &GaussianPortState<T>, spec: &SensorSpec<T>) -> Result<GaussianPortState<T>> {
    spec.validate()?;
    let half = spec.phi / lit(2.0);
    let ps = Mat2::from_rows([
        [Cplx::from_polar(T::one(), half), Cplx::zero()],
        [Cplx::zero(), Cplx::from_polar(T::one(), -half)],
    ]);
    let bs = beam_splitter();
    let u = (bs * ps * bs).scale(real(spec.eta.sqrt()));
    let w = bs.scale(real((T::one() - spec.eta).sqrt()));
    let v = u.mul_vec(&input.mean);
    Ok(GaussianPortState {
        mean: v,
        number: u.conj() * input.number * u.transpose(),
        anomalous: u * input.anomalous * u.transpose(),
        commutator: u * input.commutator * u.adjoint() + w * w.adjoint(),
    })
}

/// Mean and variance of `ID = d_0^dag d_0 - d_1^dag d_1`.
///
/// The variance is the connected part of the Gaussian partition sum over the
/// four operators of `n_j n_k`, evaluated directly rather than as
/// `<ID^2> - <ID>^2`, which loses all digits for bright inputs.
pub fn intensity_difference_stats<T: Real>(output: &GaussianPortState<T>) -> (T, T) {
    let sign = [T::one(), -T::one()];
    let mean = sign[0] * output.photon_number(0) + sign[1] * output.photon_number(1);
    let mut var = T::zero();
    for j in 0..2 {
        for k in 0..2 {
            // operators: d_j^dag, d_j, d_k^dag, d_k
            let ops = [(j, true), (j, false), (k, true), (k, false)];
            let mean_of = |a: usize| {
                let (m, dag) = ops[a];
                if dag {
                    output.mean[m].conj()
                } else {
                    output.mean[m]
                }
            };
            let pair = |a: usize, b: usize| ordered_pair(output, ops[a], ops[b]);
            let cov = cumulant::product_covariance(2, 4, |blk| cumulant::gaussian_cumulant(blk, mean_of, pair));
            var += sign[j] * sign[k] * cov.re;
        }
    }
    (mean, var)
}

/// Connected `<X Y>` of fluctuation operators, `(mode, is_dagger)`.
fn ordered_pair<T: Real>(s: &GaussianPortState<T>, x: (usize, bool), y: (usize, bool)) -> Cplx<T> {
    let ((j, xd), (k, yd)) = (x, y);
    match (xd, yd) {
        (false, false) => s.anomalous[(j, k)],
        (false, true) => s.commutator[(j, k)] + s.number[(k, j)],
        (true, false) => s.number[(j, k)],
        (true, true) => s.anomalous[(j, k)].conj(),
    }
}

/// Phase estimation figures at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityReport<T> {
    /// Minimum detectable phase, rad.
    pub dphi: T,
    pub mean_id: T,
    pub var_id: T,
    /// Shot-noise limit including the pump budget, rad.
    pub snl: T,
    /// Coherent-only sensitivity over `dphi`.
    pub improvement: T,
}

fn input_state<T: Real>(spec: &SensorSpec<T>, squeezed: Option<&OutputMoments<T>>) -> GaussianPortState<T> {
    let s = GaussianPortState::coherent(spec.alpha_c);
    match squeezed {
        Some(m) => s.with_squeezed_port(m, spec.squeeze_phase),
        None => s,
    }
}

/// Error-propagation sensitivity `sqrt(Var ID) / |d<ID>/dphi|` from the full
/// moment pipeline, with a central difference of step `h`.
pub fn phase_sensitivity_numeric_with_step<T: Real>(
    spec: &SensorSpec<T>,
    squeezed: Option<&OutputMoments<T>>,
    h: T,
) -> Result<SensitivityReport<T>> {
    spec.validate()?;
    if !(h > T::zero()) {
        return Err(Error::domain("step", "must be > 0"));
    }
    let input = input_state(spec, squeezed);
    let out = mzi_transform(&input, spec)?;
    let (mean_id, var_id) = intensity_difference_stats(&out);
    let at = |phi: T| -> Result<T> { Ok(intensity_difference_stats(&mzi_transform(&input, &spec.with_phi(phi))?).0) };
    let slope = (at(spec.phi + h)? - at(spec.phi - h)?) / (lit::<T>(2.0) * h);
    if !(slope.abs() >= lit(POLE_SLOPE)) {
        return Err(Error::Pole(format!("zero signal slope at phi = {}", spec.phi)));
    }
    let dphi = var_id.max(T::zero()).sqrt() / slope.abs();
    let snl = shot_noise_limit(spec, &out)?;
    let improvement = if spec.alpha_c.norm() > T::zero() {
        phase_sensitivity_coherent(spec)? / dphi
    } else {
        T::zero()
    };
    Ok(SensitivityReport {
        dphi,
        mean_id,
        var_id,
        snl,
        improvement,
    })
}

/// [`phase_sensitivity_numeric_with_step`] with the default step.
pub fn phase_sensitivity_numeric<T: Real>(
    spec: &SensorSpec<T>,
    squeezed: Option<&OutputMoments<T>>,
) -> Result<SensitivityReport<T>> {
    phase_sensitivity_numeric_with_step(spec, squeezed, lit(DEFAULT_FD_STEP))
}

/// Coherent-only sensitivity `1 / (sqrt(eta) |alpha_c|)`.
pub fn phase_sensitivity_coherent<T: Real>(spec: &SensorSpec<T>) -> Result<T> {
    spec.validate()?;
    let a = spec.alpha_c.norm();
    if !(a > T::zero()) {
        return Err(Error::domain("alpha_c", "must be > 0"));
    }
    Ok(T::one() / (spec.eta.sqrt() * a))
}

struct Reduced<T> {
    s: T,
    k: T,
    gm: T,
    a2: T,
}

fn reduced<T: Real>(spec: &SensorSpec<T>, rates: &CavityRates<T>, injection: &Injection<T>) -> Result<Reduced<T>> {
    spec.validate()?;
    let g = rates.total();
    if !(g > T::zero()) {
        return Err(Error::DegenerateCavity);
    }
    let s = if injection.threshold() == g {
        injection.normalized()
    } else {
        injection.magnitude() / g
    };
    if !(s < T::one()) {
        return Err(Error::Threshold {
            sigma_n: s.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Reduced {
        s,
        k: rates.kappa() / g,
        gm: rates.gamma() / g,
        a2: spec.alpha_c.norm_sqr(),
    })
}

/// Closed-form squeezed-light sensitivity at the optimal phase `pi/2`.
///
/// Diverges (pole error) where the coherent flux equals the squeezed flux
/// `2 n_s`.
pub fn phase_sensitivity_squeezed<T: Real>(
    spec: &SensorSpec<T>,
    rates: &CavityRates<T>,
    injection: &Injection<T>,
) -> Result<T> {
    let r = reduced(spec, rates, injection)?;
    let one = T::one();
    let (s, k, gm, a2, eta) = (r.s, r.k, r.gm, r.a2, spec.eta);
    let m = one - s;
    let d = m * (one + s);
    let squeezed_flux = lit::<T>(8.0) * s * s * k / (d * d);
    let gap = (a2 - squeezed_flux).abs();
    if !(gap > lit::<T>(1e-12) * a2.max(squeezed_flux)) {
        return Err(Error::Pole(format!(
            "coherent flux {a2:e} equals squeezed flux {squeezed_flux:e}"
        )));
    }
    let num = eta * a2 * m * m * (one + s * (lit::<T>(2.0) * gm - lit::<T>(6.0) * k) + s * s)
        + a2 * d * d
        + lit::<T>(8.0) * k * s * s;
    Ok(num.sqrt() / (eta.sqrt() * d * gap))
}

/// Large-drive, lossless approximation `(sqrt 2 / alpha_c)(kappa - sigma)/(kappa + sigma)`.
pub fn phase_sensitivity_squeezed_opt<T: Real>(
    spec: &SensorSpec<T>,
    rates: &CavityRates<T>,
    injection: &Injection<T>,
) -> Result<T> {
    let r = reduced(spec, rates, injection)?;
    if !(r.a2 > T::zero()) {
        return Err(Error::domain("alpha_c", "must be > 0"));
    }
    Ok(T::SQRT_2() / r.a2.sqrt() * (r.k - r.s) / (r.k + r.s))
}

/// Shot-noise limit `1 / sqrt(<d0^dag d0> + <d1^dag d1> + |alpha_l|^2)`.
pub fn shot_noise_limit<T: Real>(spec: &SensorSpec<T>, output: &GaussianPortState<T>) -> Result<T> {
    let total = output.total_photons() + spec.pump_flux;
    if !(total > T::zero()) {
        return Err(Error::domain("photon budget", "no photons in the interferometer"));
    }
    Ok(T::one() / total.sqrt())
}

/// Improvement factor `dphi_c / dphi_s` at equal drive and loss.
pub fn improvement_factor<T: Real>(spec: &SensorSpec<T>, rates: &CavityRates<T>, injection: &Injection<T>) -> Result<T> {
    Ok(phase_sensitivity_coherent(spec)? / phase_sensitivity_squeezed(spec, rates, injection)?)
}

/// Decay ratio `kappa / gamma`.
pub fn decay_ratio<T: Real>(rates: &CavityRates<T>) -> T {
    rates.decay_ratio()
}

/// Sensor length `2 / alpha_loss` beyond which squeezing stops paying off.
pub fn critical_length<T: Real>(alpha_loss: T) -> Result<T> {
    if !(alpha_loss > T::zero()) || !alpha_loss.is_finite() {
        return Err(Error::domain("alpha_loss", "must be > 0 for a critical length"));
    }
    Ok(lit::<T>(2.0) / alpha_loss)
}

/// Coherent amplitude at which the squeezed sensitivity diverges,
/// `sqrt(2 n_s)`.
pub fn pole_coherent_amplitude<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>) -> Result<T> {
    let n = photon_flux(rates, injection, &crate::cavity_io::Detunings::zero())?;
    Ok((lit::<T>(2.0) * n).sqrt())
}

/// Numeric sensitivity on a grid of phases. Points where the slope vanishes
/// come back as errors in place; the scan itself never aborts.
pub fn sensitivity_vs_phase<T: Real>(
    spec: &SensorSpec<T>,
    squeezed: Option<&OutputMoments<T>>,
    phis: &[T],
) -> Vec<Result<SensitivityReport<T>>> {
    phis.iter()
        .map(|&phi| phase_sensitivity_numeric(&spec.with_phi(phi), squeezed))
        .collect()
}
