//! Linearized input-output model of the pumped ring.
//!
//! The signal and idler modes are ordered `(b_s, b_s^dag, b_i, b_i^dag)`
//! throughout. Every closed form is evaluated in units of the total decay
//! rate `Gamma`, which keeps the quartic rate expressions inside the `f32`
//! range and costs nothing in `f64`.
//!
//! Spectral densities carrying a `delta(w - w')` factor are reported as
//! their prefactor. The output photon flux used for powers is the
//! zero-detuning prefactor, read in Hz.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::params::{CavityRates, Injection, PhysicalConstants};
use crate::scalar::{cplx, lit, real, Cplx, Real};

/// Largest condition number accepted for the transfer solve.
pub const MAX_CONDITION: f64 = 1e12;

/// Detunings of signal, idler and pump from their resonances, rad/s.
///
/// Joint-spectrum axes use the paired convention `Delta_s = dw_s`,
/// `Delta_i = -dw_i` (see [`Detunings::from_pair_offsets`]).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Detunings<T> {
    pub delta_s: T,
    pub delta_i: T,
    pub delta_p: T,
}

impl<T: Real> Detunings<T> {
    pub fn zero() -> Self {
        Self {
            delta_s: T::zero(),
            delta_i: T::zero(),
            delta_p: T::zero(),
        }
    }

    pub fn new(delta_s: T, delta_i: T) -> Self {
        Self {
            delta_s,
            delta_i,
            delta_p: T::zero(),
        }
    }

    /// Detunings for a photon pair offset by `dw_s` and `dw_i` from the
    /// signal and idler resonances.
    pub fn from_pair_offsets(dw_s: T, dw_i: T) -> Self {
        Self::new(dw_s, -dw_i)
    }
}

/// Coherent seeds on the signal and idler input channels, sqrt(Hz).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeedAmplitudes<T> {
    pub alpha_s: Cplx<T>,
    pub alpha_i: Cplx<T>,
}

impl<T: Real> SeedAmplitudes<T> {
    pub fn vacuum() -> Self {
        Self {
            alpha_s: Cplx::zero(),
            alpha_i: Cplx::zero(),
        }
    }
}

/// First and second moments of the output signal/idler pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputMoments<T> {
    /// `<b_s^dag b_s>` spectral prefactor.
    pub n_s: T,
    /// `<b_i^dag b_i>` spectral prefactor.
    pub n_i: T,
    /// Anomalous moment `<b_i b_s>`.
    pub m_si: Cplx<T>,
    /// Static signal amplitude from the seeds.
    pub first_s: Cplx<T>,
    /// Static idler amplitude from the seeds.
    pub first_i: Cplx<T>,
}

impl<T: Real> OutputMoments<T> {
    pub fn vacuum() -> Self {
        Self {
            n_s: T::zero(),
            n_i: T::zero(),
            m_si: Cplx::zero(),
            first_s: Cplx::zero(),
            first_i: Cplx::zero(),
        }
    }

    /// Quadrature variance `1 + 2 n + 2 Re(m e^{2 i phi})`, vacuum = 1.
    pub fn quadrature_variance(&self, phi_lo: T) -> T {
        let rot = Cplx::from_polar(T::one(), lit::<T>(2.0) * phi_lo);
        T::one() + lit::<T>(2.0) * self.n_s + lit::<T>(2.0) * (self.m_si * rot).re
    }
}

/// Scattering of input and bath fields into the output fields,
/// `B_out = s_in B_in + s_gamma B_gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrices<T: Real> {
    pub s_in: Mat4<T>,
    pub s_gamma: Mat4<T>,
}

impl<T: Real> TransferMatrices<T> {
    /// Output moments for vacuum fluctuations on both input and bath plus
    /// the given coherent seeds.
    pub fn moments(&self, seeds: &SeedAmplitudes<T>) -> OutputMoments<T> {
        let c = self.s_in * vacuum_pairing() * self.s_in.transpose()
            + self.s_gamma * vacuum_pairing() * self.s_gamma.transpose();
        let a = [seeds.alpha_s, seeds.alpha_s.conj(), seeds.alpha_i, seeds.alpha_i.conj()];
        let first = self.s_in.mul_vec(&a);
        OutputMoments {
            n_s: c[(1, 0)].re,
            n_i: c[(3, 2)].re,
            m_si: c[(2, 0)],
            first_s: first[0],
            first_i: first[2],
        }
    }

    /// Static amplitudes of all four output components,
    /// `(<b_s>, <b_s^dag>, <b_i>, <b_i^dag>)`.
    pub fn static_vector(&self, seeds: &SeedAmplitudes<T>) -> [Cplx<T>; 4] {
        let a = [seeds.alpha_s, seeds.alpha_s.conj(), seeds.alpha_i, seeds.alpha_i.conj()];
        self.s_in.mul_vec(&a)
    }
}

/// `<X_a X_b>` for vacuum in the `(b, b^dag)` ordering: only `<b b^dag> = 1`.
fn vacuum_pairing<T: Real>() -> Mat4<T> {
    let mut v = Mat4::zeros();
    v[(0, 1)] = Cplx::one();
    v[(2, 3)] = Cplx::one();
    v
}

/// Problem data in units of `Gamma`.
#[derive(Debug, Clone, Copy)]
struct Scaled<T: Real> {
    k: T,
    gm: T,
    s: Cplx<T>,
    s2: T,
    ds: T,
    di: T,
}

impl<T: Real> Scaled<T> {
    fn new(rates: &CavityRates<T>, injection: &Injection<T>, det: &Detunings<T>) -> Result<Self> {
        let g = rates.total();
        if !(g > T::zero()) {
            return Err(Error::DegenerateCavity);
        }
        // avoid a rounding step when the injection was built for these rates
        let mag = if injection.threshold() == g {
            injection.normalized()
        } else {
            injection.magnitude() / g
        };
        if !(mag < T::one()) {
            return Err(Error::Threshold {
                sigma_n: mag.to_f64().unwrap_or(f64::NAN),
            });
        }
        for (name, v) in [("delta_s", det.delta_s), ("delta_i", det.delta_i)] {
            if !v.is_finite() {
                return Err(Error::domain(name, "must be finite"));
            }
        }
        Ok(Self {
            k: rates.kappa() / g,
            gm: rates.gamma() / g,
            s: Cplx::from_polar(mag, injection.phase()),
            s2: mag * mag,
            ds: det.delta_s / g,
            di: det.delta_i / g,
        })
    }

    /// `Xi - 2 sigma^2 Gamma^2`, regrouped so the `(1 - sigma^2)^2` part
    /// keeps its digits next to threshold.
    fn denominator(&self) -> T {
        let four = lit::<T>(4.0);
        let p = four * self.di * self.ds;
        let s = self.s2.sqrt();
        let gap = (T::one() - s) * (T::one() + s);
        p * p - lit::<T>(2.0) * p * self.s2 + four * (self.di * self.di + self.ds * self.ds) + gap * gap
    }

    fn drift(&self) -> Mat4<T> {
        let half = lit::<T>(0.5);
        let mut k = Mat4::zeros();
        k[(0, 0)] = cplx(-half * self.gm, self.ds);
        k[(1, 1)] = cplx(-half * self.gm, -self.ds);
        k[(2, 2)] = cplx(-half * self.gm, self.di);
        k[(3, 3)] = cplx(-half * self.gm, -self.di);
        k[(0, 3)] = self.s.scale(half);
        k[(1, 2)] = self.s.conj().scale(half);
        k[(2, 1)] = self.s.scale(half);
        k[(3, 0)] = self.s.conj().scale(half);
        k
    }

    /// Resolvent `(kappa/2 - K)^{-1}` in units of `1/Gamma`.
    fn resolvent(&self) -> Result<Mat4<T>> {
        let a = Mat4::scaled_identity(real(self.k * lit(0.5))) - self.drift();
        a.inverse(lit(MAX_CONDITION))
    }
}

/// Drift matrix `K` of the signal/idler Langevin equations in the frame
/// rotating at the detuned carriers, 1/s.
pub fn drift_matrix<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>, det: &Detunings<T>) -> Mat4<T> {
    let half = lit::<T>(0.5);
    let gm = rates.gamma();
    let s = injection.value();
    let mut k = Mat4::zeros();
    k[(0, 0)] = cplx(-half * gm, det.delta_s);
    k[(1, 1)] = cplx(-half * gm, -det.delta_s);
    k[(2, 2)] = cplx(-half * gm, det.delta_i);
    k[(3, 3)] = cplx(-half * gm, -det.delta_i);
    k[(0, 3)] = s.scale(half);
    k[(1, 2)] = s.conj().scale(half);
    k[(2, 1)] = s.scale(half);
    k[(3, 0)] = s.conj().scale(half);
    k
}

/// Input and bath scattering matrices, solved numerically.
pub fn output_transfer<T: Real>(
    rates: &CavityRates<T>,
    injection: &Injection<T>,
    det: &Detunings<T>,
) -> Result<TransferMatrices<T>> {
    let sc = Scaled::new(rates, injection, det)?;
    let r = sc.resolvent()?;
    let s_in = r.scale(real(sc.k)) - Mat4::identity();
    let s_gamma = r.scale(real((sc.k * sc.gm).sqrt()));
    Ok(TransferMatrices { s_in, s_gamma })
}

/// Output signal photon number `4 sigma^2 kappa Gamma / (Xi - 2 sigma^2 Gamma^2)`.
pub fn photon_flux<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>, det: &Detunings<T>) -> Result<T> {
    let sc = Scaled::new(rates, injection, det)?;
    Ok(lit::<T>(4.0) * sc.s2 * sc.k / sc.denominator())
}

/// Anomalous output moment `<b_i b_s>`.
pub fn anomalous_moment<T: Real>(
    rates: &CavityRates<T>,
    injection: &Injection<T>,
    det: &Detunings<T>,
) -> Result<Cplx<T>> {
    let sc = Scaled::new(rates, injection, det)?;
    Ok(anomalous(&sc))
}

fn anomalous<T: Real>(sc: &Scaled<T>) -> Cplx<T> {
    let two = lit::<T>(2.0);
    let inner = cplx(
        lit::<T>(4.0) * sc.di * sc.ds - T::one() - sc.s2,
        -two * (sc.di + sc.ds),
    );
    sc.s * inner * (-two * sc.k / sc.denominator())
}

/// Static output amplitudes `(<b_s>, <b_i>)` produced by coherent seeds.
pub fn static_moments<T: Real>(
    rates: &CavityRates<T>,
    injection: &Injection<T>,
    det: &Detunings<T>,
    seeds: &SeedAmplitudes<T>,
) -> Result<(Cplx<T>, Cplx<T>)> {
    let sc = Scaled::new(rates, injection, det)?;
    Ok(static_pair(&sc, seeds))
}

fn static_pair<T: Real>(sc: &Scaled<T>, seeds: &SeedAmplitudes<T>) -> (Cplx<T>, Cplx<T>) {
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let real_part = sc.k * sc.k + sc.s2 - sc.gm * sc.gm - four * sc.di * sc.ds;
    let one = |own: Cplx<T>, other: Cplx<T>, d_own: T, d_other: T| {
        let diag = cplx(real_part, -two * (d_other * (sc.gm - sc.k) - d_own));
        let num = own * diag + (sc.s * other.conj()).scale(two * sc.k);
        let den = cplx(four * sc.di * sc.ds + T::one() - sc.s2, two * (d_other - d_own));
        num / den
    };
    (
        one(seeds.alpha_s, seeds.alpha_i, sc.ds, sc.di),
        one(seeds.alpha_i, seeds.alpha_s, sc.di, sc.ds),
    )
}

/// All output moments from the closed forms.
pub fn output_moments<T: Real>(
    rates: &CavityRates<T>,
    injection: &Injection<T>,
    det: &Detunings<T>,
    seeds: &SeedAmplitudes<T>,
) -> Result<OutputMoments<T>> {
    let sc = Scaled::new(rates, injection, det)?;
    let n = lit::<T>(4.0) * sc.s2 * sc.k / sc.denominator();
    let (first_s, first_i) = static_pair(&sc, seeds);
    Ok(OutputMoments {
        n_s: n,
        n_i: n,
        m_si: anomalous(&sc),
        first_s,
        first_i,
    })
}

/// Joint spectral intensity at frequency offsets `dw_s`, `dw_i` from the
/// signal and idler resonances.
pub fn jsi<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>, dw_s: T, dw_i: T) -> Result<T> {
    let sc = Scaled::new(rates, injection, &Detunings::new(dw_s, dw_i))?;
    let (a, b) = (sc.ds, sc.di);
    let (four, eight, sixteen) = (lit::<T>(4.0), lit::<T>(8.0), lit::<T>(16.0));
    let lambda = sixteen * a * a * b * b + eight * a * b * sc.s2 + four * (a * a + b * b);
    let k2 = sc.k * sc.k;
    let s = sc.s2.sqrt();
    let plus = T::one() + sc.s2;
    let minus = (T::one() - s) * (T::one() + s);
    let num = sixteen * k2 * sc.s2 * sc.s2 + four * k2 * sc.s2 * (lambda + plus * plus);
    let den = lambda + minus * minus;
    Ok(num / (den * den))
}

/// Zero-detuning quadrature variance at local-oscillator phase `phi_lo`,
/// vacuum = 1.
///
/// Evaluated as `V_sq sin^2(psi) + V_anti cos^2(psi)` with `psi` the phase
/// relative to the anti-squeezed axis, which avoids the cancellation in
/// `1 + 2n - 2|m|` close to threshold.
pub fn quadrature_variance<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>, phi_lo: T) -> Result<T> {
    let sc = Scaled::new(rates, injection, &Detunings::zero())?;
    let s = sc.s2.sqrt();
    let four = lit::<T>(4.0);
    let (p, m) = (T::one() + s, T::one() - s);
    let v_sq = (m * m + four * sc.gm * s) / (p * p);
    let v_anti = T::one() + four * sc.k * s / (m * m);
    let psi = phi_lo + injection.phase() / lit(2.0);
    let (sin, cos) = psi.sin_cos();
    Ok(v_sq * sin * sin + v_anti * cos * cos)
}

/// Squeezed and anti-squeezed variances `(V_sq, V_anti)` at zero detuning.
pub fn variance_extrema<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>) -> Result<(T, T)> {
    let half_phase = injection.phase() / lit(2.0);
    let v_sq = quadrature_variance(rates, injection, T::FRAC_PI_2() - half_phase)?;
    let v_anti = quadrature_variance(rates, injection, -half_phase)?;
    Ok((v_sq, v_anti))
}

/// Quadrature variance at arbitrary detunings via the numeric transfer
/// matrices.
pub fn quadrature_variance_detuned<T: Real>(
    rates: &CavityRates<T>,
    injection: &Injection<T>,
    det: &Detunings<T>,
    phi_lo: T,
) -> Result<T> {
    let tm = output_transfer(rates, injection, det)?;
    Ok(tm.moments(&SeedAmplitudes::vacuum()).quadrature_variance(phi_lo))
}

/// Squeezing parameter `r = asinh(sqrt(n_s))`.
pub fn squeezing_parameter<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>, det: &Detunings<T>) -> Result<T> {
    Ok(photon_flux(rates, injection, det)?.sqrt().asinh())
}

/// Balanced homodyne photocurrent statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomodyneStats<T> {
    pub mean: T,
    pub variance: T,
}

/// Balanced homodyne detection of the combined signal+idler field with a
/// local oscillator of amplitude `lo_amplitude`.
///
/// The measured operator is `|alpha_LO| (A e^{i phi} + A^dag e^{-i phi})`
/// with `A = b_s + b_i`, so the variance is `2 |alpha_LO|^2 V(phi)`.
pub fn homodyne_signal<T: Real>(moments: &OutputMoments<T>, lo_amplitude: Cplx<T>, phi_lo: T) -> HomodyneStats<T> {
    let lo2 = lo_amplitude.norm_sqr();
    let two = lit::<T>(2.0);
    let rot = Cplx::from_polar(T::one(), phi_lo);
    let mean = two * lo_amplitude.norm() * ((moments.first_s + moments.first_i) * rot).re;
    let rot2 = rot * rot;
    // <A^2> = 2 m, <A^dag A> = n_s + n_i, <A A^dag> = n_s + n_i + 2
    let pair = two * (moments.m_si * rot2).re * two;
    let variance = lo2 * (two + two * (moments.n_s + moments.n_i) + pair);
    HomodyneStats { mean, variance }
}

/// Optical power `hbar omega n` carried by photon flux `n`, W.
pub fn output_power<T: Real>(flux: T, omega: T, consts: &PhysicalConstants<T>) -> T {
    consts.hbar * omega * flux
}

/// Steady-state intracavity signal photon number of the linearized model,
/// `sigma^2 / (2 (Gamma^2 - sigma^2))`.
pub fn intracavity_photon_number<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>) -> Result<T> {
    let sc = Scaled::new(rates, injection, &Detunings::zero())?;
    Ok(sc.s2 / (lit::<T>(2.0) * (T::one() - sc.s2)))
}

/// Intracavity signal spectral density at signal offset `delta` (idler at
/// `-delta`), in units of `1/Gamma`. Integrates to
/// [`intracavity_photon_number`] over `d(delta/Gamma) / 2 pi`.
pub fn intracavity_spectrum<T: Real>(rates: &CavityRates<T>, injection: &Injection<T>, delta: T) -> Result<T> {
    let sc = Scaled::new(rates, injection, &Detunings::new(delta, -delta))?;
    let r = sc.resolvent()?;
    let c = r * vacuum_pairing() * r.transpose();
    Ok(c[(1, 0)].re)
}
