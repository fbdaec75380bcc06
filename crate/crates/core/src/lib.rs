//! Microring four-wave-mixing squeezed light and lossy Mach-Zehnder phase
//! sensitivity.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] turns a ring description into decay rates, gain, threshold
//!   and the injection parameter.
//! * [`cavity_io`] evaluates the linearized input-output model: transfer
//!   matrices, output moments, joint spectral intensity, quadrature variance.
//! * [`meanfield`] integrates mean-field moment equations to check where the
//!   linearization holds.
//! * [`interferometer`] propagates the squeezed and coherent ports through a
//!   lossy interferometer and reports phase sensitivities.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*F64` aliases
//! below name the double precision instances.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod cavity_io;
pub mod error;
pub mod interferometer;
pub mod linalg;
pub mod meanfield;
pub mod params;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{from_db, to_db, Cplx, Real};

pub type PhysicalConstantsF64 = params::PhysicalConstants<f64>;
pub type RingGeometryF64 = params::RingGeometry<f64>;
pub type CavityRatesF64 = params::CavityRates<f64>;
pub type PumpSpecF64 = params::PumpSpec<f64>;
pub type FwmStrengthF64 = params::FwmStrength<f64>;
pub type InjectionF64 = params::Injection<f64>;
pub type DetuningsF64 = cavity_io::Detunings<f64>;
pub type OutputMomentsF64 = cavity_io::OutputMoments<f64>;
pub type SeedAmplitudesF64 = cavity_io::SeedAmplitudes<f64>;
pub type TransferMatricesF64 = cavity_io::TransferMatrices<f64>;
pub type MomentStateF64 = meanfield::MomentState<f64>;
pub type SolverConfigF64 = meanfield::SolverConfig<f64>;
pub type SensorSpecF64 = interferometer::SensorSpec<f64>;
pub type GaussianPortStateF64 = interferometer::GaussianPortState<f64>;
pub type SensitivityReportF64 = interferometer::SensitivityReport<f64>;

pub type RingGeometryF32 = params::RingGeometry<f32>;
pub type CavityRatesF32 = params::CavityRates<f32>;
pub type InjectionF32 = params::Injection<f32>;
pub type OutputMomentsF32 = cavity_io::OutputMoments<f32>;
pub type SensorSpecF32 = interferometer::SensorSpec<f32>;
