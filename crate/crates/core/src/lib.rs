//! Steering resource of noisy qubit measurement pairs and its optimal
//! control.
//!
//! The crate quantifies how strongly Alice can EPR-steer Bob with two binary
//! qubit measurements, using the analytic noise-robustness monotone of the
//! equivalent joint-measurability problem, and maximizes that resource over
//! piecewise-constant control pulses fighting Markovian noise. Gradients are
//! exact: implicit differentiation of the monotone's root equation combined
//! with Fréchet derivatives of the matrix exponential.
//!
//! Numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below name the double-precision instantiations used by the CLI.
//!
//! Modules, bottom up:
//! - [`qubit`]: effects as Minkowski 4-vectors, 2x2 and 4x4 matrix types.
//! - [`compat`]: joint-measurability criterion, noise map, robustness monotone
//!   and its gradient.
//! - [`lindblad`]: Heisenberg-picture generators, pulse propagation, Fréchet
//!   derivatives.
//! - [`steering`]: the resource map of a shared state and the steering cost.
//! - [`control`]: multi-start optimization, the closest-to-identity baseline,
//!   two-pulse landscapes and time sweeps.

// `!(a > b)` is used on purpose so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod compat;
pub mod control;
pub mod dense;
mod error;
pub mod lindblad;
pub mod qubit;
mod scalar;
pub mod steering;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use compat::{apply_noise, c_functional, is_jointly_measurable, robustness, robustness_gradient, NoiseParams};
pub use control::{
    landscape, naive_optimize, optimize, time_sweep, LandscapeGrid, OptimizeConfig, OptimizeResult, SweepRow,
};
pub use lindblad::{
    control_matrix, drift_matrix, expm_frechet, propagate, propagator_jacobian, ControlHamiltonian, DriftGenerator,
    DriftKind, PulseSequence, Segment, TransferMatrix,
};
pub use qubit::{
    complement, effect_from_matrix, effect_to_matrix, minkowski, validate_effect, BipartiteState, FourVector,
    HermitianMatrix2,
};
pub use steering::{
    assemblage, bob_marginal, resource_map, steering_gradient, steering_robustness, Assemblage, SteeringGradient,
    SteeringScenario,
};

pub type FourVector64 = FourVector<f64>;
pub type FourVector32 = FourVector<f32>;
pub type TransferMatrix64 = TransferMatrix<f64>;
pub type TransferMatrix32 = TransferMatrix<f32>;
pub type HermitianMatrix2_64 = HermitianMatrix2<f64>;
pub type BipartiteState64 = BipartiteState<f64>;
pub type DriftGenerator64 = DriftGenerator<f64>;
pub type ControlHamiltonian64 = ControlHamiltonian<f64>;
pub type PulseSequence64 = PulseSequence<f64>;
pub type SteeringScenario64 = SteeringScenario<f64>;
pub type OptimizeConfig64 = OptimizeConfig<f64>;
pub type OptimizeResult64 = OptimizeResult<f64>;
pub type LandscapeGrid64 = LandscapeGrid<f64>;
