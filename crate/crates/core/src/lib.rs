//! Finite-dimensional double operator integrals.
//!
//! Hermitian matrices stand in for self-adjoint operators, the matrix trace
//! for the trace, and a double operator integral becomes a Schur multiplier
//! in a pair of eigenbases. On top of that sit symmetric norms, explicit
//! kernel factorizations with their Fourier certificates, and seeded suites
//! that check operator Lipschitz, commutator and differentiability estimates
//! trial by trial.

pub mod besov;
pub mod doi;
pub mod ensemble;
pub mod error;
pub mod function;
pub mod harness;
pub mod kernels;
pub mod matrix;
pub mod norms;
pub mod report;
pub mod scalar;
pub mod spectral;

pub use doi::DoiOperator;
pub use ensemble::{EnsembleSpec, TrialRng};
pub use error::{Error, Result};
pub use function::{ScalarFunction, Tabulated};
pub use kernels::{FourierProfile, GFamily, Kernel};
pub use matrix::Matrix;
pub use norms::{NormSpec, SingularValueSequence};
pub use report::{ConstantSource, EstimateReport};
pub use scalar::Real;
pub use spectral::{Decomposition, HermitianOperator};

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Hermitian64 = HermitianOperator<f64>;
pub type Hermitian32 = HermitianOperator<f32>;
pub type Complex64 = num_complex::Complex<f64>;
