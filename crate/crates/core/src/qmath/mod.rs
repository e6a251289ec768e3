//! Linear algebra, special functions and weak values.

pub mod eigen;
pub mod matrix;
pub mod operators;
pub mod special;
pub mod weak;

pub use eigen::{herm_eigendecomp, jacobi_eigen, SpectralDecomposition, DEFAULT_DEGENERACY_TOL};
pub use matrix::CMatrix;
pub use operators::{DensityState, Effect, HermitianOperator};
pub use special::{erf, erf_family, erfc, erfi, gaussian_overlap, ErfFamily};
pub use weak::{kd_quasiprob, weak_value, weak_value_observable, AnomalyTolerance, ObservableWeakValue};
