//! Variational generalized eigensolver for Hermitian pencils `(G, S)` given
//! as Pauli sums, with a dense reference solver and two manifold-learning
//! front ends (NPE and LDE) that reduce to generalized eigenproblems.

pub mod builtin;
pub mod datasets;
pub mod error;
pub mod lde;
pub mod manifold;
pub mod optimize;
pub mod oracle;
pub mod pauli;
pub mod rng;
pub mod simulator;
pub mod vqge;

pub use error::{Error, Result};
pub use lde::{Distance, LdeParams};
pub use manifold::{Dataset, Metric, NpeParams, Projection, Solver};
pub use oracle::{generalized_eig, EigenDecomposition, HermitianMatrix};
pub use pauli::{Pauli, PauliString, PauliSum, PauliTerm};
pub use rng::SeedStream;
pub use simulator::{AnsatzSpec, ExpectationMode, ParamVector, RotationKind, Statevector};
pub use vqge::{
    measurement_error_bound, GenEigenpair, MatrixPencil, OptimizerConfig, ScanConfig, ScanResult,
    Solution, Vqge, VqgeConfig,
};
