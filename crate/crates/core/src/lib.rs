//! Spectral denoising of a single noisy observation of an undirected network.
//!
//! An observed graph is modelled as the true graph with every pair flipped
//! independently: true edges vanish with probability `p`, non-edges appear
//! with probability `q`. [`noise::debias`] removes the bias of the
//! observation, [`denoise`] truncates its spectrum, and [`netstats`]
//! evaluates Lipschitz summary statistics on the result. Closed-form risk
//! bounds and a Monte Carlo driver live in [`denoise`] as well.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.

pub mod denoise;
pub mod error;
pub mod error_rates;
pub mod graph;
pub mod linalg;
pub mod netstats;
pub mod noise;
pub mod scalar;
pub mod spectral;

pub use denoise::{
    empirical_estimator, ideal_estimator, relative_error_mc, Basis, BoundCurve, BoundKind, DenoiseResult, Estimator,
    McOptions, McReport,
};
pub use error::{Error, Result};
pub use graph::{AdjacencyMatrix, Kind, NepsBasis, StoragePolicy};
pub use linalg::{LanczosOptions, Matrix, SymmetricOperator, WeightedAdjacency};
pub use netstats::{StatValue, Statistic};
pub use noise::{debias, sample_observed, DebiasedOperator, NoiseSpec};
pub use scalar::Scalar;
pub use spectral::{eig_sym, top_modes, EigenSystem, Source};

pub type Adjacency = AdjacencyMatrix<f64>;
pub type DenseMatrix = Matrix<f64>;
pub type Eigen = EigenSystem<f64>;
pub type Denoised = DenoiseResult<f64>;
