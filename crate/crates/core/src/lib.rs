//! Compressive subspace learning.
//!
//! Each column `x_t` of a `d × n` data matrix is observed only through two
//! independent random rank-`m` projections `y_t = Φ_t x_t`, `z_t = Ψ_t x_t`.
//! The rescaled sum of `½(y zᵀ + z yᵀ)` is an unbiased estimate of
//! `(1/n) X Xᵀ`; its top-`k` eigenvectors estimate the principal subspace.
//!
//! ```
//! use csl::datagen::{generate, DataKind, DataSpec};
//! use csl::estimator::{run_csl, CslOptions};
//! use csl::linalg::subspace_distance;
//!
//! let spec = DataSpec {
//!     d: 8,
//!     n: 2000,
//!     k: 1,
//!     kind: DataKind::ExactLowRank,
//!     spectrum: DataSpec::ladder_spectrum(8, 1, 1.0, 0.0),
//!     mu_cap: 1.0,
//!     seed: 1,
//! };
//! let data = generate(&spec).unwrap();
//! let est = run_csl(&data.x, 4, 1, 2, CslOptions::default()).unwrap();
//! assert!(subspace_distance(&est.projector, &data.truth.projector).unwrap() < 0.3);
//! ```

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod linalg;
pub mod par;
pub mod randgen;
pub mod theory;

pub use error::{CslError, Result};
pub use estimator::{exact_pca, run_csl, run_hmt_baseline, CslOptions, MeasurementMode, SubspaceEstimate};
pub use linalg::{eig_sym, subspace_distance, DataMatrix, Projector, SymmetricMatrix};
pub use par::Execution;
pub use randgen::SeedSpec;
