//! Input selection for neural-network fault identification.
//!
//! Two ways of shrinking the input space of a multilayer perceptron are
//! implemented side by side:
//!
//! - **PCA**: project onto the leading eigenvectors of the input covariance
//!   ([`pca`], backed by the Jacobi eigensolver in [`linalg`]).
//! - **ARD**: train a network whose weights leaving each input share a
//!   Gaussian prior, re-estimate the prior precisions with the evidence
//!   framework, and keep the inputs with the largest prior variance
//!   ([`ard`], trained with [`scg`] over the grouped network in [`mlp`]).
//!
//! The [`pipeline`] module runs both on synthetic cylinder and gearbox data
//! ([`synthdata`]) after the usual condition-monitoring preprocessing:
//! statistical-overlap pre-selection ([`sof`]), decimation and spectra
//! ([`signal`]), and time-series features ([`features`]).

pub mod ard;
pub mod error;
pub mod eval;
pub mod features;
pub mod linalg;
pub mod mlp;
pub mod pca;
pub mod pipeline;
pub mod report;
pub mod scg;
pub mod signal;
pub mod sof;
pub mod synthdata;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use synthdata::Dataset;
