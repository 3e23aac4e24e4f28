//! Generalized Michelson contrast for positive semidefinite matrices.
//!
//! For a positive operator `x` the contrast `Δ(x) = inf_{A>0} ‖1 - x/A‖`
//! measures how far `x` is from a multiple of the identity: it is 0 exactly
//! on positive scalars, 1 on singular operators, and equals
//! `(λ_max - λ_min)/(λ_max + λ_min)` in general. For a diagonal matrix of
//! image samples it reduces to the classical Michelson contrast.
//!
//! Modules:
//! - [`linalg`]: Hermitian matrices, Jacobi eigenvalues, norms, square roots
//! - [`contrast`]: `Δ`, its scan oracle, products, squares, cones, `Δ₂`
//! - [`blocks`]: direct sums, blockwise `Δ'`, central `Δ_N`, multichannel `Δ'₂`
//! - [`image`], [`pnm`], [`text`], [`report`], [`cli`]: file formats and the CLI
//! - [`ensemble`], [`verify`]: random ensembles and property suites

pub mod blocks;
pub mod cli;
pub mod contrast;
pub mod ensemble;
pub mod error;
pub mod image;
pub mod linalg;
pub mod pnm;
pub mod report;
pub mod search;
pub mod text;
pub mod verify;

pub use blocks::{BlockOperator, CentralSearchConfig, ChannelStack};
pub use contrast::{ContrastPath, ContrastReport, ScanConfig};
pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, RectMatrix, SpectralBounds};
