//! Spatial-spectral regularized local scaling cut (SSRLSC) dimensionality
//! reduction for hyperspectral images.
//!
//! The pipeline is: guided filtering of the cube with a PCA guidance image,
//! exact k-nearest-neighbor graphs over the training spectra, spectral and
//! spatial dissimilarity (scatter) matrices, a beta-weighted fusion solved as
//! a symmetric-definite generalized eigenproblem, and evaluation of the
//! projected features with a one-vs-rest linear SVM (OA / AA / kappa).
//!
//! ```no_run
//! use ssrlsc::datamodel::make_synthetic;
//! use ssrlsc::pipeline::{run_experiment, ExperimentConfig, Method};
//!
//! let (cube, grid) = make_synthetic(3, 2, 8, 16, 6.0, 0.5, 7).unwrap();
//! let cfg = ExperimentConfig::for_method(Method::Ssrlsc, 16);
//! let report = run_experiment(&cube, &grid, &cfg).unwrap();
//! println!("mean OA = {:.4}", report.mean_oa(cfg.dims[0]).unwrap());
//! ```

pub mod classify;
pub mod cli;
pub mod datamodel;
pub mod eig;
pub mod error;
pub mod filter;
pub mod graph;
pub mod pipeline;
pub mod scatter;
pub mod textfmt;

pub use error::{Error, Result};
