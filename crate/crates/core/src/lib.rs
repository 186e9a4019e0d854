//! Stationary covariance models with anisotropies and hole effects.
//!
//! The crate covers radial families with their derivatives and spectral
//! densities, three constructions that combine them into anisotropic
//! hole-effect models with validity certificates, and the statistical
//! workflow around them: empirical variograms, composite-likelihood and
//! least-squares fitting, simple kriging and Gaussian simulation.

pub mod anisotropy;
pub mod error;
pub mod field;
pub mod inference;
pub mod kriging;
pub mod models;
pub mod optim;
pub mod quadrature;
pub mod rng;
pub mod specfun;
pub mod transforms;

pub use error::{Error, Result};
pub use models::{hankel_spectral_oracle, IsotropicFamily, OracleOptions};
pub use anisotropy::AnisotropyMatrix;
pub use transforms::{Certificate, Component, CovarianceModel, ModelKind, Status};
pub use field::{empirical_variogram, EmpiricalVariogram, SpatialDataset};
pub use inference::{fit, FitOptions, FitResult, ModelTemplate, Objective, PairSet, ParameterVector};
pub use kriging::{simple_krige, simulate_gaussian, split_sample_validate, GaussianSimulator, KrigingResult, ValidationReport};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/anisotropy.md")]
    mod anisotropy {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/hole-effects.md")]
    mod hole_effects {}
    #[doc = include_str!("../../../book/src/fitting.md")]
    mod fitting {}
    #[doc = include_str!("../../../book/src/kriging.md")]
    mod kriging {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
