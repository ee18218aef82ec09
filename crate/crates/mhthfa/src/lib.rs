//! Mixtures of hidden truncation hyperbolic factor analyzers (MHTHFA).
//!
//! This crate implements the full model stack for clustering and
//! semi-supervised classification with skewed, heavy-tailed mixture
//! components that have a factor-analytic covariance structure:
//!
//! - [`special`]: modified Bessel functions of the second kind for real
//!   order, Gaussian CDFs up to dimension three, truncated-normal orthant
//!   moments, and the quadrature machinery every density rests on;
//! - [`gig`]: the generalized inverse Gaussian mixing distribution
//!   (density, moments, log-moment, sampling);
//! - [`hyperbolic`]: the symmetric hyperbolic family (density, orthant
//!   CDF, skew-normal density, truncated-hyperbolic orthant moments);
//! - [`hthfa`]: the hidden truncation hyperbolic distribution and its
//!   factor-analysis form (parameter transforms, densities, sampler,
//!   dimension constraints);
//! - [`fit`]: the mixture model and its ECM fitter (E-step expectations,
//!   conditional maximization updates, initialization, Aitken stopping,
//!   BIC, grid search, semi-supervised support);
//! - [`eval`], [`data`], [`model_io`]: adjusted Rand index and confusion
//!   matrices, CSV ingestion, and model persistence.

pub mod data;
pub mod error;
pub mod eval;
pub mod fit;
pub mod gig;
pub mod hthfa;
pub mod hyperbolic;
pub mod model_io;
pub mod special;

pub use data::DataSet;
pub use error::{Error, Result};
pub use fit::{FitConfig, FitResult, MixtureModel};
pub use gig::GigParams;
pub use hthfa::{DerivedComponent, FactorComponentParams, HthParams};
pub use hyperbolic::{SkewNormalParams, SymHypParams};
