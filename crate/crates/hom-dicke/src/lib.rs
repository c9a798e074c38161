//! Two-photon coincidence signals of a frequency-entangled photon pair
//! scattered off a driven Dicke sample.
//!
//! The pipeline runs
//! [`dicke`] (steady states, linearization) → [`response`] (input/output
//! transfer matrix, poles) → [`biphoton`] (coincidence assembly) →
//! [`contour`] (rotated-contour quadrature of the interference integral),
//! with [`scan`] driving parameter sweeps, [`output`] writing CSV/JSON and
//! [`validate`] running the self-checks behind the command-line tool.

pub mod biphoton;
pub mod config;
pub mod contour;
pub mod dicke;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod output;
pub mod response;
pub mod scan;
pub mod special;
pub mod validate;

pub use error::{Error, Result};

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
