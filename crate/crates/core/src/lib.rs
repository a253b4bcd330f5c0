//! Optimality and stability certificates for hierarchical clustering under
//! Dasgupta's cost.
//!
//! A hierarchy `X` over `n` points is encoded as binary level indicators.
//! Minimising `⟨X, Y⟩` over a linear relaxation of the hierarchies `Y` that
//! are at least as good as `X` yields `δ`, and every such hierarchy then lies
//! within Matrix Hamming distance `ε = 2(‖X‖² - δ)` of `X`. The relaxation is
//! solved by a cutting-plane loop over a small bounded-variable simplex, and
//! an enumeration oracle checks every bound for small `n`.
//!
//! ```
//! use hcss_core::cost::SimilarityMatrix;
//! use hcss_core::sublevel::{certify, CertifyConfig, Method};
//!
//! let s = SimilarityMatrix::from_fn(4, |i, j| if i / 2 == j / 2 { 1.0 } else { 0.0 }).unwrap();
//! let report = certify(&s, Method::Exhaustive, &CertifyConfig::default()).unwrap();
//! assert_eq!(report.loss_x, 8.0);
//! assert!(report.epsilon.is_some());
//! ```

pub mod cost;
pub mod error;
pub mod hctree;
pub mod linkage;
pub mod lp;
pub mod metrics;
pub mod oracle;
pub mod sublevel;

pub use error::{Error, Result};
