//! Exact inclusion-exclusion transforms, urn probabilities and hypergeometric identity checks.
//!
//! - [`exact`]: rational scalars, rising factorials, binomials
//! - [`transforms`]: binomial and symmetric transforms on sequences and on
//!   subset functions, difference tables and their rotation
//! - [`urns`]: coin, ascent-set and Pólya-Eggenberger urn models, outcome
//!   enumeration and seeded Monte Carlo
//! - [`series`] and [`hypergeometric`]: truncated power series, terminating
//!   `pFq` evaluation and identity checks
//! - [`cli`]: the command-line surface behind the `sie` binary

pub mod cli;
pub mod error;
pub mod exact;
pub mod hypergeometric;
pub mod series;
pub mod transforms;
pub mod urns;

pub use error::{Error, Result};
pub use exact::Rational;
