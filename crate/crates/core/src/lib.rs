//! Coupled learning rules for principal component and singular value
//! analysis: averaged and online fields, integrators, oracles, criteria and
//! linear stability of the constant-sum SVD rule.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criteria;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod rules_pca;
pub mod rules_svd;
pub mod stability;

pub use error::{Error, Result};
