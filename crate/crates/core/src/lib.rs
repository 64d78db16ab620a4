//! Symmetric bilinear spaces over F2 and their maximal totally isotropic
//! subspaces, 2-rank distributions for class groups of odd-degree fields,
//! a Monte-Carlo model of those distributions, and integral binary cubic
//! forms.

pub mod cubicforms;
pub mod error;
pub mod f2linalg;
pub mod heuristics;
pub mod isotropic;
pub mod montecarlo;
pub mod symspace;

pub use error::{Error, Result};
