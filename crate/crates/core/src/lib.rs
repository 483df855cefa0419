//! Exact analysis of random walks on symmetric graph families whose
//! vertices are tuple orbits over `[n]`.
//!
//! Walks are collapsed to chains on orbits of vertex pairs, so hitting
//! times, moments, Green's functions and mixing profiles are computed
//! exactly per `n` and as rational functions of `n`.

pub mod cli;
pub mod error;
pub mod exactnum;
pub mod fispec;
pub mod hitting;
pub mod mixing;
pub mod walks;

pub use error::{Error, Result};
