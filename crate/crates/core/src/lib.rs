//! Exact Chow rings and K-rings of matroids.

pub mod acceptance;
pub mod appendix;
pub mod chow;
pub mod error;
pub mod fy;
pub mod json;
pub mod kring;
pub mod m0n;
pub mod matroid;
pub mod snapper;
pub mod zring;

pub use error::{Error, Result};
