//! Möbius-covariant reproducing kernel spaces on the disc and polydisc,
//! their decomposition into holomorphic discrete series, and the
//! homogeneous multiplication pairs they carry.
//!
//! Everything works on polynomials of bounded total degree, where the
//! diagonal filtration is exact; Möbius actions and kernels are truncated
//! Taylor series.

pub mod decompose;
pub mod discspace;
mod error;
pub mod homogeneous;
pub mod moebius;
pub mod par;
pub mod polyspace;
pub mod series;

pub use error::{Error, Result};
pub use moebius::{cocycle_eval, Cocycle, MoebiusTransform};
pub use par::Strategy;
pub use polyspace::{PolyFunction, TensorSpace};
