//! Exact linear systems of hypersurfaces over QQ, GF(p) and GF(p^k).

pub mod ambient;
pub mod blowup;
pub mod coeffs;
pub mod conditions;
pub mod error;
pub mod groebner;
pub mod job;
pub mod linalg;
pub mod linsys;
pub mod poly;
pub mod repro;
pub mod singular;

pub use error::{Error, Result};
