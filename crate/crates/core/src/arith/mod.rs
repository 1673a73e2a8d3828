//! Exact and certified-numeric arithmetic building blocks.

pub mod matrix;
pub mod modp;
pub mod poly;
pub mod rat;
pub mod real;
pub mod snf;
pub mod strs;

pub use matrix::QMat;
pub use poly::QPoly;
pub use rat::Q;
pub use real::{Complex, Real};
