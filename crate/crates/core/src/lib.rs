pub mod arith;
pub mod bloch;
pub mod complex;
pub mod error;
pub mod field;
pub mod forms;
pub mod pipeline;
pub mod polyhedra;
pub mod registry;
pub mod regulator;
pub mod voronoi;

pub use error::{Error, Result};
