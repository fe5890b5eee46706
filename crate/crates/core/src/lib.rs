pub mod classify3d;
pub mod cli;
pub mod error;
pub mod existence;
pub mod geodesic;
pub mod lie;
pub mod linalg;
pub mod metric;
pub mod phi;

pub use error::{Error, Result};
pub use nalgebra;
