//! Evasion paths in mobile sensor networks: rasterized uncovered regions,
//! zigzag diagrams of their components, and inverse limits of those diagrams.

pub mod analysis;
pub mod components;
pub mod error;
pub mod limit;
pub mod planar;
pub mod rasterize;
pub mod render;
pub mod scenario;
pub mod zigzag;

pub use error::{EvasionError, Result};
