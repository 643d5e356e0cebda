//! Workbench for unoriented open/closed field theory algebra: involutive
//! DG and A∞ categories with Calabi-Yau data, Möbius graphs, the surface
//! category presented by discs and annuli, and involutive Hochschild
//! complexes.

pub mod error;
pub mod exactlin;

pub use error::{Error, Result};
pub mod invcat;
pub mod report;
pub mod samples;
pub mod ainfty;
pub mod fuzz;
pub mod graphs;
pub mod hochschild;
pub mod surfcat;
pub mod format;
