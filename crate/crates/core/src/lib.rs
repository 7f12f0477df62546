//! Exact computation of boundary coboundary matrices on Okamoto-Painleve pairs.

pub mod atlas;
pub mod cartan;
pub mod cas;
pub mod cech;
pub mod linalg;
pub mod report;
pub mod sheaf;

pub use report::{Finding, Report};
