//! Numerical convex geometry: surface-area measures, mixed volumes, exact
//! sections and projections, affine positions, the discrete Minkowski problem,
//! intersection bodies, and seeded experiments built on them.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod measures;
pub mod minkowski;
pub mod positions;
pub mod star_bodies;
pub mod volumetrics;

pub use error::{GeomError, Result};
