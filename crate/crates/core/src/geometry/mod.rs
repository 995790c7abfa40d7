//! Linear-algebra substrate, polytope representations and conversions,
//! standard bodies, linear transforms and sphere sampling.

pub mod bodies;
pub(crate) mod dd;
pub(crate) mod faces;
pub mod io;
pub mod linalg;
pub mod polytope;
pub mod random;
pub mod sphere;

pub use bodies::{standard_body, Ball, BallCube, BodyOracle, StandardBody, StandardKind};
pub use linalg::{ball_volume, sphere_area, LinearMap, Matrix, Vector};
pub use polytope::{hrep_to_vrep, vrep_to_hrep, HPolytope, Polytope, VPolytope, GEOM_TOL};
pub use sphere::{SphereGrid, UnitDirection};
