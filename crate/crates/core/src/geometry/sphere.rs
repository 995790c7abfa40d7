//! Unit directions and antipodally symmetric sphere quadrature.

use std::ops::Deref;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{check_dim, sphere_area, Vector};
use super::random::rng_from_seed;
use crate::error::{GeomError, Result};

/// A vector of Euclidean norm one (within `1e-12`).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitDirection(Vector);

impl UnitDirection {
    /// Normalize `v`; fails on (near) zero vectors.
    pub fn normalize(v: Vector) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm < 1e-300 {
            return Err(GeomError::InvalidInput(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(Self(v / norm))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::normalize(Vector::from_column_slice(coords))
    }

    /// Standard basis vector `e_i` in `R^n`.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        Self(v)
    }

    pub fn as_vector(&self) -> &Vector {
        &self.0
    }

    pub fn into_vector(self) -> Vector {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self(-&self.0)
    }

    pub fn angle_to(&self, other: &UnitDirection) -> f64 {
        // atan2 form stays accurate for nearly parallel vectors
        let cross = (&self.0 - &other.0).norm();
        let sum = (&self.0 + &other.0).norm();
        2.0 * cross.atan2(sum)
    }
}

impl Deref for UnitDirection {
    type Target = Vector;
    fn deref(&self) -> &Vector {
        &self.0
    }
}

/// Draw a uniformly distributed unit vector.
pub fn random_direction(n: usize, rng: &mut ChaCha8Rng) -> UnitDirection {
    loop {
        let v = Vector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        if v.norm() > 1e-12 {
            return UnitDirection(v.normalize());
        }
    }
}

/// Equal-weight quadrature on `S^{n-1}`, closed under `u -> -u`.
///
/// Directions are stored as `m/2` random vectors followed by their antipodes,
/// so `directions[i + m/2] == -directions[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    n: usize,
    seed: u64,
    directions: Vec<UnitDirection>,
    weights: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n: usize, m: usize, seed: u64) -> Result<Self> {
        check_dim(n)?;
        if m % 2 != 0 || m < 2 * n {
            return Err(GeomError::InvalidInput(format!(
                "sphere grid needs an even size >= 2n, got m = {m}, n = {n}"
            )));
        }
        let mut rng = rng_from_seed(seed);
        let half: Vec<UnitDirection> = (0..m / 2).map(|_| random_direction(n, &mut rng)).collect();
        let mut directions = half.clone();
        directions.extend(half.iter().map(UnitDirection::neg));
        let w = sphere_area(n) / m as f64;
        Ok(Self {
            n,
            seed,
            directions,
            weights: vec![w; m],
        })
    }

    /// Grid from explicit directions; antipodes are appended.
    pub fn from_half(n: usize, half: Vec<UnitDirection>, seed: u64) -> Result<Self> {
        check_dim(n)?;
        if half.iter().any(|u| u.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: half.iter().map(|u| u.len()).find(|&l| l != n).unwrap_or(n),
            });
        }
        let m = 2 * half.len();
        let mut directions = half.clone();
        directions.extend(half.iter().map(UnitDirection::neg));
        let w = sphere_area(n) / m as f64;
        Ok(Self {
            n,
            seed,
            directions,
            weights: vec![w; m],
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[UnitDirection] {
        &self.directions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Index of the antipode of direction `i`.
    pub fn antipode(&self, i: usize) -> usize {
        let half = self.len() / 2;
        if i < half {
            i + half
        } else {
            i - half
        }
    }

    /// `sum_j q_j f(u_j)`.
    pub fn integrate(&self, f: impl Fn(&UnitDirection) -> f64) -> f64 {
        // pair antipodes so odd integrands cancel before accumulation
        let half = self.len() / 2;
        (0..half)
            .map(|i| {
                let a = f(&self.directions[i]);
                let b = f(&self.directions[i + half]);
                self.weights[i] * (a + b)
            })
            .sum()
    }

    /// Same grid structure, identical directions.
    pub fn same_as(&self, other: &SphereGrid) -> bool {
        self.n == other.n
            && self.len() == other.len()
            && self
                .directions
                .iter()
                .zip(&other.directions)
                .all(|(a, b)| (a.as_vector() - b.as_vector()).norm() <= 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_planar_grid_has_full_weight() {
        let g = SphereGrid::new(2, 4, 7).unwrap();
        assert_eq!(g.len(), 4);
        assert!((g.total_weight() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn constant_integrates_to_sphere_area() {
        let g = SphereGrid::new(3, 1000, 1).unwrap();
        assert!((g.integrate(|_| 1.0) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn second_moment_quadrature() {
        let g = SphereGrid::new(3, 5000, 0).unwrap();
        let v = g.integrate(|u| u[0] * u[0]);
        let exact = 4.0 * PI / 3.0;
        assert!((v - exact).abs() / exact < 0.02, "{v} vs {exact}");
    }

    #[test]
    fn odd_functions_cancel() {
        let g = SphereGrid::new(4, 200, 3).unwrap();
        let v = g.integrate(|u| u[0].powi(3) + 2.0 * u[1] - u[2] * u[3] * u[0]);
        assert!(v.abs() <= 1e-12 * g.total_weight() * 4.0);
    }

    #[test]
    fn rejects_odd_or_small_sizes() {
        assert!(SphereGrid::new(3, 7, 0).is_err());
        assert!(SphereGrid::new(3, 4, 0).is_err());
    }

    #[test]
    fn deterministic_and_prefix_stable() {
        let a = SphereGrid::new(3, 200, 5).unwrap();
        let b = SphereGrid::new(3, 200, 5).unwrap();
        assert!(a.same_as(&b));
        let c = SphereGrid::new(3, 400, 5).unwrap();
        for i in 0..100 {
            assert_eq!(a.directions()[i], c.directions()[i]);
        }
    }

    #[test]
    fn angle_is_accurate_for_close_vectors() {
        let a = UnitDirection::from_slice(&[1.0, 0.0]).unwrap();
        let b = UnitDirection::from_slice(&[1.0, 1e-10]).unwrap();
        assert!((a.angle_to(&b) - 1e-10).abs() < 1e-20);
    }
}
