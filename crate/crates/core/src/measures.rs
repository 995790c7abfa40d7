//! Surface-area measures of polytopes, mixed volumes and isotropy diagnostics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::faces::facet_areas_and_volume;
use crate::geometry::{BodyOracle, LinearMap, Matrix, Polytope, UnitDirection, Vector};

/// Angular tolerance for matching atoms of two measures.
pub const ALIGN_TOL: f64 = 1e-9;

/// Relative centering tolerance `|sum w u| <= CENTER_TOL * mass`.
pub const CENTER_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub u: UnitDirection,
    pub w: f64,
}

/// Finite atomic measure on the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSurfaceMeasure {
    n: usize,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    u: Vec<f64>,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<AtomJson>,
}

impl DiscreteSurfaceMeasure {
    /// Weights must be positive and normals pairwise distinct.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let n = atoms
            .first()
            .map(|a| a.u.len())
            .ok_or_else(|| GeomError::InvalidInput("measure needs at least one atom".into()))?;
        for a in &atoms {
            if a.u.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    found: a.u.len(),
                });
            }
            if !(a.w > 0.0) || !a.w.is_finite() {
                return Err(GeomError::InvalidInput(format!(
                    "atom weight {} is not positive",
                    a.w
                )));
            }
        }
        let order = canonical_order(&atoms);
        for pair in order.windows(2) {
            let (a, b) = (&atoms[pair[0]], &atoms[pair[1]]);
            if a.u.angle_to(&b.u) <= ALIGN_TOL {
                return Err(GeomError::InvalidInput(
                    "measure has repeated normals".into(),
                ));
            }
        }
        // sorted neighbours can miss pairs that straddle a rounding boundary
        if atoms.len() <= 2048 {
            for i in 0..atoms.len() {
                for j in i + 1..atoms.len() {
                    if atoms[i].u.angle_to(&atoms[j].u) <= ALIGN_TOL {
                        return Err(GeomError::InvalidInput(
                            "measure has repeated normals".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self { n, atoms })
    }

    pub fn from_parts(normals: Vec<UnitDirection>, weights: Vec<f64>) -> Result<Self> {
        if normals.len() != weights.len() {
            return Err(GeomError::InvalidInput(
                "normals and weights differ in length".into(),
            ));
        }
        Self::new(
            normals
                .into_iter()
                .zip(weights)
                .map(|(u, w)| Atom { u, w })
                .collect(),
        )
    }

    /// Merge atoms whose normals agree within [`ALIGN_TOL`], summing weights.
    /// Zero weights are dropped.
    pub fn merged(n: usize, atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let mut out: Vec<Atom> = Vec::new();
        for a in atoms {
            if a.u.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    found: a.u.len(),
                });
            }
            match out.iter_mut().find(|b| b.u.angle_to(&a.u) <= ALIGN_TOL) {
                Some(b) => b.w += a.w,
                None => out.push(a),
            }
        }
        out.retain(|a| a.w > 0.0);
        Self::new(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn normals(&self) -> Vec<UnitDirection> {
        self.atoms.iter().map(|a| a.u.clone()).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.w).collect()
    }

    /// Total mass; the surface area for measures of bodies.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    /// `sum_i w_i u_i`.
    pub fn centering(&self) -> Vector {
        let mut c = Vector::zeros(self.n);
        for a in &self.atoms {
            c.axpy(a.w, a.as_vector(), 1.0);
        }
        c
    }

    pub fn is_centered(&self) -> bool {
        self.centering().norm() <= CENTER_TOL * self.mass()
    }

    pub fn check_centered(&self) -> Result<()> {
        let c = self.centering().norm();
        if c <= CENTER_TOL * self.mass() {
            Ok(())
        } else {
            Err(GeomError::InfeasibleMeasure {
                centering: c,
                mass: self.mass(),
            })
        }
    }

    /// Every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(GeomError::InvalidInput(
                "measure scale must be positive".into(),
            ));
        }
        Ok(Self {
            n: self.n,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    u: a.u.clone(),
                    w: a.w * c,
                })
                .collect(),
        })
    }

    /// Surface measure of `T K` from that of `K`: normal `u -> T^{-T} u / |T^{-T} u|`,
    /// weight `w -> w |T^{-T} u| |det T|`.
    pub fn transformed(&self, t: &LinearMap) -> Result<Self> {
        if t.dim() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                found: t.dim(),
            });
        }
        let inv_t = t.inverse_transpose()?;
        let det = t.det().abs();
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let v = inv_t.apply(&a.u);
                let norm = v.norm();
                Ok(Atom {
                    u: UnitDirection::normalize(v)?,
                    w: a.w * norm * det,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n: self.n, atoms })
    }

    /// Atom-wise sum. For planar measures this is the measure of the
    /// Minkowski sum of the two bodies; in higher dimension it is the
    /// Blaschke sum.
    pub fn merged_sum(&self, other: &Self) -> Result<Self> {
        Self::merged(self.n, self.atoms.iter().chain(&other.atoms).cloned())
    }

    /// Atoms sorted lexicographically by their normals rounded to 9 decimals.
    pub fn canonicalized(&self) -> Self {
        let order = canonical_order(&self.atoms);
        Self {
            n: self.n,
            atoms: order.into_iter().map(|k| self.atoms[k].clone()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let j = MeasureJson {
            atoms: self
                .canonicalized()
                .atoms
                .iter()
                .map(|a| AtomJson {
                    u: a.u.iter().copied().collect(),
                    w: a.w,
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&j)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: MeasureJson = serde_json::from_str(text)?;
        let atoms = j
            .atoms
            .into_iter()
            .map(|a| {
                Ok(Atom {
                    u: UnitDirection::from_slice(&a.u)?,
                    w: a.w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl std::ops::Deref for Atom {
    type Target = UnitDirection;
    fn deref(&self) -> &UnitDirection {
        &self.u
    }
}

fn rounded_key(u: &UnitDirection) -> Vec<i64> {
    u.iter().map(|x| (x * 1e9).round() as i64).collect()
}

fn canonical_order(atoms: &[Atom]) -> Vec<usize> {
    let keys: Vec<Vec<i64>> = atoms.iter().map(|a| rounded_key(&a.u)).collect();
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]).then(a.cmp(&b)));
    order
}

/// One atom per facet: outer unit normal and facet `(n-1)`-volume.
pub fn surface_measure(p: &Polytope) -> Result<DiscreteSurfaceMeasure> {
    let (areas, _) = facet_areas_and_volume(p);
    let total: f64 = areas.iter().sum();
    let atoms = p
        .normals()
        .iter()
        .zip(areas)
        .enumerate()
        .map(|(i, (u, w))| {
            if w <= 1e-14 * total {
                Err(GeomError::DegenerateFacet(format!(
                    "facet {i} has zero area"
                )))
            } else {
                Ok(Atom { u: u.clone(), w })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DiscreteSurfaceMeasure::new(atoms)
}

/// `h_K(u)`.
pub fn support(body: &dyn BodyOracle, u: &Vector) -> f64 {
    body.support(u)
}

/// `|K|u^perp| = (1/2) sum w_i |<n_i, u>|`.
pub fn projection_volume_cauchy(mu: &DiscreteSurfaceMeasure, u: &UnitDirection) -> f64 {
    0.5 * mu.atoms.iter().map(|a| a.w * a.dot(u).abs()).sum::<f64>()
}

/// `V(K[n-1], L) = (1/n) sum h_L(n_i) w_i`.
pub fn mixed_volume_n1(mu: &DiscreteSurfaceMeasure, h_l: impl Fn(&Vector) -> f64) -> f64 {
    mu.atoms
        .iter()
        .map(|a| h_l(a.as_vector()) * a.w)
        .sum::<f64>()
        / mu.n as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotropyReport {
    /// `M[j][k] = sum w_i n_i[j] n_i[k]`.
    #[serde(serialize_with = "serialize_matrix")]
    pub moment_matrix: Matrix,
    /// `|M - (S/n) I|_2 / (S/n)`.
    pub defect: f64,
    pub mass: f64,
}

pub(crate) fn serialize_matrix<S: serde::Serializer>(
    m: &Matrix,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect();
    rows.serialize(s)
}

pub fn moment_matrix(mu: &DiscreteSurfaceMeasure) -> Matrix {
    let mut m = Matrix::zeros(mu.n, mu.n);
    for a in &mu.atoms {
        m.ger(a.w, a.as_vector(), a.as_vector(), 1.0);
    }
    m
}

pub fn isotropy_report(mu: &DiscreteSurfaceMeasure) -> IsotropyReport {
    let m = moment_matrix(mu);
    let mass = mu.mass();
    let level = mass / mu.n as f64;
    let gap = &m - Matrix::identity(mu.n, mu.n) * level;
    let defect = crate::geometry::linalg::sym_spectral_norm(&gap) / level;
    IsotropyReport {
        moment_matrix: m,
        defect,
        mass,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureComparison {
    /// Every aligned weight satisfies `w_K <= w_L + 1e-12`.
    pub dominated: bool,
    /// `min (w_L - w_K)` over the common normals.
    pub epsilon_min: f64,
    pub epsilon_max: f64,
}

/// Weights of `mu_k` and `mu_l` on the union of their normals, with missing
/// atoms padded by zero.
pub fn align(
    mu_k: &DiscreteSurfaceMeasure,
    mu_l: &DiscreteSurfaceMeasure,
) -> (Vec<UnitDirection>, Vec<f64>, Vec<f64>) {
    let mut normals: Vec<UnitDirection> = mu_k.normals();
    let mut wk: Vec<f64> = mu_k.weights();
    let mut wl = vec![0.0; normals.len()];
    for a in &mu_l.atoms {
        match normals.iter().position(|u| u.angle_to(&a.u) <= ALIGN_TOL) {
            Some(k) => wl[k] += a.w,
            None => {
                normals.push(a.u.clone());
                wk.push(0.0);
                wl.push(a.w);
            }
        }
    }
    (normals, wk, wl)
}

pub fn measure_compare(
    mu_k: &DiscreteSurfaceMeasure,
    mu_l: &DiscreteSurfaceMeasure,
) -> MeasureComparison {
    let (_, wk, wl) = align(mu_k, mu_l);
    let gaps: Vec<f64> = wl.iter().zip(&wk).map(|(l, k)| l - k).collect();
    MeasureComparison {
        dominated: gaps.iter().all(|&g| g >= -1e-12),
        epsilon_min: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        epsilon_max: gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random::{random_gl, random_polytope, rng_from_seed};

    #[test]
    fn cube_measure() {
        let mu = surface_measure(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        assert_eq!(mu.len(), 6);
        assert!(mu.atoms().iter().all(|a| (a.w - 4.0).abs() < 1e-12));
        assert!((mu.mass() - 24.0).abs() < 1e-12);
        let sq = surface_measure(&Polytope::cube(2, 1.0).unwrap()).unwrap();
        assert!(sq.atoms().iter().all(|a| (a.w - 2.0).abs() < 1e-12));
    }

    #[test]
    fn cauchy_on_cube_and_square() {
        let mu = surface_measure(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        assert!((projection_volume_cauchy(&mu, &UnitDirection::axis(3, 2)) - 4.0).abs() < 1e-12);
        let sq = surface_measure(&Polytope::cube(2, 1.0).unwrap()).unwrap();
        let d = UnitDirection::from_slice(&[1.0, 1.0]).unwrap();
        assert!((projection_volume_cauchy(&sq, &d) - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mixed_volumes_of_cube() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let mu = surface_measure(&c).unwrap();
        assert!((mixed_volume_n1(&mu, |x| c.support(x)) - 8.0).abs() < 1e-12);
        assert!((mixed_volume_n1(&mu, |x| x.norm()) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn random_measure_is_centered() {
        let p = random_polytope(3, 17).unwrap();
        let mu = surface_measure(&p).unwrap();
        assert!(mu.centering().norm() <= 1e-9 * mu.mass());
    }

    #[test]
    fn isotropy_defects() {
        let mu = surface_measure(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        let r = isotropy_report(&mu);
        assert!(r.defect < 1e-12);
        assert!((r.moment_matrix[(0, 0)] - 8.0).abs() < 1e-12);
        let b = Polytope::box_from_half_widths(&[2.0, 1.0, 0.5]).unwrap();
        let r = isotropy_report(&surface_measure(&b).unwrap());
        assert!(r.defect > 0.3);
        assert!((r.moment_matrix.trace() - r.mass).abs() < 1e-9 * r.mass);
    }

    #[test]
    fn transform_law_matches_direct_measure() {
        let p = random_polytope(3, 5).unwrap();
        let t = random_gl(3, &mut rng_from_seed(9));
        let direct = surface_measure(&p.apply_map(&t).unwrap()).unwrap();
        let moved = surface_measure(&p).unwrap().transformed(&t).unwrap();
        let cmp = measure_compare(&direct, &moved);
        assert!(cmp.epsilon_min.abs() < 1e-9 * direct.mass());
        assert!(cmp.epsilon_max.abs() < 1e-9 * direct.mass());
    }

    #[test]
    fn compare_squares() {
        let k = surface_measure(&Polytope::cube(2, 1.0).unwrap()).unwrap();
        let l = surface_measure(&Polytope::cube(2, 2.0).unwrap()).unwrap();
        let c = measure_compare(&k, &l);
        assert!(c.dominated);
        assert!((c.epsilon_min - 2.0).abs() < 1e-12);
        let same = measure_compare(&k, &k);
        assert!(same.dominated && same.epsilon_min == 0.0 && same.epsilon_max == 0.0);
        assert!(!measure_compare(&l, &k).dominated);
    }

    #[test]
    fn json_round_trip() {
        let mu = surface_measure(&random_polytope(3, 2).unwrap()).unwrap();
        let back = DiscreteSurfaceMeasure::from_json(&mu.to_json().unwrap()).unwrap();
        assert_eq!(back.len(), mu.len());
        let c = measure_compare(&mu, &back);
        assert!(c.epsilon_min == 0.0 && c.epsilon_max == 0.0, "{c:?}");
    }

    #[test]
    fn rejects_bad_atoms() {
        let u = UnitDirection::axis(2, 0);
        assert!(
            DiscreteSurfaceMeasure::from_parts(vec![u.clone(), u.clone()], vec![1.0, 1.0]).is_err()
        );
        assert!(DiscreteSurfaceMeasure::from_parts(vec![u], vec![-1.0]).is_err());
    }

    #[test]
    fn planar_sum_is_minkowski_sum() {
        let a = Polytope::cube(2, 1.0).unwrap();
        let d = Polytope::cross_polytope(2).unwrap();
        let sum_pts: Vec<Vector> = a
            .vertices()
            .iter()
            .flat_map(|v| d.vertices().iter().map(move |w| v + w))
            .collect();
        let sum = Polytope::from_points(&sum_pts).unwrap();
        let direct = surface_measure(&sum).unwrap();
        let added = surface_measure(&a)
            .unwrap()
            .merged_sum(&surface_measure(&d).unwrap())
            .unwrap();
        let c = measure_compare(&direct, &added);
        assert!(c.epsilon_min.abs() < 1e-12 && c.epsilon_max.abs() < 1e-12);
    }
}
