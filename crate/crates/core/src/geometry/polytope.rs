//! Convex polytopes carried in both facet and vertex form.

use fixedbitset::FixedBitSet;

use super::dd::{extreme_rays, Ray};
use super::linalg::{affine_rank, check_dim, rank_of_rows, LinearMap, Matrix, Vector};
use super::sphere::UnitDirection;
use crate::error::{GeomError, Result};

/// Relative tolerance for incidence, duplication and coplanarity tests. Applied
/// after rescaling by the body's circumradius about its vertex centroid.
pub const GEOM_TOL: f64 = 1e-9;

/// Intersection of half-spaces `<normal_i, x> <= offset_i`.
///
/// When the origin is interior the offsets are the support numbers `h_K(u_i)`;
/// sections through affine flats may carry non-positive offsets.
#[derive(Clone, Debug, PartialEq)]
pub struct HPolytope {
    normals: Vec<UnitDirection>,
    offsets: Vec<f64>,
}

impl HPolytope {
    pub fn new(normals: Vec<UnitDirection>, offsets: Vec<f64>) -> Result<Self> {
        if normals.len() != offsets.len() {
            return Err(GeomError::InvalidInput(format!(
                "{} normals but {} offsets",
                normals.len(),
                offsets.len()
            )));
        }
        let n = normals
            .first()
            .map(|u| u.len())
            .ok_or(GeomError::Unbounded)?;
        if let Some(bad) = normals.iter().find(|u| u.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        if offsets.iter().any(|b| !b.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite offset".into()));
        }
        Ok(Self { normals, offsets })
    }

    /// Build from raw (not necessarily unit) normals; offsets rescaled to match.
    pub fn from_raw(normals: &[Vector], offsets: &[f64]) -> Result<Self> {
        let mut us = Vec::with_capacity(normals.len());
        let mut bs = Vec::with_capacity(normals.len());
        for (a, &b) in normals.iter().zip(offsets) {
            let norm = a.norm();
            us.push(UnitDirection::normalize(a.clone())?);
            bs.push(b / norm);
        }
        Self::new(us, bs)
    }

    pub fn dim(&self) -> usize {
        self.normals[0].len()
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn normals(&self) -> &[UnitDirection] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(a, &b)| a.dot(x) <= b + tol)
    }

    /// Largest violation `max_i (<a_i, x> - b_i)`, negative inside.
    pub fn max_violation(&self, x: &Vector) -> f64 {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, &b)| a.dot(x) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Finite point set, all of whose members are extreme.
#[derive(Clone, Debug, PartialEq)]
pub struct VPolytope {
    vertices: Vec<Vector>,
}

impl VPolytope {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let n = vertices
            .first()
            .map(|v| v.len())
            .ok_or_else(|| GeomError::InvalidInput("empty vertex list".into()))?;
        if let Some(bad) = vertices.iter().find(|v| v.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        if vertices.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(GeomError::InvalidInput(
                "non-finite vertex coordinate".into(),
            ));
        }
        Ok(Self { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Vertices of `{x : <a_i,x> <= b_i}` via the homogenized cone
/// `{(x,t) : b_i t - <a_i,x> >= 0, t >= 0}`.
///
/// Returns [`GeomError::EmptySection`] when the set is empty and
/// [`GeomError::Unbounded`] when it is unbounded.
pub fn hrep_to_vrep(h: &HPolytope) -> Result<VPolytope> {
    let raw = hrep_vertices(h)?;
    VPolytope::new(raw.into_iter().map(|(v, _)| v).collect())
}

/// Vertices together with the indices of the inequalities tight at each.
fn hrep_vertices(h: &HPolytope) -> Result<Vec<(Vector, Vec<usize>)>> {
    let n = h.dim();
    let m = h.len();
    let scale = h
        .offsets
        .iter()
        .fold(0.0_f64, |acc, b| acc.max(b.abs()))
        .max(1e-300);
    let scale = if scale < 1e-12 { 1.0 } else { scale };
    let mut rows = Vec::with_capacity(m + 1);
    for (a, &b) in h.normals.iter().zip(&h.offsets) {
        let mut r = Vector::zeros(n + 1);
        for j in 0..n {
            r[j] = -a[j];
        }
        r[n] = b / scale;
        rows.push(r);
    }
    let mut t_row = Vector::zeros(n + 1);
    t_row[n] = 1.0;
    rows.push(t_row);

    let rays: Vec<Ray> = extreme_rays(&rows)?;
    let mut finite = Vec::new();
    let mut at_infinity = false;
    for r in rays {
        let t = r.x[n];
        if t > 1e-11 {
            let x = Vector::from_fn(n, |i, _| r.x[i] / t * scale);
            let tight: Vec<usize> = r.zero.ones().filter(|&i| i < m).collect();
            finite.push((x, tight));
        } else {
            at_infinity = true;
        }
    }
    if finite.is_empty() {
        return Err(GeomError::EmptySection);
    }
    if at_infinity {
        return Err(GeomError::Unbounded);
    }

    // Polish each vertex by least squares on its tight rows.
    let active_rank = |tight: &[usize]| {
        let a = Matrix::from_fn(tight.len(), n, |i, j| h.normals[tight[i]][j]);
        let svd = a.svd(true, true);
        let rank = svd.singular_values.iter().filter(|&&s| s > 1e-8).count();
        (svd, rank)
    };
    let mut polished: Vec<(Vector, Vec<usize>)> = Vec::with_capacity(finite.len());
    let mut degenerate = 0;
    for (x, mut tight) in finite {
        if tight.len() < n {
            polished.push((x, tight));
            continue;
        }
        let (mut svd, mut rank) = active_rank(&tight);
        if rank < n {
            // Merged near-duplicate rays can carry a zero set that is not
            // tight at the ray. Re-derive it; a point whose active set is
            // still rank deficient is not extreme.
            let tol = 1e-9 * scale.max(x.norm());
            tight = (0..m)
                .filter(|&i| (h.normals[i].dot(&x) - h.offsets[i]).abs() <= tol)
                .collect();
            if tight.len() >= n {
                (svd, rank) = active_rank(&tight);
            }
            if tight.len() < n || rank < n {
                degenerate += 1;
                continue;
            }
        }
        let b = Vector::from_fn(tight.len(), |i, _| h.offsets[tight[i]]);
        let x = match svd.solve(&b, 1e-12) {
            Ok(sol) if (&sol - &x).norm() <= 1e-6 * scale.max(x.norm()) => sol,
            _ => x,
        };
        polished.push((x, tight));
    }
    if polished.is_empty() && degenerate > 0 {
        return Err(GeomError::DegenerateFacet(
            "no vertex has an active set of full rank".into(),
        ));
    }

    // Merge numerically coincident vertices.
    let radius = polished
        .iter()
        .fold(0.0_f64, |acc, (x, _)| acc.max(x.norm()))
        .max(scale);
    let tol = GEOM_TOL * radius;
    let points: Vec<Vector> = polished.iter().map(|(x, _)| x.clone()).collect();
    let rep = cluster_points(&points, tol);
    let mut out: Vec<(Vector, Vec<usize>)> = Vec::with_capacity(polished.len());
    let mut slot = vec![usize::MAX; polished.len()];
    for (k, (x, tight)) in polished.into_iter().enumerate() {
        let r = rep[k];
        if slot[r] == usize::MAX {
            slot[r] = out.len();
            out.push((x, tight));
        } else {
            let existing = &mut out[slot[r]];
            for i in tight {
                if !existing.1.contains(&i) {
                    existing.1.push(i);
                }
            }
        }
    }
    Ok(out)
}

/// Irredundant facet description of the convex hull of `v`.
pub fn vrep_to_hrep(v: &VPolytope) -> Result<HPolytope> {
    Ok(hull_facets(v.vertices())?.0)
}

/// Hull facets via the polar: with `c` the centroid, facets of `conv(P)` are the
/// vertices of `{y : <p - c, y> <= 1}`.
fn hull_facets(points: &[Vector]) -> Result<(HPolytope, f64)> {
    let n = points[0].len();
    let centroid = centroid(points);
    let radius = points
        .iter()
        .map(|p| (p - &centroid).norm())
        .fold(0.0_f64, f64::max);
    if radius <= 0.0 {
        return Err(GeomError::LowerDimensional { rank: 0, dim: n });
    }
    let scaled: Vec<Vector> = points.iter().map(|p| (p - &centroid) / radius).collect();
    let rank = affine_rank(&scaled, 1e-9);
    if rank < n {
        return Err(GeomError::LowerDimensional { rank, dim: n });
    }
    let mut normals = Vec::new();
    let mut offsets = Vec::new();
    let mut source = Vec::new();
    for (k, q) in scaled.iter().enumerate() {
        let norm = q.norm();
        if norm > 1e-12 {
            normals.push(UnitDirection::normalize(q.clone())?);
            offsets.push(1.0 / norm);
            source.push(k);
        }
    }
    let polar = HPolytope::new(normals, offsets)?;
    let polar_vertices = match hrep_vertices(&polar) {
        Ok(v) => v,
        Err(GeomError::Unbounded) | Err(GeomError::EmptySection) => {
            return Err(GeomError::LowerDimensional {
                rank: n - 1,
                dim: n,
            })
        }
        Err(e) => return Err(e),
    };
    let mut facet_normals: Vec<UnitDirection> = Vec::with_capacity(polar_vertices.len());
    let mut facet_offsets: Vec<f64> = Vec::with_capacity(polar_vertices.len());
    for (y, tight) in polar_vertices {
        let on: Vec<&Vector> = tight.iter().map(|&i| &scaled[source[i]]).collect();
        let y = fit_plane(&on, &y).unwrap_or(y);
        let norm = y.norm();
        let u = UnitDirection::normalize(y)?;
        let b = radius / norm + u.dot(&centroid);
        if let Some(k) = facet_normals
            .iter()
            .position(|w| w.angle_to(&u) <= GEOM_TOL)
        {
            facet_offsets[k] = facet_offsets[k].max(b);
            continue;
        }
        facet_normals.push(u);
        facet_offsets.push(b);
    }
    Ok((HPolytope::new(facet_normals, facet_offsets)?, radius))
}

/// Least-squares plane `<y, x> = 1` through the points a polar vertex `y` is
/// tight on. The raw vertex carries the rounding of the whole insertion
/// sequence, enough to push a facet vertex outside the incidence tolerance.
fn fit_plane(on: &[&Vector], y: &Vector) -> Option<Vector> {
    let n = y.len();
    if on.len() < n {
        return None;
    }
    let a = Matrix::from_fn(on.len(), n, |i, j| on[i][j]);
    let svd = a.svd(true, true);
    if svd.singular_values.iter().filter(|&&s| s > 1e-8).count() < n {
        return None;
    }
    let fit = svd
        .solve(&Vector::from_element(on.len(), 1.0), 1e-12)
        .ok()?;
    ((&fit - y).norm() <= 1e-6 * y.norm()).then_some(fit)
}

pub fn centroid(points: &[Vector]) -> Vector {
    let n = points[0].len();
    let mut c = Vector::zeros(n);
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// A full-dimensional convex polytope with consistent H- and V-representations.
#[derive(Clone, Debug)]
pub struct Polytope {
    h: HPolytope,
    v: VPolytope,
    symmetric: bool,
    /// `incidence[i]` holds the vertices on facet `i`.
    incidence: Vec<FixedBitSet>,
    scale: f64,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.h == other.h && self.v == other.v
    }
}

impl Polytope {
    /// Canonical polytope from a facet description. Redundant inequalities and
    /// duplicated normals are removed.
    pub fn from_hrep(h: &HPolytope) -> Result<Self> {
        let n = h.dim();
        check_dim(n)?;
        // merge duplicate normals, keeping the tighter offset
        let mut normals: Vec<UnitDirection> = Vec::with_capacity(h.len());
        let mut offsets: Vec<f64> = Vec::with_capacity(h.len());
        for (u, &b) in h.normals.iter().zip(&h.offsets) {
            if let Some(k) = normals.iter().position(|w| w.angle_to(u) <= GEOM_TOL) {
                offsets[k] = offsets[k].min(b);
            } else {
                normals.push(u.clone());
                offsets.push(b);
            }
        }
        let merged = HPolytope::new(normals, offsets)?;
        let raw = hrep_vertices(&merged)?;
        let vertices: Vec<Vector> = raw.into_iter().map(|(v, _)| v).collect();
        Self::assemble(merged, vertices)
    }

    /// Convex hull of a point cloud. Non-extreme and repeated points are dropped.
    pub fn from_points(points: &[Vector]) -> Result<Self> {
        let n = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| GeomError::InvalidInput("empty point set".into()))?;
        check_dim(n)?;
        if let Some(bad) = points.iter().find(|p| p.len() != n) {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        let (h, _) = hull_facets(points)?;
        Self::assemble(h, points.to_vec())
    }

    pub fn from_vrep(v: &VPolytope) -> Result<Self> {
        Self::from_points(v.vertices())
    }

    /// Keep only extreme candidate points and irredundant facets, then index
    /// the vertex–facet incidence.
    fn assemble(h: HPolytope, candidates: Vec<Vector>) -> Result<Self> {
        let n = h.dim();
        let c = centroid(&candidates);
        let scale = candidates
            .iter()
            .map(|p| (p - &c).norm())
            .fold(0.0_f64, f64::max);
        if scale <= 0.0 {
            return Err(GeomError::NotFullDimensional);
        }
        let tol = GEOM_TOL * scale.max(c.norm());

        let rep = cluster_points(&candidates, tol);
        let pts: Vec<Vector> = candidates
            .into_iter()
            .enumerate()
            .filter(|(k, _)| rep[*k] == *k)
            .map(|(_, p)| p)
            .collect();
        let tight_of = |p: &Vector| -> Vec<usize> {
            (0..h.len())
                .filter(|&i| (h.normals[i].dot(p) - h.offsets[i]).abs() <= tol)
                .collect()
        };
        let mut vertices = Vec::new();
        for p in pts {
            let tight = tight_of(&p);
            if tight.len() < n {
                continue;
            }
            let rows: Vec<Vector> = tight
                .iter()
                .map(|&i| h.normals[i].as_vector().clone())
                .collect();
            if rank_of_rows(&rows, 1e-9) == n {
                vertices.push(p);
            }
        }
        if affine_rank(&vertices, 1e-9 * scale) < n {
            return Err(GeomError::NotFullDimensional);
        }

        let mut normals = Vec::new();
        let mut offsets = Vec::new();
        let mut incidence = Vec::new();
        for i in 0..h.len() {
            let on: Vec<usize> = (0..vertices.len())
                .filter(|&k| (h.normals[i].dot(&vertices[k]) - h.offsets[i]).abs() <= tol)
                .collect();
            if on.len() < n {
                continue;
            }
            let pts: Vec<Vector> = on.iter().map(|&k| vertices[k].clone()).collect();
            if affine_rank(&pts, 1e-9 * scale) < n - 1 {
                continue;
            }
            let mut bits = FixedBitSet::with_capacity(vertices.len());
            for k in on {
                bits.insert(k);
            }
            // a repeated facet (numerically distinct normal) has a nested vertex set
            if incidence.iter().any(|f: &FixedBitSet| bits.is_subset(f)) {
                continue;
            }
            let mut k = 0;
            while k < incidence.len() {
                if incidence[k].is_subset(&bits) {
                    normals.remove(k);
                    offsets.remove(k);
                    incidence.remove(k);
                } else {
                    k += 1;
                }
            }
            normals.push(h.normals[i].clone());
            offsets.push(h.offsets[i]);
            incidence.push(bits);
        }
        let symmetric = is_centrally_symmetric(&vertices, tol);
        Ok(Self {
            h: HPolytope::new(normals, offsets)?,
            v: VPolytope::new(vertices)?,
            symmetric,
            incidence,
            scale,
        })
    }

    /// `prod [-a_i, a_i]`.
    pub fn box_from_half_widths(half: &[f64]) -> Result<Self> {
        let n = half.len();
        check_dim(n)?;
        if half.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(GeomError::InvalidInput(
                "box half widths must be positive".into(),
            ));
        }
        let mut normals = Vec::with_capacity(2 * n);
        let mut offsets = Vec::with_capacity(2 * n);
        for (i, &a) in half.iter().enumerate() {
            normals.push(UnitDirection::axis(n, i));
            offsets.push(a);
            normals.push(UnitDirection::axis(n, i).neg());
            offsets.push(a);
        }
        Self::from_hrep(&HPolytope::new(normals, offsets)?)
    }

    /// `[-a, a]^n`.
    pub fn cube(n: usize, a: f64) -> Result<Self> {
        Self::box_from_half_widths(&vec![a; n])
    }

    /// `conv{±e_i}`.
    pub fn cross_polytope(n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut pts = Vec::with_capacity(2 * n);
        for i in 0..n {
            let e = UnitDirection::axis(n, i).into_vector();
            pts.push(-&e);
            pts.push(e);
        }
        Self::from_points(&pts)
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn hrep(&self) -> &HPolytope {
        &self.h
    }

    pub fn vrep(&self) -> &VPolytope {
        &self.v
    }

    pub fn vertices(&self) -> &[Vector] {
        self.v.vertices()
    }

    pub fn normals(&self) -> &[UnitDirection] {
        self.h.normals()
    }

    pub fn offsets(&self) -> &[f64] {
        self.h.offsets()
    }

    pub fn num_facets(&self) -> usize {
        self.h.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.v.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn incidence(&self) -> &[FixedBitSet] {
        &self.incidence
    }

    /// Circumradius about the vertex centroid; the internal length scale.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tolerance(&self) -> f64 {
        GEOM_TOL * self.scale.max(self.vertex_centroid().norm())
    }

    pub fn vertex_centroid(&self) -> Vector {
        centroid(self.vertices())
    }

    pub fn facet_vertices(&self, i: usize) -> impl Iterator<Item = &Vector> + '_ {
        self.incidence[i].ones().map(move |k| &self.v.vertices()[k])
    }

    /// `h_P(x) = max_v <v, x>`.
    pub fn support(&self, x: &Vector) -> f64 {
        self.vertices()
            .iter()
            .map(|v| v.dot(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.h.contains(x, tol)
    }

    pub fn origin_is_interior(&self) -> bool {
        let tol = self.tolerance();
        self.offsets().iter().all(|&b| b > tol)
    }

    /// Largest facet violation of any vertex; the H/V consistency defect.
    pub fn consistency_defect(&self) -> f64 {
        self.vertices()
            .iter()
            .map(|v| self.h.max_violation(v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Image under an invertible linear map. Vertices map by `T`, normals by
    /// `T^{-T}` (renormalized) and offsets by the same normalization factor.
    pub fn apply_map(&self, t: &LinearMap) -> Result<Self> {
        if t.dim() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found: t.dim(),
            });
        }
        if t.det().abs() < 1e-12 {
            return Err(GeomError::Singular(t.det()));
        }
        let inv_t = t.inverse_transpose()?;
        let vertices: Vec<Vector> = self.vertices().iter().map(|v| t.apply(v)).collect();
        let mut normals = Vec::with_capacity(self.num_facets());
        let mut offsets = Vec::with_capacity(self.num_facets());
        for (u, &b) in self.normals().iter().zip(self.offsets()) {
            let w = inv_t.apply(u);
            let norm = w.norm();
            normals.push(UnitDirection::normalize(w)?);
            offsets.push(b / norm);
        }
        let c = centroid(&vertices);
        let scale = vertices
            .iter()
            .map(|p| (p - &c).norm())
            .fold(0.0_f64, f64::max);
        Ok(Self {
            h: HPolytope::new(normals, offsets)?,
            symmetric: self.symmetric,
            v: VPolytope::new(vertices)?,
            incidence: self.incidence.clone(),
            scale,
        })
    }

    /// `s P` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(GeomError::InvalidInput(
                "scale factor must be positive".into(),
            ));
        }
        self.apply_map(&LinearMap::new(
            Matrix::identity(self.dim(), self.dim()) * s,
        )?)
    }

    /// `P + x`.
    pub fn translated(&self, x: &Vector) -> Result<Self> {
        let vertices: Vec<Vector> = self.vertices().iter().map(|v| v + x).collect();
        let offsets: Vec<f64> = self
            .normals()
            .iter()
            .zip(self.offsets())
            .map(|(u, &b)| b + u.dot(x))
            .collect();
        let symmetric = is_centrally_symmetric(&vertices, self.tolerance());
        Ok(Self {
            h: HPolytope::new(self.normals().to_vec(), offsets)?,
            v: VPolytope::new(vertices)?,
            symmetric,
            incidence: self.incidence.clone(),
            scale: self.scale,
        })
    }
}

fn is_centrally_symmetric(vertices: &[Vector], tol: f64) -> bool {
    let tol = 10.0 * tol;
    let mut order: Vec<usize> = (0..vertices.len()).collect();
    order.sort_by(|&a, &b| vertices[a][0].total_cmp(&vertices[b][0]));
    let keys: Vec<f64> = order.iter().map(|&k| vertices[k][0]).collect();
    vertices.iter().all(|v| {
        let target = -v[0];
        let start = keys.partition_point(|&x| x < target - tol);
        keys[start..]
            .iter()
            .take_while(|&&x| x <= target + tol)
            .zip(&order[start..])
            .any(|(_, &k)| sq_dist_neg(v, &vertices[k]) <= tol * tol)
    })
}

/// `|v + w|^2` without allocating.
fn sq_dist_neg(v: &Vector, w: &Vector) -> f64 {
    v.iter().zip(w.iter()).map(|(a, b)| (a + b) * (a + b)).sum()
}

/// Map each point to the index of the first point within `tol` of it
/// (sweep over the first coordinate).
pub(crate) fn cluster_points(points: &[Vector], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    let mut rep: Vec<usize> = (0..points.len()).collect();
    let mut reps: Vec<usize> = Vec::new();
    for &i in &order {
        let x0 = points[i][0];
        let found = reps
            .iter()
            .rev()
            .take_while(|&&r| points[r][0] >= x0 - tol)
            .find(|&&r| {
                points[r]
                    .iter()
                    .zip(points[i].iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    <= tol * tol
            })
            .copied();
        match found {
            Some(r) => rep[i] = r,
            None => reps.push(i),
        }
    }
    // representatives are the lowest index of their cluster
    let mut lowest = rep.clone();
    for i in 0..points.len() {
        let r = rep[i];
        lowest[r] = lowest[r].min(i);
    }
    (0..points.len()).map(|i| lowest[rep[i]]).collect()
}

/// Max over vertices of either polytope of the distance to the nearest vertex
/// of the other. Zero iff the vertex sets agree; bounds the Hausdorff distance.
pub fn vertex_set_distance(a: &Polytope, b: &Polytope) -> f64 {
    let one_way = |p: &Polytope, q: &Polytope| {
        p.vertices()
            .iter()
            .map(|v| {
                q.vertices()
                    .iter()
                    .map(|w| (v - w).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Max over facets of either polytope of the support-number mismatch in that
/// facet's normal direction. Zero iff the polytopes coincide.
pub fn facet_distance(a: &Polytope, b: &Polytope) -> f64 {
    let one_way = |p: &Polytope, q: &Polytope| {
        p.normals()
            .iter()
            .zip(p.offsets())
            .map(|(u, &h)| (q.support(u) - h).abs())
            .fold(0.0_f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_column_slice(x)
    }

    #[test]
    fn cube_from_hrep_has_eight_vertices() {
        let c = Polytope::cube(3, 1.0).unwrap();
        assert_eq!(c.num_vertices(), 8);
        assert_eq!(c.num_facets(), 6);
        for p in c.vertices() {
            assert!(p.iter().all(|x| (x.abs() - 1.0).abs() < 1e-12));
        }
        assert!(c.is_symmetric());
        for i in 0..6 {
            assert_eq!(c.incidence()[i].count_ones(..), 4);
        }
    }

    #[test]
    fn cross_polytope_facets() {
        let x = Polytope::cross_polytope(3).unwrap();
        assert_eq!(x.num_vertices(), 6);
        assert_eq!(x.num_facets(), 8);
        let s = 1.0 / 3f64.sqrt();
        for (u, &b) in x.normals().iter().zip(x.offsets()) {
            assert!((b - s).abs() < 1e-12);
            assert!(u.iter().all(|c| (c.abs() - s).abs() < 1e-12));
        }
    }

    #[test]
    fn cross_polytope_from_hrep() {
        let n = 3;
        let mut normals = Vec::new();
        for mask in 0..(1 << n) {
            let coords: Vec<f64> = (0..n)
                .map(|i| if mask & (1 << i) != 0 { 1.0 } else { -1.0 })
                .collect();
            normals.push(UnitDirection::from_slice(&coords).unwrap());
        }
        let h = HPolytope::new(normals, vec![1.0 / (n as f64).sqrt(); 1 << n]).unwrap();
        let vr = hrep_to_vrep(&h).unwrap();
        assert_eq!(vr.len(), 2 * n);
        for p in vr.vertices() {
            let mut a: Vec<f64> = p.iter().map(|x| x.abs()).collect();
            a.sort_by(|x, y| y.partial_cmp(x).unwrap());
            assert!((a[0] - 1.0).abs() < 1e-12);
            assert!(a[1..].iter().all(|x| *x < 1e-12));
        }
    }

    #[test]
    fn redundant_inequalities_are_dropped() {
        let mut normals: Vec<UnitDirection> = Polytope::cube(2, 1.0).unwrap().normals().to_vec();
        let mut offsets = vec![1.0; 4];
        normals.push(UnitDirection::from_slice(&[1.0, 1.0]).unwrap());
        offsets.push(5.0);
        normals.push(UnitDirection::from_slice(&[1.0, 0.0]).unwrap());
        offsets.push(3.0);
        let p = Polytope::from_hrep(&HPolytope::new(normals, offsets).unwrap()).unwrap();
        assert_eq!(p.num_facets(), 4);
        assert_eq!(p.num_vertices(), 4);
    }

    #[test]
    fn interior_points_dropped_from_hull() {
        let pts = vec![
            v(&[1.0, 1.0]),
            v(&[-1.0, 1.0]),
            v(&[1.0, -1.0]),
            v(&[-1.0, -1.0]),
            v(&[0.2, 0.1]),
            v(&[1.0, 0.0]),
        ];
        let p = Polytope::from_points(&pts).unwrap();
        assert_eq!(p.num_vertices(), 4);
        assert_eq!(p.num_facets(), 4);
    }

    #[test]
    fn unbounded_and_empty_detected() {
        let h = HPolytope::from_raw(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])], &[1.0, 1.0]).unwrap();
        assert!(matches!(hrep_to_vrep(&h), Err(GeomError::Unbounded)));
        let h = HPolytope::from_raw(
            &[
                v(&[1.0, 0.0]),
                v(&[-1.0, 0.0]),
                v(&[0.0, 1.0]),
                v(&[0.0, -1.0]),
            ],
            &[-1.0, -1.0, 1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(hrep_to_vrep(&h), Err(GeomError::EmptySection)));
    }

    #[test]
    fn lower_dimensional_points_rejected() {
        let pts = vec![
            v(&[0.0, 0.0, 0.0]),
            v(&[1.0, 0.0, 0.0]),
            v(&[0.0, 1.0, 0.0]),
            v(&[1.0, 1.0, 0.0]),
        ];
        assert!(matches!(
            vrep_to_hrep(&VPolytope::new(pts).unwrap()),
            Err(GeomError::LowerDimensional { rank: 2, dim: 3 })
        ));
    }

    #[test]
    fn box_map_and_identity() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let same = c.apply_map(&LinearMap::identity(3)).unwrap();
        assert_eq!(same, c);
        let t = LinearMap::diagonal(&[2.0, 1.0, 0.5]).unwrap();
        let b = c.apply_map(&t).unwrap();
        assert!((b.support(&v(&[1.0, 0.0, 0.0])) - 2.0).abs() < 1e-12);
        assert!((b.support(&v(&[0.0, 0.0, 1.0])) - 0.5).abs() < 1e-12);
        assert!(b.consistency_defect() <= 1e-12);
    }

    #[test]
    fn singular_map_rejected() {
        let c = Polytope::cube(2, 1.0).unwrap();
        let t = LinearMap::diagonal(&[1.0, 1e-14]).unwrap();
        assert!(matches!(c.apply_map(&t), Err(GeomError::Singular(_))));
    }

    #[test]
    fn hull_keeps_facets_of_noisy_polar_vertices() {
        // one facet of this body came out 1.2e-9 off its fifth vertex
        let p = crate::geometry::random::random_polytope(5, 20_241_105).unwrap();
        let back = Polytope::from_hrep(p.hrep()).unwrap();
        assert_eq!(back.num_vertices(), p.num_vertices());
        assert_eq!(back.num_facets(), p.num_facets());
    }

    #[test]
    fn from_hrep_skips_rays_with_stale_zero_sets() {
        let p = crate::geometry::random::random_polytope(5, 442).unwrap();
        let back = Polytope::from_hrep(p.hrep()).unwrap();
        assert_eq!(back.num_vertices(), p.num_vertices());
    }
}
