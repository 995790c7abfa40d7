//! Exact volumes, sections and projections of polytopes, and Monte-Carlo
//! estimates for bodies given by oracles.

use rand::Rng;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geometry::bodies::unit_volume_ball_radius;
use crate::geometry::faces::facet_areas_and_volume;
use crate::geometry::linalg::{orthogonal_complement, orthonormal_basis};
use crate::geometry::random::{ball_point, chunked_sum, split_seed};
use crate::geometry::sphere::random_direction;
use crate::geometry::{ball_volume, HPolytope, Polytope, UnitDirection, Vector};

/// An affine flat `offset + span(basis)` with orthonormal basis and offset
/// orthogonal to the basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Flat {
    n: usize,
    basis: Vec<Vector>,
    offset: Vector,
}

impl Flat {
    /// Validates orthonormality and orthogonality of the offset within `1e-12`.
    pub fn new(basis: Vec<Vector>, offset: Vector) -> Result<Self> {
        let n = offset.len();
        if basis.is_empty() || basis.len() > n {
            return Err(GeomError::InvalidInput(
                "flat dimension out of range".into(),
            ));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    found: b.len(),
                });
            }
            for (j, c) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (b.dot(c) - target).abs() > 1e-12 {
                    return Err(GeomError::InvalidInput(
                        "flat basis is not orthonormal".into(),
                    ));
                }
            }
            if b.dot(&offset).abs() > 1e-12 * offset.norm().max(1.0) {
                return Err(GeomError::InvalidInput(
                    "flat offset is not orthogonal to the basis".into(),
                ));
            }
        }
        Ok(Self { n, basis, offset })
    }

    /// Span of `vectors` (orthonormalized) translated by the component of
    /// `through` orthogonal to it.
    pub fn spanned(vectors: &[Vector], through: Option<&Vector>) -> Result<Self> {
        let n = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| GeomError::InvalidInput("flat needs a spanning vector".into()))?;
        let basis = orthonormal_basis(vectors, 1e-10);
        let mut offset = through.cloned().unwrap_or_else(|| Vector::zeros(n));
        for _ in 0..2 {
            for b in &basis {
                let c = offset.dot(b);
                offset.axpy(-c, b, 1.0);
            }
        }
        Self::new(basis, offset)
    }

    /// `u^perp + t u`.
    pub fn hyperplane(u: &UnitDirection, t: f64) -> Result<Self> {
        let n = u.len();
        let basis = orthogonal_complement(&[u.as_vector().clone()], n);
        Self::new(basis, u.as_vector() * t)
    }

    /// `span(e_i : i in axes)`.
    pub fn coordinate(n: usize, axes: &[usize]) -> Result<Self> {
        let vectors: Vec<Vector> = axes
            .iter()
            .map(|&i| UnitDirection::axis(n, i).into_vector())
            .collect();
        Self::spanned(&vectors, None)
    }

    /// Linear flat orthogonal to this one.
    pub fn complement(&self) -> Result<Self> {
        let basis = orthogonal_complement(&self.basis, self.n);
        Self::new(basis, Vector::zeros(self.n))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn is_linear(&self) -> bool {
        self.offset.norm() == 0.0
    }

    /// Coordinates of the orthogonal projection of `x` in the flat's basis.
    pub fn coords(&self, x: &Vector) -> Vector {
        Vector::from_iterator(self.dim(), self.basis.iter().map(|b| b.dot(x)))
    }

    /// Ambient point with flat coordinates `y`.
    pub fn lift(&self, y: &Vector) -> Vector {
        let mut x = self.offset.clone();
        for (b, &c) in self.basis.iter().zip(y.iter()) {
            x.axpy(c, b, 1.0);
        }
        x
    }
}

/// A convex body living in the coordinates of a flat: an interval when the
/// flat is a line, a polytope otherwise.
#[derive(Clone, Debug)]
pub enum FlatBody {
    Interval { lo: f64, hi: f64 },
    Polytope(Polytope),
}

impl FlatBody {
    pub fn dim(&self) -> usize {
        match self {
            Self::Interval { .. } => 1,
            Self::Polytope(p) => p.dim(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Self::Interval { lo, hi } => hi - lo,
            Self::Polytope(p) => volume_exact(p),
        }
    }

    pub fn as_polytope(&self) -> Option<&Polytope> {
        match self {
            Self::Polytope(p) => Some(p),
            Self::Interval { .. } => None,
        }
    }

    /// Points of the body in its own coordinates (interval endpoints or vertices).
    pub fn points(&self) -> Vec<Vector> {
        match self {
            Self::Interval { lo, hi } => {
                vec![Vector::from_element(1, *lo), Vector::from_element(1, *hi)]
            }
            Self::Polytope(p) => p.vertices().to_vec(),
        }
    }
}

/// Hausdorff distance between the extreme point sets of two bodies of the
/// same dimension.
pub fn flat_body_distance(a: &FlatBody, b: &FlatBody) -> f64 {
    let (pa, pb) = (a.points(), b.points());
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    let one_way = |x: &[Vector], y: &[Vector]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
    };
    one_way(&pa, &pb).max(one_way(&pb, &pa))
}

/// Exact volume by the facet-pyramid recursion.
pub fn volume_exact(p: &Polytope) -> f64 {
    facet_areas_and_volume(p).1
}

/// `P ∩ F` in the flat's coordinates.
pub fn section(p: &Polytope, f: &Flat) -> Result<FlatBody> {
    if f.ambient_dim() != p.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: p.dim(),
            found: f.ambient_dim(),
        });
    }
    let tol = p.tolerance();
    let k = f.dim();
    let mut rows = Vec::with_capacity(p.num_facets());
    let mut rhs = Vec::with_capacity(p.num_facets());
    for (a, &b) in p.normals().iter().zip(p.offsets()) {
        let r = f.coords(a);
        let c = b - a.dot(f.offset());
        if r.norm() <= 1e-12 {
            if c < -tol {
                return Err(GeomError::EmptySection);
            }
            continue;
        }
        rows.push(r);
        rhs.push(c);
    }
    if k == 1 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (r, &c) in rows.iter().zip(&rhs) {
            if r[0] > 0.0 {
                hi = hi.min(c / r[0]);
            } else {
                lo = lo.max(c / r[0]);
            }
        }
        if !(hi - lo > tol) {
            return Err(GeomError::EmptySection);
        }
        return Ok(FlatBody::Interval { lo, hi });
    }
    let h = HPolytope::from_raw(&rows, &rhs)?;
    match Polytope::from_hrep(&h) {
        Ok(q) => Ok(FlatBody::Polytope(q)),
        Err(GeomError::NotFullDimensional)
        | Err(GeomError::LowerDimensional { .. })
        | Err(GeomError::DegenerateFacet(_)) => Err(GeomError::EmptySection),
        Err(e) => Err(e),
    }
}

/// Orthogonal projection `P|H` in the coordinates of the linear flat `H`.
pub fn project(p: &Polytope, h: &Flat) -> Result<FlatBody> {
    if !h.is_linear() {
        return Err(GeomError::InvalidInput(
            "projection needs a linear subspace".into(),
        ));
    }
    let pts: Vec<Vector> = p.vertices().iter().map(|v| h.coords(v)).collect();
    if h.dim() == 1 {
        let lo = pts.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|x| x[0]).fold(f64::NEG_INFINITY, f64::max);
        return Ok(FlatBody::Interval { lo, hi });
    }
    Ok(FlatBody::Polytope(Polytope::from_points(&pts)?))
}

/// `|P ∩ u^perp|`.
pub fn section_volume(p: &Polytope, u: &UnitDirection) -> Result<f64> {
    Ok(section(p, &Flat::hyperplane(u, 0.0)?)?.volume())
}

/// `|P | u^perp|`.
pub fn projection_volume(p: &Polytope, u: &UnitDirection) -> Result<f64> {
    Ok(project(p, &Flat::hyperplane(u, 0.0)?)?.volume())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MCEstimate {
    fn from_fraction(hits: f64, samples: usize, seed: u64, scale: f64) -> Self {
        let p = hits / samples as f64;
        Self {
            value: scale * p,
            std_error: scale * (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    pub fn exact(value: f64, samples: usize, seed: u64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples,
            seed,
        }
    }
}

/// Hit fraction of uniform samples in the box `prod [lo_i, hi_i]`, times
/// the box volume.
pub fn mc_volume(
    contains: impl Fn(&Vector) -> bool + Sync,
    lo: &[f64],
    hi: &[f64],
    samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    if lo.len() != hi.len() {
        return Err(GeomError::DimensionMismatch {
            expected: lo.len(),
            found: hi.len(),
        });
    }
    if samples < 1000 {
        return Err(GeomError::InvalidInput(
            "Monte Carlo needs at least 1000 samples".into(),
        ));
    }
    if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
        return Err(GeomError::InvalidInput("empty bounding box".into()));
    }
    let n = lo.len();
    let box_volume: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let hits = chunked_sum(samples, seed, |rng, len| {
        let mut x = Vector::zeros(n);
        let mut count = 0usize;
        for _ in 0..len {
            for i in 0..n {
                x[i] = rng.random_range(lo[i]..hi[i]);
            }
            if contains(&x) {
                count += 1;
            }
        }
        count as f64
    });
    Ok(MCEstimate::from_fraction(hits, samples, seed, box_volume))
}

/// `|D_n ∩ s B_inf^n|` by uniform sampling in `D_n`.
pub fn ball_cube_volume(n: usize, s: f64, samples: usize, seed: u64) -> Result<MCEstimate> {
    crate::geometry::linalg::check_dim(n)?;
    if !(s > 0.0) {
        return Err(GeomError::InvalidInput(
            "cube half width must be positive".into(),
        ));
    }
    let r = unit_volume_ball_radius(n);
    if s >= r {
        return Ok(MCEstimate::exact(1.0, samples, seed));
    }
    let hits = chunked_sum(samples, seed, |rng, len| {
        let mut count = 0usize;
        for _ in 0..len {
            if ball_point(n, r, rng).amax() <= s {
                count += 1;
            }
        }
        count as f64
    });
    Ok(MCEstimate::from_fraction(hits, samples, seed, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct S0Estimate {
    pub s0: f64,
    /// Final bisection bracket; the volume at `lo` is below one half and at `hi` above.
    pub lo: f64,
    pub hi: f64,
    pub volume: MCEstimate,
    pub iterations: usize,
}

pub const S0_MAX_ITER: usize = 60;

/// Bisection for `|D_n ∩ s B_inf^n| = 1/2`. Every evaluation reuses the same
/// sample stream, so the estimated volume is monotone in `s`.
pub fn find_s0(n: usize, vol_tol: f64, samples: usize, seed: u64) -> Result<S0Estimate> {
    crate::geometry::linalg::check_dim(n)?;
    let (mut lo, mut hi) = (0.0, unit_volume_ball_radius(n));
    for it in 1..=S0_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let v = ball_cube_volume(n, mid, samples, seed)?;
        if (v.value - 0.5).abs() <= vol_tol {
            return Ok(S0Estimate {
                s0: mid,
                lo,
                hi,
                volume: v,
                iterations: it,
            });
        }
        if v.value < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(GeomError::NoConvergence {
        what: "s0 bisection",
        iterations: S0_MAX_ITER,
    })
}

/// `S(D_n ∩ s B_inf^n)`: the spherical part from uniform sphere points, the
/// flat part from uniform points on one cube facet (all `2n` are congruent).
pub fn ball_cube_surface_area(n: usize, s: f64, samples: usize, seed: u64) -> Result<MCEstimate> {
    crate::geometry::linalg::check_dim(n)?;
    if !(s > 0.0) {
        return Err(GeomError::InvalidInput(
            "cube half width must be positive".into(),
        ));
    }
    let r = unit_volume_ball_radius(n);
    let sphere = n as f64 * ball_volume(n) * r.powi(n as i32 - 1);
    if s >= r {
        return Ok(MCEstimate::exact(sphere, samples, seed));
    }
    let on_sphere = chunked_sum(samples, split_seed(seed, 0), |rng, len| {
        let mut count = 0usize;
        for _ in 0..len {
            if r * random_direction(n, rng).amax() <= s {
                count += 1;
            }
        }
        count as f64
    });
    let on_facet = chunked_sum(samples, split_seed(seed, 1), |rng, len| {
        let mut count = 0usize;
        for _ in 0..len {
            let mut sq = s * s;
            for _ in 1..n {
                let y: f64 = rng.random_range(-s..s);
                sq += y * y;
            }
            if sq <= r * r {
                count += 1;
            }
        }
        count as f64
    });
    let facets = 2.0 * n as f64 * (2.0 * s).powi(n as i32 - 1);
    let a = MCEstimate::from_fraction(on_sphere, samples, seed, sphere);
    let b = MCEstimate::from_fraction(on_facet, samples, seed, facets);
    Ok(MCEstimate {
        value: a.value + b.value,
        std_error: a.std_error.hypot(b.std_error),
        samples,
        seed,
    })
}

/// Five-point Gauss–Legendre nodes and weights on `[-1, 1]`.
const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Composite Gauss–Legendre rule for `f` on `[a, b]`.
pub fn integrate_1d(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for &(x, w) in &GAUSS5 {
            acc += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * acc
}

const FIBER_PANELS: usize = 48;

/// `(n-k)`-volume of the fiber `P ∩ (H^perp + x)`, zero when empty.
fn fiber_volume(p: &Polytope, h_perp: &[Vector], x: &Vector) -> Result<f64> {
    let flat = Flat::new(h_perp.to_vec(), x.clone())?;
    match section(p, &flat) {
        Ok(body) => Ok(body.volume()),
        Err(GeomError::EmptySection) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// `int_{K|u} |K ∩ (u^perp + t u)| dt`, which equals `|K|`.
pub fn fiber_integral(p: &Polytope, u: &UnitDirection) -> Result<f64> {
    let h_perp = orthogonal_complement(&[u.as_vector().clone()], p.dim());
    let lo = -p.support(&-u.as_vector());
    let hi = p.support(u);
    let mut err = None;
    let v = integrate_1d(
        |t| match fiber_volume(p, &h_perp, &(u.as_vector() * t)) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        FIBER_PANELS,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FubiniReport {
    /// Distance between `(K ∩ F)|H` and `(K|H) ∩ G`.
    pub hausdorff: f64,
    /// `|K ∩ F|`.
    pub lhs: f64,
    /// Quadrature of `x -> |K ∩ (H^perp + x)|` over `(K|H) ∩ G`.
    pub rhs: f64,
    pub pass: bool,
}

pub const FUBINI_SET_TOL: f64 = 1e-8;
pub const FUBINI_VOLUME_TOL: f64 = 0.01;

/// Checks `(K ∩ F)|H = (K|H) ∩ G` with `F = span(G ∪ H^perp)` and the fiber
/// decomposition of `|K ∩ F|`. `G` must be a line inside the linear flat `H`.
pub fn fubini_check(p: &Polytope, h: &Flat, g: &Flat) -> Result<FubiniReport> {
    let n = p.dim();
    if !h.is_linear() || !g.is_linear() {
        return Err(GeomError::InvalidInput(
            "H and G must be linear subspaces".into(),
        ));
    }
    if g.dim() != 1 || h.dim() < 2 || h.dim() >= n {
        return Err(GeomError::InvalidInput(
            "fubini check needs a line G inside a proper subspace H of dimension >= 2".into(),
        ));
    }
    let gdir = &g.basis()[0];
    if (h.coords(gdir).norm() - 1.0).abs() > 1e-10 {
        return Err(GeomError::InvalidInput("G is not contained in H".into()));
    }
    let h_perp = orthogonal_complement(h.basis(), n);
    let mut span = g.basis().to_vec();
    span.extend(h_perp.iter().cloned());
    let f = Flat::spanned(&span, None)?;

    // (K ∩ F)|H, expressed in G's coordinate
    let cut = section(p, &f)?;
    let lifted: Vec<Vector> = cut.points().iter().map(|y| f.lift(y)).collect();
    let left = {
        let t: Vec<f64> = lifted.iter().map(|x| x.dot(gdir)).collect();
        FlatBody::Interval {
            lo: t.iter().copied().fold(f64::INFINITY, f64::min),
            hi: t.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    };
    // (K|H) ∩ G, with G written in H's coordinates
    let shadow = project(p, h)?;
    let right = match &shadow {
        FlatBody::Polytope(q) => {
            section(q, &Flat::new(vec![h.coords(gdir)], Vector::zeros(h.dim()))?)?
        }
        FlatBody::Interval { .. } => unreachable!("H has dimension >= 2"),
    };
    let hausdorff = flat_body_distance(&left, &right);

    let lhs = cut.volume();
    let (lo, hi) = match right {
        FlatBody::Interval { lo, hi } => (lo, hi),
        FlatBody::Polytope(_) => unreachable!("G is a line"),
    };
    let mut err = None;
    let rhs = integrate_1d(
        |t| match fiber_volume(p, &h_perp, &(gdir * t)) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        FIBER_PANELS,
    );
    if let Some(e) = err {
        return Err(e);
    }
    let pass = hausdorff <= FUBINI_SET_TOL && (lhs - rhs).abs() <= FUBINI_VOLUME_TOL * lhs;
    Ok(FubiniReport {
        hausdorff,
        lhs,
        rhs,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random::random_polytope;

    #[test]
    fn exact_volumes() {
        assert!((volume_exact(&Polytope::cube(4, 1.0).unwrap()) - 16.0).abs() < 1e-12);
        assert!((volume_exact(&Polytope::cross_polytope(3).unwrap()) - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cube_sections() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let e3 = UnitDirection::axis(3, 2);
        let mid = section(&c, &Flat::hyperplane(&e3, 0.0).unwrap()).unwrap();
        assert!((mid.volume() - 4.0).abs() < 1e-12);
        let up = section(&c, &Flat::hyperplane(&e3, 0.5).unwrap()).unwrap();
        assert!((up.volume() - 4.0).abs() < 1e-12);
        assert!(matches!(
            section(&c, &Flat::hyperplane(&e3, 1.5).unwrap()),
            Err(GeomError::EmptySection)
        ));
    }

    #[test]
    fn line_sections_are_intervals() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let f = Flat::coordinate(3, &[0]).unwrap();
        match section(&c, &f).unwrap() {
            FlatBody::Interval { lo, hi } => {
                assert!((lo + 1.0).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12)
            }
            _ => panic!("expected an interval"),
        }
    }

    #[test]
    fn projections() {
        let x = Polytope::cross_polytope(3).unwrap();
        let sq = project(&x, &Flat::coordinate(3, &[0, 1]).unwrap()).unwrap();
        let p = sq.as_polytope().unwrap();
        assert_eq!(p.num_vertices(), 4);
        assert!((sq.volume() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mc_volume_of_cube_is_exact() {
        let est = mc_volume(|_| true, &[-1.0; 3], &[1.0; 3], 5000, 1).unwrap();
        assert_eq!(est.value, 8.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn mc_volume_is_reproducible() {
        let f = |x: &Vector| x.norm_squared() <= 1.0;
        let a = mc_volume(f, &[-1.0; 3], &[1.0; 3], 100_000, 3).unwrap();
        let b = mc_volume(f, &[-1.0; 3], &[1.0; 3], 100_000, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ball_cube_edge_cases() {
        let r = unit_volume_ball_radius(4);
        assert_eq!(ball_cube_volume(4, r, 1000, 0).unwrap().value, 1.0);
        let sa = ball_cube_surface_area(3, 2.0, 1000, 0).unwrap();
        let d3 = 3.0 * ball_volume(3).powf(1.0 / 3.0);
        assert!((sa.value - d3).abs() < 1e-12);
    }

    #[test]
    fn fiber_integral_recovers_volume() {
        let p = random_polytope(3, 8).unwrap();
        let u = UnitDirection::from_slice(&[0.3, -0.4, 0.8]).unwrap();
        let v = volume_exact(&p);
        assert!((fiber_integral(&p, &u).unwrap() - v).abs() < 1e-3 * v);
    }

    #[test]
    fn fubini_on_cube() {
        let c = Polytope::cube(4, 1.0).unwrap();
        let h = Flat::coordinate(4, &[0, 1]).unwrap();
        let g = Flat::coordinate(4, &[0]).unwrap();
        let r = fubini_check(&c, &h, &g).unwrap();
        assert!(r.pass);
        assert!((r.lhs - 8.0).abs() < 1e-12);
        assert!(r.hausdorff < 1e-12);
    }
}
