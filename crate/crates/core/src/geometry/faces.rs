//! Face lattice traversal driven by vertex–facet incidence.
//!
//! A face is identified by the set of vertices it contains. The facets of a
//! face `S` are the inclusion-maximal proper non-empty sets `S ∩ F_j` over the
//! facets `F_j` of the polytope.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::linalg::Vector;
use super::polytope::{centroid, Polytope};

pub(crate) struct FaceLattice<'a> {
    vertices: &'a [Vector],
    facets: &'a [FixedBitSet],
    volumes: HashMap<FixedBitSet, f64>,
}

impl<'a> FaceLattice<'a> {
    pub fn new(p: &'a Polytope) -> Self {
        Self {
            vertices: p.vertices(),
            facets: p.incidence(),
            volumes: HashMap::new(),
        }
    }

    /// Facets of the face `set`.
    pub fn subfaces(&self, set: &FixedBitSet) -> Vec<FixedBitSet> {
        let total = set.count_ones(..);
        let mut cands: Vec<FixedBitSet> = Vec::new();
        for f in self.facets {
            let mut s = set.clone();
            s.intersect_with(f);
            let c = s.count_ones(..);
            if c == 0 || c == total {
                continue;
            }
            if !cands.contains(&s) {
                cands.push(s);
            }
        }
        let keep: Vec<bool> = cands
            .iter()
            .enumerate()
            .map(|(i, s)| {
                !cands
                    .iter()
                    .enumerate()
                    .any(|(j, t)| i != j && s.is_subset(t) && s != t)
            })
            .collect();
        cands
            .into_iter()
            .zip(keep)
            .filter_map(|(s, k)| k.then_some(s))
            .collect()
    }

    fn points(&self, set: &FixedBitSet) -> Vec<Vector> {
        set.ones().map(|k| self.vertices[k].clone()).collect()
    }

    /// `dim`-dimensional volume of the face `set` by the pyramid recursion
    /// `vol_k(S) = (1/k) sum_T dist(c_S, aff T) vol_{k-1}(T)`.
    pub fn face_volume(&mut self, set: &FixedBitSet, dim: usize) -> f64 {
        if dim == 0 {
            return 1.0;
        }
        if let Some(&v) = self.volumes.get(set) {
            return v;
        }
        let pts = self.points(set);
        let vol = if dim == 1 {
            let mut best = 0.0_f64;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    best = best.max((&pts[i] - &pts[j]).norm());
                }
            }
            best
        } else {
            let c = centroid(&pts);
            let mut acc = 0.0;
            for t in self.subfaces(set) {
                let tp = self.points(&t);
                let d = distance_to_fitted_flat(&c, &tp, dim - 1);
                acc += d * self.face_volume(&t, dim - 1);
            }
            acc / dim as f64
        };
        self.volumes.insert(set.clone(), vol);
        vol
    }

    /// Pulling triangulation of the face `set`: cone from its lowest-index
    /// vertex over the triangulations of the facets that miss that vertex.
    pub fn triangulate(&self, set: &FixedBitSet, dim: usize) -> Vec<Vec<usize>> {
        let apex = match set.ones().next() {
            Some(a) => a,
            None => return Vec::new(),
        };
        if dim == 0 {
            return vec![vec![apex]];
        }
        let mut out = Vec::new();
        for t in self.subfaces(set) {
            if t.contains(apex) {
                continue;
            }
            for mut simplex in self.triangulate(&t, dim - 1) {
                simplex.push(apex);
                out.push(simplex);
            }
        }
        out
    }
}

/// Distance from `x` to a `k`-flat through `pts`, spanned greedily by the
/// points farthest from the current flat. The face dimension is known, so a
/// nearly degenerate vertex set cannot inflate the hull.
fn distance_to_fitted_flat(x: &Vector, pts: &[Vector], k: usize) -> f64 {
    let c = centroid(pts);
    let mut basis: Vec<Vector> = Vec::with_capacity(k);
    let residual = |v: &Vector, basis: &[Vector]| {
        let mut r = v - &c;
        for b in basis {
            let a = r.dot(b);
            r.axpy(-a, b, 1.0);
        }
        r
    };
    for _ in 0..k {
        let r = pts
            .iter()
            .map(|p| residual(p, &basis))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("non-empty face");
        let norm = r.norm();
        if norm <= 0.0 {
            break;
        }
        basis.push(r / norm);
    }
    residual(x, &basis).norm()
}

/// Facet areas of `p` (one per facet, in facet order) and the pyramid volume.
pub(crate) fn facet_areas_and_volume(p: &Polytope) -> (Vec<f64>, f64) {
    let n = p.dim();
    let mut lattice = FaceLattice::new(p);
    let c = p.vertex_centroid();
    let mut areas = Vec::with_capacity(p.num_facets());
    let mut vol = 0.0;
    for (i, f) in p.incidence().iter().enumerate() {
        let a = lattice.face_volume(f, n - 1);
        let dist = p.offsets()[i] - p.normals()[i].dot(&c);
        vol += dist * a;
        areas.push(a);
    }
    (areas, vol / n as f64)
}

/// Facet areas, volume and ridge volumes from one traversal.
pub(crate) struct FacetData {
    pub areas: Vec<f64>,
    pub volume: f64,
    pub ridges: Vec<(usize, usize, f64)>,
}

pub(crate) fn facet_data(p: &Polytope) -> FacetData {
    let n = p.dim();
    let mut lattice = FaceLattice::new(p);
    let c = p.vertex_centroid();
    let inc = p.incidence();
    let mut areas = Vec::with_capacity(inc.len());
    let mut volume = 0.0;
    let mut ridges = Vec::new();
    for (i, f) in inc.iter().enumerate() {
        let a = lattice.face_volume(f, n - 1);
        volume += (p.offsets()[i] - p.normals()[i].dot(&c)) * a;
        areas.push(a);
        for s in lattice.subfaces(f) {
            for (j, fj) in inc.iter().enumerate() {
                if j > i && s.is_subset(fj) {
                    let v = lattice.face_volume(&s, n - 2);
                    ridges.push((i, j, v));
                }
            }
        }
    }
    FacetData {
        areas,
        volume: volume / n as f64,
        ridges,
    }
}

/// Full-dimensional simplices (vertex index lists of length `n+1`) triangulating `p`.
pub(crate) fn triangulation(p: &Polytope) -> Vec<Vec<usize>> {
    let lattice = FaceLattice::new(p);
    let mut all = FixedBitSet::with_capacity(p.num_vertices());
    all.insert_range(..);
    lattice.triangulate(&all, p.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_facet_areas() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let (areas, vol) = facet_areas_and_volume(&c);
        assert!(areas.iter().all(|a| (a - 4.0).abs() < 1e-12));
        assert!((vol - 8.0).abs() < 1e-12);
    }

    #[test]
    fn cube_ridges() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let r = facet_data(&c).ridges;
        assert_eq!(r.len(), 12);
        assert!(r.iter().all(|&(_, _, v)| (v - 2.0).abs() < 1e-12));
    }

    #[test]
    fn triangulation_counts() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let t = triangulation(&c);
        assert!(t.iter().all(|s| s.len() == 4));
        // pulling triangulations of the 3-cube have 6 simplices
        assert_eq!(t.len(), 6);
        let x = Polytope::cross_polytope(4).unwrap();
        let t = triangulation(&x);
        assert!(t.iter().all(|s| s.len() == 5));
    }
}
