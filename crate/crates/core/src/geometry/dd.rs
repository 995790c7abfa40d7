//! Double description method for pointed polyhedral cones `{x : R x >= 0}`.
//!
//! Rows are inserted one at a time in index order. Adjacency of a positive and a
//! negative ray is decided by the algebraic test: the rows tight at both rays must
//! have rank `d - 2`, and no third ray may be tight on all of them. Zero sets
//! are carried combinatorially, so a ray created from a pair inherits the
//! intersection of its parents' zero sets plus the new row; its coordinates
//! are then re-solved from those rows.

use fixedbitset::FixedBitSet;

use super::linalg::Vector;
use crate::error::{GeomError, Result};

/// Sign tolerance for normalized rows against unit rays.
pub(crate) const DD_EPS: f64 = 1e-10;

#[derive(Clone, Debug)]
pub(crate) struct Ray {
    pub x: Vector,
    pub zero: FixedBitSet,
}

/// Extreme rays of `{x in R^d : rows[i] . x >= 0 for all i}`.
///
/// Fails with [`GeomError::Unbounded`] when the rows do not have full rank
/// (the cone then contains a line).
pub(crate) fn extreme_rays(rows: &[Vector]) -> Result<Vec<Ray>> {
    let d = rows.first().map(|r| r.len()).ok_or(GeomError::Unbounded)?;
    let rows: Vec<Vector> = rows
        .iter()
        .map(|r| {
            let n = r.norm();
            if n > 0.0 {
                r / n
            } else {
                r.clone()
            }
        })
        .collect();
    let m = rows.len();

    // Initial simplicial cone from the first linearly independent rows.
    let mut basis_idx: Vec<usize> = Vec::with_capacity(d);
    let mut echelon: Vec<Vector> = Vec::with_capacity(d);
    for (i, r) in rows.iter().enumerate() {
        if basis_idx.len() == d {
            break;
        }
        let mut w = r.clone();
        for _ in 0..2 {
            for e in &echelon {
                let c = w.dot(e);
                w.axpy(-c, e, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-9 {
            echelon.push(w / norm);
            basis_idx.push(i);
        }
    }
    if basis_idx.len() < d {
        return Err(GeomError::Unbounded);
    }
    let r0 = nalgebra::DMatrix::from_fn(d, d, |i, j| rows[basis_idx[i]][j]);
    let inv = r0.try_inverse().ok_or(GeomError::Unbounded)?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let col = inv.column(j).into_owned();
            let x = &col / col.norm();
            let mut zero = FixedBitSet::with_capacity(m);
            for (k, &bi) in basis_idx.iter().enumerate() {
                if k != j {
                    zero.insert(bi);
                }
            }
            Ray { x, zero }
        })
        .collect();

    let mut in_basis = FixedBitSet::with_capacity(m);
    for &b in &basis_idx {
        in_basis.insert(b);
    }
    let mut processed = in_basis.clone();

    for (i, row) in rows.iter().enumerate() {
        if in_basis.contains(i) {
            continue;
        }
        let vals: Vec<f64> = rays.iter().map(|r| row.dot(&r.x)).collect();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (k, &v) in vals.iter().enumerate() {
            if v > DD_EPS {
                pos.push(k);
            } else if v < -DD_EPS {
                neg.push(k);
            }
        }
        processed.insert(i);
        if neg.is_empty() {
            for (k, &v) in vals.iter().enumerate() {
                if v.abs() <= DD_EPS {
                    rays[k].zero.insert(i);
                }
            }
            continue;
        }

        let mut new_rays = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let mut common = rays[p].zero.clone();
                common.intersect_with(&rays[q].zero);
                if common.count_ones(..) + 2 < d {
                    continue;
                }
                if !adjacent(&rows, &common, d) {
                    continue;
                }
                // combinatorial test as well: rounding can make the rank test
                // pass for pairs that another ray separates
                if rays
                    .iter()
                    .enumerate()
                    .any(|(r, ray)| r != p && r != q && common.is_subset(&ray.zero))
                {
                    continue;
                }
                let vp = vals[p];
                let vq = -vals[q];
                let mut x = &rays[q].x * vp + &rays[p].x * vq;
                let norm = x.norm();
                if norm <= 1e-300 {
                    continue;
                }
                x /= norm;
                common.insert(i);
                let x = refine(&rows, &common, d, x);
                new_rays.push(Ray { x, zero: common });
            }
        }

        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + new_rays.len() + vals.len());
        for (k, ray) in rays.into_iter().enumerate() {
            let v = vals[k];
            if v > DD_EPS {
                next.push(ray);
            } else if v >= -DD_EPS {
                let mut ray = ray;
                ray.zero.insert(i);
                next.push(ray);
            }
        }
        next.extend(new_rays);
        rays = merge_duplicates(next);
    }
    Ok(rays)
}

/// Re-solve a ray as the null direction of its tight rows, so rounding does
/// not accumulate along chains of combinations.
fn refine(rows: &[Vector], zero: &FixedBitSet, d: usize, x: Vector) -> Vector {
    let idx: Vec<usize> = zero.ones().collect();
    if idx.len() + 1 < d {
        return x;
    }
    let a = nalgebra::DMatrix::from_fn(idx.len().max(d), d, |r, c| {
        if r < idx.len() {
            rows[idx[r]][c]
        } else {
            0.0
        }
    });
    let svd = a.svd(false, true);
    let v_t = match svd.v_t {
        Some(v) => v,
        None => return x,
    };
    let (k, smallest) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |acc, (k, &s)| if s < acc.1 { (k, s) } else { acc },
            );
    let second = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .fold(f64::INFINITY, |acc, (_, &s)| acc.min(s));
    // only when the null direction is well separated
    if smallest > 1e-8 || second < 1e-6 {
        return x;
    }
    let mut y: Vector = v_t.row(k).transpose();
    if y.dot(&x) < 0.0 {
        y = -y;
    }
    if (&y - &x).norm() > 1e-6 {
        return x;
    }
    y
}

/// Collapse rays that coincide numerically, keeping the union of their zero
/// sets. Rounding can otherwise leave a degenerate vertex split into copies
/// that each pass the adjacency test and multiply with every insertion.
fn merge_duplicates(mut rays: Vec<Ray>) -> Vec<Ray> {
    const SAME: f64 = 1e-9;
    rays.sort_by(|a, b| a.x[0].total_cmp(&b.x[0]));
    let mut out: Vec<Ray> = Vec::with_capacity(rays.len());
    let mut start = 0;
    for ray in rays {
        while start < out.len() && ray.x[0] - out[start].x[0] > SAME {
            start += 1;
        }
        match out[start..]
            .iter_mut()
            .find(|r| (&r.x - &ray.x).amax() <= SAME)
        {
            Some(r) => r.zero.union_with(&ray.zero),
            None => out.push(ray),
        }
    }
    out
}

/// Algebraic adjacency test: rank of the rows indexed by `common` equals `d - 2`.
fn adjacent(rows: &[Vector], common: &FixedBitSet, d: usize) -> bool {
    if d < 2 {
        return false;
    }
    rank_at_least(rows, common.ones(), d - 2)
}

/// Incremental Gram–Schmidt rank test with early exit.
fn rank_at_least(rows: &[Vector], idx: impl Iterator<Item = usize>, target: usize) -> bool {
    if target == 0 {
        return true;
    }
    let mut basis: Vec<Vector> = Vec::with_capacity(target);
    for i in idx {
        let mut w = rows[i].clone();
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
        }
        let norm = w.norm();
        if norm > 1e-8 {
            basis.push(w / norm);
            if basis.len() >= target {
                return true;
            }
        }
    }
    false
}
