//! Dense linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeomError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 32;

/// Volume of the Euclidean unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    // ω_n = 2π/n · ω_{n-2}
    let (mut w, start) = if n % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= n {
        w *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    w
}

/// Surface area `|S^{n-1}| = n ω_n` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    n as f64 * ball_volume(n)
}

pub fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(GeomError::InvalidInput(format!(
            "dimension {n} outside [{MIN_DIM}, {MAX_DIM}]"
        )))
    }
}

/// An invertible linear map with its determinant cached.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    matrix: Matrix,
    det: f64,
}

impl LinearMap {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(GeomError::InvalidInput("linear map must be square".into()));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::InvalidInput("non-finite matrix entry".into()));
        }
        let det = matrix.determinant();
        Ok(Self { matrix, det })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n, n),
            det: 1.0,
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diagonal(&Vector::from_column_slice(entries)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn is_special(&self) -> bool {
        (self.det - 1.0).abs() <= 1e-9
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.matrix * x
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.det.abs() < 1e-12 {
            return Err(GeomError::Singular(self.det));
        }
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or(GeomError::Singular(self.det))?;
        Ok(Self {
            matrix: inv,
            det: 1.0 / self.det,
        })
    }

    /// `T^{-T}`, the map acting on normals and on polar bodies.
    pub fn inverse_transpose(&self) -> Result<Self> {
        let inv = self.inverse()?;
        Ok(Self {
            matrix: inv.matrix.transpose(),
            det: inv.det,
        })
    }

    /// `self ∘ inner`, i.e. apply `inner` first.
    pub fn compose(&self, inner: &LinearMap) -> LinearMap {
        Self {
            matrix: &self.matrix * &inner.matrix,
            det: self.det * inner.det,
        }
    }

    /// Rescale to determinant one (orientation preserved).
    pub fn normalized_to_sl(&self) -> Result<Self> {
        if self.det.abs() < 1e-12 {
            return Err(GeomError::Singular(self.det));
        }
        let n = self.dim() as f64;
        let s = self.det.abs().powf(-1.0 / n);
        let mut m = &self.matrix * s;
        if self.det < 0.0 {
            m.row_mut(0).neg_mut();
        }
        Self::new(m)
    }
}

/// Numerical rank of the matrix whose rows are `rows`, relative to `tol`.
pub fn rank_of_rows(rows: &[Vector], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let m = Matrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    sv.iter().filter(|&&s| s > tol).count()
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[Vector], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p - base).collect();
    rank_of_rows(&diffs, tol)
}

/// Orthonormal basis of the span of `vectors` (modified Gram–Schmidt, run twice).
pub fn orthonormal_basis(vectors: &[Vector], tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = w.dot(b);
                w.axpy(-c, b, 1.0);
            }
        }
        let norm = w.norm();
        if norm > tol {
            basis.push(w / norm);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `basis` in `R^n`.
pub fn orthogonal_complement(basis: &[Vector], n: usize) -> Vec<Vector> {
    let mut all = basis.to_vec();
    let start = all.len();
    for i in 0..n {
        if all.len() == n {
            break;
        }
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        for _ in 0..2 {
            for b in &all {
                let c = e.dot(b);
                e.axpy(-c, b, 1.0);
            }
        }
        let norm = e.norm();
        if norm > 1e-8 {
            all.push(e / norm);
        }
    }
    all.split_off(start)
}

/// Euclidean distance from `point` to the affine hull of `points`.
pub fn distance_to_affine_hull(point: &Vector, points: &[Vector], tol: f64) -> f64 {
    let base = &points[0];
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p - base).collect();
    let basis = orthonormal_basis(&diffs, tol);
    let mut r = point - base;
    for _ in 0..2 {
        for b in &basis {
            let c = r.dot(b);
            r.axpy(-c, b, 1.0);
        }
    }
    r.norm()
}

/// `exp(A)` for symmetric `A`.
pub fn sym_exp(a: &Matrix) -> Matrix {
    sym_apply(a, f64::exp)
}

/// `C^p` for symmetric positive definite `C`.
pub fn sym_pow(c: &Matrix, p: f64) -> Matrix {
    sym_apply(c, |x| x.max(0.0).powf(p))
}

/// Logarithm of a symmetric positive definite matrix.
pub fn sym_log(c: &Matrix) -> Matrix {
    sym_apply(c, f64::ln)
}

fn sym_apply(a: &Matrix, f: impl Fn(f64) -> f64) -> Matrix {
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let d = Matrix::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Symmetric traceless part of `m`.
pub fn sym_traceless(m: &Matrix) -> Matrix {
    let n = m.nrows();
    let sym = (m + m.transpose()) * 0.5;
    let tr = sym.trace() / n as f64;
    sym - Matrix::identity(n, n) * tr
}

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_norm(m: &Matrix) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes_match_gamma_formula() {
        let pi = std::f64::consts::PI;
        assert!((ball_volume(2) - pi).abs() < 1e-14);
        assert!((ball_volume(3) - 4.0 * pi / 3.0).abs() < 1e-14);
        assert!((ball_volume(4) - pi * pi / 2.0).abs() < 1e-14);
        assert!((ball_volume(5) - 8.0 * pi * pi / 15.0).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * pi).abs() < 1e-13);
    }

    #[test]
    fn sl_normalization() {
        let t = LinearMap::diagonal(&[2.0, 3.0, -1.0]).unwrap();
        let s = t.normalized_to_sl().unwrap();
        assert!(s.is_special());
        assert!((s.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_map_rejected() {
        let t = LinearMap::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(t.inverse(), Err(GeomError::Singular(_))));
    }

    #[test]
    fn complement_is_orthonormal() {
        let b = orthonormal_basis(&[Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0])], 1e-12);
        let c = orthogonal_complement(&b, 4);
        assert_eq!(c.len(), 3);
        for (i, x) in c.iter().enumerate() {
            assert!((x.norm() - 1.0).abs() < 1e-12);
            assert!(x.dot(&b[0]).abs() < 1e-12);
            for y in &c[i + 1..] {
                assert!(x.dot(y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sym_exp_of_diagonal() {
        let a = Matrix::from_diagonal(&Vector::from_vec(vec![0.5, -0.5]));
        let e = sym_exp(&a);
        assert!((e[(0, 0)] - 0.5f64.exp()).abs() < 1e-14);
        assert!((e.determinant() - 1.0).abs() < 1e-14);
    }
}
