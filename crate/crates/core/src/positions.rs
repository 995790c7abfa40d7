//! John ellipsoid, volume ratio, and the minimal surface, isotropic and
//! minimal mean width positions.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geometry::faces::triangulation;
use crate::geometry::linalg::{sym_exp, sym_log, sym_pow, sym_spectral_norm, sym_traceless};
use crate::geometry::{
    ball_volume, BodyOracle, LinearMap, Matrix, Polytope, SphereGrid, StandardBody, Vector,
};
use crate::measures::{isotropy_report, serialize_matrix, surface_measure, DiscreteSurfaceMeasure};
use crate::volumetrics::volume_exact;

/// `center + shape * B_2^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ellipsoid {
    pub center: Vec<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub shape: Matrix,
}

impl Ellipsoid {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self.dim()) * self.shape.determinant().abs()
    }

    /// `max_{x in E} <a, x>`.
    pub fn support(&self, a: &Vector) -> f64 {
        (&self.shape * a).norm() + Vector::from_column_slice(&self.center).dot(a)
    }
}

#[derive(Clone, Debug)]
pub struct JohnSolution {
    pub ellipsoid: Ellipsoid,
    /// Duality gap bound `2m/t` of the final barrier problem.
    pub kkt_residual: f64,
    pub newton_steps: usize,
}

const JOHN_GAP: f64 = 1e-9;
const JOHN_MAX_NEWTON: usize = 400;

/// Symmetric basis matrices `E_(j,k)`, `j <= k`.
fn sym_basis(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for j in 0..n {
        for k in j..n {
            out.push((j, k));
        }
    }
    out
}

/// Maximal-volume inscribed ellipsoid. Maximizes `log det A` subject to
/// `|A a_i| + <c, a_i> <= b_i` with a log-barrier on the second-order cones
/// `{(x, g) : |x| <= g}`. The center is pinned at zero for symmetric bodies.
pub fn john_ellipsoid(p: &Polytope) -> Result<JohnSolution> {
    let n = p.dim();
    let m = p.num_facets();
    if p.num_vertices() <= n {
        return Err(GeomError::NotFullDimensional);
    }
    let scale = p
        .offsets()
        .iter()
        .fold(0.0_f64, |a, b| a.max(b.abs()))
        .max(p.scale());
    let normals: Vec<Vector> = p.normals().iter().map(|u| u.as_vector().clone()).collect();
    let shift = if p.is_symmetric() {
        Vector::zeros(n)
    } else {
        p.vertex_centroid()
    };
    // work with P - shift, scaled to unit size
    let offsets: Vec<f64> = p
        .offsets()
        .iter()
        .zip(&normals)
        .map(|(b, a)| (b - a.dot(&shift)) / scale)
        .collect();
    if offsets.iter().any(|&b| b <= 0.0) {
        return Err(GeomError::NotFullDimensional);
    }
    let pairs = sym_basis(n);
    let na = pairs.len();
    let free_center = !p.is_symmetric();
    let dim = na + if free_center { n } else { 0 };

    let unpack = |z: &Vector| -> (Matrix, Vector) {
        let mut a = Matrix::zeros(n, n);
        for (t, &(j, k)) in pairs.iter().enumerate() {
            a[(j, k)] = z[t];
            a[(k, j)] = z[t];
        }
        let c = if free_center {
            Vector::from_iterator(n, (0..n).map(|i| z[na + i]))
        } else {
            Vector::zeros(n)
        };
        (a, c)
    };
    // barrier value, or None outside the domain
    let value = |z: &Vector, t: f64| -> Option<f64> {
        let (a, c) = unpack(z);
        let chol = Cholesky::new(a.clone())?;
        let logdet: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let mut f = -t * logdet;
        for (ai, &bi) in normals.iter().zip(&offsets) {
            let x = &a * ai;
            let g = bi - c.dot(ai);
            let s = g * g - x.norm_squared();
            if g <= 0.0 || s <= 0.0 {
                return None;
            }
            f -= s.ln();
        }
        Some(f)
    };

    let r0 = 0.5 * offsets.iter().copied().fold(f64::INFINITY, f64::min);
    let mut z = Vector::zeros(dim);
    for (t, &(j, k)) in pairs.iter().enumerate() {
        if j == k {
            z[t] = r0;
        }
    }
    let mut t = 1.0;
    let mut steps = 0;
    loop {
        // centering by damped Newton
        loop {
            let (a, c) = unpack(&z);
            let a_inv = a
                .clone()
                .try_inverse()
                .ok_or(GeomError::Singular(a.determinant()))?;
            let mut grad = Vector::zeros(dim);
            let mut hess = Matrix::zeros(dim, dim);
            // -t log det A
            let e_times = |(j, k): (usize, usize), m: &Matrix| -> Matrix {
                // A^{-1} E_(j,k)
                let mut out = Matrix::zeros(n, n);
                for r in 0..n {
                    out[(r, k)] += m[(r, j)];
                    if j != k {
                        out[(r, j)] += m[(r, k)];
                    }
                }
                out
            };
            let prods: Vec<Matrix> = pairs.iter().map(|&jk| e_times(jk, &a_inv)).collect();
            for s1 in 0..na {
                grad[s1] -= t * prods[s1].trace();
                for s2 in s1..na {
                    let h = t * (&prods[s1] * &prods[s2]).trace();
                    hess[(s1, s2)] += h;
                    if s1 != s2 {
                        hess[(s2, s1)] += h;
                    }
                }
            }
            for (ai, &bi) in normals.iter().zip(&offsets) {
                let x = &a * ai;
                let g = bi - c.dot(ai);
                let s = g * g - x.norm_squared();
                // Jacobian of (x, g) with respect to z
                let mut jac = Matrix::zeros(n + 1, dim);
                for (col, &(j, k)) in pairs.iter().enumerate() {
                    jac[(j, col)] += ai[k];
                    if j != k {
                        jac[(k, col)] += ai[j];
                    }
                }
                if free_center {
                    for i in 0..n {
                        jac[(n, na + i)] = -ai[i];
                    }
                }
                let mut lg = Vector::zeros(n + 1);
                for i in 0..n {
                    lg[i] = 2.0 * x[i] / s;
                }
                lg[n] = -2.0 * g / s;
                let mut lh = Matrix::zeros(n + 1, n + 1);
                for i in 0..n {
                    lh[(i, i)] += 2.0 / s;
                    for k in 0..n {
                        lh[(i, k)] += 4.0 * x[i] * x[k] / (s * s);
                    }
                    lh[(i, n)] = -4.0 * g * x[i] / (s * s);
                    lh[(n, i)] = lh[(i, n)];
                }
                lh[(n, n)] = -2.0 / s + 4.0 * g * g / (s * s);
                grad += jac.transpose() * lg;
                hess += jac.transpose() * lh * &jac;
            }
            let step = match Cholesky::new(hess.clone()) {
                Some(ch) => ch.solve(&(-&grad)),
                None => hess
                    .clone()
                    .lu()
                    .solve(&(-&grad))
                    .ok_or(GeomError::Singular(0.0))?,
            };
            let decrement = -grad.dot(&step);
            if decrement / 2.0 <= 1e-9 {
                break;
            }
            steps += 1;
            if steps > JOHN_MAX_NEWTON {
                return Err(GeomError::NoConvergence {
                    what: "John ellipsoid barrier",
                    iterations: steps,
                });
            }
            // inside the quadratic convergence region of a self-concordant
            // barrier the full step is safe; skip the noisy value comparison
            if decrement < 0.01 {
                let cand = &z + &step;
                if value(&cand, t).is_some() {
                    z = cand;
                    continue;
                }
            }
            let f0 = value(&z, t).expect("iterate stays feasible");
            let mut alpha = 1.0;
            loop {
                let cand = &z + &step * alpha;
                if let Some(f1) = value(&cand, t) {
                    if f1 <= f0 - 0.25 * alpha * decrement {
                        z = cand;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-14 {
                    break;
                }
            }
            // no measurable progress left at this barrier weight
            if alpha < 1e-8 {
                break;
            }
        }
        let gap = 2.0 * m as f64 / t;
        if gap <= JOHN_GAP {
            let (a, c) = unpack(&z);
            let center = c * scale + &shift;
            return Ok(JohnSolution {
                ellipsoid: Ellipsoid {
                    center: center.iter().copied().collect(),
                    shape: a * scale,
                },
                kkt_residual: gap,
                newton_steps: steps,
            });
        }
        t *= 8.0;
    }
}

/// `vr(K) = (|K| / |JK|)^{1/n}`.
pub fn volume_ratio(p: &Polytope) -> Result<f64> {
    let n = p.dim() as f64;
    let e = john_ellipsoid(p)?.ellipsoid;
    Ok((volume_exact(p) / e.volume()).powf(1.0 / n))
}

/// Volume ratio of a standard body; a ball is its own John ellipsoid.
pub fn volume_ratio_of(body: &StandardBody) -> Result<f64> {
    match body {
        StandardBody::Ball(_) => Ok(1.0),
        StandardBody::Polytope(p) => volume_ratio(p),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionResult {
    /// The map `T` in `SL(n)` realizing the position.
    #[serde(serialize_with = "serialize_map")]
    pub map: LinearMap,
    pub objective: f64,
    pub initial_objective: f64,
    /// Optimality defect at termination: isotropy defect, or gradient norm.
    pub defect: f64,
    pub iterations: usize,
    /// Moment data in the final position: the surface moment matrix or the covariance.
    #[serde(serialize_with = "serialize_matrix")]
    pub moment: Matrix,
}

fn serialize_map<S: serde::Serializer>(
    t: &LinearMap,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    serialize_matrix(t.matrix(), s)
}

#[derive(Clone, Copy, Debug)]
pub struct PositionOptions {
    pub max_iter: usize,
    pub defect_tol: f64,
}

impl Default for PositionOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            defect_tol: 1e-3,
        }
    }
}

/// Minimal surface area position by descent on `T = exp(A)`, `A` symmetric
/// traceless, applied to the surface measure through the transform law.
/// Stops when the isotropy defect of `S_{TP}` drops below the tolerance.
pub fn minimal_surface_position(p: &Polytope, opts: PositionOptions) -> Result<PositionResult> {
    let mu = surface_measure(p)?;
    let vol = volume_exact(p);
    minimal_surface_position_of_measure(&mu, vol, opts)
}

/// Minimal surface position of a body given its surface measure and volume.
pub fn minimal_surface_position_of_measure(
    mu0: &DiscreteSurfaceMeasure,
    vol: f64,
    opts: PositionOptions,
) -> Result<PositionResult> {
    let n = mu0.dim();
    let norm = vol.powf((n as f64 - 1.0) / n as f64);
    let mut mu = mu0.clone();
    let mut t = LinearMap::identity(n);
    let initial = mu.mass() / norm;
    let mut iterations = 0;
    loop {
        let rep = isotropy_report(&mu);
        if rep.defect <= opts.defect_tol {
            return Ok(PositionResult {
                map: t,
                objective: rep.mass / norm,
                initial_objective: initial,
                defect: rep.defect,
                iterations,
                moment: rep.moment_matrix,
            });
        }
        if iterations >= opts.max_iter {
            return Err(GeomError::NoConvergence {
                what: "minimal surface position",
                iterations,
            });
        }
        iterations += 1;
        // exact for boxes, where the facet areas scale like the inverse widths
        let d = sym_traceless(&sym_log(&rep.moment_matrix));
        let slope = -(&rep.moment_matrix * &d).trace();
        let mut alpha = 1.0;
        loop {
            let step = LinearMap::new(sym_exp(&(&d * alpha)))?;
            let cand = mu.transformed(&step)?;
            if cand.mass() <= rep.mass + 1e-4 * alpha * slope || alpha < 1e-12 {
                mu = cand;
                t = step.compose(&t).normalized_to_sl()?;
                break;
            }
            alpha *= 0.5;
        }
    }
}

/// `int_P x x^T dx` and `|P|` from a triangulation into simplices.
pub fn second_moments(p: &Polytope) -> (Matrix, f64) {
    let n = p.dim();
    let verts = p.vertices();
    let mut c = Matrix::zeros(n, n);
    let mut vol = 0.0;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    for simplex in triangulation(p) {
        let v0 = &verts[simplex[0]];
        let edges = Matrix::from_fn(n, n, |i, j| verts[simplex[j + 1]][i] - v0[i]);
        let v = edges.determinant().abs() / fact;
        let mut sum = Vector::zeros(n);
        let mut outer = Matrix::zeros(n, n);
        for &k in &simplex {
            sum += &verts[k];
            outer.ger(1.0, &verts[k], &verts[k], 1.0);
        }
        outer.ger(1.0, &sum, &sum, 1.0);
        c += outer * (v / ((n + 1) * (n + 2)) as f64);
        vol += v;
    }
    (c, vol)
}

#[derive(Clone, Debug, Serialize)]
pub struct IsotropicPosition {
    pub position: PositionResult,
    pub l_k: f64,
}

/// Isotropic position of a centrally symmetric polytope:
/// `T = (det C)^{1/(2n)} C^{-1/2}` with `C = int_P x x^T`, and
/// `L_K^2 = (det C)^{1/n} / |P|^{(n+2)/n}`.
pub fn isotropic_position(p: &Polytope) -> Result<IsotropicPosition> {
    if !p.is_symmetric() {
        return Err(GeomError::NotSymmetric);
    }
    let n = p.dim();
    let nf = n as f64;
    let (c, vol) = second_moments(p);
    let det = c.determinant();
    let t = LinearMap::new(sym_pow(&c, -0.5) * det.powf(1.0 / (2.0 * nf)))?;
    let after = t.matrix() * &c * t.matrix().transpose();
    let level = after.trace() / nf;
    let defect = sym_spectral_norm(&(&after - Matrix::identity(n, n) * level)) / level;
    let denom = vol.powf((nf + 2.0) / nf);
    let l_k = (det.powf(1.0 / nf) / denom).sqrt();
    Ok(IsotropicPosition {
        position: PositionResult {
            map: t,
            objective: level / denom,
            initial_objective: c.trace() / nf / denom,
            defect,
            iterations: 1,
            moment: after,
        },
        l_k,
    })
}

/// Quadrature average of `h_K` over the grid.
pub fn mean_width(body: &dyn BodyOracle, grid: &SphereGrid) -> f64 {
    grid.integrate(|u| body.support(u)) / grid.total_weight()
}

/// Mean width of `T P`: the grid average of `h_P(T^T u)`, with the maximizing
/// vertex of each direction.
fn mean_width_in_position(p: &Polytope, t: &Matrix, grid: &SphereGrid) -> (f64, Matrix) {
    let n = p.dim();
    let tt = t.transpose();
    let moved: Vec<Vector> = p.vertices().iter().map(|v| t * v).collect();
    let mut value = 0.0;
    let mut g = Matrix::zeros(n, n);
    for (u, &q) in grid.directions().iter().zip(grid.weights()) {
        let y = &tt * u.as_vector();
        let (k, h) = p
            .vertices()
            .iter()
            .enumerate()
            .map(|(k, v)| (k, v.dot(&y)))
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        value += q * h;
        g.ger(q, &moved[k], u.as_vector(), 1.0);
    }
    let w = grid.total_weight();
    (value / w, sym_traceless(&g) / w)
}

pub const MEAN_WIDTH_GRAD_TOL: f64 = 1e-6;

/// Minimal mean width position over `SL(n)`. Each step replaces `T` by
/// `exp(-a G) T`, where `G` is the symmetric traceless gradient of the
/// quadrature mean width at the current position, with Armijo backtracking.
/// Stops at gradient norm `1e-6` or when no further decrease is possible at
/// floating point resolution.
pub fn minimal_mean_width_position(
    p: &Polytope,
    grid: &SphereGrid,
    opts: PositionOptions,
) -> Result<PositionResult> {
    if !p.is_symmetric() {
        return Err(GeomError::NotSymmetric);
    }
    let n = p.dim();
    if grid.dim() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    let vol_norm = volume_exact(p).powf(1.0 / n as f64);
    let mut t = Matrix::identity(n, n);
    let (mut w, mut g) = mean_width_in_position(p, &t, grid);
    let initial = w / vol_norm;
    let mut alpha = 1.0 / w;
    let mut iterations = 0;
    loop {
        let gnorm = g.norm();
        if gnorm <= MEAN_WIDTH_GRAD_TOL {
            break;
        }
        if iterations >= opts.max_iter {
            return Err(GeomError::NoConvergence {
                what: "minimal mean width position",
                iterations,
            });
        }
        iterations += 1;
        let mut accepted = false;
        let mut a = alpha * 2.0;
        while a * gnorm > 1e-15 {
            let cand = sym_exp(&(&g * -a)) * &t;
            let (wc, gc) = mean_width_in_position(p, &cand, grid);
            if wc <= w - 1e-4 * a * gnorm * gnorm {
                t = cand;
                w = wc;
                g = gc;
                alpha = a;
                accepted = true;
                break;
            }
            a *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let map = LinearMap::new(t)?.normalized_to_sl()?;
    Ok(PositionResult {
        map,
        objective: w / vol_norm,
        initial_objective: initial,
        defect: g.norm(),
        iterations,
        moment: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random::{random_gl, random_symmetric_polytope, rng_from_seed};
    use crate::geometry::Ball;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn john_of_cube_is_unit_ball() {
        let e = john_ellipsoid(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        assert!(close(&e.ellipsoid.shape, &Matrix::identity(3, 3), 1e-7));
        assert!(e.kkt_residual <= 1e-7);
    }

    #[test]
    fn john_of_cross_polytope() {
        let e = john_ellipsoid(&Polytope::cross_polytope(3).unwrap()).unwrap();
        assert!(close(
            &e.ellipsoid.shape,
            &(Matrix::identity(3, 3) / 3f64.sqrt()),
            1e-7
        ));
    }

    #[test]
    fn john_of_box_and_shifted_box() {
        let b = Polytope::box_from_half_widths(&[2.0, 1.0, 0.5]).unwrap();
        let want = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0, 0.5]));
        let e = john_ellipsoid(&b).unwrap();
        assert!(close(&e.ellipsoid.shape, &want, 1e-7));
        let shifted = b
            .translated(&Vector::from_vec(vec![0.3, -0.2, 0.1]))
            .unwrap();
        let e = john_ellipsoid(&shifted).unwrap().ellipsoid;
        assert!(close(&e.shape, &want, 1e-6));
        assert!((e.center[0] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn cube_volume_ratio() {
        let vr = volume_ratio(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        assert!((vr - (8.0 / (4.0 * std::f64::consts::PI / 3.0)).powf(1.0 / 3.0)).abs() < 1e-7);
        assert_eq!(
            volume_ratio_of(&StandardBody::Ball(Ball::unit(3).unwrap())).unwrap(),
            1.0
        );
    }

    #[test]
    fn cube_is_surface_minimal() {
        let c = Polytope::cube(3, 0.5).unwrap();
        let r = minimal_surface_position(&c, PositionOptions::default()).unwrap();
        assert_eq!(r.iterations, 0);
        assert!((r.objective - 6.0).abs() < 1e-12);
    }

    #[test]
    fn skewed_cube_recovers_surface_minimum() {
        let b = Polytope::box_from_half_widths(&[2.0, 0.5, 0.125]).unwrap();
        let r = minimal_surface_position(&b, PositionOptions::default()).unwrap();
        assert!(r.defect <= 1e-3);
        assert!((r.objective - 6.0).abs() < 0.005 * 6.0);
        assert!(r.map.is_special());
    }

    #[test]
    fn cube_isotropic_constant() {
        let r = isotropic_position(&Polytope::cube(3, 0.5).unwrap()).unwrap();
        assert!((r.l_k - 1.0 / 12f64.sqrt()).abs() < 1e-12);
        assert!(r.position.defect < 1e-9);
    }

    #[test]
    fn isotropic_constant_is_linear_invariant() {
        let p = random_symmetric_polytope(3, 4).unwrap();
        let t = random_gl(3, &mut rng_from_seed(1));
        let a = isotropic_position(&p).unwrap().l_k;
        let b = isotropic_position(&p.apply_map(&t).unwrap()).unwrap().l_k;
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn mean_width_values() {
        let g = SphereGrid::new(3, 5000, 0).unwrap();
        let ball = Ball::new(3, 2.0).unwrap();
        assert!((mean_width(&ball, &g) - 2.0).abs() < 1e-12);
        let c = Polytope::cube(3, 1.0).unwrap();
        let w = mean_width(&c, &g);
        assert!((w - 1.5).abs() < 0.02 * 1.5);
        assert!((mean_width(&c.scaled(2.0).unwrap(), &g) - 2.0 * w).abs() < 1e-12);
    }

    #[test]
    fn mean_width_gradient_matches_differences() {
        let p = random_symmetric_polytope(3, 2).unwrap();
        let g = SphereGrid::new(3, 400, 1).unwrap();
        let t = Matrix::identity(3, 3);
        let (_, grad) = mean_width_in_position(&p, &t, &g);
        let mut e = Matrix::zeros(3, 3);
        e[(0, 1)] = 1.0;
        e[(1, 0)] = 1.0;
        let h = 1e-7;
        let fp = mean_width_in_position(&p, &(sym_exp(&(&e * h)) * &t), &g).0;
        let fm = mean_width_in_position(&p, &(sym_exp(&(&e * -h)) * &t), &g).0;
        let fd = (fp - fm) / (2.0 * h);
        assert!((fd - (&grad * &e).trace()).abs() < 1e-6);
    }

    #[test]
    fn skewed_box_mean_width_recovers_cube() {
        let g = SphereGrid::new(3, 2000, 5).unwrap();
        let cube = Polytope::cube(3, 1.0).unwrap();
        let skew = Polytope::box_from_half_widths(&[3.0, 1.0, 1.0 / 3.0]).unwrap();
        let r = minimal_mean_width_position(&skew, &g, PositionOptions::default()).unwrap();
        let target = mean_width(&cube, &g) / 2.0;
        assert!(
            (r.objective - target).abs() < 0.01 * target,
            "{} {}",
            r.objective,
            target
        );
        assert!(r.objective <= r.initial_objective);
    }
}
