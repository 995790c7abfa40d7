//! The discrete Minkowski problem, Blaschke averages, discretized ball
//! measures and curvature images.

use std::path::Path;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::geometry::bodies::unit_volume_ball_radius;
use crate::geometry::faces::facet_data;
use crate::geometry::linalg::check_dim;
use crate::geometry::{
    ball_volume, BodyOracle, HPolytope, Matrix, Polytope, SphereGrid, UnitDirection, Vector,
};
use crate::measures::{Atom, DiscreteSurfaceMeasure};
use crate::star_bodies::StarBodySample;

#[derive(Clone, Debug)]
pub struct MinkowskiSolution {
    pub polytope: Polytope,
    pub achieved_measure: DiscreteSurfaceMeasure,
    /// Max relative facet-weight error over surviving atoms.
    pub residual: f64,
    /// Atoms with no facet in the solution.
    pub dropped_atoms: Vec<usize>,
    /// Support numbers of the solution, one per input atom.
    pub support_numbers: Vec<f64>,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// `sum w_i h_i / V^{1/n}`.
    pub objective: f64,
    pub residual: f64,
}

impl MinkowskiSolution {
    pub fn write_trace_csv(&self, path: &Path) -> Result<()> {
        let mut w =
            csv::Writer::from_path(path).map_err(|e| GeomError::InvalidInput(e.to_string()))?;
        for row in &self.trace {
            w.serialize(row)
                .map_err(|e| GeomError::InvalidInput(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Max relative facet-area error accepted.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iter: 200,
        }
    }
}

/// Facets below this fraction of the total mass count as vanished.
const DROP_FRACTION: f64 = 1e-12;

/// `P(h) = {x : <u_i, x> <= h_i}` with, for each atom, its facet index (if any).
fn body_of(normals: &[UnitDirection], h: &[f64]) -> Result<(Polytope, Vec<Option<usize>>)> {
    let p = Polytope::from_hrep(&HPolytope::new(normals.to_vec(), h.to_vec())?)?;
    let mut facet_of = vec![None; normals.len()];
    let mut next = 0;
    for (k, u) in p.normals().iter().enumerate() {
        let i = (next..normals.len())
            .find(|&i| normals[i] == *u)
            .ok_or_else(|| GeomError::InvalidInput("facet normal not among the atoms".into()))?;
        facet_of[i] = Some(k);
        next = i + 1;
    }
    Ok((p, facet_of))
}

struct State {
    p: Polytope,
    facet_of: Vec<Option<usize>>,
    areas: Vec<f64>,
    volume: f64,
    ridges: Vec<(usize, usize, f64)>,
}

fn state_at(normals: &[UnitDirection], h: &[f64]) -> Result<State> {
    let (p, facet_of) = body_of(normals, h)?;
    let data = facet_data(&p);
    let mut atom_of = vec![0; p.num_facets()];
    for (i, f) in facet_of.iter().enumerate() {
        if let Some(k) = f {
            atom_of[*k] = i;
        }
    }
    let mut areas = vec![0.0; normals.len()];
    for (k, a) in data.areas.iter().enumerate() {
        areas[atom_of[k]] = *a;
    }
    let ridges = data
        .ridges
        .iter()
        .map(|&(a, b, v)| (atom_of[a], atom_of[b], v))
        .collect();
    Ok(State {
        p,
        facet_of,
        areas,
        volume: data.volume,
        ridges,
    })
}

/// Relative area error after the best global rescale of the areas.
fn scaled_residual(areas: &[f64], w: &[f64], live: &[bool]) -> (f64, f64) {
    let (sa, sw) = areas
        .iter()
        .zip(w)
        .zip(live)
        .filter(|(_, &l)| l)
        .fold((0.0, 0.0), |(a, b), ((x, y), _)| (a + x, b + y));
    let kappa = sa / sw;
    let r = areas
        .iter()
        .zip(w)
        .zip(live)
        .filter(|(_, &l)| l)
        .map(|((a, w), _)| (a / kappa - w).abs() / w)
        .fold(0.0_f64, f64::max);
    (r, kappa)
}

/// Polytope whose facet normals and areas are the atoms of `mu`.
///
/// Minimizes the convex function `G(h) = sum w_i h_i - lambda log V(P(h))`
/// by damped Newton steps with Armijo backtracking; at the minimum the facet
/// areas are proportional to the weights, and one closed-form rescale fixes
/// the constant. The Hessian uses the exact first variation of facet areas
/// through the ridges, `dA_i/dh_j = |F_i ∩ F_j| / sin(theta_ij)`. Support
/// numbers are re-projected onto `P(h)` after every step.
pub fn solve_minkowski(
    mu: &DiscreteSurfaceMeasure,
    opts: SolveOptions,
) -> Result<MinkowskiSolution> {
    mu.check_centered()?;
    let n = mu.dim();
    let nf = n as f64;
    let m = mu.len();
    let normals = mu.normals();
    let w = mu.weights();
    let mass = mu.mass();
    let umat = Matrix::from_fn(m, n, |i, j| normals[i][j]);

    let mut h = vec![1.0; m];
    let mut st = state_at(&normals, &h)?;
    // start at the right size: areas scale with the (n-1)-th power
    let s0 = (mass / st.areas.iter().sum::<f64>()).powf(1.0 / (nf - 1.0));
    h.iter_mut().for_each(|x| *x *= s0);
    st = state_at(&normals, &h)?;
    let lambda = mass / nf;
    let objective_g =
        |h: &[f64], vol: f64| h.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() - lambda * vol.ln();

    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        // re-project onto actual support numbers
        for (i, hi) in h.iter_mut().enumerate() {
            *hi = hi.min(st.p.support(&normals[i]));
        }
        let live: Vec<bool> = st.areas.iter().map(|&a| a > DROP_FRACTION * mass).collect();
        let all = vec![true; m];
        let (res_all, _) = scaled_residual(&st.areas, &w, &all);
        let wh: f64 = h.iter().zip(&w).map(|(a, b)| a * b).sum();
        trace.push(TraceRow {
            iteration: iterations,
            objective: wh / st.volume.powf(1.0 / nf),
            residual: res_all,
        });
        if res_all <= 1e-3 * opts.tol || iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        // gradient and Hessian of G
        let v = st.volume;
        let grad = Vector::from_fn(m, |i, _| w[i] - lambda * st.areas[i] / v);
        let mut hess = Matrix::zeros(m, m);
        for &(i, j, vol) in &st.ridges {
            let c = normals[i].dot(&normals[j]);
            let s = (1.0 - c * c).max(0.0).sqrt();
            if s <= 1e-12 {
                continue;
            }
            let d = vol / s;
            hess[(i, j)] -= lambda * d / v;
            hess[(j, i)] -= lambda * d / v;
            hess[(i, i)] += lambda * c * d / v;
            hess[(j, j)] += lambda * c * d / v;
        }
        let av = Vector::from_fn(m, |i, _| st.areas[i] / v);
        hess.ger(lambda, &av, &av, 1.0);
        // translations are a null space of G; absent facets have no curvature
        let beta = (hess.trace() / m as f64).max(1e-300);
        hess.gemm(beta, &umat, &umat.transpose(), 1.0);
        for i in 0..m {
            if !live[i] {
                hess[(i, i)] += beta;
            }
        }
        let step = match hess.clone().cholesky() {
            Some(ch) => ch.solve(&(-&grad)),
            None => hess
                .clone()
                .svd(true, true)
                .solve(&(-&grad), 1e-12)
                .map_err(|_| GeomError::NoConvergence {
                    what: "Minkowski Newton system",
                    iterations,
                })?,
        };
        let slope = grad.dot(&step);
        let g0 = objective_g(&h, v);
        let grad_norm = |areas: &[f64], vol: f64| {
            (0..m)
                .map(|i| (w[i] - lambda * areas[i] / vol).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let r0 = grad.norm();
        let mut alpha = 1.0;
        let mut moved = false;
        while alpha > 1e-10 {
            let cand: Vec<f64> = h
                .iter()
                .zip(step.iter())
                .map(|(a, d)| a + alpha * d)
                .collect();
            if let Ok(next) = state_at(&normals, &cand) {
                // near the optimum the decrease of G drops below the rounding
                // noise of the volume; the gradient norm is still resolved
                let armijo = objective_g(&cand, next.volume) <= g0 + 1e-4 * alpha * slope;
                let smaller = grad_norm(&next.areas, next.volume) <= (1.0 - 1e-4 * alpha) * r0;
                if armijo || smaller {
                    h = cand;
                    st = next;
                    moved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !moved {
            break;
        }
    }

    let live: Vec<bool> = st.areas.iter().map(|&a| a > DROP_FRACTION * mass).collect();
    if !live.iter().any(|&l| l) {
        return Err(GeomError::AllFacetsDropped);
    }
    let (_, kappa) = scaled_residual(&st.areas, &w, &live);
    let scale = kappa.powf(-1.0 / (nf - 1.0));
    let polytope = st.p.scaled(scale)?;
    let areas: Vec<f64> = st.areas.iter().map(|a| a * scale.powf(nf - 1.0)).collect();
    let residual = areas
        .iter()
        .zip(&w)
        .zip(&live)
        .filter(|(_, &l)| l)
        .map(|((a, w), _)| (a - w).abs() / w)
        .fold(0.0_f64, f64::max);
    let dropped_atoms: Vec<usize> = (0..m).filter(|&i| !live[i]).collect();
    if residual > opts.tol {
        return Err(GeomError::NoConvergence {
            what: "Minkowski solver",
            iterations,
        });
    }
    let achieved = DiscreteSurfaceMeasure::new(
        (0..m)
            .filter(|&i| live[i])
            .map(|i| Atom {
                u: normals[i].clone(),
                w: areas[i],
            })
            .collect(),
    )?;
    let support_numbers = normals.iter().map(|u| polytope.support(u)).collect();
    debug_assert!(st.facet_of.len() == m);
    Ok(MinkowskiSolution {
        polytope,
        achieved_measure: achieved,
        residual,
        dropped_atoms,
        support_numbers,
        iterations,
        trace,
    })
}

/// Planar reconstruction: edges in angular order of their normals, each the
/// normal rotated by a quarter turn and scaled by its weight. The polygon is
/// centered at its vertex centroid.
pub fn reconstruct_polygon(mu: &DiscreteSurfaceMeasure) -> Result<Polytope> {
    if mu.dim() != 2 {
        return Err(GeomError::DimensionMismatch {
            expected: 2,
            found: mu.dim(),
        });
    }
    mu.check_centered()?;
    let mut atoms: Vec<&Atom> = mu.atoms().iter().collect();
    atoms.sort_by(|a, b| a.u[1].atan2(a.u[0]).total_cmp(&b.u[1].atan2(b.u[0])));
    let mut pts = Vec::with_capacity(atoms.len());
    let mut cur = Vector::zeros(2);
    for a in atoms {
        pts.push(cur.clone());
        cur += Vector::from_vec(vec![-a.u[1], a.u[0]]) * a.w;
    }
    let c = crate::geometry::polytope::centroid(&pts);
    let pts: Vec<Vector> = pts.iter().map(|p| p - &c).collect();
    Polytope::from_points(&pts)
}

/// Atom-wise `lambda mu_K + (1 - lambda) mu_L` on the merged normal set.
pub fn blaschke_average(
    mu_k: &DiscreteSurfaceMeasure,
    mu_l: &DiscreteSurfaceMeasure,
    lambda: f64,
) -> Result<DiscreteSurfaceMeasure> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(GeomError::InvalidInput("lambda must lie in [0, 1]".into()));
    }
    if mu_k.dim() != mu_l.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: mu_k.dim(),
            found: mu_l.dim(),
        });
    }
    let atoms = mu_k
        .atoms()
        .iter()
        .map(|a| Atom {
            u: a.u.clone(),
            w: lambda * a.w,
        })
        .chain(mu_l.atoms().iter().map(|a| Atom {
            u: a.u.clone(),
            w: (1.0 - lambda) * a.w,
        }));
    DiscreteSurfaceMeasure::merged(mu_k.dim(), atoms)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallMode {
    /// Unit ball.
    Unit,
    /// Ball of volume one.
    Dn,
}

impl std::str::FromStr for BallMode {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(Self::Unit),
            "D_n" | "dn" => Ok(Self::Dn),
            other => Err(GeomError::UnknownKind(other.to_string())),
        }
    }
}

/// Equal-weight measure on an antipodal random grid with the mass of the ball.
pub fn discretize_ball_measure(
    n: usize,
    m: usize,
    seed: u64,
    mode: BallMode,
) -> Result<DiscreteSurfaceMeasure> {
    check_dim(n)?;
    if m % 2 != 0 || m < 4 * n {
        return Err(GeomError::InvalidInput(format!(
            "ball discretization needs an even m >= 4n, got m = {m}"
        )));
    }
    let r = match mode {
        BallMode::Unit => 1.0,
        BallMode::Dn => unit_volume_ball_radius(n),
    };
    let area = n as f64 * ball_volume(n) * r.powi(n as i32 - 1);
    let grid = SphereGrid::new(n, m, seed)?;
    DiscreteSurfaceMeasure::from_parts(grid.directions().to_vec(), vec![area / m as f64; m])
}

/// Measure with density `rho^{n+1} / (n+1)` against the grid quadrature.
pub fn curvature_image(sample: &StarBodySample) -> Result<DiscreteSurfaceMeasure> {
    let grid = sample.grid();
    let n = grid.dim();
    let mut atoms = Vec::with_capacity(grid.len());
    for (j, ((u, &q), &rho)) in grid
        .directions()
        .iter()
        .zip(grid.weights())
        .zip(sample.radial())
        .enumerate()
    {
        if !(rho > 0.0) {
            return Err(GeomError::NonPositiveRadial(j));
        }
        atoms.push(Atom {
            u: u.clone(),
            w: q * rho.powi(n as i32 + 1) / (n as f64 + 1.0),
        });
    }
    DiscreteSurfaceMeasure::new(atoms)
}

/// Curvature image of a body given by its radial function.
pub fn curvature_image_of(
    body: &dyn BodyOracle,
    grid: &SphereGrid,
) -> Result<DiscreteSurfaceMeasure> {
    curvature_image(&StarBodySample::from_oracle(body, grid)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random::random_polytope;
    use crate::geometry::Ball;
    use crate::measures::surface_measure;
    use crate::volumetrics::volume_exact;

    #[test]
    fn square_from_its_measure() {
        let mu = surface_measure(&Polytope::cube(2, 1.0).unwrap()).unwrap();
        let s = solve_minkowski(&mu, SolveOptions::default()).unwrap();
        assert!(s.residual <= 1e-6);
        assert!((volume_exact(&s.polytope) - 4.0).abs() < 1e-6);
    }

    #[test]
    fn cube_from_its_measure() {
        let mu = surface_measure(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        let s = solve_minkowski(&mu, SolveOptions::default()).unwrap();
        assert!(s.dropped_atoms.is_empty());
        assert!((volume_exact(&s.polytope) - 8.0).abs() < 1e-4 * 8.0);
    }

    #[test]
    fn random_round_trip() {
        let p = random_polytope(3, 21).unwrap();
        let mu = surface_measure(&p).unwrap();
        let s = solve_minkowski(&mu, SolveOptions::default()).unwrap();
        assert!(s.residual <= 1e-4);
        let v = volume_exact(&p);
        assert!((volume_exact(&s.polytope) - v).abs() < 1e-4 * v);
    }

    #[test]
    fn polygon_reconstruction_matches_solver() {
        let p = random_polytope(2, 3).unwrap();
        let mu = surface_measure(&p).unwrap();
        let direct = reconstruct_polygon(&mu).unwrap();
        assert!((volume_exact(&direct) - volume_exact(&p)).abs() < 1e-12);
    }

    #[test]
    fn averages() {
        let cube = surface_measure(&Polytope::cube(3, 0.5).unwrap()).unwrap();
        let same = blaschke_average(&cube, &cube, 0.5).unwrap();
        assert_eq!(same.len(), 6);
        assert!((same.mass() - 6.0).abs() < 1e-12);
        assert_eq!(blaschke_average(&cube, &cube, 1.0).unwrap(), cube);
        let ball = discretize_ball_measure(3, 200, 1, BallMode::Dn).unwrap();
        let avg = blaschke_average(&cube, &ball, 0.5).unwrap();
        let s_d3 = 3.0 * ball_volume(3).powf(1.0 / 3.0);
        assert!((avg.mass() - (6.0 + s_d3) / 2.0).abs() < 1e-12);
        assert!(avg.is_centered());
    }

    #[test]
    fn ball_measure_masses() {
        let mu = discretize_ball_measure(3, 100, 0, BallMode::Unit).unwrap();
        assert!((mu.mass() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let d4 = discretize_ball_measure(4, 100, 0, BallMode::Dn).unwrap();
        assert!((d4.mass() - 4.0 * ball_volume(4).powf(0.25)).abs() < 1e-12);
        assert!(discretize_ball_measure(3, 10, 0, BallMode::Unit).is_err());
    }

    #[test]
    fn curvature_image_of_cube() {
        let grid = SphereGrid::from_half(
            3,
            vec![
                UnitDirection::axis(3, 0),
                UnitDirection::from_slice(&[1.0, 1.0, 1.0]).unwrap(),
            ],
            0,
        )
        .unwrap();
        let mu = curvature_image_of(&Polytope::cube(3, 1.0).unwrap(), &grid).unwrap();
        let q = grid.weights()[0];
        assert!((mu.atoms()[0].w - q / 4.0).abs() < 1e-12);
        assert!((mu.atoms()[1].w - 9.0 * q / 4.0).abs() < 1e-12);
    }

    #[test]
    fn curvature_image_scaling() {
        let grid = SphereGrid::new(3, 50, 2).unwrap();
        let a = curvature_image_of(&Ball::new(3, 1.0).unwrap(), &grid).unwrap();
        let b = curvature_image_of(&Ball::new(3, 2.0).unwrap(), &grid).unwrap();
        for (x, y) in a.atoms().iter().zip(b.atoms()) {
            assert!((y.w - 16.0 * x.w).abs() < 1e-12 * y.w);
        }
    }
}
