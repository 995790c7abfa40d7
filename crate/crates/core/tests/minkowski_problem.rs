use cvxlab::geometry::random::{random_polytope, random_polytope_with};
use cvxlab::geometry::{ball_volume, Matrix, Polytope, Vector};
use cvxlab::measures::surface_measure;
use cvxlab::minkowski::{
    discretize_ball_measure, reconstruct_polygon, solve_minkowski, BallMode, SolveOptions,
};
use cvxlab::volumetrics::volume_exact;

/// Largest relative support-number error after the best translation.
fn support_error_up_to_translation(p: &Polytope, h: &[f64]) -> f64 {
    let n = p.dim();
    let m = h.len();
    let a = Matrix::from_fn(m, n, |i, j| p.normals()[i][j]);
    let d = Vector::from_fn(m, |i, _| h[i] - p.offsets()[i]);
    let t = a.clone().svd(true, true).solve(&d, 1e-12).unwrap();
    let fit = &a * t;
    (0..m)
        .map(|i| (d[i] - fit[i]).abs() / p.offsets().iter().cloned().fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

#[test]
fn random_three_polytopes_round_trip() {
    for seed in 0..50 {
        let p = random_polytope(3, 1000 + seed).unwrap();
        let mu = surface_measure(&p).unwrap();
        let s = solve_minkowski(&mu, SolveOptions::default())
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(s.dropped_atoms.is_empty(), "seed {seed}");
        let err = support_error_up_to_translation(&p, &s.support_numbers);
        assert!(err <= 1e-4, "seed {seed}: {err}");
    }
}

#[test]
fn planar_solver_matches_direct_reconstruction() {
    for seed in 0..100 {
        let p = random_polytope_with(2, 6 + (seed as usize % 7), 2000 + seed).unwrap();
        let mu = surface_measure(&p).unwrap();
        let direct = reconstruct_polygon(&mu).unwrap();
        let s = solve_minkowski(&mu, SolveOptions::default()).unwrap();
        let h: Vec<f64> = mu.normals().iter().map(|u| direct.support(u)).collect();
        let err = support_error_up_to_translation(&s.polytope, &h);
        assert!(err <= 1e-6, "seed {seed}: {err}");
    }
}

#[test]
fn ball_measure_gives_ball_volume() {
    let mu = discretize_ball_measure(3, 200, 9, BallMode::Unit).unwrap();
    let s = solve_minkowski(&mu, SolveOptions::default()).unwrap();
    let v = volume_exact(&s.polytope);
    let b = ball_volume(3);
    assert!((v - b).abs() <= 0.05 * b, "{v} vs {b}");
}
