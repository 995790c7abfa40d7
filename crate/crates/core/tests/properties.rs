use proptest::prelude::*;

use cvxlab::geometry::random::{
    random_box, random_gl, random_polytope, random_sl, random_symmetric_polytope, rng_from_seed,
};
use cvxlab::geometry::sphere::random_direction;
use cvxlab::geometry::{Polytope, SphereGrid, Vector};
use cvxlab::measures::{
    isotropy_report, measure_compare, mixed_volume_n1, projection_volume_cauchy, surface_measure,
};
use cvxlab::star_bodies::polar;
use cvxlab::volumetrics::{projection_volume, section_volume, volume_exact};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn surface_measure_is_centered(n in 2usize..=5, seed in any::<u64>()) {
        let mu = surface_measure(&random_polytope(n, seed).unwrap()).unwrap();
        prop_assert!(mu.centering().norm() <= 1e-9 * mu.mass());
    }

    #[test]
    fn cauchy_matches_exact_shadow(n in 3usize..=5, seed in any::<u64>()) {
        let p = random_polytope(n, seed).unwrap();
        let mu = surface_measure(&p).unwrap();
        let u = random_direction(n, &mut rng_from_seed(seed ^ 1));
        let exact = projection_volume(&p, &u).unwrap();
        prop_assert!(rel(projection_volume_cauchy(&mu, &u), exact) <= 1e-9);
    }

    #[test]
    fn section_never_exceeds_shadow(n in 3usize..=5, seed in any::<u64>()) {
        let p = random_symmetric_polytope(n, seed).unwrap();
        let u = random_direction(n, &mut rng_from_seed(seed ^ 2));
        prop_assert!(section_volume(&p, &u).unwrap() <= projection_volume(&p, &u).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn volume_scales_with_determinant(n in 2usize..=4, seed in any::<u64>()) {
        let p = random_polytope(n, seed).unwrap();
        let t = random_gl(n, &mut rng_from_seed(seed ^ 3));
        let moved = p.apply_map(&t).unwrap();
        prop_assert!(rel(volume_exact(&moved), volume_exact(&p) * t.det().abs()) <= 1e-9);
    }

    #[test]
    fn translation_keeps_volume_and_measure(n in 2usize..=4, seed in any::<u64>(), shift in -2.0f64..2.0) {
        let p = random_polytope(n, seed).unwrap();
        let q = p.translated(&Vector::from_element(n, shift)).unwrap();
        prop_assert!(rel(volume_exact(&q), volume_exact(&p)) <= 1e-10);
        let a = surface_measure(&p).unwrap();
        let b = surface_measure(&q).unwrap();
        prop_assert!(rel(b.mass(), a.mass()) <= 1e-10);
    }

    #[test]
    fn minkowski_inequality_holds(n in 2usize..=4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let k = random_polytope(n, s1).unwrap();
        let l = random_polytope(n, s2).unwrap();
        let nf = n as f64;
        let v = mixed_volume_n1(&surface_measure(&k).unwrap(), |x| l.support(x));
        let bound = volume_exact(&k).powf((nf - 1.0) / nf) * volume_exact(&l).powf(1.0 / nf);
        prop_assert!(v >= bound * (1.0 - 1e-9));
    }

    #[test]
    fn boxes_are_loomis_whitney_extremal(n in 2usize..=5, seed in any::<u64>()) {
        let b = random_box(n, 0.1, 3.0, &mut rng_from_seed(seed)).unwrap();
        let mu = surface_measure(&b).unwrap();
        let prod: f64 = (0..n)
            .map(|i| projection_volume_cauchy(&mu, &cvxlab::geometry::UnitDirection::axis(n, i)))
            .product();
        prop_assert!(rel(prod, volume_exact(&b).powi(n as i32 - 1)) <= 1e-9);
    }

    #[test]
    fn polar_is_an_involution(n in 2usize..=4, seed in any::<u64>()) {
        let p = random_symmetric_polytope(n, seed).unwrap();
        let back = polar(&polar(&p).unwrap()).unwrap();
        prop_assert_eq!(back.num_vertices(), p.num_vertices());
        prop_assert!(rel(volume_exact(&back), volume_exact(&p)) <= 1e-9);
    }

    #[test]
    fn transform_law_for_mass(n in 2usize..=4, seed in any::<u64>()) {
        // S(TK) from the transformed measure equals the recomputed one
        let p = random_polytope(n, seed).unwrap();
        let t = random_sl(n, &mut rng_from_seed(seed ^ 4));
        let direct = surface_measure(&p.apply_map(&t).unwrap()).unwrap();
        let pushed = surface_measure(&p).unwrap().transformed(&t).unwrap();
        prop_assert!(rel(pushed.mass(), direct.mass()) <= 1e-9);
        let a = isotropy_report(&pushed).moment_matrix;
        let b = isotropy_report(&direct).moment_matrix;
        prop_assert!((a - b).norm() <= 1e-9 * direct.mass());
    }

    #[test]
    fn scaled_measure_is_dominated(n in 2usize..=4, seed in any::<u64>(), c in 0.05f64..0.95) {
        let mu = surface_measure(&random_polytope(n, seed).unwrap()).unwrap();
        let cmp = measure_compare(&mu.scaled(c).unwrap(), &mu);
        prop_assert!(cmp.dominated);
        let w_min = mu.weights().into_iter().fold(f64::INFINITY, f64::min);
        let w_max = mu.weights().into_iter().fold(0.0, f64::max);
        prop_assert!(rel(cmp.epsilon_min, (1.0 - c) * w_min) <= 1e-9);
        prop_assert!(rel(cmp.epsilon_max, (1.0 - c) * w_max) <= 1e-9);
    }

    #[test]
    fn sphere_grid_is_antipodal(n in 2usize..=6, half in 4usize..40, seed in any::<u64>()) {
        let m = 2 * half.max(n);
        let g = SphereGrid::new(n, m, seed).unwrap();
        for i in 0..m {
            let j = g.antipode(i);
            prop_assert!((g.directions()[i].as_vector() + g.directions()[j].as_vector()).norm() <= 1e-12);
        }
        let area = cvxlab::geometry::sphere_area(n);
        prop_assert!(rel(g.total_weight(), area) <= 1e-12);
    }

    #[test]
    fn cube_support_is_l1_norm(n in 2usize..=6, a in 0.1f64..3.0, seed in any::<u64>()) {
        let c = Polytope::cube(n, a).unwrap();
        let u = random_direction(n, &mut rng_from_seed(seed));
        let l1: f64 = u.iter().map(|x| x.abs()).sum();
        prop_assert!(rel(c.support(u.as_vector()), a * l1) <= 1e-12);
    }
}
