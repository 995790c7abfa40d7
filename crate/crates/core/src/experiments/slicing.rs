//! Ingredients of the slicing chain, checked on isotropic symmetric
//! polytopes: the Fubini decomposition, Hensley's section bounds, the
//! isotropic position itself, polar volumes, intersection bodies and
//! projections.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{check_range, random_subspace, stream, unit_volume, Check, ExperimentReport};
use crate::geometry::random::{random_sl, random_symmetric_polytope, rng_from_seed};
use crate::geometry::sphere::random_direction;
use crate::geometry::{ball_volume, Polytope, SphereGrid, UnitDirection, Vector};
use crate::measures::{projection_volume_cauchy, surface_measure};
use crate::positions::{isotropic_position, second_moments};
use crate::star_bodies::{
    busemann_convexity_check, intersection_body, santalo_product, BUSEMANN_TOL,
};
use crate::volumetrics::{
    fubini_check, project, projection_volume, section_volume, Flat, FUBINI_SET_TOL,
    FUBINI_VOLUME_TOL,
};

/// For symmetric `K` of unit volume, `1/12 <= |K ∩ u^perp|^2 int <x,u>^2 <= 1/2`.
const HENSLEY_BAND: (f64, f64) = (0.288_675_134_594_812_9, std::f64::consts::FRAC_1_SQRT_2);
/// Artifact band for the same product and for the largest section.
const HENSLEY_ARTIFACT_BAND: (f64, f64) = (0.2, 1.2);
/// Artifact band for hyperplane projections in isotropic position.
const PROJECTION_BAND: (f64, f64) = (1.0 / 3.0, 3.0);

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn exp_slicing(n: usize, trials: usize, seed: u64) -> ExperimentReport {
    ExperimentReport::run("slicing", &[n], seed, |rep| {
        check_range("slicing", n, 3, 5)?;
        rep.param("trials", trials);
        let nf = n as f64;
        let directions = 8;
        rep.param("directions_per_trial", directions);
        let grid = SphereGrid::new(n, 10 * n * n, stream(seed, 1, n, 0))?;

        let mut fubini_set = 0.0_f64;
        let mut fubini_vol = 0.0_f64;
        let mut hensley = Vec::new();
        let mut max_section = f64::INFINITY;
        let mut l_k = Vec::with_capacity(trials);
        let mut iso_defect = 0.0_f64;
        let mut variational = f64::INFINITY;
        let mut projections = Vec::new();
        let mut shadow_over_section = f64::INFINITY;
        let mut santalo = Vec::with_capacity(trials);
        let mut busemann = 0.0_f64;
        let mut box_rho = 0.0_f64;
        let mut cauchy = 0.0_f64;

        for t in 0..trials as u64 {
            let mut rng = rng_from_seed(stream(seed, 0, n, t));
            let p = random_symmetric_polytope(n, rng.random())?;
            let iso = isotropic_position(&p)?;
            let k = unit_volume(&p.apply_map(&iso.position.map)?)?;
            l_k.push(iso.l_k);

            let (c, vol) = second_moments(&k);
            let c = c / vol;
            iso_defect = iso_defect.max(iso.position.defect);
            // tr(S C S^T) >= tr(C) for S in SL(n) once C is scalar
            for _ in 0..4 {
                let s = random_sl(n, &mut rng);
                let moved = s.matrix() * &c * s.matrix().transpose();
                variational = variational.min(moved.trace() / c.trace() - 1.0);
            }

            let mu = surface_measure(&k)?;
            let mut widest = 0.0_f64;
            for _ in 0..directions {
                let u = random_direction(n, &mut rng);
                let cut = section_volume(&k, &u)?;
                hensley.push(cut * u.dot(&(&c * u.as_vector())).sqrt());
                widest = widest.max(cut);
                let shadow = projection_volume(&k, &u)?;
                // |K|H|^{1/dim H}, hyperplanes here and a lower-dimensional H below
                projections.push(shadow.powf(1.0 / (nf - 1.0)));
                shadow_over_section = shadow_over_section.min(shadow / cut);
                cauchy = cauchy.max((projection_volume_cauchy(&mu, &u) - shadow).abs() / shadow);
            }
            max_section = max_section.min(widest);

            let dim_h = rng.random_range(2..n);
            let h = random_subspace(n, dim_h, &mut rng)?;
            let coeffs = Vector::from_fn(dim_h, |_, _| rng.sample::<f64, _>(StandardNormal));
            projections.push(project(&k, &h)?.volume().powf(1.0 / dim_h as f64));
            let g = Flat::spanned(&[h.lift(&coeffs)], None)?;
            let f = fubini_check(&k, &h, &g)?;
            fubini_set = fubini_set.max(f.hausdorff);
            fubini_vol = fubini_vol.max((f.lhs - f.rhs).abs() / f.lhs);

            santalo.push(santalo_product(&k)?);
            let ib = intersection_body(&k, &grid)?;
            busemann = busemann.max(busemann_convexity_check(&ib)?.worst_violation);

            // |B ∩ e_i^perp| = |B| / (2 a_i) for the box with half widths a_i
            let half: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
            let b = Polytope::box_from_half_widths(&half)?;
            let axes =
                SphereGrid::from_half(n, (0..n).map(|i| UnitDirection::axis(n, i)).collect(), 0)?;
            let vol_b: f64 = half.iter().map(|a| 2.0 * a).product();
            for (i, r) in intersection_body(&b, &axes)?.radial()[..n]
                .iter()
                .enumerate()
            {
                box_rho = box_rho.max((r - vol_b / (2.0 * half[i])).abs() / r);
            }
        }

        rep.distribution("l_k", &l_k);
        rep.distribution("hensley_product", &hensley);
        rep.distribution("projection_root", &projections);
        rep.distribution("santalo", &santalo);
        // smallest, over bodies, of the largest tested section
        rep.scalar("max_section", max_section);
        if trials == 0 {
            return Ok(());
        }
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rep.check(
            "fubini_claim.hausdorff",
            Check::at_most(fubini_set, FUBINI_SET_TOL),
        );
        rep.check(
            "fubini_claim.volume_rel_err",
            Check::at_most(fubini_vol, FUBINI_VOLUME_TOL),
        );
        rep.check(
            "hensley.sharp_lower",
            Check::at_least(min(&hensley), HENSLEY_BAND.0 - 1e-9),
        );
        rep.check(
            "hensley.sharp_upper",
            Check::at_most(max(&hensley), HENSLEY_BAND.1 + 1e-9),
        );
        rep.check(
            "hensley.band_lower",
            Check::at_least(min(&hensley), HENSLEY_ARTIFACT_BAND.0),
        );
        rep.check(
            "hensley.band_upper",
            Check::at_most(max(&hensley), HENSLEY_ARTIFACT_BAND.1),
        );
        rep.check(
            "hensley.max_section",
            Check::at_least(max_section, HENSLEY_ARTIFACT_BAND.0),
        );
        rep.check(
            "isotropic_position.defect",
            Check::at_most(iso_defect, 1e-9),
        );
        rep.check(
            "isotropic_position.variational",
            Check::at_least(variational, -1e-9),
        );
        rep.check(
            "small_projections.lower",
            Check::at_least(min(&projections), PROJECTION_BAND.0),
        );
        rep.check(
            "small_projections.upper",
            Check::at_most(max(&projections), PROJECTION_BAND.1),
        );
        rep.check(
            "small_projections.contains_section",
            Check::at_least(shadow_over_section, 1.0 - 1e-9),
        );
        let mahler = (4f64.powi(n as i32) / factorial(n)).powf(1.0 / nf);
        let blaschke = ball_volume(n).powf(2.0 / nf);
        rep.check(
            "santalo.lower",
            Check::at_least(min(&santalo), mahler - 1e-9),
        );
        rep.check(
            "santalo.upper",
            Check::at_most(max(&santalo), blaschke + 1e-9),
        );
        rep.check(
            "busemann_convexity.intersection_body",
            Check::at_most(busemann, BUSEMANN_TOL),
        );
        rep.check(
            "intersection_body.box_closed_form",
            Check::at_most(box_rho, 1e-12),
        );
        rep.check(
            "projection_formula.cauchy_rel_err",
            Check::at_most(cauchy, 1e-9),
        );

        let failed = rep.checks.values().filter(|c| !c.pass).count();
        rep.check(
            "slicing_chain.ingredients",
            Check::at_most(failed as f64, 0.0),
        );
        Ok(())
    })
}
