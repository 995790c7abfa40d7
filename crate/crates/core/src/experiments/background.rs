//! Identities and inequalities the other experiments lean on: Cauchy's
//! projection formula, the mixed-volume representation of volume, the
//! Minkowski inequality, polar duality, minimal surface position and the
//! curvature image.

use rand::Rng;

use super::{check_range, random_subspace, stream, unit_volume, Check, ExperimentReport};
use crate::error::Result;
use crate::geometry::bodies::unit_volume_ball_radius;
use crate::geometry::polytope::vertex_set_distance;
use crate::geometry::random::{
    random_polytope, random_sl, random_symmetric_polytope, rng_from_seed,
};
use crate::geometry::sphere::random_direction;
use crate::geometry::{ball_volume, Ball, Polytope, SphereGrid, Vector};
use crate::measures::{mixed_volume_n1, projection_volume_cauchy, surface_measure};
use crate::minkowski::curvature_image;
use crate::positions::{minimal_surface_position, second_moments, PositionOptions};
use crate::star_bodies::{polar, StarBodySample};
use crate::volumetrics::{
    flat_body_distance, project, projection_volume, section, volume_exact, FlatBody,
};

pub fn exp_background(dims: &[usize], trials: usize, seed: u64) -> ExperimentReport {
    ExperimentReport::run("background", dims, seed, |rep| {
        rep.param("trials", trials);
        let mut worst = Worst {
            minkowski_slack: f64::INFINITY,
            ..Worst::default()
        };
        for &n in dims {
            check_range("background", n, 3, 6)?;
            for t in 0..trials as u64 {
                trial(n, stream(seed, 0, n, t), &mut worst)?;
            }
            curvature_images(n, &mut worst)?;
        }
        rep.distribution("minkowski_ratio", &worst.minkowski_ratios);
        rep.distribution("surface_position_gain", &worst.position_gains);
        rep.check(
            "projection_body.cauchy_rel_err",
            Check::at_most(worst.cauchy, 1e-9),
        );
        rep.check(
            "mixed_volume.volume_rel_err",
            Check::at_most(worst.mixed, 1e-9),
        );
        rep.check(
            "minkowski_inequality.slack",
            Check::at_least(worst.minkowski_slack, -1e-9),
        );
        rep.check(
            "minkowski_inequality.homothetic_gap",
            Check::at_most(worst.homothetic, 1e-9),
        );
        rep.check(
            "polar_identities.projection_section",
            Check::at_most(worst.polar_section, 1e-9),
        );
        rep.check(
            "polar_identities.linear_image",
            Check::at_most(worst.polar_map, 1e-9),
        );
        rep.check(
            "petty_isotropy.defect",
            Check::at_most(worst.petty_defect, 1e-3),
        );
        rep.check(
            "petty_isotropy.skewed_cube_rel_err",
            Check::at_most(worst.skewed_cube, 5e-3),
        );
        rep.check(
            "curvature_image.scaling_rel_err",
            Check::at_most(worst.image_scaling, 1e-12),
        );
        rep.check(
            "curvature_image.ball_moment_rel_err",
            Check::at_most(worst.image_moment, 1e-12),
        );
        Ok(())
    })
}

#[derive(Default)]
struct Worst {
    cauchy: f64,
    mixed: f64,
    minkowski_slack: f64,
    minkowski_ratios: Vec<f64>,
    homothetic: f64,
    polar_section: f64,
    polar_map: f64,
    petty_defect: f64,
    position_gains: Vec<f64>,
    skewed_cube: f64,
    image_scaling: f64,
    image_moment: f64,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn trial(n: usize, s: u64, worst: &mut Worst) -> Result<()> {
    let mut rng = rng_from_seed(s);
    let k = random_polytope(n, rng.random())?;
    let mu_k = surface_measure(&k)?;
    let vol_k = volume_exact(&k);

    let u = random_direction(n, &mut rng);
    worst.cauchy = worst.cauchy.max(rel(
        projection_volume_cauchy(&mu_k, &u),
        projection_volume(&k, &u)?,
    ));

    // volume from the triangulation, independent of the facet areas
    let tri_vol = second_moments(&k).1;
    let v_kk = mixed_volume_n1(&mu_k, |x| k.support(x));
    worst.mixed = worst.mixed.max(rel(v_kk, tri_vol));

    let l = random_polytope(n, rng.random())?;
    let nf = n as f64;
    let v_kl = mixed_volume_n1(&mu_k, |x| l.support(x));
    let ratio = v_kl / (vol_k.powf((nf - 1.0) / nf) * volume_exact(&l).powf(1.0 / nf));
    worst.minkowski_ratios.push(ratio);
    worst.minkowski_slack = worst.minkowski_slack.min(ratio - 1.0);

    let a: f64 = rng.random_range(0.3..3.0);
    let shift = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let h = k.scaled(a)?.translated(&shift)?;
    let v_kh = mixed_volume_n1(&mu_k, |x| h.support(x));
    let eq = v_kh / (vol_k.powf((nf - 1.0) / nf) * volume_exact(&h).powf(1.0 / nf));
    worst.homothetic = worst.homothetic.max((eq - 1.0).abs());

    let sym = random_symmetric_polytope(n, rng.random())?;
    let dim_h = rng.random_range(2..n);
    let hflat = random_subspace(n, dim_h, &mut rng)?;
    if let (FlatBody::Polytope(shadow), FlatBody::Polytope(cut)) =
        (project(&sym, &hflat)?, section(&polar(&sym)?, &hflat)?)
    {
        let d = flat_body_distance(
            &FlatBody::Polytope(polar(&shadow)?),
            &FlatBody::Polytope(cut),
        );
        worst.polar_section = worst.polar_section.max(d / polar(&shadow)?.scale());
    }
    let t = random_sl(n, &mut rng);
    let lhs = polar(&sym.apply_map(&t)?)?;
    let rhs = polar(&sym)?.apply_map(&t.inverse_transpose()?)?;
    worst.polar_map = worst
        .polar_map
        .max(vertex_set_distance(&lhs, &rhs) / lhs.scale());

    let body = unit_volume(&k)?;
    let pos = minimal_surface_position(&body, PositionOptions::default())?;
    worst.petty_defect = worst.petty_defect.max(pos.defect);
    worst
        .position_gains
        .push(pos.initial_objective / pos.objective);

    let cube = Polytope::cube(n, 0.5)?.apply_map(&random_sl(n, &mut rng))?;
    let pos = minimal_surface_position(&cube, PositionOptions::default())?;
    worst.skewed_cube = worst.skewed_cube.max(rel(pos.objective, 2.0 * nf));
    Ok(())
}

/// The curvature image of a star body has surface measure `rho^{n+1}/(n+1)`,
/// so its total mass is `int_K |x| dx`; for `D_n` that is
/// `n omega_n r^{n+1} / (n+1)`.
fn curvature_images(n: usize, worst: &mut Worst) -> Result<()> {
    let grid = SphereGrid::new(n, 20 * n * n, 11)?;
    let ball = StarBodySample::from_oracle(&Ball::unit_volume(n)?, &grid)?;
    let base = curvature_image(&ball)?.mass();
    let scaled = curvature_image(&ball.scaled(1.7)?)?.mass();
    worst.image_scaling = worst
        .image_scaling
        .max(rel(scaled / base, 1.7f64.powi(n as i32 + 1)));
    let r = unit_volume_ball_radius(n);
    let nf = n as f64;
    let moment = nf * ball_volume(n) * r.powi(n as i32 + 1) / (nf + 1.0);
    worst.image_moment = worst.image_moment.max(rel(base, moment));
    Ok(())
}
