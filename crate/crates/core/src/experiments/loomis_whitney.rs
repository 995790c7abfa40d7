//! Loomis–Whitney and its reverse through minimal surface position.

use rand::Rng;

use super::{check_range, stream, unit_volume, Check, ExperimentReport};
use crate::error::Result;
use crate::geometry::random::{random_box, random_polytope, rng_from_seed};
use crate::geometry::{LinearMap, SphereGrid, UnitDirection, Vector};
use crate::measures::{
    isotropy_report, projection_volume_cauchy, surface_measure, DiscreteSurfaceMeasure,
};
use crate::positions::{minimal_surface_position_of_measure, PositionOptions};
use crate::volumetrics::volume_exact;

/// `prod_i |K|e_i^perp| / |K|^{n-1}` over an orthonormal frame.
fn frame_ratio(mu: &DiscreteSurfaceMeasure, vol: f64, frame: &[UnitDirection]) -> f64 {
    let n = mu.dim() as f64;
    frame
        .iter()
        .map(|u| projection_volume_cauchy(mu, u) / vol.powf((n - 1.0) / n))
        .product()
}

fn standard_frame(n: usize) -> Vec<UnitDirection> {
    (0..n).map(|i| UnitDirection::axis(n, i)).collect()
}

pub fn exp_loomis_whitney(n: usize, trials: usize, seed: u64) -> ExperimentReport {
    ExperimentReport::run("loomis_whitney", &[n], seed, |rep| {
        check_range("loomis_whitney", n, 3, 6)?;
        rep.param("trials", trials);
        let frame = standard_frame(n);
        let mut slacks = Vec::with_capacity(trials);
        for t in 0..trials as u64 {
            let p = random_polytope(n, stream(seed, 0, n, t))?;
            let mu = surface_measure(&p)?;
            slacks.push(frame_ratio(&mu, volume_exact(&p), &frame) - 1.0);
        }
        let boxes = 20;
        rep.param("boxes", boxes);
        let mut box_gap = 0.0_f64;
        for t in 0..boxes {
            let mut rng = rng_from_seed(stream(seed, 1, n, t));
            let b = random_box(n, 0.1, 3.0, &mut rng)?;
            let mu = surface_measure(&b)?;
            box_gap = box_gap.max((frame_ratio(&mu, volume_exact(&b), &frame) - 1.0).abs());
        }
        // aspect ratio 10^3
        let mut squash = vec![1.0; n];
        squash[n - 1] = 1e-3;
        let thin =
            random_polytope(n, stream(seed, 2, n, 0))?.apply_map(&LinearMap::diagonal(&squash)?)?;
        let thin_slack = frame_ratio(&surface_measure(&thin)?, volume_exact(&thin), &frame) - 1.0;

        rep.distribution("slack", &slacks);
        rep.scalar("thin_slack", thin_slack);
        let worst = slacks.iter().copied().fold(f64::INFINITY, f64::min);
        rep.check("loomis_whitney.slack", Check::at_least(worst, -1e-9));
        rep.check(
            "loomis_whitney.box_equality_gap",
            Check::at_most(box_gap, 1e-9),
        );
        rep.check(
            "loomis_whitney.thin_slack",
            Check::at_least(thin_slack, -1e-9),
        );
        Ok(())
    })
}

/// Artifact constant for the reverse inequality at desk dimensions.
pub const REVERSE_LW_CONSTANT: f64 = 3.0;

/// For each body: minimal surface position `M = T K`, the Cauchy–Schwarz
/// bound `|M|u^perp| <= S(M)/(2 sqrt n) * sqrt(1 + defect)` on a grid, and
/// the product over the frame that diagonalizes `T`. Writing `T = U P` with
/// `P = V diag(s) V^T`, the body `diag(s) V^T K` is a rotation of `M`, so
/// `prod |K|v_i^perp| = prod |M'|e_i^perp|` is bounded by the same quantity.
pub fn exp_reverse_lw(n: usize, trials: usize, seed: u64) -> ExperimentReport {
    ExperimentReport::run("reverse_lw", &[n], seed, |rep| {
        check_range("reverse_lw", n, 3, 5)?;
        rep.param("trials", trials);
        let grid = SphereGrid::new(n, 20 * n * n, stream(seed, 1, n, 0))?;
        rep.param("grid_m", grid.len());
        let nf = n as f64;
        let frame = standard_frame(n);
        let mut chain_slack = f64::INFINITY;
        let mut product_slack = f64::INFINITY;
        let mut max_defect = 0.0_f64;
        let mut ratios = Vec::with_capacity(trials);
        let mut standard_ratios = Vec::with_capacity(trials);
        for t in 0..trials as u64 {
            let mut rng = rng_from_seed(stream(seed, 0, n, t));
            let k = unit_volume(&random_polytope(n, rng.random())?)?;
            let mu = surface_measure(&k)?;
            let pos = minimal_surface_position_of_measure(&mu, 1.0, PositionOptions::default())?;
            let mu_m = mu.transformed(&pos.map)?;
            let defect = isotropy_report(&mu_m).defect;
            max_defect = max_defect.max(defect);
            let bound = mu_m.mass() / (2.0 * nf.sqrt()) * (1.0 + defect).sqrt();
            for u in grid.directions() {
                chain_slack = chain_slack.min((bound - projection_volume_cauchy(&mu_m, u)) / bound);
            }

            let svd = pos.map.matrix().clone().svd(false, true);
            let v_t = svd.v_t.expect("requested");
            let diag_frame: Vec<UnitDirection> = (0..n)
                .map(|i| {
                    UnitDirection::normalize(Vector::from_iterator(n, v_t.row(i).iter().copied()))
                })
                .collect::<Result<_>>()?;
            let prod = frame_ratio(&mu, 1.0, &diag_frame);
            product_slack = product_slack.min((bound.powi(n as i32) - prod) / bound.powi(n as i32));
            ratios.push(prod.powf(1.0 / nf) / nf.sqrt());
            standard_ratios.push(frame_ratio(&mu, 1.0, &frame).powf(1.0 / nf) / nf.sqrt());
        }
        rep.distribution("ratio", &ratios);
        rep.distribution("standard_frame_ratio", &standard_ratios);
        rep.scalar("max_defect", max_defect);
        let worst = ratios.iter().copied().fold(0.0, f64::max);
        rep.check(
            "reverse_loomis_whitney.chain_slack",
            Check::at_least(chain_slack, -1e-9),
        );
        rep.check(
            "reverse_loomis_whitney.product_slack",
            Check::at_least(product_slack, -1e-9),
        );
        rep.check(
            "reverse_loomis_whitney.ratio",
            Check::at_most(worst, REVERSE_LW_CONSTANT),
        );
        rep.check(
            "petty_isotropy.position_defect",
            Check::at_most(max_defect, 1e-3),
        );
        Ok(())
    })
}
