//! Polar bodies, radial samples of star bodies, intersection bodies,
//! Busemann convexity checks and Santaló products.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::random::{chunked_sum, split_seed};
use crate::geometry::sphere::random_direction;
use crate::geometry::{
    ball_volume, BodyOracle, HPolytope, Polytope, SphereGrid, UnitDirection, Vector,
};
use crate::volumetrics::{section_volume, volume_exact};

/// Polar body: one facet `<v, x> <= 1` per vertex `v` of `p`.
pub fn polar(p: &Polytope) -> Result<Polytope> {
    if !p.origin_is_interior() {
        return Err(GeomError::OriginNotInterior);
    }
    let pts: Vec<Vector> = p
        .normals()
        .iter()
        .zip(p.offsets())
        .map(|(a, &b)| a.as_vector() / b)
        .collect();
    Polytope::from_points(&pts)
}

/// `(|P| |P°|)^{1/n}` for a symmetric polytope.
pub fn santalo_product(p: &Polytope) -> Result<f64> {
    if !p.is_symmetric() {
        return Err(GeomError::NotSymmetric);
    }
    let q = polar(p)?;
    Ok((volume_exact(p) * volume_exact(&q)).powf(1.0 / p.dim() as f64))
}

/// Radial function of a star body sampled on a sphere grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StarBodySample {
    grid: SphereGrid,
    radial: Vec<f64>,
    even: bool,
}

const EVEN_TOL: f64 = 1e-9;

#[derive(Serialize, Deserialize)]
struct SampleFile {
    grid_seed: u64,
    m: usize,
    n: usize,
    radial: Vec<f64>,
}

impl StarBodySample {
    pub fn new(grid: SphereGrid, radial: Vec<f64>) -> Result<Self> {
        if radial.len() != grid.len() {
            return Err(GeomError::DimensionMismatch {
                expected: grid.len(),
                found: radial.len(),
            });
        }
        if let Some(j) = radial.iter().position(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(GeomError::NonPositiveRadial(j));
        }
        let even = (0..grid.len()).all(|j| {
            let a = radial[j];
            let b = radial[grid.antipode(j)];
            (a - b).abs() <= EVEN_TOL * a.max(b)
        });
        Ok(Self { grid, radial, even })
    }

    pub fn from_oracle(body: &dyn BodyOracle, grid: &SphereGrid) -> Result<Self> {
        if body.dim() != grid.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: grid.dim(),
                found: body.dim(),
            });
        }
        let radial = grid.directions().iter().map(|u| body.radial(u)).collect();
        Self::new(grid.clone(), radial)
    }

    pub fn from_fn(grid: &SphereGrid, rho: impl Fn(&UnitDirection) -> f64) -> Result<Self> {
        Self::new(grid.clone(), grid.directions().iter().map(rho).collect())
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn radial(&self) -> &[f64] {
        &self.radial
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `(1/n) sum q_j rho_j^n`.
    pub fn volume(&self) -> f64 {
        let n = self.dim();
        self.grid
            .weights()
            .iter()
            .zip(&self.radial)
            .map(|(q, r)| q * r.powi(n as i32))
            .sum::<f64>()
            / n as f64
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.radial.iter().map(|r| c * r).collect(),
        )
    }

    /// Boundary points `rho_j u_j`.
    pub fn points(&self) -> Vec<Vector> {
        self.grid
            .directions()
            .iter()
            .zip(&self.radial)
            .map(|(u, r)| u.as_vector() * *r)
            .collect()
    }

    /// Convex hull of the boundary points.
    pub fn hull(&self) -> Result<Polytope> {
        Polytope::from_points(&self.points())
    }

    /// JSON with the grid given by its seed; only grids built by
    /// `SphereGrid::new` round-trip.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&SampleFile {
            grid_seed: self.grid.seed(),
            m: self.grid.len(),
            n: self.dim(),
            radial: self.radial.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: SampleFile = serde_json::from_str(text)?;
        Self::new(SphereGrid::new(f.n, f.m, f.grid_seed)?, f.radial)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Intersection body of a polytope: `rho(u) = |L ∩ u^perp|`, computed exactly.
pub fn intersection_body(l: &Polytope, grid: &SphereGrid) -> Result<StarBodySample> {
    if l.dim() != grid.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: grid.dim(),
            found: l.dim(),
        });
    }
    let half = grid.len() / 2;
    let mut radial = vec![0.0; grid.len()];
    for j in 0..half {
        // u and -u share the hyperplane
        let r = section_volume(l, &grid.directions()[j])?;
        radial[j] = r;
        radial[grid.antipode(j)] = r;
    }
    StarBodySample::new(grid.clone(), radial)
}

/// Intersection body of a membership oracle. Each section area is estimated
/// from uniform samples of an `(n-1)`-ball in `u^perp` containing the section.
pub fn intersection_body_mc(
    body: &(dyn BodyOracle + Sync),
    grid: &SphereGrid,
    samples: usize,
    seed: u64,
) -> Result<StarBodySample> {
    let n = grid.dim();
    if body.dim() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: body.dim(),
        });
    }
    if samples == 0 {
        return Err(GeomError::InvalidInput("need at least one sample".into()));
    }
    let r = body.bounding_half_width() * (n as f64).sqrt();
    let disk = ball_volume(n - 1) * r.powi(n as i32 - 1);
    let half = grid.len() / 2;
    let mut radial = vec![0.0; grid.len()];
    for j in 0..half {
        let u = grid.directions()[j].as_vector();
        let hits = chunked_sum(samples, split_seed(seed, j as u64), |rng, count| {
            let mut c = 0.0;
            for _ in 0..count {
                // direction in u^perp, radius with density ~ t^{n-2}
                let d = random_direction(n, rng).into_vector();
                let d = &d - u * d.dot(u);
                let norm = d.norm();
                if norm < 1e-12 {
                    continue;
                }
                let t: f64 = rand::Rng::random::<f64>(rng);
                let x = d * (r * t.powf(1.0 / (n as f64 - 1.0)) / norm);
                if body.contains(&x) {
                    c += 1.0;
                }
            }
            c
        });
        let v = disk * hits / samples as f64;
        radial[j] = v;
        radial[grid.antipode(j)] = v;
    }
    StarBodySample::new(grid.clone(), radial)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvexityCheck {
    pub convex: bool,
    /// Largest `(rho_hull - rho) / rho` over the grid.
    pub worst_violation: f64,
}

pub const BUSEMANN_TOL: f64 = 5e-3;

/// Compare the sampled radial function with that of the hull of the
/// boundary points. Samples of a convex body lie on the hull boundary.
pub fn busemann_convexity_check(s: &StarBodySample) -> Result<ConvexityCheck> {
    let n = s.dim();
    if !s.is_even() {
        return Err(GeomError::NotSymmetric);
    }
    if s.grid().len() < 10 * n * n {
        return Err(GeomError::InvalidInput(format!(
            "convexity check needs at least {} grid directions",
            10 * n * n
        )));
    }
    let hull = s.hull()?;
    let worst = s
        .grid()
        .directions()
        .iter()
        .zip(s.radial())
        .map(|(u, &r)| (hull.radial(u) - r) / r)
        .fold(0.0_f64, f64::max);
    Ok(ConvexityCheck {
        convex: worst <= BUSEMANN_TOL,
        worst_violation: worst,
    })
}

/// `max_j |rho_1(u_j) - rho_2(u_j)|` on a shared grid.
pub fn radial_distance(a: &StarBodySample, b: &StarBodySample) -> Result<f64> {
    if !a.grid().same_as(b.grid()) {
        return Err(GeomError::GridMismatch);
    }
    Ok(a.radial()
        .iter()
        .zip(b.radial())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Best containing intersection body found by the candidate search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OuterIbCertificate {
    /// `(|L| / |P|)^{1/n}` for the certified `L ⊇ P`.
    pub ratio: f64,
    /// Mixing parameter of the generator; `None` for the exact ball.
    pub t: Option<f64>,
    /// Factor applied to the candidate to make it contain `P`.
    pub scale: f64,
    /// Largest facet slack `<a, v> - b` of the vertices of `P`; at most zero.
    pub containment_slack: f64,
}

/// Upper bound on the outer volume-ratio distance from a symmetric polytope
/// to intersection bodies.
///
/// Candidates are the circumscribed ball (a ball is the intersection body of a
/// ball) and, for each `t` in `t_grid`, the intersection body of the polytope
/// `{x : <u, x> <= t h_P(u) + (1 - t) r}` over the grid and facet normals,
/// with `r` the volume radius of `P`. Each candidate is certified by
/// `P ⊆ s hull{rho_j u_j}`; its volume is the radial quadrature.
pub fn outer_ib_ratio(
    p: &Polytope,
    grid: &SphereGrid,
    t_grid: &[f64],
) -> Result<OuterIbCertificate> {
    let n = p.dim();
    let nf = n as f64;
    if !p.is_symmetric() {
        return Err(GeomError::NotSymmetric);
    }
    let vol = volume_exact(p);
    let big_r = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut best = OuterIbCertificate {
        ratio: (ball_volume(n) * big_r.powi(n as i32) / vol).powf(1.0 / nf),
        t: None,
        scale: big_r,
        containment_slack: p
            .vertices()
            .iter()
            .map(|v| v.norm() - big_r)
            .fold(f64::NEG_INFINITY, f64::max),
    };
    let r = (vol / ball_volume(n)).powf(1.0 / nf);
    for &t in t_grid {
        if !(0.0..=1.0).contains(&t) {
            return Err(GeomError::InvalidInput(format!(
                "mixing parameter {t} outside [0, 1]"
            )));
        }
        let mut normals: Vec<UnitDirection> = grid.directions().to_vec();
        normals.extend(p.normals().iter().cloned());
        let offsets: Vec<f64> = normals
            .iter()
            .map(|u| t * p.support(u) + (1.0 - t) * r)
            .collect();
        let gen = Polytope::from_hrep(&HPolytope::new(normals, offsets)?)?;
        let ib = intersection_body(&gen, grid)?;
        let hull = ib.hull()?;
        let s = p
            .vertices()
            .iter()
            .flat_map(|v| {
                hull.normals()
                    .iter()
                    .zip(hull.offsets())
                    .map(move |(a, b)| a.dot(v) / b)
            })
            .fold(0.0_f64, f64::max);
        let scaled = hull.scaled(s)?;
        let slack = p
            .vertices()
            .iter()
            .flat_map(|v| {
                scaled
                    .normals()
                    .iter()
                    .zip(scaled.offsets())
                    .map(move |(a, b)| a.dot(v) - b)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let ratio = s * (ib.volume() / vol).powf(1.0 / nf);
        if ratio < best.ratio {
            best = OuterIbCertificate {
                ratio,
                t: Some(t),
                scale: s,
                containment_slack: slack,
            };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random::{random_sl, random_symmetric_polytope, rng_from_seed};
    use crate::geometry::{Ball, LinearMap};
    use crate::volumetrics::{project, section, Flat, FlatBody};
    use std::f64::consts::PI;

    #[test]
    fn cube_polar_is_cross_polytope() {
        let q = polar(&Polytope::cube(3, 1.0).unwrap()).unwrap();
        assert!((volume_exact(&q) - 4.0 / 3.0).abs() < 1e-12);
        assert!(
            (santalo_product(&Polytope::cube(3, 1.0).unwrap()).unwrap() - (32.0_f64 / 3.0).cbrt())
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn polar_is_an_involution() {
        let p = random_symmetric_polytope(3, 4).unwrap();
        let pp = polar(&polar(&p).unwrap()).unwrap();
        assert!(crate::geometry::polytope::vertex_set_distance(&p, &pp) < 1e-9);
        let off = Polytope::cube(2, 1.0)
            .unwrap()
            .translated(&Vector::from_vec(vec![2.0, 0.0]))
            .unwrap();
        assert!(matches!(polar(&off), Err(GeomError::OriginNotInterior)));
    }

    #[test]
    fn polar_of_image() {
        let p = random_symmetric_polytope(3, 9).unwrap();
        let t = random_sl(3, &mut rng_from_seed(2));
        let lhs = polar(&p.apply_map(&t).unwrap()).unwrap();
        let rhs = polar(&p)
            .unwrap()
            .apply_map(&t.inverse_transpose().unwrap())
            .unwrap();
        assert!(crate::geometry::polytope::vertex_set_distance(&lhs, &rhs) < 1e-9);
        let a = santalo_product(&p).unwrap();
        let b = santalo_product(&p.apply_map(&t).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn polar_of_projection_is_section_of_polar() {
        let p = random_symmetric_polytope(3, 5).unwrap();
        let h = Flat::coordinate(3, &[0, 1]).unwrap();
        let proj = match project(&p, &h).unwrap() {
            FlatBody::Polytope(q) => q,
            _ => unreachable!(),
        };
        let sec = match section(&polar(&p).unwrap(), &h).unwrap() {
            FlatBody::Polytope(q) => q,
            _ => unreachable!(),
        };
        let lhs = polar(&proj).unwrap();
        assert!(crate::geometry::polytope::vertex_set_distance(&lhs, &sec) < 1e-8);
    }

    #[test]
    fn polar_of_degenerate_shadow() {
        // a 4-dimensional shadow whose polar has many points on each facet
        let half = [
            [
                -0.1919148389904881,
                -0.8585502103657897,
                -0.2982355854351735,
                0.09786463875908558,
            ],
            [
                0.09245882248663005,
                -0.22162468834519114,
                -0.6954791406675764,
                -0.4298727569532489,
            ],
            [
                0.36392145066305104,
                0.3172547999794394,
                -0.4260676951745686,
                0.13776276628900727,
            ],
            [
                0.581917714073658,
                -0.085446470897513,
                0.4027953886838596,
                0.5629880588399778,
            ],
            [
                0.7953540807221118,
                -0.17548388175818214,
                -0.13821526494331782,
                -0.3341975433044133,
            ],
            [
                0.6670219181753418,
                0.03889332368842065,
                -0.21292291404057082,
                -0.583420255361911,
            ],
            [
                0.47223974085762,
                -0.004603805555272428,
                -0.3944391978466846,
                0.6986332834705862,
            ],
            [
                0.6141702792054633,
                0.06879299415773885,
                0.5948594782121388,
                0.06826827730563068,
            ],
            [
                -0.4681544009990449,
                0.6993769539433932,
                0.08113674336277164,
                0.4148378590534691,
            ],
            [
                0.5229145960517799,
                0.5230036162797995,
                -0.023292291078738984,
                -0.5894141857173916,
            ],
        ];
        let pts: Vec<Vector> = half
            .iter()
            .flat_map(|v| [Vector::from_row_slice(v), -Vector::from_row_slice(v)])
            .collect();
        let p = Polytope::from_points(&pts).unwrap();
        let q = polar(&p).unwrap();
        assert_eq!(q.normals().len(), p.vertices().len());
        assert_eq!(q.vertices().len(), p.normals().len());
        let back = polar(&q).unwrap();
        assert!(crate::geometry::polytope::vertex_set_distance(&back, &p) < 1e-9);
    }

    #[test]
    fn cube_intersection_body() {
        let grid = SphereGrid::from_half(
            3,
            vec![
                UnitDirection::axis(3, 2),
                UnitDirection::from_slice(&[1.0, 1.0, 0.0]).unwrap(),
            ],
            0,
        )
        .unwrap();
        let cube = Polytope::cube(3, 1.0).unwrap();
        let ib = intersection_body(&cube, &grid).unwrap();
        assert!((ib.radial()[0] - 4.0).abs() < 1e-12);
        assert!((ib.radial()[1] - 4.0 * 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(ib.radial()[2], ib.radial()[0]);
        let ib2 = intersection_body(&cube.scaled(2.0).unwrap(), &grid).unwrap();
        for (a, b) in ib.radial().iter().zip(ib2.radial()) {
            assert!((b - 4.0 * a).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn ball_intersection_body_by_sampling() {
        let grid = SphereGrid::new(3, 20, 1).unwrap();
        let ib = intersection_body_mc(&Ball::unit(3).unwrap(), &grid, 40_000, 3).unwrap();
        for r in ib.radial() {
            assert!((r - PI).abs() < 0.05 * PI, "{r}");
        }
    }

    #[test]
    fn busemann_ball_and_nonconvex() {
        let grid = SphereGrid::new(3, 400, 7).unwrap();
        let ball = StarBodySample::from_oracle(&Ball::unit(3).unwrap(), &grid).unwrap();
        let c = busemann_convexity_check(&ball).unwrap();
        assert!(c.convex && c.worst_violation < 1e-9);
        let bumpy = StarBodySample::from_fn(&grid, |u| {
            1.0 + 0.5 * (u[0].powi(4) + u[1].powi(4) + u[2].powi(4))
        })
        .unwrap();
        assert!(!busemann_convexity_check(&bumpy).unwrap().convex);
    }

    #[test]
    fn busemann_intersection_body() {
        let grid = SphereGrid::new(3, 200, 3).unwrap();
        let l = random_symmetric_polytope(3, 12).unwrap();
        let ib = intersection_body(&l, &grid).unwrap();
        assert!(busemann_convexity_check(&ib).unwrap().convex);
    }

    #[test]
    fn radial_distances() {
        let grid = SphereGrid::new(3, 2000, 1).unwrap();
        let a = StarBodySample::from_oracle(&Ball::unit(3).unwrap(), &grid).unwrap();
        let b = a.scaled(1.25).unwrap();
        assert_eq!(radial_distance(&a, &a).unwrap(), 0.0);
        assert!((radial_distance(&a, &b).unwrap() - 0.25).abs() < 1e-12);
        let c = StarBodySample::from_oracle(&Polytope::cube(3, 1.0).unwrap(), &grid).unwrap();
        let d = radial_distance(&a, &c).unwrap();
        assert!(d <= 3.0_f64.sqrt() - 1.0 + 1e-12 && d > 3.0_f64.sqrt() - 1.0 - 0.05);
        let other = StarBodySample::from_oracle(
            &Ball::unit(3).unwrap(),
            &SphereGrid::new(3, 2000, 2).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            radial_distance(&a, &other),
            Err(GeomError::GridMismatch)
        ));
    }

    #[test]
    fn sample_volume_and_json() {
        let grid = SphereGrid::new(3, 2000, 4).unwrap();
        let s = StarBodySample::from_oracle(&Ball::new(3, 2.0).unwrap(), &grid).unwrap();
        assert!((s.volume() - 32.0 * PI / 3.0).abs() < 1e-9);
        let back = StarBodySample::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
        assert!(StarBodySample::new(grid.clone(), vec![0.0; 2000]).is_err());
    }

    #[test]
    fn outer_ratio_cube_and_scaling() {
        let grid = SphereGrid::new(3, 200, 5).unwrap();
        let cube = Polytope::cube(3, 1.0).unwrap();
        let ts = [0.25, 0.5, 0.75, 1.0];
        let a = outer_ib_ratio(&cube, &grid, &ts).unwrap();
        assert!(a.ratio <= 1.5 && a.containment_slack <= 1e-8);
        let b = outer_ib_ratio(&cube.scaled(2.0).unwrap(), &grid, &ts).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-6);
        let identity = LinearMap::identity(3);
        assert!(identity.is_special());
    }
}
