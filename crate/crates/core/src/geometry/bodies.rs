//! Standard bodies and membership/support/radial oracles.

use std::str::FromStr;

use super::linalg::{ball_volume, check_dim, Vector};
use super::polytope::Polytope;
use crate::error::{GeomError, Result};

/// Evaluators for a convex body containing the origin in its interior.
pub trait BodyOracle {
    fn dim(&self) -> usize;
    fn contains(&self, x: &Vector) -> bool;
    /// `h_K(x) = max_{y in K} <x, y>`.
    fn support(&self, x: &Vector) -> f64;
    /// `rho_K(u) = max{t >= 0 : t u in K}`.
    fn radial(&self, u: &Vector) -> f64;
    /// Half width of an origin-centered cube containing the body.
    fn bounding_half_width(&self) -> f64;
}

/// Euclidean ball of the given radius centered at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub n: usize,
    pub radius: f64,
}

impl Ball {
    pub fn new(n: usize, radius: f64) -> Result<Self> {
        check_dim(n)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GeomError::InvalidInput(
                "ball radius must be positive".into(),
            ));
        }
        Ok(Self { n, radius })
    }

    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, 1.0)
    }

    /// `D_n`, the ball of volume one: radius `ω_n^{-1/n}`.
    pub fn unit_volume(n: usize) -> Result<Self> {
        Self::new(n, unit_volume_ball_radius(n))
    }

    pub fn volume(&self) -> f64 {
        ball_volume(self.n) * self.radius.powi(self.n as i32)
    }

    pub fn surface_area(&self) -> f64 {
        self.n as f64 * ball_volume(self.n) * self.radius.powi(self.n as i32 - 1)
    }
}

pub fn unit_volume_ball_radius(n: usize) -> f64 {
    ball_volume(n).powf(-1.0 / n as f64)
}

impl BodyOracle for Ball {
    fn dim(&self) -> usize {
        self.n
    }
    fn contains(&self, x: &Vector) -> bool {
        x.norm_squared() <= self.radius * self.radius
    }
    fn support(&self, x: &Vector) -> f64 {
        self.radius * x.norm()
    }
    fn radial(&self, u: &Vector) -> f64 {
        self.radius / u.norm()
    }
    fn bounding_half_width(&self) -> f64 {
        self.radius
    }
}

/// `rB_2^n ∩ sB_∞^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallCube {
    pub ball: Ball,
    pub s: f64,
}

impl BallCube {
    pub fn new(ball: Ball, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(GeomError::InvalidInput(
                "cube half width must be positive".into(),
            ));
        }
        Ok(Self { ball, s })
    }
}

impl BodyOracle for BallCube {
    fn dim(&self) -> usize {
        self.ball.n
    }
    fn contains(&self, x: &Vector) -> bool {
        self.ball.contains(x) && x.amax() <= self.s
    }
    fn support(&self, x: &Vector) -> f64 {
        // maximize <x, y> over |y|_inf <= s, |y|_2 <= r: clip the scaled direction
        // coordinatewise; the optimum has y_i = sign(x_i) min(s, t|x_i|).
        let r = self.ball.radius;
        let s = self.s;
        let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        if abs.iter().all(|&a| a == 0.0) {
            return 0.0;
        }
        let corner_sq = s * s * abs.iter().filter(|&&a| a > 0.0).count() as f64;
        if corner_sq <= r * r {
            return s * abs.iter().sum::<f64>();
        }
        let norm_at = |t: f64| abs.iter().map(|&a| (t * a).min(s).powi(2)).sum::<f64>();
        let (mut lo, mut hi) = (0.0, 1.0);
        while norm_at(hi) < r * r {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm_at(mid) < r * r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        abs.iter().map(|&a| a * (hi * a).min(s)).sum()
    }
    fn radial(&self, u: &Vector) -> f64 {
        (self.ball.radius / u.norm()).min(self.s / u.amax())
    }
    fn bounding_half_width(&self) -> f64 {
        self.ball.radius.min(self.s)
    }
}

impl BodyOracle for Polytope {
    fn dim(&self) -> usize {
        Polytope::dim(self)
    }
    fn contains(&self, x: &Vector) -> bool {
        Polytope::contains(self, x, 0.0)
    }
    fn support(&self, x: &Vector) -> f64 {
        Polytope::support(self, x)
    }
    fn radial(&self, u: &Vector) -> f64 {
        self.normals()
            .iter()
            .zip(self.offsets())
            .filter_map(|(a, &b)| {
                let d = a.dot(u);
                (d > 0.0).then(|| b / d)
            })
            .fold(f64::INFINITY, f64::min)
    }
    fn bounding_half_width(&self) -> f64 {
        self.vertices()
            .iter()
            .map(|v| v.amax())
            .fold(0.0_f64, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StandardKind {
    /// `C_n = [-1/2, 1/2]^n`.
    CubeVol1,
    /// `[-1, 1]^n`.
    CubePm1,
    CrossPolytope,
    /// Unit Euclidean ball.
    BallB2,
    /// Euclidean ball of volume one.
    BallDn,
    /// `[-s, s]^n`.
    LinfBall(f64),
}

impl FromStr for StandardKind {
    type Err = GeomError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube_vol1" => Ok(Self::CubeVol1),
            "cube_pm1" => Ok(Self::CubePm1),
            "cross_polytope" => Ok(Self::CrossPolytope),
            "ball_B2" | "ball_b2" => Ok(Self::BallB2),
            "ball_D_n" | "ball_dn" => Ok(Self::BallDn),
            other => {
                if let Some(arg) = other
                    .strip_prefix("linf_ball(")
                    .and_then(|r| r.strip_suffix(')'))
                {
                    let v: f64 = arg
                        .trim()
                        .parse()
                        .map_err(|_| GeomError::UnknownKind(other.to_string()))?;
                    Ok(Self::LinfBall(v))
                } else {
                    Err(GeomError::UnknownKind(other.to_string()))
                }
            }
        }
    }
}

/// A named standard body: polytopes exactly, balls as oracles.
#[derive(Clone, Debug)]
pub enum StandardBody {
    Polytope(Polytope),
    Ball(Ball),
}

impl StandardBody {
    pub fn as_oracle(&self) -> &dyn BodyOracle {
        match self {
            Self::Polytope(p) => p,
            Self::Ball(b) => b,
        }
    }

    pub fn into_polytope(self) -> Option<Polytope> {
        match self {
            Self::Polytope(p) => Some(p),
            Self::Ball(_) => None,
        }
    }
}

pub fn standard_body(kind: StandardKind, n: usize) -> Result<StandardBody> {
    check_dim(n)?;
    Ok(match kind {
        StandardKind::CubeVol1 => StandardBody::Polytope(Polytope::cube(n, 0.5)?),
        StandardKind::CubePm1 => StandardBody::Polytope(Polytope::cube(n, 1.0)?),
        StandardKind::CrossPolytope => StandardBody::Polytope(Polytope::cross_polytope(n)?),
        StandardKind::BallB2 => StandardBody::Ball(Ball::unit(n)?),
        StandardKind::BallDn => StandardBody::Ball(Ball::unit_volume(n)?),
        StandardKind::LinfBall(s) => StandardBody::Polytope(Polytope::cube(n, s)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_volume_ball_radius_n3() {
        let b = Ball::unit_volume(3).unwrap();
        let w3 = 4.0 * std::f64::consts::PI / 3.0;
        assert!((b.radius - w3.powf(-1.0 / 3.0)).abs() < 1e-14);
        assert!((b.volume() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(
            "cube_vol1".parse::<StandardKind>().unwrap(),
            StandardKind::CubeVol1
        );
        assert_eq!(
            "linf_ball(0.5)".parse::<StandardKind>().unwrap(),
            StandardKind::LinfBall(0.5)
        );
        assert!(matches!(
            "dodecahedron".parse::<StandardKind>(),
            Err(GeomError::UnknownKind(_))
        ));
    }

    #[test]
    fn linf_ball_is_square() {
        let p = standard_body(StandardKind::LinfBall(0.5), 2)
            .unwrap()
            .into_polytope()
            .unwrap();
        assert_eq!(p.num_vertices(), 4);
        assert!(p
            .vertices()
            .iter()
            .all(|v| v.iter().all(|x| (x.abs() - 0.5).abs() < 1e-14)));
    }

    #[test]
    fn ball_cube_support_matches_brute_force() {
        let bc = BallCube::new(Ball::unit(2).unwrap(), 0.8).unwrap();
        for k in 0..32 {
            let t = k as f64 * std::f64::consts::PI / 16.0;
            let u = Vector::from_vec(vec![t.cos(), t.sin()]);
            // extreme points: ball arcs end at the ball/cube crossings
            let c = (1.0 - 0.64f64).sqrt();
            let mut cands = vec![u.clone()];
            for (a, b) in [(0.8, c), (c, 0.8)] {
                for sa in [-1.0, 1.0] {
                    for sb in [-1.0, 1.0] {
                        cands.push(Vector::from_vec(vec![sa * a, sb * b]));
                    }
                }
            }
            let best = cands
                .iter()
                .filter(|y| {
                    bc.contains(y) || (y.norm() - 1.0).abs() < 1e-12 && y.amax() <= 0.8 + 1e-12
                })
                .map(|y| y.dot(&u))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((bc.support(&u) - best).abs() < 1e-6, "{t}");
        }
    }

    #[test]
    fn polytope_radial() {
        let c = Polytope::cube(3, 1.0).unwrap();
        let d = Vector::from_vec(vec![1.0, 1.0, 1.0]).normalize();
        assert!((BodyOracle::radial(&c, &d) - 3f64.sqrt()).abs() < 1e-12);
    }
}
