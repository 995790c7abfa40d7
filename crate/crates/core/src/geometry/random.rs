//! Seeded randomness. Every random object is a pure function of its seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{LinearMap, Matrix, Vector};
use super::polytope::Polytope;
use super::sphere::random_direction;
use crate::error::Result;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream seed (SplitMix64 finalizer).
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples per independent stream in chunked Monte Carlo.
pub const MC_CHUNK: usize = 1 << 15;

/// `sum_k f(rng_k, len_k)` over chunks of `samples`, where chunk `k` draws
/// from its own stream `split_seed(seed, k)`. Chunks run on scoped threads;
/// the result does not depend on the thread count.
pub fn chunked_sum<F>(samples: usize, seed: u64, f: F) -> f64
where
    F: Fn(&mut ChaCha8Rng, usize) -> f64 + Sync,
{
    let chunks = samples.div_ceil(MC_CHUNK);
    let len_of = |k: usize| MC_CHUNK.min(samples - k * MC_CHUNK);
    let workers = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(chunks.max(1));
    let mut partial = vec![0.0; chunks];
    if workers <= 1 {
        for (k, slot) in partial.iter_mut().enumerate() {
            *slot = f(&mut rng_from_seed(split_seed(seed, k as u64)), len_of(k));
        }
    } else {
        std::thread::scope(|scope| {
            for (w, part) in partial.chunks_mut(chunks.div_ceil(workers)).enumerate() {
                let f = &f;
                let base = w * chunks.div_ceil(workers);
                scope.spawn(move || {
                    for (j, slot) in part.iter_mut().enumerate() {
                        let k = base + j;
                        *slot = f(&mut rng_from_seed(split_seed(seed, k as u64)), len_of(k));
                    }
                });
            }
        });
    }
    partial.iter().sum()
}

/// Uniform point in the Euclidean ball of radius `r`.
pub fn ball_point(n: usize, r: f64, rng: &mut ChaCha8Rng) -> Vector {
    let d = random_direction(n, rng).into_vector();
    let u: f64 = rng.random();
    d * (r * u.powf(1.0 / n as f64))
}

/// Convex hull of `4n` uniform points on the unit sphere.
pub fn random_polytope(n: usize, seed: u64) -> Result<Polytope> {
    random_polytope_with(n, 4 * n, seed)
}

pub fn random_polytope_with(n: usize, points: usize, seed: u64) -> Result<Polytope> {
    let mut rng = rng_from_seed(seed);
    let pts: Vec<Vector> = (0..points)
        .map(|_| random_direction(n, &mut rng).into_vector())
        .collect();
    Polytope::from_points(&pts)
}

/// Convex hull of `2n` uniform sphere points and their negatives.
pub fn random_symmetric_polytope(n: usize, seed: u64) -> Result<Polytope> {
    let mut rng = rng_from_seed(seed);
    let mut pts: Vec<Vector> = (0..2 * n)
        .map(|_| random_direction(n, &mut rng).into_vector())
        .collect();
    let negs: Vec<Vector> = pts.iter().map(|p| -p).collect();
    pts.extend(negs);
    Polytope::from_points(&pts)
}

/// Gaussian matrix with condition number kept moderate.
pub fn random_gl(n: usize, rng: &mut ChaCha8Rng) -> LinearMap {
    loop {
        let m = Matrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let sv = m.singular_values();
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &s| {
            (lo.min(s), hi.max(s))
        });
        if lo > 1e-3 && hi / lo < 50.0 {
            return LinearMap::new(m).expect("finite square matrix");
        }
    }
}

pub fn random_sl(n: usize, rng: &mut ChaCha8Rng) -> LinearMap {
    random_gl(n, rng)
        .normalized_to_sl()
        .expect("well conditioned by construction")
}

/// Axis-parallel box `prod [-a_i, a_i]` with `a_i` in `[lo, hi]`.
pub fn random_box(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Result<Polytope> {
    let half: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
    Polytope::box_from_half_widths(&half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunked_sum_is_deterministic() {
        let f =
            |rng: &mut ChaCha8Rng, len: usize| (0..len).map(|_| rng.random::<f64>()).sum::<f64>();
        let a = chunked_sum(100_000, 4, f);
        assert_eq!(a, chunked_sum(100_000, 4, f));
        assert!((a / 100_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn split_seeds_differ() {
        let a = split_seed(42, 0);
        let b = split_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, split_seed(42, 0));
    }

    #[test]
    fn random_gl_is_well_conditioned() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let t = random_gl(4, &mut rng);
            assert!(t.det().abs() > 1e-6);
        }
        let s = random_sl(3, &mut rng);
        assert!(s.is_special());
    }
}
