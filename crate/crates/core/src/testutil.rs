//! Oracles and generators shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{discrete_frechet, PolygonalCurve};

pub fn curve(points: &[[f64; 2]]) -> PolygonalCurve<f64> {
    PolygonalCurve::new(points).unwrap()
}

/// Vertices plus evenly spaced points so that consecutive samples are at
/// most `spacing` apart.
pub fn densify(c: &PolygonalCurve<f64>, spacing: f64) -> Vec<Vec<f64>> {
    let mut out = vec![c.vertex(0).to_vec()];
    for e in 1..=c.num_edges() {
        let a = c.vertex(e - 1);
        let b = c.vertex(e);
        let k = (c.edge_length(e) / spacing).ceil().max(1.0) as usize;
        for s in 1..=k {
            let t = s as f64 / k as f64;
            out.push(a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect());
        }
    }
    out
}

/// Discrete Fréchet distance of densely sampled curves: an upper bound on the
/// continuous distance that exceeds it by at most `spacing`.
pub fn sampled_frechet(p: &PolygonalCurve<f64>, q: &PolygonalCurve<f64>, spacing: f64) -> f64 {
    discrete_frechet(&densify(p, spacing), &densify(q, spacing)).unwrap()
}

pub fn random_walk(rng: &mut ChaCha8Rng, n: usize, step: f64) -> PolygonalCurve<f64> {
    let mut pts = vec![[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]];
    for _ in 0..n {
        let last = pts[pts.len() - 1];
        let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let len = step * rng.random_range(0.2..1.0);
        pts.push([last[0] + len * ang.cos(), last[1] + len * ang.sin()]);
    }
    curve(&pts)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Copy of `c` with every vertex moved by up to `noise` in each coordinate.
pub fn perturbed(rng: &mut ChaCha8Rng, c: &PolygonalCurve<f64>, noise: f64) -> PolygonalCurve<f64> {
    let pts: Vec<Vec<f64>> = c
        .vertices()
        .map(|v| v.iter().map(|x| x + rng.random_range(-noise..=noise)).collect())
        .collect();
    PolygonalCurve::new(&pts).unwrap()
}

/// `k` parameters evenly spaced in grid position over the whole curve.
pub fn param_grid(c: &PolygonalCurve<f64>, k: usize) -> Vec<crate::geometry::CurveParam<f64>> {
    let n = c.num_edges();
    (0..k)
        .map(|i| crate::geometry::CurveParam::from_position(n as f64 * i as f64 / (k - 1) as f64, n))
        .collect()
}

/// Minimum number of sets whose union is `full`, by subset enumeration over
/// bitmasks (at most 24 sets, at most 128 elements).
pub fn brute_force_min_cover(sets: &[u128], full: u128) -> Option<usize> {
    assert!(sets.len() <= 24);
    let n = sets.len();
    let mut union = vec![0u128; 1 << n];
    let mut best: Option<usize> = None;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        union[mask] = union[mask & (mask - 1)] | sets[low];
        if union[mask] & full == full {
            let k = mask.count_ones() as usize;
            best = Some(best.map_or(k, |b: usize| b.min(k)));
        }
    }
    if full == 0 {
        return Some(0);
    }
    best
}
