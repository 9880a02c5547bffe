//! Independent oracles and generators for the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trajcover::{CoverageSet, CurveParam, PolygonalCurve};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn curve(points: &[[f64; 2]]) -> PolygonalCurve {
    PolygonalCurve::new(points).unwrap()
}

/// A planar walk of `n` edges with step lengths in `[lo, hi)`.
pub fn walk(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> PolygonalCurve {
    let mut pts = vec![[rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]];
    for _ in 0..n {
        let last = pts[pts.len() - 1];
        let ang: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let len = rng.random_range(lo..hi);
        pts.push([last[0] + len * ang.cos(), last[1] + len * ang.sin()]);
    }
    curve(&pts)
}

/// Copy of `c` with every vertex moved by up to `noise` per coordinate.
pub fn perturbed(rng: &mut ChaCha8Rng, c: &PolygonalCurve, noise: f64) -> PolygonalCurve {
    let pts: Vec<Vec<f64>> = c
        .vertices()
        .map(|v| v.iter().map(|x| x + rng.random_range(-noise..=noise)).collect())
        .collect();
    PolygonalCurve::new(&pts).unwrap()
}

pub fn min_edge(c: &PolygonalCurve) -> f64 {
    (1..=c.num_edges())
        .map(|e| c.edge_length(e))
        .fold(f64::INFINITY, f64::min)
}

/// Vertices plus evenly spaced points, consecutive samples at most
/// `spacing` apart.
pub fn densify(c: &PolygonalCurve, spacing: f64) -> Vec<[f64; 2]> {
    let v = |k: usize| [c.vertex(k)[0], c.vertex(k)[1]];
    let mut out = vec![v(0)];
    for e in 1..=c.num_edges() {
        let (a, b) = (v(e - 1), v(e));
        let k = (c.edge_length(e) / spacing).ceil().max(1.0) as usize;
        for s in 1..=k {
            let t = s as f64 / k as f64;
            out.push([(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]]);
        }
    }
    out
}

/// Discrete Fréchet distance by the textbook dynamic program over two rows.
pub fn discrete_frechet(p: &[[f64; 2]], q: &[[f64; 2]]) -> f64 {
    let d = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).hypot(a[1] - b[1]);
    let mut prev = vec![0.0f64; q.len()];
    let mut cur = vec![0.0f64; q.len()];
    for i in 0..p.len() {
        for j in 0..q.len() {
            let c = d(p[i], q[j]);
            cur[j] = match (i, j) {
                (0, 0) => c,
                (0, _) => cur[j - 1].max(c),
                (_, 0) => prev[0].max(c),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(c),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[q.len() - 1]
}

/// `k` parameters evenly spaced over the whole curve.
pub fn param_grid(c: &PolygonalCurve, k: usize) -> Vec<CurveParam> {
    let n = c.num_edges();
    (0..k)
        .map(|i| CurveParam::from_position(n as f64 * i as f64 / (k - 1) as f64, n))
        .collect()
}

/// Minimum number of sets whose union is `full`, by enumerating all subsets
/// (at most 24 sets).
pub fn brute_force_min_cover(sets: &[u128], full: u128) -> Option<usize> {
    assert!(sets.len() <= 24);
    if full == 0 {
        return Some(0);
    }
    let n = sets.len();
    let mut union = vec![0u128; 1 << n];
    let mut best: Option<usize> = None;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        union[mask] = union[mask & (mask - 1)] | sets[low];
        if union[mask] & full == full {
            let k = mask.count_ones() as usize;
            best = Some(best.map_or(k, |b| b.min(k)));
        }
    }
    best
}

/// Number of sets a greedy search needs to cover `target`, if at most
/// `limit`.
pub fn greedy_containment(target: &CoverageSet, covs: &[CoverageSet], limit: usize) -> Option<usize> {
    let mut rest = target.clone();
    for used in 0..=limit {
        if rest.union_length() <= 1e-9 {
            return Some(used);
        }
        let (best, gain) = covs
            .iter()
            .map(|c| rest.intersect(c).union_length())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if gain <= 0.0 {
            return None;
        }
        rest = rest.subtract(&covs[best]);
    }
    None
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}
