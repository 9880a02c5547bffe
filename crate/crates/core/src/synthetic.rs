//! Seeded drifter-like trajectories for benchmarks and tests.
//!
//! Particles are advected by a steady cellular flow (a grid of counter-
//! rotating gyres) plus a random-walk perturbation of the heading, so that
//! trajectories share long similar stretches as ocean drifters do. Drifters
//! reflect off the walls of a square basin, so the density of points is set
//! by the curve count per unit area.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::error::Result;
use crate::geometry::PolygonalCurve;

#[derive(Clone, Debug, PartialEq)]
pub struct DrifterConfig {
    pub curves: usize,
    pub points_per_curve: usize,
    /// Side of the square basin.
    pub domain: f64,
    /// Gyre diameter.
    pub gyre: f64,
    /// Median step length.
    pub step: f64,
    /// Log-space spread of the step length.
    pub step_sigma: f64,
    /// Standard deviation of the heading perturbation per step, radians.
    pub turn_sigma: f64,
    /// Weight of the flow direction against the drifter's own heading.
    pub flow_weight: f64,
}

impl Default for DrifterConfig {
    fn default() -> Self {
        Self {
            curves: 50,
            points_per_curve: 400,
            domain: 400.0,
            gyre: 25.0,
            step: 1.0,
            step_sigma: 0.3,
            turn_sigma: 0.25,
            flow_weight: 0.6,
        }
    }
}

impl DrifterConfig {
    /// `total` points split into curves of `points_per_curve`, with the
    /// basin area proportional to the curve count so that density stays
    /// fixed.
    pub fn with_total_points(total: usize, points_per_curve: usize) -> Self {
        let curves = (total / points_per_curve).max(1);
        let base = Self::default();
        let domain = base.domain * (curves as f64 / base.curves as f64).powf(0.5);
        Self {
            curves,
            points_per_curve,
            domain,
            ..base
        }
    }
}

fn flow(x: f64, y: f64, gyre: f64) -> (f64, f64) {
    let k = std::f64::consts::PI / gyre;
    let u = -(k * x).sin() * (k * y).cos();
    let v = (k * x).cos() * (k * y).sin();
    (u, v)
}

fn reflect(v: f64, side: f64) -> f64 {
    let period = 2.0 * side;
    let r = v.rem_euclid(period);
    if r > side {
        period - r
    } else {
        r
    }
}

/// Generates `config.curves` trajectories from `seed`.
pub fn drifters(config: &DrifterConfig, seed: u64) -> Result<Vec<PolygonalCurve<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = LogNormal::new(config.step.ln(), config.step_sigma).expect("valid log-normal");
    let turn = Normal::new(0.0, config.turn_sigma).expect("valid normal");
    let mut out = Vec::with_capacity(config.curves);
    for _ in 0..config.curves {
        let mut x = rng.random_range(0.0..config.domain);
        let mut y = rng.random_range(0.0..config.domain);
        let mut heading: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let mut pts = Vec::with_capacity(config.points_per_curve);
        pts.push([x, y]);
        while pts.len() < config.points_per_curve {
            let (u, v) = flow(x, y, config.gyre);
            let own = (heading.cos(), heading.sin());
            let dx = config.flow_weight * u + (1.0 - config.flow_weight) * own.0;
            let dy = config.flow_weight * v + (1.0 - config.flow_weight) * own.1;
            heading = dy.atan2(dx) + turn.sample(&mut rng);
            let len = steps.sample(&mut rng);
            x += len * heading.cos();
            y += len * heading.sin();
            if !(0.0..=config.domain).contains(&x) {
                x = reflect(x, config.domain);
                heading = std::f64::consts::PI - heading;
            }
            if !(0.0..=config.domain).contains(&y) {
                y = reflect(y, config.domain);
                heading = -heading;
            }
            pts.push([x, y]);
        }
        out.push(PolygonalCurve::new(&pts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_sized() {
        let cfg = DrifterConfig {
            curves: 5,
            points_per_curve: 30,
            ..DrifterConfig::default()
        };
        let a = drifters(&cfg, 1).unwrap();
        assert_eq!(a.len(), 5);
        assert!(a.iter().all(|c| c.num_vertices() == 30));
        assert_eq!(a, drifters(&cfg, 1).unwrap());
        assert_ne!(a, drifters(&cfg, 2).unwrap());
    }

    #[test]
    fn total_points_split() {
        let cfg = DrifterConfig::with_total_points(20_000, 400);
        assert_eq!(cfg.curves, 50);
        assert!((cfg.domain - 400.0).abs() < 1e-12);
        assert!(DrifterConfig::with_total_points(100_000, 400).domain > 400.0);
    }

    #[test]
    fn stays_in_basin() {
        let cfg = DrifterConfig {
            curves: 10,
            domain: 30.0,
            ..DrifterConfig::default()
        };
        for c in drifters(&cfg, 4).unwrap() {
            for i in 0..c.num_vertices() {
                assert!(c.vertex(i).iter().all(|v| (0.0..=30.0).contains(v)));
            }
        }
    }
}
