//! End-to-end clustering: simplify, collect extremal coordinates, enumerate
//! candidates, compute their coverages, and run the greedy cover.

use std::time::Instant;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::candidates::{enumerate_candidates, Candidate, CandidateRule, ExtremalCoordinateIndex};
use crate::coverage::{CoverageEngine, CoverageSet};
use crate::error::{Error, Result};
use crate::geometry::{PolygonalCurve, Subcurve};
use crate::scalar::Scalar;
use crate::setcover::{greedy_cover, independent_set_lower_bound, GainMeasure, GroundSet, Solution, StopRule};
use crate::simplification::{delta_good_simplify, Simplification};

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringConfig<T> {
    /// Bound on the Fréchet distance between each curve and its
    /// simplification.
    pub delta_simp: T,
    /// Coverage threshold.
    pub delta_free: T,
    /// Maximum number of edges of a center.
    pub l: usize,
    pub stop: StopRule,
    pub candidate_rule: CandidateRule,
    pub gain: GainMeasure,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl<T: Scalar> ClusteringConfig<T> {
    pub fn new(delta_simp: T, delta_free: T, l: usize) -> Self {
        Self {
            delta_simp,
            delta_free,
            l,
            stop: StopRule::full(),
            candidate_rule: CandidateRule::PowerOfTwo,
            gain: GainMeasure::ArcLength,
            workers: None,
        }
    }

    /// The setting matching the approximation analysis: `delta_simp = 3Δ`,
    /// `delta_free = 8Δ`.
    pub fn theory(delta: T, l: usize) -> Self {
        Self::new(T::lit(3.0) * delta, T::lit(8.0) * delta, l)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("delta_simp", self.delta_simp), ("delta_free", self.delta_free)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.l == 0 {
            return Err(Error::param("l must be at least 1"));
        }
        if let Some(rho) = self.stop.fraction {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(Error::param(format!("coverage fraction must lie in (0, 1], got {rho}")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::param("worker count must be at least 1"));
        }
        Ok(())
    }
}

/// Wall-clock seconds per phase.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimings {
    pub simplify: f64,
    pub freespace: f64,
    pub candidates: f64,
    pub coverage: f64,
    pub greedy: f64,
}

impl PhaseTimings {
    pub fn total(&self) -> f64 {
        self.simplify + self.freespace + self.candidates + self.coverage + self.greedy
    }

    pub fn rows(&self) -> [(&'static str, f64); 5] {
        [
            ("simplify", self.simplify),
            ("freespace", self.freespace),
            ("candidates", self.candidates),
            ("coverage", self.coverage),
            ("greedy", self.greedy),
        ]
    }
}

/// A chosen center.
#[derive(Clone, Debug, PartialEq)]
pub struct Center<T> {
    pub candidate: usize,
    pub subcurve: Subcurve<T>,
    /// The center as a standalone curve.
    pub curve: PolygonalCurve<T>,
    pub coverage: CoverageSet<T>,
}

#[derive(Clone, Debug)]
pub struct ClusteringResult<T> {
    pub simplifications: Vec<Simplification<T>>,
    pub index_size: usize,
    pub candidates: Vec<Candidate<T>>,
    pub centers: Vec<Center<T>>,
    pub solution: Solution<T>,
    pub lower_bound: usize,
    pub ground_length: T,
    pub timings: PhaseTimings,
}

impl<T: Scalar> ClusteringResult<T> {
    /// The simplified curves, in input order.
    pub fn simplified_curves(&self) -> Vec<PolygonalCurve<T>> {
        self.simplifications.iter().map(|s| s.curve.clone()).collect()
    }

    pub fn phase_timings(&self) -> PhaseTimings {
        self.timings
    }
}

fn timed<R>(slot: &mut f64, f: impl FnOnce() -> R) -> R {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed().as_secs_f64();
    out
}

/// Clusters `curves` (all of the same dimension); deterministic for a fixed
/// input order and configuration.
pub fn cluster<T: Scalar>(curves: &[PolygonalCurve<T>], config: &ClusteringConfig<T>) -> Result<ClusteringResult<T>> {
    config.validate()?;
    let first = curves.first().ok_or_else(|| Error::param("no input curves"))?;
    for c in curves {
        if c.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: c.dim(),
            });
        }
    }
    if config.delta_free < config.delta_simp {
        warn!(
            "delta_free ({}) is below delta_simp ({}); coverage may be sparse",
            config.delta_free, config.delta_simp
        );
    }
    match config.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::param(format!("cannot build worker pool: {e}")))?
            .install(|| run(curves, config)),
        None => run(curves, config),
    }
}

fn run<T: Scalar>(curves: &[PolygonalCurve<T>], config: &ClusteringConfig<T>) -> Result<ClusteringResult<T>> {
    let mut timings = PhaseTimings::default();

    // a Δ-good simplification at Δ is within 3Δ of its curve
    let simp_delta = config.delta_simp / T::lit(3.0);
    let simplifications: Vec<Simplification<T>> = timed(&mut timings.simplify, || {
        curves
            .par_iter()
            .map(|c| delta_good_simplify(c, simp_delta))
            .collect::<Result<_>>()
    })?;
    let simplified: Vec<PolygonalCurve<T>> = simplifications.iter().map(|s| s.curve.clone()).collect();
    info!(
        "simplified {} curves: {} -> {} vertices",
        curves.len(),
        curves.iter().map(PolygonalCurve::num_vertices).sum::<usize>(),
        simplified.iter().map(PolygonalCurve::num_vertices).sum::<usize>()
    );

    let index = timed(&mut timings.freespace, || {
        ExtremalCoordinateIndex::build(&simplified, config.delta_free)
    });
    debug!("{} extremal coordinates", index.len());

    let candidates = timed(&mut timings.candidates, || {
        enumerate_candidates(&index, &simplified, config.l, config.candidate_rule)
    });
    info!("{} candidates", candidates.len());

    let coverages: Vec<CoverageSet<T>> = timed(&mut timings.coverage, || {
        let engine = CoverageEngine::new(&simplified, config.delta_free);
        candidates.par_iter().map(|c| engine.coverage(&c.subcurve)).collect()
    });

    let ground = GroundSet::new(&simplified);
    let (solution, lower_bound) = timed(&mut timings.greedy, || -> Result<_> {
        let solution = greedy_cover(&coverages, &ground, &config.stop, config.gain)?;
        let lb = independent_set_lower_bound(&coverages, &ground);
        Ok((solution, lb))
    })?;
    info!(
        "{} centers, covered fraction {}, lower bound {}",
        solution.chosen.len(),
        solution.final_fraction(),
        lower_bound
    );

    let centers = solution
        .chosen
        .iter()
        .map(|&id| {
            let sub = candidates[id].subcurve;
            let curve = simplified[sub.curve_id].extract_subcurve(sub.start, sub.end)?;
            Ok(Center {
                candidate: id,
                subcurve: sub,
                curve,
                coverage: coverages[id].clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ClusteringResult {
        simplifications,
        index_size: index.len(),
        candidates,
        centers,
        solution,
        lower_bound,
        ground_length: ground.total_length(),
        timings,
    })
}
