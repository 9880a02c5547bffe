//! Greedy set cover over candidate coverages, and a matching lower bound.
//!
//! The ground set is the union of all curves' parameter ranges, weighted by
//! arc length. The default greedy picks, in each round, the candidate adding
//! the most uncovered arc length. Coverage union is submodular, so gains
//! only shrink as the cover grows and a lazy priority queue (re-evaluate the
//! top entry, re-insert when stale) finds the same choice as a full rescan.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;

use crate::coverage::{CoverageSet, Span};
use crate::error::{Error, Result};
use crate::geometry::{CurveParam, PolygonalCurve};
use crate::scalar::Scalar;

/// Arc length below which a gain or a residual counts as zero.
pub const LENGTH_SLACK: f64 = 1e-9;

/// The parameter ranges of all curves.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundSet<T> {
    full: CoverageSet<T>,
    total: T,
}

impl<T: Scalar> GroundSet<T> {
    pub fn new(curves: &[PolygonalCurve<T>]) -> Self {
        let full = CoverageSet::from_spans(curves.iter().enumerate().map(|(i, c)| Span::full(i, c)).collect());
        let total = full.union_length();
        Self { full, total }
    }

    pub fn as_coverage(&self) -> &CoverageSet<T> {
        &self.full
    }

    pub fn total_length(&self) -> T {
        self.total
    }

    pub fn num_curves(&self) -> usize {
        self.full.len()
    }
}

/// When to stop adding centers. With neither field set the greedy runs to
/// full coverage.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StopRule {
    /// Stop once this fraction of the ground set is covered.
    pub fraction: Option<f64>,
    /// Stop after this many rounds.
    pub max_rounds: Option<usize>,
}

impl StopRule {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn requires_full_coverage(&self) -> bool {
        self.fraction.is_none() && self.max_rounds.is_none()
    }
}

/// How a candidate's gain is measured.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GainMeasure {
    /// Newly covered arc length.
    #[default]
    ArcLength,
    /// Newly covered pieces of the arrangement of all coverage endpoints.
    ArrangementPieces,
}

/// Greedy selection in order, with per-round gains.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution<T> {
    pub chosen: Vec<usize>,
    /// Gain of each pick, in the chosen measure.
    pub gains: Vec<T>,
    /// Covered fraction of the ground set (by arc length) after each pick.
    pub coverage_fraction: Vec<T>,
    pub covered: CoverageSet<T>,
    pub residual: CoverageSet<T>,
}

impl<T: Scalar> Solution<T> {
    pub fn final_fraction(&self) -> T {
        self.coverage_fraction.last().copied().unwrap_or_else(T::zero)
    }
}

/// `union_length(candidate - accumulated)`.
pub fn marginal_gain<T: Scalar>(candidate: &CoverageSet<T>, accumulated: &CoverageSet<T>) -> T {
    candidate.measure_minus(accumulated)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Entry {
    gain: f64,
    id: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.total_cmp(&other.gain).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pieces of the arrangement formed by all span endpoints of `coverages`
/// and the curve ends, per curve, as `(curve, start, end)`.
pub fn arrangement_pieces<T: Scalar>(
    coverages: &[CoverageSet<T>],
    ground: &GroundSet<T>,
) -> Vec<(usize, CurveParam<T>, CurveParam<T>)> {
    let mut cuts: Vec<(usize, CurveParam<T>)> = Vec::new();
    for s in ground.full.spans() {
        cuts.push((s.curve, s.start));
        cuts.push((s.curve, s.end));
    }
    for c in coverages {
        for s in c.spans() {
            cuts.push((s.curve, s.start));
            cuts.push((s.curve, s.end));
        }
    }
    cuts.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp_total(&b.1)));
    cuts.dedup();
    cuts.windows(2)
        .filter(|w| w[0].0 == w[1].0)
        .map(|w| (w[0].0, w[0].1, w[1].1))
        .collect()
}

/// For each candidate, the sorted ids of arrangement pieces it covers.
fn pieces_per_candidate<T: Scalar>(
    coverages: &[CoverageSet<T>],
    pieces: &[(usize, CurveParam<T>, CurveParam<T>)],
) -> Vec<Vec<u32>> {
    coverages
        .par_iter()
        .map(|c| {
            let mut out = Vec::new();
            for s in c.spans() {
                let lo = pieces.partition_point(|p| p.0 < s.curve || (p.0 == s.curve && p.1 < s.start));
                let mut k = lo;
                while k < pieces.len() && pieces[k].0 == s.curve && pieces[k].2 <= s.end {
                    out.push(k as u32);
                    k += 1;
                }
            }
            out
        })
        .collect()
}

/// First point of `ground` not covered by any coverage, if any.
fn first_uncovered<T: Scalar>(coverages: &[CoverageSet<T>], ground: &GroundSet<T>) -> Option<(usize, CurveParam<T>)> {
    let all = CoverageSet::from_spans(coverages.iter().flat_map(|c| c.spans().iter().copied()).collect());
    let rest = ground.full.subtract(&all);
    if rest.union_length().as_f64() <= LENGTH_SLACK {
        return None;
    }
    rest.spans()
        .iter()
        .find(|s| s.length().as_f64() > 0.0)
        .map(|s| (s.curve, s.start))
}

/// Greedy cover of `ground` by the sets `coverages` (indexed by candidate
/// id). Ties go to the smaller id.
///
/// Under the full-coverage rule, a ground set that the candidates cannot
/// cover is reported as [`Error::Infeasible`] before any selection.
pub fn greedy_cover<T: Scalar>(
    coverages: &[CoverageSet<T>],
    ground: &GroundSet<T>,
    stop: &StopRule,
    measure: GainMeasure,
) -> Result<Solution<T>> {
    if stop.requires_full_coverage() {
        if let Some((curve, p)) = first_uncovered(coverages, ground) {
            return Err(Error::Infeasible {
                curve,
                param: format!("(edge {}, t {})", p.edge(), p.t()),
            });
        }
    }
    let total = ground.total.as_f64();
    let slack = LENGTH_SLACK;

    let piece_sets = match measure {
        GainMeasure::ArcLength => None,
        GainMeasure::ArrangementPieces => {
            let pieces = arrangement_pieces(coverages, ground);
            Some((pieces.len(), pieces_per_candidate(coverages, &pieces)))
        }
    };
    let mut piece_done = vec![false; piece_sets.as_ref().map_or(0, |p| p.0)];

    let initial: Vec<f64> = match &piece_sets {
        None => coverages.par_iter().map(|c| c.union_length().as_f64()).collect(),
        Some((_, sets)) => sets.iter().map(|s| s.len() as f64).collect(),
    };
    let mut heap: BinaryHeap<Entry> = initial
        .into_iter()
        .enumerate()
        .filter(|(_, g)| *g > 0.0)
        .map(|(id, gain)| Entry { gain, id })
        .collect();

    let mut covered = CoverageSet::new();
    let mut chosen = Vec::new();
    let mut gains = Vec::new();
    let mut fractions = Vec::new();
    let mut covered_len = 0.0;
    loop {
        if total - covered_len <= slack {
            break;
        }
        if let Some(rho) = stop.fraction {
            if covered_len >= rho * total - slack {
                break;
            }
        }
        if let Some(r) = stop.max_rounds {
            if chosen.len() >= r {
                break;
            }
        }
        let pick = loop {
            let Some(top) = heap.pop() else { break None };
            let fresh = match &piece_sets {
                None => marginal_gain(&coverages[top.id], &covered).as_f64(),
                Some((_, sets)) => sets[top.id].iter().filter(|&&k| !piece_done[k as usize]).count() as f64,
            };
            let entry = Entry {
                gain: fresh,
                id: top.id,
            };
            match heap.peek() {
                Some(next) if entry < *next => {
                    if fresh > 0.0 {
                        heap.push(entry);
                    }
                }
                _ => break Some(entry),
            }
        };
        let Some(pick) = pick else { break };
        let length_gain = marginal_gain(&coverages[pick.id], &covered).as_f64();
        let useful = match &piece_sets {
            None => length_gain >= slack,
            Some(_) => pick.gain > 0.0,
        };
        if !useful {
            break;
        }
        if let Some((_, sets)) = &piece_sets {
            for &k in &sets[pick.id] {
                piece_done[k as usize] = true;
            }
        }
        covered = covered.union(&coverages[pick.id]);
        covered_len = covered.union_length().as_f64();
        chosen.push(pick.id);
        gains.push(T::lit(pick.gain));
        fractions.push(T::lit((covered_len / total).min(1.0)));
    }
    let residual = ground.full.subtract(&covered);
    Ok(Solution {
        chosen,
        gains,
        coverage_fraction: fractions,
        covered,
        residual,
    })
}

/// Size of a set of ground points no two of which share a covering
/// candidate; any cover needs at least that many sets.
///
/// Arrangement pieces are swept left to right per curve and a piece's
/// midpoint is accepted when no candidate covering it already covers an
/// accepted point.
pub fn independent_set_lower_bound<T: Scalar>(coverages: &[CoverageSet<T>], ground: &GroundSet<T>) -> usize {
    let pieces = arrangement_pieces(coverages, ground);
    // (curve, position, is_end, candidate); starts sort before ends at the
    // same position so that closed spans touch.
    let mut events: Vec<(usize, CurveParam<T>, bool, usize)> = Vec::new();
    for (id, c) in coverages.iter().enumerate() {
        for s in c.spans() {
            events.push((s.curve, s.start, false, id));
            events.push((s.curve, s.end, true, id));
        }
    }
    events.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then_with(|| a.1.cmp_total(&b.1))
            .then_with(|| a.2.cmp(&b.2))
            .then_with(|| a.3.cmp(&b.3))
    });
    let mut marked = vec![false; coverages.len()];
    let mut active_unmarked: HashSet<usize> = HashSet::new();
    let mut active_marked = 0usize;
    let mut active_total = 0usize;
    let mut ev = 0;
    let mut count = 0;
    let mut current_curve = usize::MAX;
    for &(curve, lo, _) in &pieces {
        if curve != current_curve {
            // skip events of curves without pieces and reset state
            while ev < events.len() && events[ev].0 < curve {
                ev += 1;
            }
            active_unmarked.clear();
            active_marked = 0;
            active_total = 0;
            current_curve = curve;
        }
        // apply every event at or before the piece start
        while ev < events.len() && events[ev].0 == curve && events[ev].1 <= lo {
            let (_, _, is_end, id) = events[ev];
            if is_end {
                active_total -= 1;
                if !active_unmarked.remove(&id) {
                    active_marked -= 1;
                }
            } else {
                active_total += 1;
                if marked[id] {
                    active_marked += 1;
                } else {
                    active_unmarked.insert(id);
                }
            }
            ev += 1;
        }
        if active_total > 0 && active_marked == 0 {
            count += 1;
            for id in active_unmarked.drain() {
                marked[id] = true;
                active_marked += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests;
