//! Monotone reachability through a rectangular band of free-space cells.
//!
//! Reachable parts of cell boundaries are propagated row by row, left to
//! right, touching only cells that something actually reaches. Each
//! reachable interval carries a non-increasing step function of start
//! labels: the smallest label of any start that reaches the point. Starts
//! are labelled in left-to-right order, so the label at the right end of a
//! reachable interval identifies the leftmost start that reaches it.

use smallvec::{smallvec, SmallVec};

use super::{point_segment_interval, Interval};
use crate::geometry::{CurveParam, Polyline};
use crate::scalar::Scalar;

/// End-point tolerance, in local cell coordinates.
const END_TOLERANCE: f64 = 1e-12;

/// Reachable part of one boundary segment.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Reach<T> {
    pub lo: T,
    pub hi: T,
    /// `(position, label)` breakpoints; the first sits at `lo`, labels
    /// strictly decrease.
    steps: SmallVec<[(T, u32); 2]>,
}

impl<T: Scalar> Reach<T> {
    pub fn single(iv: Interval<T>, label: u32) -> Self {
        Self {
            lo: iv.lo,
            hi: iv.hi,
            steps: smallvec![(iv.lo, label)],
        }
    }

    /// Smallest label reaching any point, which is the label at `hi`.
    pub fn min_label(&self) -> u32 {
        self.steps[self.steps.len() - 1].1
    }

    #[cfg(test)]
    pub fn label_at(&self, x: T) -> Option<u32> {
        if x < self.lo || x > self.hi {
            return None;
        }
        self.steps.iter().take_while(|s| s.0 <= x).last().map(|s| s.1)
    }
}

/// Band of cells: columns are edges of the x-curve, rows edges of the
/// y-curve. Each bound is `(edge, local coordinate)`; interior cells span the
/// full unit square.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BandSpec<T> {
    pub col_start: (usize, T),
    pub col_end: (usize, T),
    pub row_start: (usize, T),
    pub row_end: (usize, T),
}

/// Reachable part of the output boundary of a cell whose free boundary is
/// `free`. `along` is the input boundary parallel to the output (reaches an
/// output point only from at most the same coordinate); `across` is the
/// perpendicular input (reaches every output point).
fn sweep_out<T: Scalar>(free: Interval<T>, along: Option<&Reach<T>>, across: Option<&Reach<T>>) -> Option<Reach<T>> {
    let cmin = across.map(Reach::min_label);
    let lo = match (cmin, along) {
        (Some(_), _) => free.lo,
        (None, Some(a)) => free.lo.max(a.lo),
        (None, None) => return None,
    };
    if lo > free.hi {
        return None;
    }
    let mut at_lo: Option<u32> = None;
    if let Some(a) = along {
        if a.lo <= lo {
            at_lo = a.steps.iter().take_while(|s| s.0 <= lo).last().map(|s| s.1);
        }
    }
    let mut cur = match (cmin, at_lo) {
        (Some(c), Some(l)) => c.min(l),
        (Some(c), None) => c,
        (None, Some(l)) => l,
        (None, None) => return None,
    };
    let mut steps: SmallVec<[(T, u32); 2]> = smallvec![(lo, cur)];
    if let Some(a) = along {
        for &(pos, label) in a.steps.iter() {
            if pos <= lo || pos > free.hi {
                continue;
            }
            let v = cmin.map_or(label, |c| c.min(label));
            if v < cur {
                steps.push((pos, v));
                cur = v;
            }
        }
    }
    Some(Reach { lo, hi: free.hi, steps })
}

/// Propagates `starts` (reachable intervals on the bottom line of the first
/// row, keyed by column, sorted) through the band and returns the reachable
/// intervals on the top line of the last row.
pub(crate) fn propagate<T: Scalar>(
    p: Polyline<'_, T>,
    q: Polyline<'_, T>,
    r: T,
    band: &BandSpec<T>,
    starts: Vec<(usize, Reach<T>)>,
) -> Vec<(usize, Reach<T>)> {
    let dim = p.dim;
    let (first_col, xlo0) = band.col_start;
    let (last_col, xhi1) = band.col_end;
    let (first_row, ylo0) = band.row_start;
    let (last_row, yhi1) = band.row_end;

    let mut top_point = vec![T::zero(); dim];
    let mut right_point = vec![T::zero(); dim];
    let mut bottoms = starts;
    for j in first_row..=last_row {
        let ylo = if j == first_row { ylo0 } else { T::zero() };
        let yhi = if j == last_row { yhi1 } else { T::one() };
        q.point_into(j, yhi, &mut top_point);
        let (q0, q1) = (q.vertex(j - 1), q.vertex(j));

        let mut tops: Vec<(usize, Reach<T>)> = Vec::with_capacity(bottoms.len());
        let mut idx = 0;
        let mut carry: Option<(usize, Reach<T>)> = None;
        loop {
            let col = match (&carry, bottoms.get(idx)) {
                (Some((c, _)), _) => *c,
                (None, Some((c, _))) => *c,
                (None, None) => break,
            };
            if col > last_col {
                break;
            }
            let bottom = if bottoms.get(idx).map(|b| b.0) == Some(col) {
                idx += 1;
                Some(&bottoms[idx - 1].1)
            } else {
                None
            };
            let left = carry.take().map(|c| c.1);
            let xlo = if col == first_col { xlo0 } else { T::zero() };
            let xhi = if col == last_col { xhi1 } else { T::one() };
            let (p0, p1) = (p.vertex(col - 1), p.vertex(col));

            let top_free = point_segment_interval(&top_point, p0, p1, r).and_then(|f| f.clip(xlo, xhi));
            if let Some(f) = top_free {
                if let Some(out) = sweep_out(f, bottom, left.as_ref()) {
                    tops.push((col, out));
                }
            }
            if col < last_col {
                p.point_into(col, xhi, &mut right_point);
                let right_free = point_segment_interval(&right_point, q0, q1, r).and_then(|f| f.clip(ylo, yhi));
                if let Some(f) = right_free {
                    if let Some(out) = sweep_out(f, left.as_ref(), bottom) {
                        carry = Some((col + 1, out));
                    }
                }
            }
        }
        if tops.is_empty() {
            return tops;
        }
        bottoms = tops;
    }
    bottoms
}

/// Single start point to single end point.
pub(crate) fn decide<T: Scalar>(
    p: Polyline<'_, T>,
    q: Polyline<'_, T>,
    r: T,
    start: (CurveParam<T>, CurveParam<T>),
    end: (CurveParam<T>, CurveParam<T>),
) -> bool {
    let (a, s) = start;
    let (b, t) = end;
    let col_end = if b == a { (a.edge(), a.t()) } else { b.end_form() };
    let row_end = if t == s { (s.edge(), s.t()) } else { t.end_form() };
    let band = BandSpec {
        col_start: (a.edge(), a.t()),
        col_end,
        row_start: (s.edge(), s.t()),
        row_end,
    };
    let mut start_point = vec![T::zero(); p.dim];
    q.point_into(s.edge(), s.t(), &mut start_point);
    let eps = T::lit(END_TOLERANCE);
    let start_free = point_segment_interval(&start_point, p.vertex(a.edge() - 1), p.vertex(a.edge()), r);
    match start_free {
        Some(f) if f.lo - eps <= a.t() && a.t() <= f.hi + eps => {}
        _ => return false,
    }
    let starts = vec![(a.edge(), Reach::single(Interval::new(a.t(), a.t()), 0))];
    let tops = propagate(p, q, r, &band, starts);
    tops.iter()
        .any(|(c, reach)| *c == band.col_end.0 && reach.hi >= band.col_end.1 - eps)
}
