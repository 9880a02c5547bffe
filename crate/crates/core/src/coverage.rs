//! Δ-coverage of a center subcurve: the parts of target curves that lie in
//! some subcurve within Fréchet distance Δ of the center.
//!
//! Coverage on one target is computed by a single band sweep over the rows
//! of the free space the center spans. Every free point on the center's
//! start line is a potential path start, labelled by its column; the label
//! carried to a reachable point on the end line names the leftmost column a
//! path can start from, and within a column the leftmost free point is
//! always a valid start. Each reachable end interval `[.., hi]` in column `c`
//! with minimal start column `c0` therefore contributes exactly the maximal
//! interval `[lo(c0), (c, hi)]`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::freespace::{point_segment_interval, propagate, BandSpec, FreeSpaceDiagram, Reach};
use crate::geometry::{CurveParam, PolygonalCurve, Polyline, Subcurve};
use crate::scalar::Scalar;
use crate::spatial::SegmentIndex;

/// Spans closer than this (in edge units) are merged.
pub const MERGE_GAP: f64 = 1e-12;
/// Spans shorter than this (in edge units) are dropped.
pub const MIN_SPAN: f64 = 1e-9;

/// One covered interval of one curve, with cached arc positions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Span<T> {
    pub curve: usize,
    pub start: CurveParam<T>,
    pub end: CurveParam<T>,
    pub start_arc: T,
    pub end_arc: T,
}

impl<T: Scalar> Span<T> {
    pub fn new(curve_id: usize, curve: &PolygonalCurve<T>, start: CurveParam<T>, end: CurveParam<T>) -> Self {
        Self {
            curve: curve_id,
            start,
            end,
            start_arc: curve.arc_position(start),
            end_arc: curve.arc_position(end),
        }
    }

    /// The whole of `curve`.
    pub fn full(curve_id: usize, curve: &PolygonalCurve<T>) -> Self {
        Self::new(curve_id, curve, CurveParam::start(), CurveParam::end(curve.num_edges()))
    }

    pub fn length(&self) -> T {
        (self.end_arc - self.start_arc).max(T::zero())
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.curve
            .cmp(&other.curve)
            .then_with(|| self.start.cmp_total(&other.start))
            .then_with(|| self.end.cmp_total(&other.end))
    }
}

/// Sorted union of disjoint closed intervals over several curves.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoverageSet<T> {
    spans: Vec<Span<T>>,
}

fn before<T: Scalar>(a: CurveParam<T>, b: CurveParam<T>) -> bool {
    a.cmp_total(&b) == Ordering::Less
}

fn min_param<T: Scalar>(a: (CurveParam<T>, T), b: (CurveParam<T>, T)) -> (CurveParam<T>, T) {
    if before(b.0, a.0) {
        b
    } else {
        a
    }
}

fn max_param<T: Scalar>(a: (CurveParam<T>, T), b: (CurveParam<T>, T)) -> (CurveParam<T>, T) {
    if before(a.0, b.0) {
        b
    } else {
        a
    }
}

impl<T: Scalar> CoverageSet<T> {
    pub fn new() -> Self {
        Self { spans: Vec::new() }
    }

    /// Normalizes arbitrary spans: sorts, merges overlapping or touching
    /// spans and drops spans shorter than [`MIN_SPAN`].
    pub fn from_spans(mut spans: Vec<Span<T>>) -> Self {
        spans.sort_by(Span::key_cmp);
        let gap = T::lit(MERGE_GAP);
        let mut out: Vec<Span<T>> = Vec::with_capacity(spans.len());
        for s in spans {
            if let Some(last) = out.last_mut() {
                if last.curve == s.curve && s.start.position() - last.end.position() <= gap {
                    if before(last.end, s.end) {
                        last.end = s.end;
                        last.end_arc = s.end_arc;
                    }
                    continue;
                }
            }
            out.push(s);
        }
        let min = T::lit(MIN_SPAN);
        out.retain(|s| s.end.position() - s.start.position() >= min);
        Self { spans: out }
    }

    pub fn spans(&self) -> &[Span<T>] {
        &self.spans
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    /// Spans on curve `curve`.
    pub fn on_curve(&self, curve: usize) -> &[Span<T>] {
        let lo = self.spans.partition_point(|s| s.curve < curve);
        let hi = self.spans.partition_point(|s| s.curve <= curve);
        &self.spans[lo..hi]
    }

    /// Total covered arc length.
    pub fn union_length(&self) -> T {
        self.spans.iter().map(Span::length).sum()
    }

    /// Whether the point `p` of curve `curve` is covered.
    pub fn contains(&self, curve: usize, p: CurveParam<T>) -> bool {
        self.on_curve(curve)
            .iter()
            .any(|s| !before(p, s.start) && !before(s.end, p))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut spans = self.spans.clone();
        spans.extend_from_slice(&other.spans);
        Self::from_spans(spans)
    }

    /// Set difference `self - other`.
    pub fn subtract(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        self.for_each_difference(other, |s| out.push(s));
        Self::from_spans(out)
    }

    /// Arc length of `self - other`, without allocating.
    pub fn measure_minus(&self, other: &Self) -> T {
        let mut total = T::zero();
        self.for_each_difference(other, |s| total += s.length());
        total
    }

    fn for_each_difference(&self, other: &Self, mut emit: impl FnMut(Span<T>)) {
        for s in &self.spans {
            let j = other
                .spans
                .partition_point(|o| o.curve < s.curve || (o.curve == s.curve && !before(s.start, o.end)));
            // pieces of `s` not covered by other.spans[j..] on the same curve
            let mut cur = (s.start, s.start_arc);
            let mut k = j;
            while k < other.spans.len() && other.spans[k].curve == s.curve && before(other.spans[k].start, s.end) {
                let o = &other.spans[k];
                if before(cur.0, o.start) {
                    emit(Span {
                        curve: s.curve,
                        start: cur.0,
                        end: o.start,
                        start_arc: cur.1,
                        end_arc: o.start_arc,
                    });
                }
                cur = max_param(cur, (o.end, o.end_arc));
                k += 1;
            }
            if before(cur.0, s.end) {
                emit(Span {
                    curve: s.curve,
                    start: cur.0,
                    end: s.end,
                    start_arc: cur.1,
                    end_arc: s.end_arc,
                });
            }
        }
    }

    /// Set intersection.
    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let (a, b) = (&self.spans[i], &other.spans[j]);
            match a.curve.cmp(&b.curve) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    let lo = max_param((a.start, a.start_arc), (b.start, b.start_arc));
                    let hi = min_param((a.end, a.end_arc), (b.end, b.end_arc));
                    if !before(hi.0, lo.0) {
                        out.push(Span {
                            curve: a.curve,
                            start: lo.0,
                            end: hi.0,
                            start_arc: lo.1,
                            end_arc: hi.1,
                        });
                    }
                    if before(a.end, b.end) {
                        i += 1;
                    } else {
                        j += 1;
                    }
                }
            }
        }
        Self::from_spans(out)
    }
}

/// Rows `[s, t]` of a center subcurve as band bounds.
fn band_rows<T: Scalar>(s: CurveParam<T>, t: CurveParam<T>) -> ((usize, T), (usize, T)) {
    let start = (s.edge(), s.t());
    let end = if t == s { start } else { t.end_form() };
    (start, end)
}

/// Coverage of the center rows `[s, t]` of `center` on one target, with
/// path starts restricted to `start_cols` (sorted; others cannot be free).
fn sweep_target<T: Scalar>(
    target_id: usize,
    target: &PolygonalCurve<T>,
    center: Polyline<'_, T>,
    rows: ((usize, T), (usize, T)),
    start_point: &[T],
    start_cols: impl Iterator<Item = usize>,
    r: T,
    out: &mut Vec<Span<T>>,
) {
    let n = target.num_edges();
    let mut lows: Vec<(usize, T)> = Vec::new();
    let mut starts = Vec::new();
    for c in start_cols {
        if let Some(iv) = point_segment_interval(start_point, target.vertex(c - 1), target.vertex(c), r) {
            lows.push((c, iv.lo));
            starts.push((c, Reach::single(iv, c as u32)));
        }
    }
    if starts.is_empty() {
        return;
    }
    let band = BandSpec {
        col_start: (1, T::zero()),
        col_end: (n, T::one()),
        row_start: rows.0,
        row_end: rows.1,
    };
    for (col, reach) in propagate(target.polyline(), center, r, &band, starts) {
        let c0 = reach.min_label() as usize;
        let lo = match lows.binary_search_by(|x| x.0.cmp(&c0)) {
            Ok(k) => lows[k].1,
            Err(_) => continue,
        };
        out.push(Span::new(
            target_id,
            target,
            CurveParam::canonical(c0, lo, n),
            CurveParam::canonical(col, reach.hi, n),
        ));
    }
}

/// Coverage of `center` (a subcurve of `center_curve`) on `target`, using
/// the free space `diag` of `target` (x-axis) and `center_curve` (y-axis).
///
/// Returns the maximal intervals `[a, b]` of `target` for which a monotone
/// path runs from `(a, center.start)` to `(b, center.end)`.
pub fn compute_coverage<T: Scalar>(
    center: &Subcurve<T>,
    center_curve: &PolygonalCurve<T>,
    target_id: usize,
    target: &PolygonalCurve<T>,
    diag: &FreeSpaceDiagram<T>,
) -> Result<CoverageSet<T>> {
    if diag.p_edges() != target.num_edges() || diag.q_edges() != center_curve.num_edges() {
        return Err(Error::Structural(format!(
            "diagram is {} x {} cells but target has {} edges and center curve {}",
            diag.p_edges(),
            diag.q_edges(),
            target.num_edges(),
            center_curve.num_edges()
        )));
    }
    if center.end.edge() > center_curve.num_edges() {
        return Err(Error::Structural("center lies outside its curve".into()));
    }
    if center_curve.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: center_curve.dim(),
            found: target.dim(),
        });
    }
    let mut start_point = vec![T::zero(); center_curve.dim()];
    center_curve.point_into(center.start, &mut start_point);
    let mut spans = Vec::new();
    sweep_target(
        target_id,
        target,
        center_curve.polyline(),
        band_rows(center.start, center.end),
        &start_point,
        1..=target.num_edges(),
        diag.delta(),
        &mut spans,
    );
    Ok(CoverageSet::from_spans(spans))
}

/// Coverage computation against a fixed family of curves, with a spatial
/// index so that only edges near a center's start are tried as path starts.
#[derive(Debug)]
pub struct CoverageEngine<'a, T> {
    curves: &'a [PolygonalCurve<T>],
    delta: T,
    index: SegmentIndex<T>,
    /// `(curve, edge)` of each indexed segment.
    items: Vec<(u32, u32)>,
}

impl<'a, T: Scalar> CoverageEngine<'a, T> {
    pub fn new(curves: &'a [PolygonalCurve<T>], delta: T) -> Self {
        let mut items = Vec::new();
        for (ci, c) in curves.iter().enumerate() {
            for e in 1..=c.num_edges() {
                items.push((ci as u32, e as u32));
            }
        }
        let dim = curves.first().map_or(1, PolygonalCurve::dim);
        let segments = items.iter().map(|&(c, e)| {
            (
                curves[c as usize].vertex(e as usize - 1),
                curves[c as usize].vertex(e as usize),
            )
        });
        let index = SegmentIndex::build(dim, segments, delta);
        Self {
            curves,
            delta,
            index,
            items,
        }
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn curves(&self) -> &'a [PolygonalCurve<T>] {
        self.curves
    }

    /// `(curve, edge)` pairs whose edge passes within `delta` of `point`,
    /// grouped by curve with edges ascending.
    pub(crate) fn edges_near(&self, point: &[T], buf: &mut Vec<u32>) -> Vec<(usize, usize)> {
        self.index.query_point(point, self.delta, buf);
        buf.iter()
            .map(|&id| {
                let (c, e) = self.items[id as usize];
                (c as usize, e as usize)
            })
            .collect()
    }

    /// Coverage of `center` on every curve.
    pub fn coverage(&self, center: &Subcurve<T>) -> CoverageSet<T> {
        let parent = &self.curves[center.curve_id];
        let mut start_point = vec![T::zero(); parent.dim()];
        parent.point_into(center.start, &mut start_point);
        let mut buf = Vec::new();
        let near = self.edges_near(&start_point, &mut buf);
        let rows = band_rows(center.start, center.end);
        let mut spans = Vec::new();
        let mut k = 0;
        while k < near.len() {
            let curve = near[k].0;
            let end = k + near[k..].iter().take_while(|x| x.0 == curve).count();
            sweep_target(
                curve,
                &self.curves[curve],
                parent.polyline(),
                rows,
                &start_point,
                near[k..end].iter().map(|x| x.1),
                self.delta,
                &mut spans,
            );
            k = end;
        }
        CoverageSet::from_spans(spans)
    }
}

/// Whether some subcurve of `p` starting in `start_window` and ending in
/// `end_window` is within Fréchet distance `r` of the whole of `center`.
pub fn exists_matching<T: Scalar>(
    p: &PolygonalCurve<T>,
    center: &PolygonalCurve<T>,
    r: T,
    start_window: (CurveParam<T>, CurveParam<T>),
    end_window: (CurveParam<T>, CurveParam<T>),
) -> bool {
    let (s0, s1) = start_window;
    let (e0, e1) = end_window;
    if before(s1, s0) || before(e1, e0) || before(e1, s0) {
        return false;
    }
    let s1 = s1.end_form();
    let e1 = e1.end_form();
    let first_col = s0.edge();
    let mut starts = Vec::new();
    for c in first_col..=s1.0.max(first_col) {
        let xlo = if c == first_col { s0.t() } else { T::zero() };
        let xhi = if c == s1.0 { s1.1 } else { T::one() };
        if let Some(iv) =
            point_segment_interval(center.vertex(0), p.vertex(c - 1), p.vertex(c), r).and_then(|iv| iv.clip(xlo, xhi))
        {
            starts.push((c, Reach::single(iv, 0)));
        }
    }
    if starts.is_empty() {
        return false;
    }
    let band = BandSpec {
        col_start: (first_col, s0.t()),
        col_end: e1,
        row_start: (1, T::zero()),
        row_end: (center.num_edges(), T::one()),
    };
    let eps = T::lit(1e-12);
    let (lo, hi) = (e0.position(), T::lit((e1.0 - 1) as f64) + e1.1);
    propagate(p.polyline(), center.polyline(), r, &band, starts)
        .iter()
        .any(|(c, reach)| {
            let base = T::lit((*c - 1) as f64);
            base + reach.hi >= lo - eps && base + reach.lo <= hi + eps
        })
}
