//! Free-space diagrams of curve pairs.
//!
//! The x-axis of a diagram is the curve `P` (columns = edges of `P`), the
//! y-axis is `Q` (rows = edges of `Q`). Inside a cell the free space is the
//! intersection of an ellipse (or a slab) with the unit square and hence
//! convex; on every cell boundary it is a single closed interval.

mod reach;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::geometry::{CurveParam, PolygonalCurve};
use crate::scalar::Scalar;
use crate::spatial::SegmentIndex;

pub(crate) use reach::{decide, propagate, BandSpec, Reach};

/// Roots this close to 0 or 1 are snapped onto the cell boundary.
const ROOT_SNAP: f64 = 1e-12;
/// Relative slack on discriminants, so exact tangencies survive rounding.
const DISCRIMINANT_SLACK: f64 = 1e-12;
/// Relative threshold on the leading coefficient below which the free space
/// of a cell is treated as a slab (parallel edges).
const PARALLEL_THRESHOLD: f64 = 1e-9;
/// Separation below which two candidate points are considered the same.
const POINT_TOLERANCE: f64 = 1e-12;

/// Closed interval of local cell coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clip(self, lo: T, hi: T) -> Option<Self> {
        let lo = self.lo.max(lo);
        let hi = self.hi.min(hi);
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

fn snap<T: Scalar>(x: T) -> T {
    let eps = T::lit(ROOT_SNAP);
    if (x - T::zero()).abs() < eps {
        T::zero()
    } else if (x - T::one()).abs() < eps {
        T::one()
    } else {
        x
    }
}

/// Real roots of `a x^2 + b x + c` (`a > 0`) in ascending order, computed
/// without cancellation.
fn quadratic_roots<T: Scalar>(a: T, b: T, c: T) -> Option<(T, T)> {
    let mut disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        let slack = T::lit(DISCRIMINANT_SLACK) * (b * b + (T::lit(4.0) * a * c).abs());
        if disc < -slack {
            return None;
        }
        disc = T::zero();
    }
    let sq = disc.sqrt();
    let q = if b < T::zero() {
        T::lit(-0.5) * (b - sq)
    } else {
        T::lit(-0.5) * (b + sq)
    };
    if q == T::zero() {
        return Some((T::zero(), T::zero()));
    }
    let r1 = q / a;
    let r2 = c / q;
    Some((r1.min(r2), r1.max(r2)))
}

/// `{t in [0,1] : |a + t (b - a) - c| <= r}`.
pub(crate) fn point_segment_interval<T: Scalar>(c: &[T], a: &[T], b: &[T], r: T) -> Option<Interval<T>> {
    let mut uu = T::zero();
    let mut uw = T::zero();
    let mut ww = T::zero();
    for k in 0..c.len() {
        let u = b[k] - a[k];
        let w = a[k] - c[k];
        uu += u * u;
        uw += u * w;
        ww += w * w;
    }
    let rr = r * r;
    if uu == T::zero() {
        return (ww <= rr).then_some(Interval::new(T::zero(), T::one()));
    }
    let (lo, hi) = quadratic_roots(uu, uw + uw, ww - rr)?;
    Interval::new(snap(lo), snap(hi)).clip(T::zero(), T::one())
}

/// Free intervals on the four boundaries of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellBoundaries<T> {
    /// On `x = 0`, as a `y`-interval.
    pub left: Option<Interval<T>>,
    /// On `x = 1`, as a `y`-interval.
    pub right: Option<Interval<T>>,
    /// On `y = 0`, as an `x`-interval.
    pub bottom: Option<Interval<T>>,
    /// On `y = 1`, as an `x`-interval.
    pub top: Option<Interval<T>>,
}

impl<T: Scalar> CellBoundaries<T> {
    pub(crate) fn compute(p0: &[T], p1: &[T], q0: &[T], q1: &[T], r: T) -> Self {
        Self {
            left: point_segment_interval(p0, q0, q1, r),
            right: point_segment_interval(p1, q0, q1, r),
            bottom: point_segment_interval(q0, p0, p1, r),
            top: point_segment_interval(q1, p0, p1, r),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_none() && self.right.is_none() && self.bottom.is_none() && self.top.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Whether an extremal point is the unique extreme of its cell, or the
/// upper/lower end of a vertical extreme segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AmbiguityRole {
    Unique,
    Upper,
    Lower,
}

/// A left- or right-most point of the free space of one cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtremalPoint<T> {
    /// `(P edge, Q edge)`, both 1-based.
    pub cell: (usize, usize),
    pub side: Side,
    pub x: CurveParam<T>,
    pub y: CurveParam<T>,
    pub role: AmbiguityRole,
}

/// Local coordinates of the extremal points of one cell.
#[derive(Clone, Debug, Default, PartialEq)]
pub(crate) struct CellExtremes<T> {
    pub left: Vec<(T, T, AmbiguityRole)>,
    pub right: Vec<(T, T, AmbiguityRole)>,
}

/// Left/right extremal points of the cell spanned by edges `p0 p1` (x) and
/// `q0 q1` (y). Returns `None` when the cell's free space is empty.
pub(crate) fn cell_extremes<T: Scalar>(
    p0: &[T],
    p1: &[T],
    q0: &[T],
    q1: &[T],
    r: T,
    bounds: &CellBoundaries<T>,
) -> Option<CellExtremes<T>> {
    let mut cands: Vec<(T, T)> = Vec::with_capacity(8);
    if let Some(i) = bounds.left {
        cands.push((T::zero(), i.lo));
        cands.push((T::zero(), i.hi));
    }
    if let Some(i) = bounds.right {
        cands.push((T::one(), i.lo));
        cands.push((T::one(), i.hi));
    }
    if let Some(i) = bounds.bottom {
        cands.push((i.lo, T::zero()));
        cands.push((i.hi, T::zero()));
    }
    if let Some(i) = bounds.top {
        cands.push((i.lo, T::one()));
        cands.push((i.hi, T::one()));
    }
    // Interior points with a vertical tangent: minimise over y the squared
    // distance, leaving a quadratic in x.
    let n = p0.len();
    let (mut uu, mut uv, mut vv, mut wu, mut wv, mut ww) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    for k in 0..n {
        let u = p1[k] - p0[k];
        let v = q1[k] - q0[k];
        let w = p0[k] - q0[k];
        uu += u * u;
        uv += u * v;
        vv += v * v;
        wu += w * u;
        wv += w * v;
        ww += w * w;
    }
    if vv > T::zero() {
        let a = uu - uv * uv / vv;
        if a > T::lit(PARALLEL_THRESHOLD) * uu {
            let b = T::lit(2.0) * (wu - wv * uv / vv);
            let c = ww - wv * wv / vv - r * r;
            if let Some((x1, x2)) = quadratic_roots(a, b, c) {
                for x in [x1, x2] {
                    let y = (wv + x * uv) / vv;
                    if (T::zero()..=T::one()).contains(&x) && (T::zero()..=T::one()).contains(&y) {
                        cands.push((x, y));
                    }
                }
            }
        }
    }
    if cands.is_empty() {
        return None;
    }
    let tol = T::lit(POINT_TOLERANCE);
    let pick = |extreme: T| {
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        let mut x_at = extreme;
        for &(x, y) in &cands {
            if (x - extreme).abs() <= tol {
                if lo.map_or(true, |l| y < l) {
                    lo = Some(y);
                    x_at = x;
                }
                hi = Some(hi.map_or(y, |h: T| h.max(y)));
            }
        }
        let (lo, hi) = (lo.unwrap(), hi.unwrap());
        if hi - lo > tol {
            vec![(x_at, lo, AmbiguityRole::Lower), (x_at, hi, AmbiguityRole::Upper)]
        } else {
            vec![(x_at, lo, AmbiguityRole::Unique)]
        }
    };
    let xmin = cands.iter().map(|c| c.0).fold(T::infinity(), T::min);
    let xmax = cands.iter().map(|c| c.0).fold(T::neg_infinity(), T::max);
    Some(CellExtremes {
        left: pick(xmin),
        right: pick(xmax),
    })
}

/// Sparse free-space diagram: only cells with non-empty free space are
/// stored.
#[derive(Clone, Debug)]
pub struct FreeSpaceDiagram<T> {
    p_edges: usize,
    q_edges: usize,
    delta: T,
    cells: BTreeMap<(usize, usize), CellBoundaries<T>>,
    extremes: BTreeMap<(usize, usize), CellExtremes<T>>,
}

impl<T: Scalar> FreeSpaceDiagram<T> {
    pub fn p_edges(&self) -> usize {
        self.p_edges
    }

    pub fn q_edges(&self) -> usize {
        self.q_edges
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Boundary intervals of cell `(i, j)`; `None` for an empty cell.
    pub fn cell(&self, i: usize, j: usize) -> Option<&CellBoundaries<T>> {
        self.cells.get(&(i, j))
    }

    pub fn is_free(&self, i: usize, j: usize) -> bool {
        self.cells.contains_key(&(i, j))
    }

    pub fn nonempty_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.keys().copied()
    }

    /// Text grid of cell occupancy, top row first (`#` free, `.` empty).
    pub fn occupancy_grid(&self) -> String {
        let mut s = String::new();
        for j in (1..=self.q_edges).rev() {
            for i in 1..=self.p_edges {
                s.push(if self.is_free(i, j) { '#' } else { '.' });
            }
            s.push('\n');
        }
        let _ = writeln!(s, "# {} x {} cells, delta = {}", self.p_edges, self.q_edges, self.delta);
        s
    }
}

/// Builds the `delta`-free space of `p` (x-axis) and `q` (y-axis).
pub fn build_free_space<T: Scalar>(p: &PolygonalCurve<T>, q: &PolygonalCurve<T>, delta: T) -> FreeSpaceDiagram<T> {
    let q_segments = (1..=q.num_edges()).map(|j| (q.vertex(j - 1), q.vertex(j)));
    let index = SegmentIndex::build(q.dim(), q_segments, delta);
    let mut cells = BTreeMap::new();
    let mut extremes = BTreeMap::new();
    let mut hits = Vec::new();
    for i in 1..=p.num_edges() {
        let (p0, p1) = (p.vertex(i - 1), p.vertex(i));
        index.query_segment(p0, p1, delta, &mut hits);
        for &jj in &hits {
            let j = jj as usize + 1;
            let (q0, q1) = (q.vertex(j - 1), q.vertex(j));
            let bounds = CellBoundaries::compute(p0, p1, q0, q1, delta);
            if let Some(ext) = cell_extremes(p0, p1, q0, q1, delta, &bounds) {
                cells.insert((i, j), bounds);
                extremes.insert((i, j), ext);
            }
        }
    }
    FreeSpaceDiagram {
        p_edges: p.num_edges(),
        q_edges: q.num_edges(),
        delta,
        cells,
        extremes,
    }
}

/// All left and right extremal points of a diagram, cell by cell.
pub fn extremal_points<T: Scalar>(diag: &FreeSpaceDiagram<T>) -> Vec<ExtremalPoint<T>> {
    let mut out = Vec::new();
    for (&(i, j), ext) in &diag.extremes {
        for (side, pts) in [(Side::Left, &ext.left), (Side::Right, &ext.right)] {
            for &(x, y, role) in pts {
                out.push(ExtremalPoint {
                    cell: (i, j),
                    side,
                    x: CurveParam::canonical(i, x, diag.p_edges),
                    y: CurveParam::canonical(j, y, diag.q_edges),
                    role,
                });
            }
        }
    }
    out
}

/// Whether a coordinate-monotone path runs through the `delta`-free space of
/// `p` (x-axis) and `q` (y-axis) from `start` to `end`.
///
/// With `start = (P(0), Q(0))` and `end = (P(1), Q(1))` this decides
/// whether the Fréchet distance of the curves is at most `delta`.
pub fn frechet_decision<T: Scalar>(
    p: &PolygonalCurve<T>,
    q: &PolygonalCurve<T>,
    delta: T,
    start: (CurveParam<T>, CurveParam<T>),
    end: (CurveParam<T>, CurveParam<T>),
) -> bool {
    let (a, s) = start;
    let (b, t) = end;
    if a.edge() > p.num_edges() || b.edge() > p.num_edges() || s.edge() > q.num_edges() || t.edge() > q.num_edges() {
        return false;
    }
    if !(a <= b && s <= t) {
        return false;
    }
    reach::decide(p.polyline(), q.polyline(), delta, (a, s), (b, t))
}

/// `d_F(p, q) <= delta`.
pub fn frechet_at_most<T: Scalar>(p: &PolygonalCurve<T>, q: &PolygonalCurve<T>, delta: T) -> bool {
    frechet_decision(
        p,
        q,
        delta,
        (CurveParam::start(), CurveParam::start()),
        (CurveParam::end(p.num_edges()), CurveParam::end(q.num_edges())),
    )
}

/// Whether `dist(P(x), Q(y)) <= delta + slack`.
#[cfg(test)]
pub(crate) fn is_free_point<T: Scalar>(
    p: &PolygonalCurve<T>,
    q: &PolygonalCurve<T>,
    x: CurveParam<T>,
    y: CurveParam<T>,
    delta: T,
    slack: T,
) -> bool {
    let mut a = vec![T::zero(); p.dim()];
    let mut b = vec![T::zero(); q.dim()];
    p.point_into(x, &mut a);
    q.point_into(y, &mut b);
    crate::scalar::dist(&a, &b) <= delta + slack
}
