//! Polygonal curves, their parametrization, and a few metric primitives.
//!
//! A curve with vertices `v_0, ..., v_n` has `n` edges, numbered `1..=n`;
//! edge `e` runs from `v_{e-1}` to `v_e`. Locations on the curve are
//! [`CurveParam`]s, an `(edge, t)` pair with `t` the fraction along the edge.
//! Storing the edge index separately keeps full precision on curves with a
//! very large number of edges.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::{dist, dist_sq, Scalar};

/// Absolute coordinate tolerance used for dropping repeated vertices.
pub const DEFAULT_COORD_TOLERANCE: f64 = 1e-9;

/// A location on a polygonal curve.
///
/// Canonical form: `t < 1` unless `edge` is the last edge, so every point of
/// the curve has exactly one representation. Ordering is lexicographic on
/// `(edge, t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveParam<T> {
    edge: usize,
    t: T,
}

impl<T: Scalar> CurveParam<T> {
    /// Builds a canonical parameter on a curve with `n_edges` edges.
    pub fn new(edge: usize, t: T, n_edges: usize) -> Result<Self> {
        if edge == 0 || edge > n_edges {
            return Err(Error::param(format!("edge index {edge} outside 1..={n_edges}")));
        }
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::param(format!("edge fraction {t} outside [0, 1]")));
        }
        Ok(Self::canonical(edge, t, n_edges))
    }

    /// Canonicalizes without validating; `t` is clamped to `[0, 1]`.
    pub(crate) fn canonical(edge: usize, t: T, n_edges: usize) -> Self {
        let t = t.max(T::zero()).min(T::one());
        if t >= T::one() && edge < n_edges {
            Self {
                edge: edge + 1,
                t: T::zero(),
            }
        } else {
            Self { edge, t }
        }
    }

    pub fn start() -> Self {
        Self { edge: 1, t: T::zero() }
    }

    pub fn end(n_edges: usize) -> Self {
        Self {
            edge: n_edges,
            t: T::one(),
        }
    }

    /// Parameter of vertex `k` (`0..=n_edges`).
    pub fn vertex(k: usize, n_edges: usize) -> Self {
        if k >= n_edges {
            Self::end(n_edges)
        } else {
            Self {
                edge: k + 1,
                t: T::zero(),
            }
        }
    }

    #[inline]
    pub fn edge(&self) -> usize {
        self.edge
    }

    #[inline]
    pub fn t(&self) -> T {
        self.t
    }

    /// Grid coordinate `edge - 1 + t`, in `[0, n_edges]`.
    pub fn position(&self) -> T {
        T::lit((self.edge - 1) as f64) + self.t
    }

    pub fn from_position(x: T, n_edges: usize) -> Self {
        let x = x.max(T::zero()).min(T::lit(n_edges as f64));
        let floor = x.floor();
        let edge = (floor.as_f64() as usize + 1).min(n_edges);
        let t = x - T::lit((edge - 1) as f64);
        Self::canonical(edge, t, n_edges)
    }

    /// Global parameter in `[0, 1]`, uniform per edge.
    pub fn fraction(&self, n_edges: usize) -> T {
        self.position() / T::lit(n_edges as f64)
    }

    pub fn from_fraction(f: T, n_edges: usize) -> Self {
        Self::from_position(f * T::lit(n_edges as f64), n_edges)
    }

    /// `(edge, t)` with a vertex expressed as the end of the preceding edge,
    /// the form used when a parameter closes a range.
    pub(crate) fn end_form(&self) -> (usize, T) {
        if self.t == T::zero() && self.edge > 1 {
            (self.edge - 1, T::one())
        } else {
            (self.edge, self.t)
        }
    }

    /// Total order; parameters are always finite.
    pub fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<T: Scalar> PartialOrd for CurveParam<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.edge.cmp(&other.edge) {
            Ordering::Equal => self.t.partial_cmp(&other.t),
            ord => Some(ord),
        }
    }
}

/// Borrowed vertex sequence. Unlike [`PolygonalCurve`] it may contain
/// zero-length edges (shortcut segments, single points).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Polyline<'a, T> {
    pub dim: usize,
    pub coords: &'a [T],
}

impl<'a, T: Scalar> Polyline<'a, T> {
    pub fn new(dim: usize, coords: &'a [T]) -> Self {
        debug_assert!(dim > 0 && coords.len() % dim == 0 && coords.len() >= dim);
        Self { dim, coords }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn vertex(&self, k: usize) -> &'a [T] {
        let k = k.min(self.num_vertices() - 1);
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    /// Point at local fraction `t` of 1-based edge `e`, written into `out`.
    pub fn point_into(&self, e: usize, t: T, out: &mut [T]) {
        let a = self.vertex(e - 1);
        let b = self.vertex(e);
        if t == T::zero() {
            out.copy_from_slice(a);
        } else if t == T::one() {
            out.copy_from_slice(b);
        } else {
            for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
                *o = (T::one() - t) * x + t * y;
            }
        }
    }
}

/// Piecewise-linear curve in `R^d` with at least one edge and no zero-length
/// edges.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalCurve<T> {
    dim: usize,
    coords: Vec<T>,
    prefix: Vec<T>,
}

impl<T: Scalar> PolygonalCurve<T> {
    /// Builds a curve, dropping consecutive vertices closer than
    /// [`DEFAULT_COORD_TOLERANCE`].
    pub fn new<P: AsRef<[T]>>(points: &[P]) -> Result<Self> {
        Self::with_tolerance(points, T::lit(DEFAULT_COORD_TOLERANCE)).map(|(c, _)| c)
    }

    /// Builds a curve and returns the number of dropped repeated vertices.
    pub fn with_tolerance<P: AsRef<[T]>>(points: &[P], tol: T) -> Result<(Self, usize)> {
        let dim = points
            .first()
            .map(|p| p.as_ref().len())
            .ok_or_else(|| Error::DegenerateCurve("no vertices".into()))?;
        if dim == 0 {
            return Err(Error::param("zero-dimensional points"));
        }
        let mut coords: Vec<T> = Vec::with_capacity(points.len() * dim);
        let mut dropped = 0;
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::param(format!("vertex {i} has a non-finite coordinate")));
            }
            if coords.len() >= dim && dist(&coords[coords.len() - dim..], p) <= tol {
                dropped += 1;
                continue;
            }
            coords.extend_from_slice(p);
        }
        if coords.len() < 2 * dim {
            return Err(Error::DegenerateCurve(format!(
                "fewer than 2 distinct vertices ({} given)",
                points.len()
            )));
        }
        Ok((Self::from_valid(dim, coords), dropped))
    }

    /// Builds from flat row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::param("coordinate count is not a multiple of the dimension"));
        }
        let rows: Vec<&[T]> = coords.chunks(dim).collect();
        Self::new(&rows)
    }

    pub(crate) fn from_valid(dim: usize, coords: Vec<T>) -> Self {
        let n = coords.len() / dim;
        let mut prefix = Vec::with_capacity(n);
        prefix.push(T::zero());
        for k in 1..n {
            let len = dist(&coords[(k - 1) * dim..k * dim], &coords[k * dim..(k + 1) * dim]);
            let last = prefix[k - 1];
            prefix.push(last + len);
        }
        Self { dim, coords, prefix }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Complexity `n` of the curve.
    #[inline]
    pub fn num_edges(&self) -> usize {
        self.num_vertices() - 1
    }

    #[inline]
    pub fn vertex(&self, k: usize) -> &[T] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.coords.chunks(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    /// Cumulative arc length at each vertex.
    pub fn prefix_lengths(&self) -> &[T] {
        &self.prefix
    }

    /// Length of 1-based edge `e`.
    pub fn edge_length(&self, e: usize) -> T {
        self.prefix[e] - self.prefix[e - 1]
    }

    pub fn length(&self) -> T {
        self.prefix[self.prefix.len() - 1]
    }

    pub(crate) fn polyline(&self) -> Polyline<'_, T> {
        Polyline::new(self.dim, &self.coords)
    }

    /// Vertices `i..=j` as a borrowed polyline.
    pub(crate) fn chunk(&self, i: usize, j: usize) -> Polyline<'_, T> {
        Polyline::new(self.dim, &self.coords[i * self.dim..(j + 1) * self.dim])
    }

    fn check_param(&self, p: &CurveParam<T>) -> Result<()> {
        if p.edge == 0 || p.edge > self.num_edges() {
            return Err(Error::param(format!(
                "edge index {} outside 1..={}",
                p.edge,
                self.num_edges()
            )));
        }
        Ok(())
    }

    /// Point `(1 - t) v_{edge-1} + t v_edge`.
    pub fn eval_param(&self, p: CurveParam<T>) -> Result<Vec<T>> {
        self.check_param(&p)?;
        let mut out = vec![T::zero(); self.dim];
        self.polyline().point_into(p.edge, p.t, &mut out);
        Ok(out)
    }

    pub(crate) fn point_into(&self, p: CurveParam<T>, out: &mut [T]) {
        self.polyline().point_into(p.edge, p.t, out);
    }

    /// Arc length from the start of the curve to `p`.
    pub fn arc_position(&self, p: CurveParam<T>) -> T {
        let e = p.edge;
        if p.t == T::zero() {
            self.prefix[e - 1]
        } else if p.t == T::one() {
            self.prefix[e]
        } else {
            self.prefix[e - 1] + p.t * self.edge_length(e)
        }
    }

    /// Euclidean length of the subcurve between `a` and `b`.
    pub fn arc_length_between(&self, a: CurveParam<T>, b: CurveParam<T>) -> Result<T> {
        self.check_param(&a)?;
        self.check_param(&b)?;
        if a > b {
            return Err(Error::param("arc length requested for a > b"));
        }
        Ok((self.arc_position(b) - self.arc_position(a)).max(T::zero()))
    }

    /// The subcurve from `a` to `b` as a standalone curve.
    pub fn extract_subcurve(&self, a: CurveParam<T>, b: CurveParam<T>) -> Result<Self> {
        self.check_param(&a)?;
        self.check_param(&b)?;
        if a > b {
            return Err(Error::param("subcurve requested with start after end"));
        }
        if a == b {
            return Err(Error::DegenerateSubcurve);
        }
        let d = self.dim;
        let (end_edge, _) = b.end_form();
        let mut coords = Vec::with_capacity((end_edge - a.edge + 2) * d);
        let mut buf = vec![T::zero(); d];
        self.point_into(a, &mut buf);
        coords.extend_from_slice(&buf);
        // interior vertices strictly between a and b
        for k in a.edge..end_edge {
            coords.extend_from_slice(self.vertex(k));
        }
        self.point_into(b, &mut buf);
        coords.extend_from_slice(&buf);
        // an endpoint may coincide with its neighbouring vertex
        let mut cleaned: Vec<T> = Vec::with_capacity(coords.len());
        for p in coords.chunks(d) {
            if cleaned.len() >= d && dist_sq(&cleaned[cleaned.len() - d..], p) == T::zero() {
                continue;
            }
            cleaned.extend_from_slice(p);
        }
        if cleaned.len() < 2 * d {
            return Err(Error::DegenerateSubcurve);
        }
        Ok(Self::from_valid(d, cleaned))
    }

    /// Parameter of vertex `k`.
    pub fn param_at_vertex(&self, k: usize) -> CurveParam<T> {
        CurveParam::vertex(k, self.num_edges())
    }
}

/// A forward subcurve `[start, end]` of curve `curve_id`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Subcurve<T> {
    pub curve_id: usize,
    pub start: CurveParam<T>,
    pub end: CurveParam<T>,
}

impl<T: Scalar> Subcurve<T> {
    pub fn new(curve_id: usize, start: CurveParam<T>, end: CurveParam<T>) -> Result<Self> {
        if start > end {
            return Err(Error::param("subcurve start after end"));
        }
        Ok(Self { curve_id, start, end })
    }

    /// Number of edges of the parent curve the subcurve touches.
    pub fn complexity(&self) -> usize {
        let (end_edge, _) = self.end.end_form();
        end_edge + 1 - self.start.edge.min(end_edge)
    }
}

/// Discrete Fréchet distance between two point sequences.
pub fn discrete_frechet<T: Scalar, P: AsRef<[T]>>(p: &[P], q: &[P]) -> Result<T> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::param("discrete Fréchet distance of an empty sequence"));
    }
    let m = q.len();
    let mut prev = vec![T::zero(); m];
    let mut cur = vec![T::zero(); m];
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            let d = dist(pi.as_ref(), qj.as_ref());
            cur[j] = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1].max(d),
                (_, 0) => prev[0].max(d),
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]).max(d),
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[[f64; 2]]) -> PolygonalCurve<f64> {
        PolygonalCurve::new(points).unwrap()
    }

    fn param(e: usize, t: f64, n: usize) -> CurveParam<f64> {
        CurveParam::new(e, t, n).unwrap()
    }

    #[test]
    fn eval_examples() {
        let seg = curve(&[[0.0, 0.0], [2.0, 0.0]]);
        assert_eq!(seg.eval_param(param(1, 0.5, 1)).unwrap(), vec![1.0, 0.0]);
        let l = curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        assert_eq!(l.eval_param(param(2, 1.0, 2)).unwrap(), vec![1.0, 1.0]);
        assert_eq!(l.eval_param(param(2, 0.25, 2)).unwrap(), vec![1.0, 0.25]);
    }

    #[test]
    fn eval_rejects_out_of_range_edge() {
        let l = curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let bad = CurveParam::canonical(3, 0.5, 5);
        assert!(matches!(l.eval_param(bad), Err(Error::Parameter(_))));
        assert!(CurveParam::<f64>::new(0, 0.5, 2).is_err());
    }

    #[test]
    fn canonical_form() {
        let p = param(1, 1.0, 3);
        assert_eq!((p.edge(), p.t()), (2, 0.0));
        let q = param(3, 1.0, 3);
        assert_eq!((q.edge(), q.t()), (3, 1.0));
        assert_eq!(p.end_form(), (1, 1.0));
        assert!(param(1, 0.9, 3) < param(2, 0.0, 3));
        assert_eq!(CurveParam::from_position(1.5, 3), param(2, 0.5, 3));
        assert_eq!(CurveParam::from_fraction(1.0, 3), CurveParam::end(3));
    }

    #[test]
    fn arc_length_examples() {
        let seg = curve(&[[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(
            seg.arc_length_between(CurveParam::start(), CurveParam::end(1)).unwrap(),
            1.0
        );
        let l = curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let a = param(1, 0.5, 2);
        assert_eq!(l.arc_length_between(a, a).unwrap(), 0.0);
        assert_eq!(l.arc_length_between(a, param(2, 0.5, 2)).unwrap(), 1.0);
        assert!(l.arc_length_between(param(2, 0.5, 2), a).is_err());
    }

    #[test]
    fn extract_examples() {
        let c = curve(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let s = c.extract_subcurve(param(1, 0.5, 2), param(2, 0.5, 2)).unwrap();
        assert_eq!(s.coords(), &[0.5, 0.0, 1.0, 0.0, 1.5, 0.0]);
        let full = c.extract_subcurve(CurveParam::start(), CurveParam::end(2)).unwrap();
        assert_eq!(full, c);
        let inner = c.extract_subcurve(param(1, 0.25, 2), param(1, 0.75, 2)).unwrap();
        assert_eq!(inner.num_vertices(), 2);
        let a = param(1, 0.25, 2);
        assert!(matches!(c.extract_subcurve(a, a), Err(Error::DegenerateSubcurve)));
    }

    #[test]
    fn extract_ending_on_vertex() {
        let c = curve(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [2.0, 1.0]]);
        let s = c.extract_subcurve(param(1, 0.5, 3), param(3, 0.0, 3)).unwrap();
        assert_eq!(s.coords(), &[0.5, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let sub = Subcurve::new(0, param(1, 0.5, 3), param(3, 0.0, 3)).unwrap();
        assert_eq!(sub.complexity(), 2);
    }

    #[test]
    fn construction_drops_repeats() {
        let (c, dropped) = PolygonalCurve::with_tolerance(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]], 1e-9).unwrap();
        assert_eq!(dropped, 1);
        assert_eq!(c.num_edges(), 1);
        assert!(matches!(
            PolygonalCurve::new(&[[1.0, 1.0], [1.0, 1.0]]),
            Err(Error::DegenerateCurve(_))
        ));
        assert!(PolygonalCurve::new(&[[0.0, f64::NAN], [1.0, 0.0]]).is_err());
        let ragged: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0]];
        assert!(matches!(
            PolygonalCurve::new(&ragged),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn discrete_frechet_examples() {
        let p = [[0.0, 0.0], [1.0, 0.0], [2.0, 1.0]];
        assert_eq!(discrete_frechet(&p, &p).unwrap(), 0.0);
        assert_eq!(discrete_frechet(&[[0.0, 0.0]], &[[3.0, 4.0]]).unwrap(), 5.0);
        let a = [[0.0, 0.0], [1.0, 0.0]];
        let b = [[0.0, 1.0], [1.0, 1.0]];
        assert_eq!(discrete_frechet(&a, &b).unwrap(), 1.0);
        let empty: [[f64; 2]; 0] = [];
        assert!(discrete_frechet(&empty, &b).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let c = PolygonalCurve::<f32>::new(&[[0.0f32, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(c.length(), 5.0);
    }
}
