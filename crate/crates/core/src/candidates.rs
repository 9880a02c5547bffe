//! Candidate centers: subcurves of the simplifications whose endpoints are
//! y-coordinates of extremal points.
//!
//! Any subcurve's coverage is contained in the union of the coverages of a
//! constant number of subcurves with extremal endpoints. Between two
//! extremal coordinates only pairs that enclose zero or a power of two other
//! coordinates are kept; any other pair is the union of two overlapping kept
//! pairs, and for forward subcurves the coverage of a pair is contained in
//! the union of the coverages of two overlapping pieces.

use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::freespace::{cell_extremes, extremal_points, CellBoundaries, FreeSpaceDiagram};
use crate::geometry::{CurveParam, PolygonalCurve, Subcurve};
use crate::scalar::Scalar;
use crate::spatial::SegmentIndex;

/// Extremal coordinates closer than this (in edge units) are merged.
pub const COORD_DEDUP: f64 = 1e-12;

/// Sorted, deduplicated extremal y-coordinates per curve.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalCoordinateIndex<T> {
    coords: Vec<Vec<CurveParam<T>>>,
}

fn normalize<T: Scalar>(mut v: Vec<CurveParam<T>>, n_edges: usize) -> Vec<CurveParam<T>> {
    v.push(CurveParam::start());
    v.push(CurveParam::end(n_edges));
    v.sort_by(|a, b| a.cmp_total(b));
    let tol = T::lit(COORD_DEDUP);
    let mut out: Vec<CurveParam<T>> = Vec::with_capacity(v.len());
    for p in v {
        match out.last() {
            Some(last) if p.position() - last.position() <= tol => {
                // the curve end must survive exactly
                if p == CurveParam::end(n_edges) {
                    *out.last_mut().unwrap() = p;
                }
            }
            _ => out.push(p),
        }
    }
    out
}

impl<T: Scalar> ExtremalCoordinateIndex<T> {
    /// From raw coordinates per curve; sorts, deduplicates and adds curve
    /// ends.
    pub fn from_coords(coords: Vec<Vec<CurveParam<T>>>, edge_counts: &[usize]) -> Self {
        Self {
            coords: coords
                .into_iter()
                .zip(edge_counts)
                .map(|(v, &n)| normalize(v, n))
                .collect(),
        }
    }

    /// From explicit diagrams `(x_curve, y_curve, diagram)`; every curve's
    /// start and end are always included.
    pub fn from_diagrams<'a, I>(edge_counts: &[usize], diagrams: I) -> Self
    where
        T: 'a,
        I: IntoIterator<Item = (usize, usize, &'a FreeSpaceDiagram<T>)>,
    {
        let mut coords: Vec<Vec<CurveParam<T>>> = vec![Vec::new(); edge_counts.len()];
        for (_, y, diag) in diagrams {
            coords[y].extend(extremal_points(diag).into_iter().map(|e| e.y));
        }
        Self::from_coords(coords, edge_counts)
    }

    /// Over all ordered pairs of `curves` (self pairs included) at `delta`,
    /// visiting only cells whose edges pass within `delta` of each other.
    pub fn build(curves: &[PolygonalCurve<T>], delta: T) -> Self {
        let mut items: Vec<(u32, u32)> = Vec::new();
        for (ci, c) in curves.iter().enumerate() {
            for e in 1..=c.num_edges() {
                items.push((ci as u32, e as u32));
            }
        }
        let dim = curves.first().map_or(1, PolygonalCurve::dim);
        let index = SegmentIndex::build(
            dim,
            items.iter().map(|&(c, e)| {
                let c = &curves[c as usize];
                (c.vertex(e as usize - 1), c.vertex(e as usize))
            }),
            delta,
        );
        let coords = curves
            .par_iter()
            .map(|q| {
                let mut out = Vec::new();
                let mut hits = Vec::new();
                for row in 1..=q.num_edges() {
                    let (q0, q1) = (q.vertex(row - 1), q.vertex(row));
                    index.query_segment(q0, q1, delta, &mut hits);
                    for &id in &hits {
                        let (c, col) = items[id as usize];
                        let p = &curves[c as usize];
                        let (p0, p1) = (p.vertex(col as usize - 1), p.vertex(col as usize));
                        let bounds = CellBoundaries::compute(p0, p1, q0, q1, delta);
                        if let Some(ext) = cell_extremes(p0, p1, q0, q1, delta, &bounds) {
                            for &(_, y, _) in ext.left.iter().chain(&ext.right) {
                                out.push(CurveParam::canonical(row, y, q.num_edges()));
                            }
                        }
                    }
                }
                normalize(out, q.num_edges())
            })
            .collect();
        Self { coords }
    }

    pub fn num_curves(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self, curve: usize) -> &[CurveParam<T>] {
        &self.coords[curve]
    }

    /// Total number of coordinates over all curves.
    pub fn len(&self) -> usize {
        self.coords.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A candidate center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate<T> {
    pub id: usize,
    pub subcurve: Subcurve<T>,
    /// Number of edges of the parent simplification the subcurve touches.
    pub complexity: usize,
}

/// Which pairs of extremal coordinates become candidates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CandidateRule {
    /// Pairs enclosing zero or a power of two other coordinates.
    #[default]
    PowerOfTwo,
    /// Every pair (the unreduced set).
    AllPairs,
}

/// Enumerates candidates of complexity at most `l` on every curve of
/// `index`; ids are assigned in (curve, start, end) order.
pub fn enumerate_candidates<T: Scalar>(
    index: &ExtremalCoordinateIndex<T>,
    curves: &[PolygonalCurve<T>],
    l: usize,
    rule: CandidateRule,
) -> Vec<Candidate<T>> {
    let mut out = Vec::new();
    if l == 0 {
        return out;
    }
    for (ci, curve) in curves.iter().enumerate() {
        let e = index.coords(ci);
        for p in 0..e.len() {
            let mut q = p + 1;
            let mut enclosed = 0usize;
            while q < e.len() {
                let sub = Subcurve {
                    curve_id: ci,
                    start: e[p],
                    end: e[q],
                };
                let complexity = sub.complexity();
                if complexity > l {
                    break;
                }
                if curve.arc_position(e[q]) > curve.arc_position(e[p]) {
                    out.push(Candidate {
                        id: out.len(),
                        subcurve: sub,
                        complexity,
                    });
                }
                enclosed = match rule {
                    CandidateRule::AllPairs => enclosed + 1,
                    CandidateRule::PowerOfTwo if enclosed == 0 => 1,
                    CandidateRule::PowerOfTwo => enclosed * 2,
                };
                q = p + enclosed + 1;
            }
        }
    }
    out
}

/// Writes `id,curve,start_edge,start_t,end_edge,end_t,complexity` rows.
pub fn write_candidate_table<T: Scalar, W: Write>(w: W, candidates: &[Candidate<T>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "id",
        "curve",
        "start_edge",
        "start_t",
        "end_edge",
        "end_t",
        "complexity",
    ])?;
    for c in candidates {
        let s = &c.subcurve;
        out.write_record([
            c.id.to_string(),
            s.curve_id.to_string(),
            s.start.edge().to_string(),
            s.start.t().to_string(),
            s.end.edge().to_string(),
            s.end.t().to_string(),
            c.complexity.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests;
