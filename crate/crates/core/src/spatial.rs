//! Uniform-grid index over segment bounding boxes.
//!
//! Buckets are keyed by the first (at most two) coordinates; queries then
//! filter on the full `d`-dimensional boxes. Results are conservative: every
//! segment within distance `r` of the query is returned, plus possibly some
//! farther ones.

use std::collections::HashMap;

use crate::scalar::Scalar;

const MAX_BUCKETS_PER_ITEM: i64 = 4096;

#[derive(Debug)]
pub(crate) struct SegmentIndex<T> {
    dim: usize,
    grid_dims: usize,
    cell: T,
    mins: Vec<T>,
    maxs: Vec<T>,
    buckets: HashMap<[i64; 2], Vec<u32>>,
    oversized: Vec<u32>,
}

impl<T: Scalar> SegmentIndex<T> {
    /// `segments` yields `(a, b)` endpoint pairs; item ids are their positions.
    pub fn build<'a, I>(dim: usize, segments: I, min_cell: T) -> Self
    where
        I: IntoIterator<Item = (&'a [T], &'a [T])>,
    {
        let grid_dims = dim.min(2);
        let mut mins = Vec::new();
        let mut maxs = Vec::new();
        for (a, b) in segments {
            for k in 0..dim {
                mins.push(a[k].min(b[k]));
                maxs.push(a[k].max(b[k]));
            }
        }
        let count = mins.len() / dim.max(1);
        // cell edge: at least the query radius and the mean segment extent
        let mut extent = T::zero();
        for id in 0..count {
            for k in 0..grid_dims {
                extent += maxs[id * dim + k] - mins[id * dim + k];
            }
        }
        let mean = if count > 0 {
            extent / T::lit((count * grid_dims.max(1)) as f64)
        } else {
            T::one()
        };
        let mut cell = mean.max(min_cell);
        if !(cell > T::zero()) || !cell.is_finite() {
            cell = T::one();
        }
        let mut index = Self {
            dim,
            grid_dims,
            cell,
            mins,
            maxs,
            buckets: HashMap::new(),
            oversized: Vec::new(),
        };
        for id in 0..count {
            let (lo, hi) = index.key_range(
                &index.mins[id * dim..(id + 1) * dim],
                &index.maxs[id * dim..(id + 1) * dim],
                T::zero(),
            );
            let span = (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1);
            if span > MAX_BUCKETS_PER_ITEM {
                index.oversized.push(id as u32);
                continue;
            }
            for x in lo[0]..=hi[0] {
                for y in lo[1]..=hi[1] {
                    index.buckets.entry([x, y]).or_default().push(id as u32);
                }
            }
        }
        index
    }

    fn key(&self, v: T) -> i64 {
        (v / self.cell).floor().as_f64() as i64
    }

    fn key_range(&self, min: &[T], max: &[T], r: T) -> ([i64; 2], [i64; 2]) {
        let mut lo = [0i64; 2];
        let mut hi = [0i64; 2];
        for k in 0..self.grid_dims {
            lo[k] = self.key(min[k] - r);
            hi[k] = self.key(max[k] + r);
        }
        (lo, hi)
    }

    /// Ids of segments whose box lies within `r` of the box `[min, max]`,
    /// sorted ascending.
    pub fn query_box(&self, min: &[T], max: &[T], r: T, out: &mut Vec<u32>) {
        out.clear();
        let (lo, hi) = self.key_range(min, max, r);
        let span = (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1);
        if span > self.buckets.len() as i64 {
            for ids in self.buckets.values() {
                out.extend_from_slice(ids);
            }
        } else {
            for x in lo[0]..=hi[0] {
                for y in lo[1]..=hi[1] {
                    if let Some(ids) = self.buckets.get(&[x, y]) {
                        out.extend_from_slice(ids);
                    }
                }
            }
        }
        out.extend_from_slice(&self.oversized);
        out.sort_unstable();
        out.dedup();
        let d = self.dim;
        out.retain(|&id| {
            let id = id as usize;
            (0..d).all(|k| self.mins[id * d + k] - r <= max[k] && self.maxs[id * d + k] + r >= min[k])
        });
    }

    pub fn query_segment(&self, a: &[T], b: &[T], r: T, out: &mut Vec<u32>) {
        let min: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect();
        let max: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x.max(y)).collect();
        self.query_box(&min, &max, r, out);
    }

    pub fn query_point(&self, c: &[T], r: T, out: &mut Vec<u32>) {
        self.query_box(c, c, r, out);
    }
}
