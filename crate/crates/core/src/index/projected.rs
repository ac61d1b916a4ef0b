//! Points projected onto the plane perpendicular to a descent direction,
//! binned on a uniform 2D grid for footprint queries.

use crate::error::{Error, Result};
use crate::geometry::{DirectionFrame, PointCloud};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projected {
    pub a: f64,
    pub b: f64,
    pub t: f64,
}

/// Bins are keyed by `(row, col)` and stored row-major in sorted order, so
/// a rectangle query is one binary search per bin row. Memory stays linear
/// in the point count however far apart outliers lie.
#[derive(Debug, Clone)]
pub struct ProjectedIndex {
    frame: DirectionFrame,
    cell_size: f64,
    /// Points sorted by bin key.
    entries: Vec<Projected>,
    keys: Vec<(i64, i64)>,
    /// `offsets[k]..offsets[k + 1]` are the entries of bin `keys[k]`.
    offsets: Vec<usize>,
}

impl ProjectedIndex {
    pub fn new(cloud: &PointCloud, frame: DirectionFrame, cell_size: f64) -> Result<Self> {
        Error::positive("cell size", cell_size)?;
        let mut keyed: Vec<((i64, i64), Projected)> = cloud
            .points()
            .iter()
            .map(|p| {
                let (a, b, t) = frame.project(*p);
                let key = (bin(b, cell_size), bin(a, cell_size));
                (key, Projected { a, b, t })
            })
            .collect();
        // Stable so points inside a bin keep cloud order.
        keyed.sort_by_key(|(k, _)| *k);
        let mut keys = Vec::new();
        let mut offsets = Vec::new();
        for (i, (k, _)) in keyed.iter().enumerate() {
            if keys.last() != Some(k) {
                keys.push(*k);
                offsets.push(i);
            }
        }
        offsets.push(keyed.len());
        Ok(ProjectedIndex {
            frame,
            cell_size,
            entries: keyed.into_iter().map(|(_, e)| e).collect(),
            keys,
            offsets,
        })
    }

    pub fn frame(&self) -> &DirectionFrame {
        &self.frame
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bin_count(&self) -> usize {
        self.keys.len()
    }

    pub fn entries(&self) -> &[Projected] {
        &self.entries
    }

    /// Calls `f` for every point with `|a - ca| <= ha` and `|b - cb| <= hb`.
    pub fn for_each_in_rect(&self, center: (f64, f64), half: (f64, f64), mut f: impl FnMut(&Projected)) {
        let (ca, cb) = center;
        let (ha, hb) = half;
        let (a0, a1) = (ca - ha, ca + ha);
        let (b0, b1) = (cb - hb, cb + hb);
        let (col0, col1) = (bin(a0, self.cell_size), bin(a1, self.cell_size));
        let (Some(first), Some(last)) = (self.keys.first(), self.keys.last()) else {
            return;
        };
        // Only rows that hold points; a huge rectangle must not walk empty rows.
        let row0 = bin(b0, self.cell_size).max(first.0);
        let row1 = bin(b1, self.cell_size).min(last.0);
        if row0 > row1 {
            return;
        }
        let mut visit = |k: usize| {
            for e in &self.entries[self.offsets[k]..self.offsets[k + 1]] {
                if (e.a - ca).abs() <= ha && (e.b - cb).abs() <= hb {
                    f(e);
                }
            }
        };
        if (row1 - row0) as u64 >= self.keys.len() as u64 {
            let lo = self.keys.partition_point(|k| k.0 < row0);
            let hi = self.keys.partition_point(|k| k.0 <= row1);
            for k in lo..hi {
                if (col0..=col1).contains(&self.keys[k].1) {
                    visit(k);
                }
            }
            return;
        }
        for row in row0..=row1 {
            let lo = self.keys.partition_point(|k| *k < (row, col0));
            let hi = self.keys.partition_point(|k| *k <= (row, col1));
            for k in lo..hi {
                visit(k);
            }
        }
    }

    /// Depths of the points inside the closed footprint, ascending.
    pub fn footprint_depths(&self, center: (f64, f64), half_extents: (f64, f64)) -> Vec<f64> {
        let mut depths = Vec::new();
        self.footprint_depths_into(center, half_extents, &mut depths);
        depths
    }

    pub(crate) fn footprint_depths_into(&self, center: (f64, f64), half: (f64, f64), out: &mut Vec<f64>) {
        out.clear();
        self.for_each_in_rect(center, half, |e| out.push(e.t));
        out.sort_unstable_by(f64::total_cmp);
    }
}

fn bin(x: f64, cell: f64) -> i64 {
    (x / cell).floor() as i64
}

pub fn build_projected_index(cloud: &PointCloud, frame: DirectionFrame, cell_size: f64) -> Result<ProjectedIndex> {
    ProjectedIndex::new(cloud, frame, cell_size)
}

pub fn footprint_depths(index: &ProjectedIndex, center: (f64, f64), half_extents: (f64, f64)) -> Vec<f64> {
    index.footprint_depths(center, half_extents)
}
