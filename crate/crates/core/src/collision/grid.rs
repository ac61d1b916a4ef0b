use rayon::prelude::*;

use super::descent::{descend, PathOutcome};
use super::GripperSpec;
use crate::error::{Error, Result};
use crate::geometry::{DirectionFrame, Point3, PointCloud};
use crate::index::ProjectedIndex;

/// Upper bound on paths per direction; a stray far-away point with a small
/// step would otherwise allocate without limit.
pub const MAX_PATHS: usize = 50_000_000;

/// Lattice of descent paths in the plane perpendicular to the direction.
/// Path `(i, j)` is centered at `(origin.0 + i * step, origin.1 + j * step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub frame: DirectionFrame,
    pub origin: (f64, f64),
    pub step: f64,
    pub cols: usize,
    pub rows: usize,
}

impl PathGrid {
    /// Grid covering the rectangle `[min, max]` in plane coordinates.
    pub fn covering(frame: DirectionFrame, min: (f64, f64), max: (f64, f64), step: f64) -> Result<Self> {
        Error::positive("grid step", step)?;
        let cols = ((max.0 - min.0) / step).floor() as usize + 1;
        let rows = ((max.1 - min.1) / step).floor() as usize + 1;
        if cols.saturating_mul(rows) > MAX_PATHS {
            return Err(Error::InvalidParameter {
                name: "grid step",
                message: format!("{cols}x{rows} paths exceeds the limit of {MAX_PATHS}"),
            });
        }
        Ok(PathGrid {
            frame,
            origin: min,
            step,
            cols,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + i as f64 * self.step,
            self.origin.1 + j as f64 * self.step,
        )
    }

    /// Row-major position of path `(i, j)`.
    pub fn flat(&self, i: usize, j: usize) -> usize {
        j * self.cols + i
    }

    pub fn coords(&self, flat: usize) -> (usize, usize) {
        (flat % self.cols, flat / self.cols)
    }

    pub fn world_point(&self, i: usize, j: usize, depth: f64) -> Point3 {
        let (a, b) = self.center(i, j);
        self.frame.lift(a, b, depth)
    }
}

fn plane_bounds<'a>(coords: impl Iterator<Item = (f64, f64)> + 'a) -> Option<((f64, f64), (f64, f64))> {
    coords.fold(None, |acc, (a, b)| match acc {
        None => Some(((a, b), (a, b))),
        Some((lo, hi)) => Some(((lo.0.min(a), lo.1.min(b)), (hi.0.max(a), hi.1.max(b)))),
    })
}

/// Grid over the projected bounding rectangle of both clouds, origin at its
/// minimum corner.
pub fn build_path_grid(gt: &PointCloud, query: &PointCloud, frame: DirectionFrame, g_step: f64) -> Result<PathGrid> {
    if gt.is_empty() || query.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let coords = gt.points().iter().chain(query.points()).map(|p| {
        let (a, b, _) = frame.project(*p);
        (a, b)
    });
    let (min, max) = plane_bounds(coords).ok_or(Error::EmptyCloud)?;
    PathGrid::covering(frame, min, max, g_step)
}

pub(crate) fn grid_for_indices(a: &ProjectedIndex, b: &ProjectedIndex, g_step: f64) -> Result<PathGrid> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let coords = a.entries().iter().chain(b.entries()).map(|e| (e.a, e.b));
    let (min, max) = plane_bounds(coords).ok_or(Error::EmptyCloud)?;
    PathGrid::covering(*a.frame(), min, max, g_step)
}

/// Collision outcome of every path, row-major (see [`PathGrid::flat`]).
pub fn path_outcomes(
    index: &ProjectedIndex,
    grid: &PathGrid,
    gripper: &GripperSpec,
    threshold: usize,
) -> Result<Vec<PathOutcome>> {
    if *index.frame() != grid.frame {
        return Err(Error::FrameMismatch);
    }
    let half = (gripper.length / 2.0, gripper.width / 2.0);
    Ok((0..grid.len())
        .into_par_iter()
        .map_init(Vec::new, |depths, flat| {
            let (i, j) = grid.coords(flat);
            index.footprint_depths_into(grid.center(i, j), half, depths);
            descend(depths, gripper.height, threshold)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_frame;

    fn plane(half: i32) -> PointCloud {
        let mut pts = Vec::new();
        for j in -half..=half {
            for i in -half..=half {
                pts.push(Point3::new(i as f64, j as f64, 0.0));
            }
        }
        PointCloud::from_points(pts)
    }

    #[test]
    fn grid_counts() {
        let f = build_frame(Point3::Z).unwrap();
        let gt = PointCloud::from_points(vec![Point3::new(-50.0, -50.0, 0.0)]);
        let q = PointCloud::from_points(vec![Point3::new(50.0, 50.0, 3.0)]);
        let g = build_path_grid(&gt, &q, f, 5.0).unwrap();
        assert_eq!((g.cols, g.rows, g.len()), (21, 21, 441));
        assert_eq!(g.origin, (-50.0, -50.0));

        let one = PointCloud::from_points(vec![Point3::new(2.0, 3.0, 4.0)]);
        let g = build_path_grid(&one, &one, f, 5.0).unwrap();
        assert_eq!((g.cols, g.rows), (1, 1));
        assert_eq!(g.center(0, 0), (2.0, 3.0));

        let g = build_path_grid(&gt, &q, f, 500.0).unwrap();
        assert_eq!((g.cols, g.rows), (1, 1));

        assert!(matches!(
            build_path_grid(&gt, &PointCloud::new(), f, 5.0),
            Err(Error::EmptyCloud)
        ));
    }

    #[test]
    fn oversized_grid_rejected() {
        let f = build_frame(Point3::Z).unwrap();
        let a = PointCloud::from_points(vec![Point3::ZERO]);
        let b = PointCloud::from_points(vec![Point3::new(1e6, 1e6, 0.0)]);
        assert!(matches!(
            build_path_grid(&a, &b, f, 0.1),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn empty_index_all_miss() {
        let f = build_frame(Point3::Z).unwrap();
        let idx = ProjectedIndex::new(&PointCloud::new(), f, 10.0).unwrap();
        let grid = PathGrid::covering(f, (0.0, 0.0), (20.0, 20.0), 5.0).unwrap();
        let out = path_outcomes(&idx, &grid, &GripperSpec::default(), 0).unwrap();
        assert_eq!(out.len(), 25);
        assert!(out.iter().all(|o| !o.collides()));
    }

    #[test]
    fn plane_collides_everywhere_at_zero() {
        let f = build_frame(Point3::Z).unwrap();
        let cloud = plane(50);
        let idx = ProjectedIndex::new(&cloud, f, 10.0).unwrap();
        let grid = build_path_grid(&cloud, &cloud, f, 5.0).unwrap();
        let out = path_outcomes(&idx, &grid, &GripperSpec::default(), 5).unwrap();
        assert!(out.iter().all(|o| *o == PathOutcome::hit(0.0)));
    }

    #[test]
    fn removed_patch_misses_only_there() {
        let f = build_frame(Point3::Z).unwrap();
        let full = plane(50);
        // Clear the closed footprint of the path centered at the origin.
        let holed = full.retain_indexed(|_, p| !(p.x.abs() <= 5.0 && p.y.abs() <= 5.0));
        let idx = ProjectedIndex::new(&holed, f, 10.0).unwrap();
        let grid = build_path_grid(&full, &full, f, 5.0).unwrap();
        let out = path_outcomes(&idx, &grid, &GripperSpec::default(), 5).unwrap();
        let center = grid.flat(10, 10);
        assert_eq!(grid.center(10, 10), (0.0, 0.0));
        assert_eq!(out[center], PathOutcome::MISS);
        for (k, o) in out.iter().enumerate() {
            if k != center {
                assert_eq!(*o, PathOutcome::hit(0.0), "path {:?}", grid.coords(k));
            }
        }
    }

    #[test]
    fn frame_mismatch() {
        let f = build_frame(Point3::Z).unwrap();
        let g = build_frame(Point3::X).unwrap();
        let idx = ProjectedIndex::new(&plane(2), f, 10.0).unwrap();
        let grid = PathGrid::covering(g, (0.0, 0.0), (1.0, 1.0), 1.0).unwrap();
        assert!(matches!(
            path_outcomes(&idx, &grid, &GripperSpec::default(), 0),
            Err(Error::FrameMismatch)
        ));
    }
}
