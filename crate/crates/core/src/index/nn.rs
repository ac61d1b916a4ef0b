//! Exact nearest-neighbor queries over a static cloud (kd-tree).

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u8,
        value: f64,
        left: u32,
        right: u32,
    },
}

/// Immutable kd-tree. Query results equal a linear scan bit-for-bit: the
/// same squared-distance expression is evaluated and pruning only skips
/// subtrees that cannot hold a strictly closer point.
#[derive(Debug, Clone)]
pub struct NnIndex {
    points: Vec<Point3>,
    nodes: Vec<Node>,
}

impl NnIndex {
    pub fn new(cloud: &PointCloud) -> Result<Self> {
        Self::from_points(cloud.points())
    }

    pub fn from_points(points: &[Point3]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let mut index = NnIndex {
            points: points.to_vec(),
            nodes: Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1),
        };
        index.build(0, points.len());
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                start: start as u32,
                end: end as u32,
            });
            return id;
        }
        let slice = &mut self.points[start..end];
        let axis = widest_axis(slice);
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |a, b| a.coord(axis).total_cmp(&b.coord(axis)));
        let value = slice[mid].coord(axis);
        // Placeholder; children are filled in once built.
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, start + mid);
        let right = self.build(start + mid, end);
        self.nodes[id as usize] = Node::Split {
            axis: axis as u8,
            value,
            left,
            right,
        };
        id
    }

    /// Squared distance from `q` to the closest indexed point.
    pub fn nearest_distance_sq(&self, q: Point3) -> f64 {
        let mut best = f64::INFINITY;
        self.search(0, q, &mut best);
        best
    }

    pub fn nearest_distance(&self, q: Point3) -> f64 {
        self.nearest_distance_sq(q).sqrt()
    }

    fn search(&self, node: u32, q: Point3, best: &mut f64) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for p in &self.points[start as usize..end as usize] {
                    let d = q.distance_sq(*p);
                    if d < *best {
                        *best = d;
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                // Left holds coordinates <= value, right holds >= value.
                let diff = q.coord(axis as usize) - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= *best {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn widest_axis(points: &[Point3]) -> usize {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for axis in 0..3 {
            lo[axis] = lo[axis].min(p.coord(axis));
            hi[axis] = hi[axis].max(p.coord(axis));
        }
    }
    (0..3)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0)
}

pub fn build_nn_index(cloud: &PointCloud) -> Result<NnIndex> {
    NnIndex::new(cloud)
}

pub fn nearest_distance(index: &NnIndex, q: Point3) -> f64 {
    index.nearest_distance(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_scan(points: &[Point3], q: Point3) -> f64 {
        points
            .iter()
            .map(|p| {
                let dx = q.x - p.x;
                let dy = q.y - p.y;
                let dz = q.z - p.z;
                dx * dx + dy * dy + dz * dz
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn single_point() {
        let idx = build_nn_index(&PointCloud::from_points(vec![Point3::ZERO])).unwrap();
        assert_eq!(nearest_distance(&idx, Point3::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(nearest_distance(&idx, Point3::ZERO), 0.0);
    }

    #[test]
    fn two_points() {
        let idx = build_nn_index(&PointCloud::from_points(vec![
            Point3::ZERO,
            Point3::new(10.0, 0.0, 0.0),
        ]))
        .unwrap();
        assert_eq!(nearest_distance(&idx, Point3::new(6.0, 0.0, 0.0)), 4.0);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(build_nn_index(&PointCloud::new()), Err(Error::EmptyCloud)));
    }

    #[test]
    fn matches_linear_scan_on_large_cloud() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let points: Vec<Point3> = (0..100_000)
            .map(|_| {
                Point3::new(
                    rng.random_range(-500.0..500.0),
                    rng.random_range(-500.0..500.0),
                    rng.random_range(-50.0..50.0),
                )
            })
            .collect();
        let idx = NnIndex::from_points(&points).unwrap();
        for _ in 0..1000 {
            let q = Point3::new(
                rng.random_range(-600.0..600.0),
                rng.random_range(-600.0..600.0),
                rng.random_range(-100.0..100.0),
            );
            assert_eq!(idx.nearest_distance_sq(q), linear_scan(&points, q));
        }
    }

    #[test]
    fn lattice_with_duplicates_matches_linear_scan() {
        let mut points = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                points.push(Point3::new(i as f64, j as f64, 0.0));
                points.push(Point3::new(i as f64, j as f64, 0.0));
            }
        }
        let idx = NnIndex::from_points(&points).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let q = Point3::new(
                rng.random_range(-5..25) as f64 * 0.5,
                rng.random_range(-5..25) as f64 * 0.5,
                rng.random_range(-2..2) as f64,
            );
            assert_eq!(idx.nearest_distance_sq(q), linear_scan(&points, q));
        }
    }
}
