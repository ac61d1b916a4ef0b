//! Scene fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use collimetric_core::collision::{EvalConfig, GripperSpec, Label};
use collimetric_core::synth::{add_box, add_ghost_blob, plane_scene};
use collimetric_core::{build_frame, Point3, PointCloud};

/// Scenes are z-up, so looking down means moving toward -Z.
pub const TOP_DOWN: Point3 = Point3 {
    x: 0.0,
    y: 0.0,
    z: -1.0,
};

/// Direction tilted `tilt_deg` away from straight down, toward azimuth `az_deg`.
pub fn tilted_down(tilt_deg: f64, az_deg: f64) -> Point3 {
    let (t, a) = (tilt_deg.to_radians(), az_deg.to_radians());
    Point3::new(t.sin() * a.cos(), t.sin() * a.sin(), -t.cos())
}

/// The 1/4/7 direction sets, mirrored to look down on z-up scenes.
pub fn down_preset(count: usize) -> Vec<Point3> {
    let mut d = vec![TOP_DOWN];
    if count >= 4 {
        d.extend([0.0, 120.0, 240.0].map(|az| tilted_down(30.0, az)));
    }
    if count >= 7 {
        d.extend([60.0, 180.0, 300.0].map(|az| tilted_down(45.0, az)));
    }
    d
}

/// Defaults: T_Z 10, gripper 10x10x10, step 5, N_GT 15, N_Q 5.
pub fn config(directions: Vec<Point3>) -> EvalConfig {
    EvalConfig {
        t_z: 10.0,
        gripper: GripperSpec {
            length: 10.0,
            width: 10.0,
            height: 10.0,
        },
        g_step: 5.0,
        n_gt: 15,
        n_q: 5,
        directions,
    }
}

pub fn plane() -> PointCloud {
    plane_scene((400.0, 400.0), 1.0).unwrap()
}

/// Ground truth with a 50 mm cube standing on the plane.
pub fn box_scene() -> PointCloud {
    add_box(&plane(), Point3::new(0.0, 0.0, 25.0), (50.0, 50.0, 50.0), 1.0).unwrap()
}

/// Plane plus a floating 20 mm blob of 2000 random points.
pub fn ghost_scene() -> PointCloud {
    add_ghost_blob(&plane(), Point3::new(0.0, 0.0, 100.0), 20.0, 2000, 11).unwrap()
}

/// Outcome of one simulated descent: first collision depth, if any.
pub type Hit = Option<f64>;

/// Path grid and per-path outcomes computed by brute force.
pub struct OracleGrid {
    pub cols: usize,
    pub rows: usize,
    pub gt: Vec<Hit>,
    pub query: Vec<Hit>,
}

fn project(cloud: &PointCloud, d: Point3) -> Vec<[f64; 3]> {
    let f = build_frame(d).unwrap();
    cloud
        .points()
        .iter()
        .map(|p| {
            [
                p.x * f.u.x + p.y * f.u.y + p.z * f.u.z,
                p.x * f.v.x + p.y * f.v.y + p.z * f.v.z,
                p.x * f.d.x + p.y * f.d.y + p.z * f.d.z,
            ]
        })
        .collect()
}

/// First leading-face depth at which more than `threshold` depths lie in
/// `[t - height, t]`, testing every depth as a candidate.
pub fn first_collision(depths: &[f64], height: f64, threshold: usize) -> Hit {
    let mut candidates = depths.to_vec();
    candidates.sort_by(f64::total_cmp);
    candidates
        .into_iter()
        .find(|&t| depths.iter().filter(|&&d| d >= t - height && d <= t).count() > threshold)
}

fn outcomes(
    pts: &[[f64; 3]],
    origin: (f64, f64),
    cols: usize,
    rows: usize,
    cfg: &EvalConfig,
    threshold: usize,
) -> Vec<Hit> {
    let (hl, hm) = (cfg.gripper.length / 2.0, cfg.gripper.width / 2.0);
    let mut out = vec![None; cols * rows];
    for i in 0..cols {
        let ca = origin.0 + i as f64 * cfg.g_step;
        let strip: Vec<[f64; 3]> = pts.iter().filter(|p| (p[0] - ca).abs() <= hl).copied().collect();
        for j in 0..rows {
            let cb = origin.1 + j as f64 * cfg.g_step;
            let depths: Vec<f64> = strip.iter().filter(|p| (p[1] - cb).abs() <= hm).map(|p| p[2]).collect();
            out[j * cols + i] = first_collision(&depths, cfg.gripper.height, threshold);
        }
    }
    out
}

/// Simulates every path of direction `d` by linear scans over both clouds.
pub fn oracle_grid(gt: &PointCloud, query: &PointCloud, cfg: &EvalConfig, d: Point3) -> OracleGrid {
    let (pg, pq) = (project(gt, d), project(query, d));
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pg.iter().chain(&pq) {
        lo = (lo.0.min(p[0]), lo.1.min(p[1]));
        hi = (hi.0.max(p[0]), hi.1.max(p[1]));
    }
    let cols = ((hi.0 - lo.0) / cfg.g_step).floor() as usize + 1;
    let rows = ((hi.1 - lo.1) / cfg.g_step).floor() as usize + 1;
    OracleGrid {
        cols,
        rows,
        gt: outcomes(&pg, lo, cols, rows, cfg, cfg.n_gt),
        query: outcomes(&pq, lo, cols, rows, cfg, cfg.n_q),
    }
}

impl OracleGrid {
    /// Label of every path `(i, j)` at tolerance `t_z`, row-major.
    pub fn labels(&self, t_z: f64) -> Vec<((usize, usize), Label)> {
        let gap = |g: Hit, q: Hit| match (g, q) {
            (Some(g), Some(q)) => (g - q).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        };
        let mut out = Vec::with_capacity(self.gt.len());
        for j in 0..self.rows {
            for i in 0..self.cols {
                let g = self.gt[j * self.cols + i];
                // center, +i, -i, +j, -j; the first minimum wins.
                let offsets = [(0i64, 0i64), (1, 0), (-1, 0), (0, 1), (0, -1)];
                let mut best: Option<(f64, Hit)> = None;
                for (di, dj) in offsets {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= self.cols as i64 || nj >= self.rows as i64 {
                        continue;
                    }
                    let q = self.query[nj as usize * self.cols + ni as usize];
                    let dz = gap(g, q);
                    if best.is_none_or(|(b, _)| dz < b) {
                        best = Some((dz, q));
                    }
                }
                let (dz, q) = best.expect("center is always in the grid");
                let label = if dz <= t_z {
                    Label::Aligned
                } else {
                    match (g, q) {
                        (None, Some(_)) => Label::Fpc,
                        (Some(g), Some(q)) if q < g - t_z => Label::Fpc,
                        _ => Label::Fnc,
                    }
                };
                out.push(((i, j), label));
            }
        }
        out
    }
}

/// `(i, j)` of every path carrying `label`, sorted.
pub fn path_set(labels: impl IntoIterator<Item = ((usize, usize), Label)>, label: Label) -> Vec<(usize, usize)> {
    let mut v: Vec<_> = labels
        .into_iter()
        .filter(|(_, l)| *l == label)
        .map(|(ij, _)| ij)
        .collect();
    v.sort();
    v
}

/// Stepping simulation over integer hundredths of a millimeter: the leading
/// face advances 0.01 mm at a time and points inside the gripper are counted
/// with two pointers. `depths` must be ascending.
pub fn stepping_hundredths(depths: &[i64], height: i64, threshold: usize) -> Option<i64> {
    let (first, last) = (*depths.first()?, *depths.last()?);
    let (mut lo, mut hi) = (0usize, 0usize);
    for t in first..=last {
        while hi < depths.len() && depths[hi] <= t {
            hi += 1;
        }
        while lo < hi && depths[lo] < t - height {
            lo += 1;
        }
        if hi - lo > threshold {
            return Some(t);
        }
    }
    None
}

pub fn brute_nn_sq(from: &[Point3], to: &[Point3]) -> Vec<f64> {
    from.iter()
        .map(|p| {
            to.iter()
                .map(|q| {
                    let (dx, dy, dz) = (p.x - q.x, p.y - q.y, p.z - q.z);
                    dx * dx + dy * dy + dz * dz
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Chamfer, two-sided summed Hausdorff, precision, recall and F-score of
/// `query` against `gt`.
pub fn brute_baseline(query: &PointCloud, gt: &PointCloud, d: f64) -> [f64; 5] {
    let fwd = brute_nn_sq(query.points(), gt.points());
    let bwd = brute_nn_sq(gt.points(), query.points());
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max).sqrt();
    let within = |v: &[f64]| v.iter().filter(|s| s.sqrt() < d).count() as f64 / v.len() as f64;
    let (p, r) = (within(&fwd), within(&bwd));
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    [mean(&fwd) + mean(&bwd), max(&fwd) + max(&bwd), p, r, f]
}

/// Minimum summed distance over all bijections, by enumerating permutations.
pub fn brute_emd(a: &[Point3], b: &[Point3]) -> f64 {
    fn go(a: &[Point3], b: &[Point3], used: &mut Vec<bool>, k: usize, acc: f64, best: &mut f64) {
        if k == a.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(a, b, used, k + 1, acc + a[k].distance(b[j]), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(a, b, &mut vec![false; b.len()], 0, 0.0, &mut best);
    best
}
