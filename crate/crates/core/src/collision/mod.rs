//! Collision-avoidance metric.
//!
//! A cuboid gripper is translated along each configured direction from every
//! node of a path grid laid out in the plane perpendicular to the direction.
//! Descents are simulated independently against the ground truth and the
//! query cloud, each path is labeled by comparing the collision depths, and
//! the labels are pooled into false-positive and false-negative collision
//! rates and the collision F-score.
//!
//! Depth is measured as `p · d`: the gripper comes from `-∞` along `d`, so
//! the first point it meets is the one with the smallest depth.

mod descent;
mod grid;
mod labeling;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use descent::{descend, PathOutcome};
pub use grid::{build_path_grid, path_outcomes, PathGrid, MAX_PATHS};
pub use labeling::{depth_gap, label_path, Label, LabelDecision, Neighbor};

use crate::error::{Error, Result};
use crate::geometry::{DirectionFrame, Point3, PointCloud};
use crate::index::ProjectedIndex;

/// Cuboid gripper: `length` x `width` cross-section perpendicular to the
/// motion (along the frame's `u` and `v`), `height` along it. Millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperSpec {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl Default for GripperSpec {
    fn default() -> Self {
        GripperSpec {
            length: 10.0,
            width: 10.0,
            height: 10.0,
        }
    }
}

impl GripperSpec {
    pub fn validate(&self) -> Result<()> {
        Error::positive("gripper length", self.length)?;
        Error::positive("gripper width", self.width)?;
        Error::positive("gripper height", self.height)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Depth tolerance along the direction, mm.
    pub t_z: f64,
    pub gripper: GripperSpec,
    /// Path grid spacing, mm. Neighbor matching makes it the lateral tolerance too.
    pub g_step: f64,
    /// A ground-truth collision needs more than `n_gt` points in the gripper.
    pub n_gt: usize,
    /// A query collision needs more than `n_q` points in the gripper.
    pub n_q: usize,
    pub directions: Vec<Point3>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            t_z: 10.0,
            gripper: GripperSpec::default(),
            g_step: 5.0,
            n_gt: 15,
            n_q: 5,
            directions: vec![Point3::Z],
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.t_z.is_finite() || self.t_z < 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_z",
                message: format!("must be a finite value >= 0, got {}", self.t_z),
            });
        }
        self.gripper.validate()?;
        Error::positive("grid step", self.g_step)?;
        if self.directions.is_empty() {
            return Err(Error::InvalidParameter {
                name: "directions",
                message: "at least one direction is required".into(),
            });
        }
        for d in &self.directions {
            DirectionFrame::new(*d)?;
        }
        Ok(())
    }

    /// Side of the projected-index bins: one footprint touches at most 4 bins.
    fn cell_size(&self) -> f64 {
        self.gripper.length.max(self.gripper.width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub i: usize,
    pub j: usize,
    pub direction_index: usize,
    pub gt_outcome: PathOutcome,
    pub query_outcome_used: PathOutcome,
    pub matched_neighbor: Neighbor,
    pub label: Label,
    /// Grid center lifted to the labeled collision depth; `None` when
    /// neither cloud collides.
    pub world_point: Option<Point3>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelCounts {
    pub n_total: usize,
    pub n_fpc: usize,
    pub n_fnc: usize,
    pub n_aligned: usize,
}

impl LabelCounts {
    pub fn add(&mut self, label: Label) {
        self.n_total += 1;
        match label {
            Label::Aligned => self.n_aligned += 1,
            Label::Fpc => self.n_fpc += 1,
            Label::Fnc => self.n_fnc += 1,
        }
    }

    pub fn merge(&mut self, other: LabelCounts) {
        self.n_total += other.n_total;
        self.n_fpc += other.n_fpc;
        self.n_fnc += other.n_fnc;
        self.n_aligned += other.n_aligned;
    }

    pub fn from_labels(labels: impl IntoIterator<Item = Label>) -> Self {
        let mut c = LabelCounts::default();
        labels.into_iter().for_each(|l| c.add(l));
        c
    }

    pub fn r_fpc(&self) -> f64 {
        self.n_fpc as f64 / self.n_total as f64
    }

    pub fn r_fnc(&self) -> f64 {
        self.n_fnc as f64 / self.n_total as f64
    }

    pub fn fc(&self) -> f64 {
        collision_fscore(self.r_fnc(), self.r_fpc()).expect("rates are fractions")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionReport {
    pub direction_index: usize,
    /// Unit direction.
    pub direction: Point3,
    pub cols: usize,
    pub rows: usize,
    pub counts: LabelCounts,
    pub r_fpc: f64,
    pub r_fnc: f64,
    pub fc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub config: EvalConfig,
    pub counts: LabelCounts,
    pub r_fpc: f64,
    pub r_fnc: f64,
    pub fc: f64,
    pub directions: Vec<DirectionReport>,
}

impl CollisionReport {
    fn pool(config: EvalConfig, directions: Vec<DirectionReport>) -> Self {
        let mut counts = LabelCounts::default();
        for d in &directions {
            counts.merge(d.counts);
        }
        CollisionReport {
            config,
            r_fpc: counts.r_fpc(),
            r_fnc: counts.r_fnc(),
            fc: counts.fc(),
            counts,
            directions,
        }
    }
}

/// `1 - 2(1 - r_fnc)(1 - r_fpc) / (2 - r_fnc - r_fpc)`, with the limit value
/// 1 when both rates are 1. Lower is better.
pub fn collision_fscore(r_fnc: f64, r_fpc: f64) -> Result<f64> {
    for (name, r) in [("r_fnc", r_fnc), ("r_fpc", r_fpc)] {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter {
                name,
                message: format!("rate must lie in [0, 1], got {r}"),
            });
        }
    }
    let denom = 2.0 - r_fnc - r_fpc;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - 2.0 * (1.0 - r_fnc) * (1.0 - r_fpc) / denom)
}

/// Collision outcomes of every path for one direction. Outcomes do not
/// depend on `t_z`, so a tolerance sweep labels the same outcomes repeatedly.
#[derive(Debug, Clone)]
pub struct DirectionOutcomes {
    pub direction_index: usize,
    pub grid: PathGrid,
    pub gt: Vec<PathOutcome>,
    pub query: Vec<PathOutcome>,
}

impl DirectionOutcomes {
    pub fn compute(
        gt: &PointCloud,
        query: &PointCloud,
        config: &EvalConfig,
        direction_index: usize,
        direction: Point3,
    ) -> Result<Self> {
        config.validate()?;
        if gt.is_empty() || query.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let frame = DirectionFrame::new(direction)?;
        let cell = config.cell_size();
        let (gt_index, query_index) = rayon::join(
            || ProjectedIndex::new(gt, frame, cell),
            || ProjectedIndex::new(query, frame, cell),
        );
        let (gt_index, query_index) = (gt_index?, query_index?);
        let grid = grid::grid_for_indices(&gt_index, &query_index, config.g_step)?;
        Ok(DirectionOutcomes {
            direction_index,
            gt: path_outcomes(&gt_index, &grid, &config.gripper, config.n_gt)?,
            query: path_outcomes(&query_index, &grid, &config.gripper, config.n_q)?,
            grid,
        })
    }

    fn candidates(&self, i: usize, j: usize) -> [Option<PathOutcome>; 5] {
        Neighbor::ORDER.map(|n| {
            let (di, dj) = n.offset();
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            let inside = (0..self.grid.cols as i64).contains(&ni) && (0..self.grid.rows as i64).contains(&nj);
            inside.then(|| self.query[self.grid.flat(ni as usize, nj as usize)])
        })
    }

    /// Labels every path at tolerance `t_z`, in row-major grid order.
    pub fn label(&self, t_z: f64) -> Vec<PathRecord> {
        (0..self.grid.len())
            .into_par_iter()
            .map(|flat| {
                let (i, j) = self.grid.coords(flat);
                let gt = self.gt[flat];
                let decision = label_path(gt, self.candidates(i, j), t_z);
                let depth = match decision.label {
                    Label::Fpc => decision.used.collision,
                    Label::Aligned | Label::Fnc => gt.collision,
                };
                PathRecord {
                    i,
                    j,
                    direction_index: self.direction_index,
                    gt_outcome: gt,
                    query_outcome_used: decision.used,
                    matched_neighbor: decision.neighbor,
                    label: decision.label,
                    world_point: depth.map(|t| self.grid.world_point(i, j, t)),
                }
            })
            .collect()
    }

    pub fn report(&self, records: &[PathRecord]) -> DirectionReport {
        let counts = LabelCounts::from_labels(records.iter().map(|r| r.label));
        DirectionReport {
            direction_index: self.direction_index,
            direction: self.grid.frame.d,
            cols: self.grid.cols,
            rows: self.grid.rows,
            counts,
            r_fpc: counts.r_fpc(),
            r_fnc: counts.r_fnc(),
            fc: counts.fc(),
        }
    }
}

/// Simulates and labels every path for a single direction.
pub fn evaluate_direction(
    gt: &PointCloud,
    query: &PointCloud,
    config: &EvalConfig,
    direction: Point3,
) -> Result<(Vec<PathRecord>, DirectionReport)> {
    let outcomes = DirectionOutcomes::compute(gt, query, config, 0, direction)?;
    let records = outcomes.label(config.t_z);
    let report = outcomes.report(&records);
    Ok((records, report))
}

fn all_outcomes(gt: &PointCloud, query: &PointCloud, config: &EvalConfig) -> Result<Vec<DirectionOutcomes>> {
    config.validate()?;
    config
        .directions
        .iter()
        .enumerate()
        .map(|(k, d)| DirectionOutcomes::compute(gt, query, config, k, *d))
        .collect()
}

/// Report plus the per-path records of every direction, concatenated in
/// direction order.
pub fn evaluate_detailed(
    gt: &PointCloud,
    query: &PointCloud,
    config: &EvalConfig,
) -> Result<(CollisionReport, Vec<PathRecord>)> {
    let outcomes = all_outcomes(gt, query, config)?;
    let mut records = Vec::new();
    let mut directions = Vec::with_capacity(outcomes.len());
    for o in &outcomes {
        let r = o.label(config.t_z);
        directions.push(o.report(&r));
        records.extend(r);
    }
    Ok((CollisionReport::pool(config.clone(), directions), records))
}

pub fn evaluate(gt: &PointCloud, query: &PointCloud, config: &EvalConfig) -> Result<CollisionReport> {
    Ok(evaluate_detailed(gt, query, config)?.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub t_z: f64,
    pub report: CollisionReport,
}

/// Reports across increasing depth tolerances.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepSeries {
    pub points: Vec<SweepPoint>,
}

impl SweepSeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Re-labels one set of path outcomes at each tolerance in `tz_values`,
/// which must be strictly increasing and non-negative. `config.t_z` is
/// replaced by each value in the per-point config echo.
pub fn tolerance_sweep(
    gt: &PointCloud,
    query: &PointCloud,
    config: &EvalConfig,
    tz_values: &[f64],
) -> Result<SweepSeries> {
    if tz_values
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::Unsorted);
    }
    for &tz in tz_values {
        EvalConfig {
            t_z: tz,
            ..config.clone()
        }
        .validate()?;
    }
    let outcomes = all_outcomes(gt, query, config)?;
    let points = tz_values
        .iter()
        .map(|&t_z| {
            let directions = outcomes.iter().map(|o| o.report(&o.label(t_z))).collect();
            let config = EvalConfig { t_z, ..config.clone() };
            SweepPoint {
                t_z,
                report: CollisionReport::pool(config, directions),
            }
        })
        .collect();
    Ok(SweepSeries { points })
}

fn tilted(tilt_deg: f64, azimuth_deg: f64) -> Point3 {
    let (tilt, az) = (tilt_deg * PI / 180.0, azimuth_deg * PI / 180.0);
    Point3::new(tilt.sin() * az.cos(), tilt.sin() * az.sin(), tilt.cos())
}

/// Standard direction sets around `+Z`: 1 (straight), 4 (plus three tilted
/// 30° at azimuths 0/120/240°) or 7 (plus three tilted 45° at 60/180/300°).
pub fn direction_preset(count: usize) -> Result<Vec<Point3>> {
    let mut dirs = vec![Point3::Z];
    if count == 1 {
        return Ok(dirs);
    }
    if count != 4 && count != 7 {
        return Err(Error::InvalidParameter {
            name: "direction preset",
            message: format!("expected 1, 4 or 7, got {count}"),
        });
    }
    dirs.extend([0.0, 120.0, 240.0].map(|az| tilted(30.0, az)));
    if count == 7 {
        dirs.extend([60.0, 180.0, 300.0].map(|az| tilted(45.0, az)));
    }
    Ok(dirs)
}
