use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::collision::{CollisionReport, DirectionReport, EvalConfig, GripperSpec, LabelCounts, SweepSeries};
use crate::error::Result;
use crate::geometry::Point3;
use crate::io::{read_to_string, write_file};

use super::sig9;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperEcho {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

/// Every evaluation input, as used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub t_z: f64,
    pub gripper: GripperEcho,
    pub g_step: f64,
    pub n_gt: usize,
    pub n_q: usize,
    pub directions: Vec<[f64; 3]>,
}

impl From<&EvalConfig> for ConfigEcho {
    fn from(c: &EvalConfig) -> Self {
        ConfigEcho {
            t_z: sig9(c.t_z),
            gripper: GripperEcho {
                length: sig9(c.gripper.length),
                width: sig9(c.gripper.width),
                height: sig9(c.gripper.height),
            },
            g_step: sig9(c.g_step),
            n_gt: c.n_gt,
            n_q: c.n_q,
            directions: c.directions.iter().map(|d| d.to_array().map(sig9)).collect(),
        }
    }
}

impl ConfigEcho {
    pub fn to_config(&self) -> EvalConfig {
        EvalConfig {
            t_z: self.t_z,
            gripper: GripperSpec {
                length: self.gripper.length,
                width: self.gripper.width,
                height: self.gripper.height,
            },
            g_step: self.g_step,
            n_gt: self.n_gt,
            n_q: self.n_q,
            directions: self.directions.iter().map(|d| Point3::from(*d)).collect(),
        }
    }
}

/// Pooled or per-direction rates with the counts they derive from. Rates are
/// fractions, written at full precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBlock {
    pub r_fpc: f64,
    pub r_fnc: f64,
    pub fc: f64,
    pub n_total: usize,
    pub n_fpc: usize,
    pub n_fnc: usize,
    pub n_aligned: usize,
}

impl RateBlock {
    fn new(counts: LabelCounts, r_fpc: f64, r_fnc: f64, fc: f64) -> Self {
        RateBlock {
            r_fpc,
            r_fnc,
            fc,
            n_total: counts.n_total,
            n_fpc: counts.n_fpc,
            n_fnc: counts.n_fnc,
            n_aligned: counts.n_aligned,
        }
    }

    pub fn counts(&self) -> LabelCounts {
        LabelCounts {
            n_total: self.n_total,
            n_fpc: self.n_fpc,
            n_fnc: self.n_fnc,
            n_aligned: self.n_aligned,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionEntry {
    pub index: usize,
    pub direction: [f64; 3],
    pub cols: usize,
    pub rows: usize,
    #[serde(flatten)]
    pub rates: RateBlock,
}

impl From<&DirectionReport> for DirectionEntry {
    fn from(d: &DirectionReport) -> Self {
        DirectionEntry {
            index: d.direction_index,
            direction: d.direction.to_array().map(sig9),
            cols: d.cols,
            rows: d.rows,
            rates: RateBlock::new(d.counts, d.r_fpc, d.r_fnc, d.fc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub config: ConfigEcho,
    pub directions: Vec<DirectionEntry>,
    pub pooled: RateBlock,
    /// Omitted unless requested, so reports are reproducible byte for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ReportDocument {
    pub fn new(report: &CollisionReport) -> Self {
        ReportDocument {
            tool_version: TOOL_VERSION.to_string(),
            config: ConfigEcho::from(&report.config),
            directions: report.directions.iter().map(DirectionEntry::from).collect(),
            pooled: RateBlock::new(report.counts, report.r_fpc, report.r_fnc, report.fc),
            timing: None,
        }
    }

    pub fn with_timing(mut self, elapsed_ms: f64) -> Self {
        self.timing = Some(Timing {
            elapsed_ms: sig9(elapsed_ms),
        });
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_file(path.as_ref(), self.to_json().as_bytes())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&read_to_string(path)?)
    }
}

pub fn write_report_json(report: &CollisionReport, path: impl AsRef<Path>) -> Result<()> {
    ReportDocument::new(report).write(path)
}

pub fn read_report_json(path: impl AsRef<Path>) -> Result<ReportDocument> {
    ReportDocument::read(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub t_z: f64,
    pub pooled: RateBlock,
    pub directions: Vec<DirectionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub tool_version: String,
    /// Configuration shared by every point; `t_z` is that of the first point.
    pub config: ConfigEcho,
    pub points: Vec<SweepEntry>,
}

impl SweepDocument {
    pub fn new(series: &SweepSeries) -> Option<Self> {
        let first = series.points.first()?;
        Some(SweepDocument {
            tool_version: TOOL_VERSION.to_string(),
            config: ConfigEcho::from(&first.report.config),
            points: series
                .points
                .iter()
                .map(|p| SweepEntry {
                    t_z: sig9(p.t_z),
                    pooled: RateBlock::new(p.report.counts, p.report.r_fpc, p.report.r_fnc, p.report.fc),
                    directions: p.report.directions.iter().map(DirectionEntry::from).collect(),
                })
                .collect(),
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut s = serde_json::to_string_pretty(self).expect("sweep serializes");
        s.push('\n');
        write_file(path.as_ref(), s.as_bytes())
    }
}
