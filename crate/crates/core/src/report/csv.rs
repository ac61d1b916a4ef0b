use std::fmt::Write as _;
use std::path::Path;

use crate::collision::{Label, Neighbor, PathRecord};
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_file};

use super::fmt_sig9;

pub const CSV_HEADER: &str = "i,j,direction_index,gt_depth,query_depth,matched_neighbor,label";

fn depth(d: Option<f64>) -> String {
    d.map(fmt_sig9).unwrap_or_default()
}

/// One row per path; depths are empty when the path does not collide.
pub fn write_paths_csv(records: &[PathRecord], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.i,
            r.j,
            r.direction_index,
            depth(r.gt_outcome.collision),
            depth(r.query_outcome_used.collision),
            r.matched_neighbor.as_str(),
            r.label.as_str()
        )
        .expect("writing to a String");
    }
    write_file(path.as_ref(), out.as_bytes())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathRow {
    pub i: usize,
    pub j: usize,
    pub direction_index: usize,
    pub gt_depth: Option<f64>,
    pub query_depth: Option<f64>,
    pub matched_neighbor: Neighbor,
    pub label: Label,
}

pub fn read_paths_csv(path: impl AsRef<Path>) -> Result<Vec<PathRow>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, message: &str| Error::Parse {
        path: path.to_path_buf(),
        location: format!("line {}", line + 1),
        message: message.to_string(),
    };
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => return Err(bad(0, "unexpected header")),
    }
    lines
        .map(|(n, line)| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(n, "expected 7 fields"));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| bad(n, "invalid integer"));
            let opt = |s: &str| -> Result<Option<f64>> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(n, "invalid depth"))
                }
            };
            Ok(PathRow {
                i: int(f[0])?,
                j: int(f[1])?,
                direction_index: int(f[2])?,
                gt_depth: opt(f[3])?,
                query_depth: opt(f[4])?,
                matched_neighbor: Neighbor::parse(f[5]).ok_or_else(|| bad(n, "invalid neighbor"))?,
                label: Label::parse(f[6]).ok_or_else(|| bad(n, "invalid label"))?,
            })
        })
        .collect()
}
