//! Result serialization: JSON reports, per-path CSV, colored collision maps
//! and SVG sweep charts. Every writer is deterministic.

mod csv;
mod json;
mod map;
mod svg;

pub use self::csv::{read_paths_csv, write_paths_csv, PathRow, CSV_HEADER};
pub use json::{
    read_report_json, write_report_json, ConfigEcho, DirectionEntry, GripperEcho, RateBlock, ReportDocument,
    SweepDocument, SweepEntry, Timing, TOOL_VERSION,
};
pub use map::{collision_map_cloud, export_collision_map, label_color};
pub use svg::{render_sweep_svg, sweep_svg, SweepMetric};

/// Rounds to 9 significant digits.
pub fn sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// Shortest decimal text of `x` rounded to 9 significant digits.
pub fn fmt_sig9(x: f64) -> String {
    let r = sig9(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}
