use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::collision::{CollisionReport, SweepSeries};
use crate::error::{Error, Result};
use crate::io::write_file;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMetric {
    RFpc,
    RFnc,
    Fc,
}

impl SweepMetric {
    pub fn value(self, report: &CollisionReport) -> f64 {
        match self {
            SweepMetric::RFpc => report.r_fpc,
            SweepMetric::RFnc => report.r_fnc,
            SweepMetric::Fc => report.fc,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepMetric::RFpc => "R_FPC",
            SweepMetric::RFnc => "R_FNC",
            SweepMetric::Fc => "FC",
        }
    }
}

impl FromStr for SweepMetric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "r_fpc" => Ok(SweepMetric::RFpc),
            "r_fnc" => Ok(SweepMetric::RFnc),
            "fc" => Ok(SweepMetric::Fc),
            other => Err(format!("expected r_fpc, r_fnc or fc, got `{other}`")),
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 55.0;
const TICKS: usize = 5;

/// Line chart of `metric` (percent) against `t_z` (mm), as SVG 1.1 text.
pub fn sweep_svg(series: &SweepSeries, metric: SweepMetric) -> Result<String> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    let data: Vec<(f64, f64)> = series
        .points
        .iter()
        .map(|p| (p.t_z, 100.0 * metric.value(&p.report)))
        .collect();
    let (mut x0, mut x1) = (data[0].0, data[data.len() - 1].0);
    if x1 <= x0 {
        x0 -= 1.0;
        x1 += 1.0;
    }
    let y_max = data.iter().map(|d| d.1).fold(0.0, f64::max);
    let y1 = if y_max > 0.0 { y_max * 1.1 } else { 1.0 };
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - y / y1 * plot_h;

    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">{} vs Z tolerance</text>"#,
        LEFT + plot_w / 2.0,
        metric.label()
    );
    // axes
    let (ax, ay) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        w,
        r#"<path d="M {ax:.2} {TOP:.2} L {ax:.2} {ay:.2} L {:.2} {ay:.2}" stroke="black" fill="none"/>"#,
        LEFT + plot_w
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), f * y1);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            w,
            r#"<line x1="{px:.2}" y1="{ay:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            ay + 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{px:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{xv:.2}</text>"#,
            ay + 18.0
        );
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{ax:.2}" y2="{py:.2}" stroke="black"/>"#,
            ax - 5.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{yv:.2}</text>"#,
            ax - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">T_Z [mm]</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        w,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{} [%]</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.label()
    );
    let pts: Vec<String> = data
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        w,
        r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
        pts.join(" ")
    );
    for &(x, y) in &data {
        let _ = writeln!(
            w,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="steelblue"><title>{x} mm: {y:.2}%</title></circle>"#,
            sx(x),
            sy(y)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

pub fn render_sweep_svg(series: &SweepSeries, metric: SweepMetric, path: impl AsRef<Path>) -> Result<()> {
    let svg = sweep_svg(series, metric)?;
    write_file(path.as_ref(), svg.as_bytes())
}
