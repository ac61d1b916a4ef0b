use std::path::Path;

use crate::collision::{Label, PathRecord};
use crate::error::Result;
use crate::geometry::{PointCloud, Rgb};
use crate::io::{save_point_cloud, CloudFormat};

/// Aligned black, false positives blue, false negatives red.
pub fn label_color(label: Label) -> Rgb {
    match label {
        Label::Aligned => [0, 0, 0],
        Label::Fpc => [0, 0, 255],
        Label::Fnc => [255, 0, 0],
    }
}

/// One colored point per path that collides in at least one cloud.
pub fn collision_map_cloud(records: &[PathRecord]) -> PointCloud {
    let (points, colors) = records
        .iter()
        .filter_map(|r| r.world_point.map(|p| (p, label_color(r.label))))
        .unzip();
    PointCloud::with_colors(points, colors).expect("one color per point")
}

/// Writes the collision map as an ASCII PLY with per-vertex colors.
pub fn export_collision_map(records: &[PathRecord], path: impl AsRef<Path>) -> Result<()> {
    save_point_cloud(&collision_map_cloud(records), path, CloudFormat::PlyAscii)
}
