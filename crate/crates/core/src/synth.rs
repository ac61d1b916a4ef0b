//! Deterministic synthetic scenes and degradations.
//!
//! Scenes are z-up: a plane at `z = 0` with objects standing on it. Every
//! generator is a pure function of its arguments and seed. Randomness comes
//! from ChaCha8 (`rand_chacha`, version pinned in the workspace manifest).

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, PointCloud};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lattice positions along `[min, min + len]`: every `min + k * spacing`
/// below the far end, plus the far end itself. `ceil(len / spacing) + 1` values.
fn axis_samples(min: f64, len: f64, spacing: f64) -> Vec<f64> {
    let n = (len / spacing).ceil() as usize;
    let mut v: Vec<f64> = (0..n).map(|k| min + k as f64 * spacing).collect();
    v.push(min + len);
    v
}

/// Levels `min + k * spacing` strictly below `min + len`.
fn levels_below(min: f64, len: f64, spacing: f64) -> Vec<f64> {
    let n = (len / spacing).ceil() as usize;
    (0..n).map(|k| min + k as f64 * spacing).collect()
}

/// `(floor(w/s)+1) * (floor(h/s)+1)` points at `z = 0`, centered on the origin.
pub fn plane_scene(extent: (f64, f64), spacing: f64) -> Result<PointCloud> {
    Error::positive("plane width", extent.0)?;
    Error::positive("plane height", extent.1)?;
    Error::positive("spacing", spacing)?;
    let nx = (extent.0 / spacing).floor() as usize + 1;
    let ny = (extent.1 / spacing).floor() as usize + 1;
    let x0 = -((nx - 1) as f64) * spacing / 2.0;
    let y0 = -((ny - 1) as f64) * spacing / 2.0;
    let mut pts = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            pts.push(Point3::new(x0 + i as f64 * spacing, y0 + j as f64 * spacing, 0.0));
        }
    }
    Ok(PointCloud::from_points(pts))
}

/// Appends the top and four side faces of an axis-aligned box. The bottom
/// face is omitted as it rests on the supporting surface.
pub fn add_box(cloud: &PointCloud, center: Point3, size: (f64, f64, f64), spacing: f64) -> Result<PointCloud> {
    Error::positive("box size x", size.0)?;
    Error::positive("box size y", size.1)?;
    Error::positive("box size z", size.2)?;
    Error::positive("spacing", spacing)?;
    let min = center - Point3::new(size.0, size.1, size.2) * 0.5;
    let top = min.z + size.2;
    let xs = axis_samples(min.x, size.0, spacing);
    let ys = axis_samples(min.y, size.1, spacing);
    let zs = levels_below(min.z, size.2, spacing);
    let mut pts = Vec::new();
    for &y in &ys {
        for &x in &xs {
            pts.push(Point3::new(x, y, top));
        }
    }
    for &z in &zs {
        for &x in [xs[0], xs[xs.len() - 1]].iter() {
            for &y in &ys {
                pts.push(Point3::new(x, y, z));
            }
        }
        for &y in [ys[0], ys[ys.len() - 1]].iter() {
            for &x in &xs[1..xs.len() - 1] {
                pts.push(Point3::new(x, y, z));
            }
        }
    }
    let mut out = cloud.clone();
    out.extend(pts);
    Ok(out)
}

/// Number of points [`add_box`] appends.
pub fn box_sample_count(size: (f64, f64, f64), spacing: f64) -> usize {
    let c = |len: f64| (len / spacing).ceil() as usize + 1;
    let levels = (size.2 / spacing).ceil() as usize;
    c(size.0) * c(size.1) + 2 * levels * (c(size.0) + c(size.1) - 2)
}

fn ring(center: Point3, radius: f64, spacing: f64, out: &mut Vec<Point3>) {
    let n = ((2.0 * PI * radius / spacing).ceil() as usize).max(3);
    for k in 0..n {
        let a = 2.0 * PI * k as f64 / n as f64;
        out.push(center + Point3::new(radius * a.cos(), radius * a.sin(), 0.0));
    }
}

/// Appends the lateral surface and top cap of a vertical cylinder standing
/// on `base`.
pub fn add_rod(cloud: &PointCloud, base: Point3, diameter: f64, height: f64, spacing: f64) -> Result<PointCloud> {
    Error::positive("rod diameter", diameter)?;
    Error::positive("rod height", height)?;
    Error::positive("spacing", spacing)?;
    let radius = diameter / 2.0;
    let mut pts = Vec::new();
    for z in levels_below(base.z, height, spacing) {
        ring(Point3::new(base.x, base.y, z), radius, spacing, &mut pts);
    }
    let top = Point3::new(base.x, base.y, base.z + height);
    pts.push(top);
    let mut r = spacing;
    while r < radius {
        ring(top, r, spacing, &mut pts);
        r += spacing;
    }
    ring(top, radius, spacing, &mut pts);
    let mut out = cloud.clone();
    out.extend(pts);
    Ok(out)
}

/// Removes every point within `radius` of `center_xy` in the XY plane.
pub fn punch_hole(cloud: &PointCloud, center_xy: (f64, f64), radius: f64) -> PointCloud {
    let r2 = radius * radius;
    cloud.retain_indexed(|_, p| {
        let (dx, dy) = (p.x - center_xy.0, p.y - center_xy.1);
        dx * dx + dy * dy > r2
    })
}

/// Appends `count` points uniformly distributed in the cube of side `size`
/// centered at `center`.
pub fn add_ghost_blob(cloud: &PointCloud, center: Point3, size: f64, count: usize, seed: u64) -> Result<PointCloud> {
    Error::positive("blob size", size)?;
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "blob count",
            message: "must be at least 1".into(),
        });
    }
    let mut rng = rng(seed);
    let h = size / 2.0;
    let mut coord = |c: f64| rng.random_range(c - h..=c + h);
    let pts: Vec<Point3> = (0..count)
        .map(|_| {
            let x = coord(center.x);
            let y = coord(center.y);
            let z = coord(center.z);
            Point3::new(x, y, z)
        })
        .collect();
    let mut out = cloud.clone();
    out.extend(pts);
    Ok(out)
}

/// Independent Gaussian perturbation of every coordinate.
pub fn add_noise(cloud: &PointCloud, sigma: f64, seed: u64) -> Result<PointCloud> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma",
            message: format!("must be a finite value >= 0, got {sigma}"),
        });
    }
    if sigma == 0.0 {
        return Ok(cloud.clone());
    }
    let normal = Normal::new(0.0, sigma).expect("validated sigma");
    let mut rng = rng(seed);
    let pts = cloud
        .points()
        .iter()
        .map(|p| {
            let dx = normal.sample(&mut rng);
            let dy = normal.sample(&mut rng);
            let dz = normal.sample(&mut rng);
            *p + Point3::new(dx, dy, dz)
        })
        .collect();
    Ok(PointCloud::from_points(pts))
}

/// Keeps each point independently with probability `keep_fraction`.
pub fn subsample(cloud: &PointCloud, keep_fraction: f64, seed: u64) -> Result<PointCloud> {
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "keep_fraction",
            message: format!("must lie in (0, 1], got {keep_fraction}"),
        });
    }
    if keep_fraction == 1.0 {
        return Ok(cloud.clone());
    }
    let mut rng = rng(seed);
    Ok(cloud.retain_indexed(|_, _| rng.random_bool(keep_fraction)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub center: [f64; 3],
    pub size: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodSpec {
    pub base: [f64; 3],
    pub diameter: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlobSpec {
    pub center: [f64; 3],
    pub size: f64,
    pub count: usize,
}

/// Scene description, readable from a TOML file.
///
/// ```toml
/// extent = [400.0, 400.0]
/// spacing = 1.0
/// seed = 7
/// noise = 0.5           # Gaussian sigma, mm
/// keep_fraction = 1.0
///
/// [[boxes]]
/// center = [0.0, 0.0, 25.0]
/// size = [50.0, 50.0, 50.0]
/// ```
///
/// Components are applied in order: plane, boxes, rods, blobs, holes,
/// subsampling, noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    pub extent: [f64; 2],
    pub spacing: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub boxes: Vec<BoxSpec>,
    #[serde(default)]
    pub rods: Vec<RodSpec>,
    #[serde(default)]
    pub blobs: Vec<BlobSpec>,
    #[serde(default)]
    pub holes: Vec<HoleSpec>,
    #[serde(default)]
    pub noise: f64,
    #[serde(default = "one")]
    pub keep_fraction: f64,
}

fn one() -> f64 {
    1.0
}

impl SceneSpec {
    pub fn plane(extent: (f64, f64), spacing: f64) -> Self {
        SceneSpec {
            extent: [extent.0, extent.1],
            spacing,
            seed: 0,
            boxes: Vec::new(),
            rods: Vec::new(),
            blobs: Vec::new(),
            holes: Vec::new(),
            noise: 0.0,
            keep_fraction: 1.0,
        }
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene spec serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = crate::io::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            location: e
                .span()
                .map_or_else(|| "document".to_string(), |s| format!("byte {}", s.start)),
            message: e.message().to_string(),
        })
    }

    /// Seed for the `stream`-th random component.
    fn stream_seed(&self, stream: u64) -> u64 {
        self.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    pub fn generate(&self) -> Result<PointCloud> {
        let mut cloud = plane_scene((self.extent[0], self.extent[1]), self.spacing)?;
        for b in &self.boxes {
            cloud = add_box(&cloud, b.center.into(), (b.size[0], b.size[1], b.size[2]), self.spacing)?;
        }
        for r in &self.rods {
            cloud = add_rod(&cloud, r.base.into(), r.diameter, r.height, self.spacing)?;
        }
        for (k, b) in self.blobs.iter().enumerate() {
            cloud = add_ghost_blob(&cloud, b.center.into(), b.size, b.count, self.stream_seed(1 + k as u64))?;
        }
        for h in &self.holes {
            Error::positive("hole radius", h.radius)?;
            cloud = punch_hole(&cloud, (h.center[0], h.center[1]), h.radius);
        }
        cloud = subsample(&cloud, self.keep_fraction, self.stream_seed(1001))?;
        add_noise(&cloud, self.noise, self.stream_seed(1002))
    }
}
