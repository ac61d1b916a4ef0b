//! Points, clouds, bounding boxes and direction-aligned frames.
//!
//! All coordinates are millimeters.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ZERO: Point3 = Point3::new(0.0, 0.0, 0.0);
    pub const X: Point3 = Point3::new(1.0, 0.0, 0.0);
    pub const Y: Point3 = Point3::new(0.0, 1.0, 0.0);
    pub const Z: Point3 = Point3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Squared Euclidean distance. Every metric in the crate goes through
    /// this function so nearest-neighbor results compare bit-for-bit.
    pub fn distance_sq(self, other: Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn distance(self, other: Point3) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub(crate) fn coord(self, axis: usize) -> f64 {
        match axis {
            0 => self.x,
            1 => self.y,
            _ => self.z,
        }
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

pub type Rgb = [u8; 3];

/// An ordered list of points with optional per-point colors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Point3>,
    colors: Option<Vec<Rgb>>,
}

impl PointCloud {
    pub fn new() -> Self {
        Self::default()
    }

    /// Panics if any point is non-finite; use [`PointCloud::try_from_points`]
    /// for untrusted input.
    pub fn from_points(points: Vec<Point3>) -> Self {
        Self::try_from_points(points).expect("non-finite point")
    }

    pub fn try_from_points(points: Vec<Point3>) -> Result<Self> {
        check_finite(&points)?;
        Ok(PointCloud { points, colors: None })
    }

    pub fn with_colors(points: Vec<Point3>, colors: Vec<Rgb>) -> Result<Self> {
        check_finite(&points)?;
        if colors.len() != points.len() {
            return Err(Error::SizeMismatch {
                left: points.len(),
                right: colors.len(),
            });
        }
        Ok(PointCloud {
            points,
            colors: Some(colors),
        })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn colors(&self) -> Option<&[Rgb]> {
        self.colors.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point3> {
        self.points
    }

    /// Appends points, dropping colors if the cloud had any.
    pub fn extend(&mut self, points: impl IntoIterator<Item = Point3>) {
        let start = self.points.len();
        self.points.extend(points);
        assert!(self.points[start..].iter().all(|p| p.is_finite()), "non-finite point");
        self.colors = None;
    }

    /// Keeps points for which `keep(index, point)` holds, preserving order.
    pub fn retain_indexed(&self, mut keep: impl FnMut(usize, &Point3) -> bool) -> PointCloud {
        let mask: Vec<bool> = self.points.iter().enumerate().map(|(i, p)| keep(i, p)).collect();
        let points = self
            .points
            .iter()
            .zip(&mask)
            .filter(|(_, &k)| k)
            .map(|(p, _)| *p)
            .collect();
        let colors = self
            .colors
            .as_ref()
            .map(|c| c.iter().zip(&mask).filter(|(_, &k)| k).map(|(c, _)| *c).collect());
        PointCloud { points, colors }
    }

    pub fn scaled(mut self, factor: f64) -> PointCloud {
        for p in &mut self.points {
            *p = *p * factor;
        }
        self
    }

    pub fn translated(mut self, offset: Point3) -> PointCloud {
        for p in &mut self.points {
            *p = *p + offset;
        }
        self
    }
}

fn check_finite(points: &[Point3]) -> Result<()> {
    match points.iter().position(|p| !p.is_finite()) {
        Some(index) => Err(Error::NonFiniteCoordinate { index }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3,
    pub max: Point3,
}

impl Aabb {
    pub fn from_points(points: &[Point3]) -> Result<Self> {
        let (first, rest) = points.split_first().ok_or(Error::EmptyCloud)?;
        let mut bb = Aabb {
            min: *first,
            max: *first,
        };
        for p in rest {
            bb.grow(*p);
        }
        Ok(bb)
    }

    pub fn grow(&mut self, p: Point3) {
        self.min = Point3::new(self.min.x.min(p.x), self.min.y.min(p.y), self.min.z.min(p.z));
        self.max = Point3::new(self.max.x.max(p.x), self.max.y.max(p.y), self.max.z.max(p.z));
    }

    pub fn contains(&self, p: Point3) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }
}

pub fn bounding_box(cloud: &PointCloud) -> Result<Aabb> {
    Aabb::from_points(cloud.points())
}

/// A descent direction `d` together with an orthonormal basis `(u, v)` of
/// the plane perpendicular to it. `(u, v, d)` is right-handed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionFrame {
    pub d: Point3,
    pub u: Point3,
    pub v: Point3,
}

impl DirectionFrame {
    pub fn new(direction: Point3) -> Result<Self> {
        let len = direction.norm();
        if len.is_nan() || len <= 1e-9 {
            return Err(Error::ZeroDirection);
        }
        let d = direction * (1.0 / len);
        let c = d.cross(Point3::Z);
        let c_len = c.norm();
        // Near-vertical directions get world X so top-down grids stay axis aligned.
        let u = if c_len < 1e-6 { Point3::X } else { c * (1.0 / c_len) };
        let v = d.cross(u);
        Ok(DirectionFrame { d, u, v })
    }

    /// Plane coordinates `(a, b)` and depth `t` of a point.
    pub fn project(&self, p: Point3) -> (f64, f64, f64) {
        (p.dot(self.u), p.dot(self.v), p.dot(self.d))
    }

    pub fn lift(&self, a: f64, b: f64, t: f64) -> Point3 {
        self.u * a + self.v * b + self.d * t
    }
}

pub fn build_frame(direction: Point3) -> Result<DirectionFrame> {
    DirectionFrame::new(direction)
}
