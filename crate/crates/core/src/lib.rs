//! Point-cloud evaluation for robotic collision avoidance.
//!
//! The central metric simulates a cuboid gripper translated along a set of
//! directions through a ground-truth cloud and a query cloud, and reports
//! how often the query predicts a collision that does not exist (false
//! positive) or misses one that does (false negative). Classical metrics
//! (Chamfer, Hausdorff, EMD, thresholded precision/recall/F-score) are
//! provided for comparison, together with synthetic scene generators and
//! report writers.
//!
//! All lengths are millimeters.

pub mod assignment;
pub mod baseline;
pub mod collision;
pub mod error;
pub mod geometry;
pub mod index;
pub mod io;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{bounding_box, build_frame, Aabb, DirectionFrame, Point3, PointCloud};
