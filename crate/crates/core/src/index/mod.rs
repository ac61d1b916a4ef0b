//! Spatial acceleration structures.

mod nn;
mod projected;

pub use nn::{build_nn_index, nearest_distance, NnIndex};
pub use projected::{build_projected_index, footprint_depths, Projected, ProjectedIndex};
