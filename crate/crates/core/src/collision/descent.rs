use serde::{Deserialize, Serialize};

/// Result of one simulated descent: the depth of the gripper's leading face
/// at first collision, if any.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PathOutcome {
    pub collision: Option<f64>,
}

impl PathOutcome {
    pub const MISS: PathOutcome = PathOutcome { collision: None };

    pub fn hit(depth: f64) -> Self {
        PathOutcome { collision: Some(depth) }
    }

    pub fn collides(&self) -> bool {
        self.collision.is_some()
    }
}

/// First collision of a gripper of extent `gripper_height` moving toward
/// increasing depth through points at `depths` (ascending).
///
/// With the leading face at depth `t` the gripper occupies `[t - height, t]`.
/// A collision needs more than `threshold` points inside, and the count only
/// grows when `t` reaches a point, so the answer is the first `depths[j]`
/// whose window back to `depths[j - threshold]` fits in the gripper.
pub fn descend(depths: &[f64], gripper_height: f64, threshold: usize) -> PathOutcome {
    debug_assert!(
        depths.windows(2).all(|w| w[0] <= w[1]),
        "descend() requires ascending depths"
    );
    (threshold..depths.len())
        .find(|&j| depths[j] - depths[j - threshold] <= gripper_height)
        .map_or(PathOutcome::MISS, |j| PathOutcome::hit(depths[j]))
}
