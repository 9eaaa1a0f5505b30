use crate::EvalConfig;
use kinematics_core::{quat_geodesic, Pose};
use serde::{Deserialize, Serialize};

/// Link pose error: Euclidean position distance plus geodesic orientation
/// distance. Success requires both components at or under their thresholds;
/// failure needs strict exceedance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkError {
    pub position_error: f64,
    pub orientation_error: f64,
    pub success: bool,
}

pub fn link_error(pred: Pose, gt: Pose, cfg: &EvalConfig) -> LinkError {
    let position_error = (pred.position - gt.position).norm();
    let orientation_error = quat_geodesic(pred.orientation, gt.orientation);
    LinkError {
        position_error,
        orientation_error,
        success: position_error <= cfg.position_threshold
            && orientation_error <= cfg.angular_threshold,
    }
}
