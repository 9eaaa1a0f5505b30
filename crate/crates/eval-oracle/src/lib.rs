//! Evaluation of predicted articulated models against ground truth: per-link
//! pose errors, per-joint error components with ordered failure attribution,
//! Chamfer mesh distance, model-level verdicts, and corpus aggregation.
//!
//! All distances are meters and all angles radians. Chamfer is the
//! non-squared symmetric mean nearest-neighbor distance (halved), reported in
//! meters.

mod aggregate;
mod chamfer;
mod evaluate;
mod joint;
mod link;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate, aggregate_to_csv, critic_agreement, AggregateStats, ConfusionMatrix};
pub use chamfer::{chamfer, NearestIndex};
pub use evaluate::{
    evaluate, match_links_by_chamfer, match_links_by_name, EvalError, EvalReport, FailureCause,
    JointEntry, LinkEntry,
};
pub use joint::{joint_error, JointError, JointVerdict, JointWorld};
pub use link::{link_error, LinkError};

/// Thresholds and sampling parameters for an evaluation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Success bound on link/origin position errors, meters.
    pub position_threshold: f64,
    /// Success bound on link orientation and joint axis errors, radians.
    pub angular_threshold: f64,
    /// Surface samples per link for Chamfer terms.
    pub chamfer_samples: usize,
    /// Success bound on the motion-range difference, meters (prismatic) or
    /// radians scaled by the unit axis (revolute).
    pub limit_range_threshold: f64,
    /// Success bound on the motion-direction difference, in [0, 2].
    pub limit_direction_threshold: f64,
    /// Compare link frame poses (the URDF-defined notion) or mesh-bounds
    /// centroids.
    pub link_pose_mode: LinkPoseMode,
    /// Seed for the deterministic surface sampling behind Chamfer terms.
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            position_threshold: 0.050,
            angular_threshold: 0.25,
            chamfer_samples: 2048,
            limit_range_threshold: 0.050,
            limit_direction_threshold: 0.25,
            link_pose_mode: LinkPoseMode::Frame,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkPoseMode {
    Frame,
    Centroid,
}
