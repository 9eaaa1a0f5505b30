use crate::EvalConfig;
use kinematics_core::{forward_kinematics, Joint, JointKind, UrdfModel, Vec3};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A joint expressed in the world frame at the zero configuration: unit axis
/// direction, frame origin, and motion limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointWorld {
    pub kind: JointKind,
    pub axis: Vec3,
    pub origin: Vec3,
    pub lower: f64,
    pub upper: f64,
}

impl JointWorld {
    /// Transforms a model joint into world coordinates through zero-value
    /// forward kinematics.
    pub fn from_model(model: &UrdfModel, joint: &Joint) -> Self {
        let poses = forward_kinematics(model, &BTreeMap::new())
            .expect("zero configuration is always within limits");
        let child_frame = poses[&joint.child];
        let (lower, upper) = joint.limit.map_or((0.0, 0.0), |l| (l.lower, l.upper));
        Self {
            kind: joint.kind,
            axis: child_frame.orientation.rotate(joint.axis),
            origin: child_frame.position,
            lower,
            upper,
        }
    }

    /// Motion vector `m = a·(u − l)`.
    pub fn motion_vector(&self) -> Vec3 {
        self.axis * (self.upper - self.lower)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointVerdict {
    Success,
    FailType,
    FailAxis,
    FailOrigin,
    FailLimit,
}

/// Per-joint error components. Axis, origin, and limit components are only
/// defined when both joints are movable; the verdict applies the component
/// thresholds in the fixed order type → axis → origin → limit, attributing
/// the earliest violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointError {
    pub type_error: u8,
    pub axis_error: Option<f64>,
    pub origin_error: Option<f64>,
    pub limit_range_error: Option<f64>,
    pub limit_direction_error: Option<f64>,
    pub verdict: JointVerdict,
}

/// Near-parallel axis cutoff for the cross-product origin formula; below this
/// the formula divides by ~0 exactly in the common near-success case.
const PARALLEL_EPS: f64 = 1e-9;

/// Distance from point `p` to the line through `origin` along unit `dir`.
fn point_line_distance(p: Vec3, origin: Vec3, dir: Vec3) -> f64 {
    let d = p - origin;
    (d - dir * d.dot(dir)).norm()
}

/// Compares two world-frame joints.
///
/// - type: 0/1 kind mismatch
/// - axis: `min(arccos(d), arccos(−d))` of normalized axes, in `[0, π/2]`
/// - origin: revolute — shortest line–line distance `|p·(a_p×a_g)|/‖a_p×a_g‖`
///   (point-to-line fallback for parallel axes); prismatic — Euclidean
///   distance (ground-truth kind selects the formula)
/// - limit: `‖m_p − m_g‖` on motion vectors `m = a(u−l)`, and direction
///   `1 − cos` in `[0, 2]`. A zero-range side degrades range to a magnitude
///   comparison; direction is 0 when both ranges are zero, else 2.
pub fn joint_error(pred: &JointWorld, gt: &JointWorld, cfg: &EvalConfig) -> JointError {
    let type_error = u8::from(pred.kind != gt.kind);

    let (mut axis_error, mut origin_error) = (None, None);
    let (mut limit_range_error, mut limit_direction_error) = (None, None);

    if pred.kind.is_movable() && gt.kind.is_movable() {
        let a_p = pred.axis.normalized().expect("movable joint axis is unit");
        let a_g = gt.axis.normalized().expect("movable joint axis is unit");
        let d = a_p.dot(a_g).clamp(-1.0, 1.0);
        axis_error = Some(d.acos().min((-d).acos()));

        origin_error = Some(match gt.kind {
            JointKind::Revolute => {
                let cross = a_p.cross(a_g);
                let cross_norm = cross.norm();
                if cross_norm < PARALLEL_EPS {
                    point_line_distance(pred.origin, gt.origin, a_g)
                } else {
                    (pred.origin - gt.origin).dot(cross).abs() / cross_norm
                }
            }
            _ => (pred.origin - gt.origin).norm(),
        });

        let m_p = pred.motion_vector();
        let m_g = gt.motion_vector();
        let (n_p, n_g) = (m_p.norm(), m_g.norm());
        if n_p < PARALLEL_EPS || n_g < PARALLEL_EPS {
            limit_range_error = Some((n_p - n_g).abs());
            limit_direction_error =
                Some(if n_p < PARALLEL_EPS && n_g < PARALLEL_EPS { 0.0 } else { 2.0 });
        } else {
            limit_range_error = Some((m_p - m_g).norm());
            limit_direction_error = Some(1.0 - m_p.dot(m_g) / (n_p * n_g));
        }
    }

    let verdict = if type_error != 0 {
        JointVerdict::FailType
    } else if axis_error.is_some_and(|e| e > cfg.angular_threshold) {
        JointVerdict::FailAxis
    } else if origin_error.is_some_and(|e| e > cfg.position_threshold) {
        JointVerdict::FailOrigin
    } else if limit_range_error.is_some_and(|e| e > cfg.limit_range_threshold)
        || limit_direction_error.is_some_and(|e| e > cfg.limit_direction_threshold)
    {
        JointVerdict::FailLimit
    } else {
        JointVerdict::Success
    };

    JointError {
        type_error,
        axis_error,
        origin_error,
        limit_range_error,
        limit_direction_error,
        verdict,
    }
}
