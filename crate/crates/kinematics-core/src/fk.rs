use crate::{JointKind, Pose, UnitQuat, UrdfModel, Vec3};
use std::collections::BTreeMap;
use thiserror::Error;

/// Slack applied to joint-limit checks to absorb floating-point drift.
const LIMIT_SLACK: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum FkError {
    #[error("joint value supplied for unknown joint `{0}`")]
    UnknownJoint(String),
    #[error("joint value supplied for fixed joint `{0}`")]
    ValueForFixedJoint(String),
    #[error("value {value} for joint `{joint}` outside limits [{lower}, {upper}]")]
    OutOfLimits { joint: String, value: f64, lower: f64, upper: f64 },
}

/// World pose of every link: root at identity, each child at
/// `parent ∘ joint.origin ∘ joint motion`.
///
/// Joints absent from `joint_values` sit at zero. Values are checked against
/// the joint limits with 1e-9 slack.
pub fn forward_kinematics(
    model: &UrdfModel,
    joint_values: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, Pose>, FkError> {
    for (name, &value) in joint_values {
        let joint = model
            .joint(name)
            .ok_or_else(|| FkError::UnknownJoint(name.clone()))?;
        match joint.kind {
            JointKind::Fixed => {
                if value != 0.0 {
                    return Err(FkError::ValueForFixedJoint(name.clone()));
                }
            }
            _ => {
                let limit = joint.limit.expect("validated movable joint has a limit");
                if value < limit.lower - LIMIT_SLACK || value > limit.upper + LIMIT_SLACK {
                    return Err(FkError::OutOfLimits {
                        joint: name.clone(),
                        value,
                        lower: limit.lower,
                        upper: limit.upper,
                    });
                }
            }
        }
    }

    let mut poses = BTreeMap::new();
    let root = model.root_link().name.clone();
    poses.insert(root.clone(), Pose::IDENTITY);

    // Tree is validated, so repeatedly sweeping joints resolves all links;
    // each pass places every joint whose parent is already posed.
    let mut placed = 1;
    while placed < model.links().len() {
        let before = placed;
        for joint in model.joints() {
            if poses.contains_key(&joint.child) {
                continue;
            }
            let Some(parent_pose) = poses.get(&joint.parent).copied() else {
                continue;
            };
            let value = joint_values.get(&joint.name).copied().unwrap_or(0.0);
            let motion = joint_motion(joint.kind, joint.axis, value);
            poses.insert(joint.child.clone(), parent_pose.compose(joint.origin).compose(motion));
            placed += 1;
        }
        assert!(placed > before, "validated tree must make progress");
    }

    Ok(poses)
}

fn joint_motion(kind: JointKind, axis: Vec3, value: f64) -> Pose {
    match kind {
        JointKind::Fixed => Pose::IDENTITY,
        JointKind::Prismatic => Pose::from_translation(axis * value),
        JointKind::Revolute => Pose::from_rotation(
            UnitQuat::from_axis_angle(axis, value).expect("validated joint axis is non-zero"),
        ),
    }
}
