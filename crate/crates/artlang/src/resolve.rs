use crate::ast::JointStmt;
use crate::compile::{CompileError, CompileErrorKind};
use kinematics_core::{Joint, JointKind, Pose, Vec3};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ResolvedJoint {
    pub joint: Joint,
    /// Child link frame in the world; differs from the child's placed pose
    /// for revolute joints, whose frame moves onto the rotation axis.
    pub child_frame_world: Pose,
}

/// Translates a globally specified joint into a parent-relative URDF joint.
///
/// The world axis direction becomes the child-frame axis through the inverse
/// of the child's placed orientation. For revolute joints the child frame is
/// repositioned onto the rotation axis line: at the orthogonal projection of
/// the child's placed position onto it, which is invariant to where along the
/// axis the pivot was given.
pub fn resolve_joint(
    stmt: &JointStmt,
    world_poses: &BTreeMap<String, Pose>,
    joint_name: String,
) -> Result<ResolvedJoint, CompileError> {
    let fail = |reason: String| CompileError {
        loc: Some(stmt.loc),
        kind: CompileErrorKind::JointResolution { child: stmt.child.clone(), reason },
    };

    let parent_frame = *world_poses
        .get(&stmt.parent)
        .ok_or_else(|| fail(format!("parent `{}` has no established pose", stmt.parent)))?;
    let placed = *world_poses
        .get(&stmt.child)
        .ok_or_else(|| fail(format!("child `{}` has no established pose", stmt.child)))?;

    let (child_frame, axis_local) = match stmt.kind {
        JointKind::Fixed => (placed, Vec3::X),
        JointKind::Prismatic => {
            let axis = stmt
                .global_axis
                .normalized()
                .ok_or_else(|| fail("zero global axis".into()))?;
            let local = placed
                .orientation
                .conjugate()
                .rotate(axis)
                .normalized()
                .expect("rotation preserves length");
            (placed, local)
        }
        JointKind::Revolute => {
            let axis = stmt
                .global_axis
                .normalized()
                .ok_or_else(|| fail("zero global axis".into()))?;
            let pivot = stmt.global_pivot.ok_or_else(|| fail("missing pivot".into()))?;
            // Frame origin: the point of the rotation axis closest to the
            // child's placed position.
            let along = (placed.position - pivot).dot(axis);
            let frame_position = pivot + axis * along;
            let frame = Pose::new(frame_position, placed.orientation);
            let local = frame
                .orientation
                .conjugate()
                .rotate(axis)
                .normalized()
                .expect("rotation preserves length");
            (frame, local)
        }
    };

    let origin = parent_frame.inverse().compose(child_frame);
    Ok(ResolvedJoint {
        joint: Joint {
            name: joint_name,
            kind: stmt.kind,
            parent: stmt.parent.clone(),
            child: stmt.child.clone(),
            origin,
            axis: axis_local,
            limit: stmt.limit,
        },
        child_frame_world: child_frame,
    })
}
