use crate::ast::PlaceStmt;
use crate::collision::{collide, PosedMesh};
use crate::compile::{CompileError, CompileErrorKind};
use kinematics_core::{Pose, TriMesh, Vec3};

/// Contact search stops when the colliding/free bracket is below 0.1 mm.
const BRACKET_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct PlacementOutcome {
    pub pose: Pose,
    /// Collision tests performed during bracket growth and bisection.
    pub iterations: u32,
}

/// Places `child` against the already-posed assembly per `stmt`: bounds
/// centers aligned on the axes orthogonal to `stmt.axis` (plus the lateral
/// offset), and the position along `stmt.axis` at the nearest non-intersecting
/// offset from the parent, backed off by the clearance.
///
/// The child is never rotated; placement is pure translation.
pub fn place_with_collision(
    child: &TriMesh,
    assembly: &[PosedMesh],
    stmt: &PlaceStmt,
) -> Result<PlacementOutcome, CompileError> {
    let fail = |reason: String| CompileError {
        loc: Some(stmt.loc),
        kind: CompileErrorKind::PlacementFailed { child: stmt.child.clone(), reason },
    };

    let parent = assembly
        .iter()
        .find(|m| m.name == stmt.parent)
        .ok_or_else(|| fail(format!("parent `{}` has no established pose", stmt.parent)))?;

    let child_bounds = child.aabb().map_err(|e| fail(format!("child mesh: {e}")))?;
    let parent_bounds = kinematics_core::aabb_of(&parent.mesh, parent.pose)
        .map_err(|e| fail(format!("parent mesh: {e}")))?;

    let axis = stmt.axis.index();

    // Child center tracks the parent center plus the lateral offset; the
    // component along the placement axis belongs to the contact search.
    let target = parent_bounds.center() + stmt.lateral_offset;
    let anchor = parent_bounds.center().component(axis);
    let position_at = |t: f64| -> Vec3 {
        let mut center = target;
        match axis {
            0 => center.x = anchor + stmt.axis.sign() * t,
            1 => center.y = anchor + stmt.axis.sign() * t,
            _ => center.z = anchor + stmt.axis.sign() * t,
        }
        center - child_bounds.center()
    };

    let mut iterations = 0u32;
    let mut collides_at = |t: f64| -> bool {
        iterations += 1;
        let posed = PosedMesh::new(
            stmt.child.clone(),
            child.clone(),
            Pose::from_translation(position_at(t)),
        );
        assembly.iter().any(|member| collide(&posed, member))
    };

    let combined_extent =
        child_bounds.extents().component(axis) + parent_bounds.extents().component(axis);
    let touch = combined_extent / 2.0;
    let search_limit = 10.0 * combined_extent;

    let contact = if !collides_at(0.0) {
        // Already free at center coincidence; tightest placement is here.
        0.0
    } else {
        let mut lo = 0.0;
        let mut hi = touch.max(BRACKET_TOLERANCE);
        while collides_at(hi) {
            lo = hi;
            hi += combined_extent.max(BRACKET_TOLERANCE);
            if hi > search_limit {
                return Err(fail(format!(
                    "no non-intersecting position within {search_limit:.3} m along {}",
                    stmt.axis.token()
                )));
            }
        }
        while hi - lo > BRACKET_TOLERANCE {
            let mid = (lo + hi) / 2.0;
            if collides_at(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };

    let final_t = contact + stmt.clearance;
    if final_t != contact && collides_at(final_t) {
        return Err(fail(format!(
            "clearance {} re-enters collision along {}",
            stmt.clearance,
            stmt.axis.token()
        )));
    }

    Ok(PlacementOutcome { pose: Pose::from_translation(position_at(final_t)), iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{AxisDir, SourceLoc};

    fn stmt(axis: AxisDir, clearance: f64) -> PlaceStmt {
        PlaceStmt {
            child: "child".into(),
            parent: "parent".into(),
            axis,
            lateral_offset: Vec3::ZERO,
            clearance,
            loc: SourceLoc { line: 1, col: 1 },
        }
    }

    fn unit_cube() -> TriMesh {
        TriMesh::cuboid(Vec3::new(0.5, 0.5, 0.5))
    }

    #[test]
    fn cube_on_cube_contacts_at_one_unit() {
        let assembly = vec![PosedMesh::new("parent", unit_cube(), Pose::IDENTITY)];
        let out = place_with_collision(&unit_cube(), &assembly, &stmt(AxisDir::PosZ, 0.0)).unwrap();
        let gap = out.pose.position.z - 1.0;
        assert!((0.0..=1.0e-4).contains(&gap), "gap {gap}");
        assert!(out.pose.position.x.abs() < 1e-12 && out.pose.position.y.abs() < 1e-12);
    }

    #[test]
    fn clearance_is_additive() {
        let assembly = vec![PosedMesh::new("parent", unit_cube(), Pose::IDENTITY)];
        let flush = place_with_collision(&unit_cube(), &assembly, &stmt(AxisDir::PosZ, 0.0))
            .unwrap()
            .pose
            .position
            .z;
        let spaced = place_with_collision(&unit_cube(), &assembly, &stmt(AxisDir::PosZ, 0.01))
            .unwrap()
            .pose
            .position
            .z;
        assert!((spaced - flush - 0.01).abs() < 1e-12);
    }

    #[test]
    fn negative_axis_places_below() {
        let assembly = vec![PosedMesh::new("parent", unit_cube(), Pose::IDENTITY)];
        let out = place_with_collision(&unit_cube(), &assembly, &stmt(AxisDir::NegZ, 0.0)).unwrap();
        assert!(out.pose.position.z <= -1.0 + 1e-12);
        assert!(out.pose.position.z >= -1.0001);
    }

    #[test]
    fn lateral_offset_shifts_orthogonal_axes_only() {
        let assembly = vec![PosedMesh::new("parent", unit_cube(), Pose::IDENTITY)];
        let mut s = stmt(AxisDir::PosZ, 0.0);
        s.lateral_offset = Vec3::new(0.1, -0.2, 99.0);
        let out = place_with_collision(&unit_cube(), &assembly, &s).unwrap();
        assert!((out.pose.position.x - 0.1).abs() < 1e-12);
        assert!((out.pose.position.y + 0.2).abs() < 1e-12);
        // 99 along the placement axis is ignored; contact still wins.
        assert!(out.pose.position.z < 1.2);
    }

    #[test]
    fn free_at_center_stays_at_center() {
        // A tiny child inside a large hollow parent shell: no contact at all.
        let shell = {
            // Two distant slabs acting as an open "parent" with a hole at the
            // center: the child aligned at the center never collides.
            let mut v = Vec::new();
            let mut t = Vec::new();
            let slab = TriMesh::cuboid(Vec3::new(1.0, 1.0, 0.05));
            for (i, base) in [Vec3::new(0.0, 0.0, -2.0), Vec3::new(0.0, 0.0, 2.0)].iter().enumerate()
            {
                let offset = i * slab.vertices.len();
                v.extend(slab.vertices.iter().map(|&p| p + *base));
                t.extend(slab.triangles.iter().map(|tri| {
                    [tri[0] + offset, tri[1] + offset, tri[2] + offset]
                }));
            }
            TriMesh::new(v, t).unwrap()
        };
        let assembly = vec![PosedMesh::new("parent", shell, Pose::IDENTITY)];
        let child = TriMesh::cuboid(Vec3::new(0.1, 0.1, 0.1));
        let out = place_with_collision(&child, &assembly, &stmt(AxisDir::PosZ, 0.0)).unwrap();
        assert!(out.pose.position.norm() < 1e-12);
    }

    #[test]
    fn fully_blocked_search_errors() {
        // The parent itself is small, but a side plate pierces the child's +x
        // face at every offset inside the 10x search range, so no position is
        // ever free.
        let assembly = vec![
            PosedMesh::new("parent", unit_cube(), Pose::IDENTITY),
            PosedMesh::new(
                "blocker",
                TriMesh::cuboid(Vec3::new(0.05, 2.0, 15.5)),
                Pose::from_translation(Vec3::new(0.5, 0.0, 14.5)),
            ),
        ];
        let err =
            place_with_collision(&unit_cube(), &assembly, &stmt(AxisDir::PosZ, 0.0)).unwrap_err();
        assert!(matches!(err.kind, CompileErrorKind::PlacementFailed { .. }));
    }
}
