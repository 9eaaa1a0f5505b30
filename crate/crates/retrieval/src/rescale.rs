use crate::RetrievalError;
use kinematics_core::{TriMesh, Vec3};

/// Rescales a mesh so its axis-aligned extents equal `target`. Returns the
/// scaled mesh and the per-axis scale factors applied.
pub fn rescale_mesh(mesh: &TriMesh, target: Vec3) -> Result<(TriMesh, Vec3), RetrievalError> {
    let bounds = mesh.aabb().map_err(|_| RetrievalError::ZeroExtent { axis: 0 })?;
    let extents = bounds.extents();
    for (axis, extent) in [extents.x, extents.y, extents.z].into_iter().enumerate() {
        if extent <= 1e-12 {
            return Err(RetrievalError::ZeroExtent { axis });
        }
    }
    let scale = Vec3::new(target.x / extents.x, target.y / extents.y, target.z / extents.z);
    Ok((mesh.scaled(scale), scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_scales_to_target() {
        let cube = TriMesh::cuboid(Vec3::new(0.5, 0.5, 0.5));
        let (scaled, scale) = rescale_mesh(&cube, Vec3::new(2.0, 1.0, 0.5)).unwrap();
        assert!((scale - Vec3::new(2.0, 1.0, 0.5)).norm() < 1e-12);
        let extents = scaled.aabb().unwrap().extents();
        assert!((extents - Vec3::new(2.0, 1.0, 0.5)).norm() < 1e-9);
    }

    #[test]
    fn already_at_target_is_identity() {
        let cube = TriMesh::cuboid(Vec3::new(0.5, 0.5, 0.5));
        let (_, scale) = rescale_mesh(&cube, Vec3::new(1.0, 1.0, 1.0)).unwrap();
        assert!((scale - Vec3::new(1.0, 1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn rescaling_twice_is_idempotent() {
        let cube = TriMesh::cuboid(Vec3::new(0.3, 0.7, 0.2));
        let target = Vec3::new(1.4, 0.5, 2.0);
        let (once, _) = rescale_mesh(&cube, target).unwrap();
        let (twice, second_scale) = rescale_mesh(&once, target).unwrap();
        assert!((second_scale - Vec3::new(1.0, 1.0, 1.0)).norm() < 1e-9);
        for (a, b) in once.vertices.iter().zip(&twice.vertices) {
            assert!((*a - *b).norm() < 1e-9);
        }
    }

    #[test]
    fn flat_mesh_is_rejected() {
        let flat = TriMesh::new(
            vec![Vec3::ZERO, Vec3::X, Vec3::Y],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            rescale_mesh(&flat, Vec3::new(1.0, 1.0, 1.0)),
            Err(RetrievalError::ZeroExtent { axis: 2 })
        ));
    }
}
