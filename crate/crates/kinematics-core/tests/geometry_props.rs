//! Property tests for sampling, bounds, and quaternion distance.

use kinematics_core::oracles::point_triangle_distance;
use kinematics_core::{aabb_of, quat_geodesic, sample_surface, Pose, TriMesh, UnitQuat, Vec3};
use proptest::prelude::*;

fn vec3_strategy(range: f64) -> impl Strategy<Value = Vec3> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn quat_strategy() -> impl Strategy<Value = UnitQuat> {
    (vec3_strategy(1.0), -3.1..3.1)
        .prop_filter("axis", |(v, _)| v.norm() > 1e-3)
        .prop_map(|(v, a)| UnitQuat::from_axis_angle(v, a).unwrap())
}

proptest! {
    #[test]
    fn geodesic_symmetric_and_bounded(a in quat_strategy(), b in quat_strategy()) {
        let d1 = quat_geodesic(a, b);
        let d2 = quat_geodesic(b, a);
        prop_assert!((d1 - d2).abs() < 1e-12);
        prop_assert!((0.0..=std::f64::consts::PI + 1e-12).contains(&d1));
        // arccos near 1 cannot resolve below ~2·sqrt(2·eps) ≈ 4e-8.
        prop_assert!(quat_geodesic(a, a) < 1e-7);
    }

    #[test]
    fn union_bounds_contain_parts(
        va in proptest::collection::vec(vec3_strategy(5.0), 3..20),
        vb in proptest::collection::vec(vec3_strategy(5.0), 3..20),
    ) {
        let tris_a: Vec<[usize; 3]> = (0..va.len() - 2).map(|i| [i, i + 1, i + 2]).collect();
        let tris_b: Vec<[usize; 3]> = (0..vb.len() - 2).map(|i| [i, i + 1, i + 2]).collect();
        let a = TriMesh::new(va.clone(), tris_a).unwrap();
        let b = TriMesh::new(vb.clone(), tris_b).unwrap();

        let mut verts = va;
        let offset = verts.len();
        verts.extend(vb);
        let mut tris: Vec<[usize; 3]> = a.triangles.clone();
        tris.extend(b.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
        let union = TriMesh::new(verts, tris).unwrap();

        let bu = aabb_of(&union, Pose::IDENTITY).unwrap();
        for part in [&a, &b] {
            let bp = aabb_of(part, Pose::IDENTITY).unwrap();
            prop_assert!(bu.contains(bp.min) && bu.contains(bp.max));
        }
    }
}

#[test]
fn sampled_points_lie_on_some_triangle() {
    let mesh = TriMesh::new(
        vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.2),
            Vec3::new(0.3, 1.0, -0.4),
            Vec3::new(-0.5, 0.4, 0.9),
            Vec3::new(0.8, 0.9, 0.7),
        ],
        vec![[0, 1, 2], [0, 2, 3], [1, 2, 4]],
    )
    .unwrap();
    let cloud = sample_surface(&mesh, 2000, 99).unwrap();
    assert_eq!(cloud.len(), 2000);
    for &p in &cloud.points {
        let d = (0..mesh.triangles.len())
            .map(|t| point_triangle_distance(p, mesh.triangle(t)))
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-7, "point {p:?} off-surface by {d}");
    }
}
