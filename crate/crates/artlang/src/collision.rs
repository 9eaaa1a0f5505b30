use kinematics_core::{Aabb, Pose, TriMesh, Vec3};

/// A mesh together with its world pose; the unit placement and collision
/// queries operate on.
#[derive(Debug, Clone)]
pub struct PosedMesh {
    pub name: String,
    pub mesh: TriMesh,
    pub pose: Pose,
}

impl PosedMesh {
    pub fn new(name: impl Into<String>, mesh: TriMesh, pose: Pose) -> Self {
        Self { name: name.into(), mesh, pose }
    }

    fn world_vertices(&self) -> Vec<Vec3> {
        self.mesh.vertices.iter().map(|&v| self.pose.transform_point(v)).collect()
    }
}

const EPS: f64 = 1e-12;

/// Triangle–triangle intersection (touching counts as intersecting).
/// Interval test on the plane-intersection line, with a 2D overlap test for
/// the coplanar case.
pub fn tri_tri_intersects(a: [Vec3; 3], b: [Vec3; 3]) -> bool {
    let n_b = (b[1] - b[0]).cross(b[2] - b[0]);
    let d_b = -n_b.dot(b[0]);
    let mut dist_a = [0.0; 3];
    for (i, v) in a.iter().enumerate() {
        let d = n_b.dot(*v) + d_b;
        dist_a[i] = if d.abs() < EPS { 0.0 } else { d };
    }
    if dist_a.iter().all(|&d| d > 0.0) || dist_a.iter().all(|&d| d < 0.0) {
        return false;
    }

    let n_a = (a[1] - a[0]).cross(a[2] - a[0]);
    let d_a = -n_a.dot(a[0]);
    let mut dist_b = [0.0; 3];
    for (i, v) in b.iter().enumerate() {
        let d = n_a.dot(*v) + d_a;
        dist_b[i] = if d.abs() < EPS { 0.0 } else { d };
    }
    if dist_b.iter().all(|&d| d > 0.0) || dist_b.iter().all(|&d| d < 0.0) {
        return false;
    }

    if dist_a == [0.0; 3] && dist_b == [0.0; 3] {
        return coplanar_overlap(a, b, n_a);
    }

    // Project onto the dominant axis of the plane-intersection line.
    let line = n_a.cross(n_b);
    let axis = if line.x.abs() >= line.y.abs() && line.x.abs() >= line.z.abs() {
        0
    } else if line.y.abs() >= line.z.abs() {
        1
    } else {
        2
    };
    let proj_a = [a[0].component(axis), a[1].component(axis), a[2].component(axis)];
    let proj_b = [b[0].component(axis), b[1].component(axis), b[2].component(axis)];

    let Some((a_lo, a_hi)) = interval(proj_a, dist_a) else {
        // Degenerate: one triangle lies in the other's plane.
        return coplanar_overlap(a, b, if dist_a == [0.0; 3] { n_b } else { n_a });
    };
    let Some((b_lo, b_hi)) = interval(proj_b, dist_b) else {
        return coplanar_overlap(a, b, if dist_b == [0.0; 3] { n_a } else { n_b });
    };
    a_lo.max(b_lo) <= a_hi.min(b_hi)
}

/// Interval of a triangle on the intersection line: the crossing points of
/// the two edges that span the other plane. `None` if the triangle lies in
/// the plane.
fn interval(proj: [f64; 3], dist: [f64; 3]) -> Option<(f64, f64)> {
    let cross = |i: usize, j: usize| -> f64 {
        proj[i] + (proj[j] - proj[i]) * dist[i] / (dist[i] - dist[j])
    };
    // Pick the vertex that is alone on its side of the plane.
    let (alone, o1, o2) = if dist[0] * dist[1] > 0.0 {
        (2, 0, 1)
    } else if dist[0] * dist[2] > 0.0 {
        (1, 0, 2)
    } else if dist[1] * dist[2] > 0.0 || dist[0] != 0.0 {
        (0, 1, 2)
    } else if dist[1] != 0.0 {
        (1, 0, 2)
    } else if dist[2] != 0.0 {
        (2, 0, 1)
    } else {
        return None;
    };
    // Edges from `alone` to the others cross (or touch) the plane. A zero
    // distance at the far vertex pins the crossing at that vertex.
    let t1 = if dist[alone] == dist[o1] { proj[o1] } else { cross(alone, o1) };
    let t2 = if dist[alone] == dist[o2] { proj[o2] } else { cross(alone, o2) };
    Some((t1.min(t2), t1.max(t2)))
}

fn coplanar_overlap(a: [Vec3; 3], b: [Vec3; 3], normal: Vec3) -> bool {
    // Drop the dominant normal axis to get a well-conditioned 2D projection.
    let n = Vec3::new(normal.x.abs(), normal.y.abs(), normal.z.abs());
    let (i, j) = if n.x >= n.y && n.x >= n.z {
        (1, 2)
    } else if n.y >= n.z {
        (0, 2)
    } else {
        (0, 1)
    };
    let pa: Vec<[f64; 2]> = a.iter().map(|v| [v.component(i), v.component(j)]).collect();
    let pb: Vec<[f64; 2]> = b.iter().map(|v| [v.component(i), v.component(j)]).collect();

    for e1 in 0..3 {
        for e2 in 0..3 {
            if segments_intersect_2d(pa[e1], pa[(e1 + 1) % 3], pb[e2], pb[(e2 + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_tri_2d(pa[0], &pb) || point_in_tri_2d(pb[0], &pa)
}

fn orient_2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment_2d(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) - EPS
        && p[0] <= a[0].max(b[0]) + EPS
        && p[1] >= a[1].min(b[1]) - EPS
        && p[1] <= a[1].max(b[1]) + EPS
}

fn segments_intersect_2d(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient_2d(q1, q2, p1);
    let d2 = orient_2d(q1, q2, p2);
    let d3 = orient_2d(p1, p2, q1);
    let d4 = orient_2d(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1.abs() < EPS && on_segment_2d(q1, q2, p1))
        || (d2.abs() < EPS && on_segment_2d(q1, q2, p2))
        || (d3.abs() < EPS && on_segment_2d(p1, p2, q1))
        || (d4.abs() < EPS && on_segment_2d(p1, p2, q2))
}

fn point_in_tri_2d(p: [f64; 2], tri: &[[f64; 2]]) -> bool {
    let d0 = orient_2d(tri[0], tri[1], p);
    let d1 = orient_2d(tri[1], tri[2], p);
    let d2 = orient_2d(tri[2], tri[0], p);
    let has_neg = d0 < -EPS || d1 < -EPS || d2 < -EPS;
    let has_pos = d0 > EPS || d1 > EPS || d2 > EPS;
    !(has_neg && has_pos)
}

/// True iff any triangle of `a` intersects any triangle of `b`.
/// Broad phase: whole-mesh and per-triangle bounds; narrow phase:
/// [`tri_tri_intersects`]. The broad phase never changes the answer.
pub fn collide(a: &PosedMesh, b: &PosedMesh) -> bool {
    if a.mesh.is_empty() || b.mesh.is_empty() {
        return false;
    }
    let va = a.world_vertices();
    let vb = b.world_vertices();
    let bounds_a = Aabb::from_points(va.iter().copied()).expect("non-empty mesh");
    let bounds_b = Aabb::from_points(vb.iter().copied()).expect("non-empty mesh");
    if !bounds_a.intersects(bounds_b) {
        return false;
    }

    let tri = |verts: &[Vec3], t: &[usize; 3]| [verts[t[0]], verts[t[1]], verts[t[2]]];
    let tri_bounds = |t: &[Vec3; 3]| {
        Aabb::new(t[0].min(t[1]).min(t[2]), t[0].max(t[1]).max(t[2]))
    };

    let tris_b: Vec<([Vec3; 3], Aabb)> = b
        .mesh
        .triangles
        .iter()
        .map(|t| {
            let t = tri(&vb, t);
            (t, tri_bounds(&t))
        })
        .filter(|(_, bb)| bb.intersects(bounds_a))
        .collect();

    for ta in &a.mesh.triangles {
        let ta = tri(&va, ta);
        let ba = tri_bounds(&ta);
        if !ba.intersects(bounds_b) {
            continue;
        }
        for (tb, bb) in &tris_b {
            if ba.intersects(*bb) && tri_tri_intersects(ta, *tb) {
                return true;
            }
        }
    }
    false
}
