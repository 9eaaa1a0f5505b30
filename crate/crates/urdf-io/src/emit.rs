use crate::rpy::quat_to_rpy;
use kinematics_core::{JointKind, MeshRef, Pose, UrdfModel, Vec3};
use std::fmt::Write;

/// Prints a real with 9 decimal places, trailing zeros trimmed, so emission
/// is platform-deterministic. `-0` collapses to `0`.
pub fn fmt_real(x: f64) -> String {
    let mut s = format!("{x:.9}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn fmt_vec(v: Vec3) -> String {
    format!("{} {} {}", fmt_real(v.x), fmt_real(v.y), fmt_real(v.z))
}

fn fmt_origin(pose: Pose) -> String {
    let (r, p, y) = quat_to_rpy(pose.orientation);
    format!(
        "xyz=\"{}\" rpy=\"{} {} {}\"",
        fmt_vec(pose.position),
        fmt_real(r),
        fmt_real(p),
        fmt_real(y)
    )
}

/// Serializes a model to URDF XML. Output is deterministic: links then joints,
/// each in insertion order, with the formatting of [`fmt_real`].
///
/// Links whose mesh is inline (not a file reference) are emitted without a
/// `<visual>` element; persist such meshes to OBJ files first if the geometry
/// must survive the round trip.
pub fn emit_urdf(model: &UrdfModel) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\"?>\n");
    let _ = writeln!(out, "<robot name=\"{}\">", model.name);

    for link in model.links() {
        let _ = writeln!(out, "  <link name=\"{}\">", link.name);
        if let Some(MeshRef::Path(path)) = &link.mesh {
            out.push_str("    <visual>\n");
            let _ = writeln!(out, "      <origin {}/>", fmt_origin(link.visual_origin));
            out.push_str("      <geometry>\n");
            let _ = writeln!(
                out,
                "        <mesh filename=\"{}\" scale=\"{}\"/>",
                path,
                fmt_vec(link.mesh_scale)
            );
            out.push_str("      </geometry>\n");
            out.push_str("    </visual>\n");
        }
        out.push_str("  </link>\n");
    }

    for joint in model.joints() {
        let _ = writeln!(out, "  <joint name=\"{}\" type=\"{}\">", joint.name, joint.kind.as_str());
        let _ = writeln!(out, "    <origin {}/>", fmt_origin(joint.origin));
        let _ = writeln!(out, "    <parent link=\"{}\"/>", joint.parent);
        let _ = writeln!(out, "    <child link=\"{}\"/>", joint.child);
        if joint.kind != JointKind::Fixed {
            let _ = writeln!(out, "    <axis xyz=\"{}\"/>", fmt_vec(joint.axis));
            if let Some(limit) = joint.limit {
                let _ = writeln!(
                    out,
                    "    <limit lower=\"{}\" upper=\"{}\" effort=\"100\" velocity=\"100\"/>",
                    fmt_real(limit.lower),
                    fmt_real(limit.upper)
                );
            }
        }
        out.push_str("  </joint>\n");
    }

    out.push_str("</robot>\n");
    out
}
