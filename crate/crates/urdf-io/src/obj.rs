use crate::UrdfError;
use kinematics_core::{TriMesh, Vec3};

/// Parses the Wavefront OBJ subset: `v` and `f` records. Polygon faces are
/// triangulated by fanning from the first vertex; every other record type is
/// ignored. 1-based (and negative, end-relative) indices become 0-based.
pub fn parse_obj(text: &str) -> Result<TriMesh, UrdfError> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0; 3];
                for c in &mut coords {
                    let field = fields.next().ok_or(UrdfError::ObjBadRecord {
                        line: line_no,
                        text: raw.to_string(),
                    })?;
                    *c = field.parse().map_err(|_| UrdfError::ObjBadRecord {
                        line: line_no,
                        text: raw.to_string(),
                    })?;
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut indices = Vec::new();
                for field in fields {
                    // "7", "7/1", "7//3", "7/1/3" all reference vertex 7.
                    let head = field.split('/').next().unwrap_or("");
                    let idx: i64 = head.parse().map_err(|_| UrdfError::ObjBadRecord {
                        line: line_no,
                        text: raw.to_string(),
                    })?;
                    let resolved = if idx > 0 {
                        idx as usize - 1
                    } else if idx < 0 && vertices.len() as i64 + idx >= 0 {
                        (vertices.len() as i64 + idx) as usize
                    } else {
                        return Err(UrdfError::ObjIndexOutOfRange {
                            line: line_no,
                            index: idx,
                            vertex_count: vertices.len(),
                        });
                    };
                    if resolved >= vertices.len() {
                        return Err(UrdfError::ObjIndexOutOfRange {
                            line: line_no,
                            index: idx,
                            vertex_count: vertices.len(),
                        });
                    }
                    indices.push(resolved);
                }
                if indices.len() < 3 {
                    return Err(UrdfError::ObjShortFace { line: line_no });
                }
                for k in 1..indices.len() - 1 {
                    triangles.push([indices[0], indices[k], indices[k + 1]]);
                }
            }
            _ => {}
        }
    }

    Ok(TriMesh::new(vertices, triangles).expect("indices validated while parsing"))
}

/// Writes a mesh in the same subset `parse_obj` reads.
pub fn emit_obj(mesh: &TriMesh) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(
            out,
            "v {} {} {}",
            crate::emit::fmt_real(v.x),
            crate::emit::fmt_real(v.y),
            crate::emit::fmt_real(v.z)
        );
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
    }
    out
}
