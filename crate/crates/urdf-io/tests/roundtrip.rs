//! Corpus-driven round-trip and error-class coverage for the URDF parser and
//! emitter.

use kinematics_core::{quat_geodesic, MeshRef, ModelError, UrdfModel};
use std::fs;
use std::path::PathBuf;
use urdf_io::{emit_urdf, parse_urdf, UrdfError};

fn corpus_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(kind)
}

fn corpus(kind: &str) -> Vec<(String, String)> {
    let mut files: Vec<_> = fs::read_dir(corpus_dir(kind))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "urdf"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(p).unwrap()))
        .collect()
}

/// Field-by-field comparison with a numeric tolerance; names, kinds, and
/// ordering must match exactly.
fn structurally_eq(a: &UrdfModel, b: &UrdfModel, tol: f64) -> bool {
    if a.name != b.name || a.links().len() != b.links().len() || a.joints().len() != b.joints().len()
    {
        return false;
    }
    for (la, lb) in a.links().iter().zip(b.links()) {
        if la.name != lb.name {
            return false;
        }
        match (&la.mesh, &lb.mesh) {
            (None, None) => {}
            (Some(MeshRef::Path(pa)), Some(MeshRef::Path(pb))) if pa == pb => {}
            _ => return false,
        }
        if (la.mesh_scale - lb.mesh_scale).norm() > tol {
            return false;
        }
        if (la.visual_origin.position - lb.visual_origin.position).norm() > tol
            || quat_geodesic(la.visual_origin.orientation, lb.visual_origin.orientation) > 1e-7
        {
            return false;
        }
    }
    for (ja, jb) in a.joints().iter().zip(b.joints()) {
        if ja.name != jb.name || ja.kind != jb.kind || ja.parent != jb.parent || ja.child != jb.child
        {
            return false;
        }
        if (ja.origin.position - jb.origin.position).norm() > tol
            || quat_geodesic(ja.origin.orientation, jb.origin.orientation) > 1e-7
        {
            return false;
        }
        if ja.kind.is_movable() {
            if (ja.axis - jb.axis).norm() > tol {
                return false;
            }
            let (la, lb) = (ja.limit.unwrap(), jb.limit.unwrap());
            if (la.lower - lb.lower).abs() > tol || (la.upper - lb.upper).abs() > tol {
                return false;
            }
        }
    }
    true
}

#[test]
fn corpus_has_twenty_valid_files() {
    assert_eq!(corpus("valid").len(), 20);
}

#[test]
fn parse_emit_parse_is_structural_fixed_point() {
    for (name, text) in corpus("valid") {
        let first = parse_urdf(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let emitted = emit_urdf(&first);
        let second = parse_urdf(&emitted).unwrap_or_else(|e| panic!("{name} after emit: {e}"));
        assert!(structurally_eq(&first, &second, 1e-9), "{name} drifted:\n{emitted}");
    }
}

#[test]
fn second_emit_is_byte_identical() {
    for (name, text) in corpus("valid") {
        let first = emit_urdf(&parse_urdf(&text).unwrap());
        let second = emit_urdf(&parse_urdf(&first).unwrap());
        assert_eq!(first, second, "{name} not a fixed point");
    }
}

#[test]
fn invalid_corpus_raises_distinct_errors() {
    let mut seen = Vec::new();
    for (name, text) in corpus("invalid") {
        let err = parse_urdf(&text)
            .map(|_| ())
            .expect_err(&format!("{name} unexpectedly parsed"));
        let class = match (name.as_str(), &err) {
            ("syntax.urdf", UrdfError::MalformedXml(_)) => "syntax",
            ("cycle.urdf", UrdfError::Model(ModelError::Cycle(_))) => "cycle",
            ("self_loop.urdf", UrdfError::Model(ModelError::Cycle(_))) => "self_loop",
            ("duplicate_link.urdf", UrdfError::Model(ModelError::DuplicateLinkName(_))) => {
                "duplicate"
            }
            ("dangling.urdf", UrdfError::Model(ModelError::DanglingReference { .. })) => "dangling",
            ("two_parent.urdf", UrdfError::Model(ModelError::MultipleParents { .. })) => {
                "two_parent"
            }
            ("unknown_type.urdf", UrdfError::UnknownJointType(_)) => "unknown_type",
            ("missing_limit.urdf", UrdfError::MissingLimit(_)) => "missing_limit",
            ("multiple_roots.urdf", UrdfError::Model(ModelError::MultipleRoots(_))) => {
                "multiple_roots"
            }
            (n, e) => panic!("{n} raised unexpected error {e:?}"),
        };
        seen.push(class);
    }
    assert_eq!(seen.len(), 9);
}
