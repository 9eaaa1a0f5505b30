//! Program-corpus compilation: golden URDF bytes, FK behavior of compiled
//! joints, default composition, placement tightness, and determinism.

use artlang::{
    collide, compile, parse_artlang, place_with_collision, pretty_print, AxisDir, FsResolver,
    PlaceStmt, PosedMesh, SourceLoc,
};
use kinematics_core::{forward_kinematics, JointKind, MeshRef, TriMesh, UrdfModel, Vec3};
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use urdf_io::{emit_urdf, load_link_meshes, parse_obj};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn program_files() -> Vec<PathBuf> {
    let mut files: Vec<_> = fs::read_dir(fixtures().join("programs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "art"))
        .collect();
    files.sort();
    files
}

fn compile_fixture(name: &str) -> UrdfModel {
    let text = fs::read_to_string(fixtures().join("programs").join(name)).unwrap();
    let program = parse_artlang(&text).unwrap();
    let resolver = FsResolver { base_dir: fixtures().join("meshes") };
    compile(&program, &resolver).unwrap().0
}

#[test]
fn pretty_print_corpus_is_fixed_point() {
    let files = program_files();
    assert_eq!(files.len(), 15);
    for path in files {
        let text = fs::read_to_string(&path).unwrap();
        let once = pretty_print(&parse_artlang(&text).unwrap());
        let twice = pretty_print(&parse_artlang(&once).unwrap());
        assert_eq!(once, twice, "{path:?}");
    }
}

#[test]
fn golden_corpus_compiles_byte_identically() {
    let resolver = FsResolver { base_dir: fixtures().join("meshes") };
    let update = std::env::var_os("UPDATE_GOLDENS").is_some();
    let mut checked = 0;
    for path in program_files() {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        // Goldens cover the compilable corpus p01..p10; p11+ exercise the
        // parser only.
        if name >= "p11".to_string() {
            continue;
        }
        let program = parse_artlang(&fs::read_to_string(&path).unwrap()).unwrap();
        let (model, _) = compile(&program, &resolver).unwrap();
        let emitted = emit_urdf(&model);
        let golden_path = fixtures().join("goldens").join(format!("{name}.urdf"));
        if update {
            fs::write(&golden_path, &emitted).unwrap();
        }
        let golden = fs::read_to_string(&golden_path)
            .unwrap_or_else(|_| panic!("missing golden {golden_path:?}; run with UPDATE_GOLDENS=1"));
        assert_eq!(emitted, golden, "{name} drifted from its golden URDF");
        checked += 1;
    }
    assert_eq!(checked, 10);
}

#[test]
fn compilation_is_deterministic() {
    for name in ["p01_cabinet_drawer.art", "p08_handle.art", "p09_two_drawers.art"] {
        let a = emit_urdf(&compile_fixture(name));
        let b = emit_urdf(&compile_fixture(name));
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn cabinet_drawer_slides_by_its_range_along_the_global_axis() {
    let model = compile_fixture("p01_cabinet_drawer.art");
    let joint = model.joint_to("drawer").unwrap();
    assert_eq!(joint.kind, JointKind::Prismatic);
    let limit = joint.limit.unwrap();

    let at_lower =
        forward_kinematics(&model, &BTreeMap::from([(joint.name.clone(), limit.lower)])).unwrap();
    let at_upper =
        forward_kinematics(&model, &BTreeMap::from([(joint.name.clone(), limit.upper)])).unwrap();
    let displacement = at_upper["drawer"].position - at_lower["drawer"].position;
    let expected = Vec3::new(0.0, 1.0, 0.0) * limit.range();
    assert!((displacement - expected).norm() < 1e-9, "drawer moved {displacement:?}");
}

#[test]
fn decls_only_program_stacks_fixed_parts() {
    let model = compile_fixture("p03_decls_only.art");
    assert_eq!(model.links().len(), 3);
    assert_eq!(model.joints().len(), 2);
    assert!(model.joints().iter().all(|j| j.kind == JointKind::Fixed));

    // Collision snapping stacks the identical cubes upward from the root.
    let poses = forward_kinematics(&model, &BTreeMap::new()).unwrap();
    let z = |l: &str| poses[l].compose(model.link(l).unwrap().visual_origin).position.z;
    assert!(z("base").abs() < 1e-12);
    assert!((z("middle") - 1.0).abs() < 2e-4);
    assert!((z("top") - 2.0).abs() < 4e-4);
}

#[test]
fn compiled_assemblies_have_no_placed_pair_collisions() {
    let resolver_dir = fixtures().join("meshes");
    for path in program_files() {
        let name = path.file_stem().unwrap().to_string_lossy().into_owned();
        if name >= "p11".to_string() {
            continue;
        }
        let model = compile_fixture(path.file_name().unwrap().to_str().unwrap());
        let meshes = load_link_meshes(&model, &resolver_dir).unwrap();
        let poses = forward_kinematics(&model, &BTreeMap::new()).unwrap();
        let posed: Vec<PosedMesh> = model
            .links()
            .iter()
            .map(|l| {
                PosedMesh::new(
                    l.name.clone(),
                    meshes[&l.name].scaled(l.mesh_scale),
                    poses[&l.name].compose(l.visual_origin),
                )
            })
            .collect();
        for a in 0..posed.len() {
            for b in a + 1..posed.len() {
                assert!(
                    !collide(&posed[a], &posed[b]),
                    "{name}: {} intersects {}",
                    posed[a].name,
                    posed[b].name
                );
            }
        }
    }
}

#[test]
fn lshape_parent_nests_child_below_naive_bounds_contact() {
    let meshes = fixtures().join("meshes");
    let lshape = parse_obj(&fs::read_to_string(meshes.join("lshape.obj")).unwrap()).unwrap();
    let child = TriMesh::cuboid(Vec3::new(0.2, 0.2, 0.45));

    let assembly = vec![PosedMesh::new("lshape", lshape, kinematics_core::Pose::IDENTITY)];
    let stmt = PlaceStmt {
        child: "block".into(),
        parent: "lshape".into(),
        axis: AxisDir::PosZ,
        lateral_offset: Vec3::new(-0.1, 0.0, 0.0),
        clearance: 0.0,
        loc: SourceLoc { line: 1, col: 1 },
    };
    let outcome = place_with_collision(&child, &assembly, &stmt).unwrap();

    // Resting on the notch floor (z = 0.2), well under the wall top (z = 1.0)
    // where bounding-box contact would put it.
    let bottom = outcome.pose.position.z - 0.45;
    assert!((bottom - 0.2).abs() < 2e-4, "bottom at {bottom}");

    let placed = PosedMesh::new("block", child, outcome.pose);
    assert!(!collide(&placed, &assembly[0]));
}

#[test]
fn unresolvable_mesh_reports_statement_location() {
    let program = parse_artlang("part a \"missing.obj\";\n").unwrap();
    let resolver = FsResolver { base_dir: fixtures().join("meshes") };
    let err = compile(&program, &resolver).unwrap_err();
    assert_eq!(err.loc.map(|l| l.line), Some(1));
}

#[test]
fn emitted_mesh_refs_match_declarations() {
    let model = compile_fixture("p01_cabinet_drawer.art");
    match &model.link("drawer").unwrap().mesh {
        Some(MeshRef::Path(p)) => assert_eq!(p, "drawer.obj"),
        other => panic!("unexpected mesh ref {other:?}"),
    }
}
