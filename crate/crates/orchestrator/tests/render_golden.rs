//! Golden-image checks for the built-in rasterizer over the fixture models,
//! and the external renderer hook contract.

mod common;

use common::repo_fixtures;
use orchestrator::render::{png_bytes, render_external, render_model, CameraPreset, RenderConfig};
use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use urdf_io::{load_link_meshes, parse_urdf};

const FIXTURE_MODELS: [&str; 5] =
    ["box_lid", "cabinet_door", "cabinet_drawer", "laptop", "sliding_window"];

fn goldens_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/goldens")
}

#[test]
fn fixture_renders_match_goldens_byte_for_byte() {
    let update = std::env::var_os("UPDATE_GOLDENS").is_some();
    fs::create_dir_all(goldens_dir()).unwrap();
    for name in FIXTURE_MODELS {
        let urdf = repo_fixtures().join("gt").join(name).join("model.urdf");
        let model = parse_urdf(&fs::read_to_string(&urdf).unwrap()).unwrap();
        let meshes = load_link_meshes(&model, urdf.parent().unwrap()).unwrap();
        let cfg = RenderConfig::default();

        let first = png_bytes(&render_model(&model, &meshes, &BTreeMap::new(), &cfg).unwrap());
        let second = png_bytes(&render_model(&model, &meshes, &BTreeMap::new(), &cfg).unwrap());
        assert_eq!(first, second, "{name}: nondeterministic pixels");

        let golden_path = goldens_dir().join(format!("render_{name}.png"));
        if update {
            fs::write(&golden_path, &first).unwrap();
        }
        let golden = fs::read(&golden_path)
            .unwrap_or_else(|_| panic!("missing golden {golden_path:?}; run with UPDATE_GOLDENS=1"));
        assert_eq!(first, golden, "{name} drifted from its golden render");
    }
}

#[test]
fn camera_presets_produce_distinct_views() {
    let urdf = repo_fixtures().join("gt/laptop/model.urdf");
    let model = parse_urdf(&fs::read_to_string(&urdf).unwrap()).unwrap();
    let meshes = load_link_meshes(&model, urdf.parent().unwrap()).unwrap();
    let mut seen = Vec::new();
    for camera in [CameraPreset::Front, CameraPreset::Side, CameraPreset::Top, CameraPreset::Iso] {
        let cfg = RenderConfig { camera, ..RenderConfig::default() };
        let bytes = png_bytes(&render_model(&model, &meshes, &BTreeMap::new(), &cfg).unwrap());
        assert!(!seen.contains(&bytes), "{} duplicates a previous view", camera.name());
        seen.push(bytes);
    }
}

#[cfg(unix)]
#[test]
fn external_renderer_hook_runs_and_validates() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("fake_renderer.sh");
    // Contract: (urdf, joints file, camera, output) appended to the command.
    fs::write(&script, "#!/bin/sh\n[ -f \"$1\" ] || exit 4\nprintf 'png' > \"$4\"\n").unwrap();
    fs::set_permissions(&script, fs::Permissions::from_mode(0o755)).unwrap();

    let urdf = repo_fixtures().join("gt/laptop/model.urdf");
    let joints = dir.path().join("joints.json");
    fs::write(&joints, "{}").unwrap();
    let out = dir.path().join("out.png");

    render_external(
        &["/bin/sh".into(), script.display().to_string()],
        &urdf,
        &joints,
        CameraPreset::Front,
        &out,
    )
    .unwrap();
    assert_eq!(fs::read(&out).unwrap(), b"png");

    // Non-zero exit propagates.
    let failing = dir.path().join("failing.sh");
    fs::write(&failing, "#!/bin/sh\nexit 3\n").unwrap();
    fs::set_permissions(&failing, fs::Permissions::from_mode(0o755)).unwrap();
    let err = render_external(
        &["/bin/sh".into(), failing.display().to_string()],
        &urdf,
        &joints,
        CameraPreset::Front,
        &dir.path().join("none.png"),
    )
    .unwrap_err();
    assert!(matches!(err, orchestrator::render::RenderError::ExternalFailed(3)));
}
