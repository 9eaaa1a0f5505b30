//! Pipeline-level behavior: bundle layout, optionality of evaluation, replay
//! determinism, and the text-modality rescale contract.

mod common;

use common::repo_fixtures;
use orchestrator::agent::Script;
use orchestrator::loops::{LoopConfig, Modality};
use orchestrator::pipeline::{run_pipeline, PipelineInput, PipelineOptions};
use retrieval::AssetLibrary;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

fn video_script(object: &str) -> Script {
    let text = fs::read_to_string(
        repo_fixtures().join("scripts").join(format!("{object}_video.json")),
    )
    .unwrap();
    serde_json::from_str(&text).unwrap()
}

fn make_input_frames(object: &str, out: &Path) {
    let gt = repo_fixtures().join("gt").join(object);
    let urdf = gt.join("model.urdf");
    let model = urdf_io::parse_urdf(&fs::read_to_string(&urdf).unwrap()).unwrap();
    let meshes = urdf_io::load_link_meshes(&model, &gt).unwrap();
    let joint = model.joints().iter().find(|j| j.kind.is_movable()).unwrap();
    let frames = orchestrator::render::render_sweep(
        &model,
        &meshes,
        &joint.name,
        6,
        &orchestrator::render::RenderConfig::default(),
    )
    .unwrap();
    fs::create_dir_all(out).unwrap();
    for (i, frame) in frames.iter().enumerate() {
        fs::write(
            out.join(format!("frame_{i:03}.png")),
            orchestrator::render::png_bytes(frame),
        )
        .unwrap();
    }
    fs::copy(gt.join("embedding.json"), out.join("embedding.json")).unwrap();
}

fn video_options(gt: Option<&Path>) -> PipelineOptions {
    PipelineOptions {
        loop_cfg: LoopConfig { modality: Modality::Video, ..LoopConfig::default() },
        gt_urdf: gt.map(Path::to_path_buf),
        ..PipelineOptions::default()
    }
}

#[test]
fn bundle_without_ground_truth_omits_the_eval_report() {
    let dir = tempfile::tempdir().unwrap();
    let input_dir = dir.path().join("input");
    make_input_frames("laptop", &input_dir);

    let library = AssetLibrary::load(&repo_fixtures().join("library/manifest.json")).unwrap();
    let mut agents = common::scripted_agents(&video_script("laptop"));
    let out = dir.path().join("bundle");
    let manifest = run_pipeline(
        &PipelineInput::Video(input_dir),
        &library,
        &mut agents,
        &video_options(None),
        &out,
    )
    .unwrap();

    assert!(manifest.success);
    assert!(out.join("model.urdf").exists());
    assert!(out.join("program.art").exists());
    assert!(out.join("renders/final_shaded.png").exists());
    assert!(!out.join("eval_report.json").exists());
    let eval_stage = manifest.stages.iter().find(|s| s.name == "eval").unwrap();
    assert_eq!(eval_stage.status, "skipped");
}

#[test]
fn replayed_runs_produce_byte_identical_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let input_dir = dir.path().join("input");
    make_input_frames("box_lid", &input_dir);
    let library = AssetLibrary::load(&repo_fixtures().join("library/manifest.json")).unwrap();
    let gt = repo_fixtures().join("gt/box_lid/model.urdf");

    let run = |out: &Path| {
        let mut agents = common::scripted_agents(&video_script("box_lid"));
        run_pipeline(
            &PipelineInput::Video(input_dir.clone()),
            &library,
            &mut agents,
            &video_options(Some(&gt)),
            out,
        )
        .unwrap()
    };
    let out_a = dir.path().join("bundle_a");
    let out_b = dir.path().join("bundle_b");
    assert!(run(&out_a).success);
    assert!(run(&out_b).success);

    let mut files_a = BTreeMap::new();
    walk(&out_a, &out_a, &mut files_a);
    let mut files_b = BTreeMap::new();
    walk(&out_b, &out_b, &mut files_b);
    assert_eq!(
        files_a.keys().collect::<Vec<_>>(),
        files_b.keys().collect::<Vec<_>>(),
        "bundle layouts differ"
    );
    for (name, bytes_a) in &files_a {
        assert_eq!(bytes_a, &files_b[name], "{name} differs between runs");
    }
    assert!(files_a.len() >= 10, "bundle unexpectedly small: {}", files_a.len());
}

fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            walk(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).unwrap().display().to_string();
            out.insert(rel, fs::read(&path).unwrap());
        }
    }
}

#[test]
fn text_run_rescales_retrieved_parts_to_planned_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let library = AssetLibrary::load(&repo_fixtures().join("library/manifest.json")).unwrap();
    let script_text =
        fs::read_to_string(repo_fixtures().join("scripts/text_demo.json")).unwrap();
    let script: Script = serde_json::from_str(&script_text).unwrap();
    let mut agents = common::scripted_agents(&script);

    let opts = PipelineOptions {
        loop_cfg: LoopConfig { modality: Modality::Text, ..LoopConfig::default() },
        embedding_cache: Some(repo_fixtures().join("queries.json")),
        ..PipelineOptions::default()
    };
    let out = dir.path().join("bundle");
    let manifest = run_pipeline(
        &PipelineInput::Text("a small cabinet with one sliding drawer".into()),
        &library,
        &mut agents,
        &opts,
        &out,
    )
    .unwrap();
    assert!(manifest.success, "stages: {:?}", manifest.stages);

    // The planner dims equal the library extents in this script, so the baked
    // meshes must reproduce them exactly.
    let planner: serde_json::Value = {
        let script: serde_json::Value = serde_json::from_str(&script_text).unwrap();
        serde_json::from_str(script["responses"]["layout_planner"][0].as_str().unwrap()).unwrap()
    };
    for part in planner["parts"].as_array().unwrap() {
        let name = part["name"].as_str().unwrap();
        let dims = part["dimensions"].as_array().unwrap();
        let mesh = urdf_io::parse_obj(
            &fs::read_to_string(out.join("meshes").join(format!("{name}.obj"))).unwrap(),
        )
        .unwrap();
        let extents = mesh.aabb().unwrap().extents();
        for (axis, extent) in [extents.x, extents.y, extents.z].into_iter().enumerate() {
            let want = dims[axis].as_f64().unwrap();
            assert!(
                (extent - want).abs() < 1e-9,
                "{name} axis {axis}: extent {extent} vs planned {want}"
            );
        }
    }
}

#[test]
fn failed_stage_leaves_a_partial_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let input_dir = dir.path().join("input");
    make_input_frames("laptop", &input_dir);
    let library = AssetLibrary::load(&repo_fixtures().join("library/manifest.json")).unwrap();

    // Selector picks an id that does not exist: retrieval fails, intake is
    // already recorded, and the manifest lands on disk with the failure.
    let mut script = video_script("laptop");
    script.responses.insert("selector".into(), vec!["no_such_object".into()]);
    let mut agents = common::scripted_agents(&script);

    let out = dir.path().join("bundle");
    let manifest = run_pipeline(
        &PipelineInput::Video(input_dir),
        &library,
        &mut agents,
        &video_options(None),
        &out,
    )
    .unwrap();
    assert!(!manifest.success);
    assert_eq!(manifest.stages[0].name, "intake");
    assert_eq!(manifest.stages[0].status, "ok");
    let failed = manifest.stages.iter().find(|s| s.status == "failed").unwrap();
    assert_eq!(failed.name, "retrieval");
    assert!(out.join("manifest.json").exists());
}

#[test]
fn targeted_affordance_records_the_chosen_link() {
    let dir = tempfile::tempdir().unwrap();
    let input_dir = dir.path().join("input");
    make_input_frames("cabinet_drawer", &input_dir);
    let library = AssetLibrary::load(&repo_fixtures().join("library/manifest.json")).unwrap();
    let mut agents = common::scripted_agents(&video_script("cabinet_drawer"));

    let mut opts = video_options(Some(&repo_fixtures().join("gt/cabinet_drawer/model.urdf")));
    opts.target_affordance = true;
    let out = dir.path().join("bundle");
    let manifest = run_pipeline(
        &PipelineInput::Video(input_dir),
        &library,
        &mut agents,
        &opts,
        &out,
    )
    .unwrap();
    assert!(manifest.success, "stages: {:?}", manifest.stages);
    let target = fs::read_to_string(out.join("target_affordance.txt")).unwrap();
    assert_eq!(target.trim(), "drawer");
}
