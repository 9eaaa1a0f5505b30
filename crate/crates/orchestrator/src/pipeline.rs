//! The end-to-end pipeline: intake, mesh retrieval (by modality), link
//! placement loop, joint prediction loop (optionally targeted), bundle
//! emission, and optional evaluation against a supplied ground truth.
//!
//! A stage failure never discards completed work: the bundle manifest records
//! per-stage status and the partial bundle stays on disk.

use crate::agent::{AgentRequest, AgentRole, AgentSet, ImageAttachment, Message};
use crate::loops::{run_joint_loop, run_link_loop, LoopConfig, LoopHarness, LoopOutcome, Modality};
use crate::prompts;
use crate::render::{png_bytes, render_model, RenderConfig, RenderMode};
use crate::tasks::{extract_target_affordance, specify_task};
use eval_oracle::{evaluate, match_links_by_chamfer, match_links_by_name, EvalConfig};
use kinematics_core::Vec3;
use retrieval::{
    rescale_mesh, top_k_categories, tournament_select, AssetLibrary, Embedding, PartSpec,
    RetrievalConfig,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;
use urdf_io::{emit_obj, emit_urdf, load_link_meshes, parse_obj, parse_urdf};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot prepare output directory `{0}`: {1}")]
    OutputDir(String, std::io::Error),
    #[error("cannot write bundle manifest: {0}")]
    Manifest(std::io::Error),
}

#[derive(Debug, Clone)]
pub enum PipelineInput {
    Text(String),
    /// Single image file.
    Image(PathBuf),
    /// Directory of ordered frame images.
    Video(PathBuf),
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub loop_cfg: LoopConfig,
    pub retrieval_cfg: RetrievalConfig,
    pub render_cfg: RenderConfig,
    pub eval_cfg: EvalConfig,
    /// Ground-truth URDF to evaluate against, when available.
    pub gt_urdf: Option<PathBuf>,
    /// Match links for evaluation by `name` or by minimal `chamfer`.
    pub eval_matching: String,
    pub target_affordance: bool,
    pub examples: Vec<String>,
    /// Frame budget per agent request for video input.
    pub max_frames: usize,
    /// Cached text-query embeddings (text -> base64 LE f32).
    pub embedding_cache: Option<PathBuf>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            loop_cfg: LoopConfig::default(),
            retrieval_cfg: RetrievalConfig::default(),
            render_cfg: RenderConfig::default(),
            eval_cfg: EvalConfig::default(),
            gt_urdf: None,
            eval_matching: "name".into(),
            target_affordance: false,
            examples: vec![],
            max_frames: 8,
            embedding_cache: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageStatus {
    pub name: String,
    /// "ok" | "failed" | "skipped"
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleManifest {
    pub schema_version: u32,
    pub modality: Modality,
    pub input: String,
    pub stages: Vec<StageStatus>,
    /// Artifact name -> bundle-relative path.
    pub artifacts: BTreeMap<String, String>,
    pub success: bool,
}

pub const BUNDLE_SCHEMA_VERSION: u32 = 1;

struct PlannedPart {
    name: String,
    emit_ref: String,
    dimensions: Vec3,
}

/// Runs the pipeline into `out_dir` (created if needed). Returns the bundle
/// manifest; `success == false` means some stage failed and the bundle is
/// partial.
pub fn run_pipeline(
    input: &PipelineInput,
    library: &AssetLibrary,
    agents: &mut AgentSet,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> Result<BundleManifest, PipelineError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| PipelineError::OutputDir(out_dir.display().to_string(), e))?;
    std::fs::create_dir_all(out_dir.join("meshes"))
        .map_err(|e| PipelineError::OutputDir(out_dir.display().to_string(), e))?;

    let mut manifest = BundleManifest {
        schema_version: BUNDLE_SCHEMA_VERSION,
        modality: opts.loop_cfg.modality,
        input: match input {
            PipelineInput::Text(t) => format!("text:{t}"),
            PipelineInput::Image(p) => format!("image:{}", p.display()),
            PipelineInput::Video(p) => format!("video:{}", p.display()),
        },
        stages: vec![],
        artifacts: BTreeMap::new(),
        success: false,
    };

    let result = drive(input, library, agents, opts, out_dir, &mut manifest);
    manifest.success = result.is_ok();
    if let Err((stage, error)) = result {
        manifest.stages.push(StageStatus {
            name: stage,
            status: "failed".into(),
            error: Some(error),
        });
    }

    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(out_dir.join("manifest.json"), json + "\n").map_err(PipelineError::Manifest)?;
    Ok(manifest)
}

type StageResult<T> = Result<T, (String, String)>;

fn stage_err<E: std::fmt::Display>(stage: &str) -> impl Fn(E) -> (String, String) + '_ {
    move |e| (stage.to_string(), e.to_string())
}

fn drive(
    input: &PipelineInput,
    library: &AssetLibrary,
    agents: &mut AgentSet,
    opts: &PipelineOptions,
    out_dir: &Path,
    manifest: &mut BundleManifest,
) -> StageResult<()> {
    let ok = |manifest: &mut BundleManifest, name: &str| {
        manifest.stages.push(StageStatus { name: name.into(), status: "ok".into(), error: None })
    };

    // -- intake ------------------------------------------------------------
    let (input_text, input_images) = intake(input, opts).map_err(stage_err("intake"))?;
    ok(manifest, "intake");

    // -- retrieval ---------------------------------------------------------
    let parts = match input {
        PipelineInput::Text(prompt) => {
            retrieve_for_text(prompt, library, agents, opts, out_dir)
                .map_err(stage_err("retrieval"))?
        }
        PipelineInput::Image(_) | PipelineInput::Video(_) => retrieve_for_visual(
            input,
            &input_images,
            library,
            agents,
            opts,
            out_dir,
        )
        .map_err(stage_err("retrieval"))?,
    };
    ok(manifest, "retrieval");

    let parts_block: String = parts
        .iter()
        .map(|p| {
            format!(
                "- {}: \"{}\" ({} x {} x {} m)\n",
                p.name,
                p.emit_ref,
                urdf_io::fmt_real(p.dimensions.x),
                urdf_io::fmt_real(p.dimensions.y),
                urdf_io::fmt_real(p.dimensions.z)
            )
        })
        .collect();

    // -- link placement loop -------------------------------------------------
    let resolver = artlang::FsResolver { base_dir: out_dir.to_path_buf() };
    let iterations_dir = out_dir.join("iterations");
    let link_outcome = {
        let mut harness = LoopHarness {
            agents,
            resolver: &resolver,
            bundle_root: out_dir,
            work_dir: &iterations_dir,
            render: opts.render_cfg.clone(),
            examples: opts.examples.clone(),
        };
        run_link_loop(&mut harness, &input_text, &input_images, &parts_block, &opts.loop_cfg)
            .map_err(stage_err("link_loop"))?
    };
    write_loop_log(out_dir, "link_loop.json", &link_outcome).map_err(stage_err("link_loop"))?;
    manifest.artifacts.insert("link_loop_log".into(), "link_loop.json".into());
    ok(manifest, "link_loop");

    // -- targeted affordance (optional) --------------------------------------
    let mut joint_input_text = input_text.clone();
    if opts.target_affordance {
        let meshes =
            load_link_meshes(&link_outcome.model, out_dir).map_err(stage_err("affordance"))?;
        let target = extract_target_affordance(
            &input_images,
            &link_outcome.model,
            &meshes,
            agents,
            &opts.render_cfg,
            &opts.examples,
            3,
        )
        .map_err(stage_err("affordance"))?;
        std::fs::write(out_dir.join("target_affordance.txt"), format!("{target}\n"))
            .map_err(stage_err("affordance"))?;
        manifest
            .artifacts
            .insert("target_affordance".into(), "target_affordance.txt".into());
        joint_input_text = format!(
            "{input_text}\n\nThe moving part is `{target}`. Give exactly that part a movable joint; attach other non-root parts with fixed joints."
        );
        ok(manifest, "affordance");
    }

    // -- joint prediction loop ------------------------------------------------
    let joint_outcome = {
        let mut harness = LoopHarness {
            agents,
            resolver: &resolver,
            bundle_root: out_dir,
            work_dir: &iterations_dir,
            render: opts.render_cfg.clone(),
            examples: opts.examples.clone(),
        };
        run_joint_loop(
            &mut harness,
            &joint_input_text,
            &input_images,
            &link_outcome.program_text,
            &opts.loop_cfg,
        )
        .map_err(stage_err("joint_loop"))?
    };
    write_loop_log(out_dir, "joint_loop.json", &joint_outcome).map_err(stage_err("joint_loop"))?;
    manifest.artifacts.insert("joint_loop_log".into(), "joint_loop.json".into());
    ok(manifest, "joint_loop");

    // -- bundle emission --------------------------------------------------------
    std::fs::write(out_dir.join("program.art"), &joint_outcome.program_text)
        .map_err(stage_err("emit"))?;
    let urdf = emit_urdf(&joint_outcome.model);
    std::fs::write(out_dir.join("model.urdf"), &urdf).map_err(stage_err("emit"))?;
    manifest.artifacts.insert("program".into(), "program.art".into());
    manifest.artifacts.insert("model".into(), "model.urdf".into());

    let renders_dir = out_dir.join("renders");
    std::fs::create_dir_all(&renders_dir).map_err(stage_err("emit"))?;
    let meshes = load_link_meshes(&joint_outcome.model, out_dir).map_err(stage_err("emit"))?;
    for (mode, file) in
        [(RenderMode::Shaded, "final_shaded.png"), (RenderMode::Segmented, "final_segmented.png")]
    {
        let img = render_model(
            &joint_outcome.model,
            &meshes,
            &BTreeMap::new(),
            &RenderConfig { mode, ..opts.render_cfg.clone() },
        )
        .map_err(stage_err("emit"))?;
        std::fs::write(renders_dir.join(file), png_bytes(&img)).map_err(stage_err("emit"))?;
        manifest.artifacts.insert(file.trim_end_matches(".png").into(), format!("renders/{file}"));
    }
    ok(manifest, "emit");

    // -- evaluation (optional) ---------------------------------------------------
    match &opts.gt_urdf {
        None => {
            manifest.stages.push(StageStatus {
                name: "eval".into(),
                status: "skipped".into(),
                error: None,
            });
        }
        Some(gt_path) => {
            let gt_text = std::fs::read_to_string(gt_path).map_err(stage_err("eval"))?;
            let gt = parse_urdf(&gt_text).map_err(stage_err("eval"))?;
            let gt_dir = gt_path.parent().unwrap_or(Path::new("."));
            let gt_meshes = load_link_meshes(&gt, gt_dir).map_err(stage_err("eval"))?;
            let matching = match opts.eval_matching.as_str() {
                "chamfer" => match_links_by_chamfer(
                    &joint_outcome.model,
                    &gt,
                    &meshes,
                    &gt_meshes,
                    &opts.eval_cfg,
                )
                .map_err(stage_err("eval"))?,
                _ => match_links_by_name(&joint_outcome.model, &gt),
            };
            let report = evaluate(
                &joint_outcome.model,
                &gt,
                &matching,
                &meshes,
                &gt_meshes,
                &opts.eval_cfg,
            )
            .map_err(stage_err("eval"))?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            std::fs::write(out_dir.join("eval_report.json"), json + "\n")
                .map_err(stage_err("eval"))?;
            manifest.artifacts.insert("eval_report".into(), "eval_report.json".into());
            ok(manifest, "eval");
        }
    }

    Ok(())
}

/// Intake plus the retrieval stage only; returns the planned part names.
/// Backs the `retrieve` CLI command.
pub fn retrieve_only(
    input: &PipelineInput,
    library: &AssetLibrary,
    agents: &mut AgentSet,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> Result<Vec<String>, String> {
    std::fs::create_dir_all(out_dir.join("meshes")).map_err(|e| e.to_string())?;
    let (_, input_images) = intake(input, opts)?;
    let parts = match input {
        PipelineInput::Text(prompt) => retrieve_for_text(prompt, library, agents, opts, out_dir)?,
        _ => retrieve_for_visual(input, &input_images, library, agents, opts, out_dir)?,
    };
    Ok(parts.into_iter().map(|p| p.name).collect())
}

fn write_loop_log(out_dir: &Path, file: &str, outcome: &LoopOutcome) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Log<'a> {
        best_rating: Option<i64>,
        iterations: &'a [crate::loops::IterationRecord],
    }
    let json = serde_json::to_string_pretty(&Log {
        best_rating: outcome.best_rating,
        iterations: &outcome.iterations,
    })
    .expect("log serializes");
    std::fs::write(out_dir.join(file), json + "\n")
}

// ---------------------------------------------------------------------------
// Intake
// ---------------------------------------------------------------------------

fn intake(
    input: &PipelineInput,
    opts: &PipelineOptions,
) -> Result<(String, Vec<ImageAttachment>), String> {
    match input {
        PipelineInput::Text(prompt) => Ok((prompt.clone(), vec![])),
        PipelineInput::Image(path) => {
            let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            image::load_from_memory(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok((
                "Reconstruct the articulated object shown in the attached image.".into(),
                vec![ImageAttachment::png(&bytes)],
            ))
        }
        PipelineInput::Video(dir) => {
            let frames = list_frames(dir)?;
            if frames.is_empty() {
                return Err(format!("no image frames found in {}", dir.display()));
            }
            let picked = subsample(&frames, opts.max_frames);
            let mut attachments = Vec::with_capacity(picked.len());
            for path in picked {
                let bytes = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
                image::load_from_memory(&bytes)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                attachments.push(ImageAttachment::png(&bytes));
            }
            Ok((
                "Reconstruct the articulated object shown in the attached video frames (temporal order)."
                    .into(),
                attachments,
            ))
        }
    }
}

fn list_frames(dir: &Path) -> Result<Vec<PathBuf>, String> {
    let mut frames: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|x| x.to_str())
                .is_some_and(|x| matches!(x, "png" | "jpg" | "jpeg"))
        })
        .collect();
    frames.sort();
    Ok(frames)
}

/// Uniform subsample preserving the first and last elements.
fn subsample(frames: &[PathBuf], budget: usize) -> Vec<PathBuf> {
    if frames.len() <= budget {
        return frames.to_vec();
    }
    (0..budget)
        .map(|i| frames[i * (frames.len() - 1) / (budget - 1)].clone())
        .collect()
}

// ---------------------------------------------------------------------------
// Retrieval
// ---------------------------------------------------------------------------

fn query_embedding_for_visual(
    input: &PipelineInput,
    input_images: &[ImageAttachment],
    agents: &mut AgentSet,
) -> Result<Embedding, String> {
    // Sidecar first: `embedding.json` in the frame directory, or
    // `<stem>.embedding.json` next to a single image.
    let sidecar = match input {
        PipelineInput::Video(dir) => Some(dir.join("embedding.json")),
        PipelineInput::Image(path) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("input");
            Some(path.with_file_name(format!("{stem}.embedding.json")))
        }
        PipelineInput::Text(_) => None,
    };
    if let Some(path) = sidecar {
        if path.exists() {
            let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
            #[derive(Deserialize)]
            struct Sidecar {
                embedding_b64: String,
            }
            let sidecar: Sidecar = serde_json::from_str(&text)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            return Embedding::from_b64(&sidecar.embedding_b64).map_err(|e| e.to_string());
        }
    }

    // Fall back to the pluggable embedding endpoint (same wire shape as the
    // chat clients; the reply text carries the base64 vector).
    let request = AgentRequest::new(
        AgentRole::Embedding,
        vec![Message::user(
            "Return the embedding vector for the attached input as base64-encoded little-endian f32, and nothing else.",
        )
        .with_images(input_images.to_vec())],
    );
    let reply = agents.complete(request).map_err(|e| e.to_string())?;
    Embedding::from_b64(reply.text.trim()).map_err(|e| e.to_string())
}

fn retrieve_for_visual(
    input: &PipelineInput,
    input_images: &[ImageAttachment],
    library: &AssetLibrary,
    agents: &mut AgentSet,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> Result<Vec<PlannedPart>, String> {
    let query = query_embedding_for_visual(input, input_images, agents)?;
    let ranked = top_k_categories(&query, library, opts.retrieval_cfg.top_k_categories)
        .map_err(|e| e.to_string())?;

    let mut candidates: Vec<String> = Vec::new();
    for (category, _) in &ranked {
        for entry in &library.categories[category] {
            candidates.push(entry.id.clone());
        }
    }
    if candidates.is_empty() {
        return Err("no candidates after category narrowing".into());
    }

    let reference = input_images.first().cloned();
    let mut selector = |batch: &[String]| -> Result<String, String> {
        let mut block = String::new();
        let mut images: Vec<ImageAttachment> = reference.iter().cloned().collect();
        for id in batch {
            let (_, entry) = library.entry(id).ok_or_else(|| format!("unknown candidate {id}"))?;
            block.push_str(&format!("- {}: {}\n", entry.id, entry.description));
            for image_ref in &entry.images {
                let path = library.root.join(image_ref);
                if let Ok(bytes) = std::fs::read(&path) {
                    images.push(ImageAttachment::png(&bytes));
                }
            }
        }
        let request = prompts::selector_request(&block, images, &[]);
        let reply = agents.complete(request).map_err(|e| e.to_string())?;
        Ok(reply.text.trim().trim_matches('`').to_string())
    };
    let winner = tournament_select(&candidates, opts.retrieval_cfg.max_num_images, &mut selector)
        .map_err(|e| e.to_string())?;

    let (_, entry) = library.entry(&winner).ok_or_else(|| format!("unknown winner {winner}"))?;
    std::fs::write(out_dir.join("retrieved_object.txt"), format!("{}\n", entry.id))
        .map_err(|e| e.to_string())?;

    let mut parts = Vec::new();
    for part in &entry.parts {
        let text = std::fs::read_to_string(library.root.join(&part.mesh))
            .map_err(|e| format!("{}: {e}", part.mesh))?;
        let mesh = parse_obj(&text).map_err(|e| e.to_string())?;
        let emit_ref = format!("meshes/{}.obj", part.name);
        std::fs::write(out_dir.join(&emit_ref), emit_obj(&mesh)).map_err(|e| e.to_string())?;
        parts.push(PlannedPart {
            name: part.name.clone(),
            emit_ref,
            dimensions: Vec3::new(part.dimensions[0], part.dimensions[1], part.dimensions[2]),
        });
    }
    Ok(parts)
}

struct CacheEmbedder {
    cache: BTreeMap<String, String>,
}

fn retrieve_for_text(
    prompt: &str,
    library: &AssetLibrary,
    agents: &mut AgentSet,
    opts: &PipelineOptions,
    out_dir: &Path,
) -> Result<Vec<PlannedPart>, String> {
    let (dense, specs) =
        specify_task(prompt, agents, &opts.examples, 3).map_err(|e| e.to_string())?;
    std::fs::write(out_dir.join("task_description.txt"), format!("{dense}\n"))
        .map_err(|e| e.to_string())?;

    // Cached query vectors when configured; the embedding endpoint otherwise.
    let cache: Option<CacheEmbedder> = match &opts.embedding_cache {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
            let cache: BTreeMap<String, String> =
                serde_json::from_str(&text).map_err(|e| e.to_string())?;
            Some(CacheEmbedder { cache })
        }
        None => None,
    };
    let mut embed = |text: &str| -> Result<Embedding, String> {
        if let Some(c) = &cache {
            let b64 = c
                .cache
                .get(text)
                .ok_or_else(|| format!("no cached embedding for `{text}`"))?;
            return Embedding::from_b64(b64).map_err(|e| e.to_string());
        }
        let request = AgentRequest::new(
            AgentRole::Embedding,
            vec![Message::user(format!(
                "Return the embedding vector for the following text as base64-encoded little-endian f32, and nothing else.\n\n{text}"
            ))],
        );
        let reply = agents.complete(request).map_err(|e| e.to_string())?;
        Embedding::from_b64(reply.text.trim()).map_err(|e| e.to_string())
    };

    let matches =
        retrieval::match_parts_by_text(&specs, library, &mut embed).map_err(|e| e.to_string())?;

    let mut parts = Vec::new();
    for spec in &specs {
        let matched = &matches[&spec.name];
        let text = std::fs::read_to_string(library.root.join(&matched.mesh))
            .map_err(|e| format!("{}: {e}", matched.mesh))?;
        let mesh = parse_obj(&text).map_err(|e| e.to_string())?;
        // Bake the target dimensions into the written mesh so programs can
        // use unit scales.
        let (rescaled, _) =
            rescale_mesh(&mesh, spec.dimensions_vec()).map_err(|e| e.to_string())?;
        let emit_ref = format!("meshes/{}.obj", spec.name);
        std::fs::write(out_dir.join(&emit_ref), emit_obj(&rescaled))
            .map_err(|e| e.to_string())?;
        parts.push(PlannedPart {
            name: spec.name.clone(),
            emit_ref,
            dimensions: spec.dimensions_vec(),
        });
    }
    let match_log: BTreeMap<String, String> = matches
        .iter()
        .map(|(part, m)| (part.clone(), format!("{}/{} ({:.4})", m.object_id, m.part_name, m.similarity)))
        .collect();
    std::fs::write(
        out_dir.join("part_matches.json"),
        serde_json::to_string_pretty(&match_log).expect("serializes") + "\n",
    )
    .map_err(|e| e.to_string())?;
    Ok(parts)
}

// PartSpec is deserialized straight from planner JSON.
const _: fn() = || {
    fn assert_deserialize<T: for<'a> Deserialize<'a>>() {}
    assert_deserialize::<PartSpec>();
};
