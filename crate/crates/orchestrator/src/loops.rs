//! Actor-critic refinement loops for link placement and joint prediction.
//!
//! Each iteration: the actor proposes a program, the toolkit compiles and
//! renders it, the critic rates the result 0-10, and the loop stops at the
//! first rating strictly greater than the threshold (or when iterations run
//! out, returning the best-rated program). Compile errors are never raised
//! out of the loop; they are fed back to the actor verbatim.

use crate::agent::{
    extract_program_block, parse_critic_feedback, AgentError, AgentSet, CriticFeedback,
    ImageAttachment,
};
use crate::prompts::{self, PromptContext};
use crate::render::{png_bytes, render_model, render_sweep, RenderConfig, RenderMode};
use artlang::{compile, parse_artlang, ArtProgram, MeshResolver};
use kinematics_core::UrdfModel;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;
use urdf_io::load_link_meshes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Text,
    Image,
    Video,
}

impl Modality {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "text" => Some(Self::Text),
            "image" => Some(Self::Image),
            "video" => Some(Self::Video),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoopConfig {
    /// The loop stops once a rating strictly exceeds this.
    pub rating_threshold: i64,
    pub max_iterations: u32,
    pub modality: Modality,
    /// Frames per joint sweep presented to the joint critic.
    pub sweep_frames: usize,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self { rating_threshold: 5, max_iterations: 4, modality: Modality::Video, sweep_frames: 6 }
    }
}

/// Everything logged for one loop iteration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationRecord {
    pub index: u32,
    pub program_text: String,
    pub compile_ok: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compile_errors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub render_files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<CriticFeedback>,
}

#[derive(Debug)]
pub struct LoopOutcome {
    pub program_text: String,
    pub program: ArtProgram,
    pub model: UrdfModel,
    pub iterations: Vec<IterationRecord>,
    /// Best rating observed, when a critic ran.
    pub best_rating: Option<i64>,
}

#[derive(Debug, Error)]
pub enum LoopError {
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error("no iteration produced a compilable program; last errors: {0:?}")]
    NothingCompiled(Vec<String>),
    #[error(transparent)]
    Render(#[from] crate::render::RenderError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub struct LoopHarness<'a> {
    pub agents: &'a mut AgentSet,
    pub resolver: &'a dyn MeshResolver,
    /// Bundle root: meshes load relative to it, and recorded artifact paths
    /// are relative to it so bundles replay byte-identically anywhere.
    pub bundle_root: &'a Path,
    /// Where iteration artifacts (renders) are written.
    pub work_dir: &'a Path,
    pub render: RenderConfig,
    pub examples: Vec<String>,
}

enum Stage {
    Link,
    Joint,
}

/// Link placement refinement; see the module docs for the protocol. For the
/// text modality no critic runs and the first compilable program wins.
pub fn run_link_loop(
    harness: &mut LoopHarness,
    input_text: &str,
    input_images: &[ImageAttachment],
    parts_block: &str,
    cfg: &LoopConfig,
) -> Result<LoopOutcome, LoopError> {
    run_loop(harness, input_text, input_images, parts_block, cfg, Stage::Link)
}

/// Joint prediction refinement over a placed program: critique materials are
/// joint-sweep frame sequences; the critic only runs for the video modality.
pub fn run_joint_loop(
    harness: &mut LoopHarness,
    input_text: &str,
    input_images: &[ImageAttachment],
    placed_program: &str,
    cfg: &LoopConfig,
) -> Result<LoopOutcome, LoopError> {
    run_loop(harness, input_text, input_images, placed_program, cfg, Stage::Joint)
}

fn run_loop(
    harness: &mut LoopHarness,
    input_text: &str,
    input_images: &[ImageAttachment],
    stage_block: &str,
    cfg: &LoopConfig,
    stage: Stage,
) -> Result<LoopOutcome, LoopError> {
    let critic_runs = match stage {
        Stage::Link => cfg.modality != Modality::Text,
        Stage::Joint => cfg.modality == Modality::Video,
    };

    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut feedback_block = String::new();
    let mut best: Option<(i64, usize, ArtProgram, UrdfModel, String)> = None;
    let mut last_errors: Vec<String> = Vec::new();

    for index in 1..=cfg.max_iterations {
        let ctx = PromptContext {
            input_text,
            images: input_images,
            examples: &harness.examples,
        };
        let request = match stage {
            Stage::Link => prompts::link_actor_request(&ctx, stage_block, &feedback_block),
            Stage::Joint => prompts::joint_actor_request(&ctx, stage_block, &feedback_block),
        };
        let response = harness.agents.complete(request)?;
        let program_text = extract_program_block(&response.text);

        let mut record = IterationRecord {
            index,
            program_text: program_text.clone(),
            compile_ok: false,
            compile_errors: vec![],
            render_files: vec![],
            feedback: None,
        };

        let compiled = parse_artlang(&program_text)
            .map_err(|e| e.to_string())
            .and_then(|program| {
                compile(&program, harness.resolver)
                    .map(|(model, _)| (program, model))
                    .map_err(|e| e.to_string())
            });

        match compiled {
            Err(error) => {
                record.compile_errors.push(error.clone());
                last_errors = vec![error.clone()];
                iterations.push(record);
                feedback_block = format!(
                    "Your previous program failed to compile. Fix it.\nCompiler output:\n{error}\n\nPrevious program:\n{program_text}"
                );
            }
            Ok((program, model)) => {
                record.compile_ok = true;
                let meshes = load_link_meshes(&model, harness.bundle_root)
                    .map_err(|e| LoopError::NothingCompiled(vec![e.to_string()]))?;

                let iter_dir = harness.work_dir.join(format!(
                    "{}_{index:02}",
                    match stage {
                        Stage::Link => "link",
                        Stage::Joint => "joint",
                    }
                ));
                std::fs::create_dir_all(&iter_dir)?;
                std::fs::write(iter_dir.join("program.art"), &program_text)?;

                let mut render_images = Vec::new();
                match stage {
                    Stage::Link => {
                        let img = render_model(
                            &model,
                            &meshes,
                            &BTreeMap::new(),
                            &RenderConfig { mode: RenderMode::Shaded, ..harness.render.clone() },
                        )?;
                        let bytes = png_bytes(&img);
                        let file = iter_dir.join("render.png");
                        std::fs::write(&file, &bytes)?;
                        record.render_files.push(relative_to(&file, harness.bundle_root));
                        render_images.push(ImageAttachment::png(&bytes));
                    }
                    Stage::Joint => {
                        for joint in model.joints().iter().filter(|j| j.kind.is_movable()) {
                            let frames = render_sweep(
                                &model,
                                &meshes,
                                &joint.name,
                                cfg.sweep_frames,
                                &harness.render,
                            )?;
                            for (i, frame) in frames.iter().enumerate() {
                                let bytes = png_bytes(frame);
                                let file =
                                    iter_dir.join(format!("sweep_{}_{i:02}.png", joint.name));
                                std::fs::write(&file, &bytes)?;
                                record.render_files.push(relative_to(&file, harness.bundle_root));
                                render_images.push(ImageAttachment::png(&bytes));
                            }
                        }
                    }
                }

                if !critic_runs {
                    iterations.push(record);
                    return Ok(LoopOutcome {
                        program_text,
                        program,
                        model,
                        iterations,
                        best_rating: None,
                    });
                }

                let critic_request = match stage {
                    Stage::Link => prompts::link_critic_request(
                        &program_text,
                        input_images,
                        &render_images,
                        &harness.examples,
                    ),
                    Stage::Joint => prompts::joint_critic_request(
                        &program_text,
                        input_images,
                        &render_images,
                        &harness.examples,
                    ),
                };
                let critic_reply = harness.agents.complete(critic_request)?;
                let feedback = parse_critic_feedback(&critic_reply.text)?;
                std::fs::write(
                    iter_dir.join("feedback.json"),
                    serde_json::to_string_pretty(&feedback).expect("serializes") + "\n",
                )?;
                record.feedback = Some(feedback.clone());
                let rating = feedback.realism_rating;
                iterations.push(record);

                let replace = match &best {
                    None => true,
                    Some((best_rating, ..)) => rating > *best_rating,
                };
                if replace {
                    best = Some((
                        rating,
                        iterations.len() - 1,
                        program.clone(),
                        model.clone(),
                        program_text.clone(),
                    ));
                }

                // Strictly-greater stop rule: a rating equal to the threshold
                // keeps refining.
                if rating > cfg.rating_threshold {
                    break;
                }
                feedback_block = feedback_to_block(&feedback, &program_text);
            }
        }
    }

    match best {
        Some((rating, _, program, model, program_text)) => Ok(LoopOutcome {
            program_text,
            program,
            model,
            iterations,
            best_rating: Some(rating),
        }),
        None => Err(LoopError::NothingCompiled(last_errors)),
    }
}

/// Bundle-relative display path (forward slashes) for manifest determinism.
fn relative_to(path: &Path, root: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

fn feedback_to_block(feedback: &CriticFeedback, program_text: &str) -> String {
    let mut out = format!(
        "The critic rated your previous program {}/10. Revise it.\n",
        feedback.realism_rating
    );
    if let Some(case) = feedback.failure_case {
        out.push_str(&format!("Identified failure case: {:?}.\n", case));
    }
    for issue in &feedback.issues {
        out.push_str(&format!("- line {}: {}\n", issue.line, issue.message));
    }
    out.push_str(&format!("\nPrevious program:\n{program_text}"));
    out
}
