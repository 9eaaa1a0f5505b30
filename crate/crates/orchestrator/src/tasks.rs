//! Single-shot agent tasks: prompt densification and part planning for text
//! inputs, and targeted affordance extraction from a segmented render.

use crate::agent::{AgentError, AgentSet, ImageAttachment};
use crate::prompts;
use crate::render::{png_bytes, render_model, segmentation_legend, RenderConfig, RenderMode};
use kinematics_core::{TriMesh, UrdfModel};
use retrieval::PartSpec;
use serde::Deserialize;
use std::collections::BTreeMap;

/// Densifies a sparse prompt, then plans the part list with dimensions.
/// Unparseable planner output is retried with the parse error appended, up
/// to `max_retries` attempts in total; the raw text rides along in the error.
pub fn specify_task(
    prompt: &str,
    agents: &mut AgentSet,
    examples: &[String],
    max_retries: u32,
) -> Result<(String, Vec<PartSpec>), AgentError> {
    let dense = agents
        .complete(prompts::task_specifier_request(prompt, examples))?
        .text
        .trim()
        .to_string();

    let mut context = dense.clone();
    let mut last_error: Option<AgentError> = None;
    for _ in 0..max_retries.max(1) {
        let reply = agents.complete(prompts::layout_planner_request(&context, examples))?;
        match parse_part_plan(&reply.text) {
            Ok(parts) => return Ok((dense, parts)),
            Err(e) => {
                context = format!(
                    "{dense}\n\nYour previous reply could not be used: {e}\nReply again with only the JSON object."
                );
                last_error = Some(e);
            }
        }
    }
    Err(last_error.expect("at least one attempt"))
}

#[derive(Deserialize)]
struct PartPlan {
    parts: Vec<PartSpec>,
}

fn parse_part_plan(text: &str) -> Result<Vec<PartSpec>, AgentError> {
    let json = crate::agent::extract_json(text).ok_or_else(|| AgentError::Parse {
        what: "no JSON object in planner reply".into(),
        raw: text.to_string(),
    })?;
    let plan: PartPlan = serde_json::from_str(&json).map_err(|e| AgentError::Parse {
        what: format!("part plan: {e}"),
        raw: text.to_string(),
    })?;
    if plan.parts.is_empty() {
        return Err(AgentError::Parse { what: "planner returned no parts".into(), raw: text.into() });
    }
    for part in &plan.parts {
        if part.dimensions.iter().any(|&d| !(d > 0.0)) {
            return Err(AgentError::Parse {
                what: format!("part `{}` has non-positive dimensions", part.name),
                raw: text.to_string(),
            });
        }
    }
    Ok(plan.parts)
}

/// Renders the model with one saturated color per link and asks the agent
/// which child link carries the demonstrated motion. An unknown link name is
/// retried with the valid-name list appended.
pub fn extract_target_affordance(
    input_images: &[ImageAttachment],
    model: &UrdfModel,
    meshes: &BTreeMap<String, TriMesh>,
    agents: &mut AgentSet,
    render_cfg: &RenderConfig,
    examples: &[String],
    max_retries: u32,
) -> Result<String, crate::loops::LoopError> {
    let segmented = render_model(
        model,
        meshes,
        &BTreeMap::new(),
        &RenderConfig { mode: RenderMode::Segmented, ..render_cfg.clone() },
    )?;
    let attachment = ImageAttachment::png(&png_bytes(&segmented));
    let mut legend = segmentation_legend(model, meshes);

    let valid: Vec<String> = model.links().iter().map(|l| l.name.clone()).collect();
    let mut last = String::new();
    for _ in 0..max_retries.max(1) {
        let request = prompts::affordance_request(
            &legend,
            input_images,
            attachment.clone(),
            examples,
        );
        let reply = agents.complete(request)?;
        let name = reply.text.trim().trim_matches('`').trim().to_string();
        if valid.contains(&name) {
            return Ok(name);
        }
        last = name.clone();
        legend = format!(
            "{}\nYour previous answer `{name}` is not a part. Valid part names: {}",
            segmentation_legend(model, meshes),
            valid.join(", ")
        );
    }
    Err(crate::loops::LoopError::Agent(AgentError::Parse {
        what: format!("affordance extractor never named a valid link (last: `{last}`)"),
        raw: last,
    }))
}
