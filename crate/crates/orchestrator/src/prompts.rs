//! Prompt templates and their assembly. Templates ship as versioned files
//! compiled into the binary; assembly is a pure function of its inputs, so
//! identical inputs produce byte-identical requests (and identical request
//! hashes for replay).

use crate::agent::{AgentRequest, AgentRole, ImageAttachment, Message};

/// Bumped whenever any template file changes shape.
pub const PROMPT_VERSION: u32 = 1;

pub const LINK_ACTOR: &str = include_str!("../prompts/link_actor.txt");
pub const LINK_CRITIC: &str = include_str!("../prompts/link_critic.txt");
pub const JOINT_ACTOR: &str = include_str!("../prompts/joint_actor.txt");
pub const JOINT_CRITIC: &str = include_str!("../prompts/joint_critic.txt");
pub const SELECTOR: &str = include_str!("../prompts/selector.txt");
pub const TASK_SPECIFIER: &str = include_str!("../prompts/task_specifier.txt");
pub const LAYOUT_PLANNER: &str = include_str!("../prompts/layout_planner.txt");
pub const AFFORDANCE: &str = include_str!("../prompts/affordance.txt");

/// Replaces `{{slot}}` markers and collapses the blank lines empty slots
/// leave behind.
pub fn fill(template: &str, slots: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (name, value) in slots {
        out = out.replace(&format!("{{{{{name}}}}}"), value);
    }
    // Trim runs of blank lines produced by empty optional slots.
    let mut lines: Vec<&str> = Vec::new();
    let mut blank_run = 0;
    for line in out.lines() {
        if line.trim().is_empty() {
            blank_run += 1;
            if blank_run > 1 {
                continue;
            }
        } else {
            blank_run = 0;
        }
        lines.push(line);
    }
    let mut result = lines.join("\n");
    while result.ends_with('\n') || result.ends_with(' ') {
        result.pop();
    }
    result.push('\n');
    result
}

/// In-context example texts joined into the `{{examples}}` slot; the count is
/// configuration, not a template property.
pub fn examples_block(examples: &[String]) -> String {
    if examples.is_empty() {
        return String::new();
    }
    let mut out = String::from("Worked examples:\n");
    for (i, example) in examples.iter().enumerate() {
        out.push_str(&format!("--- example {} ---\n{}\n", i + 1, example.trim()));
    }
    out
}

pub struct PromptContext<'a> {
    pub input_text: &'a str,
    pub images: &'a [ImageAttachment],
    pub examples: &'a [String],
}

pub fn link_actor_request(
    ctx: &PromptContext,
    parts_block: &str,
    feedback_block: &str,
) -> AgentRequest {
    let text = fill(
        LINK_ACTOR,
        &[
            ("parts", parts_block),
            ("input", ctx.input_text),
            ("feedback", feedback_block),
            ("examples", &examples_block(ctx.examples)),
        ],
    );
    AgentRequest::new(
        AgentRole::LinkActor,
        vec![Message::user(text).with_images(ctx.images.to_vec())],
    )
}

pub fn link_critic_request(
    program: &str,
    input_images: &[ImageAttachment],
    render_images: &[ImageAttachment],
    examples: &[String],
) -> AgentRequest {
    let text = fill(
        LINK_CRITIC,
        &[("program", program), ("examples", &examples_block(examples))],
    );
    let mut images = input_images.to_vec();
    images.extend(render_images.to_vec());
    AgentRequest::new(AgentRole::LinkCritic, vec![Message::user(text).with_images(images)])
}

pub fn joint_actor_request(
    ctx: &PromptContext,
    program: &str,
    feedback_block: &str,
) -> AgentRequest {
    let text = fill(
        JOINT_ACTOR,
        &[
            ("program", program),
            ("input", ctx.input_text),
            ("feedback", feedback_block),
            ("examples", &examples_block(ctx.examples)),
        ],
    );
    AgentRequest::new(
        AgentRole::JointActor,
        vec![Message::user(text).with_images(ctx.images.to_vec())],
    )
}

pub fn joint_critic_request(
    program: &str,
    input_images: &[ImageAttachment],
    sweep_images: &[ImageAttachment],
    examples: &[String],
) -> AgentRequest {
    let text = fill(
        JOINT_CRITIC,
        &[("program", program), ("examples", &examples_block(examples))],
    );
    let mut images = input_images.to_vec();
    images.extend(sweep_images.to_vec());
    AgentRequest::new(AgentRole::JointCritic, vec![Message::user(text).with_images(images)])
}

pub fn selector_request(
    candidates_block: &str,
    images: Vec<ImageAttachment>,
    examples: &[String],
) -> AgentRequest {
    let text = fill(
        SELECTOR,
        &[("candidates", candidates_block), ("examples", &examples_block(examples))],
    );
    AgentRequest::new(AgentRole::Selector, vec![Message::user(text).with_images(images)])
}

pub fn task_specifier_request(input: &str, examples: &[String]) -> AgentRequest {
    let text =
        fill(TASK_SPECIFIER, &[("input", input), ("examples", &examples_block(examples))]);
    AgentRequest::new(AgentRole::TaskSpecifier, vec![Message::user(text)])
}

pub fn layout_planner_request(input: &str, examples: &[String]) -> AgentRequest {
    let text =
        fill(LAYOUT_PLANNER, &[("input", input), ("examples", &examples_block(examples))]);
    AgentRequest::new(AgentRole::LayoutPlanner, vec![Message::user(text)])
}

pub fn affordance_request(
    legend: &str,
    input_images: &[ImageAttachment],
    segmented: ImageAttachment,
    examples: &[String],
) -> AgentRequest {
    let text =
        fill(AFFORDANCE, &[("legend", legend), ("examples", &examples_block(examples))]);
    let mut images = input_images.to_vec();
    images.push(segmented);
    AgentRequest::new(AgentRole::Affordance, vec![Message::user(text).with_images(images)])
}
