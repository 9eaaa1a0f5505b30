//! End-to-end pipeline: input intake, agent prompting (actor, critic,
//! selector, task specifier, layout planner, affordance extractor), built-in
//! rendering for critique, the iterative refinement loops, and bundle output.
//!
//! Agents are reached through a provider-neutral chat contract
//! ([`agent::AgentClient`]); scripted and record/replay implementations make
//! every pipeline path runnable hermetically, with HTTP endpoints as the
//! production binding.

pub mod agent;
pub mod config;
pub mod loops;
pub mod pipeline;
pub mod prompts;
pub mod render;
pub mod tasks;
