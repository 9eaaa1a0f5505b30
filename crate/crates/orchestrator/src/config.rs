//! TOML configuration for endpoints, loops, retrieval, and rendering.
//! API keys are referenced by environment-variable name only.

use crate::agent::{
    AgentError, AgentRole, AgentSet, HttpClient, HttpEndpoint, ReplayClient, ScriptedClient,
    SetRecorder,
};
use crate::render::{CameraPreset, RenderConfig, RenderMode};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize, Default)]
pub struct EndpointConfig {
    /// "script" | "replay" | "http"
    pub mode: String,
    pub script: Option<PathBuf>,
    pub transcript: Option<PathBuf>,
    pub url: Option<String>,
    pub model: Option<String>,
    pub timeout_secs: Option<u64>,
    pub max_retries: Option<u32>,
    pub api_key_env: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct LoopSection {
    pub rating_threshold: Option<i64>,
    pub max_iterations: Option<u32>,
    pub sweep_frames: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct RetrievalSection {
    pub top_k_categories: Option<usize>,
    pub max_num_images: Option<usize>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct RenderSection {
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub camera: Option<String>,
    /// External renderer command; receives urdf, joints file, camera, output.
    pub external: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct EmbeddingSection {
    /// "cached" | "http"
    pub mode: Option<String>,
    /// JSON map of query text to base64 little-endian f32 vectors.
    pub cache: Option<PathBuf>,
    pub url: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct RecordSection {
    pub transcript_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, Default)]
pub struct Config {
    #[serde(default)]
    pub endpoints: BTreeMap<String, EndpointConfig>,
    #[serde(default)]
    pub r#loop: LoopSection,
    #[serde(default)]
    pub retrieval: RetrievalSection,
    #[serde(default)]
    pub render: RenderSection,
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub record: RecordSection,
    /// Files inlined as in-context examples, in order.
    #[serde(default)]
    pub example_files: Vec<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, AgentError> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| AgentError::Config(format!("{}: {e}", path.display())))
    }

    /// Endpoint config for a role: the role-specific section if present,
    /// otherwise `default`.
    fn endpoint_for(&self, role: AgentRole) -> Option<&EndpointConfig> {
        self.endpoints.get(role.as_str()).or_else(|| self.endpoints.get("default"))
    }

    /// Builds one client per role. Paths in the config resolve relative to
    /// `base_dir`. With a `record.transcript_out`, every client is wrapped by
    /// the returned recorder.
    pub fn build_agents(&self, base_dir: &Path) -> Result<(AgentSet, Option<SetRecorder>), AgentError> {
        let recorder =
            self.record.transcript_out.as_ref().map(|_| SetRecorder::new());
        let mut agents = AgentSet::new();
        for role in AgentRole::ALL {
            let Some(cfg) = self.endpoint_for(role) else { continue };
            let client = build_client(cfg, base_dir)?;
            let client = match &recorder {
                Some(r) => r.wrap(client),
                None => client,
            };
            if let Some(model) = &cfg.model {
                agents.model_names.insert(role, model.clone());
            }
            agents.insert(role, client);
        }
        Ok((agents, recorder))
    }

    pub fn loop_config(&self, modality: crate::loops::Modality) -> crate::loops::LoopConfig {
        let defaults = crate::loops::LoopConfig::default();
        crate::loops::LoopConfig {
            rating_threshold: self.r#loop.rating_threshold.unwrap_or(defaults.rating_threshold),
            max_iterations: self.r#loop.max_iterations.unwrap_or(defaults.max_iterations),
            modality,
            sweep_frames: self.r#loop.sweep_frames.unwrap_or(defaults.sweep_frames),
        }
    }

    pub fn retrieval_config(&self) -> retrieval::RetrievalConfig {
        let defaults = retrieval::RetrievalConfig::default();
        retrieval::RetrievalConfig {
            top_k_categories: self.retrieval.top_k_categories.unwrap_or(defaults.top_k_categories),
            max_num_images: self.retrieval.max_num_images.unwrap_or(defaults.max_num_images),
        }
    }

    pub fn render_config(&self) -> RenderConfig {
        let defaults = RenderConfig::default();
        RenderConfig {
            width: self.render.width.unwrap_or(defaults.width),
            height: self.render.height.unwrap_or(defaults.height),
            camera: self
                .render
                .camera
                .as_deref()
                .and_then(CameraPreset::from_name)
                .unwrap_or(defaults.camera),
            mode: RenderMode::Shaded,
        }
    }

    pub fn examples(&self, base_dir: &Path) -> Result<Vec<String>, AgentError> {
        self.example_files
            .iter()
            .map(|p| Ok(std::fs::read_to_string(base_dir.join(p))?))
            .collect()
    }
}

fn build_client(
    cfg: &EndpointConfig,
    base_dir: &Path,
) -> Result<Box<dyn crate::agent::AgentClient>, AgentError> {
    match cfg.mode.as_str() {
        "script" => {
            let path = cfg
                .script
                .as_ref()
                .ok_or_else(|| AgentError::Config("script mode needs `script`".into()))?;
            Ok(Box::new(ScriptedClient::from_file(&base_dir.join(path))?))
        }
        "replay" => {
            let path = cfg
                .transcript
                .as_ref()
                .ok_or_else(|| AgentError::Config("replay mode needs `transcript`".into()))?;
            Ok(Box::new(ReplayClient::from_file(&base_dir.join(path))?))
        }
        "http" => {
            let url = cfg
                .url
                .clone()
                .ok_or_else(|| AgentError::Config("http mode needs `url`".into()))?;
            Ok(Box::new(HttpClient::new(HttpEndpoint {
                base_url: url,
                model: cfg.model.clone().unwrap_or_default(),
                timeout_secs: cfg.timeout_secs.unwrap_or(60),
                max_retries: cfg.max_retries.unwrap_or(3),
                api_key_env: cfg.api_key_env.clone(),
            })))
        }
        other => Err(AgentError::Config(format!("unknown endpoint mode `{other}`"))),
    }
}
