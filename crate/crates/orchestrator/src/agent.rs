//! Provider-neutral agent wire contract plus the client implementations:
//! HTTP (chat-completion style), scripted (canned per-role responses),
//! recording, and replay (responses keyed by request hash).

use artlang::SourceLoc;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    TaskSpecifier,
    LayoutPlanner,
    Selector,
    LinkActor,
    LinkCritic,
    JointActor,
    JointCritic,
    Affordance,
    Embedding,
}

impl AgentRole {
    pub fn as_str(self) -> &'static str {
        match self {
            AgentRole::TaskSpecifier => "task_specifier",
            AgentRole::LayoutPlanner => "layout_planner",
            AgentRole::Selector => "selector",
            AgentRole::LinkActor => "link_actor",
            AgentRole::LinkCritic => "link_critic",
            AgentRole::JointActor => "joint_actor",
            AgentRole::JointCritic => "joint_critic",
            AgentRole::Affordance => "affordance",
            AgentRole::Embedding => "embedding",
        }
    }

    pub const ALL: [AgentRole; 9] = [
        AgentRole::TaskSpecifier,
        AgentRole::LayoutPlanner,
        AgentRole::Selector,
        AgentRole::LinkActor,
        AgentRole::LinkCritic,
        AgentRole::JointActor,
        AgentRole::JointCritic,
        AgentRole::Affordance,
        AgentRole::Embedding,
    ];
}

/// Base64 image with its media type, as carried inside messages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageAttachment {
    pub media_type: String,
    pub base64: String,
}

impl ImageAttachment {
    pub fn png(bytes: &[u8]) -> Self {
        use base64::Engine;
        Self {
            media_type: "image/png".into(),
            base64: base64::engine::general_purpose::STANDARD.encode(bytes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    /// "system" | "user" | "assistant"
    pub role: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub images: Vec<ImageAttachment>,
}

impl Message {
    pub fn system(text: impl Into<String>) -> Self {
        Self { role: "system".into(), text: text.into(), images: vec![] }
    }

    pub fn user(text: impl Into<String>) -> Self {
        Self { role: "user".into(), text: text.into(), images: vec![] }
    }

    pub fn with_images(mut self, images: Vec<ImageAttachment>) -> Self {
        self.images = images;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentRequest {
    pub role: AgentRole,
    pub model: String,
    pub messages: Vec<Message>,
}

impl AgentRequest {
    pub fn new(role: AgentRole, messages: Vec<Message>) -> Self {
        Self { role, model: String::new(), messages }
    }

    /// Canonical JSON bytes; prompt assembly is pure, so equal inputs hash
    /// equal across runs.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("request serializes")
    }

    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_json().as_bytes());
        hex_encode(&hasher.finalize())
    }
}

fn hex_encode(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentResponse {
    pub text: String,
}

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("script for role `{role}` has no responses left")]
    ScriptExhausted { role: &'static str },
    #[error("transcript has no entry for request {hash} (role `{role}`)")]
    UnknownRequest { hash: String, role: &'static str },
    #[error("cannot parse agent payload ({what}); raw text retained:\n{raw}")]
    Parse { what: String, raw: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Config(String),
}

pub trait AgentClient {
    fn complete(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError>;
}

// ---------------------------------------------------------------------------
// Scripted client: canned responses consumed per role, in order.
// ---------------------------------------------------------------------------

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
pub struct Script {
    /// role name -> FIFO of response texts
    pub responses: BTreeMap<String, Vec<String>>,
}

pub struct ScriptedClient {
    queues: BTreeMap<String, std::collections::VecDeque<String>>,
}

impl ScriptedClient {
    pub fn new(script: Script) -> Self {
        Self {
            queues: script
                .responses
                .into_iter()
                .map(|(role, list)| (role, list.into()))
                .collect(),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, AgentError> {
        let text = std::fs::read_to_string(path)?;
        let script: Script = serde_json::from_str(&text)
            .map_err(|e| AgentError::Config(format!("script {}: {e}", path.display())))?;
        Ok(Self::new(script))
    }
}

impl AgentClient for ScriptedClient {
    fn complete(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let queue = self
            .queues
            .get_mut(request.role.as_str())
            .ok_or(AgentError::ScriptExhausted { role: request.role.as_str() })?;
        let text = queue
            .pop_front()
            .ok_or(AgentError::ScriptExhausted { role: request.role.as_str() })?;
        Ok(AgentResponse { text })
    }
}

// ---------------------------------------------------------------------------
// Record / replay: transcripts keyed by request hash.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub request_hash: String,
    pub role: String,
    pub request_json: String,
    pub response_text: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

/// Wraps another client and records every exchange.
pub struct RecordingClient<C: AgentClient> {
    pub inner: C,
    pub transcript: Transcript,
}

impl<C: AgentClient> RecordingClient<C> {
    pub fn new(inner: C) -> Self {
        Self { inner, transcript: Transcript::default() }
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        let json = serde_json::to_string_pretty(&self.transcript)
            .map_err(|e| AgentError::Config(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}

impl<C: AgentClient> AgentClient for RecordingClient<C> {
    fn complete(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let response = self.inner.complete(request)?;
        self.transcript.entries.push(TranscriptEntry {
            request_hash: request.hash(),
            role: request.role.as_str().to_string(),
            request_json: request.canonical_json(),
            response_text: response.text.clone(),
        });
        Ok(response)
    }
}

/// Replays canned responses keyed by request hash. Repeated identical
/// requests consume matching entries in recorded order, then stick at the
/// last one.
pub struct ReplayClient {
    by_hash: BTreeMap<String, std::collections::VecDeque<String>>,
}

impl ReplayClient {
    pub fn new(transcript: Transcript) -> Self {
        let mut by_hash: BTreeMap<String, std::collections::VecDeque<String>> = BTreeMap::new();
        for entry in transcript.entries {
            by_hash.entry(entry.request_hash).or_default().push_back(entry.response_text);
        }
        Self { by_hash }
    }

    pub fn from_file(path: &Path) -> Result<Self, AgentError> {
        let text = std::fs::read_to_string(path)?;
        let transcript: Transcript = serde_json::from_str(&text)
            .map_err(|e| AgentError::Config(format!("transcript {}: {e}", path.display())))?;
        Ok(Self::new(transcript))
    }
}

impl AgentClient for ReplayClient {
    fn complete(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let hash = request.hash();
        let queue = self.by_hash.get_mut(&hash).ok_or(AgentError::UnknownRequest {
            hash: hash.clone(),
            role: request.role.as_str(),
        })?;
        let text = if queue.len() > 1 {
            queue.pop_front().expect("non-empty")
        } else {
            queue.front().cloned().ok_or(AgentError::UnknownRequest {
                hash: hash.clone(),
                role: request.role.as_str(),
            })?
        };
        Ok(AgentResponse { text })
    }
}

// ---------------------------------------------------------------------------
// HTTP client: OpenAI-style chat completion bodies over a configurable base.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HttpEndpoint {
    pub base_url: String,
    pub model: String,
    #[serde(default = "default_timeout")]
    pub timeout_secs: u64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    /// Name of the environment variable holding the API key; keys never live
    /// in config files.
    #[serde(default)]
    pub api_key_env: Option<String>,
}

fn default_timeout() -> u64 {
    60
}

fn default_retries() -> u32 {
    3
}

pub struct HttpClient {
    endpoint: HttpEndpoint,
    agent: ureq::Agent,
}

impl HttpClient {
    pub fn new(endpoint: HttpEndpoint) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(std::time::Duration::from_secs(endpoint.timeout_secs)))
            .build()
            .into();
        Self { endpoint, agent }
    }

    fn body_for(&self, request: &AgentRequest) -> serde_json::Value {
        let messages: Vec<serde_json::Value> = request
            .messages
            .iter()
            .map(|m| {
                if m.images.is_empty() {
                    serde_json::json!({"role": m.role, "content": m.text})
                } else {
                    let mut content = vec![serde_json::json!({"type": "text", "text": m.text})];
                    for image in &m.images {
                        content.push(serde_json::json!({
                            "type": "image_url",
                            "image_url": {"url": format!("data:{};base64,{}", image.media_type, image.base64)}
                        }));
                    }
                    serde_json::json!({"role": m.role, "content": content})
                }
            })
            .collect();
        serde_json::json!({"model": self.endpoint.model, "messages": messages})
    }
}

impl AgentClient for HttpClient {
    fn complete(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let url = format!("{}/chat/completions", self.endpoint.base_url.trim_end_matches('/'));
        let body = self.body_for(request).to_string();
        let key = match &self.endpoint.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                AgentError::Config(format!("API key environment variable `{var}` is not set"))
            })?),
            None => None,
        };

        let mut last_error = AgentError::Transport("no attempts made".into());
        for _ in 0..self.endpoint.max_retries.max(1) {
            let mut req = self
                .agent
                .post(&url)
                .header("content-type", "application/json");
            if let Some(key) = &key {
                req = req.header("authorization", &format!("Bearer {key}"));
            }
            match req.send(body.as_bytes()) {
                Ok(mut response) => {
                    let mut text = String::new();
                    if let Err(e) =
                        response.body_mut().as_reader().take(8 << 20).read_to_string(&mut text)
                    {
                        last_error = AgentError::Transport(e.to_string());
                        continue;
                    }
                    let status = response.status().as_u16();
                    if status >= 400 {
                        last_error = AgentError::Status { status, body: text };
                        continue;
                    }
                    let parsed: serde_json::Value = match serde_json::from_str(&text) {
                        Ok(v) => v,
                        Err(e) => {
                            last_error =
                                AgentError::Parse { what: format!("response JSON: {e}"), raw: text };
                            continue;
                        }
                    };
                    let content = parsed["choices"][0]["message"]["content"].as_str();
                    match content {
                        Some(c) => return Ok(AgentResponse { text: c.to_string() }),
                        None => {
                            last_error = AgentError::Parse {
                                what: "choices[0].message.content missing".into(),
                                raw: text,
                            };
                        }
                    }
                }
                Err(e) => last_error = AgentError::Transport(e.to_string()),
            }
        }
        Err(last_error)
    }
}

// ---------------------------------------------------------------------------
// Payload parsing: program blocks and critic feedback.
// ---------------------------------------------------------------------------

/// Critic payload: a 0-10 realism rating, an optional named failure case for
/// joint critique, and located issues.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticFeedback {
    pub realism_rating: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_case: Option<FailureCase>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<Issue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCase {
    JointType,
    JointAxis,
    JointOrigin,
    JointLimit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub line: usize,
    #[serde(default)]
    pub col: usize,
    pub message: String,
}

impl Issue {
    pub fn loc(&self) -> SourceLoc {
        SourceLoc { line: self.line, col: self.col.max(1) }
    }
}

/// Extracts the program source from an agent reply: a fenced block tagged
/// `art` if present, else the first fenced block, else the whole text.
pub fn extract_program_block(text: &str) -> String {
    if let Some(block) = fenced_block(text, "```art") {
        return block;
    }
    if let Some(block) = fenced_block(text, "```") {
        return block;
    }
    text.trim().to_string()
}

fn fenced_block(text: &str, opener: &str) -> Option<String> {
    let start = text.find(opener)?;
    let after = &text[start + opener.len()..];
    let after = after.strip_prefix('\n').unwrap_or(after);
    let end = after.find("```")?;
    Some(after[..end].trim_end().to_string())
}

/// First JSON object in a reply, fenced (```json) or bare.
pub fn extract_json(text: &str) -> Option<String> {
    fenced_block(text, "```json").or_else(|| first_json_object(text))
}

/// Parses critic feedback from a reply: the first JSON object found, fenced
/// or bare. The raw text travels with the error for audit.
pub fn parse_critic_feedback(text: &str) -> Result<CriticFeedback, AgentError> {
    let candidate = extract_json(text)
        .ok_or_else(|| AgentError::Parse {
            what: "no JSON object in critic reply".into(),
            raw: text.to_string(),
        })?;
    let feedback: CriticFeedback =
        serde_json::from_str(&candidate).map_err(|e| AgentError::Parse {
            what: format!("critic feedback: {e}"),
            raw: text.to_string(),
        })?;
    if !(0..=10).contains(&feedback.realism_rating) {
        return Err(AgentError::Parse {
            what: format!("realism_rating {} outside 0-10", feedback.realism_rating),
            raw: text.to_string(),
        });
    }
    Ok(feedback)
}

fn first_json_object(text: &str) -> Option<String> {
    let start = text.find('{')?;
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, c) in text[start..].char_indices() {
        if in_string {
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => in_string = true,
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(text[start..start + i + 1].to_string());
                }
            }
            _ => {}
        }
    }
    None
}

/// Per-role client set used by the pipeline.
pub struct AgentSet {
    clients: BTreeMap<AgentRole, Box<dyn AgentClient>>,
    pub model_names: BTreeMap<AgentRole, String>,
}

impl AgentSet {
    pub fn new() -> Self {
        Self { clients: BTreeMap::new(), model_names: BTreeMap::new() }
    }

    pub fn insert(&mut self, role: AgentRole, client: Box<dyn AgentClient>) {
        self.clients.insert(role, client);
    }

    pub fn complete(&mut self, mut request: AgentRequest) -> Result<AgentResponse, AgentError> {
        if let Some(model) = self.model_names.get(&request.role) {
            request.model = model.clone();
        }
        let client = self
            .clients
            .get_mut(&request.role)
            .ok_or_else(|| AgentError::Config(format!("no endpoint for role `{}`", request.role.as_str())))?;
        client.complete(&request)
    }
}

impl Default for AgentSet {
    fn default() -> Self {
        Self::new()
    }
}

/// Transcript recorder shared across an `AgentSet`: wraps every inserted
/// client via interior mutability-free composition at insert time.
pub struct SetRecorder {
    pub transcript: std::rc::Rc<std::cell::RefCell<Transcript>>,
}

pub struct SharedRecordingClient {
    inner: Box<dyn AgentClient>,
    transcript: std::rc::Rc<std::cell::RefCell<Transcript>>,
}

impl SetRecorder {
    pub fn new() -> Self {
        Self { transcript: std::rc::Rc::new(std::cell::RefCell::new(Transcript::default())) }
    }

    pub fn wrap(&self, inner: Box<dyn AgentClient>) -> Box<dyn AgentClient> {
        Box::new(SharedRecordingClient { inner, transcript: self.transcript.clone() })
    }

    pub fn save(&self, path: &Path) -> Result<(), AgentError> {
        let json = serde_json::to_string_pretty(&*self.transcript.borrow())
            .map_err(|e| AgentError::Config(e.to_string()))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}

impl Default for SetRecorder {
    fn default() -> Self {
        Self::new()
    }
}

impl AgentClient for SharedRecordingClient {
    fn complete(&mut self, request: &AgentRequest) -> Result<AgentResponse, AgentError> {
        let response = self.inner.complete(request)?;
        self.transcript.borrow_mut().entries.push(TranscriptEntry {
            request_hash: request.hash(),
            role: request.role.as_str().to_string(),
            request_json: request.canonical_json(),
            response_text: response.text.clone(),
        });
        Ok(response)
    }
}

/// Loads a saved transcript from disk.
pub fn load_transcript(path: &PathBuf) -> Result<Transcript, AgentError> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| AgentError::Config(format!("transcript: {e}")))
}
