//! Embedding-indexed asset library: loading versioned manifests with
//! precomputed embedding vectors, cosine-similarity category narrowing,
//! text-part matching, target-dimension mesh rescaling, and the
//! divide-and-conquer tournament selection protocol.
//!
//! Embeddings are precomputed and stored in the manifest (base64-encoded
//! little-endian f32); no embedding model runs in-process. Novel text queries
//! go through a pluggable [`Embedder`].

mod library;
mod parts;
mod rescale;
mod similarity;
mod tournament;

use thiserror::Error;

pub use library::{AssetEntry, AssetLibrary, AssetPart, Embedding, MANIFEST_SCHEMA_VERSION};
pub use parts::{match_parts_by_text, Embedder, PartMatch, PartSpec};
pub use rescale::rescale_mesh;
pub use similarity::{cosine, top_k_categories};
pub use tournament::{tournament_select, Selector};

/// Knobs for the retrieval stage.
#[derive(Debug, Clone)]
pub struct RetrievalConfig {
    /// Categories kept after similarity narrowing.
    pub top_k_categories: usize,
    /// Candidates shown to the selector per tournament round.
    pub max_num_images: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self { top_k_categories: 3, max_num_images: 4 }
    }
}

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("manifest schema version {found} unsupported (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },
    #[error("embedding dimension {found} does not match library dimension {expected}")]
    DimensionMismatch { found: usize, expected: usize },
    #[error("embedding for `{0}` is not unit-norm (|1 - ‖v‖| = {1:.2e})")]
    NotUnitNorm(String, f64),
    #[error("library has no categories")]
    EmptyLibrary,
    #[error("tournament needs at least one candidate")]
    NoCandidates,
    #[error("tournament batch size must be at least 2, got {0}")]
    BatchTooSmall(usize),
    #[error("selector returned `{returned}`, not a member of its batch")]
    ForeignSelection { returned: String },
    #[error("selector failed: {0}")]
    SelectorFailed(String),
    #[error("embedder failed for part `{part}`: {reason}")]
    EmbedderFailed { part: String, reason: String },
    #[error("mesh has zero extent along axis {axis}; cannot rescale")]
    ZeroExtent { axis: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
