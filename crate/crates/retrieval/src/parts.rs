use crate::similarity::cosine;
use crate::{AssetLibrary, Embedding, RetrievalError};
use kinematics_core::Vec3;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A planned object part: name, free-text description, and target dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartSpec {
    pub name: String,
    pub description: String,
    /// Width, depth, height in meters; all positive.
    pub dimensions: [f64; 3],
}

impl PartSpec {
    pub fn dimensions_vec(&self) -> Vec3 {
        Vec3::new(self.dimensions[0], self.dimensions[1], self.dimensions[2])
    }
}

/// Turns text into a unit embedding in the library's space. Backed by a
/// cached vector store or a live endpoint.
pub trait Embedder {
    fn embed(&mut self, text: &str) -> Result<Embedding, String>;
}

impl<F> Embedder for F
where
    F: FnMut(&str) -> Result<Embedding, String>,
{
    fn embed(&mut self, text: &str) -> Result<Embedding, String> {
        self(text)
    }
}

/// The library part a planned part resolved to.
#[derive(Debug, Clone, PartialEq)]
pub struct PartMatch {
    pub category: String,
    pub object_id: String,
    pub part_name: String,
    /// Mesh path relative to the library root.
    pub mesh: String,
    pub similarity: f64,
}

/// Matches each planned part to the argmax-cosine library part description.
/// Embedder failures carry the part's name for context.
pub fn match_parts_by_text(
    parts: &[PartSpec],
    library: &AssetLibrary,
    embedder: &mut dyn Embedder,
) -> Result<BTreeMap<String, PartMatch>, RetrievalError> {
    let mut out = BTreeMap::new();
    for part in parts {
        let query = embedder.embed(&part.description).map_err(|reason| {
            RetrievalError::EmbedderFailed { part: part.name.clone(), reason }
        })?;
        if query.dim() != library.embedding_dim {
            return Err(RetrievalError::DimensionMismatch {
                found: query.dim(),
                expected: library.embedding_dim,
            });
        }
        let mut best: Option<PartMatch> = None;
        for (category, entry, lib_part) in library.parts() {
            let similarity = cosine(&query, &lib_part.embedding);
            let better = match &best {
                None => true,
                Some(b) => similarity > b.similarity,
            };
            if better {
                best = Some(PartMatch {
                    category: category.to_string(),
                    object_id: entry.id.clone(),
                    part_name: lib_part.name.clone(),
                    mesh: lib_part.mesh.clone(),
                    similarity,
                });
            }
        }
        let matched = best.ok_or(RetrievalError::EmptyLibrary)?;
        out.insert(part.name.clone(), matched);
    }
    Ok(out)
}
