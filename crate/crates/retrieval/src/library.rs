use crate::RetrievalError;
use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Unit-norm embedding vector, stored in manifests as base64-encoded
/// little-endian f32.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(pub Vec<f32>);

impl Embedding {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt()
    }

    pub fn to_b64(&self) -> String {
        let mut bytes = Vec::with_capacity(self.0.len() * 4);
        for v in &self.0 {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        B64.encode(bytes)
    }

    pub fn from_b64(text: &str) -> Result<Self, RetrievalError> {
        let bytes = B64
            .decode(text.trim())
            .map_err(|e| RetrievalError::Manifest(format!("bad embedding base64: {e}")))?;
        if bytes.len() % 4 != 0 {
            return Err(RetrievalError::Manifest(format!(
                "embedding blob length {} is not a multiple of 4",
                bytes.len()
            )));
        }
        Ok(Embedding(
            bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect(),
        ))
    }

    /// Normalizes a raw vector into an embedding; zero vectors are rejected.
    pub fn normalized(raw: &[f32]) -> Option<Self> {
        let norm = raw.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        Some(Embedding(raw.iter().map(|&v| (v as f64 / norm) as f32).collect()))
    }
}

/// One part mesh of a library object.
#[derive(Debug, Clone)]
pub struct AssetPart {
    pub name: String,
    /// Mesh path relative to the manifest directory.
    pub mesh: String,
    pub description: String,
    /// Nominal part dimensions, meters.
    pub dimensions: [f64; 3],
    pub embedding: Embedding,
}

/// One template object: its parts, image references, and object-level
/// embedding.
#[derive(Debug, Clone)]
pub struct AssetEntry {
    pub id: String,
    pub description: String,
    pub images: Vec<String>,
    pub embedding: Embedding,
    pub parts: Vec<AssetPart>,
    /// Articulation program shipped with the fixture object, if any.
    pub program: Option<String>,
}

/// Category-indexed asset library with a uniform embedding dimension.
#[derive(Debug, Clone)]
pub struct AssetLibrary {
    pub embedding_dim: usize,
    pub categories: BTreeMap<String, Vec<AssetEntry>>,
    /// Directory the manifest was loaded from; mesh/image paths resolve
    /// against it.
    pub root: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct ManifestPart {
    name: String,
    mesh: String,
    description: String,
    dimensions: [f64; 3],
    embedding_b64: String,
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    id: String,
    description: String,
    #[serde(default)]
    images: Vec<String>,
    embedding_b64: String,
    parts: Vec<ManifestPart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    program: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema_version: u32,
    embedding_dim: usize,
    categories: BTreeMap<String, Vec<ManifestEntry>>,
}

impl AssetLibrary {
    pub fn load(manifest_path: &Path) -> Result<Self, RetrievalError> {
        let text = std::fs::read_to_string(manifest_path)?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| RetrievalError::Manifest(e.to_string()))?;
        if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(RetrievalError::SchemaVersion {
                found: manifest.schema_version,
                expected: MANIFEST_SCHEMA_VERSION,
            });
        }
        let root = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();

        let mut categories = BTreeMap::new();
        for (category, entries) in manifest.categories {
            let mut out = Vec::with_capacity(entries.len());
            for entry in entries {
                let embedding = Embedding::from_b64(&entry.embedding_b64)?;
                check_embedding(&embedding, manifest.embedding_dim, &entry.id)?;
                let mut parts = Vec::with_capacity(entry.parts.len());
                for part in entry.parts {
                    let part_embedding = Embedding::from_b64(&part.embedding_b64)?;
                    check_embedding(
                        &part_embedding,
                        manifest.embedding_dim,
                        &format!("{}/{}", entry.id, part.name),
                    )?;
                    parts.push(AssetPart {
                        name: part.name,
                        mesh: part.mesh,
                        description: part.description,
                        dimensions: part.dimensions,
                        embedding: part_embedding,
                    });
                }
                out.push(AssetEntry {
                    id: entry.id,
                    description: entry.description,
                    images: entry.images,
                    embedding,
                    parts,
                    program: entry.program,
                });
            }
            categories.insert(category, out);
        }
        if categories.is_empty() {
            return Err(RetrievalError::EmptyLibrary);
        }
        Ok(Self { embedding_dim: manifest.embedding_dim, categories, root })
    }

    pub fn save(&self, manifest_path: &Path) -> Result<(), RetrievalError> {
        let manifest = Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            embedding_dim: self.embedding_dim,
            categories: self
                .categories
                .iter()
                .map(|(category, entries)| {
                    (
                        category.clone(),
                        entries
                            .iter()
                            .map(|e| ManifestEntry {
                                id: e.id.clone(),
                                description: e.description.clone(),
                                images: e.images.clone(),
                                embedding_b64: e.embedding.to_b64(),
                                parts: e
                                    .parts
                                    .iter()
                                    .map(|p| ManifestPart {
                                        name: p.name.clone(),
                                        mesh: p.mesh.clone(),
                                        description: p.description.clone(),
                                        dimensions: p.dimensions,
                                        embedding_b64: p.embedding.to_b64(),
                                    })
                                    .collect(),
                                program: e.program.clone(),
                            })
                            .collect(),
                    )
                })
                .collect(),
        };
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| RetrievalError::Manifest(e.to_string()))?;
        std::fs::write(manifest_path, json + "\n")?;
        Ok(())
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &AssetEntry)> {
        self.categories
            .iter()
            .flat_map(|(category, entries)| entries.iter().map(move |e| (category.as_str(), e)))
    }

    pub fn entry(&self, id: &str) -> Option<(&str, &AssetEntry)> {
        self.entries().find(|(_, e)| e.id == id)
    }

    /// All parts across the library, with their category and object id.
    pub fn parts(&self) -> impl Iterator<Item = (&str, &AssetEntry, &AssetPart)> {
        self.entries().flat_map(|(category, entry)| {
            entry.parts.iter().map(move |p| (category, entry, p))
        })
    }
}

fn check_embedding(e: &Embedding, dim: usize, owner: &str) -> Result<(), RetrievalError> {
    if e.dim() != dim {
        return Err(RetrievalError::DimensionMismatch { found: e.dim(), expected: dim });
    }
    let drift = (e.norm() - 1.0).abs();
    if drift > 1e-6 {
        return Err(RetrievalError::NotUnitNorm(owner.to_string(), drift));
    }
    Ok(())
}
