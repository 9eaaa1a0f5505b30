use crate::{AssetLibrary, Embedding, RetrievalError};

/// Cosine similarity in f64. For unit vectors this is their dot product,
/// in [-1, 1].
pub fn cosine(a: &Embedding, b: &Embedding) -> f64 {
    a.0.iter().zip(&b.0).map(|(&x, &y)| x as f64 * y as f64).sum()
}

/// Categories ranked by the maximum cosine similarity of any member object's
/// embedding to the query. Ties break lexicographically by category name.
pub fn top_k_categories(
    query: &Embedding,
    library: &AssetLibrary,
    k: usize,
) -> Result<Vec<(String, f64)>, RetrievalError> {
    if query.dim() != library.embedding_dim {
        return Err(RetrievalError::DimensionMismatch {
            found: query.dim(),
            expected: library.embedding_dim,
        });
    }
    if library.categories.is_empty() {
        return Err(RetrievalError::EmptyLibrary);
    }
    let mut ranked: Vec<(String, f64)> = library
        .categories
        .iter()
        .map(|(name, entries)| {
            let best = entries
                .iter()
                .map(|e| cosine(query, &e.embedding))
                .fold(f64::NEG_INFINITY, f64::max);
            (name.clone(), best)
        })
        .collect();
    // BTreeMap iteration is already lexicographic; a stable sort on the score
    // alone preserves that order among ties.
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    ranked.truncate(k);
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::path::PathBuf;

    fn library(entries: Vec<(&str, Vec<Vec<f32>>)>) -> AssetLibrary {
        let dim = entries[0].1[0].len();
        AssetLibrary {
            embedding_dim: dim,
            categories: entries
                .into_iter()
                .map(|(name, vecs)| {
                    (
                        name.to_string(),
                        vecs.into_iter()
                            .enumerate()
                            .map(|(i, v)| crate::AssetEntry {
                                id: format!("{name}_{i}"),
                                description: String::new(),
                                images: vec![],
                                embedding: Embedding::normalized(&v).unwrap(),
                                parts: vec![],
                                program: None,
                            })
                            .collect(),
                    )
                })
                .collect::<BTreeMap<_, _>>(),
            root: PathBuf::new(),
        }
    }

    #[test]
    fn exact_member_ranks_first_with_similarity_one() {
        let lib = library(vec![
            ("Cabinet", vec![vec![1.0, 0.0, 0.0]]),
            ("Chair", vec![vec![0.0, 1.0, 0.0]]),
        ]);
        let q = Embedding::normalized(&[1.0, 0.0, 0.0]).unwrap();
        let ranked = top_k_categories(&q, &lib, 2).unwrap();
        assert_eq!(ranked[0].0, "Cabinet");
        assert!((ranked[0].1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn orthogonal_query_scores_zero() {
        let lib = library(vec![("Cabinet", vec![vec![1.0, 0.0, 0.0]])]);
        let q = Embedding::normalized(&[0.0, 0.0, 1.0]).unwrap();
        let ranked = top_k_categories(&q, &lib, 1).unwrap();
        assert!(ranked[0].1.abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let lib = library(vec![("Cabinet", vec![vec![1.0, 0.0, 0.0]])]);
        let q = Embedding::normalized(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            top_k_categories(&q, &lib, 1),
            Err(RetrievalError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ties_break_lexicographically() {
        let lib = library(vec![
            ("Zebra", vec![vec![1.0, 0.0]]),
            ("Apple", vec![vec![1.0, 0.0]]),
        ]);
        let q = Embedding::normalized(&[1.0, 0.0]).unwrap();
        let ranked = top_k_categories(&q, &lib, 2).unwrap();
        assert_eq!(ranked[0].0, "Apple");
        assert_eq!(ranked[1].0, "Zebra");
    }
}
