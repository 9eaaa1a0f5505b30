//! Ranking and matching against exhaustive oracles, plus manifest round
//! trips through the file system.

use kinematics_core::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retrieval::{
    cosine, match_parts_by_text, rescale_mesh, top_k_categories, AssetEntry, AssetLibrary,
    AssetPart, Embedding, PartSpec, RetrievalError,
};
use std::collections::BTreeMap;
use std::path::PathBuf;

fn random_embedding(rng: &mut ChaCha8Rng, dim: usize) -> Embedding {
    loop {
        let raw: Vec<f32> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Some(e) = Embedding::normalized(&raw) {
            return e;
        }
    }
}

fn random_library(rng: &mut ChaCha8Rng, categories: usize, per_category: usize, dim: usize) -> AssetLibrary {
    let categories: BTreeMap<String, Vec<AssetEntry>> = (0..categories)
        .map(|c| {
            let name = format!("cat_{c:02}");
            let entries = (0..per_category)
                .map(|i| AssetEntry {
                    id: format!("{name}_obj{i}"),
                    description: format!("object {i} of {name}"),
                    images: vec![],
                    embedding: random_embedding(rng, dim),
                    parts: (0..2)
                        .map(|p| AssetPart {
                            name: format!("part{p}"),
                            mesh: format!("meshes/{name}_obj{i}/part{p}.obj"),
                            description: format!("part {p} of object {i}"),
                            dimensions: [0.5, 0.5, 0.5],
                            embedding: random_embedding(rng, dim),
                        })
                        .collect(),
                    program: None,
                })
                .collect();
            (name, entries)
        })
        .collect();
    AssetLibrary { embedding_dim: dim, categories, root: PathBuf::new() }
}

#[test]
fn top_k_matches_exhaustive_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let library = random_library(&mut rng, 10, 5, 16);
    for _ in 0..20 {
        let query = random_embedding(&mut rng, 16);
        let ranked = top_k_categories(&query, &library, 5).unwrap();

        let mut oracle: Vec<(String, f64)> = library
            .categories
            .iter()
            .map(|(name, entries)| {
                let best = entries
                    .iter()
                    .map(|e| cosine(&query, &e.embedding))
                    .fold(f64::NEG_INFINITY, f64::max);
                (name.clone(), best)
            })
            .collect();
        oracle.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        oracle.truncate(5);

        assert_eq!(ranked.len(), 5);
        for ((got_name, got_score), (want_name, want_score)) in ranked.iter().zip(&oracle) {
            assert_eq!(got_name, want_name);
            assert!((got_score - want_score).abs() < 1e-12);
        }
    }
}

#[test]
fn part_matching_matches_exhaustive_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let library = random_library(&mut rng, 10, 10, 16);

    let parts: Vec<PartSpec> = (0..20)
        .map(|i| PartSpec {
            name: format!("part_{i}"),
            description: format!("query text {i}"),
            dimensions: [0.3, 0.3, 0.3],
        })
        .collect();

    // Deterministic fake embedder keyed by the description text.
    let mut cache: BTreeMap<String, Embedding> = BTreeMap::new();
    let mut embed_rng = ChaCha8Rng::seed_from_u64(93);
    for part in &parts {
        cache.insert(part.description.clone(), random_embedding(&mut embed_rng, 16));
    }
    let cache_for_oracle = cache.clone();
    let mut embedder =
        move |text: &str| -> Result<Embedding, String> { Ok(cache.get(text).unwrap().clone()) };

    let matches = match_parts_by_text(&parts, &library, &mut embedder).unwrap();
    assert_eq!(matches.len(), 20);

    for part in &parts {
        let query = &cache_for_oracle[&part.description];
        let best = library
            .parts()
            .map(|(_, entry, lib_part)| {
                (cosine(query, &lib_part.embedding), entry.id.clone(), lib_part.name.clone())
            })
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap();
        let got = &matches[&part.name];
        assert_eq!((got.object_id.clone(), got.part_name.clone()), (best.1, best.2));
        assert!((got.similarity - best.0).abs() < 1e-12);
    }
}

#[test]
fn identical_description_matches_with_similarity_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(94);
    let library = random_library(&mut rng, 3, 2, 8);
    let (_, _, target) = library.parts().nth(4).unwrap();
    let target_embedding = target.embedding.clone();
    let target_mesh = target.mesh.clone();

    let parts = vec![PartSpec {
        name: "wanted".into(),
        description: "exactly that part".into(),
        dimensions: [1.0, 1.0, 1.0],
    }];
    let mut embedder =
        move |_: &str| -> Result<Embedding, String> { Ok(target_embedding.clone()) };
    let matches = match_parts_by_text(&parts, &library, &mut embedder).unwrap();
    assert_eq!(matches["wanted"].mesh, target_mesh);
    assert!((matches["wanted"].similarity - 1.0).abs() < 1e-5);
}

#[test]
fn embedder_failure_carries_part_context() {
    let mut rng = ChaCha8Rng::seed_from_u64(95);
    let library = random_library(&mut rng, 2, 2, 8);
    let parts = vec![PartSpec {
        name: "broken".into(),
        description: "whatever".into(),
        dimensions: [1.0, 1.0, 1.0],
    }];
    let mut embedder = |_: &str| -> Result<Embedding, String> { Err("offline".into()) };
    match match_parts_by_text(&parts, &library, &mut embedder) {
        Err(RetrievalError::EmbedderFailed { part, reason }) => {
            assert_eq!(part, "broken");
            assert_eq!(reason, "offline");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn manifest_roundtrips_through_disk() {
    let mut rng = ChaCha8Rng::seed_from_u64(96);
    let library = random_library(&mut rng, 4, 3, 12);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("library.json");
    library.save(&path).unwrap();
    let loaded = AssetLibrary::load(&path).unwrap();
    assert_eq!(loaded.embedding_dim, 12);
    assert_eq!(loaded.categories.len(), 4);
    for ((name_a, entries_a), (name_b, entries_b)) in
        library.categories.iter().zip(&loaded.categories)
    {
        assert_eq!(name_a, name_b);
        for (a, b) in entries_a.iter().zip(entries_b) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.embedding, b.embedding);
            assert_eq!(a.parts.len(), b.parts.len());
        }
    }
}

#[test]
fn non_unit_embedding_is_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("library.json");
    let bad = Embedding(vec![0.5, 0.5]);
    let library = AssetLibrary {
        embedding_dim: 2,
        categories: BTreeMap::from([(
            "Cat".to_string(),
            vec![AssetEntry {
                id: "obj".into(),
                description: String::new(),
                images: vec![],
                embedding: bad,
                parts: vec![],
                program: None,
            }],
        )]),
        root: PathBuf::new(),
    };
    library.save(&path).unwrap();
    assert!(matches!(AssetLibrary::load(&path), Err(RetrievalError::NotUnitNorm(id, _)) if id == "obj"));
}

#[test]
fn random_rescale_hits_target_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    for _ in 0..50 {
        let verts: Vec<Vec3> = (0..12)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        let tris: Vec<[usize; 3]> = (0..10).map(|i| [i, i + 1, i + 2]).collect();
        let mesh = kinematics_core::TriMesh::new(verts, tris).unwrap();
        if mesh.aabb().unwrap().extents().x < 1e-6 {
            continue;
        }
        let target = Vec3::new(
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
            rng.gen_range(0.1..3.0),
        );
        let (scaled, _) = rescale_mesh(&mesh, target).unwrap();
        let extents = scaled.aabb().unwrap().extents();
        assert!((extents - target).norm() < 1e-9);
    }
}
