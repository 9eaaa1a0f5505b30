//! Regenerates the bundled fixture assets: a 5-object library manifest with
//! synthetic embeddings, per-object ground-truth models compiled from their
//! canonical programs, scripted agent responses for hermetic runs, cached
//! text-query embeddings, and ready-to-use config files.
//!
//! Everything written here is deterministic; run it from the repository root
//! after changing fixture geometry:
//!
//! ```text
//! cargo run -p orchestrator --bin gen-fixtures
//! ```

use anyhow::{Context, Result};
use artlang::{compile, parse_artlang, FsResolver};
use kinematics_core::{TriMesh, Vec3};
use orchestrator::agent::Script;
use retrieval::{AssetEntry, AssetLibrary, AssetPart, Embedding};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use urdf_io::{emit_obj, emit_urdf};

const EMBEDDING_DIM: usize = 16;

struct PartFixture {
    name: &'static str,
    mesh: TriMesh,
    description: &'static str,
}

struct ObjectFixture {
    id: &'static str,
    category: &'static str,
    description: &'static str,
    parts: Vec<PartFixture>,
    program: &'static str,
    /// Program without joint statements, as the link actor would write it.
    link_program: &'static str,
}

/// Open shell: an axis-aligned box of `outer` half-extents with `thickness`
/// walls and one face missing.
fn shell(outer: Vec3, thickness: f64, open: char) -> TriMesh {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut add = |half: Vec3, center: Vec3| {
        let piece = TriMesh::cuboid(half);
        let offset = vertices.len();
        vertices.extend(piece.vertices.iter().map(|&v| v + center));
        triangles
            .extend(piece.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
    };
    let t = thickness / 2.0;
    let (hx, hy, hz) = (outer.x, outer.y, outer.z);
    // z walls
    if open != 'b' {
        add(Vec3::new(hx, hy, t), Vec3::new(0.0, 0.0, -(hz - t)));
    }
    if open != 'z' {
        add(Vec3::new(hx, hy, t), Vec3::new(0.0, 0.0, hz - t));
    }
    // x walls
    add(Vec3::new(t, hy, hz - thickness), Vec3::new(-(hx - t), 0.0, 0.0));
    add(Vec3::new(t, hy, hz - thickness), Vec3::new(hx - t, 0.0, 0.0));
    // y walls
    add(Vec3::new(hx - thickness, t, hz - thickness), Vec3::new(0.0, -(hy - t), 0.0));
    if open != 'y' {
        add(Vec3::new(hx - thickness, t, hz - thickness), Vec3::new(0.0, hy - t, 0.0));
    }
    TriMesh::new(vertices, triangles).expect("shell indices are valid")
}

fn fixtures() -> Vec<ObjectFixture> {
    vec![
        ObjectFixture {
            id: "cabinet_drawer",
            category: "Cabinet",
            description: "storage cabinet with a single sliding drawer",
            parts: vec![
                PartFixture {
                    name: "body",
                    mesh: shell(Vec3::new(0.5, 0.45, 0.6), 0.05, 'y'),
                    description: "open-front cabinet carcass with a drawer bay",
                },
                PartFixture {
                    name: "drawer",
                    mesh: TriMesh::cuboid(Vec3::new(0.4, 0.38, 0.12)),
                    description: "rectangular wooden drawer box",
                },
            ],
            program: "part body \"meshes/body.obj\";\npart drawer \"meshes/drawer.obj\";\nplace drawer on body axis +y clearance 0.005;\njoint prismatic drawer to body axis 0 1 0 limit 0 0.3;\n",
            link_program: "part body \"meshes/body.obj\";\npart drawer \"meshes/drawer.obj\";\nplace drawer on body axis +y clearance 0.005;\n",
        },
        ObjectFixture {
            id: "cabinet_door",
            category: "Cabinet",
            description: "storage cabinet with a hinged front door",
            parts: vec![
                PartFixture {
                    name: "body",
                    mesh: shell(Vec3::new(0.5, 0.45, 0.6), 0.05, 'y'),
                    description: "open-front cabinet carcass with shelf space",
                },
                PartFixture {
                    name: "door",
                    mesh: TriMesh::cuboid(Vec3::new(0.48, 0.02, 0.55)),
                    description: "flat cabinet door panel",
                },
            ],
            program: "part body \"meshes/body.obj\";\npart door \"meshes/door.obj\";\nplace door on body axis +y clearance 0.002;\njoint revolute door to body axis 0 0 1 pivot 0.48 0.472 0 limit 0 1.57;\n",
            link_program: "part body \"meshes/body.obj\";\npart door \"meshes/door.obj\";\nplace door on body axis +y clearance 0.002;\n",
        },
        ObjectFixture {
            id: "laptop",
            category: "Laptop",
            description: "laptop computer with a folding screen",
            parts: vec![
                PartFixture {
                    name: "base",
                    mesh: TriMesh::cuboid(Vec3::new(0.35, 0.25, 0.02)),
                    description: "laptop keyboard base slab",
                },
                PartFixture {
                    name: "lid",
                    mesh: TriMesh::cuboid(Vec3::new(0.35, 0.01, 0.23)),
                    description: "thin laptop screen lid",
                },
            ],
            program: "part base \"meshes/base.obj\";\npart lid \"meshes/lid.obj\";\nplace lid on base axis +z clearance 0.002;\njoint revolute lid to base axis 1 0 0 pivot 0 0 0.022 limit 0 1.9;\n",
            link_program: "part base \"meshes/base.obj\";\npart lid \"meshes/lid.obj\";\nplace lid on base axis +z clearance 0.002;\n",
        },
        ObjectFixture {
            id: "sliding_window",
            category: "Window",
            description: "window with a pane that slides sideways",
            parts: vec![
                PartFixture {
                    name: "sill",
                    mesh: TriMesh::cuboid(Vec3::new(0.6, 0.06, 0.04)),
                    description: "long window sill rail",
                },
                PartFixture {
                    name: "pane",
                    mesh: TriMesh::cuboid(Vec3::new(0.3, 0.015, 0.4)),
                    description: "glass window pane in a slim frame",
                },
            ],
            program: "part sill \"meshes/sill.obj\";\npart pane \"meshes/pane.obj\";\nplace pane on sill axis +z clearance 0.001;\njoint prismatic pane to sill axis 1 0 0 limit 0 0.25;\n",
            link_program: "part sill \"meshes/sill.obj\";\npart pane \"meshes/pane.obj\";\nplace pane on sill axis +z clearance 0.001;\n",
        },
        ObjectFixture {
            id: "box_lid",
            category: "Box",
            description: "storage box with a flip-up lid",
            parts: vec![
                PartFixture {
                    name: "box",
                    mesh: shell(Vec3::new(0.3, 0.25, 0.2), 0.03, 'z'),
                    description: "open-top storage box",
                },
                PartFixture {
                    name: "lid",
                    mesh: TriMesh::cuboid(Vec3::new(0.32, 0.27, 0.02)),
                    description: "flat box lid slab",
                },
            ],
            program: "part box \"meshes/box.obj\";\npart lid \"meshes/lid.obj\";\nplace lid on box axis +z clearance 0.002;\njoint revolute lid to box axis 1 0 0 pivot 0 -0.25 0.202 limit 0 1.5;\n",
            link_program: "part box \"meshes/box.obj\";\npart lid \"meshes/lid.obj\";\nplace lid on box axis +z clearance 0.002;\n",
        },
    ]
}

fn basis(dim: usize, index: usize, weight: f32) -> Vec<f32> {
    let mut v = vec![0.0; dim];
    v[index] = weight;
    v
}

fn add(a: &[f32], b: &[f32]) -> Vec<f32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn category_base(category: &str) -> Vec<f32> {
    let index = match category {
        "Cabinet" => 0,
        "Laptop" => 1,
        "Window" => 2,
        "Box" => 3,
        other => panic!("unknown category {other}"),
    };
    basis(EMBEDDING_DIM, index, 1.0)
}

fn main() -> Result<()> {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("fixtures"));
    let objects = fixtures();

    let library_dir = root.join("library");
    let gt_dir = root.join("gt");
    let programs_dir = root.join("programs");
    let scripts_dir = root.join("scripts");
    let configs_dir = root.join("configs");
    for dir in [&library_dir, &gt_dir, &programs_dir, &scripts_dir, &configs_dir] {
        std::fs::create_dir_all(dir)?;
    }

    // -- library manifest + meshes ------------------------------------------
    let mut categories: BTreeMap<String, Vec<AssetEntry>> = BTreeMap::new();
    let mut text_queries: BTreeMap<String, String> = BTreeMap::new();
    for (object_index, object) in objects.iter().enumerate() {
        let object_embedding = Embedding::normalized(&add(
            &category_base(object.category),
            &basis(EMBEDDING_DIM, 4 + object_index, 0.3),
        ))
        .expect("non-zero");

        let mut parts = Vec::new();
        for (part_index, part) in object.parts.iter().enumerate() {
            let mesh_rel = format!("meshes/{}/{}.obj", object.id, part.name);
            let mesh_path = library_dir.join(&mesh_rel);
            std::fs::create_dir_all(mesh_path.parent().unwrap())?;
            std::fs::write(&mesh_path, emit_obj(&part.mesh))?;

            let extents = part.mesh.aabb().expect("fixture mesh").extents();
            let part_embedding = Embedding::normalized(&add(
                &add(
                    &category_base(object.category),
                    &basis(EMBEDDING_DIM, 4 + object_index, 0.5),
                ),
                &basis(EMBEDDING_DIM, 9 + part_index, 0.8),
            ))
            .expect("non-zero");
            text_queries.insert(part.description.to_string(), part_embedding.to_b64());
            parts.push(AssetPart {
                name: part.name.to_string(),
                mesh: mesh_rel,
                description: part.description.to_string(),
                dimensions: [extents.x, extents.y, extents.z],
                embedding: part_embedding,
            });
        }

        categories.entry(object.category.to_string()).or_default().push(AssetEntry {
            id: object.id.to_string(),
            description: object.description.to_string(),
            images: vec![],
            embedding: object_embedding,
            parts,
            program: Some(object.program.to_string()),
        });
    }
    let library = AssetLibrary {
        embedding_dim: EMBEDDING_DIM,
        categories,
        root: library_dir.clone(),
    };
    library.save(&library_dir.join("manifest.json"))?;
    std::fs::write(
        root.join("queries.json"),
        serde_json::to_string_pretty(&text_queries)? + "\n",
    )?;

    // -- ground truths compiled from the canonical programs ------------------
    for object in &objects {
        std::fs::write(programs_dir.join(format!("{}.art", object.id)), object.program)?;

        let object_gt = gt_dir.join(object.id);
        std::fs::create_dir_all(object_gt.join("meshes"))?;
        for part in &object.parts {
            std::fs::write(
                object_gt.join("meshes").join(format!("{}.obj", part.name)),
                emit_obj(&part.mesh),
            )?;
        }
        let program = parse_artlang(object.program)
            .with_context(|| format!("{} program", object.id))?;
        let resolver = FsResolver { base_dir: object_gt.clone() };
        let (model, _) =
            compile(&program, &resolver).with_context(|| format!("{} compile", object.id))?;
        std::fs::write(object_gt.join("model.urdf"), emit_urdf(&model))?;
    }

    // -- mock agent scripts ---------------------------------------------------
    for object in &objects {
        let mut script = Script::default();
        script.responses.insert("selector".into(), vec![object.id.to_string()]);
        script.responses.insert(
            "link_actor".into(),
            vec![format!("```art\n{}```", object.link_program)],
        );
        script
            .responses
            .insert("link_critic".into(), vec!["{\"realism_rating\": 7}".into()]);
        script
            .responses
            .insert("joint_actor".into(), vec![format!("```art\n{}```", object.program)]);
        script
            .responses
            .insert("joint_critic".into(), vec!["{\"realism_rating\": 8}".into()]);
        // Targeted-affordance runs consume one extra response.
        let moving = object.parts.last().expect("two parts").name;
        script.responses.insert("affordance".into(), vec![moving.to_string()]);
        std::fs::write(
            scripts_dir.join(format!("{}_video.json", object.id)),
            serde_json::to_string_pretty(&script)? + "\n",
        )?;

        let config = format!(
            "[endpoints.default]\nmode = \"script\"\nscript = \"../scripts/{}_video.json\"\n",
            object.id
        );
        std::fs::write(configs_dir.join(format!("{}_video.toml", object.id)), config)?;
    }

    // Needs-one-correction script: the joint actor starts with a wrong axis,
    // the critic flags it, the corrected program lands above the threshold.
    {
        let object = &objects[0];
        let wrong = object.program.replace("axis 0 1 0", "axis 0 0 1");
        assert_ne!(wrong, object.program);
        let mut script = Script::default();
        script.responses.insert("selector".into(), vec![object.id.to_string()]);
        script.responses.insert(
            "link_actor".into(),
            vec![format!("```art\n{}```", object.link_program)],
        );
        script
            .responses
            .insert("link_critic".into(), vec!["{\"realism_rating\": 6}".into()]);
        script.responses.insert(
            "joint_actor".into(),
            vec![format!("```art\n{wrong}```"), format!("```art\n{}```", object.program)],
        );
        script.responses.insert(
            "joint_critic".into(),
            vec![
                "{\"realism_rating\": 3, \"failure_case\": \"joint_axis\", \"issues\": [{\"line\": 4, \"message\": \"the drawer should slide along the global y axis, not z\"}]}".into(),
                "{\"realism_rating\": 8}".into(),
            ],
        );
        std::fs::write(
            scripts_dir.join("cabinet_drawer_improve.json"),
            serde_json::to_string_pretty(&script)? + "\n",
        )?;
        std::fs::write(
            configs_dir.join("cabinet_drawer_improve.toml"),
            "[endpoints.default]\nmode = \"script\"\nscript = \"../scripts/cabinet_drawer_improve.json\"\n",
        )?;
    }

    // Text-modality demo: specifier + planner + actors, cached query vectors.
    {
        let object = &objects[0];
        let body = &object.parts[0];
        let drawer = &object.parts[1];
        let body_extents = body.mesh.aabb().unwrap().extents();
        let drawer_extents = drawer.mesh.aabb().unwrap().extents();
        let planner_json = serde_json::json!({
            "parts": [
                {"name": "body", "description": body.description,
                 "dimensions": [body_extents.x, body_extents.y, body_extents.z]},
                {"name": "drawer", "description": drawer.description,
                 "dimensions": [drawer_extents.x, drawer_extents.y, drawer_extents.z]},
            ]
        });
        let mut script = Script::default();
        script.responses.insert(
            "task_specifier".into(),
            vec!["A freestanding storage cabinet about one meter tall. The rectangular carcass is open at the front; a single wooden drawer box fills the bay and slides straight out toward the viewer along the front-back axis by about thirty centimeters.".into()],
        );
        script
            .responses
            .insert("layout_planner".into(), vec![planner_json.to_string()]);
        script.responses.insert(
            "link_actor".into(),
            vec![format!("```art\n{}```", object.link_program)],
        );
        script
            .responses
            .insert("joint_actor".into(), vec![format!("```art\n{}```", object.program)]);
        std::fs::write(
            scripts_dir.join("text_demo.json"),
            serde_json::to_string_pretty(&script)? + "\n",
        )?;
        std::fs::write(
            configs_dir.join("text_demo.toml"),
            "[endpoints.default]\nmode = \"script\"\nscript = \"../scripts/text_demo.json\"\n\n[embedding]\nmode = \"cached\"\ncache = \"../queries.json\"\n",
        )?;
    }

    write_sidecars(&library, &gt_dir)?;
    println!("fixtures written under {}", root.display());
    Ok(())
}

/// Per-object query-embedding sidecars, ready to copy next to input frames.
fn write_sidecars(library: &AssetLibrary, gt_dir: &Path) -> Result<()> {
    for (_, entry) in library.entries() {
        let sidecar = serde_json::json!({ "embedding_b64": entry.embedding.to_b64() });
        std::fs::write(
            gt_dir.join(&entry.id).join("embedding.json"),
            serde_json::to_string_pretty(&sidecar)? + "\n",
        )?;
    }
    Ok(())
}
