//! Shared helpers for orchestrator integration tests.

use kinematics_core::{TriMesh, Vec3};
use orchestrator::agent::{AgentRole, AgentSet, Script, ScriptedClient};
use std::path::{Path, PathBuf};
use urdf_io::emit_obj;

/// One scripted client per role, all views over the same script.
pub fn scripted_agents(script: &Script) -> AgentSet {
    let mut agents = AgentSet::new();
    for role in AgentRole::ALL {
        agents.insert(role, Box::new(ScriptedClient::new(script.clone())));
    }
    agents
}

/// Writes a cube and a slab mesh under `dir/meshes/`.
pub fn write_basic_meshes(dir: &Path) {
    let meshes = dir.join("meshes");
    std::fs::create_dir_all(&meshes).unwrap();
    std::fs::write(
        meshes.join("cube.obj"),
        emit_obj(&TriMesh::cuboid(Vec3::new(0.5, 0.5, 0.5))),
    )
    .unwrap();
    std::fs::write(
        meshes.join("slab.obj"),
        emit_obj(&TriMesh::cuboid(Vec3::new(0.5, 0.5, 0.1))),
    )
    .unwrap();
}

pub fn repo_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Program used across loop tests: a cube stacked on a slab.
pub const STACK_PLACED: &str =
    "part base \"meshes/slab.obj\";\npart top \"meshes/cube.obj\";\nplace top on base axis +z;\n";

pub const STACK_JOINTED: &str = "part base \"meshes/slab.obj\";\npart top \"meshes/cube.obj\";\nplace top on base axis +z;\njoint prismatic top to base axis 0 0 1 limit 0 0.3;\n";

pub fn fenced(program: &str) -> String {
    format!("```art\n{program}```")
}

pub fn rating(r: i64) -> String {
    format!("{{\"realism_rating\": {r}}}")
}
