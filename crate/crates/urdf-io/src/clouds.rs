use crate::{parse_obj, UrdfError};
use kinematics_core::{forward_kinematics, sample_surface, MeshRef, PointCloud, TriMesh, UrdfModel};
use std::collections::BTreeMap;
use std::path::Path;

/// Loads every link's mesh, resolving file references relative to `base_dir`.
/// Links without geometry are simply absent from the result.
pub fn load_link_meshes(
    model: &UrdfModel,
    base_dir: &Path,
) -> Result<BTreeMap<String, TriMesh>, UrdfError> {
    let mut meshes = BTreeMap::new();
    for link in model.links() {
        match &link.mesh {
            None => {}
            Some(MeshRef::Inline(mesh)) => {
                meshes.insert(link.name.clone(), mesh.clone());
            }
            Some(MeshRef::Path(path)) => {
                let full = base_dir.join(path);
                let text = std::fs::read_to_string(&full).map_err(|source| UrdfError::MeshLoad {
                    link: link.name.clone(),
                    path: full.display().to_string(),
                    source,
                })?;
                meshes.insert(link.name.clone(), parse_obj(&text)?);
            }
        }
    }
    Ok(meshes)
}

/// Per-link surface samples in the world frame at the given configuration.
///
/// Meshes are scaled by the link's `mesh_scale`, sampled area-proportionally
/// (`n_per_link` points each, deterministic in `seed` and link order), and
/// carried through `fk_pose ∘ visual_origin`.
pub fn model_point_clouds(
    model: &UrdfModel,
    joint_values: &BTreeMap<String, f64>,
    n_per_link: usize,
    seed: u64,
    meshes: &BTreeMap<String, TriMesh>,
) -> Result<BTreeMap<String, PointCloud>, UrdfError> {
    let poses = forward_kinematics(model, joint_values)?;
    let mut clouds = BTreeMap::new();
    for (index, link) in model.links().iter().enumerate() {
        let Some(mesh) = meshes.get(&link.name) else { continue };
        let scaled = mesh.scaled(link.mesh_scale);
        let local = sample_surface(&scaled, n_per_link, seed.wrapping_add(index as u64))
            .map_err(|e| UrdfError::MeshInvalid(link.name.clone(), e))?;
        let world = poses[&link.name].compose(link.visual_origin);
        clouds.insert(link.name.clone(), local.transformed(world));
    }
    Ok(clouds)
}
