use crate::ast::{ArtProgram, AxisDir, PlaceStmt, SourceLoc, Stmt};
use crate::collision::PosedMesh;
use crate::place::place_with_collision;
use crate::resolve::resolve_joint;
use kinematics_core::{Joint, JointKind, Link, MeshRef, Pose, TriMesh, UrdfModel, Vec3};
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Clone)]
pub enum CompileErrorKind {
    UnresolvableMesh { part: String, mesh_ref: String, reason: String },
    PlacementFailed { child: String, reason: String },
    JointResolution { child: String, reason: String },
    RootConstraint { part: String, reason: String },
    DuplicateJoint { child: String },
    Internal(String),
}

/// Compilation failure; the location points at the offending statement.
#[derive(Debug, Clone, Error)]
#[error("{}: {}", .loc.map(|l| l.to_string()).unwrap_or_else(|| "program".into()), match .kind {
    CompileErrorKind::UnresolvableMesh { part, mesh_ref, reason } =>
        format!("cannot resolve mesh `{mesh_ref}` for part `{part}`: {reason}"),
    CompileErrorKind::PlacementFailed { child, reason } =>
        format!("cannot place `{child}`: {reason}"),
    CompileErrorKind::JointResolution { child, reason } =>
        format!("cannot resolve joint for `{child}`: {reason}"),
    CompileErrorKind::RootConstraint { part, reason } => format!("`{part}`: {reason}"),
    CompileErrorKind::DuplicateJoint { child } => format!("`{child}` is the child of two joints"),
    CompileErrorKind::Internal(m) => format!("internal: {m}"),
})]
pub struct CompileError {
    pub loc: Option<SourceLoc>,
    pub kind: CompileErrorKind,
}

/// A mesh produced by a resolver, plus the reference string the compiled
/// model should carry (a path relative to wherever the model will live).
#[derive(Debug, Clone)]
pub struct ResolvedMesh {
    pub mesh: TriMesh,
    pub emit_ref: String,
}

/// Source of part geometry during compilation: the file system, an asset
/// library, or canned test meshes.
pub trait MeshResolver {
    fn resolve(&self, mesh_ref: &str) -> Result<ResolvedMesh, String>;
}

/// Resolves mesh references as OBJ paths relative to a base directory.
pub struct FsResolver {
    pub base_dir: PathBuf,
}

impl MeshResolver for FsResolver {
    fn resolve(&self, mesh_ref: &str) -> Result<ResolvedMesh, String> {
        let path = self.base_dir.join(mesh_ref);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let mesh = urdf_io::parse_obj(&text).map_err(|e| e.to_string())?;
        Ok(ResolvedMesh { mesh, emit_ref: mesh_ref.to_string() })
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompileDiagnostics {
    /// `(statement index, message)` pairs, in statement order.
    pub warnings: Vec<(usize, String)>,
    /// Total collision tests spent in placement searches.
    pub collision_iterations: u64,
}

/// Compiles a program against resolvable meshes.
///
/// Placement statements run first, in order, each against the already-posed
/// assembly; parts with no explicit placement (and not the root) receive an
/// implicit `place <part> on <root> axis +z` afterwards, in declaration
/// order. Joint statements then resolve global axes into relative frames;
/// parts left unjointed attach by fixed joints: to their placement parent
/// when placed explicitly, otherwise to the root.
pub fn compile(
    program: &ArtProgram,
    resolver: &dyn MeshResolver,
) -> Result<(UrdfModel, CompileDiagnostics), CompileError> {
    if program.parts.is_empty() {
        return Err(CompileError {
            loc: Some(SourceLoc { line: 1, col: 1 }),
            kind: CompileErrorKind::Internal("program declares no parts".into()),
        });
    }
    let mut diagnostics = CompileDiagnostics::default();
    let root = program.parts[0].name.clone();

    // Scaled geometry for placement and collision.
    let mut scaled_meshes: BTreeMap<String, TriMesh> = BTreeMap::new();
    let mut emit_refs: BTreeMap<String, String> = BTreeMap::new();
    for part in &program.parts {
        let resolved = resolver.resolve(&part.mesh_ref).map_err(|reason| CompileError {
            loc: Some(part.loc),
            kind: CompileErrorKind::UnresolvableMesh {
                part: part.name.clone(),
                mesh_ref: part.mesh_ref.clone(),
                reason,
            },
        })?;
        scaled_meshes.insert(part.name.clone(), resolved.mesh.scaled(part.scale));
        emit_refs.insert(part.name.clone(), resolved.emit_ref);
    }

    for (index, stmt) in program.statements.iter().enumerate() {
        match stmt {
            Stmt::Place(s) if s.child == root => {
                return Err(CompileError {
                    loc: Some(s.loc),
                    kind: CompileErrorKind::RootConstraint {
                        part: s.child.clone(),
                        reason: "the first declared part is the assembly root and cannot be placed"
                            .into(),
                    },
                });
            }
            Stmt::Joint(s) if s.child == root => {
                return Err(CompileError {
                    loc: Some(s.loc),
                    kind: CompileErrorKind::RootConstraint {
                        part: s.child.clone(),
                        reason:
                            "the first declared part is the assembly root and cannot be a joint child"
                                .into(),
                    },
                });
            }
            Stmt::Place(s) if s.lateral_offset.component(s.axis.index()) != 0.0 => {
                diagnostics.warnings.push((
                    index,
                    format!(
                        "offset component along {} is ignored; contact search owns that axis",
                        s.axis.token()
                    ),
                ));
            }
            _ => {}
        }
    }

    // Pass 1: world mesh poses, in statement order, root pinned at identity.
    let mut world: BTreeMap<String, Pose> = BTreeMap::new();
    world.insert(root.clone(), Pose::IDENTITY);
    let mut assembly: Vec<PosedMesh> =
        vec![PosedMesh::new(root.clone(), scaled_meshes[&root].clone(), Pose::IDENTITY)];
    let mut placement_parent: BTreeMap<String, String> = BTreeMap::new();

    let run_placement =
        |stmt: &PlaceStmt,
         world: &mut BTreeMap<String, Pose>,
         assembly: &mut Vec<PosedMesh>,
         diagnostics: &mut CompileDiagnostics|
         -> Result<(), CompileError> {
            let outcome = place_with_collision(&scaled_meshes[&stmt.child], assembly, stmt)?;
            diagnostics.collision_iterations += u64::from(outcome.iterations);
            world.insert(stmt.child.clone(), outcome.pose);
            assembly.push(PosedMesh::new(
                stmt.child.clone(),
                scaled_meshes[&stmt.child].clone(),
                outcome.pose,
            ));
            Ok(())
        };

    for stmt in &program.statements {
        if let Stmt::Place(s) = stmt {
            placement_parent.insert(s.child.clone(), s.parent.clone());
            run_placement(s, &mut world, &mut assembly, &mut diagnostics)?;
        }
    }
    for part in program.parts.iter().skip(1) {
        if world.contains_key(&part.name) {
            continue;
        }
        let implicit = PlaceStmt {
            child: part.name.clone(),
            parent: root.clone(),
            axis: AxisDir::PosZ,
            lateral_offset: Vec3::ZERO,
            clearance: 0.0,
            loc: part.loc,
        };
        run_placement(&implicit, &mut world, &mut assembly, &mut diagnostics)?;
    }

    // Pass 2: joints. Frames may move off the placed poses (revolute), so
    // origins are recomputed against final frames afterwards.
    let mut frames: BTreeMap<String, Pose> = world.clone();
    frames.insert(root.clone(), Pose::IDENTITY);
    let mut joints: Vec<Joint> = Vec::new();
    let mut jointed: BTreeMap<String, usize> = BTreeMap::new();

    for stmt in &program.statements {
        let Stmt::Joint(s) = stmt else { continue };
        if jointed.contains_key(&s.child) {
            return Err(CompileError {
                loc: Some(s.loc),
                kind: CompileErrorKind::DuplicateJoint { child: s.child.clone() },
            });
        }
        let resolved = resolve_joint(s, &world, format!("{}_joint", s.child))?;
        frames.insert(s.child.clone(), resolved.child_frame_world);
        jointed.insert(s.child.clone(), joints.len());
        joints.push(resolved.joint);
    }

    // Unjointed parts attach by fixed joints at their placed pose.
    for part in program.parts.iter().skip(1) {
        if jointed.contains_key(&part.name) {
            continue;
        }
        let parent = placement_parent.get(&part.name).unwrap_or(&root).clone();
        jointed.insert(part.name.clone(), joints.len());
        joints.push(Joint {
            name: format!("{}_joint", part.name),
            kind: JointKind::Fixed,
            parent,
            child: part.name.clone(),
            origin: Pose::IDENTITY, // recomputed below
            axis: Vec3::X,
            limit: None,
        });
    }

    for joint in &mut joints {
        let parent_frame = frames[&joint.parent];
        let child_frame = frames[&joint.child];
        joint.origin = parent_frame.inverse().compose(child_frame);
    }

    let links: Vec<Link> = program
        .parts
        .iter()
        .map(|part| {
            let frame = frames[&part.name];
            let visual = frame.inverse().compose(world[&part.name]);
            Link::new(part.name.clone())
                .with_mesh(MeshRef::Path(emit_refs[&part.name].clone()))
                .with_scale(part.scale)
                .with_visual_origin(visual)
        })
        .collect();

    let model = UrdfModel::new("assembly", links, joints).map_err(|e| CompileError {
        loc: Some(SourceLoc { line: 1, col: 1 }),
        kind: CompileErrorKind::Internal(format!("model validation: {e}")),
    })?;
    Ok((model, diagnostics))
}

/// Test/demo resolver keyed by exact mesh reference.
pub struct MapResolver {
    pub meshes: BTreeMap<String, TriMesh>,
}

impl MeshResolver for MapResolver {
    fn resolve(&self, mesh_ref: &str) -> Result<ResolvedMesh, String> {
        self.meshes
            .get(mesh_ref)
            .map(|m| ResolvedMesh { mesh: m.clone(), emit_ref: mesh_ref.to_string() })
            .ok_or_else(|| format!("no mesh registered for `{mesh_ref}`"))
    }
}
