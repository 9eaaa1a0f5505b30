//! The articulation-program language: a small DSL that declares object parts,
//! places them with collision-aware snapping, and joints them with globally
//! specified axes that are resolved into relative frames through forward
//! kinematics. Programs compile to validated URDF models.
//!
//! The grammar is frozen in `docs/artlang.md` at the repository root.

mod ast;
mod collision;
mod compile;
mod parse;
mod place;
mod resolve;

pub use ast::{ArtProgram, AxisDir, JointStmt, PartDecl, PlaceStmt, SourceLoc, Stmt};
pub use collision::{collide, tri_tri_intersects, PosedMesh};
pub use compile::{
    compile, CompileDiagnostics, CompileError, CompileErrorKind, FsResolver, MapResolver,
    MeshResolver, ResolvedMesh,
};
pub use parse::{parse_artlang, pretty_print, ParseError, ParseErrorKind};
pub use place::{place_with_collision, PlacementOutcome};
pub use resolve::{resolve_joint, ResolvedJoint};
