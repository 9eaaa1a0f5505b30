//! Parse and emit the URDF XML subset used by articulated object models, and
//! load the OBJ meshes they reference.
//!
//! Supported URDF subset: `robot`/`link`/`visual`/`geometry`/`mesh`(+scale)/
//! `origin` and `joint`/{`type`,`origin`,`parent`,`child`,`axis`,`limit`}.
//! Inertial and collision tags are parsed permissively and ignored.
//! `continuous` joints are normalized to revolute with limits `[-π, π]`.
//!
//! Orientation attributes use the standard URDF fixed-axis XYZ `rpy`
//! convention (roll about X, then pitch about Y, then yaw about Z, extrinsic).
//! Emission is deterministic: links then joints in insertion order, reals
//! printed with 9 decimal places and trailing zeros trimmed.
//!
//! Mesh paths resolve relative to the URDF file's directory; there is no
//! `package://` URI support. A model directory holds `model.urdf` plus the
//! referenced `.obj` files.

mod clouds;
mod emit;
mod obj;
mod parse;
mod rpy;

use thiserror::Error;

pub use clouds::{load_link_meshes, model_point_clouds};
pub use emit::{emit_urdf, fmt_real};
pub use obj::{emit_obj, parse_obj};
pub use parse::parse_urdf;
pub use rpy::{quat_to_rpy, rpy_to_quat};

#[derive(Debug, Error)]
pub enum UrdfError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("root element is `{0}`, expected `robot`")]
    NotARobot(String),
    #[error("<{element}> is missing required attribute `{attribute}`")]
    MissingAttribute { element: String, attribute: String },
    #[error("unknown joint type `{0}`")]
    UnknownJointType(String),
    #[error("joint `{0}` is missing <parent> or <child>")]
    MissingEndpoint(String),
    #[error("non-fixed joint `{0}` is missing <limit>")]
    MissingLimit(String),
    #[error("cannot parse `{text}` as a number in {context}")]
    BadNumber { text: String, context: String },
    #[error("expected {expected} values in `{text}` for {context}")]
    BadTuple { text: String, expected: usize, context: String },
    #[error("joint `{0}` has a zero axis")]
    ZeroAxis(String),
    #[error(transparent)]
    Model(#[from] kinematics_core::ModelError),
    #[error("OBJ line {line}: face references vertex {index} but only {vertex_count} exist")]
    ObjIndexOutOfRange { line: usize, index: i64, vertex_count: usize },
    #[error("OBJ line {line}: face has fewer than 3 vertices")]
    ObjShortFace { line: usize },
    #[error("OBJ line {line}: cannot parse `{text}`")]
    ObjBadRecord { line: usize, text: String },
    #[error("cannot load mesh `{path}` for link `{link}`: {source}")]
    MeshLoad { link: String, path: String, source: std::io::Error },
    #[error("link `{0}` has an invalid mesh: {1}")]
    MeshInvalid(String, kinematics_core::MeshError),
    #[error(transparent)]
    Fk(#[from] kinematics_core::FkError),
}
