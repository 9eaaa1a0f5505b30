//! Foundational 3D math for articulated object modeling: vectors, unit
//! quaternions, rigid poses, axis-aligned bounds, triangle meshes, point
//! clouds, and forward kinematics over a link/joint tree.
//!
//! Conventions used throughout the workspace:
//!
//! - Quaternions are scalar-first `(w, x, y, z)`, right-handed, and encode
//!   *active* rotations.
//! - Lengths are meters, angles are radians.
//! - All types are immutable values after construction; every operation is
//!   pure and safe to call from concurrent contexts without coordination.

mod fk;
mod mesh;
mod model;
mod pose;
mod quat;
mod vec3;

#[cfg(feature = "oracles")]
pub mod oracles;

pub use fk::{forward_kinematics, FkError};
pub use mesh::{aabb_of, sample_surface, Aabb, MeshError, PointCloud, TriMesh};
pub use model::{Joint, JointKind, JointLimit, Link, MeshRef, ModelError, UrdfModel};
pub use pose::{compose, Pose};
pub use quat::{quat_geodesic, UnitQuat};
pub use vec3::Vec3;
