use crate::{Pose, TriMesh, Vec3};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Geometry source for a link: a file reference (resolved by IO layers,
/// relative to the model's directory) or an inline mesh.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshRef {
    Path(String),
    Inline(TriMesh),
}

/// Rigid part of an object. `visual_origin` places the (scaled) mesh within
/// the link frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub name: String,
    pub mesh: Option<MeshRef>,
    pub mesh_scale: Vec3,
    pub visual_origin: Pose,
}

impl Link {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mesh: None,
            mesh_scale: Vec3::new(1.0, 1.0, 1.0),
            visual_origin: Pose::IDENTITY,
        }
    }

    pub fn with_mesh(mut self, mesh: MeshRef) -> Self {
        self.mesh = Some(mesh);
        self
    }

    pub fn with_scale(mut self, scale: Vec3) -> Self {
        self.mesh_scale = scale;
        self
    }

    pub fn with_visual_origin(mut self, origin: Pose) -> Self {
        self.visual_origin = origin;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointKind {
    Fixed,
    Prismatic,
    Revolute,
}

impl JointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JointKind::Fixed => "fixed",
            JointKind::Prismatic => "prismatic",
            JointKind::Revolute => "revolute",
        }
    }

    pub fn is_movable(self) -> bool {
        !matches!(self, JointKind::Fixed)
    }
}

/// Motion bounds: radians for revolute, meters for prismatic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointLimit {
    pub lower: f64,
    pub upper: f64,
}

impl JointLimit {
    pub fn new(lower: f64, upper: f64) -> Option<Self> {
        (lower <= upper).then_some(Self { lower, upper })
    }

    pub fn range(self) -> f64 {
        self.upper - self.lower
    }
}

/// Kinematic connection from a parent link to a child link. `origin` is the
/// child frame relative to the parent frame at the zero configuration; `axis`
/// is expressed in the child/joint frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint {
    pub name: String,
    pub kind: JointKind,
    pub parent: String,
    pub child: String,
    pub origin: Pose,
    pub axis: Vec3,
    pub limit: Option<JointLimit>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("model has no links")]
    NoLinks,
    #[error("duplicate link name `{0}`")]
    DuplicateLinkName(String),
    #[error("duplicate joint name `{0}`")]
    DuplicateJointName(String),
    #[error("joint `{joint}` references unknown link `{link}`")]
    DanglingReference { joint: String, link: String },
    #[error("link `{link}` is the child of more than one joint")]
    MultipleParents { link: String },
    #[error("cyclic structure involving link `{0}`")]
    Cycle(String),
    #[error("model has multiple root links: {0:?}")]
    MultipleRoots(Vec<String>),
    #[error("non-fixed joint `{0}` is missing a limit")]
    MissingLimit(String),
    #[error("joint `{joint}` limit has lower {lower} > upper {upper}")]
    InvalidLimit { joint: String, lower: f64, upper: f64 },
    #[error("non-fixed joint `{0}` has a zero or non-unit axis")]
    BadAxis(String),
    #[error("link `{0}` has a non-positive mesh scale component")]
    BadScale(String),
}

/// Tree of links and joints: exactly one root link, every non-root link the
/// child of exactly one joint, no cycles, all references resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct UrdfModel {
    pub name: String,
    links: Vec<Link>,
    joints: Vec<Joint>,
}

impl UrdfModel {
    /// Validates the full set of tree invariants before admitting the model.
    pub fn new(
        name: impl Into<String>,
        links: Vec<Link>,
        joints: Vec<Joint>,
    ) -> Result<Self, ModelError> {
        if links.is_empty() {
            return Err(ModelError::NoLinks);
        }

        let mut link_names = BTreeSet::new();
        for link in &links {
            if !link_names.insert(link.name.clone()) {
                return Err(ModelError::DuplicateLinkName(link.name.clone()));
            }
            if link.mesh_scale.x <= 0.0 || link.mesh_scale.y <= 0.0 || link.mesh_scale.z <= 0.0 {
                return Err(ModelError::BadScale(link.name.clone()));
            }
        }

        let mut joint_names = BTreeSet::new();
        let mut parent_of: BTreeMap<&str, &Joint> = BTreeMap::new();
        for joint in &joints {
            if !joint_names.insert(joint.name.clone()) {
                return Err(ModelError::DuplicateJointName(joint.name.clone()));
            }
            for link in [&joint.parent, &joint.child] {
                if !link_names.contains(link) {
                    return Err(ModelError::DanglingReference {
                        joint: joint.name.clone(),
                        link: link.clone(),
                    });
                }
            }
            if joint.parent == joint.child {
                return Err(ModelError::Cycle(joint.child.clone()));
            }
            if parent_of.insert(joint.child.as_str(), joint).is_some() {
                return Err(ModelError::MultipleParents { link: joint.child.clone() });
            }
            if joint.kind.is_movable() {
                let limit = joint.limit.ok_or_else(|| ModelError::MissingLimit(joint.name.clone()))?;
                if limit.lower > limit.upper {
                    return Err(ModelError::InvalidLimit {
                        joint: joint.name.clone(),
                        lower: limit.lower,
                        upper: limit.upper,
                    });
                }
                if (joint.axis.norm() - 1.0).abs() > 1e-9 {
                    return Err(ModelError::BadAxis(joint.name.clone()));
                }
            }
        }

        let roots: Vec<&Link> =
            links.iter().filter(|l| !parent_of.contains_key(l.name.as_str())).collect();
        match roots.len() {
            0 => {
                // Every link is some joint's child; the parent chain must loop.
                return Err(ModelError::Cycle(links[0].name.clone()));
            }
            1 => {}
            _ => {
                return Err(ModelError::MultipleRoots(
                    roots.iter().map(|l| l.name.clone()).collect(),
                ));
            }
        }

        // Walk parent chains; revisiting a link marks a cycle. Chains that
        // terminate at the root are fine, and forest cases were caught above.
        for link in &links {
            let mut seen = BTreeSet::new();
            let mut current = link.name.as_str();
            while let Some(joint) = parent_of.get(current) {
                if !seen.insert(current) {
                    return Err(ModelError::Cycle(current.to_string()));
                }
                current = joint.parent.as_str();
            }
        }

        Ok(Self { name: name.into(), links, joints })
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn link(&self, name: &str) -> Option<&Link> {
        self.links.iter().find(|l| l.name == name)
    }

    pub fn joint(&self, name: &str) -> Option<&Joint> {
        self.joints.iter().find(|j| j.name == name)
    }

    /// The unique link that is never a joint child.
    pub fn root_link(&self) -> &Link {
        self.links
            .iter()
            .find(|l| !self.joints.iter().any(|j| j.child == l.name))
            .expect("validated model has a root")
    }

    /// The joint whose child is `link`, if any.
    pub fn joint_to(&self, link: &str) -> Option<&Joint> {
        self.joints.iter().find(|j| j.child == link)
    }
}
