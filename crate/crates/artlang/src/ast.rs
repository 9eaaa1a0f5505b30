use kinematics_core::{JointKind, JointLimit, Vec3};

/// 1-based source position, carried on every statement so compile errors and
/// critic feedback can point at the offending line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceLoc {
    pub line: usize,
    pub col: usize,
}

impl std::fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// One of the six world axis directions a placement can align along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisDir {
    PosX,
    NegX,
    PosY,
    NegY,
    PosZ,
    NegZ,
}

impl AxisDir {
    pub fn from_token(tok: &str) -> Option<Self> {
        match tok {
            "+x" => Some(Self::PosX),
            "-x" => Some(Self::NegX),
            "+y" => Some(Self::PosY),
            "-y" => Some(Self::NegY),
            "+z" => Some(Self::PosZ),
            "-z" => Some(Self::NegZ),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Self::PosX => "+x",
            Self::NegX => "-x",
            Self::PosY => "+y",
            Self::NegY => "-y",
            Self::PosZ => "+z",
            Self::NegZ => "-z",
        }
    }

    /// Component index of the placement axis (x=0, y=1, z=2).
    pub fn index(self) -> usize {
        match self {
            Self::PosX | Self::NegX => 0,
            Self::PosY | Self::NegY => 1,
            Self::PosZ | Self::NegZ => 2,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Self::PosX | Self::PosY | Self::PosZ => 1.0,
            Self::NegX | Self::NegY | Self::NegZ => -1.0,
        }
    }

    pub fn vector(self) -> Vec3 {
        let mut v = Vec3::ZERO;
        match self.index() {
            0 => v.x = self.sign(),
            1 => v.y = self.sign(),
            _ => v.z = self.sign(),
        }
        v
    }
}

/// `part <name> "<mesh_ref>" [scale sx sy sz];`
#[derive(Debug, Clone, PartialEq)]
pub struct PartDecl {
    pub name: String,
    pub mesh_ref: String,
    pub scale: Vec3,
    pub loc: SourceLoc,
}

/// `place <child> on <parent> axis <dir> [offset x y z] [clearance c];`
///
/// Aligns the child's and parent's mesh-bounds centers on the two axes
/// orthogonal to `axis` (plus `lateral_offset`), then seeks contact along
/// `axis`. The offset component along the placement axis is ignored: the
/// axis position is owned by the contact search.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaceStmt {
    pub child: String,
    pub parent: String,
    pub axis: AxisDir,
    pub lateral_offset: Vec3,
    pub clearance: f64,
    pub loc: SourceLoc,
}

/// `joint <kind> <child> to <parent> [axis x y z] [pivot x y z] [limit lo hi];`
///
/// `global_axis` and `global_pivot` are world-frame quantities; compilation
/// translates them into the child-relative frame.
#[derive(Debug, Clone, PartialEq)]
pub struct JointStmt {
    pub child: String,
    pub parent: String,
    pub kind: JointKind,
    pub global_axis: Vec3,
    pub global_pivot: Option<Vec3>,
    pub limit: Option<JointLimit>,
    pub loc: SourceLoc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Place(PlaceStmt),
    Joint(JointStmt),
}

impl Stmt {
    pub fn loc(&self) -> SourceLoc {
        match self {
            Stmt::Place(s) => s.loc,
            Stmt::Joint(s) => s.loc,
        }
    }
}

/// A parsed articulation program: part declarations plus ordered placement
/// and joint statements. The first declared part is the assembly root.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArtProgram {
    pub parts: Vec<PartDecl>,
    pub statements: Vec<Stmt>,
}

impl ArtProgram {
    pub fn part(&self, name: &str) -> Option<&PartDecl> {
        self.parts.iter().find(|p| p.name == name)
    }
}
