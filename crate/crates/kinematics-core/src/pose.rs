use crate::{UnitQuat, Vec3};

/// Rigid pose: a position plus a unit-quaternion orientation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: UnitQuat,
}

impl Pose {
    pub const IDENTITY: Pose = Pose { position: Vec3::ZERO, orientation: UnitQuat::IDENTITY };

    pub fn new(position: Vec3, orientation: UnitQuat) -> Self {
        Self { position, orientation }
    }

    pub fn from_translation(position: Vec3) -> Self {
        Self { position, orientation: UnitQuat::IDENTITY }
    }

    pub fn from_rotation(orientation: UnitQuat) -> Self {
        Self { position: Vec3::ZERO, orientation }
    }

    /// Pose of frame `other` expressed through `self` (rotate-then-translate):
    /// the result maps a point from `other`'s local coordinates into the frame
    /// `self` is expressed in.
    pub fn compose(self, other: Pose) -> Pose {
        Pose {
            position: self.position + self.orientation.rotate(other.position),
            orientation: self.orientation.mul(other.orientation),
        }
    }

    /// Inverse transform: `p.compose(p.inverse()) == identity` up to rounding.
    pub fn inverse(self) -> Pose {
        let inv_q = self.orientation.conjugate();
        Pose {
            position: inv_q.rotate(-self.position),
            orientation: inv_q,
        }
    }

    /// Maps a point from this frame's local coordinates to the parent frame.
    pub fn transform_point(self, p: Vec3) -> Vec3 {
        self.position + self.orientation.rotate(p)
    }

    /// Rotates a direction vector (no translation).
    pub fn transform_dir(self, d: Vec3) -> Vec3 {
        self.orientation.rotate(d)
    }
}

/// Composes two poses; free-function form of [`Pose::compose`].
pub fn compose(a: Pose, b: Pose) -> Pose {
    a.compose(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_composes_to_identity() {
        let p = Pose::IDENTITY.compose(Pose::IDENTITY);
        assert_eq!(p, Pose::IDENTITY);
    }

    #[test]
    fn identity_is_neutral() {
        let p = Pose::new(
            Vec3::new(0.3, -1.2, 5.0),
            UnitQuat::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 0.4).unwrap(),
        );
        let left = Pose::IDENTITY.compose(p);
        let right = p.compose(Pose::IDENTITY);
        assert!((left.position - p.position).norm() < 1e-12);
        assert!((right.position - p.position).norm() < 1e-12);
        assert!(left.orientation.dot(p.orientation).abs() > 1.0 - 1e-12);
    }

    #[test]
    fn translations_add() {
        let a = Pose::from_translation(Vec3::new(1.0, 0.0, 0.0));
        let b = Pose::from_translation(Vec3::new(0.0, 2.0, 0.0));
        let c = a.compose(b);
        assert!((c.position - Vec3::new(1.0, 2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        let p = Pose::new(
            Vec3::new(0.5, 2.0, -0.7),
            UnitQuat::from_axis_angle(Vec3::new(0.2, 0.9, -0.4), 1.3).unwrap(),
        );
        let id = p.compose(p.inverse());
        assert!(id.position.norm() < 1e-12);
        assert!(id.orientation.dot(UnitQuat::IDENTITY).abs() > 1.0 - 1e-12);
    }
}
