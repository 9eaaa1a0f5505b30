use crate::Vec3;

/// Unit quaternion, scalar-first `(w, x, y, z)`, right-handed, active rotation.
///
/// Every constructor and composition renormalizes, so `‖q‖ = 1` holds within
/// 1e-9 at all times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Default for UnitQuat {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl UnitQuat {
    pub const IDENTITY: UnitQuat = UnitQuat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds from raw components, renormalizing. `None` for a near-zero norm.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Option<Self> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if n < 1e-12 || !n.is_finite() {
            return None;
        }
        Some(Self { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    /// Rotation of `angle` radians about `axis`. The axis is normalized here;
    /// a zero-length axis is a caller error and returns `None`.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Option<Self> {
        let axis = axis.normalized()?;
        let (s, c) = (angle / 2.0).sin_cos();
        Self::new(c, axis.x * s, axis.y * s, axis.z * s)
    }

    /// Hamilton product `self * other` (apply `other` first, then `self`),
    /// renormalized.
    pub fn mul(self, o: UnitQuat) -> UnitQuat {
        let w = self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z;
        let x = self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y;
        let y = self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x;
        let z = self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w;
        // Unit * unit stays unit up to rounding; renormalize to hold the invariant.
        UnitQuat::new(w, x, y, z).expect("product of unit quaternions is non-zero")
    }

    pub fn conjugate(self) -> UnitQuat {
        UnitQuat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    /// Rotates a vector: `q v q⁻¹`.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        // Expanded form of q v q* avoiding full quaternion products.
        let u = Vec3::new(self.x, self.y, self.z);
        let uv = u.cross(v);
        let uuv = u.cross(uv);
        v + (uv * self.w + uuv) * 2.0
    }

    pub fn dot(self, o: UnitQuat) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// Geodesic distance between two orientations: `2·arccos(|q_p · q_g|)`,
/// the smallest rotation angle taking one to the other. Result in `[0, π]`,
/// symmetric, and insensitive to the quaternion double cover.
pub fn quat_geodesic(a: UnitQuat, b: UnitQuat) -> f64 {
    // |dot| can drift past 1 by ~1e-16; clamp before arccos.
    let d = a.dot(b).abs().clamp(-1.0, 1.0);
    2.0 * d.acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn geodesic_identical_is_zero() {
        let q = UnitQuat::from_axis_angle(Vec3::new(1.0, 2.0, 3.0), 0.7).unwrap();
        assert_eq!(quat_geodesic(q, q), 0.0);
    }

    #[test]
    fn geodesic_kills_double_cover() {
        let q = UnitQuat::from_axis_angle(Vec3::Y, 1.1).unwrap();
        let neg = UnitQuat { w: -q.w, x: -q.x, y: -q.y, z: -q.z };
        assert!(quat_geodesic(q, neg) < 1e-9);
    }

    #[test]
    fn geodesic_quarter_turn() {
        let q = UnitQuat::from_axis_angle(Vec3::Z, FRAC_PI_2).unwrap();
        assert!((quat_geodesic(UnitQuat::IDENTITY, q) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn rotate_quarter_turn_about_z() {
        let q = UnitQuat::from_axis_angle(Vec3::Z, FRAC_PI_2).unwrap();
        let v = q.rotate(Vec3::X);
        assert!((v - Vec3::Y).norm() < 1e-12);
    }

    #[test]
    fn zero_axis_rejected() {
        assert!(UnitQuat::from_axis_angle(Vec3::ZERO, 1.0).is_none());
    }
}
