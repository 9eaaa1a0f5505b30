use kinematics_core::{UnitQuat, Vec3};

/// Fixed-axis XYZ roll-pitch-yaw to quaternion: `R = Rz(yaw)·Ry(pitch)·Rx(roll)`.
pub fn rpy_to_quat(roll: f64, pitch: f64, yaw: f64) -> UnitQuat {
    let qx = UnitQuat::from_axis_angle(Vec3::X, roll).unwrap();
    let qy = UnitQuat::from_axis_angle(Vec3::Y, pitch).unwrap();
    let qz = UnitQuat::from_axis_angle(Vec3::Z, yaw).unwrap();
    qz.mul(qy).mul(qx)
}

/// Quaternion back to fixed-axis XYZ roll-pitch-yaw.
///
/// At gimbal lock (|pitch| = π/2) roll is pinned to 0 and the remaining
/// rotation folds into yaw.
pub fn quat_to_rpy(q: UnitQuat) -> (f64, f64, f64) {
    let (w, x, y, z) = (q.w, q.x, q.y, q.z);
    // Entries of R = Rz(yaw)·Ry(pitch)·Rx(roll).
    let m00 = 1.0 - 2.0 * (y * y + z * z);
    let m10 = 2.0 * (x * y + w * z);
    let m20 = 2.0 * (x * z - w * y);
    let m21 = 2.0 * (y * z + w * x);
    let m22 = 1.0 - 2.0 * (x * x + y * y);

    let sp = (-m20).clamp(-1.0, 1.0);
    if sp.abs() > 1.0 - 1e-12 {
        // Roll folds into yaw at the singularity; R reduces to Rz(yaw')·Ry(±π/2)
        // whose (0,1)/(1,1) entries are (-sin yaw', cos yaw') for either sign.
        let pitch = sp.asin();
        let m01 = 2.0 * (x * y - w * z);
        let m11 = 1.0 - 2.0 * (x * x + z * z);
        return (0.0, pitch, (-m01).atan2(m11));
    }
    (m21.atan2(m22), sp.asin(), m10.atan2(m00))
}
