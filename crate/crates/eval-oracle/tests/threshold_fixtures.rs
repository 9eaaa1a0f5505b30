//! Threshold fidelity (success flips exactly at 50 mm / 0.25 rad, failure on
//! strict exceedance) and failure-attribution ordering over multi-violation
//! fixtures.

use eval_oracle::{joint_error, link_error, EvalConfig, JointVerdict, JointWorld};
use kinematics_core::{JointKind, Pose, UnitQuat, Vec3};

fn pose_at(dx: f64) -> Pose {
    Pose::from_translation(Vec3::new(dx, 0.0, 0.0))
}

fn pose_rot(angle: f64) -> Pose {
    Pose::from_rotation(UnitQuat::from_axis_angle(Vec3::Z, angle).unwrap())
}

fn revolute(axis: Vec3, origin: Vec3, lower: f64, upper: f64) -> JointWorld {
    JointWorld { kind: JointKind::Revolute, axis: axis.normalized().unwrap(), origin, lower, upper }
}

fn prismatic(axis: Vec3, origin: Vec3, lower: f64, upper: f64) -> JointWorld {
    JointWorld { kind: JointKind::Prismatic, axis: axis.normalized().unwrap(), origin, lower, upper }
}

/// Returns an axis whose angle to +z is exactly `angle`.
fn tilted(angle: f64) -> Vec3 {
    Vec3::new(angle.sin(), 0.0, angle.cos())
}

#[test]
fn twelve_threshold_straddles() {
    let cfg = EvalConfig::default();
    let identity = Pose::IDENTITY;

    // 1-3: link position below / at / strictly above 50 mm.
    assert!(link_error(pose_at(0.0499), identity, &cfg).success);
    assert!(link_error(pose_at(0.050), identity, &cfg).success);
    assert!(!link_error(pose_at(0.0501), identity, &cfg).success);

    // 4-6: link orientation below / at / above 0.25 rad.
    assert!(link_error(pose_rot(0.2499), identity, &cfg).success);
    assert!(link_error(pose_rot(0.25), identity, &cfg).success);
    assert!(!link_error(pose_rot(0.2501), identity, &cfg).success);

    let gt = prismatic(Vec3::Z, Vec3::ZERO, 0.0, 0.4);

    // 7-8: joint axis at / above the angular threshold. A short motion range
    // keeps the axis tilt from spilling into the limit components.
    let gt_short = prismatic(Vec3::Z, Vec3::ZERO, 0.0, 0.02);
    let at = joint_error(&prismatic(tilted(0.25), Vec3::ZERO, 0.0, 0.02), &gt_short, &cfg);
    assert_eq!(at.verdict, JointVerdict::Success);
    let over = joint_error(&prismatic(tilted(0.2501), Vec3::ZERO, 0.0, 0.02), &gt_short, &cfg);
    assert_eq!(over.verdict, JointVerdict::FailAxis);

    // 9-10: joint origin at / above the position threshold.
    let at = joint_error(&prismatic(Vec3::Z, Vec3::new(0.050, 0.0, 0.0), 0.0, 0.4), &gt, &cfg);
    assert_eq!(at.verdict, JointVerdict::Success);
    let over =
        joint_error(&prismatic(Vec3::Z, Vec3::new(0.0501, 0.0, 0.0), 0.0, 0.4), &gt, &cfg);
    assert_eq!(over.verdict, JointVerdict::FailOrigin);

    // 11-12: limit range at / above its threshold.
    let at = joint_error(&prismatic(Vec3::Z, Vec3::ZERO, 0.0, 0.45), &gt, &cfg);
    assert_eq!(at.verdict, JointVerdict::Success);
    let over = joint_error(&prismatic(Vec3::Z, Vec3::ZERO, 0.0, 0.4501), &gt, &cfg);
    assert_eq!(over.verdict, JointVerdict::FailLimit);
}

#[test]
fn eight_attribution_ordering_fixtures() {
    let cfg = EvalConfig::default();
    let gt = revolute(Vec3::Z, Vec3::ZERO, 0.0, 1.0);

    // 1: type + axis + origin + limit all violated: type wins.
    let e = joint_error(
        &prismatic(Vec3::X, Vec3::new(1.0, 1.0, 0.0), 0.0, 9.0),
        &gt,
        &cfg,
    );
    assert_eq!(e.verdict, JointVerdict::FailType);

    // 2: axis + origin + limit violated: axis wins.
    let e = joint_error(&revolute(Vec3::X, Vec3::new(0.0, 1.0, 0.0), 0.0, 9.0), &gt, &cfg);
    assert_eq!(e.verdict, JointVerdict::FailAxis);

    // 3: origin + limit violated (axis matches): origin wins.
    let e = joint_error(&revolute(Vec3::Z, Vec3::new(1.0, 0.0, 0.0), 0.0, 9.0), &gt, &cfg);
    assert_eq!(e.verdict, JointVerdict::FailOrigin);

    // 4: only limit violated.
    let e = joint_error(&revolute(Vec3::Z, Vec3::ZERO, 0.0, 9.0), &gt, &cfg);
    assert_eq!(e.verdict, JointVerdict::FailLimit);

    // 5: type + limit (axis and origin fine): type still wins.
    let e = joint_error(&prismatic(Vec3::Z, Vec3::ZERO, 0.0, 9.0), &gt, &cfg);
    assert_eq!(e.verdict, JointVerdict::FailType);

    // 6: axis + limit (origin fine): axis wins.
    let e = joint_error(&revolute(Vec3::X, Vec3::ZERO, 0.0, 9.0), &gt, &cfg);
    assert_eq!(e.verdict, JointVerdict::FailAxis);

    // 7: reversed motion direction only: limit attribution (axis is
    // sign-insensitive, so nothing earlier fires).
    let e = joint_error(&revolute(-Vec3::Z, Vec3::ZERO, -1.0, 0.0), &gt, &cfg);
    assert!(e.axis_error.unwrap() < 1e-9);
    assert_eq!(e.verdict, JointVerdict::FailLimit);

    // 8: everything within thresholds: success. (The tilt feeds the motion
    // vector too, so it must stay well under the 0.05 range threshold.)
    let e = joint_error(
        &revolute(tilted(0.01), Vec3::new(0.03, 0.0, 0.0), 0.0, 1.02),
        &gt,
        &cfg,
    );
    assert_eq!(e.verdict, JointVerdict::Success);
}
