use crate::chamfer::chamfer;
use crate::joint::{joint_error, JointError, JointWorld};
use crate::link::{link_error, LinkError};
use crate::{EvalConfig, LinkPoseMode};
use kinematics_core::{aabb_of, forward_kinematics, Pose, TriMesh, UrdfModel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;
use urdf_io::model_point_clouds;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("matching is not injective: `{0}` targeted twice")]
    NonInjectiveMatching(String),
    #[error("matching references unknown {side} link `{link}`")]
    UnknownLink { side: &'static str, link: String },
    #[error("link `{0}` has no loadable mesh for Chamfer/centroid evaluation")]
    MissingMesh(String),
    #[error(transparent)]
    Urdf(#[from] urdf_io::UrdfError),
    #[error("chamfer matching supports up to 20 links per side, got {0}")]
    TooManyLinks(usize),
}

/// Failure category a joint lands in, for the corpus breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureCause {
    Link,
    Type,
    Axis,
    Origin,
    Limit,
    Invalid,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkEntry {
    /// Matched prediction link, absent when the ground-truth link went
    /// unmatched.
    pub pred_link: Option<String>,
    pub error: Option<LinkError>,
    /// Chamfer distance between the matched link surfaces, meters.
    pub chamfer: Option<f64>,
    pub success: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JointEntry {
    pub gt_joint: String,
    pub pred_joint: Option<String>,
    pub error: Option<JointError>,
    /// Verdict after the link-failure propagation rule.
    pub success: bool,
    pub cause: Option<FailureCause>,
}

/// Full per-object evaluation, keyed by ground-truth link name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    /// Marks a prediction that failed to parse or validate; all other fields
    /// are empty in that case.
    pub invalid: bool,
    pub invalid_reason: Option<String>,
    pub links: BTreeMap<String, LinkEntry>,
    pub joints: BTreeMap<String, JointEntry>,
    pub object_link_success: bool,
    pub object_joint_success: bool,
    /// Auxiliary blended per-object link loss (position meters + orientation
    /// radians, summed over links). Unit-mixing caveat: thresholds, not this
    /// scalar, define success.
    pub link_loss_blend: f64,
    pub chamfer_total: f64,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl EvalReport {
    /// Report for a prediction that never produced a valid model.
    pub fn invalid(reason: impl Into<String>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            invalid: true,
            invalid_reason: Some(reason.into()),
            links: BTreeMap::new(),
            joints: BTreeMap::new(),
            object_link_success: false,
            object_joint_success: false,
            link_loss_blend: f64::INFINITY,
            chamfer_total: f64::INFINITY,
        }
    }
}

/// Identity matching on shared link names.
pub fn match_links_by_name(pred: &UrdfModel, gt: &UrdfModel) -> BTreeMap<String, String> {
    let gt_names: BTreeSet<&str> = gt.links().iter().map(|l| l.name.as_str()).collect();
    pred.links()
        .iter()
        .filter(|l| gt_names.contains(l.name.as_str()))
        .map(|l| (l.name.clone(), l.name.clone()))
        .collect()
}

/// Minimum-total-Chamfer assignment between prediction and ground-truth links
/// (for cross-source models with foreign names). Exact assignment via subset
/// dynamic programming; both sides capped at 20 links.
pub fn match_links_by_chamfer(
    pred: &UrdfModel,
    gt: &UrdfModel,
    pred_meshes: &BTreeMap<String, TriMesh>,
    gt_meshes: &BTreeMap<String, TriMesh>,
    cfg: &EvalConfig,
) -> Result<BTreeMap<String, String>, EvalError> {
    let pred_clouds = model_point_clouds(pred, &BTreeMap::new(), cfg.chamfer_samples, cfg.seed, pred_meshes)?;
    let gt_clouds = model_point_clouds(gt, &BTreeMap::new(), cfg.chamfer_samples, cfg.seed, gt_meshes)?;
    let pred_names: Vec<&String> = pred_clouds.keys().collect();
    let gt_names: Vec<&String> = gt_clouds.keys().collect();
    if pred_names.len() > 20 || gt_names.len() > 20 {
        return Err(EvalError::TooManyLinks(pred_names.len().max(gt_names.len())));
    }
    if pred_names.is_empty() || gt_names.is_empty() {
        return Ok(BTreeMap::new());
    }

    let cost: Vec<Vec<f64>> = pred_names
        .iter()
        .map(|p| gt_names.iter().map(|g| chamfer(&pred_clouds[*p], &gt_clouds[*g])).collect())
        .collect();

    // dp over gt-subsets: assign pred links in order to distinct gt links
    // (or leave them unmatched when prediction has more links).
    let m = gt_names.len();
    let full = 1usize << m;
    let rows = pred_names.len().min(m);
    let mut dp = vec![vec![f64::INFINITY; full]; rows + 1];
    let mut choice = vec![vec![usize::MAX; full]; rows + 1];
    dp[0][0] = 0.0;
    for i in 0..rows {
        for mask in 0..full {
            if !dp[i][mask].is_finite() {
                continue;
            }
            for (g, _) in gt_names.iter().enumerate() {
                if mask & (1 << g) != 0 {
                    continue;
                }
                let next = mask | (1 << g);
                let total = dp[i][mask] + cost[i][g];
                if total < dp[i + 1][next] {
                    dp[i + 1][next] = total;
                    choice[i + 1][next] = g;
                }
            }
        }
    }
    let (mut best_mask, mut best) = (0, f64::INFINITY);
    for mask in 0..full {
        if (mask as u32).count_ones() as usize == rows && dp[rows][mask] < best {
            best = dp[rows][mask];
            best_mask = mask;
        }
    }
    let mut matching = BTreeMap::new();
    let mut mask = best_mask;
    for i in (1..=rows).rev() {
        let g = choice[i][mask];
        matching.insert(pred_names[i - 1].clone(), gt_names[g].clone());
        mask &= !(1 << g);
    }
    Ok(matching)
}

fn world_link_pose(
    model: &UrdfModel,
    poses: &BTreeMap<String, Pose>,
    meshes: &BTreeMap<String, TriMesh>,
    link: &str,
    mode: LinkPoseMode,
) -> Result<Pose, EvalError> {
    let frame = poses[link];
    match mode {
        LinkPoseMode::Frame => Ok(frame),
        LinkPoseMode::Centroid => {
            let l = model.link(link).expect("link exists");
            let mesh = meshes.get(link).ok_or_else(|| EvalError::MissingMesh(link.into()))?;
            let world = frame.compose(l.visual_origin);
            let bounds = aabb_of(&mesh.scaled(l.mesh_scale), world)
                .map_err(|_| EvalError::MissingMesh(link.into()))?;
            Ok(Pose::new(bounds.center(), frame.orientation))
        }
    }
}

/// Evaluates a prediction against ground truth under a pred→gt link matching.
///
/// Ground-truth links outside the matching count as link failures, and their
/// joints as joint failures. Joint accounting covers every ground-truth joint
/// pair where either side is movable; both-fixed pairs are structural only.
/// Any link failure marks every joint failed with cause `Link`.
pub fn evaluate(
    pred: &UrdfModel,
    gt: &UrdfModel,
    matching: &BTreeMap<String, String>,
    pred_meshes: &BTreeMap<String, TriMesh>,
    gt_meshes: &BTreeMap<String, TriMesh>,
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let mut seen_targets = BTreeSet::new();
    for (p, g) in matching {
        if pred.link(p).is_none() {
            return Err(EvalError::UnknownLink { side: "prediction", link: p.clone() });
        }
        if gt.link(g).is_none() {
            return Err(EvalError::UnknownLink { side: "ground-truth", link: g.clone() });
        }
        if !seen_targets.insert(g.clone()) {
            return Err(EvalError::NonInjectiveMatching(g.clone()));
        }
    }
    let reverse: BTreeMap<&str, &str> =
        matching.iter().map(|(p, g)| (g.as_str(), p.as_str())).collect();

    let pred_poses = forward_kinematics(pred, &BTreeMap::new()).expect("zero config");
    let gt_poses = forward_kinematics(gt, &BTreeMap::new()).expect("zero config");

    let pred_clouds = if cfg.chamfer_samples > 0 {
        model_point_clouds(pred, &BTreeMap::new(), cfg.chamfer_samples, cfg.seed, pred_meshes)?
    } else {
        BTreeMap::new()
    };
    let gt_clouds = if cfg.chamfer_samples > 0 {
        model_point_clouds(gt, &BTreeMap::new(), cfg.chamfer_samples, cfg.seed, gt_meshes)?
    } else {
        BTreeMap::new()
    };

    let mut links = BTreeMap::new();
    let mut link_loss_blend = 0.0;
    let mut chamfer_total = 0.0;
    for gt_link in gt.links() {
        let entry = match reverse.get(gt_link.name.as_str()) {
            Some(pred_link) => {
                let pose_p =
                    world_link_pose(pred, &pred_poses, pred_meshes, pred_link, cfg.link_pose_mode)?;
                let pose_g = world_link_pose(
                    gt,
                    &gt_poses,
                    gt_meshes,
                    &gt_link.name,
                    cfg.link_pose_mode,
                )?;
                let error = link_error(pose_p, pose_g, cfg);
                link_loss_blend += error.position_error + error.orientation_error;
                let link_chamfer = match (pred_clouds.get(*pred_link), gt_clouds.get(&gt_link.name))
                {
                    (Some(a), Some(b)) => {
                        let c = chamfer(a, b);
                        chamfer_total += c;
                        Some(c)
                    }
                    _ => None,
                };
                LinkEntry {
                    pred_link: Some(pred_link.to_string()),
                    error: Some(error),
                    chamfer: link_chamfer,
                    success: error.success,
                }
            }
            None => LinkEntry { pred_link: None, error: None, chamfer: None, success: false },
        };
        links.insert(gt_link.name.clone(), entry);
    }
    let object_link_success = links.values().all(|e| e.success);

    let mut joints = BTreeMap::new();
    for gt_joint in gt.joints() {
        let pred_side = reverse
            .get(gt_joint.child.as_str())
            .and_then(|pred_link| pred.joint_to(pred_link));
        let gt_movable = gt_joint.kind.is_movable();
        let pred_movable = pred_side.is_some_and(|j| j.kind.is_movable());
        if !gt_movable && !pred_movable {
            continue;
        }

        let (entry_error, pred_name) = match pred_side {
            Some(pred_joint) => {
                let e = joint_error(
                    &JointWorld::from_model(pred, pred_joint),
                    &JointWorld::from_model(gt, gt_joint),
                    cfg,
                );
                (Some(e), Some(pred_joint.name.clone()))
            }
            None => (None, None),
        };

        let own_success =
            entry_error.is_some_and(|e| e.verdict == crate::JointVerdict::Success);
        let own_cause = match entry_error {
            None => Some(FailureCause::Type),
            Some(e) => match e.verdict {
                crate::JointVerdict::Success => None,
                crate::JointVerdict::FailType => Some(FailureCause::Type),
                crate::JointVerdict::FailAxis => Some(FailureCause::Axis),
                crate::JointVerdict::FailOrigin => Some(FailureCause::Origin),
                crate::JointVerdict::FailLimit => Some(FailureCause::Limit),
            },
        };
        // Incorrect link placement marks every joint incorrect.
        let (success, cause) = if object_link_success {
            (own_success, own_cause)
        } else {
            (false, Some(FailureCause::Link))
        };
        joints.insert(
            gt_joint.name.clone(),
            JointEntry { gt_joint: gt_joint.name.clone(), pred_joint: pred_name, error: entry_error, success, cause },
        );
    }
    let object_joint_success = joints.values().all(|e| e.success);

    Ok(EvalReport {
        schema_version: REPORT_SCHEMA_VERSION,
        invalid: false,
        invalid_reason: None,
        links,
        joints,
        object_link_success,
        object_joint_success,
        link_loss_blend,
        chamfer_total,
    })
}
