use crate::evaluate::{EvalReport, FailureCause};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateWithCi {
    pub successes: usize,
    pub total: usize,
    pub rate: f64,
    /// Half-width of the binomial 95% Wald interval: `1.96·√(p(1−p)/n)`.
    pub ci95: f64,
}

fn rate_with_ci(successes: usize, total: usize) -> RateWithCi {
    let rate = if total == 0 { 0.0 } else { successes as f64 / total as f64 };
    let ci95 = if total == 0 { 0.0 } else { 1.96 * (rate * (1.0 - rate) / total as f64).sqrt() };
    RateWithCi { successes, total, rate, ci95 }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

fn mean_sd(values: &[f64]) -> MeanSd {
    let n = values.len();
    if n == 0 {
        return MeanSd::default();
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    MeanSd { mean, sd, n }
}

/// Corpus-level success rates, failure breakdown, and error statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateStats {
    pub objects: usize,
    pub invalid_objects: usize,
    pub link_success: RateWithCi,
    pub joint_success: RateWithCi,
    /// Joint-failure counts by cause; invalid objects contribute one count
    /// each to `invalid`.
    pub failure_counts: BTreeMap<String, usize>,
    /// Failure percentages over all counted failures, same keys.
    pub failure_percentages: BTreeMap<String, f64>,
    pub type_error_rate: RateWithCi,
    pub axis_error: MeanSd,
    pub origin_error: MeanSd,
    pub limit_range_error: MeanSd,
    pub limit_direction_error: MeanSd,
    pub chamfer: MeanSd,
}

/// Folds per-object reports into corpus statistics. Panics on an empty slice;
/// callers own the non-empty contract.
pub fn aggregate(reports: &[EvalReport]) -> AggregateStats {
    assert!(!reports.is_empty(), "aggregate needs at least one report");

    let mut link_total = 0;
    let mut link_ok = 0;
    let mut joint_total = 0;
    let mut joint_ok = 0;
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    let mut type_total = 0;
    let mut type_wrong = 0;
    let (mut axis, mut origin, mut range, mut direction, mut chamfers) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut invalid_objects = 0;

    let cause_key = |c: FailureCause| match c {
        FailureCause::Link => "link",
        FailureCause::Type => "type",
        FailureCause::Axis => "axis",
        FailureCause::Origin => "origin",
        FailureCause::Limit => "limit",
        FailureCause::Invalid => "invalid",
    };

    for report in reports {
        if report.invalid {
            invalid_objects += 1;
            *failures.entry("invalid".into()).or_default() += 1;
            continue;
        }
        for entry in report.links.values() {
            link_total += 1;
            link_ok += usize::from(entry.success);
            if let Some(c) = entry.chamfer {
                chamfers.push(c);
            }
        }
        for entry in report.joints.values() {
            joint_total += 1;
            joint_ok += usize::from(entry.success);
            if let Some(cause) = entry.cause {
                *failures.entry(cause_key(cause).into()).or_default() += 1;
            }
            if let Some(e) = entry.error {
                type_total += 1;
                type_wrong += usize::from(e.type_error != 0);
                if let Some(v) = e.axis_error {
                    axis.push(v);
                }
                if let Some(v) = e.origin_error {
                    origin.push(v);
                }
                if let Some(v) = e.limit_range_error {
                    range.push(v);
                }
                if let Some(v) = e.limit_direction_error {
                    direction.push(v);
                }
            }
        }
    }

    let failure_total: usize = failures.values().sum();
    let failure_percentages = failures
        .iter()
        .map(|(k, &v)| (k.clone(), 100.0 * v as f64 / failure_total.max(1) as f64))
        .collect();

    AggregateStats {
        objects: reports.len(),
        invalid_objects,
        link_success: rate_with_ci(link_ok, link_total),
        joint_success: rate_with_ci(joint_ok, joint_total),
        failure_counts: failures,
        failure_percentages,
        type_error_rate: rate_with_ci(type_wrong, type_total),
        axis_error: mean_sd(&axis),
        origin_error: mean_sd(&origin),
        limit_range_error: mean_sd(&range),
        limit_direction_error: mean_sd(&direction),
        chamfer: mean_sd(&chamfers),
    }
}

/// Error-table CSV: one metric per row with mean, sd, and count.
pub fn aggregate_to_csv(stats: &AggregateStats) -> String {
    let mut out = String::from("metric,mean,sd,n\n");
    let mut push = |name: &str, m: &MeanSd| {
        out.push_str(&format!("{name},{},{},{}\n", m.mean, m.sd, m.n));
    };
    push("axis_error_rad", &stats.axis_error);
    push("origin_error_m", &stats.origin_error);
    push("limit_range_error", &stats.limit_range_error);
    push("limit_direction_error", &stats.limit_direction_error);
    push("chamfer_m", &stats.chamfer);
    out.push_str(&format!(
        "type_error_rate,{},{},{}\n",
        stats.type_error_rate.rate, stats.type_error_rate.ci95, stats.type_error_rate.total
    ));
    out.push_str(&format!(
        "link_success_rate,{},{},{}\n",
        stats.link_success.rate, stats.link_success.ci95, stats.link_success.total
    ));
    out.push_str(&format!(
        "joint_success_rate,{},{},{}\n",
        stats.joint_success.rate, stats.joint_success.ci95, stats.joint_success.total
    ));
    out
}

/// 2×2 agreement between critic verdicts and ground-truth verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_negative: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.true_positive + self.true_negative) as f64 / self.total() as f64
    }
}

/// Tallies critic-vs-ground-truth agreement. Panics on length mismatch;
/// callers pair the verdict streams.
pub fn critic_agreement(critic: &[bool], gt: &[bool]) -> ConfusionMatrix {
    assert_eq!(critic.len(), gt.len(), "verdict streams must pair up");
    let mut m = ConfusionMatrix {
        true_positive: 0,
        false_positive: 0,
        false_negative: 0,
        true_negative: 0,
    };
    for (&c, &g) in critic.iter().zip(gt) {
        match (c, g) {
            (true, true) => m.true_positive += 1,
            (true, false) => m.false_positive += 1,
            (false, true) => m.false_negative += 1,
            (false, false) => m.true_negative += 1,
        }
    }
    m
}
