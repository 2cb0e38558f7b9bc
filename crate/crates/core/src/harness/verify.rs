//! Step checks and summary properties.
//!
//! These checks are written against the measure and set primitives only and
//! never call into the generator constructions, so a faulty generator cannot
//! vouch for itself.

use super::game::{StepRecord, Summary};
use super::scenario::Expectations;
use crate::error::Result;
use crate::generators::GeneratorKind;
use crate::groups::GroupCollection;
use crate::measures::{group_empirical, induced_group_probs, sup_distance};
use crate::periodic::PeriodicSet;
use crate::{Dist, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub sup_distance: Rational,
    pub representative: bool,
    pub consistent: bool,
}

/// Distance to the group empirical probabilities of `prefix`, and whether
/// every point of `mu` is an unseen element of `target`.
pub fn check_step(
    mu: &Dist,
    prefix: &[u64],
    target: &PeriodicSet,
    groups: &GroupCollection,
    alpha: &Rational,
) -> Result<StepCheck> {
    let d = sup_distance(
        &induced_group_probs(mu, groups),
        &group_empirical(prefix, groups)?,
    );
    let consistent = mu
        .support()
        .all(|x| target.contains(x) && !prefix.contains(&x));
    Ok(StepCheck {
        representative: d <= *alpha,
        sup_distance: d,
        consistent,
    })
}

/// Least `t` such that every step from `t` on is consistent.
pub fn first_consistent_from(steps: &[StepRecord]) -> Option<usize> {
    let tail = steps.iter().rev().take_while(|s| s.consistent).count();
    (tail > 0).then(|| steps.len() - tail + 1)
}

/// Recomputes the summary from the step records.
pub fn summarize(
    steps: &[StepRecord],
    kind: GeneratorKind,
    d_star: Option<usize>,
    expect: &Expectations,
) -> Summary {
    let all_representative = steps.iter().all(|s| s.representative);
    let first = first_consistent_from(steps);
    let mut violations = Vec::new();
    let claims_representation = matches!(
        kind,
        GeneratorKind::Uniform | GeneratorKind::Nonuniform | GeneratorKind::Inlimit
    );
    if claims_representation {
        for s in steps.iter().filter(|s| !s.representative) {
            violations.push(format!(
                "step {}: distance {} exceeds alpha",
                s.t, s.sup_distance
            ));
        }
    }
    if let (GeneratorKind::Uniform, Some(d)) = (kind, d_star) {
        if let Some(due) = steps.iter().find(|s| s.distinct >= d).map(|s| s.t) {
            if first.is_none_or(|f| f > due) {
                violations.push(format!(
                    "not consistent from step {due}, where {d} distinct examples were reached"
                ));
            }
        }
    }
    if let Some(want) = expect.all_representative {
        if want != all_representative {
            violations.push(format!("expected all_representative = {want}"));
        }
    }
    if let Some(by) = expect.consistent_by {
        if first.is_none_or(|f| f > by) {
            violations.push(format!(
                "expected consistency from step {by} at the latest, got {first:?}"
            ));
        }
    }
    if expect.never_consistent == Some(true) && steps.iter().any(|s| s.consistent) {
        violations.push("expected no consistent step".into());
    }
    Summary {
        all_representative,
        first_consistent_from: first,
        violations,
    }
}
