//! Adversaries that drive a generator into a provable violation.
//!
//! Each adversary returns [`ViolationReport`]s carrying the stream prefix and
//! the offending distribution, so every claim can be rechecked independently
//! with [`ViolationReport::verify`].

mod geometric;
mod query;
mod witness;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::groups::GroupCollection;
use crate::measures::{group_empirical, induced_group_probs};
use crate::periodic::PeriodicSet;
use crate::{Dist, Rational};

pub use geometric::{geometric_adversary, geometric_base, GeometricRun};
pub use query::{
    query_adversary, query_plugin, GroupLabel, Membership, QueryGenerator, QueryOracle, QueryRun,
    QueryState, DEFAULT_QUERY_BUDGET, QUERY_PLUGINS,
};
pub use witness::{gc_witness_adversary, WitnessOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InconsistencyReason {
    OutOfSupport,
    AlreadySeen,
}

impl InconsistencyReason {
    pub fn name(self) -> &'static str {
        match self {
            InconsistencyReason::OutOfSupport => "out-of-support",
            InconsistencyReason::AlreadySeen => "already-seen",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Inconsistent {
        element: u64,
        reason: InconsistencyReason,
    },
    /// `distance = |π̂(group) − Λ_μ(group)|`, which exceeds `alpha`.
    Unrepresentative {
        group: usize,
        distance: Rational,
        alpha: Rational,
    },
    QueryBudgetExceeded {
        budget: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationReport {
    /// 1-based step.
    pub step: usize,
    pub kind: ViolationKind,
    pub history: Vec<u64>,
    /// `None` only when the generator never produced an output.
    pub dist: Option<Dist>,
}

impl ViolationReport {
    /// Rechecks the report against its snapshot, given the target support and
    /// the group collection it was produced under.
    pub fn verify(&self, support: &PeriodicSet, groups: &GroupCollection) -> Result<()> {
        let fail = |msg: String| Err(Error::Invariant(format!("step {}: {msg}", self.step)));
        if self.history.len() != self.step {
            return fail(format!("history has {} elements", self.history.len()));
        }
        match (&self.kind, &self.dist) {
            (ViolationKind::QueryBudgetExceeded { .. }, None) => Ok(()),
            (ViolationKind::QueryBudgetExceeded { .. }, Some(_)) => {
                fail("budget report carries a distribution".into())
            }
            (_, None) => fail("no distribution recorded".into()),
            (ViolationKind::Inconsistent { element, reason }, Some(mu)) => {
                if mu.mass(*element).is_zero() {
                    return fail(format!("no mass on {element}"));
                }
                let holds = match reason {
                    InconsistencyReason::AlreadySeen => self.history.contains(element),
                    InconsistencyReason::OutOfSupport => !support.contains(*element),
                };
                if holds {
                    Ok(())
                } else {
                    fail(format!("{element} is not {}", reason.name()))
                }
            }
            (
                ViolationKind::Unrepresentative {
                    group,
                    distance,
                    alpha,
                },
                Some(mu),
            ) => {
                let target = group_empirical::<Rational>(&self.history, groups)?;
                let got = induced_group_probs(mu, groups);
                let actual = (target.get(*group) - got.get(*group)).abs();
                if actual != *distance {
                    return fail(format!(
                        "distance on group {group} is {actual}, not {distance}"
                    ));
                }
                if distance <= alpha {
                    return fail(format!("distance {distance} does not exceed {alpha}"));
                }
                Ok(())
            }
        }
    }
}
