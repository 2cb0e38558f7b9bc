//! Adversary built from a dimension witness.
//!
//! The witness tuple is fed as the stream. At `t = d` either the output
//! leaves `closure ∖ tuple`, and some consistent hypothesis excludes the
//! offending element (or it was already seen), or it stays inside, and the
//! exhausted groups force a distance above `α`.

use num_traits::Signed;

use super::{InconsistencyReason, ViolationKind, ViolationReport};
use crate::dimension::check_witness;
use crate::error::{Error, Result};
use crate::generators::{Generator, History};
use crate::groups::GroupCollection;
use crate::hypothesis::{closure, consistent_set, Closure, Hypothesis};
use crate::measures::{group_empirical, induced_group_probs, sup_distance};
use crate::Rational;

const CONTINUATION: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessOutcome {
    pub report: ViolationReport,
    /// 0-based index of the hypothesis the stream continues in.
    pub target: usize,
    /// Stream elements after the tuple, all in the target's support.
    pub continuation: Vec<u64>,
}

pub fn gc_witness_adversary(
    generator: &mut dyn Generator,
    hypotheses: &[Hypothesis],
    groups: &GroupCollection,
    alpha: &Rational,
    witness: &[u64],
) -> Result<WitnessOutcome> {
    if check_witness(hypotheses, groups, alpha, witness)?.is_none() {
        return Err(Error::WitnessRejected(format!(
            "{witness:?} satisfies neither condition"
        )));
    }
    let Closure::Set(closed) = closure(hypotheses, witness) else {
        unreachable!("a verified witness has a closure");
    };
    let mut history = History::new();
    let mut mu = None;
    for &x in witness {
        history.push(x);
        mu = Some(generator.emit(&history)?.dist);
    }
    let mu = mu.expect("witness is nonempty");
    let consistent = consistent_set(hypotheses, witness);

    let offending = mu
        .support()
        .find(|&x| history.distinct().contains(&x) || !closed.contains(x));
    let (kind, target) = match offending {
        Some(x) if history.distinct().contains(&x) => (
            ViolationKind::Inconsistent {
                element: x,
                reason: InconsistencyReason::AlreadySeen,
            },
            consistent[0],
        ),
        Some(x) => {
            let h = consistent
                .iter()
                .copied()
                .find(|&i| !hypotheses[i].contains(x))
                .ok_or_else(|| {
                    Error::Invariant(format!(
                        "{x} lies outside the closure yet in every consistent support"
                    ))
                })?;
            (
                ViolationKind::Inconsistent {
                    element: x,
                    reason: InconsistencyReason::OutOfSupport,
                },
                h,
            )
        }
        None => {
            let target = group_empirical(witness, groups)?;
            let got = induced_group_probs(&mu, groups);
            let distance = sup_distance(&target, &got);
            if distance <= *alpha {
                return Err(Error::Invariant(format!(
                    "output {mu:?} stays in the closure with distance {distance} at most α"
                )));
            }
            let group = target
                .realized()
                .chain(got.realized())
                .filter(|&i| (target.get(i) - got.get(i)).abs() == distance)
                .min()
                .expect("distance is attained");
            (
                ViolationKind::Unrepresentative {
                    group,
                    distance,
                    alpha: alpha.clone(),
                },
                consistent[0],
            )
        }
    };
    let continuation = hypotheses[target]
        .support()
        .iter()
        .filter(|x| !history.distinct().contains(x))
        .take(CONTINUATION)
        .collect();
    Ok(WitnessOutcome {
        report: ViolationReport {
            step: witness.len(),
            kind,
            history: witness.to_vec(),
            dist: Some(mu),
        },
        target,
        continuation,
    })
}
