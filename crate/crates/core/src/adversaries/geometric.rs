//! Block adversary against generation in the limit.
//!
//! With `α = 1 − 1/b`, the naturals are cut into consecutive blocks of sizes
//! `b, b², b³, …` and the stream enumerates ℕ in order. Once block `i` has
//! been streamed completely it carries more than `α` of the empirical mass,
//! so a generator avoiding seen elements cannot put any mass on it.

use num_traits::{One, ToPrimitive, Zero};

use super::{InconsistencyReason, ViolationKind, ViolationReport};
use crate::error::{Error, Result};
use crate::generators::{Generator, History};
use crate::groups::{BlockPartition, BlockSizes, GroupCollection};
use crate::measures::{group_empirical, induced_group_probs};
use crate::Rational;

#[derive(Clone, Debug)]
pub struct GeometricRun {
    pub base: u64,
    pub groups: GroupCollection,
    /// Checkpoint steps `t_1 < t_2 < …`.
    pub checkpoints: Vec<usize>,
    /// One report per checkpoint.
    pub reports: Vec<ViolationReport>,
}

/// `b` such that `α = 1 − 1/b`.
pub fn geometric_base(alpha: &Rational) -> Result<u64> {
    let rest = Rational::one() - alpha;
    let unsupported =
        || Error::Unsupported(format!("α = {alpha} is not of the form 1 − 1/b with b ≥ 2"));
    if rest <= Rational::zero() {
        return Err(unsupported());
    }
    let b = rest.recip();
    if !b.is_integer() {
        return Err(unsupported());
    }
    match b.to_integer().to_u64() {
        Some(b) if b >= 2 => Ok(b),
        _ => Err(unsupported()),
    }
}

/// Runs `depth` checkpoints against `generator` with target `ℕ`.
pub fn geometric_adversary(
    generator: &mut dyn Generator,
    alpha: &Rational,
    depth: usize,
) -> Result<GeometricRun> {
    let base = geometric_base(alpha)?;
    let blocks = BlockPartition::new(BlockSizes::geometric(base, 1))?;
    let groups = GroupCollection::Blocks(blocks.clone());
    let checkpoints: Vec<usize> = (1..=depth)
        .map(|i| {
            blocks
                .block_start(i)
                .to_usize()
                .ok_or_else(|| Error::Unsupported(format!("depth {depth} overflows the stream")))
        })
        .collect::<Result<_>>()?;

    let mut history = History::new();
    let mut reports = Vec::with_capacity(depth);
    let mut next = 0;
    let last = checkpoints.last().copied().unwrap_or(0);
    for t in 1..=last {
        history.push((t - 1) as u64);
        let mu = generator.emit(&history)?.dist;
        if t != checkpoints[next] {
            continue;
        }
        let block = next;
        next += 1;

        let seen = mu.support().find(|x| history.distinct().contains(x));
        let kind = match seen {
            Some(x) => ViolationKind::Inconsistent {
                element: x,
                reason: InconsistencyReason::AlreadySeen,
            },
            None => {
                let pi = group_empirical::<Rational>(history.seq(), &groups)?.get(block);
                if pi <= *alpha {
                    return Err(Error::Invariant(format!(
                        "block {block} has empirical mass {pi} at step {t}, not above α"
                    )));
                }
                let got = induced_group_probs(&mu, &groups).get(block);
                if !got.is_zero() {
                    return Err(Error::Invariant(format!(
                        "output {mu:?} at step {t} avoids seen elements but puts {got} on exhausted block {block}"
                    )));
                }
                ViolationKind::Unrepresentative {
                    group: block,
                    distance: pi,
                    alpha: alpha.clone(),
                }
            }
        };
        reports.push(ViolationReport {
            step: t,
            kind,
            history: history.seq().to_vec(),
            dist: Some(mu),
        });
    }
    Ok(GeometricRun {
        base,
        groups,
        checkpoints,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{Empirical, InLimit};
    use crate::hypothesis::{Hypothesis, HypothesisClass};
    use crate::periodic::PeriodicSet;
    use crate::scalar::Scalar;

    fn q(n: u64, d: u64) -> Rational {
        Rational::from_fraction(n, d)
    }

    #[test]
    fn alpha_must_be_one_minus_reciprocal() {
        assert_eq!(geometric_base(&q(1, 2)).unwrap(), 2);
        assert_eq!(geometric_base(&q(2, 3)).unwrap(), 3);
        assert!(geometric_base(&q(1, 3)).is_err());
        assert!(geometric_base(&q(0, 1)).is_err());
        assert!(geometric_base(&q(1, 1)).is_err());
    }

    #[test]
    fn checkpoints_and_block_mass() {
        let run = geometric_adversary(&mut Empirical, &q(1, 2), 3).unwrap();
        assert_eq!(run.checkpoints, vec![2, 6, 14]);
        for r in &run.reports {
            assert!(matches!(
                r.kind,
                ViolationKind::Inconsistent {
                    reason: InconsistencyReason::AlreadySeen,
                    ..
                }
            ));
            r.verify(&PeriodicSet::all(), &run.groups).unwrap();
        }
        // second checkpoint: block of size 4 among 6 distinct elements
        let pi = group_empirical::<Rational>(&run.reports[1].history, &run.groups).unwrap();
        assert_eq!(pi.get(1), q(2, 3));
    }

    #[test]
    fn base_three() {
        let run = geometric_adversary(&mut Empirical, &q(2, 3), 2).unwrap();
        assert_eq!(run.checkpoints, vec![3, 12]);
        let pi = group_empirical::<Rational>(&run.reports[0].history, &run.groups).unwrap();
        assert_eq!(pi.get(0), q(1, 1));
    }

    #[test]
    fn limit_generator_is_caught() {
        let class =
            HypothesisClass::finite(vec![Hypothesis::new("all", PeriodicSet::all()).unwrap()])
                .unwrap();
        let groups = GroupCollection::blocks(BlockSizes::geometric(2, 1)).unwrap();
        let mut g = InLimit::with_blocks(class, groups, q(1, 2)).unwrap();
        let run = geometric_adversary(&mut g, &q(1, 2), 4).unwrap();
        assert_eq!(run.reports.len(), 4);
        for r in &run.reports {
            r.verify(&PeriodicSet::all(), &run.groups).unwrap();
        }
    }
}
