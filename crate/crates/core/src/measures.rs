//! Finite-support distributions, induced group probabilities and the
//! supremum distance.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::groups::GroupCollection;
use crate::scalar::Scalar;
use crate::Rational;

/// A probability distribution with finite support and strictly positive masses
/// summing to exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalDist<Q = Rational> {
    masses: BTreeMap<u64, Q>,
}

impl<Q: Scalar> RationalDist<Q> {
    /// Builds a distribution, merging repeated points and dropping zero
    /// masses. Negative masses or a total other than one are rejected.
    pub fn new(masses: impl IntoIterator<Item = (u64, Q)>) -> Result<Self> {
        let mut merged: BTreeMap<u64, Q> = BTreeMap::new();
        for (x, q) in masses {
            if q.is_negative() {
                return Err(Error::InvalidDistribution(format!(
                    "negative mass {q:?} on {x}"
                )));
            }
            let slot = merged.entry(x).or_insert_with(Q::zero);
            *slot = slot.clone() + q;
        }
        merged.retain(|_, q| !q.is_zero());
        let total = merged.values().fold(Q::zero(), |acc, q| acc + q.clone());
        if total != Q::one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total:?}, not 1"
            )));
        }
        Ok(RationalDist { masses: merged })
    }

    pub fn point(x: u64) -> Self {
        RationalDist {
            masses: BTreeMap::from([(x, Q::one())]),
        }
    }

    /// Uniform distribution over the distinct elements of `prefix`.
    pub fn empirical(prefix: &[u64]) -> Result<Self> {
        let distinct: BTreeSet<u64> = prefix.iter().copied().collect();
        Self::uniform_over(&distinct)
    }

    pub fn uniform_over(points: &BTreeSet<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::NoExamples);
        }
        let share = Q::from_fraction(1, points.len() as u64);
        Ok(RationalDist {
            masses: points.iter().map(|&x| (x, share.clone())).collect(),
        })
    }

    pub fn mass(&self, x: u64) -> Q {
        self.masses.get(&x).cloned().unwrap_or_else(Q::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.masses.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Q)> {
        self.masses.iter().map(|(x, q)| (*x, q))
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// Sparse group-indexed probabilities; absent indices read as zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupProbs<Q = Rational> {
    probs: BTreeMap<usize, Q>,
}

impl<Q: Scalar> GroupProbs<Q> {
    pub fn new(entries: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut probs = BTreeMap::new();
        for (i, q) in entries {
            if !q.is_zero() {
                probs.insert(i, q);
            }
        }
        GroupProbs { probs }
    }

    pub fn get(&self, group: usize) -> Q {
        self.probs.get(&group).cloned().unwrap_or_else(Q::zero)
    }

    /// Indices with a nonzero entry.
    pub fn realized(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.keys().copied()
    }

    pub fn total(&self) -> Q {
        self.probs
            .values()
            .fold(Q::zero(), |acc, q| acc + q.clone())
    }
}

/// `Λ_μ(i) = Σ_{x ∈ A_i} μ(x)`.
pub fn induced_group_probs<Q: Scalar>(
    mu: &RationalDist<Q>,
    groups: &GroupCollection,
) -> GroupProbs<Q> {
    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
    for (x, q) in mu.iter() {
        for g in groups.groups_of(x) {
            let slot = acc.entry(g).or_insert_with(Q::zero);
            *slot = slot.clone() + q.clone();
        }
    }
    GroupProbs::new(acc)
}

/// Group empirical probabilities of the distinct elements of `prefix`.
pub fn group_empirical<Q: Scalar>(
    prefix: &[u64],
    groups: &GroupCollection,
) -> Result<GroupProbs<Q>> {
    Ok(induced_group_probs(
        &RationalDist::<Q>::empirical(prefix)?,
        groups,
    ))
}

/// `max_i |p(i) − q(i)|` over the indices realized in either argument.
pub fn sup_distance<Q: Scalar>(p: &GroupProbs<Q>, q: &GroupProbs<Q>) -> Q {
    let keys: BTreeSet<usize> = p.realized().chain(q.realized()).collect();
    keys.into_iter()
        .map(|i| (p.get(i) - q.get(i)).abs())
        .fold(Q::zero(), Q::max_of)
}

/// Representativeness of `mu` at one step: the achieved distance to the group
/// empirical probabilities of `prefix`, and whether it is at most `alpha`.
pub fn is_alpha_representative<Q: Scalar>(
    mu: &RationalDist<Q>,
    prefix: &[u64],
    groups: &GroupCollection,
    alpha: &Q,
) -> Result<(bool, Q)> {
    let target = group_empirical(prefix, groups)?;
    let d = sup_distance(&induced_group_probs(mu, groups), &target);
    Ok((d <= *alpha, d))
}
