//! Uniform generator for a finite class and a finite partition.
//!
//! Before `d_star` distinct examples (or when no hypothesis is consistent) it
//! outputs the empirical distribution. Afterwards it places each group's
//! empirical mass on the smallest unseen element `z_i` of `closure ∩ A_i` and
//! moves the mass of exhausted groups onto the remaining `z_i`.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{Emission, Generator, History};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroups, GroupCollection};
use crate::hypothesis::{Closure, ClosureMemo, Hypothesis};
use crate::scalar::Scalar;
use crate::{Dist, Rational};

pub struct Uniform {
    hypotheses: Vec<Hypothesis>,
    groups: FiniteGroups,
    alpha: Rational,
    d_star: usize,
    memo: ClosureMemo,
}

fn partition(groups: &GroupCollection) -> Result<FiniteGroups> {
    let f = groups.require_finite("the uniform generator")?;
    if !f.is_partition() {
        return Err(Error::Unsupported(
            "the uniform generator requires a partition".into(),
        ));
    }
    Ok(f.clone())
}

impl Uniform {
    pub fn new(
        hypotheses: Vec<Hypothesis>,
        groups: GroupCollection,
        alpha: Rational,
        d_star: usize,
    ) -> Result<Self> {
        if d_star == 0 {
            return Err(Error::Unsupported("d_star must be at least 1".into()));
        }
        Ok(Uniform {
            hypotheses,
            groups: partition(&groups)?,
            alpha,
            d_star,
            memo: ClosureMemo::new(),
        })
    }

    pub fn d_star(&self) -> usize {
        self.d_star
    }
}

impl Generator for Uniform {
    fn emit(&mut self, history: &History) -> Result<Emission> {
        if history.distinct_count() < self.d_star {
            return history.empirical().map(Emission::from);
        }
        let closed = self.memo.closure(&self.hypotheses, history.distinct());
        construct(closed, &self.groups, &self.alpha, history).map(Emission::from)
    }
}

/// Stateless form of the uniform generator.
pub fn uniform_emit(
    hypotheses: &[Hypothesis],
    groups: &GroupCollection,
    alpha: &Rational,
    d_star: usize,
    history: &History,
) -> Result<Dist> {
    let mut g = Uniform::new(hypotheses.to_vec(), groups.clone(), alpha.clone(), d_star)?;
    g.emit(history).map(|e| e.dist)
}

fn construct(
    closed: Closure,
    groups: &FiniteGroups,
    alpha: &Rational,
    history: &History,
) -> Result<Dist> {
    let Closure::Set(closed) = closed else {
        return history.empirical();
    };
    let seen = history.distinct();
    let d = seen.len() as u64;
    let counts = GroupCollection::Finite(groups.clone()).counts(seen);
    let pi = |i: usize| Rational::from_fraction(counts.get(&i).copied().unwrap_or(0), d);

    let mut z: BTreeMap<usize, u64> = BTreeMap::new();
    let mut exhausted = Vec::new();
    for (i, g) in groups.groups().iter().enumerate() {
        let reach = closed.intersect(g);
        let pick = reach.nth_unseen(seen, 0);
        let is_exhausted = reach
            .size_if_finite()
            .is_some_and(|_| reach.iter().all(|x| seen.contains(&x)));
        if pick.is_none() != is_exhausted {
            return Err(Error::Invariant(format!(
                "group {i}: unseen pick {pick:?} disagrees with exhaustion {is_exhausted} for closure {closed}"
            )));
        }
        match pick {
            Some(x) => {
                z.insert(i, x);
            }
            None => exhausted.push(i),
        }
    }
    if z.is_empty() {
        return history.empirical();
    }

    let mut mass: BTreeMap<usize, Rational> = z.keys().map(|&i| (i, pi(i))).collect();
    let deficit = exhausted
        .iter()
        .fold(Rational::zero(), |acc, &i| acc + pi(i));
    if deficit > *alpha {
        let mut left = deficit;
        for m in mass.values_mut() {
            if left.is_zero() {
                break;
            }
            let add = if left < *alpha {
                left.clone()
            } else {
                alpha.clone()
            };
            *m += &add;
            left -= add;
        }
        if !left.is_zero() {
            *mass.values_mut().next().expect("at least one open group") += left;
        }
    } else if !deficit.is_zero() {
        let cap = Rational::from_integer(1.into()) - &deficit;
        let target = mass
            .iter()
            .find(|(_, m)| **m <= cap)
            .map(|(i, _)| *i)
            .unwrap_or(*mass.keys().next().expect("at least one open group"));
        *mass.get_mut(&target).expect("target is open") += deficit;
    }
    Dist::new(mass.into_iter().map(|(i, m)| (z[&i], m)))
}
