//! Deciding whether a hypothesis admits an `α`-representative distribution
//! over its unseen support.
//!
//! Every element of one cell (one membership vector) contributes to the same
//! groups, so it suffices to choose a mass `q_v` per cell. The group
//! constraints are linear in `q` and are solved exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};

use super::History;
use crate::error::{Error, Result};
use crate::groups::{BlockPartition, FiniteGroups, GroupCollection};
use crate::hypothesis::Hypothesis;
use crate::lp::{find_feasible, Constraint, Relation};
use crate::measures::GroupProbs;
use crate::scalar::Scalar;
use crate::{Dist, Rational};

/// Mass per cell together with the element carrying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityWitness {
    /// `(cell groups, representative element, mass)`, one entry per cell
    /// with positive mass.
    pub cells: Vec<(Vec<usize>, u64, Rational)>,
    pub dist: Dist,
}

struct Var {
    groups: Vec<usize>,
    element: u64,
    cap: Option<Rational>,
}

/// Returns a witness distribution supported on `supp(h) ∖ seen` within sup
/// distance `α` of the group empirical probabilities, if one exists. An exact
/// match is preferred when it exists.
pub fn is_feasible(
    h: &Hypothesis,
    groups: &GroupCollection,
    history: &History,
    alpha: &Rational,
) -> Result<Option<FeasibilityWitness>> {
    if history.is_empty() {
        return Err(Error::NoExamples);
    }
    let seen = history.distinct();
    let d = seen.len() as u64;
    let counts = groups.counts(seen);
    let pi: GroupProbs = GroupProbs::new(
        counts
            .iter()
            .map(|(&i, &c)| (i, Rational::from_fraction(c, d))),
    );
    let (vars, rows) = match groups {
        GroupCollection::Finite(f) => finite_vars(h, f, seen),
        GroupCollection::Blocks(b) => block_vars(h, b, seen, &pi, alpha),
    };
    for tolerance in [Rational::zero(), alpha.clone()] {
        if let Some(w) = solve(&vars, &rows, &pi, &tolerance) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn finite_vars(
    h: &Hypothesis,
    groups: &FiniteGroups,
    seen: &BTreeSet<u64>,
) -> (Vec<Var>, Vec<usize>) {
    let vars = groups
        .cells()
        .into_iter()
        .filter_map(|(v, cell)| {
            let element = cell.intersect(h.support()).nth_unseen(seen, 0)?;
            Some(Var {
                groups: v.groups().collect(),
                element,
                cap: None,
            })
        })
        .collect();
    (vars, (0..groups.len()).collect())
}

/// Realized blocks, plus enough unrealized blocks to carry all the mass
/// at `α` each.
fn block_vars(
    h: &Hypothesis,
    blocks: &BlockPartition,
    seen: &BTreeSet<u64>,
    pi: &GroupProbs,
    alpha: &Rational,
) -> (Vec<Var>, Vec<usize>) {
    let realized: Vec<usize> = pi.realized().collect();
    let pick = |i: usize| blocks.block(i).intersect(h.support()).nth_unseen(seen, 0);
    let mut vars: Vec<Var> = realized
        .iter()
        .filter_map(|&i| {
            pick(i).map(|element| Var {
                groups: vec![i],
                element,
                cap: None,
            })
        })
        .collect();
    let wanted = alpha
        .recip()
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX);
    let mut extra = 0;
    let mut i = 0;
    while extra < wanted {
        if !realized.contains(&i) {
            if let Some(element) = pick(i) {
                vars.push(Var {
                    groups: vec![i],
                    element,
                    cap: Some(alpha.clone()),
                });
                extra += 1;
            }
        }
        i += 1;
    }
    (vars, realized)
}

fn solve(
    vars: &[Var],
    rows: &[usize],
    pi: &GroupProbs,
    tolerance: &Rational,
) -> Option<FeasibilityWitness> {
    let one = Rational::from_integer(1.into());
    let mut constraints = vec![Constraint::new(
        (0..vars.len()).map(|j| (j, one.clone())).collect(),
        Relation::Eq,
        one.clone(),
    )];
    for &i in rows {
        let coeffs: Vec<(usize, Rational)> = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.groups.contains(&i))
            .map(|(j, _)| (j, one.clone()))
            .collect();
        let lo = pi.get(i) - tolerance;
        let hi = pi.get(i) + tolerance;
        if coeffs.is_empty() {
            if lo > Rational::zero() {
                return None;
            }
            continue;
        }
        constraints.push(Constraint::new(coeffs.clone(), Relation::Ge, lo));
        constraints.push(Constraint::new(coeffs, Relation::Le, hi));
    }
    for (j, v) in vars.iter().enumerate() {
        if let Some(cap) = &v.cap {
            constraints.push(Constraint::new(
                vec![(j, one.clone())],
                Relation::Le,
                cap.clone(),
            ));
        }
    }
    let q = find_feasible(vars.len(), &constraints)?;
    let mut masses: BTreeMap<u64, Rational> = BTreeMap::new();
    let mut cells = Vec::new();
    for (v, m) in vars.iter().zip(q) {
        if !m.is_zero() {
            masses.insert(v.element, m.clone());
            cells.push((v.groups.clone(), v.element, m));
        }
    }
    let dist = Dist::new(masses).ok()?;
    Some(FeasibilityWitness { cells, dist })
}
