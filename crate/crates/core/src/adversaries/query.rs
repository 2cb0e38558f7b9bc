//! Membership-query adversary.
//!
//! The generator may ask whether an element is in the target support or in
//! group 1 before each output. The adversary builds the target and the group
//! split lazily: every element it streams itself goes to group 1, and every
//! element the generator asks about is put in the target but outside group 1.
//! A consistent output can then only use queried elements, so it misses
//! group 1 entirely, which holds at least half of the empirical mass.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use super::{InconsistencyReason, ViolationKind, ViolationReport};
use crate::error::{Error, Result};
use crate::groups::GroupCollection;
use crate::measures::group_empirical;
use crate::periodic::PeriodicSet;
use crate::{Dist, Rational};

pub const DEFAULT_QUERY_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupLabel {
    /// Group 1 (index 0).
    One,
    /// Group 2 (index 1).
    Two,
}

/// The adversary's construction so far. Unassigned elements are absent from
/// both maps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QueryState {
    pub hypothesis: BTreeMap<u64, Membership>,
    pub groups: BTreeMap<u64, GroupLabel>,
    pub queue: VecDeque<u64>,
    /// The stream produced so far.
    pub enumeration: Vec<u64>,
    cursor: u64,
}

impl QueryState {
    fn assign(&mut self, x: u64, h: Membership, a: GroupLabel) {
        self.hypothesis.insert(x, h);
        self.groups.insert(x, a);
    }

    fn smallest_unassigned(&mut self) -> u64 {
        while self.hypothesis.contains_key(&self.cursor) {
            self.cursor += 1;
        }
        self.cursor
    }

    /// Elements currently labelled as in the target.
    pub fn support_so_far(&self) -> PeriodicSet {
        PeriodicSet::finite(
            self.hypothesis
                .iter()
                .filter(|(_, m)| **m == Membership::In)
                .map(|(x, _)| *x),
        )
    }

    /// Group 1 as assigned so far, and everything else as group 2.
    pub fn group_collection(&self) -> GroupCollection {
        let one = PeriodicSet::finite(
            self.groups
                .iter()
                .filter(|(_, a)| **a == GroupLabel::One)
                .map(|(x, _)| *x),
        );
        let two = one.complement();
        GroupCollection::finite(vec![one, two]).expect("complementary groups cover ℕ")
    }
}

/// Membership oracle handed to a query generator for one step.
pub struct QueryOracle<'a> {
    state: &'a mut QueryState,
    used: u64,
    budget: u64,
}

impl QueryOracle<'_> {
    fn charge(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.budget {
            return Err(Error::QueryBudgetExceeded {
                budget: self.budget,
            });
        }
        Ok(())
    }

    /// Is `x` in the target support?
    pub fn hyp_member(&mut self, x: u64) -> Result<bool> {
        self.charge()?;
        if !self.state.hypothesis.contains_key(&x) {
            self.state.assign(x, Membership::In, GroupLabel::Two);
            self.state.queue.push_back(x);
        }
        Ok(self.state.hypothesis[&x] == Membership::In)
    }

    /// Is `x` in group 1?
    pub fn group1_member(&mut self, x: u64) -> Result<bool> {
        self.charge()?;
        if !self.state.groups.contains_key(&x) {
            self.state.assign(x, Membership::In, GroupLabel::Two);
            self.state.queue.push_back(x);
        }
        Ok(self.state.groups[&x] == GroupLabel::One)
    }

    pub fn queries_used(&self) -> u64 {
        self.used
    }
}

/// A deterministic generator that may consult the oracle before emitting.
pub trait QueryGenerator {
    fn emit(&mut self, history: &[u64], oracle: &mut QueryOracle<'_>) -> Result<Dist>;
}

#[derive(Clone, Debug)]
pub struct QueryRun {
    pub reports: Vec<ViolationReport>,
    pub state: QueryState,
    /// Target support and groups as they stood when each report was made.
    pub snapshots: Vec<(PeriodicSet, GroupCollection)>,
}

/// Runs `steps` rounds. The construction defeats every `α < 1/2`, which is
/// the bound the reports are checked against.
pub fn query_adversary(
    generator: &mut dyn QueryGenerator,
    alpha: &Rational,
    steps: usize,
    budget: u64,
) -> Result<QueryRun> {
    if *alpha < Rational::zero() || *alpha >= Rational::new(1.into(), 2.into()) {
        return Err(Error::Unsupported(format!(
            "α = {alpha} must lie in [0, 1/2)"
        )));
    }
    let mut state = QueryState::default();
    let mut reports = Vec::with_capacity(steps);
    let mut snapshots = Vec::with_capacity(steps);
    for t in 1..=steps {
        // Stage 1: extend the enumeration.
        let next = match state.queue.pop_front() {
            Some(x) if t % 2 == 0 => x,
            other => {
                if let Some(x) = other {
                    state.queue.push_front(x);
                }
                let u = state.smallest_unassigned();
                state.assign(u, Membership::In, GroupLabel::One);
                u
            }
        };
        state.enumeration.push(next);
        let history = state.enumeration.clone();
        let seen: BTreeSet<u64> = history.iter().copied().collect();

        // Stage 2: answer queries.
        let mut oracle = QueryOracle {
            state: &mut state,
            used: 0,
            budget,
        };
        let mu = match generator.emit(&history, &mut oracle) {
            Ok(mu) => mu,
            Err(Error::QueryBudgetExceeded { budget }) => {
                snapshots.push((state.support_so_far(), state.group_collection()));
                reports.push(ViolationReport {
                    step: t,
                    kind: ViolationKind::QueryBudgetExceeded { budget },
                    history,
                    dist: None,
                });
                continue;
            }
            Err(e) => return Err(e),
        };

        // Stage 3: classify the output.
        let excluded = mu
            .support()
            .find(|x| seen.contains(x) || state.hypothesis.get(x) == Some(&Membership::Out));
        let kind = if let Some(x) = excluded {
            let reason = if seen.contains(&x) {
                InconsistencyReason::AlreadySeen
            } else {
                InconsistencyReason::OutOfSupport
            };
            ViolationKind::Inconsistent { element: x, reason }
        } else {
            let fresh: Vec<u64> = mu
                .support()
                .filter(|x| !state.hypothesis.contains_key(x))
                .collect();
            if let Some(&x) = fresh.first() {
                for &y in &fresh {
                    state.assign(y, Membership::Out, GroupLabel::Two);
                }
                ViolationKind::Inconsistent {
                    element: x,
                    reason: InconsistencyReason::OutOfSupport,
                }
            } else {
                let groups = state.group_collection();
                let pi = group_empirical::<Rational>(&history, &groups)?.get(0);
                if mu
                    .support()
                    .any(|x| state.groups.get(&x) == Some(&GroupLabel::One))
                {
                    return Err(Error::Invariant(format!(
                        "step {t}: unseen support of {mu:?} contains a group 1 element"
                    )));
                }
                ViolationKind::Unrepresentative {
                    group: 0,
                    distance: pi,
                    alpha: alpha.clone(),
                }
            }
        };
        snapshots.push((state.support_so_far(), state.group_collection()));
        reports.push(ViolationReport {
            step: t,
            kind,
            history,
            dist: Some(mu),
        });
    }
    Ok(QueryRun {
        reports,
        state,
        snapshots,
    })
}

/// Asks about the smallest candidates above everything seen and emits the
/// first one confirmed in the target.
struct Probe;

impl QueryGenerator for Probe {
    fn emit(&mut self, history: &[u64], oracle: &mut QueryOracle<'_>) -> Result<Dist> {
        let mut y = history.iter().max().map_or(0, |m| m + 1);
        while !oracle.hyp_member(y)? {
            y += 1;
        }
        Ok(Dist::point(y))
    }
}

struct Constant(u64);

impl QueryGenerator for Constant {
    fn emit(&mut self, _history: &[u64], _oracle: &mut QueryOracle<'_>) -> Result<Dist> {
        Ok(Dist::point(self.0))
    }
}

struct EmpiricalQ;

impl QueryGenerator for EmpiricalQ {
    fn emit(&mut self, history: &[u64], _oracle: &mut QueryOracle<'_>) -> Result<Dist> {
        Dist::empirical(history)
    }
}

/// Searches for an unseen group 1 element, which the adversary never
/// concedes.
struct Seeker;

impl QueryGenerator for Seeker {
    fn emit(&mut self, history: &[u64], oracle: &mut QueryOracle<'_>) -> Result<Dist> {
        let mut y = 0;
        loop {
            if !history.contains(&y) && oracle.group1_member(y)? {
                return Ok(Dist::point(y));
            }
            y += 1;
        }
    }
}

pub const QUERY_PLUGINS: [&str; 4] = ["probe", "constant", "empirical", "seeker"];

pub fn query_plugin(name: &str) -> Result<Box<dyn QueryGenerator>> {
    Ok(match name {
        "probe" => Box::new(Probe),
        "constant" => Box::new(Constant(1000)),
        "empirical" => Box::new(EmpiricalQ),
        "seeker" => Box::new(Seeker),
        other => {
            return Err(Error::Unsupported(format!(
                "unknown query generator `{other}` (expected one of {QUERY_PLUGINS:?})"
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn quarter() -> Rational {
        Rational::from_fraction(1, 4)
    }

    struct AskThenEmit(u64);

    impl QueryGenerator for AskThenEmit {
        fn emit(&mut self, _h: &[u64], oracle: &mut QueryOracle<'_>) -> Result<Dist> {
            oracle.hyp_member(self.0)?;
            Ok(Dist::point(self.0))
        }
    }

    #[test]
    fn first_step_enumerates_zero_into_group_one() {
        let run = query_adversary(&mut Constant(0), &quarter(), 1, 10).unwrap();
        assert_eq!(run.state.enumeration, vec![0]);
        assert_eq!(run.state.groups[&0], GroupLabel::One);
        assert_eq!(run.state.hypothesis[&0], Membership::In);
    }

    #[test]
    fn queried_element_is_conceded_then_unrepresentative() {
        let run = query_adversary(&mut AskThenEmit(100), &quarter(), 1, 10).unwrap();
        assert_eq!(run.state.groups[&100], GroupLabel::Two);
        assert_eq!(run.state.queue, VecDeque::from([100]));
        match &run.reports[0].kind {
            ViolationKind::Unrepresentative {
                group: 0, distance, ..
            } => {
                assert!(*distance >= Rational::from_fraction(1, 2))
            }
            other => panic!("unexpected {other:?}"),
        }
        let (s, g) = &run.snapshots[0];
        run.reports[0].verify(s, g).unwrap();
    }

    #[test]
    fn unqueried_mass_is_excluded() {
        let run = query_adversary(&mut Constant(7), &quarter(), 2, 10).unwrap();
        assert_eq!(
            run.reports[0].kind,
            ViolationKind::Inconsistent {
                element: 7,
                reason: InconsistencyReason::OutOfSupport
            }
        );
        assert_eq!(run.state.hypothesis[&7], Membership::Out);
        for (r, (s, g)) in run.reports.iter().zip(&run.snapshots) {
            r.verify(s, g).unwrap();
        }
    }

    #[test]
    fn queue_feeds_even_steps() {
        let run =
            query_adversary(&mut *query_plugin("probe").unwrap(), &quarter(), 4, 100).unwrap();
        // odd steps take fresh elements, even steps the queried ones
        let e = &run.state.enumeration;
        assert_eq!(run.state.groups[&e[0]], GroupLabel::One);
        assert_eq!(run.state.groups[&e[1]], GroupLabel::Two);
        assert_eq!(run.state.groups[&e[2]], GroupLabel::One);
        assert_eq!(run.state.groups[&e[3]], GroupLabel::Two);
    }

    #[test]
    fn endless_search_hits_the_budget() {
        let run =
            query_adversary(&mut *query_plugin("seeker").unwrap(), &quarter(), 2, 50).unwrap();
        assert!(run
            .reports
            .iter()
            .all(|r| r.kind == ViolationKind::QueryBudgetExceeded { budget: 50 }));
    }

    #[test]
    fn unknown_plugin() {
        assert!(query_plugin("oracle").is_err());
    }
}
