//! Non-uniform generator for a countable class.
//!
//! With thresholds `n_i = GC_α(h_1..h_i) + 1` (made non-decreasing), step `t`
//! picks the largest `i ≤ t` with `n_i ≤ d_t`, falling back to `i = 1`, and
//! runs the uniform generator for `h_1..h_i` with `d_star = n_i`.

use super::uniform::Uniform;
use super::{Emission, Generator, History};
use crate::dimension::{group_closure_dimension, GcSearch, GcStatus};
use crate::error::{Error, Result};
use crate::groups::GroupCollection;
use crate::hypothesis::HypothesisClass;
use crate::Rational;

/// Memoized running-maximum thresholds `n_1 ≤ n_2 ≤ …` (stored 0-based).
pub struct Thresholds {
    class: HypothesisClass,
    groups: GroupCollection,
    alpha: Rational,
    search: GcSearch,
    values: Vec<usize>,
}

impl Thresholds {
    pub fn new(
        class: HypothesisClass,
        groups: GroupCollection,
        alpha: Rational,
        search: GcSearch,
    ) -> Self {
        Thresholds {
            class,
            groups,
            alpha,
            search,
            values: Vec::new(),
        }
    }

    /// `n_{i+1}` for 0-based `i`, or `None` past the end of the enumeration.
    pub fn get(&mut self, i: usize) -> Result<Option<usize>> {
        while self.values.len() <= i {
            let k = self.values.len() + 1;
            let hyps = self.class.prefix(k);
            if hyps.len() < k {
                return Ok(None);
            }
            let gc = group_closure_dimension(&hyps, &self.groups, &self.alpha, &self.search)?;
            let d = match gc.status {
                GcStatus::Exact(d) => d,
                other => {
                    return Err(Error::SearchInsufficient(format!(
                        "dimension of the first {k} hypotheses is {other:?}; raise gc_search.max_d or gc_search.horizon"
                    )))
                }
            };
            let prev = self.values.last().copied().unwrap_or(0);
            self.values.push(prev.max(d + 1));
        }
        Ok(Some(self.values[i]))
    }

    /// 0-based index of the selected prefix class at step `t` with `d`
    /// distinct examples. Thresholds past the first one above `d` are never
    /// computed.
    pub fn select(&mut self, t: usize, d: usize) -> Result<usize> {
        let mut chosen = 0;
        for i in 0..t {
            match self.get(i)? {
                Some(n) if n <= d => chosen = i,
                _ => break,
            }
        }
        Ok(chosen)
    }
}

pub struct NonUniform {
    thresholds: Thresholds,
    delegates: Vec<Option<Uniform>>,
    last_selected: Option<usize>,
}

impl NonUniform {
    pub fn new(
        class: HypothesisClass,
        groups: GroupCollection,
        alpha: Rational,
        search: GcSearch,
    ) -> Result<Self> {
        groups.require_finite("the non-uniform generator")?;
        if class.is_empty() {
            return Err(Error::Unsupported("the hypothesis class is empty".into()));
        }
        Ok(NonUniform {
            thresholds: Thresholds::new(class, groups, alpha, search),
            delegates: Vec::new(),
            last_selected: None,
        })
    }

    /// The 0-based prefix index used at the last step.
    pub fn last_selected(&self) -> Option<usize> {
        self.last_selected
    }

    pub fn thresholds(&mut self) -> &mut Thresholds {
        &mut self.thresholds
    }
}

impl Generator for NonUniform {
    fn emit(&mut self, history: &History) -> Result<Emission> {
        let i = self
            .thresholds
            .select(history.len(), history.distinct_count())?;
        let n = self.thresholds.get(i)?.expect("selected threshold exists");
        if self.delegates.len() <= i {
            self.delegates.resize_with(i + 1, || None);
        }
        if self.delegates[i].is_none() {
            let t = &self.thresholds;
            self.delegates[i] = Some(Uniform::new(
                t.class.prefix(i + 1),
                t.groups.clone(),
                t.alpha.clone(),
                n,
            )?);
        }
        self.last_selected = Some(i);
        let dist = self.delegates[i]
            .as_mut()
            .expect("delegate built")
            .emit(history)?
            .dist;
        Ok(dist.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::uniform_emit;
    use crate::hypothesis::Hypothesis;
    use crate::periodic::PeriodicSet;
    use crate::scalar::Scalar;

    fn tails() -> HypothesisClass {
        HypothesisClass::enumerated(|i| {
            Some(Hypothesis::new(format!("ge{i}"), PeriodicSet::at_least(i as u64)).unwrap())
        })
    }

    fn singleton_split() -> GroupCollection {
        GroupCollection::finite(vec![PeriodicSet::finite([0]), PeriodicSet::at_least(1)]).unwrap()
    }

    #[test]
    fn first_step_selects_first_class() {
        let mut g = NonUniform::new(
            tails(),
            singleton_split(),
            Rational::from_fraction(1, 2),
            GcSearch::default(),
        )
        .unwrap();
        g.emit(&History::from_slice(&[5])).unwrap();
        assert_eq!(g.last_selected(), Some(0));
    }

    #[test]
    fn thresholds_are_monotone_and_selection_delegates() {
        let alpha = Rational::from_fraction(1, 2);
        let search = GcSearch {
            max_d: 12,
            horizon: 4096,
        };
        let mut g = NonUniform::new(tails(), singleton_split(), alpha.clone(), search).unwrap();
        let stream = [3, 4, 5, 6, 7, 8];
        let mut h = History::new();
        let mut prev = 0;
        for x in stream {
            h.push(x);
            let out = g.emit(&h).unwrap().dist;
            let i = g.last_selected().unwrap();
            assert!(i >= prev);
            prev = i;
            let n = g.thresholds().get(i).unwrap().unwrap();
            let direct =
                uniform_emit(&tails().prefix(i + 1), &singleton_split(), &alpha, n, &h).unwrap();
            assert_eq!(out, direct);
        }
        let ns: Vec<usize> = (0..4)
            .map(|i| g.thresholds().get(i).unwrap().unwrap())
            .collect();
        assert!(ns.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn insufficient_search_is_an_error() {
        let alpha = Rational::from_fraction(1, 4);
        let groups = GroupCollection::finite(vec![
            PeriodicSet::finite([0]),
            PeriodicSet::finite([1]),
            PeriodicSet::at_least(2),
        ])
        .unwrap();
        let all =
            HypothesisClass::finite(vec![Hypothesis::new("all", PeriodicSet::all()).unwrap()])
                .unwrap();
        let shallow = GcSearch {
            max_d: 4,
            horizon: 4096,
        };
        let mut g = NonUniform::new(all, groups, alpha, shallow).unwrap();
        assert!(matches!(
            g.emit(&History::from_slice(&[0])),
            Err(Error::SearchInsufficient(_))
        ));
    }
}
