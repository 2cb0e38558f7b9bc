//! Generator in the limit.
//!
//! At step `t` it looks at `h_1..h_t`, keeps the critical hypotheses that are
//! also `α`-feasible, and emits the feasibility witness of the one with the
//! largest index. With no such hypothesis it emits the empirical distribution.

use super::feasibility::is_feasible;
use super::{Emission, Generator, History};
use crate::error::{Error, Result};
use crate::groups::GroupCollection;
use crate::hypothesis::{is_critical, HypothesisClass};
use crate::Rational;

pub struct InLimit {
    class: HypothesisClass,
    groups: GroupCollection,
    alpha: Rational,
}

impl InLimit {
    /// Requires a finite (possibly overlapping) group collection.
    pub fn new(class: HypothesisClass, groups: GroupCollection, alpha: Rational) -> Result<Self> {
        groups.require_finite("the in-limit generator")?;
        Self::with_blocks(class, groups, alpha)
    }

    /// Also accepts block partitions. Used to run the construction against
    /// the block adversary, where no guarantee is claimed.
    pub fn with_blocks(
        class: HypothesisClass,
        groups: GroupCollection,
        alpha: Rational,
    ) -> Result<Self> {
        if class.is_empty() {
            return Err(Error::Unsupported("the hypothesis class is empty".into()));
        }
        Ok(InLimit {
            class,
            groups,
            alpha,
        })
    }
}

impl Generator for InLimit {
    fn emit(&mut self, history: &History) -> Result<Emission> {
        limit_emit(&self.class, &self.groups, &self.alpha, history)
    }
}

/// Stateless form of the in-limit generator.
pub fn limit_emit(
    class: &HypothesisClass,
    groups: &GroupCollection,
    alpha: &Rational,
    history: &History,
) -> Result<Emission> {
    let hyps = class.prefix(history.len());
    for n in (0..hyps.len()).rev() {
        if !is_critical(&hyps, n, history.seq())? {
            continue;
        }
        if let Some(w) = is_feasible(&hyps[n], groups, history, alpha)? {
            return Ok(Emission {
                dist: w.dist,
                selected: Some(n),
            });
        }
    }
    history.empirical().map(Emission::from)
}
