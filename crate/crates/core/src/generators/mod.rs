//! Generator constructions and the session protocol that drives them.
//!
//! A generator maps the stream observed so far to a finitely supported
//! distribution over ℕ. All generators here are deterministic.

mod feasibility;
mod limit;
mod nonuniform;
mod uniform;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dimension::{group_closure_dimension, GcSearch, GcStatus};
use crate::error::{Error, Result};
use crate::groups::GroupCollection;
use crate::hypothesis::HypothesisClass;
use crate::{Dist, Rational};

pub use feasibility::{is_feasible, FeasibilityWitness};
pub use limit::{limit_emit, InLimit};
pub use nonuniform::{NonUniform, Thresholds};
pub use uniform::{uniform_emit, Uniform};

/// The stream so far: the sequence in arrival order and its distinct set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct History {
    seq: Vec<u64>,
    distinct: BTreeSet<u64>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(xs: &[u64]) -> Self {
        let mut h = Self::new();
        for &x in xs {
            h.push(x);
        }
        h
    }

    pub fn push(&mut self, x: u64) {
        self.seq.push(x);
        self.distinct.insert(x);
    }

    pub fn seq(&self) -> &[u64] {
        &self.seq
    }

    pub fn distinct(&self) -> &BTreeSet<u64> {
        &self.distinct
    }

    /// `t`, the number of examples seen.
    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// `d_t`, the number of distinct examples seen.
    pub fn distinct_count(&self) -> usize {
        self.distinct.len()
    }

    pub fn empirical(&self) -> Result<Dist> {
        Dist::uniform_over(&self.distinct)
    }
}

/// One output of a generator. `selected` is the 0-based index of the
/// hypothesis an in-limit generator committed to, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Emission {
    pub dist: Dist,
    pub selected: Option<usize>,
}

impl From<Dist> for Emission {
    fn from(dist: Dist) -> Self {
        Emission {
            dist,
            selected: None,
        }
    }
}

pub trait Generator {
    fn emit(&mut self, history: &History) -> Result<Emission>;
}

/// Outputs the empirical distribution of the distinct examples seen.
#[derive(Clone, Debug, Default)]
pub struct Empirical;

impl Generator for Empirical {
    fn emit(&mut self, history: &History) -> Result<Emission> {
        history.empirical().map(Emission::from)
    }
}

/// Outputs the same point mass at every step.
#[derive(Clone, Debug)]
pub struct ConstantSingleton(pub u64);

impl Generator for ConstantSingleton {
    fn emit(&mut self, _history: &History) -> Result<Emission> {
        Ok(Dist::point(self.0).into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Uniform,
    Nonuniform,
    Inlimit,
    Empirical,
    Constant,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Uniform => "uniform",
            GeneratorKind::Nonuniform => "nonuniform",
            GeneratorKind::Inlimit => "inlimit",
            GeneratorKind::Empirical => "empirical",
            GeneratorKind::Constant => "constant",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "uniform" => GeneratorKind::Uniform,
            "nonuniform" => GeneratorKind::Nonuniform,
            "inlimit" => GeneratorKind::Inlimit,
            "empirical" => GeneratorKind::Empirical,
            "constant" => GeneratorKind::Constant,
            other => {
                return Err(Error::Unsupported(format!(
                    "unknown generator kind `{other}`"
                )))
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub alpha: Rational,
    /// Uniform only; computed as `GC_α + 1` when absent.
    pub d_star: Option<usize>,
    pub gc_search: GcSearch,
    /// Point emitted by the constant generator.
    pub constant: u64,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind, alpha: Rational) -> Self {
        GeneratorConfig {
            kind,
            alpha,
            d_star: None,
            gc_search: GcSearch::default(),
            constant: 0,
        }
    }
}

/// `d_star` for a uniform generator: the configured value, or `GC_α + 1`
/// when the dimension is exact.
pub fn resolve_d_star(
    config: &GeneratorConfig,
    class: &HypothesisClass,
    groups: &GroupCollection,
) -> Result<usize> {
    if let Some(d) = config.d_star {
        return Ok(d);
    }
    let hyps = class.members()?;
    let gc = group_closure_dimension(&hyps, groups, &config.alpha, &config.gc_search)?;
    match gc.status {
        GcStatus::Exact(d) => Ok(d + 1),
        other => Err(Error::SearchInsufficient(format!(
            "group closure dimension is {other:?}; raise gc_search.max_d or gc_search.horizon"
        ))),
    }
}

/// Builds the configured generator over `class` and `groups`.
pub fn build_generator(
    config: &GeneratorConfig,
    class: &HypothesisClass,
    groups: &GroupCollection,
) -> Result<Box<dyn Generator>> {
    Ok(match config.kind {
        GeneratorKind::Empirical => Box::new(Empirical),
        GeneratorKind::Constant => Box::new(ConstantSingleton(config.constant)),
        GeneratorKind::Uniform => {
            let d_star = resolve_d_star(config, class, groups)?;
            Box::new(Uniform::new(
                class.members()?,
                groups.clone(),
                config.alpha.clone(),
                d_star,
            )?)
        }
        GeneratorKind::Nonuniform => Box::new(NonUniform::new(
            class.clone(),
            groups.clone(),
            config.alpha.clone(),
            config.gc_search,
        )?),
        GeneratorKind::Inlimit => Box::new(InLimit::new(
            class.clone(),
            groups.clone(),
            config.alpha.clone(),
        )?),
    })
}

/// A generator together with the stream it has observed.
pub struct GeneratorSession {
    generator: Box<dyn Generator>,
    history: History,
}

impl GeneratorSession {
    pub fn new(generator: Box<dyn Generator>) -> Self {
        GeneratorSession {
            generator,
            history: History::new(),
        }
    }

    /// Appends `x` to the history and returns the generator's output.
    pub fn step(&mut self, x: u64) -> Result<Emission> {
        self.history.push(x);
        self.generator.emit(&self.history)
    }

    pub fn history(&self) -> &History {
        &self.history
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    #[test]
    fn empirical_session() {
        let mut s = GeneratorSession::new(Box::new(Empirical));
        s.step(1).unwrap();
        s.step(2).unwrap();
        let e = s.step(1).unwrap();
        let half = Rational::from_fraction(1, 2);
        assert_eq!(e.dist, Dist::new([(1, half.clone()), (2, half)]).unwrap());
        assert_eq!(s.history().distinct_count(), 2);
        assert_eq!(s.history().len(), 3);
    }

    #[test]
    fn constant_ignores_history() {
        let mut g = ConstantSingleton(5);
        let e = g.emit(&History::from_slice(&[1, 2])).unwrap();
        assert_eq!(e.dist, Dist::point(5));
    }

    #[test]
    fn kinds_parse() {
        for k in ["uniform", "nonuniform", "inlimit", "empirical", "constant"] {
            assert_eq!(k.parse::<GeneratorKind>().unwrap().name(), k);
        }
        assert!("random".parse::<GeneratorKind>().is_err());
    }
}
