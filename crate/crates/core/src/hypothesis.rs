//! Hypotheses, hypothesis classes, consistency and the closure operator.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::periodic::PeriodicSet;

/// A hypothesis with an infinite support (UUS).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    id: String,
    support: PeriodicSet,
}

impl Hypothesis {
    pub fn new(id: impl Into<String>, support: PeriodicSet) -> Result<Self> {
        let id = id.into();
        if support.is_finite() {
            return Err(Error::FiniteSupport(id));
        }
        Ok(Hypothesis { id, support })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn support(&self) -> &PeriodicSet {
        &self.support
    }

    pub fn contains(&self, x: u64) -> bool {
        self.support.contains(x)
    }

    pub fn is_consistent_with(&self, prefix: &[u64]) -> bool {
        prefix.iter().all(|&x| self.support.contains(x))
    }
}

type Provider = dyn Fn(usize) -> Option<Hypothesis> + Send + Sync;

/// An ordered hypothesis class. Either a finite list, or a countable
/// enumeration pulled on demand from a provider (`index → hypothesis`, 0-based)
/// and cached.
#[derive(Clone)]
pub struct HypothesisClass {
    cache: Arc<RwLock<Vec<Hypothesis>>>,
    provider: Option<Arc<Provider>>,
}

impl HypothesisClass {
    pub fn finite(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        let mut ids = HashSet::new();
        for h in &hypotheses {
            if !ids.insert(h.id.clone()) {
                return Err(Error::DuplicateHypothesis(h.id.clone()));
            }
        }
        Ok(HypothesisClass {
            cache: Arc::new(RwLock::new(hypotheses)),
            provider: None,
        })
    }

    /// A countable class `h_0, h_1, …`; the provider returns `None` past the
    /// end of a (possibly finite) enumeration and must be deterministic.
    pub fn enumerated(
        provider: impl Fn(usize) -> Option<Hypothesis> + Send + Sync + 'static,
    ) -> Self {
        HypothesisClass {
            cache: Arc::new(RwLock::new(Vec::new())),
            provider: Some(Arc::new(provider)),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.provider.is_none()
    }

    /// Number of members of a finite class.
    pub fn len(&self) -> Option<usize> {
        self.is_finite().then(|| self.cache.read().unwrap().len())
    }

    pub fn is_empty(&self) -> bool {
        self.get(0).is_none()
    }

    pub fn get(&self, index: usize) -> Option<Hypothesis> {
        if let Some(h) = self.cache.read().unwrap().get(index) {
            return Some(h.clone());
        }
        let provider = self.provider.as_ref()?;
        let mut cache = self.cache.write().unwrap();
        while cache.len() <= index {
            let next = provider(cache.len())?;
            cache.push(next);
        }
        Some(cache[index].clone())
    }

    /// The first `n` members (fewer if the enumeration ends earlier).
    pub fn prefix(&self, n: usize) -> Vec<Hypothesis> {
        if n > 0 {
            self.get(n - 1);
        }
        let cache = self.cache.read().unwrap();
        cache[..n.min(cache.len())].to_vec()
    }

    /// All members of a finite class.
    pub fn members(&self) -> Result<Vec<Hypothesis>> {
        if !self.is_finite() {
            return Err(Error::Unsupported(
                "operation requires a finite hypothesis class".into(),
            ));
        }
        Ok(self.cache.read().unwrap().clone())
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.cache.read().unwrap().iter().position(|h| h.id == id)
    }
}

impl fmt::Debug for HypothesisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cache = self.cache.read().unwrap();
        f.debug_struct("HypothesisClass")
            .field("materialized", &*cache)
            .field("countable", &self.provider.is_some())
            .finish()
    }
}

/// Result of the closure operator: `Bot` when no hypothesis is consistent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Closure {
    Bot,
    Set(PeriodicSet),
}

impl Closure {
    pub fn as_set(&self) -> Option<&PeriodicSet> {
        match self {
            Closure::Bot => None,
            Closure::Set(s) => Some(s),
        }
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Closure::Bot)
    }
}

/// Indices (0-based, in order) of hypotheses whose support contains every
/// element of `prefix`.
pub fn consistent_set(hypotheses: &[Hypothesis], prefix: &[u64]) -> Vec<usize> {
    hypotheses
        .iter()
        .enumerate()
        .filter(|(_, h)| h.is_consistent_with(prefix))
        .map(|(i, _)| i)
        .collect()
}

fn intersect_supports(hypotheses: &[Hypothesis], indices: &[usize]) -> Closure {
    let mut iter = indices.iter().map(|&i| hypotheses[i].support());
    match iter.next() {
        None => Closure::Bot,
        Some(first) => Closure::Set(iter.fold(first.clone(), |acc, s| acc.intersect(s))),
    }
}

/// Intersection of the supports of all hypotheses consistent with `prefix`.
pub fn closure(hypotheses: &[Hypothesis], prefix: &[u64]) -> Closure {
    intersect_supports(hypotheses, &consistent_set(hypotheses, prefix))
}

/// Whether hypothesis `n` (0-based) is critical after `prefix`: it is among
/// the first `|prefix|` hypotheses, consistent, and its support lies inside
/// the support of every consistent hypothesis with a smaller index.
pub fn is_critical(hypotheses: &[Hypothesis], n: usize, prefix: &[u64]) -> Result<bool> {
    let h = hypotheses
        .get(n)
        .ok_or(Error::NoSuchHypothesis { index: n })?;
    if n + 1 > prefix.len() || !h.is_consistent_with(prefix) {
        return Ok(false);
    }
    Ok(hypotheses[..n]
        .iter()
        .filter(|g| g.is_consistent_with(prefix))
        .all(|g| h.support().is_subset(g.support())))
}

/// Memoizes closures by the set of consistent hypotheses, which is all a
/// closure depends on.
#[derive(Default, Debug)]
pub struct ClosureMemo {
    cache: HashMap<Vec<usize>, Closure>,
}

impl ClosureMemo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn closure(&mut self, hypotheses: &[Hypothesis], distinct: &BTreeSet<u64>) -> Closure {
        let seen: Vec<u64> = distinct.iter().copied().collect();
        let indices = consistent_set(hypotheses, &seen);
        self.cache
            .entry(indices)
            .or_insert_with_key(|k| intersect_supports(hypotheses, k))
            .clone()
    }
}
