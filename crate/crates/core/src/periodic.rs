//! Ultimately periodic subsets of the natural numbers.
//!
//! A [`PeriodicSet`] denotes `F ∪ {x ≥ T : x mod m ∈ R}` where `F` is a finite
//! subset of `0..T`. Values are always kept in canonical form (minimal period,
//! then minimal threshold for that period), so structural equality coincides
//! with equality of the denoted sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PeriodicSet {
    threshold: u64,
    modulus: u64,
    residues: Vec<u64>,
    prefix: Vec<u64>,
}

impl PeriodicSet {
    /// Builds `prefix ∪ {x ≥ threshold : x mod modulus ∈ residues}` and
    /// canonicalizes it.
    pub fn new(
        threshold: u64,
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
        prefix: impl IntoIterator<Item = u64>,
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidSet("modulus must be at least 1".into()));
        }
        let mut tail = vec![false; modulus as usize];
        for r in residues {
            if r >= modulus {
                return Err(Error::InvalidSet(format!(
                    "residue {r} is not below modulus {modulus}"
                )));
            }
            tail[r as usize] = true;
        }
        let mut head = vec![false; threshold as usize];
        for f in prefix {
            if f >= threshold {
                return Err(Error::InvalidSet(format!(
                    "prefix element {f} is not below threshold {threshold}"
                )));
            }
            head[f as usize] = true;
        }
        Ok(Self::canonical(head, tail))
    }

    pub fn empty() -> Self {
        Self::canonical(Vec::new(), vec![false])
    }

    pub fn all() -> Self {
        Self::canonical(Vec::new(), vec![true])
    }

    pub fn evens() -> Self {
        Self::residue_class(2, 0)
    }

    pub fn odds() -> Self {
        Self::residue_class(2, 1)
    }

    /// `{x : x ≡ residue (mod modulus)}`; panics when `residue >= modulus`.
    pub fn residue_class(modulus: u64, residue: u64) -> Self {
        Self::new(0, modulus, [residue], []).expect("residue below modulus")
    }

    pub fn multiples_of(modulus: u64) -> Self {
        Self::residue_class(modulus, 0)
    }

    /// `{x : x ≥ start}`.
    pub fn at_least(start: u64) -> Self {
        Self::new(start, 1, [0], []).expect("valid")
    }

    pub fn finite(elements: impl IntoIterator<Item = u64>) -> Self {
        let elements: BTreeSet<u64> = elements.into_iter().collect();
        let threshold = elements.last().map_or(0, |m| m + 1);
        Self::new(threshold, 1, [], elements).expect("valid")
    }

    /// `{x : start ≤ x < end}`.
    pub fn interval(start: u64, end: u64) -> Self {
        Self::finite(start..end)
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn contains(&self, x: u64) -> bool {
        if x < self.threshold {
            self.prefix.binary_search(&x).is_ok()
        } else {
            self.residues.binary_search(&(x % self.modulus)).is_ok()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty() && self.prefix.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn size_if_finite(&self) -> Option<usize> {
        self.is_finite().then_some(self.prefix.len())
    }

    /// Elements in increasing order (infinite iterator for infinite sets).
    pub fn iter(&self) -> Elements<'_> {
        let base = self.threshold - self.threshold % self.modulus;
        Elements {
            set: self,
            prefix_pos: 0,
            base,
            residue_pos: 0,
        }
    }

    pub fn min(&self) -> Option<u64> {
        self.iter().next()
    }

    /// The `k`-th smallest (0-based) element of `self ∖ excluded`.
    pub fn nth_unseen(&self, excluded: &BTreeSet<u64>, k: usize) -> Option<u64> {
        self.iter().filter(|x| !excluded.contains(x)).nth(k)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        let head = (0..self.threshold).map(|x| !self.contains(x)).collect();
        let tail = (0..self.modulus)
            .map(|r| self.residues.binary_search(&r).is_err())
            .collect();
        Self::canonical(head, tail)
    }

    /// `self ∖ points` for a finite set of points.
    pub fn without(&self, points: &BTreeSet<u64>) -> Self {
        if points.is_empty() {
            return self.clone();
        }
        self.difference(&Self::finite(points.iter().copied()))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersect(other).is_empty()
    }

    fn residue_has(&self, r: u64) -> bool {
        self.residues.binary_search(&(r % self.modulus)).is_ok()
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let threshold = self.threshold.max(other.threshold);
        let modulus = self.modulus.lcm(&other.modulus);
        let head = (0..threshold)
            .map(|x| op(self.contains(x), other.contains(x)))
            .collect();
        let tail = (0..modulus)
            .map(|r| op(self.residue_has(r), other.residue_has(r)))
            .collect();
        Self::canonical(head, tail)
    }

    /// `head[x]` gives membership for `x < head.len()`, `tail[r]` membership
    /// of `x ≥ head.len()` with `x mod tail.len() = r`.
    fn canonical(mut head: Vec<bool>, tail: Vec<bool>) -> Self {
        let m = tail.len();
        let period = (1..=m)
            .filter(|p| m.is_multiple_of(*p))
            .find(|&p| (0..m).all(|r| tail[r] == tail[r % p]))
            .unwrap_or(m);
        let tail = &tail[..period];
        while let Some(&last) = head.last() {
            if last != tail[(head.len() - 1) % period] {
                break;
            }
            head.pop();
        }
        PeriodicSet {
            threshold: head.len() as u64,
            modulus: period as u64,
            residues: (0..period as u64).filter(|&r| tail[r as usize]).collect(),
            prefix: (0..head.len() as u64)
                .filter(|&x| head[x as usize])
                .collect(),
        }
    }
}

pub struct Elements<'a> {
    set: &'a PeriodicSet,
    prefix_pos: usize,
    base: u64,
    residue_pos: usize,
}

impl Iterator for Elements<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if let Some(&x) = self.set.prefix.get(self.prefix_pos) {
            self.prefix_pos += 1;
            return Some(x);
        }
        if self.set.residues.is_empty() {
            return None;
        }
        loop {
            if self.residue_pos == self.set.residues.len() {
                self.residue_pos = 0;
                self.base += self.set.modulus;
            }
            let x = self.base + self.set.residues[self.residue_pos];
            self.residue_pos += 1;
            if x >= self.set.threshold {
                return Some(x);
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[u64]) -> fmt::Result {
    f.write_str("{")?;
    for (i, x) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("}")
}

impl fmt::Display for PeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("empty")
        } else if *self == Self::all() {
            f.write_str("all")
        } else if *self == Self::evens() {
            f.write_str("evens")
        } else if *self == Self::odds() {
            f.write_str("odds")
        } else if self.is_finite() {
            f.write_str("finite:")?;
            write_list(f, &self.prefix)
        } else {
            write!(f, "ap:{},{},", self.threshold, self.modulus)?;
            write_list(f, &self.residues)?;
            f.write_str(",")?;
            write_list(f, &self.prefix)
        }
    }
}

impl fmt::Debug for PeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PeriodicSet({self})")
    }
}

struct Cursor<'a> {
    input: &'a str,
    rest: &'a str,
}

impl<'a> Cursor<'a> {
    fn fail<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(Error::SetNotation {
            input: self.input.to_string(),
            reason: reason.into(),
        })
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        match self.rest.strip_prefix(c) {
            Some(rest) => {
                self.rest = rest;
                Ok(())
            }
            None => self.fail(format!("expected `{c}`")),
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest.len());
        if end == 0 {
            return self.fail("expected a natural number");
        }
        let (digits, rest) = self.rest.split_at(end);
        self.rest = rest;
        match digits.parse() {
            Ok(n) => Ok(n),
            Err(_) => self.fail(format!("number `{digits}` out of range")),
        }
    }

    fn list(&mut self) -> Result<Vec<u64>> {
        self.expect('{')?;
        let mut items = Vec::new();
        self.skip_ws();
        if let Some(rest) = self.rest.strip_prefix('}') {
            self.rest = rest;
            return Ok(items);
        }
        loop {
            items.push(self.number()?);
            self.skip_ws();
            if let Some(rest) = self.rest.strip_prefix(',') {
                self.rest = rest;
            } else {
                self.expect('}')?;
                return Ok(items);
            }
        }
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.rest.is_empty() {
            Ok(())
        } else {
            self.fail(format!("unexpected trailing input `{}`", self.rest))
        }
    }
}

impl FromStr for PeriodicSet {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let trimmed = input.trim();
        match trimmed {
            "empty" => return Ok(Self::empty()),
            "all" => return Ok(Self::all()),
            "evens" => return Ok(Self::evens()),
            "odds" => return Ok(Self::odds()),
            _ => {}
        }
        let mut cur = Cursor { input, rest: "" };
        if let Some(rest) = trimmed.strip_prefix("finite:") {
            cur.rest = rest;
            let items = cur.list()?;
            cur.finish()?;
            Ok(Self::finite(items))
        } else if let Some(rest) = trimmed.strip_prefix("ap:") {
            cur.rest = rest;
            let threshold = cur.number()?;
            cur.expect(',')?;
            let modulus = cur.number()?;
            cur.expect(',')?;
            let residues = cur.list()?;
            cur.expect(',')?;
            let prefix = cur.list()?;
            cur.finish()?;
            Self::new(threshold, modulus, residues, prefix).map_err(|e| Error::SetNotation {
                input: input.to_string(),
                reason: e.to_string(),
            })
        } else {
            cur.fail("expected evens, odds, all, empty, finite:{..} or ap:T,m,{..},{..}")
        }
    }
}

impl Serialize for PeriodicSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PeriodicSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
