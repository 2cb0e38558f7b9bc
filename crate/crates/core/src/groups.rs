//! Group collections over the naturals.
//!
//! Two shapes are supported: a finite list of (possibly overlapping) periodic
//! groups, and an infinite partition into consecutive blocks whose sizes
//! follow a geometric rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::periodic::PeriodicSet;

/// Coverage and disjointness verdicts for a list of groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroupReport {
    pub covers: bool,
    pub partition: bool,
}

pub fn validate_groups(groups: &[PeriodicSet]) -> GroupReport {
    let union = groups
        .iter()
        .fold(PeriodicSet::empty(), |acc, g| acc.union(g));
    let covers = union == PeriodicSet::all();
    let disjoint = groups
        .iter()
        .enumerate()
        .all(|(i, a)| groups[i + 1..].iter().all(|b| a.is_disjoint(b)));
    GroupReport {
        covers,
        partition: covers && disjoint,
    }
}

/// Bit `i` is set iff the element lies in group `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MembershipVector(pub Vec<bool>);

impl MembershipVector {
    pub fn contains(&self, group: usize) -> bool {
        self.0.get(group).copied().unwrap_or(false)
    }

    pub fn groups(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| i)
    }
}

/// A finite collection of groups that covers the naturals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroups {
    groups: Vec<PeriodicSet>,
    partition: bool,
}

impl FiniteGroups {
    pub fn new(groups: Vec<PeriodicSet>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidGroups(
                "at least one group is required".into(),
            ));
        }
        let report = validate_groups(&groups);
        if !report.covers {
            return Err(Error::InvalidGroups(
                "groups do not cover every natural number".into(),
            ));
        }
        Ok(FiniteGroups {
            groups,
            partition: report.partition,
        })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[PeriodicSet] {
        &self.groups
    }

    pub fn is_partition(&self) -> bool {
        self.partition
    }

    pub fn validate(&self) -> GroupReport {
        validate_groups(&self.groups)
    }

    pub fn membership_vector(&self, x: u64) -> MembershipVector {
        MembershipVector(self.groups.iter().map(|g| g.contains(x)).collect())
    }

    /// The realizable membership vectors with their cells, ordered by vector.
    /// Cells are pairwise disjoint and cover the naturals.
    pub fn cells(&self) -> Vec<(MembershipVector, PeriodicSet)> {
        let mut cells = vec![(Vec::new(), PeriodicSet::all())];
        for g in &self.groups {
            cells = cells
                .into_iter()
                .flat_map(|(bits, cell)| {
                    let inside = cell.intersect(g);
                    let outside = cell.difference(g);
                    let mut with = bits.clone();
                    with.push(true);
                    let mut without = bits;
                    without.push(false);
                    [(with, inside), (without, outside)]
                })
                .filter(|(_, c)| !c.is_empty())
                .collect();
        }
        let mut out: Vec<_> = cells
            .into_iter()
            .map(|(bits, c)| (MembershipVector(bits), c))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Sum over nonempty subsets `S` of groups of `|∩S ∩ supp(h)|`, counting
    /// only the finite intersections.
    pub fn finite_support_size(&self, h: &Hypothesis) -> u64 {
        let k = self.groups.len();
        assert!(k < 32, "subset enumeration limited to fewer than 32 groups");
        (1u32..1 << k)
            .filter_map(|mask| {
                let inter = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .fold(h.support().clone(), |acc, i| acc.intersect(&self.groups[i]));
                inter.size_if_finite()
            })
            .map(|n| n as u64)
            .sum()
    }
}

/// Size rule for a block partition: block `i` (0-based) has size `head[i]`
/// for `i < head.len()`, otherwise `base^(first_exponent + i - head.len())`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSizes {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub head: Vec<u64>,
    pub base: u64,
    #[serde(default)]
    pub first_exponent: u32,
}

impl BlockSizes {
    pub fn geometric(base: u64, first_exponent: u32) -> Self {
        BlockSizes {
            head: Vec::new(),
            base,
            first_exponent,
        }
    }
}

/// Partition of the naturals into consecutive blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: BlockSizes,
}

impl BlockPartition {
    pub fn new(sizes: BlockSizes) -> Result<Self> {
        if sizes.base == 0 || sizes.head.contains(&0) {
            return Err(Error::InvalidGroups(
                "block sizes must be at least 1".into(),
            ));
        }
        Ok(BlockPartition { sizes })
    }

    pub fn sizes(&self) -> &BlockSizes {
        &self.sizes
    }

    pub fn block_size(&self, i: usize) -> u64 {
        match self.sizes.head.get(i) {
            Some(&s) => s,
            None => {
                let e = self.sizes.first_exponent as usize + i - self.sizes.head.len();
                self.sizes
                    .base
                    .saturating_pow(e.min(u32::MAX as usize) as u32)
            }
        }
    }

    /// First element of block `i`.
    pub fn block_start(&self, i: usize) -> u64 {
        (0..i).fold(0u64, |acc, j| acc.saturating_add(self.block_size(j)))
    }

    pub fn block(&self, i: usize) -> PeriodicSet {
        let start = self.block_start(i);
        PeriodicSet::interval(start, start.saturating_add(self.block_size(i)))
    }

    /// Index of the block containing `x`.
    pub fn group_index(&self, x: u64) -> usize {
        let mut start = 0u64;
        let mut i = 0;
        loop {
            let end = start.saturating_add(self.block_size(i));
            if x < end {
                return i;
            }
            start = end;
            i += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupCollection {
    Finite(FiniteGroups),
    Blocks(BlockPartition),
}

impl GroupCollection {
    pub fn finite(groups: Vec<PeriodicSet>) -> Result<Self> {
        FiniteGroups::new(groups).map(GroupCollection::Finite)
    }

    pub fn blocks(sizes: BlockSizes) -> Result<Self> {
        BlockPartition::new(sizes).map(GroupCollection::Blocks)
    }

    pub fn validate(&self) -> GroupReport {
        match self {
            GroupCollection::Finite(f) => f.validate(),
            GroupCollection::Blocks(_) => GroupReport {
                covers: true,
                partition: true,
            },
        }
    }

    pub fn is_partition(&self) -> bool {
        match self {
            GroupCollection::Finite(f) => f.is_partition(),
            GroupCollection::Blocks(_) => true,
        }
    }

    /// Number of groups, `None` for the infinite block partition.
    pub fn finite_len(&self) -> Option<usize> {
        match self {
            GroupCollection::Finite(f) => Some(f.len()),
            GroupCollection::Blocks(_) => None,
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteGroups> {
        match self {
            GroupCollection::Finite(f) => Some(f),
            GroupCollection::Blocks(_) => None,
        }
    }

    pub fn require_finite(&self, what: &str) -> Result<&FiniteGroups> {
        self.as_finite()
            .ok_or_else(|| Error::Unsupported(format!("{what} requires a finite group collection")))
    }

    /// Indices of the groups containing `x`, increasing.
    pub fn groups_of(&self, x: u64) -> Vec<usize> {
        match self {
            GroupCollection::Finite(f) => f.membership_vector(x).groups().collect(),
            GroupCollection::Blocks(b) => vec![b.group_index(x)],
        }
    }

    pub fn group(&self, i: usize) -> PeriodicSet {
        match self {
            GroupCollection::Finite(f) => f.groups[i].clone(),
            GroupCollection::Blocks(b) => b.block(i),
        }
    }

    /// Number of distinct elements of `points` lying in each group.
    pub fn counts<'a>(&self, points: impl IntoIterator<Item = &'a u64>) -> BTreeMap<usize, u64> {
        let mut counts = BTreeMap::new();
        for &x in points {
            for g in self.groups_of(x) {
                *counts.entry(g).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Whether every member of `hypotheses` has a finite support size with
/// respect to `groups`. Always true for finite collections; never true for
/// block partitions, where every block meets an infinite support in a
/// finite set and infinitely many of those terms are nonzero.
pub fn has_finite_support(hypotheses: &[Hypothesis], groups: &GroupCollection) -> bool {
    match groups {
        GroupCollection::Finite(_) => true,
        GroupCollection::Blocks(_) => hypotheses.is_empty(),
    }
}
