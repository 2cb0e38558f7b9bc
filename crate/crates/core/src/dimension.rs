//! The Group Closure dimension `GC_α(ℋ, 𝒜)`.
//!
//! A distinct tuple `x₁..x_d` with a non-⊥ closure `C` witnesses dimension
//! `d` when, with `S = {i : C ∩ A_i ∖ {x₁..x_d} = ∅}`, either
//!
//! 1. `max_{i∈S} π̂(i) > α`, or
//! 2. `α·|𝒜 ∖ S| < Σ_{i∈S} π̂(i)` (with `α·∞ = ∞` for infinite collections).
//!
//! The search for finite classes and finite partitions works on atoms, the
//! joint refinement of all supports and groups. Elements of one atom are
//! interchangeable for both conditions, so a tuple is characterized by how
//! many elements it takes from each atom. Any witness must satisfy
//! `d ≤ max(M, ⌈M/α⌉ − 1)` where `M` is the total size of the finite atoms:
//! the exhausted groups only contain elements of finite atoms.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{BlockPartition, FiniteGroups, GroupCollection};
use crate::hypothesis::{closure, Closure, Hypothesis};
use crate::periodic::PeriodicSet;
use crate::Rational;

/// Which defining condition a tuple satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Condition {
    /// Condition (1): exhausted `group` carries empirical mass `mass > α`.
    ExhaustedGroup { group: usize, mass: Rational },
    /// Condition (2): the exhausted groups' mass exceeds `α` times the number
    /// of groups that can still be generated from.
    MassBudget {
        exhausted: Vec<usize>,
        exhausted_mass: Rational,
        budget: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub tuple: Vec<u64>,
    pub condition: Condition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GcStatus {
    Exact(usize),
    AtLeast(usize),
    /// Witnesses were found along an unbounded family of tuples at every
    /// size checked, up to `checked_up_to`.
    InfiniteWitnessed {
        checked_up_to: usize,
        family: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcResult {
    pub status: GcStatus,
    pub witness: Option<Witness>,
    /// Every witness satisfies `d ≤ bound`; `None` when not computed.
    pub bound: Option<usize>,
}

impl GcResult {
    /// The certified value (exact or lower bound).
    pub fn value(&self) -> usize {
        match &self.status {
            GcStatus::Exact(d) | GcStatus::AtLeast(d) => *d,
            GcStatus::InfiniteWitnessed { checked_up_to, .. } => *checked_up_to,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        match self.status {
            GcStatus::Exact(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcSearch {
    pub max_d: usize,
    /// Largest element the candidate pool may contain.
    pub horizon: u64,
}

impl Default for GcSearch {
    fn default() -> Self {
        GcSearch {
            max_d: 8,
            horizon: 4096,
        }
    }
}

fn frac(num: usize, den: usize) -> Rational {
    Rational::new(num.into(), den.into())
}

fn check_distinct(tuple: &[u64]) -> Result<BTreeSet<u64>> {
    let mut seen = BTreeSet::new();
    for &x in tuple {
        if !seen.insert(x) {
            return Err(Error::DuplicateElement(x));
        }
    }
    Ok(seen)
}

/// Evaluates the defining conditions on one distinct tuple. Condition (1) is
/// reported in preference to (2); for (1) the exhausted group with the largest
/// mass (smallest index on ties) is named.
pub fn check_witness(
    hypotheses: &[Hypothesis],
    groups: &GroupCollection,
    alpha: &Rational,
    tuple: &[u64],
) -> Result<Option<Condition>> {
    let seen = check_distinct(tuple)?;
    if tuple.is_empty() {
        return Ok(None);
    }
    let Closure::Set(closed) = closure(hypotheses, tuple) else {
        return Ok(None);
    };
    let d = tuple.len();
    let counts = groups.counts(&seen);
    let remaining = closed.without(&seen);
    match groups {
        GroupCollection::Finite(f) => {
            if !f.is_partition() {
                return Err(Error::Unsupported(
                    "the group closure dimension is defined for partitions".into(),
                ));
            }
            let exhausted: Vec<usize> = (0..f.len())
                .filter(|&i| remaining.is_disjoint(&f.groups()[i]))
                .collect();
            let open = f.len() - exhausted.len();
            Ok(evaluate(&exhausted, &counts, d, alpha, Some(open)))
        }
        GroupCollection::Blocks(b) => {
            let realized: Vec<usize> = counts.keys().copied().collect();
            let exhausted: Vec<usize> = realized
                .iter()
                .copied()
                .filter(|&i| remaining.is_disjoint(&b.block(i)))
                .collect();
            let open = remaining.size_if_finite().map(|_| {
                remaining
                    .iter()
                    .map(|x| b.group_index(x))
                    .collect::<BTreeSet<_>>()
                    .len()
            });
            Ok(evaluate(&exhausted, &counts, d, alpha, open))
        }
    }
}

/// `exhausted` lists the exhausted groups that matter (any exhausted group
/// with zero count contributes nothing to either condition).
fn evaluate(
    exhausted: &[usize],
    counts: &BTreeMap<usize, u64>,
    d: usize,
    alpha: &Rational,
    open_groups: Option<usize>,
) -> Option<Condition> {
    let mass = |i: &usize| frac(counts.get(i).copied().unwrap_or(0) as usize, d);
    let mut best: Option<(usize, Rational)> = None;
    for i in exhausted {
        let m = mass(i);
        if best.as_ref().is_none_or(|(_, b)| m > *b) {
            best = Some((*i, m));
        }
    }
    if let Some((group, m)) = best {
        if m > *alpha {
            return Some(Condition::ExhaustedGroup { group, mass: m });
        }
    }
    let open = open_groups?;
    let exhausted_mass = exhausted
        .iter()
        .map(mass)
        .fold(Rational::zero(), |a, b| a + b);
    let budget = alpha * Rational::from_integer(open.into());
    (budget < exhausted_mass).then(|| Condition::MassBudget {
        exhausted: exhausted.to_vec(),
        exhausted_mass,
        budget,
    })
}

struct Atom {
    /// `in_support[h]` iff the atom lies inside `supp(h)`.
    in_support: Vec<bool>,
    group: usize,
    size: Option<usize>,
    pool: Vec<u64>,
}

fn atoms(hypotheses: &[Hypothesis], groups: &FiniteGroups, search: &GcSearch) -> (Vec<Atom>, bool) {
    let mut cells: Vec<(Vec<bool>, PeriodicSet)> = vec![(Vec::new(), PeriodicSet::all())];
    for h in hypotheses {
        cells = cells
            .into_iter()
            .flat_map(|(bits, cell)| {
                let mut a = bits.clone();
                a.push(true);
                let mut b = bits;
                b.push(false);
                [
                    (a, cell.intersect(h.support())),
                    (b, cell.difference(h.support())),
                ]
            })
            .filter(|(_, c)| !c.is_empty())
            .collect();
    }
    let mut out = Vec::new();
    let mut sufficient = true;
    for (bits, cell) in cells {
        for (g, group) in groups.groups().iter().enumerate() {
            let atom = cell.intersect(group);
            if atom.is_empty() {
                continue;
            }
            let size = atom.size_if_finite();
            let wanted = size.unwrap_or(search.max_d + 1);
            let pool: Vec<u64> = atom
                .iter()
                .take(wanted)
                .take_while(|&x| x <= search.horizon)
                .collect();
            sufficient &= pool.len() == wanted;
            out.push(Atom {
                in_support: bits.clone(),
                group: g,
                size,
                pool,
            });
        }
    }
    (out, sufficient)
}

/// Upper bound on the size of any witness.
fn witness_bound(finite_mass: usize, alpha: &Rational) -> usize {
    if finite_mass == 0 {
        return 0;
    }
    let m = Rational::from_integer(finite_mass.into());
    let ratio = (m / alpha).ceil().to_integer();
    let by_alpha = ratio.to_usize().unwrap_or(usize::MAX).saturating_sub(1);
    by_alpha.max(finite_mass)
}

/// Visits every count vector `c` with `Σc = d` and `c[a] ≤ caps[a]`.
fn for_each_composition(caps: &[usize], d: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(
        caps: &[usize],
        pos: usize,
        left: usize,
        cur: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if pos == caps.len() {
            if left == 0 {
                visit(cur);
            }
            return;
        }
        let rest: usize = caps[pos + 1..].iter().sum();
        let lo = left.saturating_sub(rest);
        for c in lo..=caps[pos].min(left) {
            cur.push(c);
            go(caps, pos + 1, left - c, cur, visit);
            cur.pop();
        }
    }
    go(caps, 0, d, &mut Vec::with_capacity(caps.len()), visit)
}

/// Condition check on a count vector, using only atom data.
fn type_witnesses(
    atoms: &[Atom],
    counts: &[usize],
    n_hyp: usize,
    k: usize,
    alpha: &Rational,
) -> bool {
    let d: usize = counts.iter().sum();
    let consistent: Vec<usize> = (0..n_hyp)
        .filter(|&h| {
            atoms
                .iter()
                .zip(counts)
                .all(|(a, &c)| c == 0 || a.in_support[h])
        })
        .collect();
    if consistent.is_empty() {
        return false;
    }
    let mut open = vec![false; k];
    let mut group_count = vec![0usize; k];
    for (a, &c) in atoms.iter().zip(counts) {
        group_count[a.group] += c;
        let in_closure = consistent.iter().all(|&h| a.in_support[h]);
        if in_closure && a.size.is_none_or(|s| c < s) {
            open[a.group] = true;
        }
    }
    let exhausted: Vec<usize> = (0..k).filter(|&i| !open[i]).collect();
    let max_count = exhausted.iter().map(|&i| group_count[i]).max().unwrap_or(0);
    if frac(max_count, d) > *alpha {
        return true;
    }
    let total: usize = exhausted.iter().map(|&i| group_count[i]).sum();
    alpha * Rational::from_integer((k - exhausted.len()).into()) < frac(total, d)
}

/// Computes `GC_α` for a finite class and a finite partition.
///
/// Reports `Exact(d)` when the candidate pool is complete and the search
/// depth reaches the witness bound, otherwise `AtLeast(d)` where `d` is the
/// largest witness found. The reported witness is the lexicographically least
/// sorted tuple of that size, re-verified with [`check_witness`].
pub fn group_closure_dimension(
    hypotheses: &[Hypothesis],
    groups: &GroupCollection,
    alpha: &Rational,
    search: &GcSearch,
) -> Result<GcResult> {
    let finite = groups.require_finite("group closure dimension")?;
    if !finite.is_partition() {
        return Err(Error::Unsupported(
            "the group closure dimension is defined for partitions".into(),
        ));
    }
    if *alpha <= Rational::zero() {
        return Err(Error::Unsupported("α must be positive".into()));
    }
    let (atoms, pool_complete) = atoms(hypotheses, finite, search);
    let finite_mass: usize = atoms.iter().filter_map(|a| a.size).sum();
    let bound = witness_bound(finite_mass, alpha);
    let caps: Vec<usize> = atoms.iter().map(|a| a.pool.len()).collect();
    let depth = search.max_d.min(bound);

    let mut best: Option<Vec<u64>> = None;
    for d in (1..=depth).rev() {
        let mut least: Option<Vec<u64>> = None;
        for_each_composition(&caps, d, &mut |counts| {
            if type_witnesses(&atoms, counts, hypotheses.len(), finite.len(), alpha) {
                let mut tuple: Vec<u64> = atoms
                    .iter()
                    .zip(counts)
                    .flat_map(|(a, &c)| a.pool[..c].iter().copied())
                    .collect();
                tuple.sort_unstable();
                if least.as_ref().is_none_or(|l| tuple < *l) {
                    least = Some(tuple);
                }
            }
        });
        if least.is_some() {
            best = least;
            break;
        }
    }

    let witness = match best {
        Some(tuple) => {
            let condition = check_witness(hypotheses, groups, alpha, &tuple)?.ok_or_else(|| {
                Error::Invariant(format!("search witness {tuple:?} failed re-verification"))
            })?;
            Some(Witness { tuple, condition })
        }
        None => None,
    };
    let d = witness.as_ref().map_or(0, |w| w.tuple.len());
    let status = if pool_complete && search.max_d >= bound {
        GcStatus::Exact(d)
    } else {
        GcStatus::AtLeast(d)
    };
    Ok(GcResult {
        status,
        witness,
        bound: Some(bound),
    })
}

/// Lower-bound search on a block partition along initial segments of each
/// support that end on block boundaries. Reports `InfiniteWitnessed` when one
/// hypothesis witnesses at every one of `boundaries` consecutive boundaries.
pub fn block_dimension_lower_bound(
    hypotheses: &[Hypothesis],
    blocks: &BlockPartition,
    alpha: &Rational,
    boundaries: usize,
    max_tuple: usize,
) -> Result<GcResult> {
    let groups = GroupCollection::Blocks(blocks.clone());
    let mut best: Option<Witness> = None;
    for h in hypotheses {
        let mut all_hit = boundaries > 0;
        let mut checked = 0;
        let mut last_hit: Option<Witness> = None;
        for i in 0..boundaries {
            let end = blocks.block_start(i + 1);
            let tuple: Vec<u64> = h
                .support()
                .iter()
                .take_while(|&x| x < end)
                .take(max_tuple + 1)
                .collect();
            if tuple.is_empty() || tuple.len() > max_tuple {
                all_hit = false;
                break;
            }
            checked += 1;
            match check_witness(hypotheses, &groups, alpha, &tuple)? {
                Some(condition) => {
                    last_hit = Some(Witness { tuple, condition });
                }
                None => all_hit = false,
            }
        }
        if all_hit && checked == boundaries {
            let w = last_hit.expect("witness at every boundary");
            return Ok(GcResult {
                status: GcStatus::InfiniteWitnessed {
                    checked_up_to: w.tuple.len(),
                    family: format!(
                        "initial segments of supp({}) ending on block boundaries",
                        h.id()
                    ),
                },
                witness: Some(w),
                bound: None,
            });
        }
        if let Some(w) = last_hit {
            if best.as_ref().is_none_or(|b| w.tuple.len() > b.tuple.len()) {
                best = Some(w);
            }
        }
    }
    Ok(GcResult {
        status: GcStatus::AtLeast(best.as_ref().map_or(0, |w| w.tuple.len())),
        witness: best,
        bound: None,
    })
}

impl Condition {
    pub fn is_exhausted_group(&self) -> bool {
        matches!(self, Condition::ExhaustedGroup { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::BlockSizes;

    fn q(n: usize, d: usize) -> Rational {
        frac(n, d)
    }

    fn all() -> Vec<Hypothesis> {
        vec![Hypothesis::new("all", PeriodicSet::all()).unwrap()]
    }

    fn split(points: &[u64]) -> GroupCollection {
        let mut gs: Vec<PeriodicSet> = points.iter().map(|&p| PeriodicSet::finite([p])).collect();
        let rest = gs
            .iter()
            .fold(PeriodicSet::all(), |acc, g| acc.difference(g));
        gs.push(rest);
        GroupCollection::finite(gs).unwrap()
    }

    #[test]
    fn witness_conditions() {
        let whole = GroupCollection::finite(vec![PeriodicSet::all()]).unwrap();
        assert_eq!(check_witness(&all(), &whole, &q(1, 2), &[0]).unwrap(), None);

        let g = split(&[0]);
        assert_eq!(
            check_witness(&all(), &g, &q(1, 2), &[0]).unwrap(),
            Some(Condition::ExhaustedGroup {
                group: 0,
                mass: q(1, 1)
            })
        );
        // π̂(0) = 1/2 is not > 1/2, and 1/2·1 is not < 1/2
        assert_eq!(check_witness(&all(), &g, &q(1, 2), &[0, 5]).unwrap(), None);
        assert_eq!(
            check_witness(&all(), &g, &q(1, 2), &[0, 0]),
            Err(Error::DuplicateElement(0))
        );
    }

    #[test]
    fn condition_two_fires_on_mass_budget() {
        let g = split(&[0, 1]);
        // S = {0, 1}, mass 2/7 > 1/4 · 1
        let c = check_witness(&all(), &g, &q(1, 4), &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        assert!(matches!(c, Some(Condition::MassBudget { .. })));
        let c = check_witness(&all(), &g, &q(1, 4), &[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        assert_eq!(c, None);
    }

    #[test]
    fn bot_closure_never_witnesses() {
        let h = vec![Hypothesis::new("evens", PeriodicSet::evens()).unwrap()];
        let g = split(&[1]);
        assert_eq!(check_witness(&h, &g, &q(1, 4), &[1]).unwrap(), None);
    }

    #[test]
    fn trivial_dimensions() {
        let whole = GroupCollection::finite(vec![PeriodicSet::all()]).unwrap();
        let r = group_closure_dimension(&all(), &whole, &q(1, 2), &GcSearch::default()).unwrap();
        assert_eq!(r.status, GcStatus::Exact(0));
        assert!(r.witness.is_none());

        let g = split(&[0]);
        let r = group_closure_dimension(&all(), &g, &q(1, 2), &GcSearch::default()).unwrap();
        assert_eq!(r.status, GcStatus::Exact(1));
        assert_eq!(r.witness.unwrap().tuple, vec![0]);
    }

    #[test]
    fn shallow_search_reports_lower_bound() {
        let g = split(&[0, 1]);
        let shallow = GcSearch {
            max_d: 4,
            horizon: 4096,
        };
        let r = group_closure_dimension(&all(), &g, &q(1, 4), &shallow).unwrap();
        assert_eq!(r.status, GcStatus::AtLeast(4));
        let r = group_closure_dimension(&all(), &g, &q(1, 4), &GcSearch::default()).unwrap();
        assert_eq!(r.status, GcStatus::Exact(7));
        assert_eq!(r.witness.unwrap().tuple, vec![0, 1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn small_horizon_degrades_to_lower_bound() {
        let g = split(&[0]);
        let tight = GcSearch {
            max_d: 4,
            horizon: 2,
        };
        let r = group_closure_dimension(&all(), &g, &q(1, 2), &tight).unwrap();
        assert_eq!(r.status, GcStatus::AtLeast(1));
    }

    #[test]
    fn rejects_unsupported_collections() {
        let blocks = GroupCollection::blocks(BlockSizes::geometric(2, 1)).unwrap();
        assert!(group_closure_dimension(&all(), &blocks, &q(1, 2), &GcSearch::default()).is_err());
        let overlap =
            GroupCollection::finite(vec![PeriodicSet::finite([0, 1]), PeriodicSet::all()]).unwrap();
        assert!(group_closure_dimension(&all(), &overlap, &q(1, 2), &GcSearch::default()).is_err());
    }

    #[test]
    fn geometric_blocks_witness_unboundedly() {
        let blocks = BlockPartition::new(BlockSizes::geometric(2, 1)).unwrap();
        let r = block_dimension_lower_bound(&all(), &blocks, &q(1, 2), 6, 1000).unwrap();
        match r.status {
            GcStatus::InfiniteWitnessed { checked_up_to, .. } => assert_eq!(checked_up_to, 126),
            other => panic!("unexpected {other:?}"),
        }
        let g = GroupCollection::Blocks(blocks);
        let c = check_witness(&all(), &g, &q(1, 2), &(0..6).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            c,
            Some(Condition::ExhaustedGroup {
                group: 1,
                mass: q(2, 3)
            })
        );
    }

    #[test]
    fn composition_enumeration() {
        let mut n = 0;
        for_each_composition(&[2, 1, 3], 3, &mut |c| {
            assert_eq!(c.iter().sum::<usize>(), 3);
            n += 1;
        });
        // brute force count
        let brute = (0..=2)
            .flat_map(|a| (0..=1).flat_map(move |b| (0..=3).map(move |c| a + b + c)))
            .filter(|&s| s == 3)
            .count();
        assert_eq!(n, brute);
    }
}
