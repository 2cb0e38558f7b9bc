//! Scenario fixtures and brute-force oracles shared by the integration tests.
//!
//! The oracles only use `PeriodicSet::contains` and plain rational
//! arithmetic, never the engine's own set algebra or measures.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use num_traits::{Signed, Zero};
use repgen_core::generators::GeneratorKind;
use repgen_core::harness::{load_scenario, Scenario};
use repgen_core::{Dist, PeriodicSet, Rational};

/// Every set used in the fixtures has threshold and modulus well below this,
/// so a window this wide decides emptiness and finiteness.
pub const WINDOW: u64 = 4096;

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn scenario_dir() -> PathBuf {
    manifest_dir().join("tests").join("scenarios")
}

pub fn golden_dir() -> PathBuf {
    manifest_dir().join("tests").join("golden")
}

/// All bundled scenarios by file stem, in name order.
pub fn bundled() -> Vec<(String, Scenario)> {
    let mut paths: Vec<PathBuf> = fs::read_dir(scenario_dir())
        .expect("scenario directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).expect("readable scenario");
            let s = load_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            (p.file_stem().unwrap().to_string_lossy().into_owned(), s)
        })
        .collect()
}

pub fn bundled_of(kind: GeneratorKind) -> Vec<(String, Scenario)> {
    bundled()
        .into_iter()
        .filter(|(_, s)| s.generator.kind == kind)
        .collect()
}

pub fn q(n: u64, d: u64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn groups_of(s: &Scenario) -> Vec<PeriodicSet> {
    s.groups
        .as_finite()
        .expect("finite groups")
        .groups()
        .to_vec()
}

/// `max_i |π̂(A_i) − μ(A_i)|` where `π̂` is uniform over the distinct
/// elements of `prefix`.
pub fn oracle_distance(mu: &Dist, prefix: &[u64], groups: &[PeriodicSet]) -> Rational {
    let distinct: BTreeSet<u64> = prefix.iter().copied().collect();
    let d = distinct.len() as u64;
    groups
        .iter()
        .map(|g| {
            let hits = distinct.iter().filter(|&&x| g.contains(x)).count() as u64;
            let mass = mu
                .iter()
                .filter(|(x, _)| g.contains(*x))
                .fold(Rational::zero(), |acc, (_, m)| acc + m);
            (q(hits, d) - mass).abs()
        })
        .fold(Rational::zero(), |a, b| if b > a { b } else { a })
}

/// Every point of `mu` lies in `target` and has not been seen.
pub fn oracle_consistent(mu: &Dist, prefix: &[u64], target: &PeriodicSet) -> bool {
    mu.iter()
        .all(|(x, _)| target.contains(x) && !prefix.contains(&x))
}

/// Elements of `set` below `WINDOW`, or `None` when the set is infinite.
pub fn finite_elements(set: &dyn Fn(u64) -> bool) -> Option<Vec<u64>> {
    if (WINDOW / 2..WINDOW).any(set) {
        return None;
    }
    Some((0..WINDOW / 2).filter(|&x| set(x)).collect())
}

/// Finite support size by enumerating every nonempty subset of groups.
pub fn oracle_finite_support_size(h: &PeriodicSet, groups: &[PeriodicSet]) -> u64 {
    let k = groups.len();
    let mut total = 0;
    for mask in 1u32..1 << k {
        let member =
            |x: u64| h.contains(x) && (0..k).all(|i| mask & (1 << i) == 0 || groups[i].contains(x));
        if let Some(xs) = finite_elements(&member) {
            total += xs.len() as u64;
        }
    }
    total
}

pub fn format_q(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
