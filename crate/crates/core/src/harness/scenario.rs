//! Scenario documents.
//!
//! A scenario is a TOML document. It is deserialized into a loosely typed
//! mirror and then resolved field by field, so that every error names the
//! offending path (`generator.alpha`, `groups.sets[1]`, …).
//!
//! ```toml
//! name = "parity-evens"
//! horizon = 3
//! target = "evens"
//!
//! [[hypotheses]]
//! id = "evens"
//! support = "evens"
//!
//! [groups]
//! kind = "finite"
//! sets = ["evens", "odds"]
//!
//! [generator]
//! kind = "uniform"
//! alpha = "1/4"
//! d_star = 1
//!
//! [stream]
//! kind = "explicit"
//! values = [0, 2, 4]
//! ```

use serde::{Deserialize, Serialize};

use crate::dimension::GcSearch;
use crate::error::{Error, Result};
use crate::generators::{GeneratorConfig, GeneratorKind};
use crate::groups::{BlockSizes, GroupCollection};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::periodic::PeriodicSet;
use crate::scalar::{format_rational, parse_rational};

/// Members searched when looking up a hypothesis id in a countable family.
const FAMILY_LOOKUP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `h_i = {x ≥ i}`.
    Tails,
    /// `h_i = multiples of base^i`.
    Powers { base: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassSpec {
    Listed(Vec<Hypothesis>),
    /// A countable nested family, optionally cut after `limit` members.
    Family {
        family: Family,
        limit: Option<usize>,
    },
}

impl ClassSpec {
    pub fn class(&self) -> HypothesisClass {
        match self {
            ClassSpec::Listed(h) => {
                HypothesisClass::finite(h.clone()).expect("ids validated on load")
            }
            ClassSpec::Family { family, limit } => {
                let (family, limit) = (*family, *limit);
                HypothesisClass::enumerated(move |i| {
                    if limit.is_some_and(|l| i >= l) {
                        return None;
                    }
                    Some(family_member(family, i))
                })
            }
        }
    }

    fn find(&self, id: &str) -> Option<Hypothesis> {
        match self {
            ClassSpec::Listed(h) => h.iter().find(|h| h.id() == id).cloned(),
            ClassSpec::Family { family, limit } => (0..limit.unwrap_or(FAMILY_LOOKUP))
                .map(|i| family_member(*family, i))
                .find(|h| h.id() == id),
        }
    }
}

fn family_member(family: Family, i: usize) -> Hypothesis {
    let (id, support) = match family {
        Family::Tails => (format!("ge{i}"), PeriodicSet::at_least(i as u64)),
        Family::Powers { base } => {
            let m = base.pow(i as u32);
            (format!("mult{m}"), PeriodicSet::multiples_of(m))
        }
    };
    Hypothesis::new(id, support).expect("family members are infinite")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryScript {
    /// The least dimension witness, then the target's unseen support.
    GcWitness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StreamSpec {
    Explicit(Vec<u64>),
    /// The support of the named hypothesis in increasing order.
    Enumerate(String),
    Adversary(AdversaryScript),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expectations {
    pub all_representative: Option<bool>,
    /// `first_consistent_from` must be at most this step.
    pub consistent_by: Option<usize>,
    pub never_consistent: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub name: String,
    pub horizon: usize,
    pub target: Option<String>,
    pub class: ClassSpec,
    pub groups: GroupCollection,
    pub generator: GeneratorConfig,
    pub stream: StreamSpec,
    pub expect: Expectations,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    target: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    hypotheses: Vec<HypothesisDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    family: Option<FamilyDoc>,
    groups: GroupsDoc,
    generator: GeneratorDoc,
    stream: StreamDoc,
    #[serde(default, skip_serializing_if = "ExpectDoc::is_empty")]
    expect: ExpectDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HypothesisDoc {
    id: String,
    support: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limit: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupsDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    first_exponent: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    head: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    kind: String,
    alpha: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d_star: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gc_search: Option<GcSearch>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StreamDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    values: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hypothesis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    script: Option<String>,
}

#[derive(Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ExpectDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    all_representative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    consistent_by: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    never_consistent: Option<bool>,
}

impl ExpectDoc {
    fn is_empty(&self) -> bool {
        self.all_representative.is_none()
            && self.consistent_by.is_none()
            && self.never_consistent.is_none()
    }
}

fn scenario_err(path: impl Into<String>, message: impl std::fmt::Display) -> Error {
    Error::scenario(path, message.to_string())
}

fn parse_set(path: String, text: &str) -> Result<PeriodicSet> {
    text.parse().map_err(|e: Error| scenario_err(path, e))
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc =
        toml::from_str(text).map_err(|e| scenario_err("document", e.message()))?;
    let scenario = resolve(doc)?;
    validate(&scenario)?;
    Ok(scenario)
}

fn resolve(doc: ScenarioDoc) -> Result<Scenario> {
    if doc.horizon == 0 {
        return Err(scenario_err("horizon", "must be at least 1"));
    }
    let class = match (doc.hypotheses.is_empty(), doc.family) {
        (false, Some(_)) => {
            return Err(scenario_err(
                "family",
                "give either `hypotheses` or `family`, not both",
            ))
        }
        (true, None) => return Err(scenario_err("hypotheses", "the hypothesis class is empty")),
        (false, None) => {
            let mut hyps = Vec::new();
            for (i, h) in doc.hypotheses.into_iter().enumerate() {
                let support = parse_set(format!("hypotheses[{i}].support"), &h.support)?;
                hyps.push(
                    Hypothesis::new(h.id, support)
                        .map_err(|e| scenario_err(format!("hypotheses[{i}]"), e))?,
                );
            }
            HypothesisClass::finite(hyps.clone()).map_err(|e| scenario_err("hypotheses", e))?;
            ClassSpec::Listed(hyps)
        }
        (true, Some(f)) => {
            let family = match f.kind.as_str() {
                "tails" => Family::Tails,
                "powers" => match f.base {
                    Some(b) if b >= 2 => Family::Powers { base: b },
                    _ => {
                        return Err(scenario_err(
                            "family.base",
                            "powers need a base of at least 2",
                        ))
                    }
                },
                other => {
                    return Err(scenario_err(
                        "family.kind",
                        format!("unknown family `{other}`"),
                    ))
                }
            };
            if matches!(family, Family::Powers { .. }) && f.limit.is_none_or(|l| l > 12) {
                return Err(scenario_err(
                    "family.limit",
                    "powers families need a limit of at most 12",
                ));
            }
            ClassSpec::Family {
                family,
                limit: f.limit,
            }
        }
    };

    let groups = match doc.groups.kind.as_str() {
        "finite" => {
            let sets = doc
                .groups
                .sets
                .iter()
                .enumerate()
                .map(|(i, s)| parse_set(format!("groups.sets[{i}]"), s))
                .collect::<Result<Vec<_>>>()?;
            GroupCollection::finite(sets).map_err(|e| scenario_err("groups.sets", e))?
        }
        "blocks" => {
            let base = doc
                .groups
                .base
                .ok_or_else(|| scenario_err("groups.base", "required for blocks"))?;
            GroupCollection::blocks(BlockSizes {
                head: doc.groups.head,
                base,
                first_exponent: doc.groups.first_exponent.unwrap_or(0),
            })
            .map_err(|e| scenario_err("groups", e))?
        }
        other => {
            return Err(scenario_err(
                "groups.kind",
                format!("unknown collection `{other}`"),
            ))
        }
    };

    let kind: GeneratorKind = doc
        .generator
        .kind
        .parse()
        .map_err(|e| scenario_err("generator.kind", e))?;
    let alpha =
        parse_rational(&doc.generator.alpha).map_err(|e| scenario_err("generator.alpha", e))?;
    if alpha < num_traits::Zero::zero() || alpha > num_traits::One::one() {
        return Err(scenario_err("generator.alpha", "must lie in [0, 1]"));
    }
    if doc.generator.d_star == Some(0) {
        return Err(scenario_err("generator.d_star", "must be at least 1"));
    }
    let generator = GeneratorConfig {
        kind,
        alpha,
        d_star: doc.generator.d_star,
        gc_search: doc.generator.gc_search.unwrap_or_default(),
        constant: doc.generator.constant.unwrap_or(0),
    };

    let stream = match doc.stream.kind.as_str() {
        "explicit" => StreamSpec::Explicit(doc.stream.values),
        "enumerate" => StreamSpec::Enumerate(
            doc.stream
                .hypothesis
                .ok_or_else(|| scenario_err("stream.hypothesis", "required for enumerate"))?,
        ),
        "adversary" => match doc.stream.script.as_deref() {
            Some("gc-witness") => StreamSpec::Adversary(AdversaryScript::GcWitness),
            other => {
                return Err(scenario_err(
                    "stream.script",
                    format!("unknown script {other:?}"),
                ))
            }
        },
        other => {
            return Err(scenario_err(
                "stream.kind",
                format!("unknown stream `{other}`"),
            ))
        }
    };

    Ok(Scenario {
        name: doc.name,
        horizon: doc.horizon,
        target: doc.target,
        class,
        groups,
        generator,
        stream,
        expect: Expectations {
            all_representative: doc.expect.all_representative,
            consistent_by: doc.expect.consistent_by,
            never_consistent: doc.expect.never_consistent,
        },
    })
}

fn validate(s: &Scenario) -> Result<()> {
    let target = match &s.target {
        Some(id) => Some(
            s.class
                .find(id)
                .ok_or_else(|| scenario_err("target", format!("no hypothesis `{id}`")))?,
        ),
        None if matches!(s.stream, StreamSpec::Adversary(_)) => None,
        None => {
            return Err(scenario_err(
                "target",
                "required unless the stream is an adversary script",
            ))
        }
    };
    match &s.stream {
        StreamSpec::Explicit(values) => {
            if values.len() < s.horizon {
                return Err(scenario_err(
                    "stream.values",
                    format!("{} values for a horizon of {}", values.len(), s.horizon),
                ));
            }
            let t = target.as_ref().expect("explicit streams have a target");
            if let Some((i, x)) = values.iter().enumerate().find(|(_, x)| !t.contains(**x)) {
                return Err(scenario_err(
                    format!("stream.values[{i}]"),
                    format!("{x} is outside supp({})", t.id()),
                ));
            }
        }
        StreamSpec::Enumerate(id) => {
            let h = s.class.find(id).ok_or_else(|| {
                scenario_err("stream.hypothesis", format!("no hypothesis `{id}`"))
            })?;
            let t = target.as_ref().expect("enumerated streams have a target");
            if let Some(x) = h.support().iter().take(s.horizon).find(|x| !t.contains(*x)) {
                return Err(scenario_err(
                    "stream.hypothesis",
                    format!("{x} is outside supp({})", t.id()),
                ));
            }
        }
        StreamSpec::Adversary(_) => {
            if !matches!(s.class, ClassSpec::Listed(_)) {
                return Err(scenario_err(
                    "stream.script",
                    "adversary streams need a listed class",
                ));
            }
        }
    }
    let needs_finite = matches!(
        s.generator.kind,
        GeneratorKind::Uniform | GeneratorKind::Nonuniform | GeneratorKind::Inlimit
    );
    if needs_finite && s.groups.as_finite().is_none() {
        return Err(scenario_err(
            "groups.kind",
            format!("{} needs a finite collection", s.generator.kind.name()),
        ));
    }
    let needs_partition = matches!(
        s.generator.kind,
        GeneratorKind::Uniform | GeneratorKind::Nonuniform
    ) || matches!(s.stream, StreamSpec::Adversary(_));
    if needs_partition && !s.groups.is_partition() {
        return Err(scenario_err(
            "groups.sets",
            "groups must be pairwise disjoint here",
        ));
    }
    if s.generator.kind == GeneratorKind::Uniform && !matches!(s.class, ClassSpec::Listed(_)) {
        return Err(scenario_err(
            "generator.kind",
            "uniform needs a listed class",
        ));
    }
    Ok(())
}

/// Prints a scenario back to a document that loads to the same scenario.
pub fn print_scenario(s: &Scenario) -> String {
    let (hypotheses, family) = match &s.class {
        ClassSpec::Listed(h) => (
            h.iter()
                .map(|h| HypothesisDoc {
                    id: h.id().to_string(),
                    support: h.support().to_string(),
                })
                .collect(),
            None,
        ),
        ClassSpec::Family { family, limit } => {
            let (kind, base) = match family {
                Family::Tails => ("tails", None),
                Family::Powers { base } => ("powers", Some(*base)),
            };
            (
                Vec::new(),
                Some(FamilyDoc {
                    kind: kind.into(),
                    base,
                    limit: *limit,
                }),
            )
        }
    };
    let groups = match &s.groups {
        GroupCollection::Finite(f) => GroupsDoc {
            kind: "finite".into(),
            sets: f.groups().iter().map(|g| g.to_string()).collect(),
            base: None,
            first_exponent: None,
            head: Vec::new(),
        },
        GroupCollection::Blocks(b) => GroupsDoc {
            kind: "blocks".into(),
            sets: Vec::new(),
            base: Some(b.sizes().base),
            first_exponent: Some(b.sizes().first_exponent),
            head: b.sizes().head.clone(),
        },
    };
    let g = &s.generator;
    let generator = GeneratorDoc {
        kind: g.kind.name().into(),
        alpha: format_rational(&g.alpha),
        d_star: g.d_star,
        constant: (g.constant != 0).then_some(g.constant),
        gc_search: (g.gc_search != GcSearch::default()).then_some(g.gc_search),
    };
    let stream = match &s.stream {
        StreamSpec::Explicit(v) => StreamDoc {
            kind: "explicit".into(),
            values: v.clone(),
            hypothesis: None,
            script: None,
        },
        StreamSpec::Enumerate(id) => StreamDoc {
            kind: "enumerate".into(),
            values: Vec::new(),
            hypothesis: Some(id.clone()),
            script: None,
        },
        StreamSpec::Adversary(AdversaryScript::GcWitness) => StreamDoc {
            kind: "adversary".into(),
            values: Vec::new(),
            hypothesis: None,
            script: Some("gc-witness".into()),
        },
    };
    let doc = ScenarioDoc {
        name: s.name.clone(),
        horizon: s.horizon,
        target: s.target.clone(),
        hypotheses,
        family,
        groups,
        generator,
        stream,
        expect: ExpectDoc {
            all_representative: s.expect.all_representative,
            consistent_by: s.expect.consistent_by,
            never_consistent: s.expect.never_consistent,
        },
    };
    toml::to_string(&doc).expect("scenario documents serialize")
}
