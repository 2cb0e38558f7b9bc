//! The game loop: stream, generator, and per-step verification.

use super::scenario::{AdversaryScript, ClassSpec, Scenario, StreamSpec};
use super::verify::{check_step, summarize};
use crate::adversaries::gc_witness_adversary;
use crate::dimension::group_closure_dimension;
use crate::error::{Error, Result};
use crate::generators::{build_generator, resolve_d_star, Generator, GeneratorKind, History};
use crate::hypothesis::{closure, Hypothesis, HypothesisClass};
use crate::{Dist, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceHeader {
    pub scenario: String,
    pub generator: GeneratorKind,
    pub alpha: Rational,
    pub d_star: Option<usize>,
    pub target: String,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub t: usize,
    pub x: u64,
    pub distinct: usize,
    pub dist: Dist,
    pub sup_distance: Rational,
    pub representative: bool,
    pub consistent: bool,
    /// No hypothesis (among those considered at this step) is consistent.
    pub closure_bot: bool,
    pub selected: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summary {
    pub all_representative: bool,
    pub first_consistent_from: Option<usize>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameTrace {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
    pub summary: Summary,
}

/// The stream prefix of length `horizon` and the target it lies in.
pub fn materialize_stream(s: &Scenario) -> Result<(Vec<u64>, Hypothesis)> {
    let find = |id: &str| -> Result<Hypothesis> {
        let class = s.class.class();
        (0..)
            .map_while(|i| class.get(i))
            .take(256)
            .find(|h| h.id() == id)
            .ok_or_else(|| Error::scenario("target", format!("no hypothesis `{id}`")))
    };
    match &s.stream {
        StreamSpec::Explicit(v) => Ok((
            v[..s.horizon].to_vec(),
            find(s.target.as_deref().unwrap_or_default())?,
        )),
        StreamSpec::Enumerate(id) => {
            let h = find(id)?;
            let xs = h.support().iter().take(s.horizon).collect();
            Ok((xs, find(s.target.as_deref().unwrap_or_default())?))
        }
        StreamSpec::Adversary(AdversaryScript::GcWitness) => {
            let ClassSpec::Listed(hyps) = &s.class else {
                return Err(Error::scenario(
                    "stream.script",
                    "adversary streams need a listed class",
                ));
            };
            let gc = group_closure_dimension(
                hyps,
                &s.groups,
                &s.generator.alpha,
                &s.generator.gc_search,
            )?;
            let witness = gc.witness.ok_or_else(|| {
                Error::scenario(
                    "stream.script",
                    "the class has no dimension witness at this α",
                )
            })?;
            let mut fresh = build_generator(&s.generator, &s.class.class(), &s.groups)?;
            let outcome = gc_witness_adversary(
                &mut *fresh,
                hyps,
                &s.groups,
                &s.generator.alpha,
                &witness.tuple,
            )?;
            let target = hyps[outcome.target].clone();
            if let Some(id) = &s.target {
                if id != target.id() {
                    return Err(Error::scenario(
                        "target",
                        format!("the adversary continues in `{}`, not `{id}`", target.id()),
                    ));
                }
            }
            let mut xs = witness.tuple.clone();
            let rest = target
                .support()
                .iter()
                .filter(|x| !witness.tuple.contains(x));
            xs.extend(rest.take(s.horizon.saturating_sub(xs.len())));
            xs.truncate(s.horizon);
            Ok((xs, target))
        }
    }
}

/// Runs the scenario with the generator it declares.
pub fn run_game(s: &Scenario) -> Result<GameTrace> {
    let class = s.class.class();
    let mut config = s.generator.clone();
    if config.kind == GeneratorKind::Uniform {
        config.d_star = Some(resolve_d_star(&config, &class, &s.groups)?);
    }
    let mut generator = build_generator(&config, &class, &s.groups)?;
    run_game_with(s, &mut *generator, config.d_star)
}

/// Runs the scenario's stream against an arbitrary generator. `d_star` is
/// recorded in the header and used for the uniform consistency bound.
pub fn run_game_with(
    s: &Scenario,
    generator: &mut dyn Generator,
    d_star: Option<usize>,
) -> Result<GameTrace> {
    let (xs, target) = materialize_stream(s)?;
    let class = s.class.class();
    let alpha = &s.generator.alpha;
    let mut history = History::new();
    let mut steps = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let t = i + 1;
        history.push(x);
        let emission = generator
            .emit(&history)
            .map_err(|e| Error::GeneratorFailed {
                step: t,
                source: Box::new(e),
            })?;
        let check = check_step(
            &emission.dist,
            history.seq(),
            target.support(),
            &s.groups,
            alpha,
        )?;
        steps.push(StepRecord {
            t,
            x,
            distinct: history.distinct_count(),
            dist: emission.dist,
            sup_distance: check.sup_distance,
            representative: check.representative,
            consistent: check.consistent,
            closure_bot: considered(&class, t).map(|h| closure(&h, history.seq()).is_bot())?,
            selected: emission.selected,
        });
    }
    let summary = summarize(&steps, s.generator.kind, d_star, &s.expect);
    Ok(GameTrace {
        header: TraceHeader {
            scenario: s.name.clone(),
            generator: s.generator.kind,
            alpha: alpha.clone(),
            d_star,
            target: target.id().to_string(),
            horizon: xs.len(),
        },
        steps,
        summary,
    })
}

/// All members of a finite class; the first `t` of a countable one.
fn considered(class: &HypothesisClass, t: usize) -> Result<Vec<Hypothesis>> {
    if class.is_finite() {
        class.members()
    } else {
        Ok(class.prefix(t))
    }
}
