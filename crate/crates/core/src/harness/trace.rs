//! Line-delimited JSON traces.
//!
//! A trace is a header line, one line per step and a summary line. Rationals
//! are written as `"num/den"`, distributions as `[[x, "num/den"], …]` in
//! increasing `x`. The encoding is deterministic, so identical runs produce
//! identical bytes.

use std::io::Write;

use serde::Serialize;

use super::game::{run_game, GameTrace};
use super::scenario::{Scenario, StreamSpec};
use crate::error::{Error, Result};
use crate::scalar::format_rational;

#[derive(Serialize)]
struct HeaderLine<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    scenario: &'a str,
    generator: &'static str,
    alpha: String,
    d_star: Option<usize>,
    target: &'a str,
    horizon: usize,
}

#[derive(Serialize)]
struct StepLine {
    #[serde(rename = "type")]
    kind: &'static str,
    t: usize,
    x: u64,
    distinct: usize,
    dist: Vec<(u64, String)>,
    sup_distance: String,
    representative: bool,
    consistent: bool,
    closure: &'static str,
    selected: Option<usize>,
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    all_representative: bool,
    first_consistent_from: Option<usize>,
    violations: &'a [String],
}

fn line(sink: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string(value).expect("trace lines serialize");
    writeln!(sink, "{text}").map_err(|e| Error::Unsupported(format!("writing trace: {e}")))
}

pub fn emit_trace(trace: &GameTrace, sink: &mut dyn Write) -> Result<()> {
    let h = &trace.header;
    line(
        sink,
        &HeaderLine {
            kind: "header",
            scenario: &h.scenario,
            generator: h.generator.name(),
            alpha: format_rational(&h.alpha),
            d_star: h.d_star,
            target: &h.target,
            horizon: h.horizon,
        },
    )?;
    for s in &trace.steps {
        line(
            sink,
            &StepLine {
                kind: "step",
                t: s.t,
                x: s.x,
                distinct: s.distinct,
                dist: s
                    .dist
                    .iter()
                    .map(|(x, q)| (x, format_rational(q)))
                    .collect(),
                sup_distance: format_rational(&s.sup_distance),
                representative: s.representative,
                consistent: s.consistent,
                closure: if s.closure_bot { "bot" } else { "ok" },
                selected: s.selected,
            },
        )?;
    }
    line(
        sink,
        &SummaryLine {
            kind: "summary",
            all_representative: trace.summary.all_representative,
            first_consistent_from: trace.summary.first_consistent_from,
            violations: &trace.summary.violations,
        },
    )
}

pub fn trace_to_string(trace: &GameTrace) -> String {
    let mut buf = Vec::new();
    emit_trace(trace, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("traces are UTF-8")
}

/// The stream recorded in a serialized trace.
pub fn trace_inputs(text: &str) -> Result<Vec<u64>> {
    let bad = |n: usize, why: &str| Error::Unsupported(format!("trace line {n}: {why}"));
    let mut xs = Vec::new();
    for (n, l) in text.lines().enumerate() {
        let v: serde_json::Value =
            serde_json::from_str(l).map_err(|e| bad(n + 1, &e.to_string()))?;
        if v["type"] == "step" {
            xs.push(v["x"].as_u64().ok_or_else(|| bad(n + 1, "missing `x`"))?);
        }
    }
    Ok(xs)
}

/// Re-runs a scenario on the stream recorded in `text` and serializes the
/// result.
pub fn replay(s: &Scenario, text: &str) -> Result<String> {
    let xs = trace_inputs(text)?;
    let header: serde_json::Value = text
        .lines()
        .next()
        .and_then(|l| serde_json::from_str(l).ok())
        .ok_or_else(|| Error::Unsupported("trace has no header".into()))?;
    let mut replayed = s.clone();
    replayed.horizon = xs.len();
    replayed.stream = StreamSpec::Explicit(xs);
    replayed.target = header["target"].as_str().map(str::to_string);
    Ok(trace_to_string(&run_game(&replayed)?))
}
