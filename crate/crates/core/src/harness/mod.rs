//! Scenario loading, the game runner and trace emission.

mod game;
mod scenario;
mod trace;
pub mod verify;

pub use game::{
    materialize_stream, run_game, run_game_with, GameTrace, StepRecord, Summary, TraceHeader,
};
pub use scenario::{
    load_scenario, print_scenario, AdversaryScript, ClassSpec, Expectations, Family, Scenario,
    StreamSpec,
};
pub use trace::{emit_trace, replay, trace_inputs, trace_to_string};
