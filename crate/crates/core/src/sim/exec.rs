use super::engine::{run, RunResult};
use super::model::{build_model, SimConfig};
use super::outcome::{ExecOutcome, FailureReason};
use crate::flexscript::parse;
use crate::scalar::Real;

/// Parses, builds and runs `text`. Any parse error fails the script, even if
/// other statements were recovered.
pub fn execute<T: Real>(text: &str, config: SimConfig<T>, seed: u64) -> RunResult<T> {
    let script = parse(text);
    if let Some(err) = script.parse_errors.first() {
        return RunResult::failed(FailureReason::ParseError, err.to_string());
    }
    if script.is_empty() {
        return RunResult::failed(FailureReason::ParseEmpty, "no recognized statements");
    }
    match build_model(&script, config) {
        Ok(model) => run(&model, seed),
        Err(e) => RunResult::failed(e.reason(), e.to_string()),
    }
}

/// Outcome of running `text` for `horizon` time units.
pub fn exec_outcome(text: &str, horizon: f64, seed: u64) -> ExecOutcome {
    execute(text, SimConfig::<f64>::with_horizon(horizon), seed).outcome
}
