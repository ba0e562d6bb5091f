//! Discrete-event execution of parsed scripts.

mod engine;
mod event_queue;
mod exec;
mod model;
mod outcome;

pub use engine::{run, ObjectStats, RunResult, RunStats, TraceEvent, TraceKind};
pub use event_queue::{EventQueue, Scheduled};
pub use exec::{exec_outcome, execute};
pub use model::{
    build_model, BuildError, Node, NodeId, NodeSpec, SimConfig, SimModel, CAPACITY,
    COMPONENT_QUANTITY, CONVEY_SPEED, DEFAULT_HORIZON, INTER_ARRIVAL_TIME, PROCESS_TIME,
    SETUP_TIME, SPLIT_QUANTITY, TRAVEL_SPEED,
};
pub use outcome::{ExecOutcome, FailureReason};
