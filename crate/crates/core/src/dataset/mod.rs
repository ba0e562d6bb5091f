//! Synthetic prompt/sketch/code corpus generation.
//!
//! A record is drawn in three steps: [`sample_spec`] picks one point of the
//! five-layer design space, [`layout::build_layout`] places and wires the
//! objects, and the code, SVG sketch and prompt are all rendered from that
//! same layout.

use std::path::{Path, PathBuf};

use thiserror::Error;

mod config;
mod corpus;
pub mod layout;
mod prompt;
mod sample;
mod sketch;
mod spec;

pub use config::{
    GenConfig, IndustryProfile, MachineRange, Marginals, Scoring, ShapeRanges, DEFAULT_CONFIG,
    MAX_MACHINES,
};
pub use corpus::{
    build_record, emit_code, generate_corpus, read_manifest, record_id, record_seed,
    verify_record, CorpusOptions, CorpusSummary, TripletRecord, MANIFEST_FILE, SKETCH_DIR,
};
pub use prompt::render_prompt;
pub use sample::{dist_with_mean, sample_spec, STABILITY_MARGIN};
pub use sketch::render_sketch;
pub use spec::{
    combination, enumerate_combinations, Automation, Constraints, GenSpec, LayoutCategory,
    LayoutType,
};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid {layer} constraint `{value}`")]
    InvalidConstraint { layer: &'static str, value: String },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("record {id}: {reason}")]
    InvariantViolation { id: String, reason: String },
}

impl DatasetError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
