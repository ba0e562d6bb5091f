//! Scoring of generated scripts against references.
//!
//! * connection score `CS = M / N` over deduplicated `(from, to, port)` triples,
//! * object score `OS = K' / K` over reference declarations (exact, case-sensitive
//!   name and matching type),
//! * `SVR = 0.6·CS + 0.4·OS` (weights configurable),
//! * `PMR = Pmatch / Ptotal` keyed by `(object, parameter)`,
//! * `ESR = Ssuccess / Stotal`,
//! * BLEU-4 as a surface-overlap supplement.
//!
//! The ratio functions are generic over [`Scalar`](crate::scalar::Scalar), so
//! they can be evaluated exactly with `Rational64`.

mod bleu;
mod params;
mod report;
mod structural;

use thiserror::Error;

pub use bleu::{bleu4, corpus_bleu4, tokenize, BleuStats};
pub use params::{pmr, ParamMismatch, ParamScore, PARAM_REL_TOL};
pub use report::{
    esr, score_pair, Aggregates, CorpusReport, SampleDiagnostics, SampleRecord, ScoreOptions,
    REPORT_SCHEMA_VERSION,
};
pub use structural::{
    connection_score, object_score, structural_score, svr, svr_weighted, StructuralScore,
    SvrWeights,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("reference has no {0}")]
    EmptyReference(&'static str),
    #[error("empty batch")]
    EmptyBatch,
    #[error("empty input after tokenization")]
    EmptyInput,
    #[error("reference script is malformed: {0}")]
    MalformedReference(String),
    #[error("invalid SVR weights ({cs}, {os}): must be nonnegative and sum to 1")]
    InvalidWeights { cs: f64, os: f64 },
}
