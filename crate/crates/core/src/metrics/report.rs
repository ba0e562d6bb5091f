use std::collections::BTreeSet;

use serde::Serialize;

use super::bleu::{tokenize, BleuStats};
use super::params::{param_mismatches, pmr, ParamMismatch, ParamScore};
use super::structural::{connection_set, declared_types, structural_score, StructuralScore, SvrWeights};
use super::MetricError;
use crate::flexscript::{Connection, ObjType, Script};
use crate::scalar::Scalar;
use crate::sim::ExecOutcome;

/// Bumped whenever the JSON or CSV layout changes.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// `Ssuccess / Stotal`.
pub fn esr<S: Scalar>(outcomes: &[ExecOutcome]) -> Result<S, MetricError> {
    if outcomes.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let success = outcomes.iter().filter(|o| o.is_success()).count();
    Ok(S::from_ratio(success as u64, outcomes.len() as u64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreOptions {
    pub weights: SvrWeights<f64>,
    pub bleu: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            weights: SvrWeights::default(),
            bleu: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeMismatch {
    pub obj_name: String,
    pub expected: ObjType,
    pub found: ObjType,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SampleDiagnostics {
    pub missing_connections: Vec<Connection>,
    pub spurious_connections: Vec<Connection>,
    pub missing_objects: Vec<String>,
    pub type_mismatches: Vec<TypeMismatch>,
    /// Names used in generated connections but never declared there.
    pub undeclared_connected: Vec<String>,
    pub param_mismatches: Vec<ParamMismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord {
    pub sample_id: String,
    #[serde(flatten)]
    pub structural: StructuralScore<f64>,
    #[serde(flatten)]
    pub params: ParamScore<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exec: Option<ExecOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bleu4: Option<f64>,
    pub diagnostics: SampleDiagnostics,
    #[serde(skip)]
    pub bleu_stats: Option<BleuStats>,
}

fn diagnostics(generated: &Script, truth: &Script) -> SampleDiagnostics {
    let gen_conn = connection_set(generated);
    let truth_conn = connection_set(truth);
    let gen_types = declared_types(generated);
    let mut d = SampleDiagnostics {
        missing_connections: truth_conn.difference(&gen_conn).map(|c| (*c).clone()).collect(),
        spurious_connections: gen_conn.difference(&truth_conn).map(|c| (*c).clone()).collect(),
        param_mismatches: param_mismatches(generated, truth),
        ..Default::default()
    };
    for decl in &truth.decls {
        match gen_types.get(decl.obj_name.as_str()) {
            None => d.missing_objects.push(decl.obj_name.clone()),
            Some(&found) if found != decl.obj_type => d.type_mismatches.push(TypeMismatch {
                obj_name: decl.obj_name.clone(),
                expected: decl.obj_type,
                found,
            }),
            Some(_) => {}
        }
    }
    let undeclared: BTreeSet<&str> = generated
        .connections
        .iter()
        .flat_map(|c| [c.from_name.as_str(), c.to_name.as_str()])
        .filter(|n| !gen_types.contains_key(n))
        .collect();
    d.undeclared_connected = undeclared.into_iter().map(String::from).collect();
    d
}

/// Scores one generated script against its reference.
pub fn score_pair(
    sample_id: &str,
    generated: &Script,
    generated_text: &str,
    truth: &Script,
    truth_text: &str,
    exec: Option<ExecOutcome>,
    options: &ScoreOptions,
) -> Result<SampleRecord, MetricError> {
    if let Some(err) = truth.parse_errors.first() {
        return Err(MetricError::MalformedReference(err.to_string()));
    }
    let structural = structural_score(generated, truth, options.weights)?;
    let params = pmr(generated, truth)?;
    let bleu_stats = if options.bleu {
        let reference = tokenize(truth_text);
        if reference.is_empty() {
            return Err(MetricError::EmptyInput);
        }
        Some(BleuStats::from_tokens(&tokenize(generated_text), &[reference]))
    } else {
        None
    };
    Ok(SampleRecord {
        sample_id: sample_id.to_string(),
        structural,
        params,
        exec,
        bleu4: bleu_stats.map(|s| s.score()),
        diagnostics: diagnostics(generated, truth),
        bleu_stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregates {
    pub n_samples: usize,
    pub mean_cs: f64,
    pub mean_os: f64,
    pub mean_svr: f64,
    pub mean_pmr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_success: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub esr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_bleu4: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub schema_version: u32,
    pub per_sample: Vec<SampleRecord>,
    pub aggregates: Aggregates,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    sample_id: &'a str,
    cs: f64,
    os: f64,
    svr: f64,
    n: usize,
    m: usize,
    k: usize,
    k_valid: usize,
    p_total: usize,
    p_match: usize,
    pmr: f64,
    exec: String,
    bleu4: Option<f64>,
}

impl CorpusReport {
    /// Aggregates per-sample records. Records are ordered by id first, so the
    /// result does not depend on the order they were produced in.
    pub fn from_records(mut records: Vec<SampleRecord>) -> Result<Self, MetricError> {
        if records.is_empty() {
            return Err(MetricError::EmptyBatch);
        }
        records.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));
        let n = records.len() as f64;
        let mean = |f: fn(&SampleRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
        let outcomes: Option<Vec<ExecOutcome>> = records.iter().map(|r| r.exec).collect();
        let esr_value = match &outcomes {
            Some(o) => Some(esr::<f64>(o)?),
            None => None,
        };
        let corpus_bleu4 = records
            .iter()
            .map(|r| r.bleu_stats)
            .collect::<Option<Vec<_>>>()
            .map(|stats| {
                let mut total = BleuStats::default();
                stats.iter().for_each(|s| total.accumulate(s));
                total.score()
            });
        let aggregates = Aggregates {
            n_samples: records.len(),
            mean_cs: mean(|r| r.structural.cs),
            mean_os: mean(|r| r.structural.os),
            mean_svr: mean(|r| r.structural.svr),
            mean_pmr: mean(|r| r.params.pmr),
            s_success: outcomes.map(|o| o.iter().filter(|x| x.is_success()).count()),
            esr: esr_value,
            corpus_bleu4,
        };
        Ok(CorpusReport {
            schema_version: REPORT_SCHEMA_VERSION,
            per_sample: records,
            aggregates,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One row per sample.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.per_sample {
            let s = &r.structural;
            w.serialize(CsvRow {
                sample_id: &r.sample_id,
                cs: s.cs,
                os: s.os,
                svr: s.svr,
                n: s.n_truth_connections,
                m: s.m_matched_connections,
                k: s.k_required_objects,
                k_valid: s.k_valid_objects,
                p_total: r.params.p_total,
                p_match: r.params.p_match,
                pmr: r.params.pmr,
                exec: r.exec.map(|e| e.to_string()).unwrap_or_default(),
                bleu4: r.bleu4,
            })
            .expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
    }
}
