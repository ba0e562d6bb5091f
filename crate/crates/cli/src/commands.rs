use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gdt_core::dataset::{
    enumerate_combinations, generate_corpus, Automation, Constraints, CorpusOptions, GenConfig,
    LayoutCategory, LayoutType,
};
use gdt_core::flexscript::parse;
use gdt_core::metrics::{score_pair, CorpusReport, ScoreOptions};
use gdt_core::sim::{exec_outcome, execute, SimConfig, DEFAULT_HORIZON};
use rayon::prelude::*;
use serde_json::json;

use crate::args::{Format, GenerateArgs, Global, Metric, ScoreArgs};
use crate::error::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes the command's primary output to `--out`, or stdout.
fn emit(global: &Global, text: &str) -> Result<(), CliError> {
    match &global.out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn json_only(global: &Global, command: &str) -> Result<(), CliError> {
    if global.format == Format::Csv {
        return Err(CliError::Usage(format!("`{command}` only writes JSON")));
    }
    Ok(())
}

fn load_config(global: &Global) -> Result<GenConfig, CliError> {
    match &global.config {
        Some(path) => Ok(GenConfig::load(path)?),
        None => Ok(GenConfig::default()),
    }
}

pub fn parse_cmd(global: &Global, file: &Path) -> Result<bool, CliError> {
    json_only(global, "parse")?;
    let script = parse(&read(file)?);
    let empty = script.is_empty();
    let report = json!({
        "file": file.display().to_string(),
        "decls": script.decls.len(),
        "params": script.params.len(),
        "connections": script.connections.len(),
        "recognized_statements": script.recognized_statements,
        "unknown_statements": script.unknown_statements,
        "parse_errors": script.parse_errors,
        "diagnostics": script.diagnostics,
        "status": if empty { "ParseEmpty" } else if script.parse_errors.is_empty() { "ok" } else { "ParseError" },
    });
    emit(global, &(serde_json::to_string_pretty(&report).unwrap() + "\n"))?;
    Ok(!empty && script.parse_errors.is_empty())
}

fn regular_files(dir: &Path) -> Result<BTreeMap<String, PathBuf>, CliError> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            out.insert(entry.file_name().to_string_lossy().into_owned(), path);
        }
    }
    Ok(out)
}

/// (id, reference, hypothesis) triples.
fn pairs(args: &ScoreArgs) -> Result<Vec<(String, PathBuf, PathBuf)>, CliError> {
    if let Some(list) = &args.pairs {
        let base = list.parent().unwrap_or(Path::new("."));
        let mut out = Vec::new();
        for (i, line) in read(list)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split([',', '\t']).map(str::trim).collect();
            let [r, h] = cols[..] else {
                return Err(CliError::Invalid(format!(
                    "{}:{}: expected two columns",
                    list.display(),
                    i + 1
                )));
            };
            let id = Path::new(h)
                .file_name()
                .map_or_else(|| h.to_string(), |n| n.to_string_lossy().into_owned());
            out.push((id, base.join(r), base.join(h)));
        }
        return Ok(out);
    }
    let (refs, hyps) = (args.refs.as_ref().unwrap(), args.hyps.as_ref().unwrap());
    let refs = regular_files(refs)?;
    let hyps = regular_files(hyps)?;
    let unmatched: Vec<&String> = refs
        .keys()
        .filter(|k| !hyps.contains_key(*k))
        .chain(hyps.keys().filter(|k| !refs.contains_key(*k)))
        .collect();
    if !unmatched.is_empty() {
        let ids: Vec<&str> = unmatched.iter().map(|s| s.as_str()).collect();
        return Err(CliError::Invalid(format!("unpaired samples: {}", ids.join(", "))));
    }
    Ok(refs
        .into_iter()
        .map(|(id, r)| {
            let h = hyps[&id].clone();
            (id, r, h)
        })
        .collect())
}

pub fn score_cmd(global: &Global, args: &ScoreArgs) -> Result<(), CliError> {
    let pairs = pairs(args)?;
    if pairs.is_empty() {
        return Err(CliError::Invalid("nothing to score".into()));
    }
    let options = ScoreOptions {
        weights: global.weights.unwrap_or_default(),
        bleu: global.metrics.contains(&Metric::Bleu),
    };
    let run_exec = global.metrics.contains(&Metric::Esr);
    let horizon = global.horizon.unwrap_or(DEFAULT_HORIZON);
    let texts: Vec<(String, String, String)> = pairs
        .iter()
        .map(|(id, r, h)| Ok((id.clone(), read(r)?, read(h)?)))
        .collect::<Result<_, CliError>>()?;
    let records = texts
        .par_iter()
        .map(|(id, truth_text, gen_text)| {
            let exec = run_exec.then(|| exec_outcome(gen_text, horizon, global.seed));
            score_pair(
                id,
                &parse(gen_text),
                gen_text,
                &parse(truth_text),
                truth_text,
                exec,
                &options,
            )
            .map_err(|e| CliError::Invalid(format!("{id}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = CorpusReport::from_records(records)?;
    let text = match global.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(global, &text)
}

pub fn simulate_cmd(global: &Global, file: &Path, trace: bool) -> Result<bool, CliError> {
    json_only(global, "simulate")?;
    let text = read(file)?;
    let config = SimConfig {
        trace,
        ..SimConfig::with_horizon(global.horizon.unwrap_or(DEFAULT_HORIZON))
    };
    let mut result = execute(&text, config, global.seed);
    if trace {
        let mut err = std::io::stderr().lock();
        for e in std::mem::take(&mut result.trace) {
            let item = e.item.map_or_else(|| "-".to_string(), |i| i.to_string());
            let kind = serde_json::to_value(e.kind).unwrap();
            let _ = writeln!(err, "{}\t{}\t{}\t{item}", e.time, e.object, kind.as_str().unwrap());
        }
    }
    emit(global, &(serde_json::to_string_pretty(&result).unwrap() + "\n"))?;
    Ok(result.outcome.is_success())
}

pub fn generate_cmd(global: &Global, args: &GenerateArgs) -> Result<(), CliError> {
    json_only(global, "generate")?;
    let mut config = load_config(global)?;
    if let Some(h) = global.horizon {
        config.scoring.horizon = h;
    }
    let constraints = Constraints {
        layout_type: args.layout_type.as_deref().map(str::parse::<LayoutType>).transpose()?,
        automation: args.automation.as_deref().map(str::parse::<Automation>).transpose()?,
        industry: args.industry.clone(),
        layout_category: args
            .layout_category
            .as_deref()
            .map(str::parse::<LayoutCategory>)
            .transpose()?,
        n_machines: args.machines,
        ..Constraints::default()
    };
    let count = match (args.count, args.exhaustive) {
        (Some(n), _) => n,
        (None, true) => {
            let n = args.machines.unwrap_or(3) as u32;
            usize::try_from(enumerate_combinations(n))
                .map_err(|_| CliError::Usage("design space too large".into()))?
        }
        (None, false) => return Err(CliError::Usage("--count is required".into())),
    };
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    let out = global.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let options = CorpusOptions {
        count,
        master_seed: global.seed,
        constraints,
        exhaustive: args.exhaustive,
        verify: !args.no_verify,
    };
    let summary = generate_corpus(&options, &config, &out)?;
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(())
}
