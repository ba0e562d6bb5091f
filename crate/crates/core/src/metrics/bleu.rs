//! Corpus and sentence BLEU-4: clipped n-gram precision for n = 1..4 with
//! uniform weights and a brevity penalty, no smoothing.

use std::collections::HashMap;

use super::MetricError;

const MAX_ORDER: usize = 4;

/// Splits on whitespace; every character that is not alphanumeric, `_` or
/// `.` becomes its own token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() || ch == '_' || ch == '.' {
            word.push(ch);
            continue;
        }
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if !ch.is_whitespace() {
            tokens.push(ch.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Sufficient statistics; corpus BLEU sums these over sentences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn from_tokens(hyp: &[String], refs: &[Vec<String>]) -> Self {
        let mut stats = BleuStats {
            hyp_len: hyp.len() as u64,
            ..Default::default()
        };
        // Closest reference length, shorter on ties.
        stats.ref_len = refs
            .iter()
            .map(|r| r.len())
            .min_by_key(|&len| (len.abs_diff(hyp.len()), len))
            .unwrap_or(0) as u64;
        for n in 1..=MAX_ORDER {
            let hyp_counts = ngram_counts(hyp, n);
            let mut max_ref: HashMap<&[String], usize> = HashMap::new();
            for r in refs {
                for (gram, c) in ngram_counts(r, n) {
                    let e = max_ref.entry(gram).or_insert(0);
                    *e = (*e).max(c);
                }
            }
            let clipped: usize = hyp_counts
                .iter()
                .map(|(gram, &c)| c.min(max_ref.get(gram).copied().unwrap_or(0)))
                .sum();
            stats.matches[n - 1] = clipped as u64;
            stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
        }
        stats
    }

    pub fn accumulate(&mut self, other: &BleuStats) {
        for i in 0..MAX_ORDER {
            self.matches[i] += other.matches[i];
            self.totals[i] += other.totals[i];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 || self.matches.contains(&0) {
            return 0.0;
        }
        let log_precision: f64 = (0..MAX_ORDER)
            .map(|i| (self.matches[i] as f64 / self.totals[i] as f64).ln())
            .sum::<f64>()
            / MAX_ORDER as f64;
        let bp = if self.hyp_len > self.ref_len {
            1.0
        } else {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        };
        bp * log_precision.exp()
    }
}

fn stats_for(generated: &str, references: &[&str]) -> Result<BleuStats, MetricError> {
    let hyp = tokenize(generated);
    let refs: Vec<Vec<String>> = references.iter().map(|r| tokenize(r)).collect();
    if hyp.is_empty() || refs.is_empty() || refs.iter().all(|r| r.is_empty()) {
        return Err(MetricError::EmptyInput);
    }
    Ok(BleuStats::from_tokens(&hyp, &refs))
}

/// Sentence-level BLEU-4.
pub fn bleu4(generated: &str, references: &[&str]) -> Result<f64, MetricError> {
    Ok(stats_for(generated, references)?.score())
}

/// Corpus-level BLEU-4 over `(hypothesis, references)` pairs.
pub fn corpus_bleu4(pairs: &[(&str, Vec<&str>)]) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyBatch);
    }
    let mut total = BleuStats::default();
    for (hyp, refs) in pairs {
        total.accumulate(&stats_for(hyp, refs)?);
    }
    Ok(total.score())
}
