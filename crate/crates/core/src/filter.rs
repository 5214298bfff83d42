//! Language-model filtering of augmented candidates.
//!
//! The augmenter over-generates `m = multiplier * k` distinct candidates and
//! the model keeps the `k` most likely.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngram::NgramModel;
use crate::ops::{apply_op, collect_distinct, has_edit_budget, AugConfig, Op};
use crate::synonyms::SynonymDict;
use crate::text::Text;

/// Minimum ratio of generated candidates to kept outputs.
pub const MIN_MULTIPLIER: usize = 20;

/// Scores closer than this (in natural-log units) rank as ties and fall back
/// to token order.
pub const TIE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub k: usize,
    pub multiplier: usize,
    /// Consecutive non-new draws tolerated before candidate generation stops.
    pub retry_cap: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            k: 1,
            multiplier: MIN_MULTIPLIER,
            retry_cap: 200,
        }
    }
}

impl FilterConfig {
    pub fn with_k(self, k: usize) -> Self {
        FilterConfig { k, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if self.multiplier < MIN_MULTIPLIER {
            return Err(Error::Config(format!(
                "multiplier {} is below the minimum of {MIN_MULTIPLIER}",
                self.multiplier
            )));
        }
        Ok(())
    }

    /// Number of candidates to generate.
    pub fn m(&self) -> usize {
        self.k * self.multiplier
    }
}

/// Up to `m` pairwise-distinct outputs of `op` on `text`, in discovery order.
pub fn generate_candidates<R: Rng + ?Sized>(
    text: &Text,
    op: Op,
    config: &AugConfig,
    dict: &SynonymDict,
    m: usize,
    retry_cap: usize,
    rng: &mut R,
) -> Vec<Text> {
    if m == 0 || (!config.allow_identity && !has_edit_budget(text, op, config)) {
        return Vec::new();
    }
    let n = config.n_edits(op, text.len());
    collect_distinct(text, m, retry_cap, config.allow_identity, rng, |rng| {
        apply_op(text, op, n, config, dict, rng)
    })
}

/// Candidates paired with their model score, best first.
///
/// Sorting is by descending score; runs of scores within [`TIE_EPSILON`] of
/// their neighbour are ordered by tokens. Empty texts score negative infinity.
pub fn rank_candidates(model: &NgramModel, candidates: Vec<Text>) -> Vec<(Text, f64)> {
    let mut scored: Vec<(Text, f64)> = candidates
        .into_iter()
        .map(|t| {
            let s = if t.is_empty() {
                f64::NEG_INFINITY
            } else {
                model.score(t.tokens()).expect("non-empty text")
            };
            (t, s)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut start = 0;
    while start < scored.len() {
        let mut end = start + 1;
        while end < scored.len() && scored[end - 1].1 - scored[end].1 <= TIE_EPSILON {
            end += 1;
        }
        if end - start > 1 {
            scored[start..end].sort_by(|a, b| a.0.cmp(&b.0));
        }
        start = end;
    }
    scored
}

/// The `k` highest-scoring candidates, best first.
pub fn select_top_k(model: &NgramModel, candidates: Vec<Text>, k: usize) -> Vec<Text> {
    rank_candidates(model, candidates)
        .into_iter()
        .take(k)
        .map(|(t, _)| t)
        .collect()
}

/// Augments `text` with `op` and keeps the `filter.k` most likely outputs.
pub fn reda_ng_augment<R: Rng + ?Sized>(
    text: &Text,
    op: Op,
    config: &AugConfig,
    filter: &FilterConfig,
    model: &NgramModel,
    dict: &SynonymDict,
    rng: &mut R,
) -> Result<Vec<Text>> {
    if !config.is_enabled(op) {
        return Err(Error::OpDisabled(op));
    }
    let candidates = generate_candidates(text, op, config, dict, filter.m(), filter.retry_cap, rng);
    Ok(select_top_k(model, candidates, filter.k))
}
