//! Labeled question-pair datasets and their augmentation.
//!
//! Each augmented question is paired back with the untouched partner from its
//! source pair and inherits the source label.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{reda_ng_augment, FilterConfig};
use crate::ngram::NgramModel;
use crate::ops::{reda_augment, AugConfig, Op};
use crate::seed::Seed;
use crate::synonyms::SynonymDict;
use crate::text::{tokenize, Text};

/// Originals below this count get two outputs per text and operation.
pub const DEFAULT_N_AUG_THRESHOLD: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Mismatch,
    Match,
}

impl Label {
    pub fn as_u8(self) -> u8 {
        match self {
            Label::Mismatch => 0,
            Label::Match => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "0" => Ok(Label::Mismatch),
            "1" => Ok(Label::Match),
            other => Err(format!("label must be 0 or 1, got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledPair {
    pub q1: Text,
    pub q2: Text,
    pub label: Label,
}

impl LabeledPair {
    pub fn new(q1: Text, q2: Text, label: Label) -> Self {
        LabeledPair { q1, q2, label }
    }
}

pub fn parse_pairs(raw: &str, origin: impl AsRef<Path>) -> Result<Vec<LabeledPair>> {
    let mut pairs = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                origin.as_ref(),
                i + 1,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let label = fields[2]
            .parse()
            .map_err(|m: String| Error::parse(origin.as_ref(), i + 1, m))?;
        pairs.push(LabeledPair::new(tokenize(fields[0]), tokenize(fields[1]), label));
    }
    Ok(pairs)
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<LabeledPair>> {
    let path = path.as_ref();
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pairs(&raw, path)
}

pub fn pairs_to_tsv(pairs: &[LabeledPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&format!("{}\t{}\t{}\n", p.q1, p.q2, p.label));
    }
    out
}

pub fn write_pairs(pairs: &[LabeledPair], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, pairs_to_tsv(pairs)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "REDA")]
    Reda,
    #[serde(rename = "REDA_NG")]
    RedaNg,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "reda" => Ok(Mode::Reda),
            "reda-ng" => Ok(Mode::RedaNg),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

/// How a dataset is augmented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugPlan {
    pub mode: Mode,
    /// Per-operation settings; `ops_enabled` selects the operations run and
    /// `n_aug` is overridden by the dataset-size rule.
    pub aug: AugConfig,
    pub filter: FilterConfig,
    /// Explicit k for REDA_NG; by default k equals the per-text output count.
    pub k: Option<usize>,
    pub n_aug_threshold: usize,
}

impl Default for AugPlan {
    fn default() -> Self {
        AugPlan {
            mode: Mode::Reda,
            aug: AugConfig::default(),
            filter: FilterConfig::default(),
            k: None,
            n_aug_threshold: DEFAULT_N_AUG_THRESHOLD,
        }
    }
}

impl AugPlan {
    pub fn ops(&self) -> &[Op] {
        &self.aug.ops_enabled
    }

    /// Outputs per text and operation for a dataset of `originals` pairs.
    pub fn n_aug_for(&self, originals: usize) -> usize {
        if originals < self.n_aug_threshold {
            2
        } else {
            1
        }
    }

    fn resolved(&self, n_aug: usize) -> (AugConfig, FilterConfig) {
        let aug = AugConfig {
            n_aug,
            ..self.aug.clone()
        };
        let filter = self.filter.with_k(self.k.unwrap_or(n_aug));
        (aug, filter)
    }

    pub fn validate(&self) -> Result<()> {
        self.aug.validate()?;
        if self.mode == Mode::RedaNg {
            self.filter.with_k(self.k.unwrap_or(1)).validate()?;
        }
        Ok(())
    }
}

/// An augmented pair tagged with the operation that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentedPair {
    pub op: Op,
    pub pair: LabeledPair,
}

const SIDE_Q1: u64 = 1;
const SIDE_Q2: u64 = 2;

/// Cross-paired augmentations of a single pair.
///
/// Every (operation, side) draws from its own stream derived from `seed`, so
/// the outputs for one operation do not depend on which others are enabled.
/// Results are deduplicated against each other and the source pair.
pub fn augment_pair(
    pair: &LabeledPair,
    plan: &AugPlan,
    n_aug: usize,
    dict: &SynonymDict,
    model: Option<&NgramModel>,
    seed: Seed,
) -> Result<Vec<AugmentedPair>> {
    let (aug, filter) = plan.resolved(n_aug);
    if plan.mode == Mode::RedaNg && model.is_none() {
        return Err(Error::MissingModel);
    }
    let augment = |text: &Text, op: Op, side: u64| -> Result<Vec<Text>> {
        let mut rng = seed.derive(&[op.code(), side]);
        match (plan.mode, model) {
            (Mode::RedaNg, Some(model)) => {
                reda_ng_augment(text, op, &aug, &filter, model, dict, &mut rng)
            }
            _ => reda_augment(text, op, &aug, dict, &mut rng),
        }
    };

    let mut seen: HashSet<(Text, Text)> = HashSet::new();
    seen.insert((pair.q1.clone(), pair.q2.clone()));
    let mut out = Vec::new();
    for &op in plan.ops() {
        for q1 in augment(&pair.q1, op, SIDE_Q1)? {
            if seen.insert((q1.clone(), pair.q2.clone())) {
                out.push(AugmentedPair {
                    op,
                    pair: LabeledPair::new(q1, pair.q2.clone(), pair.label),
                });
            }
        }
        for q2 in augment(&pair.q2, op, SIDE_Q2)? {
            if seen.insert((pair.q1.clone(), q2.clone())) {
                out.push(AugmentedPair {
                    op,
                    pair: LabeledPair::new(pair.q1.clone(), q2, pair.label),
                });
            }
        }
    }
    Ok(out)
}

/// Counts describing one dataset augmentation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub mode: Mode,
    pub seed: u64,
    pub originals: usize,
    pub augmented: usize,
    pub total: usize,
    pub n_aug: usize,
    pub k: Option<usize>,
    pub per_op: BTreeMap<Op, usize>,
    /// Augmented pairs dropped because an earlier pair had the same texts.
    pub cross_source_duplicates: usize,
    pub plan: AugPlan,
}

/// Originals followed by their augmentations, in input order.
///
/// Pairs are processed in parallel with per-pair generators; the output does
/// not depend on thread scheduling. An augmented pair whose texts match an
/// original or an earlier augmented pair is dropped.
pub fn augment_dataset(
    pairs: &[LabeledPair],
    plan: &AugPlan,
    dict: &SynonymDict,
    model: Option<&NgramModel>,
    seed: Seed,
) -> Result<(Vec<LabeledPair>, AugmentReport)> {
    plan.validate()?;
    if plan.mode == Mode::RedaNg && model.is_none() {
        return Err(Error::MissingModel);
    }
    let n_aug = plan.n_aug_for(pairs.len());
    let per_pair: Vec<Vec<AugmentedPair>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| augment_pair(pair, plan, n_aug, dict, model, seed.child(&[i as u64])))
        .collect::<Result<_>>()?;

    let mut seen: HashSet<(&Text, &Text)> = pairs.iter().map(|p| (&p.q1, &p.q2)).collect();
    let mut per_op: BTreeMap<Op, usize> = plan.ops().iter().map(|&op| (op, 0)).collect();
    let mut augmented = Vec::new();
    let mut dropped = 0;
    for a in per_pair.iter().flatten() {
        if seen.insert((&a.pair.q1, &a.pair.q2)) {
            *per_op.entry(a.op).or_insert(0) += 1;
            augmented.push(a.pair.clone());
        } else {
            dropped += 1;
        }
    }

    let mut output = pairs.to_vec();
    let n_augmented = augmented.len();
    output.extend(augmented);
    let report = AugmentReport {
        mode: plan.mode,
        seed: seed.0,
        originals: pairs.len(),
        augmented: n_augmented,
        total: output.len(),
        n_aug,
        k: (plan.mode == Mode::RedaNg).then(|| plan.k.unwrap_or(n_aug)),
        per_op,
        cross_source_duplicates: dropped,
        plan: plan.clone(),
    };
    Ok((output, report))
}
