//! Text-restoration experiments and text-quality metrics.
//!
//! A restoration task distorts a natural text (or, for synonym replacement,
//! leaves it as is and relies on a decoy dictionary), runs one augmenter
//! output through the matching operation, and counts an exact match with the
//! original as a success. REDA takes a single random output; REDA_NG keeps
//! the most likely of `m` distinct candidates.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, IndexedRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{select_top_k, FilterConfig};
use crate::ngram::NgramModel;
use crate::ops::{
    collect_distinct, random_deletion, random_swap, synonym_replacement, AugConfig, Op,
};
use crate::seed::{AugRng, Seed};
use crate::synonyms::SynonymDict;
use crate::text::Text;

pub const DEFAULT_SAMPLE_SIZE: usize = 10_000;
pub const DEFAULT_RUNS: usize = 5;
pub const EDIT_COUNTS: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "REDA")]
    Reda,
    #[serde(rename = "REDA_NG")]
    RedaNg,
}

impl Method {
    pub const BOTH: [Method; 2] = [Method::Reda, Method::RedaNg];

    fn code(self) -> u64 {
        match self {
            Method::Reda => 1,
            Method::RedaNg => 2,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Reda => "REDA",
            Method::RedaNg => "REDA_NG",
        })
    }
}

/// The three restoration tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Task {
    Sr,
    Rs,
    Rd,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Sr, Task::Rs, Task::Rd];

    pub fn op(self) -> Op {
        match self {
            Task::Sr => Op::Sr,
            Task::Rs => Op::Rs,
            Task::Rd => Op::Rd,
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<Op>()? {
            Op::Sr => Ok(Task::Sr),
            Op::Rs => Ok(Task::Rs),
            Op::Rd => Ok(Task::Rd),
            other => Err(Error::Config(format!("{other} has no restoration task"))),
        }
    }
}

/// Accuracy for one (task, edit count, method) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestorationReport {
    pub op: Task,
    pub n_edits: usize,
    pub method: Method,
    /// Mean of the per-run accuracies.
    pub accuracy: f64,
    pub per_run: Vec<f64>,
    pub runs: usize,
    pub samples_per_run: usize,
}

impl RestorationReport {
    fn from_runs(op: Task, n_edits: usize, method: Method, per_run: Vec<f64>, samples: usize) -> Self {
        let accuracy = mean(&per_run);
        RestorationReport {
            op,
            n_edits,
            method,
            accuracy,
            runs: per_run.len(),
            per_run,
            samples_per_run: samples,
        }
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Shared inputs for restoration runs.
#[derive(Clone, Copy)]
pub struct Restorer<'a> {
    pub dict: &'a SynonymDict,
    pub model: Option<&'a NgramModel>,
    pub filter: FilterConfig,
}

impl<'a> Restorer<'a> {
    pub fn new(dict: &'a SynonymDict, model: Option<&'a NgramModel>) -> Self {
        Restorer {
            dict,
            model,
            filter: FilterConfig::default(),
        }
    }

    fn model_for(&self, method: Method) -> Result<Option<&'a NgramModel>> {
        match (method, self.model) {
            (Method::RedaNg, None) => Err(Error::MissingModel),
            (Method::RedaNg, m) => Ok(m),
            (Method::Reda, _) => Ok(None),
        }
    }

    /// Picks an output of `draw` for `input`: a single draw for REDA, the most
    /// likely of up to `m` distinct draws for REDA_NG.
    fn pick<F>(&self, input: &Text, method: Method, rng: &mut AugRng, mut draw: F) -> Result<Text>
    where
        F: FnMut(&mut AugRng) -> Text,
    {
        match self.model_for(method)? {
            None => Ok(draw(rng)),
            Some(model) => {
                let candidates =
                    collect_distinct(input, self.filter.m(), self.filter.retry_cap, true, rng, draw);
                Ok(select_top_k(model, candidates, 1)
                    .pop()
                    .unwrap_or_else(|| input.clone()))
            }
        }
    }

    /// Synonym replacement with identity allowed; the text is its own target.
    pub fn restores_sr(&self, text: &Text, n_edits: usize, method: Method, rng: &mut AugRng) -> Result<bool> {
        let out = self.pick(text, method, rng, |rng| {
            synonym_replacement(text, n_edits, self.dict, true, rng)
        })?;
        Ok(out == *text)
    }

    /// `n_edits` random swaps distort the text; the same number of swaps
    /// should undo them.
    pub fn restores_rs(
        &self,
        text: &Text,
        n_edits: usize,
        method: Method,
        distort_rng: &mut AugRng,
        rng: &mut AugRng,
    ) -> Result<bool> {
        let distorted = random_swap(text, n_edits, distort_rng);
        let out = self.pick(&distorted, method, rng, |rng| random_swap(&distorted, n_edits, rng))?;
        Ok(out == *text)
    }

    /// `n_edits` copies of the text's own tokens are inserted at random
    /// positions; the same number of deletions should undo them.
    pub fn restores_rd(
        &self,
        text: &Text,
        n_edits: usize,
        method: Method,
        distort_rng: &mut AugRng,
        rng: &mut AugRng,
    ) -> Result<bool> {
        let distorted = insert_own_tokens(text, n_edits, distort_rng);
        let out = self.pick(&distorted, method, rng, |rng| {
            random_deletion(&distorted, n_edits, rng)
        })?;
        Ok(out == *text)
    }

    fn restores(
        &self,
        task: Task,
        text: &Text,
        n_edits: usize,
        method: Method,
        distort_rng: &mut AugRng,
        rng: &mut AugRng,
    ) -> Result<bool> {
        match task {
            Task::Sr => self.restores_sr(text, n_edits, method, rng),
            Task::Rs => self.restores_rs(text, n_edits, method, distort_rng, rng),
            Task::Rd => self.restores_rd(text, n_edits, method, distort_rng, rng),
        }
    }

    /// Restoration accuracy over `texts`, one run.
    ///
    /// Sample `i` distorts with `seed.derive([1, i])`, which does not depend on
    /// the method, so both methods see identical distorted inputs.
    pub fn run(
        &self,
        task: Task,
        texts: &[Text],
        n_edits: usize,
        method: Method,
        seed: Seed,
    ) -> Result<RestorationReport> {
        let successes: Vec<bool> = texts
            .par_iter()
            .enumerate()
            .map(|(i, text)| {
                let mut distort_rng = seed.derive(&[1, i as u64]);
                let mut rng = seed.derive(&[2, method.code(), i as u64]);
                self.restores(task, text, n_edits, method, &mut distort_rng, &mut rng)
            })
            .collect::<Result<_>>()?;
        let hits = successes.iter().filter(|&&s| s).count();
        let accuracy = if texts.is_empty() {
            0.0
        } else {
            hits as f64 / texts.len() as f64
        };
        Ok(RestorationReport::from_runs(task, n_edits, method, vec![accuracy], texts.len()))
    }
}

/// Inserts `n` tokens drawn from `text` itself at uniform positions.
pub fn insert_own_tokens<R: Rng + ?Sized>(text: &Text, n: usize, rng: &mut R) -> Text {
    let mut out = text.clone();
    if text.is_empty() {
        return out;
    }
    for _ in 0..n {
        let word = text.choose(rng).expect("non-empty").clone();
        let pos = rng.random_range(0..=out.len());
        out.tokens_mut().insert(pos, word);
    }
    out
}

pub fn restore_sr(
    texts: &[Text],
    pseudo_dict: &SynonymDict,
    n_edits: usize,
    method: Method,
    model: Option<&NgramModel>,
    seed: Seed,
) -> Result<RestorationReport> {
    Restorer::new(pseudo_dict, model).run(Task::Sr, texts, n_edits, method, seed)
}

pub fn restore_rs(
    texts: &[Text],
    n_edits: usize,
    method: Method,
    model: Option<&NgramModel>,
    seed: Seed,
) -> Result<RestorationReport> {
    let empty = SynonymDict::new();
    Restorer::new(&empty, model).run(Task::Rs, texts, n_edits, method, seed)
}

pub fn restore_rd(
    texts: &[Text],
    n_edits: usize,
    method: Method,
    model: Option<&NgramModel>,
    seed: Seed,
) -> Result<RestorationReport> {
    let empty = SynonymDict::new();
    Restorer::new(&empty, model).run(Task::Rd, texts, n_edits, method, seed)
}

/// Share of the original's distinct bigrams that also occur in `other`.
pub fn bigram_overlap(original: &[String], other: &[String]) -> Result<f64> {
    if original.len() < 2 {
        return Err(Error::TooShortForBigrams(original.len()));
    }
    let ours: HashSet<&[String]> = original.windows(2).collect();
    let theirs: HashSet<&[String]> = other.windows(2).collect();
    let shared = ours.intersection(&theirs).count();
    Ok(shared as f64 / ours.len() as f64)
}

/// Levenshtein distance over token sequences, unit costs.
pub fn token_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Mean quality of augmented outputs against their originals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityStats {
    pub bigram_overlap: f64,
    pub edit_distance: f64,
    /// Texts that produced an output.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub op: Op,
    pub n_swaps: usize,
    pub reda: QualityStats,
    pub reda_ng: QualityStats,
}

/// Augments each text with `n_swaps` random swaps (outputs never equal the
/// input) and measures overlap and edit distance of the first output.
pub fn swap_quality(
    texts: &[Text],
    n_swaps: usize,
    method: Method,
    model: Option<&NgramModel>,
    filter: &FilterConfig,
    seed: Seed,
) -> Result<QualityStats> {
    let model = match (method, model) {
        (Method::RedaNg, None) => return Err(Error::MissingModel),
        (Method::RedaNg, m) => m,
        (Method::Reda, _) => None,
    };
    let retry_cap = AugConfig::default().retry_cap;
    let measured: Vec<Option<(f64, usize)>> = texts
        .par_iter()
        .enumerate()
        .map(|(i, text)| {
            if text.len() < 2 {
                return None;
            }
            let mut rng = seed.derive(&[3, method.code(), i as u64]);
            let draw = |rng: &mut AugRng| random_swap(text, n_swaps, rng);
            let output = match model {
                None => collect_distinct(text, 1, retry_cap, false, &mut rng, draw).pop(),
                Some(model) => {
                    let candidates =
                        collect_distinct(text, filter.m(), filter.retry_cap, false, &mut rng, draw);
                    select_top_k(model, candidates, 1).pop()
                }
            };
            output.map(|out| {
                (
                    bigram_overlap(text, &out).expect("length checked"),
                    token_edit_distance(text, &out),
                )
            })
        })
        .collect();
    let found: Vec<(f64, usize)> = measured.into_iter().flatten().collect();
    let overlaps: Vec<f64> = found.iter().map(|m| m.0).collect();
    let distances: Vec<f64> = found.iter().map(|m| m.1 as f64).collect();
    Ok(QualityStats {
        bigram_overlap: mean(&overlaps),
        edit_distance: mean(&distances),
        n: found.len(),
    })
}

/// Full restoration suite: every task, edit count and method, plus swap
/// quality metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub sample_size: usize,
    pub runs: usize,
    pub filter: FilterConfig,
    pub cells: Vec<RestorationReport>,
    pub quality: QualityReport,
}

impl SuiteReport {
    pub fn cell(&self, op: Task, n_edits: usize, method: Method) -> Option<&RestorationReport> {
        self.cells
            .iter()
            .find(|c| c.op == op && c.n_edits == n_edits && c.method == method)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub tasks: Vec<Task>,
    pub sample_size: usize,
    pub runs: usize,
    pub quality_swaps: usize,
    pub filter: FilterConfig,
    pub seed: Seed,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            tasks: Task::ALL.to_vec(),
            sample_size: DEFAULT_SAMPLE_SIZE,
            runs: DEFAULT_RUNS,
            quality_swaps: 2,
            filter: FilterConfig::default(),
            seed: Seed(0),
        }
    }
}

/// Runs every (task, edits, method) cell on `config.runs` independent samples
/// of `config.sample_size` texts. Within a run all cells share the sample,
/// and a cell's generators do not depend on which other tasks are selected.
pub fn run_restoration_suite(
    corpus: &[Text],
    pseudo_dict: &SynonymDict,
    model: &NgramModel,
    config: &SuiteConfig,
) -> Result<SuiteReport> {
    if corpus.len() < config.sample_size {
        return Err(Error::Config(format!(
            "corpus has {} texts, sample size is {}",
            corpus.len(),
            config.sample_size
        )));
    }
    if config.runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    config.filter.validate()?;
    let restorer = Restorer {
        dict: pseudo_dict,
        model: Some(model),
        filter: config.filter,
    };

    let mut per_cell: Vec<Vec<f64>> = vec![Vec::new(); config.tasks.len() * EDIT_COUNTS.len() * 2];
    let mut quality_runs: Vec<(QualityStats, QualityStats)> = Vec::new();
    for run in 0..config.runs {
        let run_seed = config.seed.child(&[run as u64]);
        let mut sample_rng = run_seed.derive(&[0]);
        let sample: Vec<Text> = index::sample(&mut sample_rng, corpus.len(), config.sample_size)
            .into_iter()
            .map(|i| corpus[i].clone())
            .collect();

        let mut cell = 0;
        for &task in &config.tasks {
            for &n_edits in &EDIT_COUNTS {
                let cell_seed = run_seed.child(&[task.op().code(), n_edits as u64]);
                for method in Method::BOTH {
                    let r = restorer.run(task, &sample, n_edits, method, cell_seed)?;
                    per_cell[cell].push(r.accuracy);
                    cell += 1;
                }
            }
        }

        let q_seed = run_seed.child(&[99]);
        let q_reda = swap_quality(&sample, config.quality_swaps, Method::Reda, None, &config.filter, q_seed)?;
        let q_ng = swap_quality(
            &sample,
            config.quality_swaps,
            Method::RedaNg,
            Some(model),
            &config.filter,
            q_seed,
        )?;
        quality_runs.push((q_reda, q_ng));
    }

    let mut cells = Vec::new();
    let mut per_cell = per_cell.into_iter();
    for &task in &config.tasks {
        for &n_edits in &EDIT_COUNTS {
            for method in Method::BOTH {
                let runs = per_cell.next().expect("cell count");
                cells.push(RestorationReport::from_runs(
                    task,
                    n_edits,
                    method,
                    runs,
                    config.sample_size,
                ));
            }
        }
    }

    let average = |pick: fn(&(QualityStats, QualityStats)) -> &QualityStats| {
        let stats: Vec<&QualityStats> = quality_runs.iter().map(pick).collect();
        QualityStats {
            bigram_overlap: mean(&stats.iter().map(|s| s.bigram_overlap).collect::<Vec<_>>()),
            edit_distance: mean(&stats.iter().map(|s| s.edit_distance).collect::<Vec<_>>()),
            n: stats.iter().map(|s| s.n).sum(),
        }
    };
    let quality = QualityReport {
        op: Op::Rs,
        n_swaps: config.quality_swaps,
        reda: average(|q| &q.0),
        reda_ng: average(|q| &q.1),
    };

    Ok(SuiteReport {
        seed: config.seed.0,
        sample_size: config.sample_size,
        runs: config.runs,
        filter: config.filter,
        cells,
        quality,
    })
}
