//! The five token-level edit operations and the deduplicating augmenter.
//!
//! Every function takes an explicit generator and never mutates its input.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synonyms::SynonymDict;
use crate::text::{num_edits, Text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Op {
    /// Synonym replacement.
    Sr,
    /// Random swap.
    Rs,
    /// Random insertion.
    Ri,
    /// Random deletion.
    Rd,
    /// Random mix of the other four.
    Rm,
}

impl Op {
    pub const ALL: [Op; 5] = [Op::Sr, Op::Rs, Op::Ri, Op::Rd, Op::Rm];
    /// The operations random mix draws from.
    pub const BASIC: [Op; 4] = [Op::Sr, Op::Rs, Op::Ri, Op::Rd];

    pub fn name(self) -> &'static str {
        match self {
            Op::Sr => "SR",
            Op::Rs => "RS",
            Op::Ri => "RI",
            Op::Rd => "RD",
            Op::Rm => "RM",
        }
    }

    /// Stable numeric id, used when deriving per-operation generators.
    pub fn code(self) -> u64 {
        match self {
            Op::Sr => 1,
            Op::Rs => 2,
            Op::Ri => 3,
            Op::Rd => 4,
            Op::Rm => 5,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Op {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sr" => Ok(Op::Sr),
            "rs" => Ok(Op::Rs),
            "ri" => Ok(Op::Ri),
            "rd" => Ok(Op::Rd),
            "rm" => Ok(Op::Rm),
            other => Err(Error::Config(format!("unknown operation {other:?}"))),
        }
    }
}

/// Parses a comma-separated operation list such as `sr,rs,rm`.
pub fn parse_ops(list: &str) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let op: Op = part.parse()?;
        if !ops.contains(&op) {
            ops.push(op);
        }
    }
    if ops.is_empty() {
        return Err(Error::Config("no operations given".into()));
    }
    Ok(ops)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugConfig {
    pub rate_sr: f64,
    pub rate_rs: f64,
    pub rate_ri: f64,
    pub rate_rd: f64,
    /// How many distinct basic operations random mix combines (2..=4).
    pub rm_num_ops: usize,
    pub rm_edits_per_op: usize,
    /// Outputs requested per text.
    pub n_aug: usize,
    /// Whether an output may equal its input.
    pub allow_identity: bool,
    pub ops_enabled: Vec<Op>,
    /// Consecutive non-new draws tolerated before giving up on an output slot.
    pub retry_cap: usize,
}

impl Default for AugConfig {
    fn default() -> Self {
        AugConfig {
            rate_sr: 0.2,
            rate_rs: 0.2,
            rate_ri: 0.1,
            rate_rd: 0.1,
            rm_num_ops: 2,
            rm_edits_per_op: 1,
            n_aug: 2,
            allow_identity: false,
            ops_enabled: Op::ALL.to_vec(),
            retry_cap: 30,
        }
    }
}

impl AugConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, rate) in [
            ("rate_sr", self.rate_sr),
            ("rate_rs", self.rate_rs),
            ("rate_ri", self.rate_ri),
            ("rate_rd", self.rate_rd),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} = {rate} is outside [0, 1]")));
            }
        }
        if !(2..=4).contains(&self.rm_num_ops) {
            return Err(Error::Config(format!(
                "rm_num_ops = {} is outside 2..=4",
                self.rm_num_ops
            )));
        }
        if self.rm_edits_per_op == 0 {
            return Err(Error::Config("rm_edits_per_op must be positive".into()));
        }
        if self.n_aug == 0 {
            return Err(Error::Config("n_aug must be positive".into()));
        }
        Ok(())
    }

    /// Editing rate for a basic operation; `None` for random mix.
    pub fn rate(&self, op: Op) -> Option<f64> {
        match op {
            Op::Sr => Some(self.rate_sr),
            Op::Rs => Some(self.rate_rs),
            Op::Ri => Some(self.rate_ri),
            Op::Rd => Some(self.rate_rd),
            Op::Rm => None,
        }
    }

    /// Edits per application of `op` on a text of `length` tokens. For random
    /// mix this is the per-component count.
    pub fn n_edits(&self, op: Op, length: usize) -> usize {
        match self.rate(op) {
            Some(rate) => num_edits(rate, length),
            None => self.rm_edits_per_op,
        }
    }

    pub fn is_enabled(&self, op: Op) -> bool {
        self.ops_enabled.contains(&op)
    }
}

/// Replaces up to `n` distinct positions with a dictionary candidate.
///
/// Each edit picks an unedited position whose token has an entry, then one of
/// its candidates. When `allow_identity` is false the candidate must differ
/// from the token, unless the entry holds nothing else.
pub fn synonym_replacement<R: Rng + ?Sized>(
    text: &Text,
    n: usize,
    dict: &SynonymDict,
    allow_identity: bool,
    rng: &mut R,
) -> Text {
    let mut out = text.clone();
    if n == 0 || dict.is_empty() {
        return out;
    }
    let mut eligible: Vec<usize> = (0..text.len())
        .filter(|&i| dict.contains(&text[i]))
        .collect();
    for _ in 0..n {
        if eligible.is_empty() {
            break;
        }
        let slot = rng.random_range(0..eligible.len());
        let pos = eligible.swap_remove(slot);
        let token = &text[pos];
        let candidates = dict.lookup(token);
        let choice = if allow_identity {
            candidates.choose(rng)
        } else {
            let alternatives: Vec<&String> = candidates.iter().filter(|c| *c != token).collect();
            if alternatives.is_empty() {
                candidates.choose(rng)
            } else {
                alternatives.choose(rng).copied()
            }
        };
        if let Some(choice) = choice {
            out.tokens_mut()[pos] = choice.clone();
        }
    }
    out
}

/// Swaps the tokens at two distinct random positions, `n` times.
pub fn random_swap<R: Rng + ?Sized>(text: &Text, n: usize, rng: &mut R) -> Text {
    let mut out = text.clone();
    let len = out.len();
    if len < 2 {
        return out;
    }
    for _ in 0..n {
        let i = rng.random_range(0..len);
        let mut j = rng.random_range(0..len - 1);
        if j >= i {
            j += 1;
        }
        out.tokens_mut().swap(i, j);
    }
    out
}

/// Inserts a random candidate right after a random word that has an entry,
/// `n` times. Inserted words are themselves eligible for later edits.
pub fn random_insertion<R: Rng + ?Sized>(
    text: &Text,
    n: usize,
    dict: &SynonymDict,
    rng: &mut R,
) -> Text {
    let mut out = text.clone();
    if dict.is_empty() {
        return out;
    }
    for _ in 0..n {
        let eligible: Vec<usize> = (0..out.len()).filter(|&i| dict.contains(&out[i])).collect();
        let Some(&pos) = eligible.choose(rng) else {
            break;
        };
        let Some(word) = dict.lookup(&out[pos]).choose(rng).cloned() else {
            break;
        };
        out.tokens_mut().insert(pos + 1, word);
    }
    out
}

/// Deletes a random token `n` times, never removing the last one.
pub fn random_deletion<R: Rng + ?Sized>(text: &Text, n: usize, rng: &mut R) -> Text {
    let mut out = text.clone();
    for _ in 0..n {
        if out.len() <= 1 {
            break;
        }
        let pos = rng.random_range(0..out.len());
        out.tokens_mut().remove(pos);
    }
    out
}

/// Picks `k` distinct basic operations in random order.
pub fn sample_mix_ops<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<Op> {
    let mut ops = Op::BASIC;
    ops.shuffle(rng);
    ops[..k.min(ops.len())].to_vec()
}

/// Applies `config.rm_num_ops` distinct basic operations in sampled order,
/// each with `config.rm_edits_per_op` edits.
pub fn random_mix<R: Rng + ?Sized>(
    text: &Text,
    config: &AugConfig,
    dict: &SynonymDict,
    rng: &mut R,
) -> Text {
    let mut out = text.clone();
    for op in sample_mix_ops(config.rm_num_ops, rng) {
        out = apply_basic(&out, op, config.rm_edits_per_op, dict, config.allow_identity, rng);
    }
    out
}

fn apply_basic<R: Rng + ?Sized>(
    text: &Text,
    op: Op,
    n: usize,
    dict: &SynonymDict,
    allow_identity: bool,
    rng: &mut R,
) -> Text {
    match op {
        Op::Sr => synonym_replacement(text, n, dict, allow_identity, rng),
        Op::Rs => random_swap(text, n, rng),
        Op::Ri => random_insertion(text, n, dict, rng),
        Op::Rd => random_deletion(text, n, rng),
        Op::Rm => unreachable!("random mix is not a basic operation"),
    }
}

/// One application of `op` with `n` edits (ignored for random mix, which uses
/// the per-component count from `config`).
pub fn apply_op<R: Rng + ?Sized>(
    text: &Text,
    op: Op,
    n: usize,
    config: &AugConfig,
    dict: &SynonymDict,
    rng: &mut R,
) -> Text {
    match op {
        Op::Rm => random_mix(text, config, dict, rng),
        basic => apply_basic(text, basic, n, dict, config.allow_identity, rng),
    }
}

/// Whether `op` can change `text` at all under `config`'s edit budget.
pub(crate) fn has_edit_budget(text: &Text, op: Op, config: &AugConfig) -> bool {
    config.n_edits(op, text.len()) > 0
}

/// Draws until `target` pairwise-distinct outputs are found or `retry_cap`
/// consecutive draws yield nothing new. Outputs equal to `original` are
/// dropped unless `allow_identity` holds. Results keep discovery order.
pub fn collect_distinct<R, F>(
    original: &Text,
    target: usize,
    retry_cap: usize,
    allow_identity: bool,
    rng: &mut R,
    mut draw: F,
) -> Vec<Text>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Text,
{
    let mut seen: HashSet<Text> = HashSet::new();
    let mut found = Vec::new();
    let mut misses = 0;
    while found.len() < target && misses < retry_cap.max(1) {
        let candidate = draw(rng);
        if (!allow_identity && candidate == *original) || seen.contains(&candidate) {
            misses += 1;
            continue;
        }
        misses = 0;
        seen.insert(candidate.clone());
        found.push(candidate);
    }
    found
}

/// Up to `config.n_aug` pairwise-distinct augmentations of `text` by `op`.
///
/// Basic operations use the rate-derived edit count for this text length.
pub fn reda_augment<R: Rng + ?Sized>(
    text: &Text,
    op: Op,
    config: &AugConfig,
    dict: &SynonymDict,
    rng: &mut R,
) -> Result<Vec<Text>> {
    if !config.is_enabled(op) {
        return Err(Error::OpDisabled(op));
    }
    if !config.allow_identity && !has_edit_budget(text, op, config) {
        return Ok(Vec::new());
    }
    let n = config.n_edits(op, text.len());
    Ok(collect_distinct(
        text,
        config.n_aug,
        config.retry_cap,
        config.allow_identity,
        rng,
        |rng| apply_op(text, op, n, config, dict, rng),
    ))
}
