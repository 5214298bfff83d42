//! Helpers shared by the CLI and acceptance test targets.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn reda() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reda"))
}

pub fn run(args: &[&str]) -> Output {
    reda().args(args).output().expect("spawn reda")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

const SUBJECTS: &[&str] = &[
    "the cat",
    "a dog",
    "my friend",
    "the old man",
    "a young girl",
    "the teacher",
    "our neighbour",
    "his brother",
    "the little boy",
    "her mother",
];
const VERBS: &[&str] = &[
    "likes", "sees", "wants", "finds", "buys", "needs", "cooks", "paints", "sells", "carries",
];
const BASE_VERBS: &[&str] = &[
    "cook", "buy", "find", "clean", "paint", "sell", "fix", "carry", "store", "choose",
];
const OBJECTS: &[&str] = &[
    "a red apple",
    "the big house",
    "some fresh bread",
    "an old car",
    "the blue door",
    "a warm coat",
    "some brown rice",
    "the wooden table",
    "a small boat",
    "the green bike",
];
const TAILS: &[&str] = &[
    "in the morning",
    "at the market",
    "every day",
    "with great care",
    "after school",
    "near the river",
    "on sunday",
    "before dinner",
];

/// One sentence from a small phrase grammar.
pub fn grammar_sentence<R: Rng>(rng: &mut R) -> String {
    let pick = |rng: &mut R, xs: &[&str]| xs.choose(rng).unwrap().to_string();
    match rng.random_range(0..4) {
        0 => format!(
            "{} {} {}",
            pick(rng, SUBJECTS),
            pick(rng, VERBS),
            pick(rng, OBJECTS)
        ),
        1 => format!(
            "{} {} {} {}",
            pick(rng, SUBJECTS),
            pick(rng, VERBS),
            pick(rng, OBJECTS),
            pick(rng, TAILS)
        ),
        2 => format!("how do i {} {}", pick(rng, BASE_VERBS), pick(rng, OBJECTS)),
        _ => format!(
            "what is the best way to {} {} {}",
            pick(rng, BASE_VERBS),
            pick(rng, OBJECTS),
            pick(rng, TAILS)
        ),
    }
}

pub fn grammar_corpus(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| grammar_sentence(&mut rng)).collect()
}

/// Real synonyms for grammar words, used by the pair-augmentation tests.
pub const GRAMMAR_DICT: &str = "\
cat\tkitten\tfeline
dog\tpuppy\thound
friend\tpal\tbuddy
old\taged\telderly
young\tyouthful
likes\tenjoys\tloves
sees\tnotices\tspots
wants\tdesires
buys\tpurchases
cook\tprepare\tmake
buy\tpurchase
fix\trepair\tmend
big\tlarge\thuge
small\tlittle\ttiny
fresh\tnew
best\tgreatest\ttop
way\tmethod\tmeans
house\thome
car\tvehicle\tauto
";

/// A question-pair TSV built from the grammar, without repeated pairs.
pub fn grammar_pairs_tsv(n: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out = String::new();
    while seen.len() < n {
        let a = grammar_sentence(&mut rng);
        let b = grammar_sentence(&mut rng);
        if seen.insert((a.clone(), b.clone())) {
            let label = rng.random_range(0..2);
            out.push_str(&format!("{a}\t{b}\t{label}\n"));
        }
    }
    out
}

/// Straightforward n-gram model written directly from the defining equations.
///
/// Counts come from enumerating every substring of every text; nothing is
/// shared with the library implementation.
pub struct OracleLm {
    counts: HashMap<Vec<String>, usize>,
    total: usize,
    max_order: usize,
}

impl OracleLm {
    pub fn new(corpus: &[Vec<String>], max_order: usize) -> Self {
        let mut counts = HashMap::new();
        let mut total = 0;
        for text in corpus {
            total += text.len();
            for start in 0..text.len() {
                for end in start + 1..=text.len() {
                    if end - start <= max_order {
                        *counts.entry(text[start..end].to_vec()).or_insert(0) += 1;
                    }
                }
            }
        }
        OracleLm {
            counts,
            total,
            max_order,
        }
    }

    fn c(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    /// Probability (not log) of the last token given the rest.
    pub fn p(&self, gram: &[String]) -> f64 {
        let n = gram.len();
        if n == 1 {
            let c = self.c(gram);
            return if c > 0 { c as f64 } else { 1.0 } / self.total as f64;
        }
        if self.c(gram) > 0 {
            self.c(gram) as f64 / self.c(&gram[..n - 1]) as f64
        } else {
            self.p(&gram[..n - 1]) * self.p(&gram[1..])
        }
    }

    pub fn log_p(&self, gram: &[String]) -> f64 {
        self.p(gram).ln()
    }

    pub fn score(&self, text: &[String]) -> f64 {
        let order = self.max_order.min(text.len());
        let mut total = 0.0;
        for i in 0..=text.len() - order {
            total += self.log_p(&text[i..i + order]);
        }
        total
    }
}

/// Exact two-sided acceptance interval of Binomial(n, p) at `level`.
pub fn binomial_interval(n: u64, p: f64, level: f64) -> (u64, u64) {
    let tail = (1.0 - level) / 2.0;
    let q = 1.0 - p;
    let mut log_pmf = Vec::with_capacity(n as usize + 1);
    let mut lp = n as f64 * q.ln();
    log_pmf.push(lp);
    for k in 0..n {
        lp += ((n - k) as f64 / (k + 1) as f64).ln() + (p / q).ln();
        log_pmf.push(lp);
    }
    let pmf: Vec<f64> = log_pmf.iter().map(|l| l.exp()).collect();
    let mut lo = 0;
    let mut acc = 0.0;
    while acc + pmf[lo] <= tail {
        acc += pmf[lo];
        lo += 1;
    }
    let mut hi = n as usize;
    let mut acc = 0.0;
    while acc + pmf[hi] <= tail {
        acc += pmf[hi];
        hi -= 1;
    }
    (lo as u64, hi as u64)
}
