//! Count-based n-gram language model with recursive product backoff.
//!
//! Probabilities are never stored. A seen n-gram scores its relative
//! frequency against its (n-1)-token prefix; an unseen one scores the product
//! of its prefix and suffix (n-1)-grams, recursing down to unigrams. Unseen
//! unigrams get the probability of a word seen once, `1/N`. All values are
//! natural-log probabilities.
//!
//! # File format
//!
//! ```text
//! reda-ngram v1 <max_order> <N>
//! <order>\t<space-joined tokens>\t<count>
//! ...
//! end <entries>
//! ```
//!
//! Entry lines are sorted by order, then bytewise by token string.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::Text;

pub const DEFAULT_ORDER: usize = 4;
const MAGIC: &str = "reda-ngram";
const VERSION: &str = "v1";

/// Id assigned to any token missing from the training vocabulary.
const UNKNOWN: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct NgramModel {
    max_order: usize,
    vocab: HashMap<String, u32>,
    words: Vec<String>,
    /// `counts[o - 1]` holds the o-gram table.
    counts: Vec<HashMap<Box<[u32]>, u64>>,
    total_tokens: u64,
}

/// Models are equal when they hold the same counts for the same token
/// sequences, regardless of internal id assignment.
impl PartialEq for NgramModel {
    fn eq(&self, other: &Self) -> bool {
        self.max_order == other.max_order
            && self.total_tokens == other.total_tokens
            && self.counts.iter().zip(&other.counts).all(|(ours, theirs)| {
                ours.len() == theirs.len()
                    && ours.iter().all(|(gram, &c)| {
                        let words: Vec<&str> =
                            gram.iter().map(|&id| self.words[id as usize].as_str()).collect();
                        other.count(&words) == c
                    })
            })
    }
}

/// Summary figures for a trained model.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct ModelStats {
    pub max_order: usize,
    pub total_tokens: u64,
    pub vocab_size: usize,
    /// Distinct n-gram count per order, starting at unigrams.
    pub distinct_per_order: Vec<usize>,
}

impl NgramModel {
    fn empty(max_order: usize) -> Self {
        NgramModel {
            max_order,
            vocab: HashMap::new(),
            words: Vec::new(),
            counts: vec![HashMap::new(); max_order],
            total_tokens: 0,
        }
    }

    /// Counts every window of length 1..=`max_order` inside each text. Windows
    /// never cross text boundaries and no padding is added.
    pub fn train<'a, I>(corpus: I, max_order: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Text>,
    {
        if max_order == 0 {
            return Err(Error::Config("max_order must be at least 1".into()));
        }
        let mut model = NgramModel::empty(max_order);
        for text in corpus {
            let ids: Vec<u32> = text.iter().map(|w| model.intern(w)).collect();
            model.total_tokens += ids.len() as u64;
            for order in 1..=max_order.min(ids.len()) {
                let table = &mut model.counts[order - 1];
                for window in ids.windows(order) {
                    *table.entry(window.into()).or_insert(0) += 1;
                }
            }
        }
        if model.total_tokens == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(model)
    }

    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.vocab.get(word) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(word.to_owned());
        self.vocab.insert(word.to_owned(), id);
        id
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    pub fn stats(&self) -> ModelStats {
        ModelStats {
            max_order: self.max_order,
            total_tokens: self.total_tokens,
            vocab_size: self.vocab_size(),
            distinct_per_order: self.counts.iter().map(HashMap::len).collect(),
        }
    }

    fn ids<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<u32> {
        tokens
            .iter()
            .map(|w| self.vocab.get(w.as_ref()).copied().unwrap_or(UNKNOWN))
            .collect()
    }

    fn count_ids(&self, ids: &[u32]) -> u64 {
        if ids.is_empty() || ids.len() > self.max_order {
            return 0;
        }
        self.counts[ids.len() - 1].get(ids).copied().unwrap_or(0)
    }

    /// Training count of a token sequence (0 if unseen or longer than the
    /// model order).
    pub fn count<S: AsRef<str>>(&self, gram: &[S]) -> u64 {
        self.count_ids(&self.ids(gram))
    }

    /// Unigrams ranked by descending count; ties in byte order.
    pub fn ranked_vocabulary(&self) -> Vec<String> {
        let mut ranked: Vec<(u64, &String)> = self
            .words
            .iter()
            .enumerate()
            .map(|(id, w)| (self.count_ids(&[id as u32]), w))
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        ranked.into_iter().map(|(_, w)| w.clone()).collect()
    }

    /// Log-probability of the last token of `gram` given the rest.
    pub fn ngram_prob<S: AsRef<str>>(&self, gram: &[S]) -> Result<f64> {
        self.check_order(gram.len())?;
        Ok(self.prob_ids(&self.ids(gram)))
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order == 0 || order > self.max_order {
            return Err(Error::OrderOutOfRange {
                order,
                max_order: self.max_order,
            });
        }
        Ok(())
    }

    fn prob_ids(&self, gram: &[u32]) -> f64 {
        let n = self.total_tokens as f64;
        if gram.len() == 1 {
            let c = self.count_ids(gram);
            return if c > 0 {
                (c as f64 / n).ln()
            } else {
                (1.0 / n).ln()
            };
        }
        let c = self.count_ids(gram);
        if c > 0 {
            let prefix = &gram[..gram.len() - 1];
            // a counted window always has its prefix counted
            let context = self.count_ids(prefix);
            (c as f64 / context as f64).ln()
        } else {
            self.prob_ids(&gram[..gram.len() - 1]) + self.prob_ids(&gram[1..])
        }
    }

    /// Log-probability of a whole text: the sum over all sliding windows of
    /// length `min(max_order, len)`.
    pub fn score<S: AsRef<str>>(&self, text: &[S]) -> Result<f64> {
        if text.is_empty() {
            return Err(Error::EmptyText);
        }
        let ids = self.ids(text);
        let order = self.max_order.min(ids.len());
        Ok(ids.windows(order).map(|w| self.prob_ids(w)).sum())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{MAGIC} {VERSION} {} {}", self.max_order, self.total_tokens)?;
        let mut entries = 0usize;
        for (i, table) in self.counts.iter().enumerate() {
            let mut lines: Vec<(String, u64)> = table
                .iter()
                .map(|(gram, &c)| {
                    let words: Vec<&str> =
                        gram.iter().map(|&id| self.words[id as usize].as_str()).collect();
                    (words.join(" "), c)
                })
                .collect();
            lines.sort_unstable();
            for (gram, c) in lines {
                writeln!(out, "{}\t{gram}\t{c}", i + 1)?;
                entries += 1;
            }
        }
        writeln!(out, "end {entries}")?;
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw, path)
    }

    /// Parses the model file format; `origin` only labels errors.
    pub fn parse(raw: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let err = |line: usize, msg: String| Error::parse(origin, line, msg);

        if !raw.ends_with('\n') {
            return Err(err(raw.lines().count(), "file is truncated".into()));
        }
        let mut lines = raw.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let head: Vec<&str> = header.split(' ').collect();
        if head.len() != 4 || head[0] != MAGIC {
            return Err(err(1, format!("bad header {header:?}")));
        }
        if head[1] != VERSION {
            return Err(err(1, format!("unsupported model version {}", head[1])));
        }
        let max_order: usize = head[2]
            .parse()
            .map_err(|_| err(1, format!("bad max order {:?}", head[2])))?;
        let total: u64 = head[3]
            .parse()
            .map_err(|_| err(1, format!("bad token total {:?}", head[3])))?;
        if max_order == 0 {
            return Err(err(1, "max order must be at least 1".into()));
        }

        let mut model = NgramModel::empty(max_order);
        model.total_tokens = total;
        let mut entries = 0usize;
        let mut trailer = None;
        for (i, line) in lines {
            let lineno = i + 1;
            if trailer.is_some() {
                return Err(err(lineno, "data after end marker".into()));
            }
            if let Some(n) = line.strip_prefix("end ") {
                let n: usize = n
                    .parse()
                    .map_err(|_| err(lineno, format!("bad entry count {n:?}")))?;
                trailer = Some(n);
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(lineno, "expected order, n-gram and count".into()));
            }
            let order: usize = fields[0]
                .parse()
                .map_err(|_| err(lineno, format!("bad order {:?}", fields[0])))?;
            if order == 0 || order > max_order {
                return Err(err(lineno, format!("order {order} outside 1..={max_order}")));
            }
            let words: Vec<&str> = fields[1].split(' ').collect();
            if words.len() != order || words.iter().any(|w| w.is_empty()) {
                return Err(err(lineno, format!("n-gram does not have {order} tokens")));
            }
            let count: u64 = fields[2]
                .parse()
                .map_err(|_| err(lineno, format!("bad count {:?}", fields[2])))?;
            if count == 0 {
                return Err(err(lineno, "zero count".into()));
            }
            let ids: Box<[u32]> = words.iter().map(|w| model.intern(w)).collect();
            if model.counts[order - 1].insert(ids, count).is_some() {
                return Err(err(lineno, "duplicate n-gram".into()));
            }
            entries += 1;
        }
        match trailer {
            Some(n) if n == entries => {}
            Some(n) => {
                return Err(err(0, format!("end marker expects {n} entries, found {entries}")))
            }
            None => return Err(err(0, "missing end marker".into())),
        }
        model.check_consistency().map_err(|m| err(0, m))?;
        Ok(model)
    }

    fn check_consistency(&self) -> std::result::Result<(), String> {
        let unigram_total: u64 = self.counts[0].values().sum();
        if unigram_total != self.total_tokens {
            return Err(format!(
                "unigram counts sum to {unigram_total}, header says {}",
                self.total_tokens
            ));
        }
        if self.total_tokens == 0 {
            return Err("model has no tokens".into());
        }
        for table in &self.counts[1..] {
            for (gram, &c) in table {
                let n = gram.len();
                if self.count_ids(&gram[..n - 1]) < c || self.count_ids(&gram[1..]) < c {
                    return Err("n-gram count exceeds a sub-gram count".into());
                }
            }
        }
        Ok(())
    }
}
