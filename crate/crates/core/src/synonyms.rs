//! Synonym dictionaries.
//!
//! On disk a dictionary is UTF-8 TSV, one headword per line:
//! `headword<TAB>syn1<TAB>syn2...`. Repeated headwords are merged.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymDict {
    entries: HashMap<String, Vec<String>>,
    include_self_allowed: bool,
}

impl SynonymDict {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds candidates for `word`, keeping first-seen order and skipping
    /// duplicates. A candidate equal to the headword marks the dictionary as
    /// self-inclusive.
    pub fn insert<I, S>(&mut self, word: &str, candidates: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut added = Vec::new();
        for c in candidates {
            let c = c.into();
            if c.is_empty() {
                continue;
            }
            if c == word {
                self.include_self_allowed = true;
            }
            added.push(c);
        }
        if added.is_empty() {
            return;
        }
        let list = self.entries.entry(word.to_owned()).or_default();
        for c in added {
            if !list.contains(&c) {
                list.push(c);
            }
        }
    }

    /// Candidates for `word`, or an empty slice when absent.
    pub fn lookup(&self, word: &str) -> &[String] {
        self.entries.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn include_self_allowed(&self) -> bool {
        self.include_self_allowed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Headwords in sorted order.
    pub fn headwords(&self) -> Vec<&str> {
        let mut words: Vec<&str> = self.entries.keys().map(String::as_str).collect();
        words.sort_unstable();
        words
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw, path)
    }

    /// Parses TSV content; `origin` only labels error messages.
    pub fn parse(raw: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let mut dict = SynonymDict::new();
        for (i, line) in raw.lines().enumerate() {
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').filter(|f| !f.is_empty()).collect();
            if fields.len() < 2 {
                return Err(Error::parse(
                    origin.as_ref(),
                    i + 1,
                    "expected a headword and at least one synonym",
                ));
            }
            if fields.iter().any(|f| f.chars().any(char::is_whitespace)) {
                return Err(Error::parse(origin.as_ref(), i + 1, "field contains whitespace"));
            }
            dict.insert(fields[0], fields[1..].iter().copied());
        }
        Ok(dict)
    }

    /// TSV serialization with headwords sorted, so output bytes are stable.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for word in self.headwords() {
            out.push_str(word);
            for c in &self.entries[word] {
                out.push('\t');
                out.push_str(c);
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}

/// Builds a dictionary of decoy "synonyms" for restoration experiments.
///
/// `ranked_vocab[0]` is the most frequent word. Headwords and decoys all come
/// from the half-open rank window `rank_lo..rank_hi`. Each entry maps a
/// headword to itself followed by three distinct random words from the window.
pub fn build_pseudo_dict<R: Rng + ?Sized>(
    ranked_vocab: &[String],
    rng: &mut R,
    count: usize,
    rank_lo: usize,
    rank_hi: usize,
) -> Result<SynonymDict> {
    const DECOYS: usize = 3;

    let mut dict = SynonymDict::new();
    if count == 0 {
        return Ok(dict);
    }
    if rank_lo >= rank_hi || rank_hi > ranked_vocab.len() {
        return Err(Error::Config(format!(
            "rank window {rank_lo}..{rank_hi} does not fit a vocabulary of {}",
            ranked_vocab.len()
        )));
    }
    let window = &ranked_vocab[rank_lo..rank_hi];
    if window.len() < DECOYS + 1 {
        return Err(Error::Config(format!(
            "rank window holds {} words; need at least {}",
            window.len(),
            DECOYS + 1
        )));
    }
    if count > window.len() {
        return Err(Error::Config(format!(
            "cannot pick {count} headwords from a window of {}",
            window.len()
        )));
    }
    let distinct: HashSet<&String> = window.iter().collect();
    if distinct.len() != window.len() {
        return Err(Error::Config("ranked vocabulary contains duplicates".into()));
    }

    for head in index::sample(rng, window.len(), count) {
        let mut entry = Vec::with_capacity(DECOYS + 1);
        entry.push(window[head].clone());
        // draw from the window minus the headword, then shift past it
        for j in index::sample(rng, window.len() - 1, DECOYS) {
            let j = if j >= head { j + 1 } else { j };
            entry.push(window[j].clone());
        }
        dict.entries.insert(window[head].clone(), entry);
    }
    dict.include_self_allowed = true;
    Ok(dict)
}
