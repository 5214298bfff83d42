//! Token sequences and edit budgets.
//!
//! A [`Text`] is an ordered list of opaque, whitespace-free tokens. No case
//! folding or punctuation handling happens here: input is expected to be
//! pre-segmented (Chinese text must already be word-segmented).

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::ops::Op;

/// An ordered sequence of tokens.
///
/// Ordering is lexicographic over tokens, which is the tie-break order used
/// when ranking candidates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Text(Vec<String>);

impl Text {
    pub fn new() -> Self {
        Text(Vec::new())
    }

    /// Builds a text from tokens without re-splitting them.
    ///
    /// Callers are responsible for passing non-empty, whitespace-free tokens;
    /// use [`tokenize`] for raw strings.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Text(tokens.into_iter().map(Into::into).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.0
    }

    pub(crate) fn tokens_mut(&mut self) -> &mut Vec<String> {
        &mut self.0
    }
}

impl Deref for Text {
    type Target = [String];

    fn deref(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for Text {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

impl From<&str> for Text {
    fn from(raw: &str) -> Self {
        tokenize(raw)
    }
}

/// Splits on runs of whitespace, dropping empty fragments.
pub fn tokenize(raw: &str) -> Text {
    Text(raw.split_whitespace().map(str::to_owned).collect())
}

/// Number of edits for an editing rate applied to a text of `length` tokens.
///
/// The product is rounded half-to-even, so `0.1 * 5 = 0.5` yields no edit and
/// `1.5` yields 2.
pub fn num_edits(rate: f64, length: usize) -> usize {
    let edits = (rate * length as f64).round_ties_even();
    if edits <= 0.0 {
        0
    } else {
        edits as usize
    }
}

/// Edit count resolved for one operation on one text.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditBudget {
    pub op: Op,
    pub rate: f64,
    pub n_edits: usize,
}

impl EditBudget {
    pub fn new(op: Op, rate: f64, length: usize) -> Self {
        EditBudget {
            op,
            rate,
            n_edits: num_edits(rate, length),
        }
    }
}
