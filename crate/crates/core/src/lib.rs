//! Token-level text augmentation with an n-gram language model filter.
//!
//! Five randomized edit operations (synonym replacement, random swap, random
//! insertion, random deletion and random mix) produce deduplicated
//! augmentations ([`ops::reda_augment`]). The filtered variant over-generates
//! candidates and keeps the most likely under a count-based n-gram model with
//! product backoff ([`filter::reda_ng_augment`]). On top sit a question-pair
//! dataset pipeline and a text-restoration evaluation harness.

pub mod error;
pub mod eval;
pub mod filter;
pub mod ngram;
pub mod ops;
pub mod pairs;
pub mod seed;
pub mod synonyms;
pub mod text;

pub use error::{Error, Result};
pub use filter::{reda_ng_augment, select_top_k, FilterConfig};
pub use ngram::NgramModel;
pub use ops::{reda_augment, AugConfig, Op};
pub use pairs::{augment_dataset, AugPlan, Label, LabeledPair, Mode};
pub use seed::{AugRng, Seed};
pub use synonyms::{build_pseudo_dict, SynonymDict};
pub use text::{num_edits, tokenize, Text};
