//! Cross-corpus wrapper feature selection for emotional speech.
//!
//! Feature subsets are selected on one corpus with three wrapper selectors,
//! combined, tested on the other corpora, and ranked to find features that
//! keep working regardless of language.

pub mod acoustics;
pub mod classify;
pub mod corpusio;
pub mod error;
pub mod harness;
pub mod seed;
pub mod select;
pub mod strategy;

pub use error::{Error, Result};
