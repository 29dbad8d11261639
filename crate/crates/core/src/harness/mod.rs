//! Synthetic planted-feature corpora and report files.

pub mod report;
pub mod synth;

pub use report::{candidate_slug, emit_report, format_cell, report_markdown, ResultTable};
pub use synth::{synth_corpora, write_synth, SynthCorpus, SynthSpec, NOISE_PREFIX, SHARED_PREFIX};
