//! Feature extraction from mono WAV audio: pitch, band intensities, MFCC
//! and formant contours summarised by series statistics, plus duration
//! features from audible/inaudible segmentation.

pub mod config;
pub mod filter;
pub mod formant;
pub mod intensity;
pub mod mfcc;
pub mod pitch;
pub mod segments;
pub mod signal;
pub mod stats;
pub mod vector;

pub use config::{ExtractionConfig, MfccAggregate};
pub use filter::{band_filter, Band};
pub use formant::extract_formants;
pub use intensity::extract_intensity_series;
pub use mfcc::extract_mfcc_series;
pub use pitch::extract_pitch_series;
pub use segments::{detect_segments, extract_duration_features, DurationFeatures, SegmentSpan};
pub use signal::{read_wav, write_wav, Signal};
pub use stats::{series_statistics, FrameSeries, SeriesStats, SeriesSummary};
pub use vector::{
    extract_corpus, extract_segment_vectors, extract_utterance_vector, SEGMENT_WIDTH,
    UTTERANCE_WIDTH,
};
