use std::sync::Arc;

use rayon::prelude::*;

use super::config::ExtractionConfig;
use super::filter::Band;
use super::formant::extract_formants;
use super::intensity::extract_intensity_series;
use super::mfcc::extract_mfcc_series;
use super::pitch::extract_pitch_series;
use super::segments::{detect_segments, extract_duration_features};
use super::signal::{read_wav, Signal};
use super::stats::series_statistics_smoothed;
use crate::corpusio::{CorpusManifest, FeatureCatalog, FeatureTable, Representation, TableRow};
use crate::error::{Error, Result};

/// Extractable features per representation.
pub const UTTERANCE_WIDTH: usize = 242;
pub const SEGMENT_WIDTH: usize = 220;

/// Extracted values plus whether any fallback (empty statistic, zero
/// denominator, missing formants) was used.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// Pitch, three intensity bands, MFCC and formants: 219 values.
fn frame_features(signal: &Signal, config: &ExtractionConfig) -> Result<Extracted> {
    let smoothing = config.extrema_smoothing;
    let mut values = Vec::with_capacity(219);
    let mut degenerate = false;
    let pitch = series_statistics_smoothed(&extract_pitch_series(signal, config)?, true, smoothing);
    degenerate |= pitch.degenerate;
    values.extend(pitch.to_vec());
    for band in [Band::Full, Band::LowPass, Band::HighPass] {
        let s = series_statistics_smoothed(
            &extract_intensity_series(signal, config, band)?,
            false,
            smoothing,
        );
        degenerate |= s.degenerate;
        values.extend(s.to_vec());
    }
    let mfcc = series_statistics_smoothed(&extract_mfcc_series(signal, config)?, false, smoothing);
    degenerate |= mfcc.degenerate;
    values.extend(mfcc.to_vec());
    match extract_formants(signal, config) {
        Ok(f) => values.extend(f),
        Err(Error::NoVoicedFrames) => {
            degenerate = true;
            values.extend([0.0; 15]);
        }
        Err(e) => return Err(e),
    }
    Ok(Extracted { values, degenerate })
}

fn check_catalog(
    catalog: &FeatureCatalog,
    representation: Representation,
    width: usize,
) -> Result<()> {
    let n = catalog.extractable_indices().len();
    if catalog.representation() != representation || n != width {
        return Err(Error::InvalidParameter(format!(
            "extraction needs the built-in {representation} catalog ({width} extractable features), got {n}"
        )));
    }
    Ok(())
}

pub fn extract_utterance_features(
    signal: &Signal,
    config: &ExtractionConfig,
    catalog: &FeatureCatalog,
) -> Result<Extracted> {
    check_catalog(catalog, Representation::Utterance, UTTERANCE_WIDTH)?;
    let mut out = frame_features(signal, config)?;
    let spans = detect_segments(signal, config);
    let d = extract_duration_features(&spans, signal.duration(), config.hop);
    out.values.extend(d.values);
    out.degenerate |= d.degenerate;
    Ok(out)
}

/// The 242 extractable utterance features in catalog order.
pub fn extract_utterance_vector(
    signal: &Signal,
    config: &ExtractionConfig,
    catalog: &FeatureCatalog,
) -> Result<Vec<f64>> {
    extract_utterance_features(signal, config, catalog).map(|e| e.values)
}

pub fn extract_segment_features(
    signal: &Signal,
    config: &ExtractionConfig,
    catalog: &FeatureCatalog,
) -> Result<Vec<Extracted>> {
    check_catalog(catalog, Representation::Segment, SEGMENT_WIDTH)?;
    let spans: Vec<_> = detect_segments(signal, config)
        .into_iter()
        .filter(|s| s.audible)
        .collect();
    if spans.is_empty() {
        return Err(Error::NoAudibleSegments);
    }
    spans
        .iter()
        .map(|span| {
            let mut e = frame_features(&signal.slice(span.start, span.end), config)?;
            e.values.push(span.duration());
            Ok(e)
        })
        .collect()
}

/// One 220-wide vector per audible segment, the last entry being the
/// segment length in seconds.
pub fn extract_segment_vectors(
    signal: &Signal,
    config: &ExtractionConfig,
    catalog: &FeatureCatalog,
) -> Result<Vec<Vec<f64>>> {
    Ok(extract_segment_features(signal, config, catalog)?
        .into_iter()
        .map(|e| e.values)
        .collect())
}

/// Extracts every manifest entry in parallel into a feature table whose
/// present columns are the extractable ones.
pub fn extract_corpus(
    manifest: &CorpusManifest,
    config: &ExtractionConfig,
    catalog: Arc<FeatureCatalog>,
) -> Result<FeatureTable> {
    let extractable = catalog.extractable_indices();
    let width = catalog.len();
    let representation = catalog.representation();
    let per_utterance: Vec<Result<Vec<TableRow>>> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let wrap = |e: Error| Error::Corpus {
                corpus: format!("{}/{}", manifest.corpus_id, entry.utterance_id),
                source: Box::new(e),
            };
            let signal = read_wav(&manifest.audio_path(entry)).map_err(wrap)?;
            let vectors = match representation {
                Representation::Utterance => {
                    vec![extract_utterance_features(&signal, config, &catalog).map_err(wrap)?]
                }
                Representation::Segment => {
                    extract_segment_features(&signal, config, &catalog).map_err(wrap)?
                }
            };
            if vectors.iter().any(|v| v.degenerate) {
                log::debug!(
                    "{}: degenerate statistics replaced by 0",
                    entry.utterance_id
                );
            }
            Ok(vectors
                .into_iter()
                .enumerate()
                .map(|(k, v)| {
                    let mut values = vec![0.0; width];
                    for (&c, x) in extractable.iter().zip(v.values) {
                        values[c] = x;
                    }
                    TableRow {
                        utterance_id: entry.utterance_id.clone(),
                        segment_index: k,
                        values,
                    }
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in per_utterance {
        rows.extend(r?);
    }
    let mut present = vec![false; width];
    for &c in &extractable {
        present[c] = true;
    }
    Ok(FeatureTable {
        catalog,
        has_segment_index: representation == Representation::Segment,
        present,
        rows,
    })
}
