//! Published language-independent feature lists, one per representation.
//!
//! Series families are written as `(group, statistics)` pairs so the lists
//! stay readable against the catalog naming scheme.

use std::collections::HashSet;

use super::catalog::{feature_name, Category, Representation, SERIES_GROUPS};

const MIN: &str = SERIES_GROUPS[0];
const MAX: &str = SERIES_GROUPS[1];
const DUR: &str = SERIES_GROUPS[2];
const SER: &str = SERIES_GROUPS[3];
const MAD: &str = "mean abs. val. of derivative";

type SeriesList = &'static [(&'static str, &'static [&'static str])];

struct Selection {
    loudness: &'static [&'static str],
    voice_source: &'static [&'static str],
    other_voice_source: &'static [&'static str],
    harmonicity: &'static [&'static str],
    pitch: SeriesList,
    intensity: SeriesList,
    lowpass: SeriesList,
    highpass: SeriesList,
    mfcc: SeriesList,
    formant: &'static [&'static str],
    duration: &'static [&'static str],
}

const UTTERANCE: Selection = Selection {
    loudness: &[
        "mean",
        "25 percentile",
        "50 percentile",
        "75 percentile",
        "75 percentile RMS",
        "msl b4",
        "msl b5",
        "msl b6",
        "msl b7",
        "msl b8",
        "msl b9",
        "msl b10",
        "msl b11",
        "msl b12",
        "msl b13",
    ],
    voice_source: &[
        "median of E_e",
        "75 percentile of E_e",
        "IQR of normalized ΔE_e",
        "75 percentile of γ",
        "25 percentile of α",
        "75 percentile of α",
        "IQR of normalized Δα",
        "25 percentile of β",
        "median of β",
        "75 percentile of β",
        "IQR of normalized ΔOQ",
        "25 percentile of ε_o",
        "median of ε_o",
        "75 percentile of ε_o",
        "25 percentile of ε_c",
        "median of ε_c",
        "75 percentile of ε_c",
        "IQR of normalized Δε_c",
    ],
    other_voice_source: &[
        "jitter_PF",
        "max jitter_PQ",
        "min jitter_PQ",
        "max shimmer_PQ",
        "min shimmer_PQ",
        "25 percentile of GNE",
        "median of GNE",
        "75 percentile of GNE",
        "25 percentile of PSP",
        "median of PSP",
        "75 percentile of PSP",
        "IQR of normalized ΔPSP",
    ],
    harmonicity: &[
        "median of intrinsic diss. D_i",
        "range of intrinsic diss. D_i",
        "median of avg. diss.",
        "median of avg. diss. derivative",
        "median of cons. values at interval α_1^c",
        "median of highest cons. interval α_1^c",
        "median of cons. values at interval α_2^c",
        "median of avg. cons. peak values",
        "median of diss. values at interval α_1^d",
        "median of diss. values at interval α_2^d",
        "median of avg. diss. peak values",
    ],
    pitch: &[
        (
            MIN,
            &[
                "mean",
                "max",
                "min",
                "range",
                "med",
                "1st quartile",
                "3rd quartile",
                "iqr",
            ],
        ),
        (MAX, &["range", "med", "1st quartile", "3rd quartile"]),
        (DUR, &["min", "range", "med"]),
        (
            SER,
            &[
                "mean",
                "max",
                "min",
                "range",
                "var",
                "med",
                "1st quartile",
                "3rd quartile",
                "iqr",
                MAD,
                "skewness",
                "fraction of voiced F0 above mean",
                "range above mean",
                "range below mean",
            ],
        ),
    ],
    intensity: &[
        (MIN, &["min", "med", "1st quartile", "iqr"]),
        (MAX, &[MAD]),
        (SER, &["min", "var"]),
    ],
    lowpass: &[
        (
            MIN,
            &[
                "mean",
                "max",
                "range",
                "var",
                "med",
                "1st quartile",
                "3rd quartile",
                "iqr",
                MAD,
            ],
        ),
        (
            MAX,
            &["mean", "max", "var", "med", "3rd quartile", "iqr", MAD],
        ),
        (
            DUR,
            &["max", "min", "range", "var", "3rd quartile", "iqr", MAD],
        ),
        (
            SER,
            &[
                "mean",
                "max",
                "min",
                "var",
                "med",
                "3rd quartile",
                "iqr",
                MAD,
            ],
        ),
    ],
    highpass: &[
        (MIN, &["min", "1st quartile"]),
        (MAX, &["max", "min", "range", "med", "1st quartile", MAD]),
        (SER, &["mean", "max", "min"]),
    ],
    mfcc: &[
        (MIN, &["mean", "med", "1st quartile", "3rd quartile", MAD]),
        (MAX, &["min", "1st quartile", "iqr", MAD]),
        (DUR, &["var", "med", "1st quartile"]),
        (SER, &["mean", "med", "3rd quartile", "iqr", MAD]),
    ],
    formant: &["mean F1", "mean F2", "mean F3", "std F2", "std F3"],
    duration: &[
        "mean dur. of aud. segs.",
        "min dur. of aud. segs.",
        "std. of dur. of aud. segs.",
        "ratios of: no. of aud. to total no. of frames",
        "ratios of: duration of aud. segs. to total duration of utterance",
    ],
};

const SEGMENT: Selection = Selection {
    loudness: &[
        "mean",
        "25 percentile",
        "50 percentile",
        "75 percentile",
        "25 percentile RMS",
        "50 percentile RMS",
        "75 percentile RMS",
        "msl b1",
        "msl b3",
        "msl b4",
        "msl b5",
        "msl b6",
        "msl b7",
        "msl b8",
        "msl b9",
        "msl b10",
        "msl b11",
        "msl b12",
        "msl b13",
    ],
    voice_source: &[
        "25 percentile of E_e",
        "median of E_e",
        "75 percentile of E_e",
        "75 percentile of γ",
        "25 percentile of α",
        "median of α",
        "75 percentile of α",
        "25 percentile of β",
        "median of β",
        "75 percentile of β",
        "IQR of normalized Δβ",
        "median of OQ",
        "IQR of normalized ΔOQ",
        "median of ε_o",
        "75 percentile of ε_o",
        "IQR of normalized Δε_o",
        "median of ε_c",
    ],
    other_voice_source: &[
        "max shimmer_PQ",
        "median of GNE",
        "median of PSP",
        "IQR of normalized ΔPSP",
    ],
    harmonicity: &[
        "median of intrinsic diss. D_i",
        "median of avg. diss.",
        "median of avg. diss. derivative",
        "median of cons. values at interval α_1^c",
        "median of highest cons. interval α_1^c",
        "median of cons. values at interval α_2^c",
        "median of avg. cons. peak values",
    ],
    pitch: &[
        (MIN, &["max", "min", "range", "var", "med", MAD]),
        (MAX, &["min", "var", "med", "1st quartile", "iqr"]),
        (DUR, &["min", "med", "1st quartile"]),
        (
            SER,
            &[
                "min",
                "range",
                "var",
                "med",
                "3rd quartile",
                "iqr",
                MAD,
                "skewness",
                "fraction of voiced F0 above mean",
                "range below mean",
            ],
        ),
    ],
    intensity: &[(MIN, &["var"]), (DUR, &["var"])],
    lowpass: &[
        (
            MIN,
            &[
                "mean",
                "max",
                "min",
                "range",
                "var",
                "med",
                "3rd quartile",
                "iqr",
                MAD,
            ],
        ),
        (
            MAX,
            &[
                "mean",
                "max",
                "min",
                "range",
                "var",
                "med",
                "1st quartile",
                "3rd quartile",
                MAD,
            ],
        ),
        (DUR, &["mean", "min", "med", MAD]),
        (
            SER,
            &[
                "mean",
                "max",
                "range",
                "var",
                "med",
                "1st quartile",
                "3rd quartile",
                "iqr",
                MAD,
            ],
        ),
    ],
    highpass: &[(MIN, &["var", "med"]), (SER, &["min"])],
    mfcc: &[
        (MIN, &["max", "range", "med", "1st quartile", MAD]),
        (MAX, &["range", "1st quartile"]),
        (DUR, &["3rd quartile"]),
        (SER, &["max", "range", "med", "1st quartile"]),
    ],
    formant: &[
        "mean F1", "mean F2", "std F1", "max F1", "min F1", "range F1",
    ],
    duration: &[],
};

/// Full feature names of the published list for `representation`.
pub(crate) fn flags(representation: Representation) -> HashSet<String> {
    let sel = match representation {
        Representation::Utterance => &UTTERANCE,
        Representation::Segment => &SEGMENT,
    };
    let mut out = HashSet::new();
    let plain = [
        (Category::Loudness, sel.loudness),
        (Category::VoiceSource, sel.voice_source),
        (Category::OtherVoiceSource, sel.other_voice_source),
        (Category::Harmonicity, sel.harmonicity),
        (Category::Formant, sel.formant),
        (Category::Duration, sel.duration),
    ];
    for (category, items) in plain {
        out.extend(items.iter().map(|item| feature_name(category, item)));
    }
    let series = [
        (Category::Pitch, sel.pitch),
        (Category::Intensity, sel.intensity),
        (Category::LowPassIntensity, sel.lowpass),
        (Category::HighPassIntensity, sel.highpass),
        (Category::Mfcc, sel.mfcc),
    ];
    for (category, groups) in series {
        for (group, stats) in groups {
            for stat in *stats {
                out.insert(feature_name(category, &format!("{group}: {stat}")));
            }
        }
    }
    out
}
