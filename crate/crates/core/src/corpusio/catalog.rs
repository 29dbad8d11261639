//! The canonical registry of acoustic feature names.
//!
//! The utterance catalog holds 318 features in 11 categories. The segment
//! catalog drops the 23 utterance-level duration features and adds a single
//! `segment length duration` entry, for 296 features. Series-statistics
//! families (pitch, the three intensity measures and MFCC) share one naming
//! scheme: `<category>: <group>: <statistic>`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Utterance,
    Segment,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Utterance => "utterance",
            Representation::Segment => "segment",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "utterance" => Ok(Representation::Utterance),
            "segment" => Ok(Representation::Segment),
            other => Err(Error::InvalidParameter(format!(
                "representation must be `utterance` or `segment`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Loudness,
    VoiceSource,
    OtherVoiceSource,
    Harmonicity,
    Pitch,
    Intensity,
    LowPassIntensity,
    HighPassIntensity,
    Mfcc,
    Formant,
    Duration,
    /// Features of a catalog built from arbitrary column names.
    Custom,
}

impl Category {
    pub const TABLE: [Category; 11] = [
        Category::Loudness,
        Category::VoiceSource,
        Category::OtherVoiceSource,
        Category::Harmonicity,
        Category::Pitch,
        Category::Intensity,
        Category::LowPassIntensity,
        Category::HighPassIntensity,
        Category::Mfcc,
        Category::Formant,
        Category::Duration,
    ];

    /// Prefix used in feature names.
    pub fn key(self) -> &'static str {
        match self {
            Category::Loudness => "loudness",
            Category::VoiceSource => "voice_source",
            Category::OtherVoiceSource => "other_voice_source",
            Category::Harmonicity => "harmonicity",
            Category::Pitch => "pitch",
            Category::Intensity => "intensity",
            Category::LowPassIntensity => "lowpass_intensity",
            Category::HighPassIntensity => "highpass_intensity",
            Category::Mfcc => "mfcc",
            Category::Formant => "formant",
            Category::Duration => "duration",
            Category::Custom => "custom",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::Loudness => "Loudness",
            Category::VoiceSource => "Voice source",
            Category::OtherVoiceSource => "Other voice source",
            Category::Harmonicity => "Harmonicity",
            Category::Pitch => "Fundamental frequency or pitch",
            Category::Intensity => "Intensity or energy",
            Category::LowPassIntensity => "Low-pass intensity",
            Category::HighPassIntensity => "High-pass intensity",
            Category::Mfcc => "Mel-frequency cepstral coefficients (MFCC)",
            Category::Formant => "Formant",
            Category::Duration => "Duration",
            Category::Custom => "Custom",
        }
    }

    /// Whether this crate computes the category from audio.
    pub fn extractable(self) -> bool {
        matches!(
            self,
            Category::Pitch
                | Category::Intensity
                | Category::LowPassIntensity
                | Category::HighPassIntensity
                | Category::Mfcc
                | Category::Formant
                | Category::Duration
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureDescriptor {
    pub index: usize,
    pub category: Category,
    /// Row item as it reads in the feature table, e.g. `minima series: mean`.
    pub item: String,
    /// Unique name: `<category key>: <item>`.
    pub name: String,
    pub extractable: bool,
    pub paper_selected_utterance: bool,
    pub paper_selected_segment: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCatalog {
    entries: Vec<FeatureDescriptor>,
    representation: Representation,
    by_name: HashMap<String, usize>,
}

pub const SERIES_GROUPS: [&str; 4] = [
    "minima series",
    "maxima series",
    "durations between local extrema series",
    "series itself",
];

pub const BASE_STATS: [&str; 10] = [
    "mean",
    "max",
    "min",
    "range",
    "var",
    "med",
    "1st quartile",
    "3rd quartile",
    "iqr",
    "mean abs. val. of derivative",
];

pub const PITCH_EXTRA_STATS: [&str; 4] = [
    "skewness",
    "fraction of voiced F0 above mean",
    "range above mean",
    "range below mean",
];

pub const SEGMENT_LENGTH_ITEM: &str = "segment length duration";

const LOUDNESS: [&str; 20] = [
    "mean",
    "25 percentile",
    "50 percentile",
    "75 percentile",
    "25 percentile RMS",
    "50 percentile RMS",
    "75 percentile RMS",
    "msl b1",
    "msl b2",
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
];

const VOICE_SOURCE_PARAMS: [&str; 7] = ["E_e", "γ", "α", "β", "OQ", "ε_o", "ε_c"];

const OTHER_VOICE_SOURCE: [&str; 14] = [
    "jitter_PF",
    "max jitter_PQ",
    "min jitter_PQ",
    "shimmer_PF",
    "max shimmer_PQ",
    "min shimmer_PQ",
    "25 percentile of GNE",
    "median of GNE",
    "75 percentile of GNE",
    "IQR of normalized ΔGNE",
    "25 percentile of PSP",
    "median of PSP",
    "75 percentile of PSP",
    "IQR of normalized ΔPSP",
];

const HARMONICITY: [&str; 14] = [
    "median of intrinsic diss. D_i",
    "range of intrinsic diss. D_i",
    "median of avg. diss.",
    "median of avg. diss. derivative",
    "median of cons. values at interval α_1^c",
    "median of highest cons. interval α_1^c",
    "median of cons. values at interval α_2^c",
    "median of second highest cons. interval α_2^c",
    "median of avg. cons. peak values",
    "median of diss. values at interval α_1^d",
    "median of highest diss. interval α_1^d",
    "median of diss. values at interval α_2^d",
    "median of second highest diss. interval α_2^d",
    "median of avg. diss. peak values",
];

pub(crate) const FORMANT: [&str; 15] = [
    "mean F1", "mean F2", "mean F3", "std F1", "std F2", "std F3", "max F1", "max F2", "max F3",
    "min F1", "min F2", "min F3", "range F1", "range F2", "range F3",
];

pub(crate) const DURATION: [&str; 23] = [
    "mean dur. of aud. segs.",
    "max dur. of aud. segs.",
    "min dur. of aud. segs.",
    "std. of dur. of aud. segs.",
    "mean dur. of inaud. segs.",
    "max dur. of inaud. segs.",
    "min dur. of inaud. segs.",
    "std. of dur. of inaud. segs.",
    "no. of aud. segs.",
    "no. of inaud. segs.",
    "no. of aud. frames",
    "no. of inaud. frames",
    "longest aud. seg.",
    "longest inaud. seg.",
    "ratios of: no. of aud. to inaud. frames",
    "ratios of: no. of aud. to inaud. segs.",
    "ratios of: no. of aud. to total no. of frames",
    "ratios of: no. of aud. to total no. of segs.",
    "ratios of: no. of aud. frames to no. of aud. segs.",
    "ratios of: total duration of aud. segs. to total duration of inaud. segs.",
    "ratios of: duration of aud. segs. to total duration of utterance",
    "ratios of: duration of inaud. segs. to total duration of utterance",
    "ratios of: avg. duration of aud. segs. to avg. duration of inaud. segs.",
];

fn category_items(category: Category) -> Vec<String> {
    let series = |extended: bool| {
        let mut items = Vec::new();
        for (g, group) in SERIES_GROUPS.iter().enumerate() {
            for stat in BASE_STATS {
                items.push(format!("{group}: {stat}"));
            }
            if extended && g == 3 {
                for stat in PITCH_EXTRA_STATS {
                    items.push(format!("{group}: {stat}"));
                }
            }
        }
        items
    };
    let owned = |items: &[&str]| items.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    match category {
        Category::Loudness => owned(&LOUDNESS),
        Category::VoiceSource => VOICE_SOURCE_PARAMS
            .iter()
            .flat_map(|p| {
                [
                    format!("25 percentile of {p}"),
                    format!("median of {p}"),
                    format!("75 percentile of {p}"),
                    format!("IQR of normalized Δ{p}"),
                ]
            })
            .collect(),
        Category::OtherVoiceSource => owned(&OTHER_VOICE_SOURCE),
        Category::Harmonicity => owned(&HARMONICITY),
        Category::Pitch => series(true),
        Category::Intensity
        | Category::LowPassIntensity
        | Category::HighPassIntensity
        | Category::Mfcc => series(false),
        Category::Formant => owned(&FORMANT),
        Category::Duration => owned(&DURATION),
        Category::Custom => Vec::new(),
    }
}

pub fn feature_name(category: Category, item: &str) -> String {
    format!("{}: {}", category.key(), item)
}

/// Builds the full catalog for a representation.
pub fn build_catalog(representation: Representation) -> FeatureCatalog {
    let utterance_flags = super::selected::flags(Representation::Utterance);
    let segment_flags = super::selected::flags(Representation::Segment);
    let mut entries = Vec::new();
    for category in Category::TABLE {
        let items = match (representation, category) {
            (Representation::Segment, Category::Duration) => vec![SEGMENT_LENGTH_ITEM.to_string()],
            _ => category_items(category),
        };
        for item in items {
            let name = feature_name(category, &item);
            entries.push(FeatureDescriptor {
                index: entries.len(),
                category,
                extractable: category.extractable(),
                paper_selected_utterance: utterance_flags.contains(&name),
                paper_selected_segment: segment_flags.contains(&name),
                item,
                name,
            });
        }
    }
    FeatureCatalog::from_entries(entries, representation)
}

impl FeatureCatalog {
    fn from_entries(entries: Vec<FeatureDescriptor>, representation: Representation) -> Self {
        let by_name = entries.iter().map(|e| (e.name.clone(), e.index)).collect();
        FeatureCatalog {
            entries,
            representation,
            by_name,
        }
    }

    /// A catalog over arbitrary feature names (synthetic or external data).
    /// All entries are marked extractable so they can be used freely.
    pub fn custom<S: AsRef<str>>(names: &[S], representation: Representation) -> Result<Self> {
        let mut entries = Vec::with_capacity(names.len());
        let mut seen = std::collections::HashSet::new();
        for (index, name) in names.iter().enumerate() {
            let name = name.as_ref().to_string();
            if name.is_empty() || !seen.insert(name.clone()) {
                return Err(Error::InvalidParameter(format!(
                    "custom catalog names must be unique and nonempty (`{name}`)"
                )));
            }
            entries.push(FeatureDescriptor {
                index,
                category: Category::Custom,
                item: name.clone(),
                name,
                extractable: true,
                paper_selected_utterance: false,
                paper_selected_segment: false,
            });
        }
        Ok(Self::from_entries(entries, representation))
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[FeatureDescriptor] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<&FeatureDescriptor> {
        self.entries.get(index)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.entries[index].name
    }

    pub fn extractable_indices(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.extractable)
            .map(|e| e.index)
            .collect()
    }

    pub fn category_count(&self, category: Category) -> usize {
        self.entries
            .iter()
            .filter(|e| e.category == category)
            .count()
    }

    /// Indices of the features reported as language-independent for the
    /// given representation.
    pub fn paper_selected(&self, representation: Representation) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| match representation {
                Representation::Utterance => e.paper_selected_utterance,
                Representation::Segment => e.paper_selected_segment,
            })
            .map(|e| e.index)
            .collect()
    }

    /// Features selected for both representations.
    pub fn paper_common_core(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.paper_selected_utterance && e.paper_selected_segment)
            .map(|e| e.index)
            .collect()
    }
}
