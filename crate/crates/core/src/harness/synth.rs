//! Synthetic corpora with planted features: columns informative in every
//! corpus, columns informative only in one corpus, and pure noise.
//!
//! Class means are ±separation/2 per informative column, following rows of
//! a Sylvester-Hadamard matrix (and their negations) so that distinct
//! labels differ in about half of the columns. A label gets the same means
//! on the shared columns in every corpus.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpusio::{
    matrix::validate_matrix, CorpusManifest, FeatureCatalog, FeatureMatrix, FeatureRow,
    ManifestEntry, Representation, COMMON_STATES,
};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::strategy::{CatalogSource, CorpusSource, CustomAlignment, ExperimentPlan, Role};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthCorpus {
    pub id: String,
    /// Native labels; when empty, `classes` generic labels `class0..`.
    #[serde(default)]
    pub labels: Vec<String>,
    #[serde(default)]
    pub classes: Option<usize>,
    #[serde(default = "selection_role")]
    pub role: Role,
    /// Own informative columns; defaults to the spec-wide count for
    /// selection corpora and 0 for independent ones.
    #[serde(default)]
    pub specific: Option<usize>,
    #[serde(default)]
    pub rows: Option<usize>,
}

fn selection_role() -> Role {
    Role::Selection
}

impl SynthCorpus {
    fn new(id: &str, labels: &[&str], role: Role) -> Self {
        SynthCorpus {
            id: id.into(),
            labels: labels.iter().map(|l| l.to_string()).collect(),
            classes: None,
            role,
            specific: None,
            rows: None,
        }
    }

    pub fn label_names(&self) -> Vec<String> {
        if self.labels.is_empty() {
            (0..self.classes.unwrap_or(2))
                .map(|c| format!("class{c}"))
                .collect()
        } else {
            self.labels
                .iter()
                .map(|l| l.trim().to_lowercase())
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    /// Utterances per corpus.
    pub rows: usize,
    pub shared_informative: usize,
    pub corpus_specific_informative: usize,
    pub noise: usize,
    /// Distance between the two levels of an informative column, in
    /// standard deviations.
    pub separation: f64,
    /// More than one gives a segment-level corpus with this many rows per
    /// utterance.
    pub segments_per_utterance: usize,
    pub speakers: usize,
    pub corpora: Vec<SynthCorpus>,
}

impl Default for SynthSpec {
    /// Three selection corpora shaped like a 7-state and two 5-state acted
    /// corpora, plus a 3-state independent corpus.
    fn default() -> Self {
        SynthSpec {
            seed: 0,
            rows: 200,
            shared_informative: 8,
            corpus_specific_informative: 4,
            noise: 10,
            separation: 2.0,
            segments_per_utterance: 1,
            speakers: 10,
            corpora: vec![
                SynthCorpus::new(
                    "syn_a",
                    &[
                        "happy", "sad", "anger", "neutral", "fear", "boredom", "disgust",
                    ],
                    Role::Selection,
                ),
                SynthCorpus::new(
                    "syn_b",
                    &["happy", "sad", "anger", "neutral", "surprise"],
                    Role::Selection,
                ),
                SynthCorpus::new(
                    "syn_c",
                    &["happy", "sad", "anger", "neutral", "fear"],
                    Role::Selection,
                ),
                SynthCorpus::new(
                    "syn_ind",
                    &["approval", "attention", "prohibition"],
                    Role::Independent,
                ),
            ],
        }
    }
}

pub const SHARED_PREFIX: &str = "shared_";
pub const NOISE_PREFIX: &str = "noise_";

/// Hadamard-row code of the `k`-th label over `len` columns, in ±1.
fn code(k: usize, len: usize, labels: usize) -> Vec<f64> {
    let m = len.max(labels.div_ceil(2)).max(1).next_power_of_two();
    let row = k % m;
    let sign = if (k / m) % 2 == 0 { 1.0 } else { -1.0 };
    (0..len)
        .map(|col| {
            if (row & col).count_ones() % 2 == 0 {
                sign
            } else {
                -sign
            }
        })
        .collect()
}

impl SynthSpec {
    pub fn parse(text: &str, file: &str) -> Result<Self> {
        let spec: SynthSpec = toml::from_str(text).map_err(|e| Error::Parse {
            file: file.to_string(),
            line: e
                .span()
                .map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_file_string(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.shared_informative == 0 {
            return bad("shared_informative must be >= 1");
        }
        if !(self.separation >= 0.0) || !self.separation.is_finite() {
            return bad("separation must be a finite number >= 0");
        }
        if self.corpora.is_empty() || self.segments_per_utterance == 0 || self.speakers == 0 {
            return bad("need at least one corpus, one segment per utterance and one speaker");
        }
        let mut ids = BTreeSet::new();
        for c in &self.corpora {
            if !ids.insert(c.id.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "corpus `{}` listed twice",
                    c.id
                )));
            }
            let labels = c.label_names();
            if labels.len() < 2 || labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
                return Err(Error::InvalidConfig(format!(
                    "corpus `{}` needs >= 2 distinct labels",
                    c.id
                )));
            }
            if c.rows.unwrap_or(self.rows) < labels.len() {
                return Err(Error::InvalidConfig(format!(
                    "corpus `{}` has fewer rows than classes",
                    c.id
                )));
            }
        }
        Ok(())
    }

    pub fn representation(&self) -> Representation {
        if self.segments_per_utterance > 1 {
            Representation::Segment
        } else {
            Representation::Utterance
        }
    }

    fn specific_count(&self, c: &SynthCorpus) -> usize {
        c.specific.unwrap_or(match c.role {
            Role::Selection => self.corpus_specific_informative,
            Role::Independent => 0,
        })
    }

    /// Column names: shared, then each corpus's own columns, then noise.
    pub fn feature_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.shared_informative)
            .map(|i| format!("{SHARED_PREFIX}{i}"))
            .collect();
        for c in &self.corpora {
            names.extend((0..self.specific_count(c)).map(|j| format!("{}_specific_{j}", c.id)));
        }
        names.extend((0..self.noise).map(|i| format!("{NOISE_PREFIX}{i}")));
        names
    }

    pub fn catalog(&self) -> Result<FeatureCatalog> {
        FeatureCatalog::custom(&self.feature_names(), self.representation())
    }
}

/// One matrix per corpus of the spec, in spec order.
pub fn synth_corpora(spec: &SynthSpec) -> Result<Vec<(Role, FeatureMatrix)>> {
    spec.validate()?;
    let catalog = Arc::new(spec.catalog()?);
    let width = catalog.len();
    let universe: Vec<String> = spec
        .corpora
        .iter()
        .flat_map(|c| c.label_names())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let selection: Vec<Vec<String>> = spec
        .corpora
        .iter()
        .filter(|c| c.role == Role::Selection)
        .map(|c| c.label_names())
        .collect();
    let everywhere =
        |l: &String| !selection.is_empty() && selection.iter().all(|ls| ls.contains(l));
    let half = spec.separation / 2.0;
    let mut offset = spec.shared_informative;
    let mut out = Vec::new();
    for corpus in &spec.corpora {
        let labels = corpus.label_names();
        let own = spec.specific_count(corpus);
        // Own columns describe the states outside what all selection corpora
        // share; a corpus with nothing else uses them for every state.
        let unique: Vec<usize> = {
            let u: Vec<usize> = (0..labels.len())
                .filter(|&i| !everywhere(&labels[i]))
                .collect();
            if u.is_empty() {
                (0..labels.len()).collect()
            } else {
                u
            }
        };
        let means: Vec<Vec<f64>> = labels
            .iter()
            .enumerate()
            .map(|(ci, label)| {
                let mut m = vec![0.0; width];
                let k = universe
                    .iter()
                    .position(|u| u == label)
                    .expect("label in universe");
                for (f, v) in code(k, spec.shared_informative, universe.len())
                    .into_iter()
                    .enumerate()
                {
                    m[f] = v * half;
                }
                if let Some(pos) = unique.iter().position(|&u| u == ci) {
                    for (j, v) in code(pos, own, unique.len()).into_iter().enumerate() {
                        m[offset + j] = v * half;
                    }
                }
                m
            })
            .collect();
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &format!("synth/{}", corpus.id)));
        let mut rows = Vec::new();
        for i in 0..corpus.rows.unwrap_or(spec.rows) {
            let class = i % labels.len();
            let utterance_id = format!("{}_{i:04}", corpus.id);
            let speaker = format!("spk{}", i % spec.speakers);
            for s in 0..spec.segments_per_utterance {
                let values = means[class]
                    .iter()
                    .map(|&mu| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        mu + z
                    })
                    .collect();
                rows.push(FeatureRow {
                    utterance_id: utterance_id.clone(),
                    segment_index: s,
                    values,
                    class,
                    speaker: speaker.clone(),
                });
            }
        }
        let m = FeatureMatrix {
            corpus_id: corpus.id.clone(),
            representation: spec.representation(),
            catalog: catalog.clone(),
            present: vec![true; width],
            class_names: labels,
            rows,
        };
        validate_matrix(&m)?;
        out.push((corpus.role, m));
        offset += own;
    }
    Ok(out)
}

/// Writes `<id>/manifest.csv` and `<id>/features.csv` per corpus plus a
/// `plan.toml` running the strategy over them; returns the plan path.
pub fn write_synth(spec: &SynthSpec, out_dir: &Path) -> Result<PathBuf> {
    let corpora = synth_corpora(spec)?;
    let mut plan = ExperimentPlan {
        seed: spec.seed,
        representation: spec.representation(),
        catalog: CatalogSource::Header,
        ..Default::default()
    };
    for (role, m) in &corpora {
        let dir = out_dir.join(&m.corpus_id);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut seen = BTreeSet::new();
        let entries = m
            .rows
            .iter()
            .filter(|r| seen.insert(r.utterance_id.clone()))
            .map(|r| ManifestEntry {
                utterance_id: r.utterance_id.clone(),
                audio_path: PathBuf::from(format!("audio/{}.wav", r.utterance_id)),
                label: m.class_names[r.class].clone(),
                speaker: r.speaker.clone(),
            })
            .collect();
        let manifest = CorpusManifest {
            corpus_id: m.corpus_id.clone(),
            labels: m.class_names.clone(),
            synonyms: BTreeMap::new(),
            entries,
            base_dir: dir.clone(),
        };
        let path = dir.join("manifest.csv");
        fs::write(&path, manifest.to_file_string()).map_err(|e| Error::io(&path, e))?;
        m.to_table().write(&dir.join("features.csv"))?;
        let source = CorpusSource {
            id: m.corpus_id.clone(),
            manifest: PathBuf::from(&m.corpus_id).join("manifest.csv"),
            features: PathBuf::from(&m.corpus_id).join("features.csv"),
        };
        match role {
            Role::Selection => plan.selection.push(source),
            Role::Independent => plan.independent.push(source),
        }
    }
    let selection: Vec<&FeatureMatrix> = corpora
        .iter()
        .filter(|(r, _)| *r == Role::Selection)
        .map(|(_, m)| m)
        .collect();
    let standard_fits = selection.iter().all(|m| {
        COMMON_STATES
            .iter()
            .all(|s| m.class_names.iter().any(|l| l == s))
    });
    if !standard_fits {
        // Align on whatever every selection corpus shares.
        let shared: Vec<String> = selection[0]
            .class_names
            .iter()
            .filter(|l| selection.iter().all(|m| m.class_names.contains(l)))
            .cloned()
            .collect();
        let maps = selection
            .iter()
            .map(|m| {
                let map = m
                    .class_names
                    .iter()
                    .map(|l| {
                        (
                            l.clone(),
                            if shared.contains(l) {
                                l.clone()
                            } else {
                                "drop".into()
                            },
                        )
                    })
                    .collect();
                (m.corpus_id.clone(), map)
            })
            .collect();
        plan.alignments = vec!["shared".into()];
        plan.custom_alignments = vec![CustomAlignment {
            name: "shared".into(),
            classes: shared,
            maps,
        }];
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let path = out_dir.join("plan.toml");
    fs::write(&path, plan.to_file_string()).map_err(|e| Error::io(&path, e))?;
    let spec_path = out_dir.join("synth.toml");
    fs::write(&spec_path, spec.to_file_string()).map_err(|e| Error::io(&spec_path, e))?;
    Ok(path)
}
