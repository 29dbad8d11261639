//! Experiment plans: which corpora select features, which only check the
//! result, how labels are aligned, and every selector and classifier knob.
//!
//! ```text
//! seed = 7
//! representation = "utterance"
//! alignments = ["A1", "A2", "A3"]
//!
//! [[selection]]
//! id = "berlin"
//! manifest = "berlin/manifest.csv"
//! features = "berlin/features.csv"
//!
//! [[independent]]
//! id = "babyears"
//! manifest = "babyears/manifest.csv"
//! features = "babyears/features.csv"
//!
//! [ga]
//! runs = 50
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, SvmGrid, DEFAULT_K_CANDIDATES};
use crate::corpusio::{
    build_catalog, ingest_feature_table, load_manifest, AlignmentScheme, FeatureCatalog,
    FeatureMatrix, FoldGrouping, Representation, SchemeId, DEFAULT_FOLDS,
};
use crate::error::{Error, Result};
use crate::select::{BoostParams, GaParams, SffsParams};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSource {
    pub id: String,
    pub manifest: PathBuf,
    pub features: PathBuf,
}

/// Where feature names come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CatalogSource {
    /// The built-in acoustic catalog of the plan's representation.
    #[default]
    Builtin,
    /// A custom catalog made of the first selection corpus's table header
    /// (by sorted id).
    Header,
}

/// An alignment with explicit label maps: `label = "class"` or
/// `label = "drop"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomAlignment {
    pub name: String,
    pub classes: Vec<String>,
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

impl CustomAlignment {
    pub fn to_scheme(&self) -> Result<AlignmentScheme> {
        let mut maps = BTreeMap::new();
        for (corpus, labels) in &self.maps {
            let mut map = BTreeMap::new();
            for (label, target) in labels {
                let class = if target == "drop" {
                    None
                } else {
                    Some(
                        self.classes
                            .iter()
                            .position(|c| c == target)
                            .ok_or_else(|| Error::InvalidAlignment {
                                scheme: self.name.clone(),
                                reason: format!("`{label}` maps to undeclared class `{target}`"),
                            })?,
                    )
                };
                map.insert(label.clone(), class);
            }
            maps.insert(corpus.clone(), map);
        }
        AlignmentScheme::custom(&self.name, self.classes.clone(), maps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentPlan {
    pub seed: u64,
    pub representation: Representation,
    pub catalog: CatalogSource,
    pub folds: usize,
    pub fold_grouping: FoldGrouping,
    pub k_candidates: Vec<usize>,
    /// Largest loss against the full set, in percentage points, that the
    /// final choice tolerates on any corpus and classifier.
    pub delta: f64,
    pub classifiers: Vec<ClassifierKind>,
    /// Standard scheme names (`A1`, `A2`, `A3`) or names of `custom_alignments`.
    pub alignments: Vec<String>,
    pub custom_alignments: Vec<CustomAlignment>,
    pub selection: Vec<CorpusSource>,
    pub independent: Vec<CorpusSource>,
    pub sffs: SffsParams,
    pub ga: GaParams,
    pub boost: BoostParams,
    pub svm: SvmGrid,
    /// Directory relative corpus paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            seed: 0,
            representation: Representation::Utterance,
            catalog: CatalogSource::Builtin,
            folds: DEFAULT_FOLDS,
            fold_grouping: FoldGrouping::Utterance,
            k_candidates: DEFAULT_K_CANDIDATES.to_vec(),
            delta: 3.0,
            classifiers: vec![ClassifierKind::Knn, ClassifierKind::Svm],
            alignments: vec!["A1".into(), "A2".into(), "A3".into()],
            custom_alignments: Vec::new(),
            selection: Vec::new(),
            independent: Vec::new(),
            sffs: SffsParams::default(),
            ga: GaParams::default(),
            boost: BoostParams::default(),
            svm: SvmGrid::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

impl ExperimentPlan {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &path.display().to_string(), base)
    }

    pub fn parse(text: &str, file: &str, base_dir: PathBuf) -> Result<Self> {
        let mut plan: ExperimentPlan = toml::from_str(text).map_err(|e| Error::Parse {
            file: file.to_string(),
            line: e
                .span()
                .map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })?;
        plan.base_dir = base_dir;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_file_string(&self) -> String {
        toml::to_string(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.selection.len() < 2 {
            return bad(format!(
                "need at least 2 selection corpora, got {}",
                self.selection.len()
            ));
        }
        let mut ids = BTreeSet::new();
        for c in self.selection.iter().chain(&self.independent) {
            if !ids.insert(c.id.as_str()) {
                return bad(format!("corpus `{}` listed twice", c.id));
            }
        }
        if self.folds < 2 {
            return bad(format!("folds must be >= 2, got {}", self.folds));
        }
        if self.classifiers.is_empty() {
            return bad("no classifiers".into());
        }
        if self.alignments.is_empty() {
            return bad("no alignments".into());
        }
        if self.k_candidates.is_empty() || self.k_candidates.iter().any(|k| k % 2 == 0) {
            return bad("k candidates must be a non-empty list of odd numbers".into());
        }
        if !(self.delta >= 0.0) {
            return bad(format!("delta must be >= 0, got {}", self.delta));
        }
        let mut names = BTreeSet::new();
        for a in &self.alignments {
            if !names.insert(a.as_str()) {
                return bad(format!("alignment `{a}` listed twice"));
            }
            if matches!(SchemeId::parse(a), SchemeId::Custom(_))
                && !self.custom_alignments.iter().any(|c| &c.name == a)
            {
                return bad(format!("alignment `{a}` is neither standard nor defined"));
            }
        }
        if self.svm.c_values.is_empty()
            || self.svm.gamma_factors.is_empty()
            || self.svm.inner_folds < 2
        {
            return bad("svm grid needs C values, gamma factors and >= 2 inner folds".into());
        }
        self.ga.validate()?;
        if self.boost.rounds == 0 {
            return bad("boost rounds must be >= 1".into());
        }
        Ok(())
    }

    /// Alignment schemes over the selection corpora, in plan order.
    pub fn schemes(&self, selection: &[FeatureMatrix]) -> Result<Vec<AlignmentScheme>> {
        let corpora: Vec<(String, Vec<String>)> = selection
            .iter()
            .map(|m| (m.corpus_id.clone(), m.class_names.clone()))
            .collect();
        self.alignments
            .iter()
            .map(|name| match SchemeId::parse(name) {
                SchemeId::Custom(_) => {
                    let custom = self
                        .custom_alignments
                        .iter()
                        .find(|c| &c.name == name)
                        .expect("validated");
                    custom.to_scheme()
                }
                id => AlignmentScheme::standard(id, &corpora),
            })
            .collect()
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn catalog(&self) -> Result<Arc<FeatureCatalog>> {
        match self.catalog {
            CatalogSource::Builtin => Ok(Arc::new(build_catalog(self.representation))),
            CatalogSource::Header => {
                let first = self
                    .selection
                    .iter()
                    .min_by(|a, b| a.id.cmp(&b.id))
                    .expect("validated");
                let path = self.resolve(&first.features);
                let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                let mut reader = csv::ReaderBuilder::new()
                    .trim(csv::Trim::All)
                    .from_reader(text.as_bytes());
                let header = reader.headers().map_err(|e| Error::Parse {
                    file: path.display().to_string(),
                    line: 1,
                    message: e.to_string(),
                })?;
                let names: Vec<&str> = header
                    .iter()
                    .filter(|h| *h != "utterance_id" && *h != "segment_index")
                    .collect();
                Ok(Arc::new(FeatureCatalog::custom(
                    &names,
                    self.representation,
                )?))
            }
        }
    }

    pub fn load_corpus(
        &self,
        source: &CorpusSource,
        catalog: &Arc<FeatureCatalog>,
    ) -> Result<FeatureMatrix> {
        let load = || -> Result<FeatureMatrix> {
            let manifest = load_manifest(&self.resolve(&source.manifest))?;
            let table = ingest_feature_table(&self.resolve(&source.features), catalog.clone())?;
            let mut m = table.into_matrix(&manifest)?;
            m.corpus_id = source.id.clone();
            Ok(m)
        };
        load().map_err(|e| e.in_corpus(&source.id))
    }

    /// Loads every corpus: (selection, independent), each in plan order.
    pub fn load_corpora(&self) -> Result<(Vec<FeatureMatrix>, Vec<FeatureMatrix>)> {
        let catalog = self.catalog()?;
        let selection = self
            .selection
            .iter()
            .map(|s| self.load_corpus(s, &catalog))
            .collect::<Result<_>>()?;
        let independent = self
            .independent
            .iter()
            .map(|s| self.load_corpus(s, &catalog))
            .collect::<Result<_>>()?;
        Ok((selection, independent))
    }
}
