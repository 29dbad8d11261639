use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpusio::FeatureCatalog;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Selector {
    #[serde(rename = "SFFS")]
    Sffs,
    #[serde(rename = "GA")]
    Ga,
    #[serde(rename = "BOOST")]
    Boost,
    #[serde(rename = "COMBINED")]
    Combined,
    #[serde(rename = "FULL")]
    Full,
}

impl Selector {
    pub fn as_str(self) -> &'static str {
        match self {
            Selector::Sffs => "SFFS",
            Selector::Ga => "GA",
            Selector::Boost => "BOOST",
            Selector::Combined => "COMBINED",
            Selector::Full => "FULL",
        }
    }
}

impl FromStr for Selector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SFFS" => Ok(Selector::Sffs),
            "GA" => Ok(Selector::Ga),
            "BOOST" | "BOOSTING" => Ok(Selector::Boost),
            "COMBINED" => Ok(Selector::Combined),
            "FULL" => Ok(Selector::Full),
            other => Err(Error::InvalidParameter(format!(
                "unknown selector `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combination {
    Union,
    Intersection,
}

impl Combination {
    pub fn as_str(self) -> &'static str {
        match self {
            Combination::Union => "union",
            Combination::Intersection => "intersection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub selector: Selector,
    pub alignment: String,
    pub train_corpus: String,
    pub combination: Option<Combination>,
}

impl Provenance {
    pub fn new(selector: Selector, alignment: &str, train_corpus: &str) -> Self {
        Provenance {
            selector,
            alignment: alignment.to_string(),
            train_corpus: train_corpus.to_string(),
            combination: None,
        }
    }
}

/// Distinct catalog indices in selection order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSubset {
    indices: Vec<usize>,
    pub provenance: Provenance,
}

impl FeatureSubset {
    pub fn new(indices: Vec<usize>, width: usize, provenance: Provenance) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seen = HashSet::new();
        for &i in &indices {
            if i >= width {
                return Err(Error::FeatureIndexOutOfRange {
                    index: i,
                    len: width,
                });
            }
            if !seen.insert(i) {
                return Err(Error::InvalidParameter(format!(
                    "feature index {i} repeated in subset"
                )));
            }
        }
        Ok(FeatureSubset {
            indices,
            provenance,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sorted(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    pub fn as_set(&self) -> BTreeSet<usize> {
        self.indices.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.contains(&index)
    }

    /// Same features regardless of order or provenance.
    pub fn same_features(&self, other: &FeatureSubset) -> bool {
        self.sorted() == other.sorted()
    }

    /// Subset file: provenance header lines, then one feature name per line.
    pub fn to_file_string(&self, catalog: &FeatureCatalog) -> String {
        let p = &self.provenance;
        let mut s = format!(
            "# selector={}\n# alignment={}\n# train_corpus={}\n",
            p.selector.as_str(),
            p.alignment,
            p.train_corpus
        );
        if let Some(c) = p.combination {
            s.push_str(&format!("# combination={}\n", c.as_str()));
        }
        for &i in &self.indices {
            s.push_str(catalog.name(i));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, file: &str, catalog: &FeatureCatalog) -> Result<Self> {
        let mut prov = Provenance::new(Selector::Full, "", "");
        let mut indices = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let parse_err = |message: String| Error::Parse {
                file: file.to_string(),
                line: n + 1,
                message,
            };
            let line = line.trim_end_matches('\r');
            if let Some(header) = line.strip_prefix('#') {
                let Some((key, value)) = header.trim().split_once('=') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "selector" => {
                        prov.selector =
                            value.parse().map_err(|e: Error| parse_err(e.to_string()))?
                    }
                    "alignment" => prov.alignment = value.to_string(),
                    "train_corpus" => prov.train_corpus = value.to_string(),
                    "combination" => {
                        prov.combination = Some(match value {
                            "union" => Combination::Union,
                            "intersection" => Combination::Intersection,
                            other => {
                                return Err(parse_err(format!("unknown combination `{other}`")))
                            }
                        })
                    }
                    _ => {}
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let idx = catalog
                .index_of(line.trim())
                .ok_or_else(|| Error::UnknownFeatureName(line.trim().to_string()))?;
            indices.push(idx);
        }
        FeatureSubset::new(indices, catalog.len(), prov)
    }

    pub fn write(&self, path: &Path, catalog: &FeatureCatalog) -> Result<()> {
        fs::write(path, self.to_file_string(catalog)).map_err(|e| Error::io(path, e))
    }
}

pub fn load_subset(path: &Path, catalog: &FeatureCatalog) -> Result<FeatureSubset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    FeatureSubset::parse(&text, &path.display().to_string(), catalog)
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} features ({})",
            self.len(),
            self.provenance.selector.as_str()
        )
    }
}
