//! Emotional-state alignments: per-corpus maps from native labels onto one
//! shared class set, so that every corpus answers the same question.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::manifest::normalize_label;
use super::matrix::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeId {
    /// States common to all selection corpora only.
    A1,
    /// Activation-style regrouping into three classes.
    A2,
    /// The four common states plus one pooled class for everything else.
    A3,
    Custom(String),
}

impl SchemeId {
    pub fn name(&self) -> &str {
        match self {
            SchemeId::A1 => "A1",
            SchemeId::A2 => "A2",
            SchemeId::A3 => "A3",
            SchemeId::Custom(n) => n,
        }
    }

    pub fn parse(name: &str) -> SchemeId {
        match name.trim() {
            "A1" | "a1" => SchemeId::A1,
            "A2" | "a2" => SchemeId::A2,
            "A3" | "a3" => SchemeId::A3,
            other => SchemeId::Custom(other.to_string()),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const COMMON_STATES: [&str; 4] = ["happy", "sad", "anger", "neutral"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentScheme {
    pub id: SchemeId,
    pub class_names: Vec<String>,
    /// corpus id -> native label -> aligned class id (`None` drops the row).
    pub maps: BTreeMap<String, BTreeMap<String, Option<usize>>>,
}

impl AlignmentScheme {
    /// Builds A1, A2 or A3 for the given corpora and their native label sets.
    pub fn standard(id: SchemeId, corpora: &[(String, Vec<String>)]) -> Result<Self> {
        let common = |l: &str| COMMON_STATES.iter().position(|c| *c == l);
        let (class_names, rule): (Vec<&str>, Box<dyn Fn(&str) -> Option<usize>>) = match id {
            SchemeId::A1 => (COMMON_STATES.to_vec(), Box::new(common)),
            SchemeId::A2 => (
                vec!["happy+anger", "sad+neutral", "other"],
                Box::new(|l: &str| match l {
                    "happy" | "anger" => Some(0),
                    "sad" | "neutral" => Some(1),
                    _ => Some(2),
                }),
            ),
            SchemeId::A3 => (
                vec!["happy", "sad", "anger", "neutral", "pooled"],
                Box::new(move |l: &str| Some(common(l).unwrap_or(4))),
            ),
            SchemeId::Custom(ref name) => {
                return Err(Error::InvalidAlignment {
                    scheme: name.clone(),
                    reason: "custom schemes need explicit maps".into(),
                })
            }
        };
        let maps = corpora
            .iter()
            .map(|(corpus, labels)| {
                let map = labels
                    .iter()
                    .map(|l| {
                        let l = normalize_label(l);
                        let class = rule(&l);
                        (l, class)
                    })
                    .collect();
                (corpus.clone(), map)
            })
            .collect();
        let scheme = AlignmentScheme {
            id,
            class_names: class_names.into_iter().map(String::from).collect(),
            maps,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    /// A scheme with explicit maps; `None` entries drop rows.
    pub fn custom(
        name: &str,
        class_names: Vec<String>,
        maps: BTreeMap<String, BTreeMap<String, Option<usize>>>,
    ) -> Result<Self> {
        let scheme = AlignmentScheme {
            id: SchemeId::Custom(name.to_string()),
            class_names,
            maps: maps
                .into_iter()
                .map(|(c, m)| {
                    (
                        c,
                        m.into_iter()
                            .map(|(l, v)| (normalize_label(&l), v))
                            .collect(),
                    )
                })
                .collect(),
        };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Maps every label of one corpus onto itself.
    pub fn identity(corpus: &str, labels: &[String]) -> Self {
        let map = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (normalize_label(l), Some(i)))
            .collect();
        AlignmentScheme {
            id: SchemeId::Custom("identity".into()),
            class_names: labels.iter().map(|l| normalize_label(l)).collect(),
            maps: BTreeMap::from([(corpus.to_string(), map)]),
        }
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidAlignment {
            scheme: self.id.to_string(),
            reason,
        };
        if self.class_names.len() < 2 {
            return Err(fail("fewer than 2 classes".into()));
        }
        let mut used = vec![false; self.class_count()];
        for (corpus, map) in &self.maps {
            let mut surviving: Vec<usize> = map.values().flatten().copied().collect();
            for &c in &surviving {
                if c >= self.class_count() {
                    return Err(fail(format!("corpus `{corpus}` maps to class {c}")));
                }
                used[c] = true;
            }
            surviving.sort_unstable();
            surviving.dedup();
            if surviving.len() < 2 {
                return Err(fail(format!(
                    "corpus `{corpus}` keeps fewer than 2 classes"
                )));
            }
        }
        if let Some(c) = used.iter().position(|u| !u) {
            return Err(fail(format!("class id {c} is never used")));
        }
        Ok(())
    }

    pub fn covers(&self, corpus: &str) -> bool {
        self.maps.contains_key(corpus)
    }
}

/// Drops rows mapped to `None` and relabels the rest with aligned class ids.
pub fn apply_alignment(matrix: &FeatureMatrix, scheme: &AlignmentScheme) -> Result<FeatureMatrix> {
    let map = scheme
        .maps
        .get(&matrix.corpus_id)
        .ok_or_else(|| Error::InvalidAlignment {
            scheme: scheme.id.to_string(),
            reason: format!("no map for corpus `{}`", matrix.corpus_id),
        })?;
    let mut class_of_native = Vec::with_capacity(matrix.class_names.len());
    for native in &matrix.class_names {
        let target = map
            .get(&normalize_label(native))
            .ok_or_else(|| Error::UnmappedLabel {
                scheme: scheme.id.to_string(),
                corpus: matrix.corpus_id.clone(),
                label: native.clone(),
            })?;
        class_of_native.push(*target);
    }
    let rows: Vec<_> = matrix
        .rows
        .iter()
        .filter_map(|r| {
            class_of_native[r.class].map(|class| {
                let mut row = r.clone();
                row.class = class;
                row
            })
        })
        .collect();
    let mut units = vec![std::collections::BTreeSet::new(); scheme.class_count()];
    for r in &rows {
        units[r.class].insert(r.utterance_id.as_str());
    }
    let live: Vec<usize> = units.iter().map(|u| u.len()).filter(|&n| n > 0).collect();
    let degenerate = |reason: String| Error::DegenerateAlignment {
        scheme: scheme.id.to_string(),
        corpus: matrix.corpus_id.clone(),
        reason,
    };
    if live.len() < 2 {
        return Err(degenerate(format!("{} surviving classes", live.len())));
    }
    if live.iter().any(|&n| n < 2) {
        return Err(degenerate(
            "a surviving class has fewer than 2 utterances".into(),
        ));
    }
    Ok(FeatureMatrix {
        corpus_id: matrix.corpus_id.clone(),
        representation: matrix.representation,
        catalog: matrix.catalog.clone(),
        present: matrix.present.clone(),
        class_names: scheme.class_names.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpusio::catalog::{FeatureCatalog, Representation};
    use crate::corpusio::matrix::FeatureRow;
    use std::sync::Arc;

    fn labels(ls: &[&str]) -> Vec<String> {
        ls.iter().map(|s| s.to_string()).collect()
    }

    fn berlin() -> (String, Vec<String>) {
        (
            "berlin".into(),
            labels(&[
                "happy", "sad", "anger", "neutral", "fear", "boredom", "disgust",
            ]),
        )
    }
    fn des() -> (String, Vec<String>) {
        (
            "des".into(),
            labels(&["happy", "sad", "anger", "neutral", "surprise"]),
        )
    }
    fn gees() -> (String, Vec<String>) {
        (
            "gees".into(),
            labels(&["happy", "sad", "anger", "neutral", "fear"]),
        )
    }

    fn matrix(corpus: &str, class_names: Vec<String>, per_class: usize) -> FeatureMatrix {
        let catalog = Arc::new(FeatureCatalog::custom(&["x"], Representation::Utterance).unwrap());
        let mut rows = Vec::new();
        for c in 0..class_names.len() {
            for i in 0..per_class {
                rows.push(FeatureRow {
                    utterance_id: format!("u{c}_{i}"),
                    segment_index: 0,
                    values: vec![(c * 10 + i) as f64],
                    class: c,
                    speaker: "s".into(),
                });
            }
        }
        FeatureMatrix {
            corpus_id: corpus.into(),
            representation: Representation::Utterance,
            catalog,
            present: vec![true],
            class_names,
            rows,
        }
    }

    #[test]
    fn a1_drops_boredom() {
        let s = AlignmentScheme::standard(SchemeId::A1, &[berlin(), des(), gees()]).unwrap();
        assert_eq!(s.maps["berlin"]["boredom"], None);
        let (id, ls) = berlin();
        let m = matrix(&id, ls, 3);
        let a = apply_alignment(&m, &s).unwrap();
        assert_eq!(a.len(), 12);
        assert_eq!(a.class_names, labels(&COMMON_STATES));
    }

    #[test]
    fn a2_groups_activation() {
        let s = AlignmentScheme::standard(SchemeId::A2, &[berlin(), des(), gees()]).unwrap();
        let b = &s.maps["berlin"];
        assert_eq!(b["happy"], Some(0));
        assert_eq!(b["anger"], Some(0));
        assert_eq!(b["sad"], Some(1));
        assert_eq!(b["neutral"], Some(1));
        assert_eq!(b["disgust"], Some(2));
        assert_eq!(s.class_count(), 3);
    }

    #[test]
    fn a3_pools_fifth_class() {
        let s = AlignmentScheme::standard(SchemeId::A3, &[berlin(), des(), gees()]).unwrap();
        assert_eq!(s.maps["des"]["surprise"], Some(4));
        assert_eq!(s.maps["gees"]["fear"], Some(4));
        for l in ["fear", "boredom", "disgust"] {
            assert_eq!(s.maps["berlin"][l], Some(4));
        }
        for (i, l) in COMMON_STATES.iter().enumerate() {
            assert_eq!(s.maps["berlin"][*l], Some(i));
        }
    }

    #[test]
    fn a1_on_common_only_corpus_drops_nothing() {
        let c = ("c".to_string(), labels(&COMMON_STATES));
        let s = AlignmentScheme::standard(SchemeId::A1, &[c.clone()]).unwrap();
        let m = matrix(&c.0, c.1, 4);
        assert_eq!(apply_alignment(&m, &s).unwrap().len(), m.len());
    }

    #[test]
    fn identity_is_idempotent() {
        let (id, ls) = gees();
        let s = AlignmentScheme::standard(SchemeId::A3, &[(id.clone(), ls.clone())]).unwrap();
        let aligned = apply_alignment(&matrix(&id, ls, 3), &s).unwrap();
        let ident = AlignmentScheme::identity(&id, &aligned.class_names);
        assert_eq!(apply_alignment(&aligned, &ident).unwrap(), aligned);
    }

    #[test]
    fn unmapped_and_degenerate_errors() {
        let s = AlignmentScheme::standard(SchemeId::A1, &[gees()]).unwrap();
        let m = matrix("gees", labels(&["happy", "sad", "joy"]), 3);
        assert!(matches!(
            apply_alignment(&m, &s),
            Err(Error::UnmappedLabel { .. })
        ));

        let m = matrix("gees", labels(&["happy", "fear"]), 3);
        let mut s2 = s.clone();
        s2.maps.get_mut("gees").unwrap().insert("fear".into(), None);
        assert!(matches!(
            apply_alignment(&m, &s2),
            Err(Error::DegenerateAlignment { .. })
        ));
    }

    #[test]
    fn invalid_schemes_rejected() {
        let only_two = ("x".to_string(), labels(&["happy", "boredom"]));
        assert!(AlignmentScheme::standard(SchemeId::A1, &[only_two]).is_err());
        let maps = BTreeMap::from([(
            "c".to_string(),
            BTreeMap::from([("a".to_string(), Some(0)), ("b".to_string(), Some(2))]),
        )]);
        assert!(AlignmentScheme::custom("gap", labels(&["x", "y", "z"]), maps).is_err());
    }
}
