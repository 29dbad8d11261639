//! Corpus manifests: which utterances exist, where their audio lives, and
//! what each one is labelled.
//!
//! ```text
//! # corpus_id=berlin
//! # labels=happy;sad;anger;neutral;fear:anxiety:fear/anxiety;boredom;disgust
//! utterance_id,audio_path,label,speaker
//! 03a01Fa,wav/03a01Fa.wav,happy,03
//! ```
//!
//! Each `labels` item is a native label optionally followed by `:`-separated
//! synonyms. Labels compare case-insensitively.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub utterance_id: String,
    pub audio_path: PathBuf,
    pub label: String,
    pub speaker: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub corpus_id: String,
    /// Declared native labels, normalized, in declaration order.
    pub labels: Vec<String>,
    /// Synonym (normalized) to canonical label.
    pub synonyms: BTreeMap<String, String>,
    pub entries: Vec<ManifestEntry>,
    /// Directory the manifest was read from; relative audio paths resolve here.
    pub base_dir: PathBuf,
}

pub fn normalize_label(label: &str) -> String {
    label.trim().to_lowercase()
}

impl CorpusManifest {
    /// Resolves a raw label spelling to its canonical native label.
    pub fn canonical_label(&self, raw: &str) -> Option<&str> {
        let norm = normalize_label(raw);
        if let Some(l) = self.labels.iter().find(|l| **l == norm) {
            return Some(l.as_str());
        }
        self.synonyms.get(&norm).map(String::as_str)
    }

    pub fn entry(&self, utterance_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.utterance_id == utterance_id)
    }

    pub fn audio_path(&self, entry: &ManifestEntry) -> PathBuf {
        if entry.audio_path.is_absolute() {
            entry.audio_path.clone()
        } else {
            self.base_dir.join(&entry.audio_path)
        }
    }

    /// Renders the manifest in its file format.
    pub fn to_file_string(&self) -> String {
        let mut inverse: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (syn, label) in &self.synonyms {
            inverse.entry(label).or_default().push(syn);
        }
        let labels: Vec<String> = self
            .labels
            .iter()
            .map(|l| {
                let mut item = l.clone();
                for syn in inverse.get(l.as_str()).into_iter().flatten() {
                    item.push(':');
                    item.push_str(syn);
                }
                item
            })
            .collect();
        let mut out = format!(
            "# corpus_id={}\n# labels={}\nutterance_id,audio_path,label,speaker\n",
            self.corpus_id,
            labels.join(";")
        );
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\n",
                e.utterance_id,
                e.audio_path.display(),
                e.label,
                e.speaker
            ));
        }
        out
    }
}

pub fn load_manifest(path: &Path) -> Result<CorpusManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_manifest(&text, &path.display().to_string(), base_dir)
}

pub fn parse_manifest(text: &str, file: &str, base_dir: PathBuf) -> Result<CorpusManifest> {
    let parse_err = |line: usize, message: String| Error::Parse {
        file: file.to_string(),
        line,
        message,
    };

    let mut corpus_id = None;
    let mut labels = Vec::new();
    let mut synonyms = BTreeMap::new();
    let mut body_start = 0;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            body_start = i + 1;
            continue;
        }
        let Some(comment) = trimmed.strip_prefix('#') else {
            break;
        };
        body_start = i + 1;
        let Some((key, value)) = comment.split_once('=') else {
            continue;
        };
        match key.trim() {
            "corpus_id" => corpus_id = Some(value.trim().to_string()),
            "labels" => {
                for item in value.split(';').filter(|s| !s.trim().is_empty()) {
                    let mut parts = item.split(':').map(normalize_label);
                    let label = parts.next().unwrap_or_default();
                    if labels.contains(&label) {
                        return Err(parse_err(i + 1, format!("label `{label}` declared twice")));
                    }
                    for syn in parts.filter(|s| !s.is_empty()) {
                        synonyms.insert(syn, label.clone());
                    }
                    labels.push(label);
                }
            }
            _ => {}
        }
    }
    let corpus_id =
        corpus_id.ok_or_else(|| parse_err(1, "missing `# corpus_id=` header".into()))?;
    if labels.is_empty() {
        return Err(parse_err(1, "missing `# labels=` header".into()));
    }

    let body: String = text.lines().skip(body_start).collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(body_start + 1, e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| parse_err(body_start + 1, format!("missing column `{name}`")))
    };
    let (c_id, c_audio, c_label, c_speaker) = (
        col("utterance_id")?,
        col("audio_path")?,
        col("label")?,
        col("speaker")?,
    );

    let mut manifest = CorpusManifest {
        corpus_id,
        labels,
        synonyms,
        entries: Vec::new(),
        base_dir,
    };
    let mut seen = HashSet::new();
    for (row, record) in reader.records().enumerate() {
        let line = body_start + row + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::RowLengthMismatch {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let utterance_id = record[c_id].to_string();
        if !seen.insert(utterance_id.clone()) {
            return Err(Error::DuplicateUtteranceId(utterance_id));
        }
        let label = manifest
            .canonical_label(&record[c_label])
            .ok_or_else(|| Error::UnknownLabel {
                corpus: manifest.corpus_id.clone(),
                label: record[c_label].to_string(),
            })?
            .to_string();
        manifest.entries.push(ManifestEntry {
            utterance_id,
            audio_path: PathBuf::from(&record[c_audio]),
            label,
            speaker: record[c_speaker].to_string(),
        });
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BERLIN: &str = "# corpus_id=berlin\n\
        # labels=happy;sad;anger;neutral;fear:anxiety:fear/anxiety;boredom;disgust\n\
        utterance_id,audio_path,label,speaker\n\
        a,wav/a.wav,Happy,03\n\
        b,wav/b.wav,fear/anxiety,03\n\
        c,/abs/c.wav,boredom,08\n";

    #[test]
    fn parses_three_rows() {
        let m = parse_manifest(BERLIN, "m", PathBuf::from("/data")).unwrap();
        assert_eq!(m.corpus_id, "berlin");
        assert_eq!(m.labels.len(), 7);
        assert_eq!(m.entries.len(), 3);
        assert_eq!(m.entries[0].label, "happy");
        assert_eq!(m.entries[1].label, "fear");
        assert_eq!(
            m.audio_path(&m.entries[0]),
            PathBuf::from("/data/wav/a.wav")
        );
        assert_eq!(m.audio_path(&m.entries[2]), PathBuf::from("/abs/c.wav"));
    }

    #[test]
    fn duplicate_id_rejected() {
        let text = "# corpus_id=x\n# labels=a;b\nutterance_id,audio_path,label,speaker\n\
            u1,p,a,s\nu1,p,b,s\n";
        assert!(matches!(
            parse_manifest(text, "m", PathBuf::new()),
            Err(Error::DuplicateUtteranceId(id)) if id == "u1"
        ));
    }

    #[test]
    fn undeclared_label_rejected() {
        let text = "# corpus_id=x\n# labels=a;b\nutterance_id,audio_path,label,speaker\nu1,p,c,s\n";
        assert!(matches!(
            parse_manifest(text, "m", PathBuf::new()),
            Err(Error::UnknownLabel { .. })
        ));
    }

    #[test]
    fn missing_file_reported() {
        let err = load_manifest(Path::new("/nonexistent/manifest.csv")).unwrap_err();
        assert!(matches!(err, Error::MissingFile(_)));
    }

    #[test]
    fn round_trips_through_file_format() {
        let m = parse_manifest(BERLIN, "m", PathBuf::from("/data")).unwrap();
        let again = parse_manifest(&m.to_file_string(), "m2", PathBuf::from("/data")).unwrap();
        assert_eq!(m, again);
    }
}
