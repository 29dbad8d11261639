//! Per-corpus feature tables and the labelled matrices built from them.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::catalog::{FeatureCatalog, Representation};
use super::manifest::CorpusManifest;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub utterance_id: String,
    pub segment_index: usize,
    /// One value per catalog entry; missing columns hold 0.0.
    pub values: Vec<f64>,
}

/// Unlabelled feature values as read from (or written to) a feature table file.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub catalog: Arc<FeatureCatalog>,
    pub has_segment_index: bool,
    pub present: Vec<bool>,
    pub rows: Vec<TableRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub utterance_id: String,
    pub segment_index: usize,
    pub values: Vec<f64>,
    pub class: usize,
    pub speaker: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub corpus_id: String,
    pub representation: Representation,
    pub catalog: Arc<FeatureCatalog>,
    /// Whether each catalog column carries data.
    pub present: Vec<bool>,
    /// Class names indexed by `FeatureRow::class`.
    pub class_names: Vec<String>,
    pub rows: Vec<FeatureRow>,
}

impl FeatureMatrix {
    /// Utterance-level matrix over a custom catalog `x0..x{d-1}`; each row is
    /// its own utterance and speaker.
    pub fn from_dense(
        corpus_id: &str,
        values: Vec<Vec<f64>>,
        classes: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<FeatureMatrix> {
        let d = values.first().map_or(0, Vec::len);
        let names: Vec<String> = (0..d).map(|i| format!("x{i}")).collect();
        let catalog = Arc::new(FeatureCatalog::custom(&names, Representation::Utterance)?);
        let rows = values
            .into_iter()
            .zip(classes)
            .enumerate()
            .map(|(i, (values, class))| FeatureRow {
                utterance_id: format!("{corpus_id}_{i}"),
                segment_index: 0,
                values,
                class,
                speaker: format!("s{i}"),
            })
            .collect();
        let m = FeatureMatrix {
            corpus_id: corpus_id.to_string(),
            representation: Representation::Utterance,
            catalog,
            present: vec![true; d],
            class_names,
            rows,
        };
        validate_matrix(&m)?;
        Ok(m)
    }

    pub fn width(&self) -> usize {
        self.catalog.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn classes(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.class).collect()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    /// Row count per class id.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.class_names.len()];
        for r in &self.rows {
            h[r.class] += 1;
        }
        h
    }

    pub fn present_indices(&self) -> Vec<usize> {
        (0..self.width()).filter(|&i| self.present[i]).collect()
    }

    /// Fails if any index is out of range or refers to a missing column.
    pub fn check_subset(&self, indices: &[usize]) -> Result<()> {
        for &i in indices {
            if i >= self.width() {
                return Err(Error::FeatureIndexOutOfRange {
                    index: i,
                    len: self.width(),
                });
            }
            if !self.present[i] {
                return Err(Error::MissingFeatureColumn(
                    self.catalog.name(i).to_string(),
                ));
            }
        }
        Ok(())
    }

    /// Row indices grouped by utterance, in first-appearance order.
    pub fn utterance_groups(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<Vec<usize>> = Vec::new();
        let mut pos: HashMap<&str, usize> = HashMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            match pos.get(r.utterance_id.as_str()) {
                Some(&g) => order[g].push(i),
                None => {
                    pos.insert(&r.utterance_id, order.len());
                    order.push(vec![i]);
                }
            }
        }
        order
    }

    pub fn to_table(&self) -> FeatureTable {
        FeatureTable {
            catalog: self.catalog.clone(),
            has_segment_index: self.representation == Representation::Segment,
            present: self.present.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| TableRow {
                    utterance_id: r.utterance_id.clone(),
                    segment_index: r.segment_index,
                    values: r.values.clone(),
                })
                .collect(),
        }
    }
}

impl FeatureTable {
    /// Joins labels and speakers from the manifest. Class ids index the
    /// manifest's declared native labels.
    pub fn into_matrix(self, manifest: &CorpusManifest) -> Result<FeatureMatrix> {
        let by_id: HashMap<&str, _> = manifest
            .entries
            .iter()
            .map(|e| (e.utterance_id.as_str(), e))
            .collect();
        let label_pos: HashMap<&str, usize> = manifest
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in self.rows {
            let entry = by_id
                .get(r.utterance_id.as_str())
                .ok_or_else(|| Error::UnknownUtterance(r.utterance_id.clone()))?;
            rows.push(FeatureRow {
                class: label_pos[entry.label.as_str()],
                speaker: entry.speaker.clone(),
                utterance_id: r.utterance_id,
                segment_index: r.segment_index,
                values: r.values,
            });
        }
        Ok(FeatureMatrix {
            corpus_id: manifest.corpus_id.clone(),
            representation: self.catalog.representation(),
            catalog: self.catalog,
            present: self.present,
            class_names: manifest.labels.clone(),
            rows,
        })
    }

    /// CSV rendering: `utterance_id[,segment_index],<present feature names...>`.
    pub fn to_csv_string(&self) -> String {
        let cols: Vec<usize> = (0..self.catalog.len())
            .filter(|&i| self.present[i])
            .collect();
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let mut header = vec!["utterance_id".to_string()];
        if self.has_segment_index {
            header.push("segment_index".into());
        }
        header.extend(cols.iter().map(|&c| self.catalog.name(c).to_string()));
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![r.utterance_id.clone()];
            if self.has_segment_index {
                rec.push(r.segment_index.to_string());
            }
            rec.extend(cols.iter().map(|&c| format!("{}", r.values[c])));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }
}

pub fn ingest_feature_table(path: &Path, catalog: Arc<FeatureCatalog>) -> Result<FeatureTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_feature_table(&text, &path.display().to_string(), catalog)
}

pub fn parse_feature_table(
    text: &str,
    file: &str,
    catalog: Arc<FeatureCatalog>,
) -> Result<FeatureTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            file: file.to_string(),
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.get(0) != Some("utterance_id") {
        return Err(Error::Parse {
            file: file.to_string(),
            line: 1,
            message: "first column must be `utterance_id`".into(),
        });
    }
    let has_segment_index = headers.get(1) == Some("segment_index");
    let first_feature = if has_segment_index { 2 } else { 1 };
    let mut columns = Vec::new();
    let mut present = vec![false; catalog.len()];
    for name in headers.iter().skip(first_feature) {
        let idx = catalog
            .index_of(name)
            .ok_or_else(|| Error::UnknownFeatureName(name.to_string()))?;
        if present[idx] {
            return Err(Error::Parse {
                file: file.to_string(),
                line: 1,
                message: format!("column `{name}` repeated"),
            });
        }
        present[idx] = true;
        columns.push(idx);
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::Parse {
            file: file.to_string(),
            line,
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(Error::RowLengthMismatch {
                line,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let segment_index = if has_segment_index {
            record[1]
                .parse::<usize>()
                .map_err(|_| Error::NonNumericValue {
                    line,
                    column: "segment_index".into(),
                    value: record[1].to_string(),
                })?
        } else {
            0
        };
        let mut values = vec![0.0; catalog.len()];
        for (k, &idx) in columns.iter().enumerate() {
            let raw = &record[first_feature + k];
            let v: f64 = raw
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::NonNumericValue {
                    line,
                    column: catalog.name(idx).to_string(),
                    value: raw.to_string(),
                })?;
            values[idx] = v;
        }
        rows.push(TableRow {
            utterance_id: record[0].to_string(),
            segment_index,
            values,
        });
    }
    Ok(FeatureTable {
        catalog,
        has_segment_index,
        present,
        rows,
    })
}

/// Checks that segment rows of one utterance share a label and that values
/// are finite.
pub fn validate_matrix(m: &FeatureMatrix) -> Result<()> {
    let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &m.rows {
        if r.values.len() != m.width() {
            return Err(Error::DimensionMismatch {
                expected: m.width(),
                found: r.values.len(),
            });
        }
        if let Some(v) = r.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite value {v} in utterance `{}`",
                r.utterance_id
            )));
        }
        if let Some(&c) = labels.get(r.utterance_id.as_str()) {
            if c != r.class {
                return Err(Error::InvalidParameter(format!(
                    "segments of utterance `{}` carry different labels",
                    r.utterance_id
                )));
            }
        } else {
            labels.insert(&r.utterance_id, r.class);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpusio::catalog::build_catalog;

    fn utt_catalog() -> Arc<FeatureCatalog> {
        Arc::new(build_catalog(Representation::Utterance))
    }

    fn full_table_text(cat: &FeatureCatalog, rows: usize) -> String {
        let mut s = String::from("utterance_id");
        for e in cat.entries() {
            s.push(',');
            s.push_str(&e.name);
        }
        s.push('\n');
        for r in 0..rows {
            s.push_str(&format!("u{r}"));
            for i in 0..cat.len() {
                s.push_str(&format!(",{}", (r * 1000 + i) as f64 * 0.5));
            }
            s.push('\n');
        }
        s
    }

    #[test]
    fn full_width_table() {
        let cat = utt_catalog();
        let t = parse_feature_table(&full_table_text(&cat, 3), "t", cat.clone()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| r.values.len() == 318));
        assert!(t.present.iter().all(|&p| p));
        assert_eq!(t.rows[1].values[5], (1005.0) * 0.5);
    }

    #[test]
    fn unknown_column_rejected() {
        let cat = utt_catalog();
        let text = "utterance_id,not_a_feature\nu1,1.0\n";
        assert!(matches!(
            parse_feature_table(text, "t", cat),
            Err(Error::UnknownFeatureName(n)) if n == "not_a_feature"
        ));
    }

    #[test]
    fn non_numeric_and_short_rows_rejected() {
        let cat = utt_catalog();
        let text = "utterance_id,pitch: minima series: mean\nu1,abc\n";
        assert!(matches!(
            parse_feature_table(text, "t", cat.clone()),
            Err(Error::NonNumericValue { line: 2, .. })
        ));
        let text = "utterance_id,pitch: minima series: mean,pitch: minima series: max\nu1,1.0\n";
        assert!(matches!(
            parse_feature_table(text, "t", cat),
            Err(Error::RowLengthMismatch {
                expected: 3,
                found: 2,
                ..
            })
        ));
    }

    #[test]
    fn extractable_only_table_marks_rest_missing() {
        let cat = utt_catalog();
        let ext = cat.extractable_indices();
        let mut text = String::from("utterance_id");
        for &i in &ext {
            text.push(',');
            text.push_str(cat.name(i));
        }
        text.push_str("\nu1");
        for _ in &ext {
            text.push_str(",1.5");
        }
        text.push('\n');
        let t = parse_feature_table(&text, "t", cat.clone()).unwrap();
        assert_eq!(t.present.iter().filter(|&&p| p).count(), 242);
        let manifest = crate::corpusio::manifest::parse_manifest(
            "# corpus_id=c\n# labels=a\nutterance_id,audio_path,label,speaker\nu1,x,a,s\n",
            "m",
            Default::default(),
        )
        .unwrap();
        let m = t.into_matrix(&manifest).unwrap();
        assert!(m.check_subset(&ext).is_ok());
        assert!(matches!(
            m.check_subset(&[0]),
            Err(Error::MissingFeatureColumn(_))
        ));
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let cat = Arc::new(build_catalog(Representation::Segment));
        let mut present = vec![false; cat.len()];
        present[3] = true;
        present[200] = true;
        let mut values = vec![0.0; cat.len()];
        values[3] = 0.1 + 0.2;
        values[200] = -1.234_567_890_123_456_7e-7;
        let t = FeatureTable {
            catalog: cat.clone(),
            has_segment_index: true,
            present,
            rows: vec![TableRow {
                utterance_id: "u".into(),
                segment_index: 4,
                values,
            }],
        };
        let back = parse_feature_table(&t.to_csv_string(), "t", cat).unwrap();
        assert_eq!(back, t);
    }
}
