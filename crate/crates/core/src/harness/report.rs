//! Report files: `report.md` with one table per classifier in the layout
//! of the published result tables, `report.csv` with every cell,
//! `chosen_subset.txt` and one subset file per candidate.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::classify::{ClassifierKind, RecognitionRate};
use crate::error::{Error, Result};
use crate::strategy::{rank_order, RankingReport, Role};

/// `mean (std)` to two decimals.
pub fn format_cell(rate: &RecognitionRate) -> String {
    format!("{:.2} ({:.2})", rate.mean, rate.std)
}

/// File-name form of a candidate name: `SFS(A1∩A2)` becomes `sfs_a1_a2`.
pub fn candidate_slug(name: &str) -> String {
    let mut slug = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            slug.push(ch.to_ascii_lowercase());
        } else if !slug.ends_with('_') {
            slug.push('_');
        }
    }
    slug.trim_matches('_').to_string()
}

/// Everything the result tables need, recoverable from `report.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// (name, feature count) in column order.
    pub candidates: Vec<(String, usize)>,
    /// (corpus, role) in row order.
    pub corpora: Vec<(String, Role)>,
    pub classifiers: Vec<ClassifierKind>,
    pub cells: BTreeMap<(usize, String, ClassifierKind), RecognitionRate>,
}

impl ResultTable {
    pub fn from_report(report: &RankingReport) -> Self {
        let corpora = report
            .selection_corpora
            .iter()
            .map(|c| (c.clone(), Role::Selection))
            .chain(
                report
                    .independent_corpora
                    .iter()
                    .map(|c| (c.clone(), Role::Independent)),
            )
            .collect();
        ResultTable {
            candidates: report
                .candidates
                .iter()
                .map(|c| (c.name.clone(), c.subset.len()))
                .collect(),
            corpora,
            classifiers: report.classifiers.clone(),
            cells: report
                .cells
                .iter()
                .map(|c| {
                    (
                        (c.candidate, c.corpus.clone(), c.classifier),
                        c.rate.clone(),
                    )
                })
                .collect(),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "candidate",
            "features",
            "corpus",
            "role",
            "classifier",
            "mean",
            "std",
            "per_fold",
        ])
        .expect("in-memory write");
        for (i, (name, size)) in self.candidates.iter().enumerate() {
            for (corpus, role) in &self.corpora {
                for &k in &self.classifiers {
                    let Some(rate) = self.cells.get(&(i, corpus.clone(), k)) else {
                        continue;
                    };
                    let folds: Vec<String> = rate.per_fold.iter().map(|v| v.to_string()).collect();
                    w.write_record([
                        name.as_str(),
                        &size.to_string(),
                        corpus,
                        role.as_str(),
                        k.as_str(),
                        &rate.mean.to_string(),
                        &rate.std.to_string(),
                        &folds.join(";"),
                    ])
                    .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    pub fn parse_csv(text: &str, file: &str) -> Result<Self> {
        let perr = |line: usize, message: String| Error::Parse {
            file: file.to_string(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut table = ResultTable {
            candidates: Vec::new(),
            corpora: Vec::new(),
            classifiers: Vec::new(),
            cells: BTreeMap::new(),
        };
        for (i, rec) in reader.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| perr(line, e.to_string()))?;
            if rec.len() != 8 {
                return Err(perr(
                    line,
                    format!("expected 8 fields, found {}", rec.len()),
                ));
            }
            let num = |j: usize| -> Result<f64> {
                rec[j]
                    .parse()
                    .map_err(|_| perr(line, format!("`{}` is not a number", &rec[j])))
            };
            let size: usize = rec[1]
                .parse()
                .map_err(|_| perr(line, "bad feature count".into()))?;
            let role = match &rec[3] {
                "selection" => Role::Selection,
                "independent" => Role::Independent,
                other => return Err(perr(line, format!("unknown role `{other}`"))),
            };
            let classifier = match &rec[4] {
                "KNN" => ClassifierKind::Knn,
                "SVM" => ClassifierKind::Svm,
                other => return Err(perr(line, format!("unknown classifier `{other}`"))),
            };
            let per_fold = if rec[7].is_empty() {
                Vec::new()
            } else {
                rec[7]
                    .split(';')
                    .map(|v| {
                        v.parse()
                            .map_err(|_| perr(line, format!("bad fold value `{v}`")))
                    })
                    .collect::<Result<_>>()?
            };
            let cand = match table.candidates.iter().position(|(n, _)| n == &rec[0]) {
                Some(p) => p,
                None => {
                    table.candidates.push((rec[0].to_string(), size));
                    table.candidates.len() - 1
                }
            };
            if !table.corpora.iter().any(|(c, _)| c == &rec[2]) {
                table.corpora.push((rec[2].to_string(), role));
            }
            if !table.classifiers.contains(&classifier) {
                table.classifiers.push(classifier);
            }
            let rate = RecognitionRate {
                mean: num(5)?,
                std: num(6)?,
                per_fold,
            };
            table
                .cells
                .insert((cand, rec[2].to_string(), classifier), rate);
        }
        Ok(table)
    }

    fn corpora_with(&self, role: Role) -> Vec<&str> {
        self.corpora
            .iter()
            .filter(|(_, r)| *r == role)
            .map(|(c, _)| c.as_str())
            .collect()
    }

    /// Markdown tables: per classifier, candidates as columns with a
    /// `Features` row, one row per selection corpus and a rank-sum row;
    /// then the independent corpora, or a note that there are none.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let header = |out: &mut String| {
            out.push_str("| |");
            for (name, _) in &self.candidates {
                let _ = write!(out, " {name} |");
            }
            out.push_str("\n|---|");
            out.push_str(&"---:|".repeat(self.candidates.len()));
            out.push_str("\n| Features |");
            for (_, size) in &self.candidates {
                let _ = write!(out, " {size} |");
            }
            out.push('\n');
        };
        let row = |out: &mut String, label: &str, corpus: &str, k: ClassifierKind| {
            let _ = write!(out, "| {label} |");
            for i in 0..self.candidates.len() {
                match self.cells.get(&(i, corpus.to_string(), k)) {
                    Some(r) => {
                        let _ = write!(out, " {} |", format_cell(r));
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        };
        let selection = self.corpora_with(Role::Selection);
        let sizes: Vec<usize> = self.candidates.iter().map(|(_, s)| *s).collect();
        for &k in &self.classifiers {
            let _ = writeln!(out, "## Recognition rate [mean (std)], {}\n", k.as_str());
            header(&mut out);
            for c in &selection {
                row(&mut out, c, c, k);
            }
            let means: Vec<Vec<f64>> = (0..self.candidates.len())
                .map(|i| {
                    selection
                        .iter()
                        .map(|c| {
                            self.cells
                                .get(&(i, c.to_string(), k))
                                .map_or(f64::NAN, |r| r.mean)
                        })
                        .collect()
                })
                .collect();
            let (sums, _) = rank_order(&means, &sizes);
            out.push_str("| Rank sum |");
            for s in sums {
                let _ = write!(out, " {s} |");
            }
            out.push_str("\n\n");
        }
        let independent = self.corpora_with(Role::Independent);
        if independent.is_empty() {
            out.push_str("No independent corpus was given: no stability check.\n\n");
        } else {
            out.push_str("## Stability check on independent corpora [mean (std)]\n\n");
            header(&mut out);
            for c in &independent {
                for &k in &self.classifiers {
                    row(&mut out, &format!("{c} ({})", k.as_str()), c, k);
                }
            }
            out.push('\n');
        }
        out
    }
}

pub fn report_markdown(report: &RankingReport) -> String {
    let mut out = String::new();
    let chosen = report.chosen_candidate();
    let _ = writeln!(
        out,
        "# Feature subset ranking ({} level)\n",
        report.representation
    );
    let _ = writeln!(
        out,
        "Selection corpora: {}. Independent corpora: {}. Alignments: {}.\n",
        report.selection_corpora.join(", "),
        if report.independent_corpora.is_empty() {
            "none".to_string()
        } else {
            report.independent_corpora.join(", ")
        },
        report.alignments.join(", ")
    );
    let _ = writeln!(
        out,
        "Training corpus: {} (average test score of its rounds: {}).\n",
        report.train_corpus,
        report
            .train_scores
            .iter()
            .map(|(c, v)| format!("{c} {v:.2}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    out.push_str(&ResultTable::from_report(report).to_markdown());
    out.push_str("## Chosen subset\n\n");
    let _ = writeln!(
        out,
        "{} with {} features{}.\n",
        chosen.name,
        chosen.subset.len(),
        if report.chosen_fallback {
            format!(
                "; no candidate stayed within {} points of {} everywhere, so this is the best ranked one",
                report.delta, report.candidates[report.baseline()].name
            )
        } else {
            format!(
                ", the best mean gain over the full set within {} points everywhere",
                report.delta
            )
        }
    );
    out.push_str("## Selection rounds\n\n");
    out.push_str("| Alignment | Training corpus | SFFS | GA | Boosting | Union | Intersection | Kept | Test mean |\n");
    out.push_str("|---|---|---:|---:|---:|---:|---:|---:|---:|\n");
    for r in &report.rounds {
        let size_of = |sel: &str| {
            r.selected
                .iter()
                .find(|s| s.provenance.selector.as_str() == sel)
                .map_or("-".to_string(), |s| s.len().to_string())
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {:.2} |",
            r.alignment,
            r.train_corpus,
            size_of("SFFS"),
            size_of("GA"),
            size_of("BOOST"),
            r.union.len(),
            r.intersection
                .as_ref()
                .map_or("-".to_string(), |s| s.len().to_string()),
            r.chosen.len(),
            r.test_mean
        );
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "KNN k per corpus: {}.\n",
        report
            .knn_k
            .iter()
            .map(|(c, k)| format!("{c} {k}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if !report.notes.is_empty() {
        out.push_str("## Notes\n\n");
        for n in &report.notes {
            let _ = writeln!(out, "- {n}");
        }
    }
    out
}

/// Writes the report files into `out_dir` and returns their paths.
pub fn emit_report(report: &RankingReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let subsets_dir = out_dir.join("subsets");
    fs::create_dir_all(&subsets_dir).map_err(|e| Error::io(&subsets_dir, e))?;
    let mut written = Vec::new();
    let mut put = |path: PathBuf, text: String| -> Result<()> {
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    put(out_dir.join("report.md"), report_markdown(report))?;
    put(
        out_dir.join("report.csv"),
        ResultTable::from_report(report).to_csv_string(),
    )?;
    put(
        out_dir.join("chosen_subset.txt"),
        report.chosen_subset().to_file_string(&report.catalog),
    )?;
    for c in &report.candidates {
        put(
            subsets_dir.join(format!("{}.txt", candidate_slug(&c.name))),
            c.subset.to_file_string(&report.catalog),
        )?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(mean: f64, std: f64) -> RecognitionRate {
        RecognitionRate {
            mean,
            std,
            per_fold: vec![mean - 1.0, mean + 1.0],
        }
    }

    fn table(independent: bool) -> ResultTable {
        let candidates = (0..8).map(|i| (format!("C{i}"), 30 - i)).collect();
        let mut corpora: Vec<(String, Role)> = ["a", "b", "c"]
            .iter()
            .map(|c| (c.to_string(), Role::Selection))
            .collect();
        if independent {
            corpora.push(("ind".into(), Role::Independent));
        }
        let classifiers = vec![ClassifierKind::Knn, ClassifierKind::Svm];
        let mut cells = BTreeMap::new();
        for i in 0..8 {
            for (c, _) in &corpora {
                for &k in &classifiers {
                    cells.insert((i, c.clone(), k), rate(60.0 + i as f64, 2.5));
                }
            }
        }
        ResultTable {
            candidates,
            corpora,
            classifiers,
            cells,
        }
    }

    #[test]
    fn cell_format() {
        assert_eq!(format_cell(&rate(66.719, 4.996)), "66.72 (5.00)");
        assert_eq!(format_cell(&rate(75.7, 2.15)), "75.70 (2.15)");
        assert_eq!(candidate_slug("SFS(A1∩A2∩A3)"), "sfs_a1_a2_a3");
        assert_eq!(candidate_slug("FFS"), "ffs");
    }

    #[test]
    fn csv_rows_and_round_trip() {
        let t = table(true);
        let csv = t.to_csv_string();
        assert_eq!(csv.lines().count(), 1 + 8 * 4 * 2);
        let back = ResultTable::parse_csv(&csv, "r.csv").unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_markdown(), t.to_markdown());
    }

    #[test]
    fn markdown_layout() {
        let md = table(false).to_markdown();
        assert!(md.contains("| Features | 30 | 29 |"));
        assert!(md.contains("| a | 60.00 (2.50) | 61.00 (2.50) |"));
        assert!(md.contains("| Rank sum | 24 | 21 |"));
        assert!(md.contains("no stability check"));
        assert!(!md.contains("Stability check on"));
        assert!(table(true).to_markdown().contains("| ind (SVM) |"));
    }
}
