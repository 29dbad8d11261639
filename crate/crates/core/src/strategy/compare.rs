use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::corpusio::{Category, FeatureCatalog, Representation};
use crate::select::FeatureSubset;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OverlapCounts {
    pub subset: usize,
    /// Features of the subset among the published utterance-level list.
    pub utterance: usize,
    pub segment: usize,
    pub core: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSummary {
    pub total: OverlapCounts,
    /// Sizes of the published lists within this catalog.
    pub reference: OverlapCounts,
    pub per_category: Vec<(Category, OverlapCounts)>,
}

/// Overlap of `subset` with the published language-independent lists.
pub fn compare_to_paper_subset(subset: &FeatureSubset, catalog: &FeatureCatalog) -> OverlapSummary {
    let utt: BTreeSet<usize> = catalog
        .paper_selected(Representation::Utterance)
        .into_iter()
        .collect();
    let seg: BTreeSet<usize> = catalog
        .paper_selected(Representation::Segment)
        .into_iter()
        .collect();
    let core: BTreeSet<usize> = catalog.paper_common_core().into_iter().collect();
    let count = |ix: &mut dyn Iterator<Item = usize>| {
        let mut c = OverlapCounts::default();
        for i in ix {
            c.subset += 1;
            c.utterance += utt.contains(&i) as usize;
            c.segment += seg.contains(&i) as usize;
            c.core += core.contains(&i) as usize;
        }
        c
    };
    let features = subset.sorted();
    let per_category = Category::TABLE
        .iter()
        .chain([Category::Custom].iter())
        .map(|&cat| {
            let mut it = features
                .iter()
                .copied()
                .filter(|&i| catalog.get(i).is_some_and(|e| e.category == cat));
            (cat, count(&mut it))
        })
        .filter(|(cat, c)| c.subset > 0 || catalog.category_count(*cat) > 0)
        .collect();
    OverlapSummary {
        total: count(&mut features.iter().copied()),
        reference: OverlapCounts {
            subset: 0,
            utterance: utt.len(),
            segment: seg.len(),
            core: core.len(),
        },
        per_category,
    }
}

impl OverlapSummary {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "| Category | Subset | In utterance list | In segment list | In common core |\n",
        );
        out.push_str("|---|---:|---:|---:|---:|\n");
        for (cat, c) in &self.per_category {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                cat.label(),
                c.subset,
                c.utterance,
                c.segment,
                c.core
            );
        }
        let (t, r) = (&self.total, &self.reference);
        let _ = writeln!(
            out,
            "| Total | {} | {}/{} | {}/{} | {}/{} |",
            t.subset, t.utterance, r.utterance, t.segment, r.segment, t.core, r.core
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpusio::build_catalog;
    use crate::select::{Provenance, Selector};

    #[test]
    fn published_lists_against_each_other() {
        let cat = build_catalog(Representation::Utterance);
        let prov = || Provenance::new(Selector::Full, "none", "x");
        let utt = FeatureSubset::new(
            cat.paper_selected(Representation::Utterance),
            cat.len(),
            prov(),
        )
        .unwrap();
        let s = compare_to_paper_subset(&utt, &cat);
        assert_eq!((s.total.utterance, s.reference.utterance), (161, 161));
        assert_eq!(s.total.core, 87);
        let total: usize = s.per_category.iter().map(|(_, c)| c.subset).sum();
        assert_eq!(total, 161);

        let seg_cat = build_catalog(Representation::Segment);
        let seg = FeatureSubset::new(
            seg_cat.paper_selected(Representation::Segment),
            seg_cat.len(),
            prov(),
        )
        .unwrap();
        let s = compare_to_paper_subset(&seg, &seg_cat);
        assert_eq!((s.total.segment, s.reference.segment), (125, 125));
        assert_eq!(s.total.utterance, 87);
        assert!(s.to_markdown().contains("| Total | 125 | 87/"));
    }
}
