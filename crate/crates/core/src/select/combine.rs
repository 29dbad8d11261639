use std::collections::BTreeSet;

use super::criterion::Criterion;
use super::subset::{Combination, FeatureSubset, Provenance, Selector};
use crate::error::{Error, Result};

/// Union (features in order of first appearance) or intersection (in the
/// first subset's order) of two or more subsets.
pub fn combine_subsets(
    subsets: &[&FeatureSubset],
    op: Combination,
    width: usize,
) -> Result<FeatureSubset> {
    if subsets.len() < 2 {
        return Err(Error::TooFewSubsets {
            needed: 2,
            got: subsets.len(),
        });
    }
    let indices: Vec<usize> = match op {
        Combination::Union => {
            let mut seen = BTreeSet::new();
            subsets
                .iter()
                .flat_map(|s| s.indices().iter().copied())
                .filter(|&i| seen.insert(i))
                .collect()
        }
        Combination::Intersection => {
            let sets: Vec<BTreeSet<usize>> = subsets[1..].iter().map(|s| s.as_set()).collect();
            subsets[0]
                .indices()
                .iter()
                .copied()
                .filter(|i| sets.iter().all(|s| s.contains(i)))
                .collect()
        }
    };
    if indices.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let first = &subsets[0].provenance;
    let same = |f: fn(&Provenance) -> &str| {
        let v = f(first);
        if subsets.iter().all(|s| f(&s.provenance) == v) {
            v.to_string()
        } else {
            subsets
                .iter()
                .map(|s| f(&s.provenance).to_string())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect::<Vec<_>>()
                .join("+")
        }
    };
    let provenance = Provenance {
        selector: Selector::Combined,
        alignment: same(|p| p.alignment.as_str()),
        train_corpus: same(|p| p.train_corpus.as_str()),
        combination: Some(op),
    };
    FeatureSubset::new(indices, width, provenance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedChoice {
    pub chosen: FeatureSubset,
    pub union_mean: f64,
    pub intersection_mean: Option<f64>,
}

/// Picks whichever combination scores the higher mean over the test
/// criteria; ties favour the intersection. A missing intersection means
/// the union is taken as is.
pub fn choose_combined(
    union: &FeatureSubset,
    intersection: Option<&FeatureSubset>,
    tests: &[&Criterion],
) -> Result<CombinedChoice> {
    let mean = |s: &FeatureSubset| -> Result<f64> {
        if tests.is_empty() {
            return Ok(0.0);
        }
        let mut total = 0.0;
        for t in tests {
            total += t.score(s.indices())?;
        }
        Ok(total / tests.len() as f64)
    };
    let union_mean = mean(union)?;
    let Some(inter) = intersection else {
        return Ok(CombinedChoice {
            chosen: union.clone(),
            union_mean,
            intersection_mean: None,
        });
    };
    let inter_mean = mean(inter)?;
    let chosen = if inter_mean >= union_mean {
        inter
    } else {
        union
    };
    Ok(CombinedChoice {
        chosen: chosen.clone(),
        union_mean,
        intersection_mean: Some(inter_mean),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn subset(ix: &[usize]) -> FeatureSubset {
        FeatureSubset::new(ix.to_vec(), 50, Provenance::new(Selector::Sffs, "A1", "c")).unwrap()
    }

    #[test]
    fn examples() {
        let (a, b, c) = (subset(&[1, 2, 3]), subset(&[2, 3, 4]), subset(&[3]));
        let i = combine_subsets(&[&a, &b, &c], Combination::Intersection, 50).unwrap();
        assert_eq!(i.indices(), &[3]);
        assert_eq!(i.provenance.combination, Some(Combination::Intersection));
        assert_eq!(i.provenance.selector, Selector::Combined);
        let u = combine_subsets(&[&a, &a], Combination::Union, 50).unwrap();
        assert!(u.same_features(&a));
        assert!(matches!(
            combine_subsets(
                &[&subset(&[1]), &subset(&[2])],
                Combination::Intersection,
                50
            ),
            Err(Error::EmptyIntersection)
        ));
        assert!(matches!(
            combine_subsets(&[&a], Combination::Union, 50),
            Err(Error::TooFewSubsets { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn lattice(sets in prop::collection::vec(prop::collection::btree_set(0usize..50, 1..20), 2..4)) {
            let subs: Vec<FeatureSubset> = sets.iter().map(|s| subset(&s.iter().copied().collect::<Vec<_>>())).collect();
            let refs: Vec<&FeatureSubset> = subs.iter().collect();
            let u = combine_subsets(&refs, Combination::Union, 50).unwrap().as_set();
            let min = sets.iter().map(|s| s.len()).min().unwrap();
            let max = sets.iter().map(|s| s.len()).max().unwrap();
            match combine_subsets(&refs, Combination::Intersection, 50) {
                Ok(i) => {
                    let i = i.as_set();
                    for s in &sets {
                        prop_assert!(i.is_subset(s) && s.is_subset(&u));
                    }
                    prop_assert!(i.len() <= min);
                }
                Err(Error::EmptyIntersection) => {
                    let common = sets.iter().skip(1).fold(sets[0].clone(), |acc, s| &acc & s);
                    prop_assert!(common.is_empty());
                }
                Err(e) => prop_assert!(false, "{e}"),
            }
            prop_assert!(min <= max && max <= u.len());
        }
    }
}
