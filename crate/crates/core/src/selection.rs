//! Procedures that look across covariates: Bayesian FDR selection before and
//! after the planned study, and per-criterion prioritization orders.

use std::collections::{BTreeMap, BTreeSet};

use crate::criteria::{Category, CriterionId, CriterionResult};
use crate::error::{open_unit, Error, Result};

/// Local false discovery rate `1 - π` of one covariate.
#[derive(Debug, Clone, PartialEq)]
pub struct LfdrEntry {
    pub covariate_id: String,
    pub lfdr: f64,
}

impl LfdrEntry {
    pub fn new(covariate_id: impl Into<String>, lfdr: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lfdr) {
            return Err(Error::OutOfRange {
                name: "lfdr",
                range: "[0, 1]",
                value: lfdr,
            });
        }
        Ok(Self {
            covariate_id: covariate_id.into(),
            lfdr,
        })
    }
}

fn ascending(entries: &[LfdrEntry]) -> Vec<&LfdrEntry> {
    let mut sorted: Vec<&LfdrEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| {
        a.lfdr
            .total_cmp(&b.lfdr)
            .then_with(|| a.covariate_id.cmp(&b.covariate_id))
    });
    sorted
}

/// Longest prefix of the ascending-LFDR order whose mean LFDR stays strictly
/// below `level`. Ids are returned in that order.
pub fn bfdr_select(entries: &[LfdrEntry], level: f64) -> Result<Vec<String>> {
    open_unit("bfdr level", level)?;
    let mut selected = Vec::new();
    let mut sum = 0.0;
    for (k, e) in ascending(entries).into_iter().enumerate() {
        sum += e.lfdr;
        if sum / (k + 1) as f64 >= level {
            break;
        }
        selected.push(e.covariate_id.clone());
    }
    Ok(selected)
}

/// Selection status of one covariate before and after the planned study.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfdrOutcome {
    pub covariate_id: String,
    pub selected_before: bool,
    pub selected_after: bool,
}

impl BfdrOutcome {
    /// `None` for the anomalous selected-before-but-not-after case.
    pub fn category(&self) -> Option<Category> {
        match (self.selected_after, self.selected_before) {
            (true, true) => Some(Category::I),
            (true, false) => Some(Category::II),
            (false, false) => Some(Category::III),
            (false, true) => None,
        }
    }

    pub fn is_anomaly(&self) -> bool {
        self.category().is_none()
    }
}

fn id_set(entries: &[LfdrEntry], which: &str) -> Result<BTreeSet<String>> {
    let mut set = BTreeSet::new();
    for e in entries {
        if !set.insert(e.covariate_id.clone()) {
            return Err(Error::MismatchedIds(format!(
                "duplicate id '{}' in {which} list",
                e.covariate_id
            )));
        }
    }
    Ok(set)
}

/// Categorise by comparing the BFDR selections before and after.
/// Outcomes follow the order of `before`.
pub fn bfdr_categorize(
    before: &[LfdrEntry],
    after: &[LfdrEntry],
    level: f64,
) -> Result<Vec<BfdrOutcome>> {
    let ids_before = id_set(before, "before")?;
    let ids_after = id_set(after, "after")?;
    if ids_before != ids_after {
        let diff: Vec<_> = ids_before
            .symmetric_difference(&ids_after)
            .cloned()
            .collect();
        return Err(Error::MismatchedIds(diff.join(", ")));
    }
    let sel_before: BTreeSet<String> = bfdr_select(before, level)?.into_iter().collect();
    let sel_after: BTreeSet<String> = bfdr_select(after, level)?.into_iter().collect();
    Ok(before
        .iter()
        .map(|e| BfdrOutcome {
            covariate_id: e.covariate_id.clone(),
            selected_before: sel_before.contains(&e.covariate_id),
            selected_after: sel_after.contains(&e.covariate_id),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub covariate_id: String,
    pub value: f64,
}

/// Per-criterion prioritization orders.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub orders: BTreeMap<CriterionId, Vec<RankEntry>>,
    /// Covariates in the top `top_k` of every non-empty order, sorted by id.
    pub consensus: Vec<String>,
    pub top_k: usize,
}

impl RankTable {
    pub fn order(&self, criterion: CriterionId) -> &[RankEntry] {
        self.orders.get(&criterion).map_or(&[], Vec::as_slice)
    }

    pub fn top(&self, criterion: CriterionId, k: usize) -> Vec<&str> {
        self.order(criterion)
            .iter()
            .take(k)
            .map(|e| e.covariate_id.as_str())
            .collect()
    }
}

/// Rank covariates by descending criterion value.
///
/// Inapplicable results and covariates the criterion itself places in
/// category I are left out. The BFDR input is not ranked here.
pub fn rank_covariates(results: &[(String, Vec<CriterionResult>)], top_k: usize) -> RankTable {
    let mut orders: BTreeMap<CriterionId, Vec<RankEntry>> = BTreeMap::new();
    for (id, per_criterion) in results {
        for r in per_criterion {
            if r.criterion == CriterionId::BfdrInput || r.category == Category::I {
                continue;
            }
            if let Some(value) = r.value {
                orders.entry(r.criterion).or_default().push(RankEntry {
                    covariate_id: id.clone(),
                    value,
                });
            }
        }
    }
    for list in orders.values_mut() {
        list.sort_by(|a, b| {
            b.value
                .total_cmp(&a.value)
                .then_with(|| a.covariate_id.cmp(&b.covariate_id))
        });
    }

    let mut consensus: Option<BTreeSet<String>> = None;
    for list in orders.values().filter(|l| !l.is_empty()) {
        let top: BTreeSet<String> = list
            .iter()
            .take(top_k)
            .map(|e| e.covariate_id.clone())
            .collect();
        consensus = Some(match consensus {
            None => top,
            Some(acc) => acc.intersection(&top).cloned().collect(),
        });
    }

    RankTable {
        orders,
        consensus: consensus.unwrap_or_default().into_iter().collect(),
        top_k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entries(v: &[(&str, f64)]) -> Vec<LfdrEntry> {
        v.iter()
            .map(|&(id, l)| LfdrEntry::new(id, l).unwrap())
            .collect()
    }

    #[test]
    fn select_all_when_zero() {
        let e = entries(&[("a", 0.0), ("b", 0.0), ("c", 0.0)]);
        assert_eq!(bfdr_select(&e, 0.05).unwrap(), vec!["a", "b", "c"]);
    }

    #[test]
    fn select_none_when_single_entry_too_large() {
        assert!(bfdr_select(&entries(&[("a", 0.05)]), 0.05)
            .unwrap()
            .is_empty());
        assert!(bfdr_select(&entries(&[("a", 0.5)]), 0.05)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn select_prefix_with_running_mean() {
        // means: 0.01, 0.02, 0.04, 0.0675
        let e = entries(&[("d", 0.15), ("a", 0.01), ("c", 0.08), ("b", 0.03)]);
        assert_eq!(bfdr_select(&e, 0.05).unwrap(), vec!["a", "b", "c"]);
    }

    #[test]
    fn ties_break_by_id() {
        let e = entries(&[("z", 0.01), ("m", 0.01), ("q", 0.5)]);
        assert_eq!(bfdr_select(&e, 0.05).unwrap(), vec!["m", "z"]);
    }

    #[test]
    fn categorize_pairs() {
        let before = entries(&[("a", 0.0), ("b", 0.6), ("c", 0.9)]);
        let after = entries(&[("a", 0.0), ("b", 0.01), ("c", 0.9)]);
        let out = bfdr_categorize(&before, &after, 0.05).unwrap();
        let cats: Vec<_> = out.iter().map(|o| o.category()).collect();
        assert_eq!(
            cats,
            vec![Some(Category::I), Some(Category::II), Some(Category::III)]
        );
    }

    #[test]
    fn categorize_flags_anomaly() {
        let before = entries(&[("a", 0.0), ("b", 0.9)]);
        let after = entries(&[("a", 0.9), ("b", 0.9)]);
        let out = bfdr_categorize(&before, &after, 0.05).unwrap();
        assert!(out[0].is_anomaly());
        assert!(!out[1].is_anomaly());
    }

    #[test]
    fn categorize_rejects_mismatched_ids() {
        let before = entries(&[("a", 0.0)]);
        let after = entries(&[("b", 0.0)]);
        assert!(matches!(
            bfdr_categorize(&before, &after, 0.05),
            Err(Error::MismatchedIds(_))
        ));
        let dup = entries(&[("a", 0.0), ("a", 0.1)]);
        assert!(bfdr_categorize(&dup, &dup, 0.05).is_err());
    }

    fn res(c: CriterionId, v: Option<f64>, cat: Category) -> CriterionResult {
        CriterionResult {
            criterion: c,
            value: v,
            category: cat,
        }
    }

    #[test]
    fn ranking_excludes_category_one_and_inapplicable() {
        let input = vec![
            (
                "a".to_string(),
                vec![res(CriterionId::Cp, Some(0.99), Category::I)],
            ),
            (
                "b".to_string(),
                vec![res(CriterionId::Cp, Some(0.5), Category::III)],
            ),
            (
                "c".to_string(),
                vec![res(CriterionId::Cp, Some(0.9), Category::II)],
            ),
            (
                "d".to_string(),
                vec![res(CriterionId::DeltaLogP, None, Category::III)],
            ),
        ];
        let t = rank_covariates(&input, 4);
        assert_eq!(t.top(CriterionId::Cp, 10), vec!["c", "b"]);
        assert!(t.order(CriterionId::DeltaLogP).is_empty());
        assert_eq!(t.consensus, vec!["b", "c"]);
    }

    #[test]
    fn ranking_single_covariate() {
        let input = vec![(
            "x".to_string(),
            vec![res(CriterionId::Kl, Some(1.0), Category::II)],
        )];
        let t = rank_covariates(&input, 4);
        assert_eq!(t.top(CriterionId::Kl, 4), vec!["x"]);
    }
}
