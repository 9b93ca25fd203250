//! Corpus and inventory statistics.

pub mod info;
pub mod silhouette;
pub mod stats;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::inventory::{Inventory, TernaryValue};
use crate::stream::{IpaSegment, PhonemeStream};

pub use info::{
    age_bucket, child_directed, info_by_age, info_curve_csv, utterance_information, AgedUtterance, InfoCurvePoint,
    InfoOptions, ModelScope, Smoothing, UnigramModel,
};
pub use silhouette::{silhouette, silhouette_samples, LabeledVectorSet};
pub use stats::binomial_test;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no segment tokens to build a model from")]
    NoSegments,
    #[error("segment {0} has no probability under the model")]
    UnseenSymbol(IpaSegment),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("vector file: {0}")]
    Csv(#[from] csv::Error),
}

/// Segment token counts; boundaries are not counted.
pub fn frequency_table<'a, I>(streams: I) -> BTreeMap<IpaSegment, u64>
where
    I: IntoIterator<Item = &'a PhonemeStream>,
{
    let mut counts = BTreeMap::new();
    for stream in streams {
        for seg in stream.segments() {
            *counts.entry(seg.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// [`frequency_table`] computed on the current rayon pool.
pub fn frequency_table_par(streams: &[PhonemeStream]) -> BTreeMap<IpaSegment, u64> {
    streams
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<IpaSegment, u64>, stream| {
            for seg in stream.segments() {
                *acc.entry(seg.clone()).or_insert(0) += 1;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (seg, n) in b {
                *a.entry(seg).or_insert(0) += n;
            }
            a
        })
}

// combining marks take no column
fn display_width(seg: &IpaSegment) -> usize {
    seg.as_str()
        .chars()
        .filter(|&c| !crate::glyph::is_combining_mark(c))
        .count()
}

/// Count table as aligned text, most frequent first.
pub fn format_frequency_table(counts: &BTreeMap<IpaSegment, u64>) -> String {
    let mut rows: Vec<(&IpaSegment, u64)> = counts.iter().map(|(s, n)| (s, *n)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let total: u64 = rows.iter().map(|r| r.1).sum();
    let width = rows.iter().map(|r| display_width(r.0)).max().unwrap_or(0).max(7);
    let mut out = format!("{:<width$}  {:>10}  {:>8}\n", "segment", "count", "share");
    for (seg, n) in rows {
        let pad = width - display_width(seg);
        out.push_str(&format!(
            "{}{}  {:>10}  {:>8.4}\n",
            seg,
            " ".repeat(pad),
            n,
            n as f64 / total as f64
        ));
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VennReport {
    pub only_a: BTreeSet<IpaSegment>,
    pub both: BTreeSet<IpaSegment>,
    pub only_b: BTreeSet<IpaSegment>,
}

impl VennReport {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.only_a.len(), self.both.len(), self.only_b.len())
    }

    pub fn to_text(&self, name_a: &str, name_b: &str) -> String {
        let join = |s: &BTreeSet<IpaSegment>| s.iter().map(IpaSegment::as_str).collect::<Vec<_>>().join(" ");
        let label_a = format!("only {name_a}");
        let label_b = format!("only {name_b}");
        let width = label_a.len().max(label_b.len()).max(4);
        format!(
            "{:<width$}  {:>4}  {}\n{:<width$}  {:>4}  {}\n{:<width$}  {:>4}  {}\n",
            label_a,
            self.only_a.len(),
            join(&self.only_a),
            "both",
            self.both.len(),
            join(&self.both),
            label_b,
            self.only_b.len(),
            join(&self.only_b),
        )
    }
}

pub fn compare_inventories(a: &BTreeSet<IpaSegment>, b: &BTreeSet<IpaSegment>) -> VennReport {
    VennReport {
        only_a: a.difference(b).cloned().collect(),
        both: a.intersection(b).cloned().collect(),
        only_b: b.difference(a).cloned().collect(),
    }
}

/// Features with at least `min_each` segments marked `+` and at least
/// `min_each` marked `-`. Unspecified values count toward neither side.
pub fn eligible_features(inventory: &Inventory, min_each: usize) -> Vec<String> {
    inventory
        .feature_names()
        .iter()
        .enumerate()
        .filter(|(index, _)| {
            let (mut plus, mut minus) = (0, 0);
            for seg in inventory.segments() {
                match seg.values[*index] {
                    TernaryValue::Plus => plus += 1,
                    TernaryValue::Minus => minus += 1,
                    TernaryValue::Unspecified => {}
                }
            }
            plus >= min_each && minus >= min_each
        })
        .map(|(_, name)| name.clone())
        .collect()
}
