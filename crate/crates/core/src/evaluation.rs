//! Precision, recall and f-score summaries, ROC points, and gold-pair
//! matching for extraction output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::Class;
use crate::error::{Error, Result};
use crate::rules::Triple;

/// Footer line attached to reports.
pub const ZERO_DIVISION_NOTE: &str = "# metrics with a zero denominator are reported as 0.000";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        ConfusionCounts { tp, fp, fn_, tn: 0 }
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;
    fn add(self, o: Self) -> Self {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRow {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub support: u64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    ratio(2.0 * p * r, p + r)
}

/// Support is `tp + fn`, the number of true instances.
pub fn prf(c: ConfusionCounts) -> MetricRow {
    let (tp, fp, fn_) = (c.tp as f64, c.fp as f64, c.fn_ as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    MetricRow {
        precision,
        recall,
        f_score: harmonic(precision, recall),
        support: c.tp + c.fn_,
    }
}

/// Each metric averaged with weight `support / total support`.
pub fn weighted_average(rows: &[MetricRow]) -> Result<MetricRow> {
    let total: u64 = rows.iter().map(|r| r.support).sum();
    if total == 0 {
        return Err(Error::InvalidInput("weighted average over zero total support".into()));
    }
    let w = |f: fn(&MetricRow) -> f64| {
        rows.iter().map(|r| f(r) * r.support as f64).sum::<f64>() / total as f64
    };
    Ok(MetricRow {
        precision: w(|r| r.precision),
        recall: w(|r| r.recall),
        f_score: w(|r| r.f_score),
        support: total,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MacroMode {
    /// Sum the counts, then compute the metrics once.
    #[default]
    Pooled,
    /// Unweighted mean of the per-category metrics.
    Mean,
}

impl std::str::FromStr for MacroMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pooled" => Ok(MacroMode::Pooled),
            "mean" => Ok(MacroMode::Mean),
            _ => Err(Error::InvalidInput(format!("unknown macro mode `{s}`"))),
        }
    }
}

pub fn macro_average(rows: &[ConfusionCounts], mode: MacroMode) -> Result<MetricRow> {
    if rows.is_empty() {
        return Err(Error::InvalidInput("macro average needs at least one row".into()));
    }
    let pooled = rows.iter().copied().fold(ConfusionCounts::default(), |a, b| a + b);
    match mode {
        MacroMode::Pooled => Ok(prf(pooled)),
        MacroMode::Mean => {
            let k = rows.len() as f64;
            let metrics: Vec<MetricRow> = rows.iter().map(|&c| prf(c)).collect();
            Ok(MetricRow {
                precision: metrics.iter().map(|m| m.precision).sum::<f64>() / k,
                recall: metrics.iter().map(|m| m.recall).sum::<f64>() / k,
                f_score: metrics.iter().map(|m| m.f_score).sum::<f64>() / k,
                support: pooled.tp + pooled.fn_,
            })
        }
    }
}

/// One-vs-rest counts for `class` over `(predicted, actual)` pairs.
pub fn class_confusion(pairs: &[(Class, Class)], class: Class) -> ConfusionCounts {
    let mut c = ConfusionCounts::default();
    for &(pred, actual) in pairs {
        match (pred == class, actual == class) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    c
}

/// Per-class rows in `[S, O]` order plus their weighted average.
pub fn classification_report(pairs: &[(Class, Class)]) -> Result<([MetricRow; 2], MetricRow)> {
    let rows = Class::ALL.map(|c| prf(class_confusion(pairs, c)));
    let avg = weighted_average(&rows)?;
    Ok((rows, avg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Predictions scoring at least this are called S. The first point uses +inf.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// Threshold sweep over `(P(S), actual)` at every distinct score, highest
/// first. Starts at (0, 0) and ends at (1, 1).
pub fn roc_points(scored: &[(f64, Class)]) -> Result<Vec<RocPoint>> {
    let pos = scored.iter().filter(|s| s.1 == Class::Subjective).count();
    let neg = scored.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::InvalidInput(
            "ROC needs at least one subjective and one objective instance".into(),
        ));
    }
    let mut sorted: Vec<(f64, Class)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i].0;
        while i < sorted.len() && sorted[i].0 == t {
            match sorted[i].1 {
                Class::Subjective => tp += 1,
                Class::Objective => fp += 1,
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: t,
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    Ok(points)
}

/// Trapezoidal area under an ROC point list.
pub fn auc(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

pub fn format_roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in points {
        let t = if p.threshold.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.6}", p.threshold)
        };
        let _ = writeln!(out, "{t},{:.6},{:.6}", p.fpr, p.tpr);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldPair {
    pub doc_id: String,
    pub feature: String,
    pub opinion: String,
}

/// What a predicted pair must agree on with a gold pair: the feature's word
/// set after case folding, and the opinion.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MatchKey {
    pub feature_words: BTreeSet<String>,
    pub opinion: String,
}

impl MatchKey {
    pub fn new(feature: &str, opinion: &str) -> Self {
        MatchKey {
            feature_words: feature.split_whitespace().map(str::to_lowercase).collect(),
            opinion: opinion.trim().to_lowercase(),
        }
    }
}

pub fn parse_gold_pairs(text: &str, source: &Path) -> Result<Vec<GoldPair>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 || fields.iter().any(|f| f.trim().is_empty()) {
            return Err(Error::parse(
                source,
                i + 1,
                "expected doc_id<TAB>feature<TAB>opinion",
            ));
        }
        out.push(GoldPair {
            doc_id: fields[0].trim().to_string(),
            feature: fields[1].trim().to_string(),
            opinion: fields[2].trim().to_string(),
        });
    }
    Ok(out)
}

pub fn read_gold_pairs(path: &Path) -> Result<Vec<GoldPair>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gold_pairs(&text, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionReport {
    /// Sorted by category.
    pub categories: Vec<(String, ConfusionCounts)>,
    pub macro_row: ConfusionCounts,
}

impl ExtractionReport {
    pub fn macro_metrics(&self, mode: MacroMode) -> Result<MetricRow> {
        let rows: Vec<ConfusionCounts> = self.categories.iter().map(|(_, c)| *c).collect();
        macro_average(&rows, mode)
    }
}

/// Set-based comparison per document: a distinct predicted pair is a TP if
/// the document's gold set holds a matching pair, otherwise an FP; unmatched
/// gold pairs are FNs. Counts roll up by the category `category_of` assigns.
pub fn evaluate_extraction(
    predicted: &[Triple],
    gold: &[GoldPair],
    category_of: impl Fn(&str) -> Option<String>,
) -> Result<ExtractionReport> {
    if gold.is_empty() {
        return Err(Error::InvalidInput("no gold pairs".into()));
    }
    type PerDoc = BTreeMap<String, (BTreeSet<MatchKey>, BTreeSet<MatchKey>)>;
    let mut docs: PerDoc = BTreeMap::new();
    for t in predicted {
        docs.entry(t.doc_id.clone())
            .or_default()
            .0
            .insert(MatchKey::new(&t.feature_text(), &t.opinion));
    }
    for g in gold {
        docs.entry(g.doc_id.clone())
            .or_default()
            .1
            .insert(MatchKey::new(&g.feature, &g.opinion));
    }
    let mut by_category: BTreeMap<String, ConfusionCounts> = BTreeMap::new();
    for (doc, (pred, gold)) in &docs {
        let category = category_of(doc)
            .ok_or_else(|| Error::InvalidInput(format!("document `{doc}` is not in the corpus")))?;
        let tp = pred.intersection(gold).count() as u64;
        let counts = by_category.entry(category).or_default();
        *counts = *counts + ConfusionCounts::new(tp, pred.len() as u64 - tp, gold.len() as u64 - tp);
    }
    let macro_row = by_category
        .values()
        .copied()
        .fold(ConfusionCounts::default(), |a, b| a + b);
    Ok(ExtractionReport {
        categories: by_category.into_iter().collect(),
        macro_row,
    })
}

const EXTRACTION_HEADER: [&str; 7] = ["Product Category", "TP", "FP", "FN", "Precision", "Recall", "F-Score"];

fn extraction_rows(report: &ExtractionReport) -> Vec<[String; 7]> {
    let row = |name: &str, c: ConfusionCounts| {
        let m = prf(c);
        [
            name.to_string(),
            c.tp.to_string(),
            c.fp.to_string(),
            c.fn_.to_string(),
            format!("{:.3}", m.precision),
            format!("{:.3}", m.recall),
            format!("{:.3}", m.f_score),
        ]
    };
    let mut rows: Vec<[String; 7]> = report.categories.iter().map(|(n, c)| row(n, *c)).collect();
    rows.push(row("Macro-Average", report.macro_row));
    rows
}

/// Column-aligned table for people.
pub fn format_extraction_text(report: &ExtractionReport) -> String {
    let header = EXTRACTION_HEADER.map(String::from);
    let rows = extraction_rows(report);
    let mut widths = [0usize; 7];
    for r in std::iter::once(&header).chain(&rows) {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for r in std::iter::once(&header).chain(&rows) {
        let mut line = format!("{:<w$}", r[0], w = widths[0]);
        for (cell, w) in r.iter().zip(widths).skip(1) {
            let _ = write!(line, "  {cell:>w$}");
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let _ = writeln!(out, "{ZERO_DIVISION_NOTE}");
    out
}

/// Tab-separated rows for machines.
pub fn format_extraction_tsv(report: &ExtractionReport) -> String {
    let mut out = String::from("category\ttp\tfp\tfn\tprecision\trecall\tf_score\n");
    for r in extraction_rows(report) {
        let _ = writeln!(out, "{}", r.join("\t"));
    }
    out
}

/// Per-class rows and the weighted average, tab separated.
pub fn format_classification_tsv(rows: &[MetricRow; 2], weighted: &MetricRow) -> String {
    let mut out = String::from("class\tprecision\trecall\tf_score\tsupport\n");
    let names = [Class::Subjective.symbol(), Class::Objective.symbol(), "weighted"];
    for (name, m) in names.iter().zip(rows.iter().chain([weighted])) {
        let _ = writeln!(
            out,
            "{name}\t{:.3}\t{:.3}\t{:.3}\t{}",
            m.precision, m.recall, m.f_score, m.support
        );
    }
    out.push_str(ZERO_DIVISION_NOTE);
    out.push('\n');
    out
}
