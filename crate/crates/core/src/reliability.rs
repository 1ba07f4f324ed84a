//! Hub/authority reliability scoring of feature-opinion pairs.
//!
//! Pairs and review documents form a bipartite graph, with an edge wherever
//! a pair was extracted from a document (weighted by extraction count).
//! Pairs act as hubs and documents as authorities. After the iteration
//! converges, hub scores are min-max normalized within each product category
//! into a reliability score in [0, 1], and pairs below a threshold are
//! dropped as noise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rules::Triple;

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Case-folded (feature, opinion).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub feature: String,
    pub opinion: String,
}

impl PairKey {
    pub fn new(feature: &str, opinion: &str) -> Self {
        PairKey {
            feature: feature.to_lowercase(),
            opinion: opinion.to_lowercase(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    pub category: String,
    /// Sorted.
    pub pairs: Vec<PairKey>,
    /// Sorted.
    pub documents: Vec<String>,
    /// `(pair index, document index, weight)`.
    pub edges: Vec<(usize, usize, f64)>,
}

/// One pair node per distinct case-folded (feature, opinion); edge weight is
/// the number of times the pair was extracted from the document.
pub fn build_graph(triples: &[Triple], category: &str) -> Result<BipartiteGraph> {
    if triples.is_empty() {
        return Err(Error::InvalidInput(format!(
            "category `{category}` has no triples to score"
        )));
    }
    let mut counts: BTreeMap<(PairKey, &str), usize> = BTreeMap::new();
    for t in triples {
        *counts
            .entry((PairKey::new(&t.feature_text(), &t.opinion), t.doc_id.as_str()))
            .or_default() += 1;
    }
    BipartiteGraph::from_weighted(
        category,
        counts
            .into_iter()
            .map(|((pair, doc), w)| (pair, doc.to_string(), w as f64)),
    )
}

impl BipartiteGraph {
    /// Builds a graph from `(pair, document, weight)` edges; repeated
    /// edges accumulate.
    pub fn from_weighted(
        category: &str,
        edges: impl IntoIterator<Item = (PairKey, String, f64)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(PairKey, String), f64> = BTreeMap::new();
        for (pair, doc, w) in edges {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidInput(format!("edge weight must be positive, got {w}")));
            }
            *acc.entry((pair, doc)).or_default() += w;
        }
        if acc.is_empty() {
            return Err(Error::InvalidInput(format!("category `{category}` has no edges")));
        }
        let mut pairs: Vec<PairKey> = acc.keys().map(|(p, _)| p.clone()).collect();
        pairs.dedup();
        let mut documents: Vec<String> = acc.keys().map(|(_, d)| d.clone()).collect();
        documents.sort();
        documents.dedup();
        let edges = acc
            .into_iter()
            .map(|((p, d), w)| {
                (
                    pairs.binary_search(&p).expect("pair indexed"),
                    documents.binary_search(&d).expect("document indexed"),
                    w,
                )
            })
            .collect();
        Ok(BipartiteGraph {
            category: category.to_string(),
            pairs,
            documents,
            edges,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitsParams {
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for HitsParams {
    fn default() -> Self {
        HitsParams {
            epsilon: DEFAULT_EPSILON,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitsResult {
    /// Indexed like `BipartiteGraph::pairs`.
    pub hubs: Vec<f64>,
    /// Indexed like `BipartiteGraph::documents`.
    pub authorities: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn rescale_by_max(v: &mut [f64]) {
    let max = v.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        v.iter_mut().for_each(|x| *x /= max);
    }
}

/// Synchronous hub/authority rounds starting from all-ones scores.
///
/// Each round computes `auth(d) = Σ w(p,d)·hub(p)` and then
/// `hub(p) = Σ w(p,d)·auth(d)`, and rescales both vectors so their largest
/// entry is 1. Iteration stops once no score moves by `epsilon` or more.
pub fn run_hits(g: &BipartiteGraph, params: HitsParams) -> HitsResult {
    let mut hubs = vec![1.0; g.pairs.len()];
    let mut authorities = vec![1.0; g.documents.len()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        let mut next_auth = vec![0.0; authorities.len()];
        for &(p, d, w) in &g.edges {
            next_auth[d] += w * hubs[p];
        }
        rescale_by_max(&mut next_auth);
        let mut next_hubs = vec![0.0; hubs.len()];
        for &(p, d, w) in &g.edges {
            next_hubs[p] += w * next_auth[d];
        }
        rescale_by_max(&mut next_hubs);

        let change = hubs
            .iter()
            .zip(&next_hubs)
            .chain(authorities.iter().zip(&next_auth))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        hubs = next_hubs;
        authorities = next_auth;
        if change < params.epsilon {
            converged = true;
            break;
        }
    }
    HitsResult {
        hubs,
        authorities,
        iterations,
        converged,
    }
}

/// Min-max normalization onto [0, 1]. When every score is equal the result
/// is all ones.
pub fn reliability_scores(scores: &[f64]) -> Vec<f64> {
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max <= min {
        return vec![1.0; scores.len()];
    }
    scores.iter().map(|s| (s - min) / (max - min)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairScore {
    pub pair: PairKey,
    pub initial_hub: f64,
    pub final_hub: f64,
    pub reliability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentScore {
    pub doc_id: String,
    pub initial_authority: f64,
    pub final_authority: f64,
    pub normalized_authority: f64,
}

/// Scores for one category.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    pub category: String,
    pub pairs: Vec<PairScore>,
    pub documents: Vec<DocumentScore>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn score_graph(g: &BipartiteGraph, params: HitsParams) -> ScoreTable {
    let hits = run_hits(g, params);
    let r = reliability_scores(&hits.hubs);
    let na = reliability_scores(&hits.authorities);
    ScoreTable {
        category: g.category.clone(),
        pairs: g
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| PairScore {
                pair: p.clone(),
                initial_hub: 1.0,
                final_hub: hits.hubs[i],
                reliability: r[i],
            })
            .collect(),
        documents: g
            .documents
            .iter()
            .enumerate()
            .map(|(i, d)| DocumentScore {
                doc_id: d.clone(),
                initial_authority: 1.0,
                final_authority: hits.authorities[i],
                normalized_authority: na[i],
            })
            .collect(),
        iterations: hits.iterations,
        converged: hits.converged,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub kept: Vec<PairScore>,
    pub removed: Vec<PairScore>,
}

/// Keeps pairs with reliability ≥ `threshold`.
pub fn filter_noisy(pairs: &[PairScore], threshold: f64) -> Result<FilterOutcome> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidInput(format!(
            "reliability threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let (kept, removed) = pairs.iter().cloned().partition(|p| p.reliability >= threshold);
    Ok(FilterOutcome { kept, removed })
}

pub const PAIR_REPORT_HEADER: &str = "category\tfeature\topinion\tinitial_hs\tfinal_hs\treliability";
pub const DOCUMENT_REPORT_HEADER: &str = "category\tdoc_id\tinitial_as\tfinal_as\tnormalized_as";

/// Pair rows of one category, highest reliability first.
pub fn ranked_pairs(pairs: &[PairScore]) -> Vec<&PairScore> {
    let mut v: Vec<&PairScore> = pairs.iter().collect();
    v.sort_by(|a, b| b.reliability.total_cmp(&a.reliability).then_with(|| a.pair.cmp(&b.pair)));
    v
}

pub fn format_pair_rows(category: &str, pairs: &[PairScore]) -> String {
    let mut out = String::new();
    for p in ranked_pairs(pairs) {
        let _ = writeln!(
            out,
            "{category}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            p.pair.feature, p.pair.opinion, p.initial_hub, p.final_hub, p.reliability
        );
    }
    out
}

pub fn format_document_rows(table: &ScoreTable) -> String {
    let mut docs: Vec<&DocumentScore> = table.documents.iter().collect();
    docs.sort_by(|a, b| {
        b.normalized_authority
            .total_cmp(&a.normalized_authority)
            .then_with(|| a.doc_id.cmp(&b.doc_id))
    });
    let mut out = String::new();
    for d in docs {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            table.category, d.doc_id, d.initial_authority, d.final_authority, d.normalized_authority
        );
    }
    out
}
