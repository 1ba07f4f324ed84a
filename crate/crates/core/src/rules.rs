//! Dependency-pattern rules for ⟨feature, modifier, opinion⟩ extraction.
//!
//! Rule 1 handles verb-centred sentences ("Samsung S5830 has a powerful
//! battery"): a nominal subject of a verb, the verb's direct object, and an
//! adjectival modifier of that object. Rule 2 handles copular sentences
//! ("The picture quality is really nice, amazing and awesome"): an
//! adjective with a nominal subject plus up to five `and` conjuncts.
//!
//! POS constraints are prefix matches on Penn tags (`NN*`, `VB*`, `JJ*`,
//! `RB*`). A noun compound `nn(w1, w2)` on the subject yields a two-word
//! feature rendered in sentence order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::deps::{pos_matches, DepGraph};
use crate::error::{Error, Result};
use crate::lexicon::WordList;

/// Maximum number of `and` conjuncts followed from a Rule 2 opinion.
pub const MAX_CONJUNCTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    /// Rule 1: direct object paired with its adjectival modifier.
    R1,
    /// Rule 1: subject-side feature paired with the object's modifier.
    R1Secondary,
    R2,
}

impl RuleId {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::R1 => "R1",
            RuleId::R1Secondary => "R1-secondary",
            RuleId::R2 => "R2",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "R1" => Ok(RuleId::R1),
            "R1-secondary" => Ok(RuleId::R1Secondary),
            "R2" => Ok(RuleId::R2),
            other => Err(format!("unknown rule id `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub doc_id: String,
    pub sentence_index: usize,
    /// Feature words in sentence order (one noun, or a noun compound).
    pub feature: Vec<String>,
    /// 1-based token indices of `feature`; empty for triples read back
    /// from an export.
    pub feature_indices: Vec<usize>,
    pub modifier: Option<String>,
    pub opinion: String,
    /// 1-based; 0 for triples read back from an export.
    pub opinion_index: usize,
    pub rule: RuleId,
}

impl Triple {
    pub fn feature_text(&self) -> String {
        self.feature.join(" ")
    }

    /// Case-folded feature and opinion.
    pub fn pair_key(&self) -> (String, String) {
        (self.feature_text().to_lowercase(), self.opinion.to_lowercase())
    }

    fn sort_key(&self) -> (&str, usize, RuleId, usize, &[usize]) {
        (&self.doc_id, self.sentence_index, self.rule, self.opinion_index, &self.feature_indices)
    }
}

#[derive(Debug, Clone)]
struct Feature {
    indices: Vec<usize>,
}

struct Matcher<'a> {
    g: &'a DepGraph,
    stop: &'a WordList,
}

impl Matcher<'_> {
    fn is(&self, index: usize, prefix: &str) -> bool {
        pos_matches(self.g.pos(index), prefix)
    }

    fn content(&self, index: usize, prefix: &str) -> bool {
        self.is(index, prefix)
            && self
                .g
                .token(index)
                .is_some_and(|t| !self.stop.contains(&t.normalized))
    }

    fn word(&self, index: usize) -> String {
        self.g.token(index).map(|t| t.surface.clone()).unwrap_or_default()
    }

    /// Subject-side features of `head`: noun compounds `nn(w1, w2)` with
    /// `nsubj(head, w1)` if any exist, otherwise plain `nsubj(head, w4)`.
    fn subject_features(&self, head: usize) -> Vec<Feature> {
        let subjects = self.g.dependents(head, "nsubj");
        let compounds: Vec<Feature> = subjects
            .iter()
            .filter(|&&w1| self.content(w1, "NN"))
            .filter_map(|&w1| {
                let mut modifiers = self.g.dependents(w1, "nn");
                modifiers.sort_by_key(|&w2| (w1.abs_diff(w2), w2));
                modifiers
                    .into_iter()
                    .find(|&w2| self.content(w2, "NN"))
                    .map(|w2| {
                        let mut indices = vec![w1, w2];
                        indices.sort_unstable();
                        Feature { indices }
                    })
            })
            .collect();
        if !compounds.is_empty() {
            return compounds;
        }
        subjects
            .into_iter()
            .filter(|&w4| self.content(w4, "NN"))
            .map(|w4| Feature { indices: vec![w4] })
            .collect()
    }

    fn triple(&self, feature: &Feature, opinion: usize, rule: RuleId) -> Triple {
        Triple {
            doc_id: self.g.doc_id.clone(),
            sentence_index: self.g.sentence_index,
            feature: feature.indices.iter().map(|&i| self.word(i)).collect(),
            feature_indices: feature.indices.clone(),
            modifier: None,
            opinion: self.word(opinion),
            opinion_index: opinion,
            rule,
        }
    }

    /// Distinct heads of `nsubj` edges whose tag matches `prefix`.
    fn subject_heads(&self, prefix: &str) -> Vec<usize> {
        let mut heads: Vec<usize> = self
            .g
            .edges_labeled("nsubj")
            .map(|e| e.head)
            .filter(|&h| self.is(h, prefix))
            .collect();
        heads.sort_unstable();
        heads.dedup();
        heads
    }
}

/// Rule 1 over one graph. Modifiers are not attached here.
pub fn apply_rule1(g: &DepGraph, stop_words: &WordList) -> Vec<Triple> {
    let m = Matcher { g, stop: stop_words };
    let mut out = Vec::new();
    for verb in m.subject_heads("VB") {
        let subjects = m.subject_features(verb);
        if subjects.is_empty() {
            continue;
        }
        for object in g.dependents(verb, "dobj") {
            if !m.content(object, "NN") {
                continue;
            }
            for opinion in g.dependents(object, "amod") {
                if !m.content(opinion, "JJ") {
                    continue;
                }
                out.push(m.triple(&Feature { indices: vec![object] }, opinion, RuleId::R1));
                for s in &subjects {
                    out.push(m.triple(s, opinion, RuleId::R1Secondary));
                }
            }
        }
    }
    out
}

/// Rule 2 over one graph. Modifiers are not attached here.
pub fn apply_rule2(g: &DepGraph, stop_words: &WordList) -> Vec<Triple> {
    let m = Matcher { g, stop: stop_words };
    let mut out = Vec::new();
    for adjective in m.subject_heads("JJ") {
        if !m.content(adjective, "JJ") {
            continue;
        }
        let subjects = m.subject_features(adjective);
        let conjuncts: Vec<usize> = g
            .dependents(adjective, "and")
            .into_iter()
            .take(MAX_CONJUNCTS)
            .filter(|&k| m.content(k, "JJ"))
            .collect();
        for s in &subjects {
            out.push(m.triple(s, adjective, RuleId::R2));
            for &k in &conjuncts {
                out.push(m.triple(s, k, RuleId::R2));
            }
        }
    }
    out
}

/// The `advmod` adverb of an opinion word nearest to it, ties going to the
/// lower index.
pub fn attach_modifier(g: &DepGraph, opinion: usize) -> Option<String> {
    g.dependents(opinion, "advmod")
        .into_iter()
        .filter(|&w| pos_matches(g.pos(w), "RB"))
        .min_by_key(|&w| (w.abs_diff(opinion), w))
        .and_then(|w| g.token(w))
        .map(|t| t.surface.clone())
}

/// Both rules over one graph, modifiers attached, duplicates collapsed and
/// output sorted.
pub fn extract_sentence(g: &DepGraph, stop_words: &WordList) -> Vec<Triple> {
    let mut triples = apply_rule1(g, stop_words);
    triples.extend(apply_rule2(g, stop_words));
    for t in &mut triples {
        t.modifier = attach_modifier(g, t.opinion_index);
    }
    finalize(triples)
}

fn finalize(mut triples: Vec<Triple>) -> Vec<Triple> {
    triples.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut seen = HashSet::new();
    triples.retain(|t| {
        let (feature, opinion) = t.pair_key();
        seen.insert((t.doc_id.clone(), t.sentence_index, feature, opinion))
    });
    triples
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Extraction {
    pub triples: Vec<Triple>,
    /// Subjective sentences that had no dependency graph.
    pub skipped: usize,
}

/// Runs the rules over subjective sentences. `None` entries stand for
/// sentences without a parse; they are counted and skipped.
pub fn extract_triples<'a>(
    sentences: impl IntoIterator<Item = Option<&'a DepGraph>>,
    stop_words: &WordList,
) -> Extraction {
    let (graphs, missing): (Vec<_>, Vec<_>) = sentences.into_iter().partition(Option::is_some);
    let triples = graphs
        .par_iter()
        .flat_map_iter(|g| extract_sentence(g.expect("partitioned"), stop_words))
        .collect();
    Extraction {
        triples: finalize(triples),
        skipped: missing.len(),
    }
}

/// `doc_id<TAB>sentence<TAB>feature<TAB>modifier|-<TAB>opinion<TAB>rule_id`
pub fn format_triples(triples: &[Triple]) -> String {
    triples
        .iter()
        .map(|t| {
            format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                t.doc_id,
                t.sentence_index,
                t.feature_text(),
                t.modifier.as_deref().unwrap_or("-"),
                t.opinion,
                t.rule
            )
        })
        .collect()
}

/// Reads a triple export. Token indices are not part of the export and come
/// back empty.
pub fn parse_triples(text: &str) -> Result<Vec<Triple>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let err = |m: &str| Error::parse("<triples>", i + 1, m);
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(err("expected 6 tab-separated fields"));
            }
            Ok(Triple {
                doc_id: f[0].to_string(),
                sentence_index: f[1].parse().map_err(|_| err("bad sentence index"))?,
                feature: f[2].split_whitespace().map(str::to_string).collect(),
                feature_indices: Vec::new(),
                modifier: (f[3] != "-").then(|| f[3].to_string()),
                opinion: f[4].to_string(),
                opinion_index: 0,
                rule: f[5].parse().map_err(|m: String| err(&m))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;
    use crate::deps::Edge;

    /// Builds a graph from `word/TAG` tokens and `(label, head, dep)` edges.
    fn graph(tagged: &str, edges: &[(&str, usize, usize)]) -> DepGraph {
        let tokens = tagged
            .split_whitespace()
            .enumerate()
            .map(|(i, wt)| {
                let (w, t) = wt.rsplit_once('/').unwrap();
                Token::new(w, i, t)
            })
            .collect();
        let edges = edges.iter().map(|&(l, h, d)| Edge::new(l, h, d)).collect();
        DepGraph::new("d", 0, tokens, edges).unwrap()
    }

    fn sentence1() -> DepGraph {
        graph(
            "Samsung/NNP S5830/NNP has/VBZ a/DT powerful/JJ battery/NN ./.",
            &[("nn", 2, 1), ("nsubj", 3, 2), ("det", 6, 4), ("amod", 6, 5), ("dobj", 3, 6)],
        )
    }

    fn sentence2() -> DepGraph {
        graph(
            "The/DT picture/NN quality/NN is/VBZ really/RB nice/JJ ,/, amazing/JJ and/CC awesome/JJ ./.",
            &[
                ("det", 3, 1),
                ("nn", 3, 2),
                ("nsubj", 6, 3),
                ("aux", 6, 4),
                ("advmod", 6, 5),
                ("and", 6, 8),
                ("and", 6, 10),
            ],
        )
    }

    fn stop() -> WordList {
        ["a", "the", "is", "has"].into_iter().collect()
    }

    fn summary(ts: &[Triple]) -> Vec<(String, Option<String>, String, RuleId)> {
        ts.iter()
            .map(|t| (t.feature_text(), t.modifier.clone(), t.opinion.clone(), t.rule))
            .collect()
    }

    #[test]
    fn rule1_on_first_example() {
        let ts = apply_rule1(&sentence1(), &stop());
        let s = summary(&ts);
        assert_eq!(
            s,
            vec![
                ("battery".into(), None, "powerful".into(), RuleId::R1),
                ("Samsung S5830".into(), None, "powerful".into(), RuleId::R1Secondary),
            ]
        );
        assert!(apply_rule2(&sentence1(), &stop()).is_empty());
    }

    #[test]
    fn rule1_needs_an_opinion() {
        let g = graph(
            "Samsung/NNP S5830/NNP has/VBZ a/DT battery/NN",
            &[("nn", 2, 1), ("nsubj", 3, 2), ("dobj", 3, 5)],
        );
        assert!(apply_rule1(&g, &stop()).is_empty());
    }

    #[test]
    fn rule1_object_stop_word_blocks() {
        let mut stop = stop();
        stop = stop.iter().chain(["battery"]).collect();
        assert!(apply_rule1(&sentence1(), &stop).is_empty());
    }

    #[test]
    fn rule1_without_compound_uses_plain_subject() {
        let g = graph(
            "phone/NN has/VBZ bright/JJ screen/NN",
            &[("nsubj", 2, 1), ("dobj", 2, 4), ("amod", 4, 3)],
        );
        let s = summary(&apply_rule1(&g, &stop()));
        assert_eq!(s[1].0, "phone");
        assert_eq!(s[1].3, RuleId::R1Secondary);
    }

    #[test]
    fn rule2_on_second_example() {
        let ts = extract_sentence(&sentence2(), &stop());
        assert_eq!(
            summary(&ts),
            vec![
                ("picture quality".into(), Some("really".into()), "nice".into(), RuleId::R2),
                ("picture quality".into(), None, "amazing".into(), RuleId::R2),
                ("picture quality".into(), None, "awesome".into(), RuleId::R2),
            ]
        );
    }

    #[test]
    fn rule2_minimal() {
        let g = graph("quality/NN nice/JJ", &[("nsubj", 2, 1)]);
        assert_eq!(
            summary(&extract_sentence(&g, &stop())),
            vec![("quality".into(), None, "nice".into(), RuleId::R2)]
        );
    }

    #[test]
    fn rule2_caps_conjuncts_at_five() {
        let mut tagged = String::from("lens/NN sharp/JJ");
        let mut edges = vec![("nsubj", 2, 1)];
        let words = ["clear", "bright", "fast", "light", "solid", "cheap", "tiny"];
        for (i, w) in words.iter().enumerate() {
            tagged.push_str(&format!(" {w}/JJ"));
            edges.push(("and", 2, i + 3));
        }
        let ts = apply_rule2(&graph(&tagged, &edges), &stop());
        let opinions: Vec<&str> = ts.iter().map(|t| t.opinion.as_str()).collect();
        assert_eq!(opinions, ["sharp", "clear", "bright", "fast", "light", "solid"]);
    }

    #[test]
    fn dropping_an_early_conjunct_lets_the_sixth_in() {
        let mut tagged = String::from("lens/NN sharp/JJ");
        let mut edges = vec![("nsubj", 2, 1)];
        for (i, w) in ["clear", "bright", "fast", "light", "solid", "cheap"].iter().enumerate() {
            tagged.push_str(&format!(" {w}/JJ"));
            edges.push(("and", 2, i + 3));
        }
        let full = apply_rule2(&graph(&tagged, &edges), &stop());
        assert!(full.iter().all(|t| t.opinion != "cheap"));
        edges.remove(1);
        let fewer = apply_rule2(&graph(&tagged, &edges), &stop());
        assert!(fewer.iter().any(|t| t.opinion == "cheap"));
    }

    #[test]
    fn dropping_the_compound_edge_falls_back_to_the_head_noun() {
        let mut g = sentence2();
        g.edges.retain(|e| e.label != "nn");
        let features: Vec<String> = extract_sentence(&g, &stop()).iter().map(|t| t.feature_text()).collect();
        assert_eq!(features, ["quality", "quality", "quality"]);
    }

    #[test]
    fn rule2_conjunct_must_be_adjective() {
        let g = graph(
            "screen/NN big/JJ and/CC phone/NN",
            &[("nsubj", 2, 1), ("and", 2, 4)],
        );
        assert_eq!(apply_rule2(&g, &stop()).len(), 1);
    }

    #[test]
    fn nearest_modifier_wins() {
        let g = graph(
            "very/RB ,/, truly/RB good/JJ",
            &[("advmod", 4, 1), ("advmod", 4, 3)],
        );
        assert_eq!(attach_modifier(&g, 4).as_deref(), Some("truly"));
        let g2 = graph("camera/NN good/JJ", &[("nsubj", 2, 1)]);
        assert_eq!(attach_modifier(&g2, 2), None);
        // non-adverb advmod is ignored
        let g3 = graph("here/NN good/JJ", &[("advmod", 2, 1)]);
        assert_eq!(attach_modifier(&g3, 2), None);
    }

    #[test]
    fn missing_graphs_are_counted() {
        let g = sentence2();
        let e = extract_triples([Some(&g), None, None], &stop());
        assert_eq!(e.skipped, 2);
        assert_eq!(e.triples.len(), 3);
        let empty = DepGraph::new("d", 0, vec![], vec![]).unwrap();
        assert!(extract_triples([Some(&empty)], &stop()).triples.is_empty());
    }

    #[test]
    fn export_round_trip() {
        let ts = extract_sentence(&sentence2(), &stop());
        let text = format_triples(&ts);
        assert_eq!(
            text.lines().next().unwrap(),
            "d\t0\tpicture quality\treally\tnice\tR2"
        );
        let back = parse_triples(&text).unwrap();
        assert_eq!(format_triples(&back), text);
        assert!(parse_triples("a\tb\n").is_err());
    }
}
