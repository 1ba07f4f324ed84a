use std::collections::BTreeSet;

use opinion_miner::deps::{DepGraph, Edge};
use opinion_miner::lexicon::WordList;
use opinion_miner::rules::{extract_sentence, Triple};
use opinion_miner::Token;
use proptest::prelude::*;

const TAGS: [&str; 10] = ["NN", "NNS", "NNP", "JJ", "JJR", "VB", "VBZ", "RB", "DT", "IN"];
const WORDS: [&str; 10] = ["battery", "screen", "nice", "great", "the", "it", "has", "really", "very", "lens"];
const LABELS: [&str; 6] = ["nsubj", "dobj", "amod", "nn", "and", "advmod"];

fn stop_words() -> WordList {
    ["the", "it", "has", "great"].into_iter().collect()
}

/// Random graph with at most one `nsubj` per head and at most five `and`
/// dependents per head.
fn graph() -> impl Strategy<Value = DepGraph> {
    (3usize..12)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((0..WORDS.len(), 0..TAGS.len()), n),
                prop::collection::vec((0..LABELS.len(), 1..=n, 1..=n), 0..3 * n),
            )
        })
        .prop_map(|(toks, raw_edges)| {
            let tokens: Vec<Token> = toks
                .iter()
                .enumerate()
                .map(|(i, &(w, t))| Token::new(WORDS[w], i, TAGS[t]))
                .collect();
            let mut edges: Vec<Edge> = Vec::new();
            for (l, h, d) in raw_edges {
                if h == d {
                    continue;
                }
                let label = LABELS[l];
                let same = |e: &&Edge| e.label == label && e.head == h;
                let count = edges.iter().filter(same).count();
                if (label == "nsubj" && count >= 1) || (label == "and" && count >= 5) {
                    continue;
                }
                edges.push(Edge::new(label, h, d));
            }
            DepGraph::new("doc", 0, tokens, edges).unwrap()
        })
}

fn pair_keys(triples: &[Triple]) -> BTreeSet<(String, String)> {
    triples.iter().map(Triple::pair_key).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn emitted_words_respect_pos_and_stop_words(g in graph()) {
        let stop = stop_words();
        for t in extract_sentence(&g, &stop) {
            let opinion = g.token(t.opinion_index).unwrap();
            prop_assert!(opinion.pos_tag.starts_with("JJ"));
            prop_assert!(!stop.contains(&opinion.normalized));
            for &i in &t.feature_indices {
                let tok = g.token(i).unwrap();
                prop_assert!(tok.pos_tag.starts_with("NN"));
                prop_assert!(!stop.contains(&tok.normalized));
            }
            if let Some(m) = &t.modifier {
                let advs: Vec<&Token> = g
                    .dependents(t.opinion_index, "advmod")
                    .into_iter()
                    .filter_map(|i| g.token(i))
                    .filter(|tok| &tok.surface == m)
                    .collect();
                prop_assert!(advs.iter().any(|tok| tok.pos_tag.starts_with("RB")));
            }
        }
    }

    #[test]
    fn removing_edges_never_adds_pairs(g in graph(), pick in any::<prop::sample::Index>()) {
        let stop = stop_words();
        let before = pair_keys(&extract_sentence(&g, &stop));
        // nn edges are excluded: without a compound the bare head noun is
        // used instead, which is a new (shorter) feature
        let removable: Vec<usize> = (0..g.edges.len()).filter(|&i| g.edges[i].label != "nn").collect();
        prop_assume!(!removable.is_empty());
        let mut smaller = g.clone();
        smaller.edges.remove(removable[pick.index(removable.len())]);
        let after = pair_keys(&extract_sentence(&smaller, &stop));
        prop_assert!(after.is_subset(&before), "new pairs: {:?}", after.difference(&before).collect::<Vec<_>>());
    }

    #[test]
    fn output_is_sorted_and_reproducible(g in graph()) {
        let stop = stop_words();
        let a = extract_sentence(&g, &stop);
        let mut shuffled = g.clone();
        shuffled.edges.reverse();
        prop_assert_eq!(&a, &extract_sentence(&shuffled, &stop));
        let keys: Vec<_> = a.iter().map(|t| (t.rule, t.opinion_index, t.feature_indices.clone())).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        prop_assert_eq!(keys, sorted);
    }
}
