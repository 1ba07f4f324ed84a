mod support;

use std::path::Path;

use opinion_miner::corpus::{segment_sentences, tokenize, Class, Corpus, ReviewDocument, Segmenter};
use opinion_miner::deps::{parse_dep_str, write_typed, AliasMap, DepGraph, Edge};
use opinion_miner::features::{build_dataset, tf_idf, Attribute, DatasetMode, FeatureVector, PosClass};
use opinion_miner::info_gain::{entropy, information_gain};
use opinion_miner::lexicon::Lexicons;
use opinion_miner::Token;
use proptest::prelude::*;
use support::{brute_force_ig, label_entropy};

const VOCAB: [&str; 14] = [
    "the", "camera", "is", "not", "very", "good", "bad", "battery", "lasts", "long", "I", "love", "it", "zoom",
];

fn sentence_text() -> impl Strategy<Value = String> {
    (prop::collection::vec(0..VOCAB.len(), 1..8), prop::sample::select(vec![".", "!", "?", ""]))
        .prop_map(|(words, end)| {
            let body: Vec<&str> = words.into_iter().map(|i| VOCAB[i]).collect();
            format!("{}{end}", body.join(" "))
        })
}

fn document_text() -> impl Strategy<Value = String> {
    prop::collection::vec(sentence_text(), 1..5).prop_map(|s| s.join(" "))
}

fn corpus() -> impl Strategy<Value = Corpus> {
    prop::collection::vec((document_text(), any::<bool>(), 0..3usize), 1..6).prop_map(|docs| {
        let seg = Segmenter::default();
        let documents = docs
            .into_iter()
            .enumerate()
            .map(|(i, (text, subjective, cat))| {
                let mut d = ReviewDocument::from_text(format!("doc{i}"), format!("cat{cat}"), text, &seg);
                d.label = Some(if subjective { Class::Subjective } else { Class::Objective });
                d
            })
            .collect();
        Corpus::new(documents).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn vectors_stay_in_their_domains(c in corpus()) {
        let lex = Lexicons::default();
        let ds = build_dataset(&c, &lex, DatasetMode::Labeled).unwrap();
        for row in &ds.rows {
            let v = row.vector;
            prop_assert!(v.tf_idf.is_finite() && v.tf_idf >= 0.0);
            prop_assert!([-1, 0, 1].contains(&v.position));
            prop_assert!(v.class_label.is_some());
            for a in Attribute::CATEGORICAL {
                prop_assert!(a.value_index(&v).unwrap() < a.domain_size().unwrap());
            }
        }
    }

    #[test]
    fn dataset_export_is_deterministic(c in corpus()) {
        let lex = Lexicons::default();
        let a = build_dataset(&c, &lex, DatasetMode::Labeled).unwrap();
        let b = build_dataset(&c.clone(), &lex, DatasetMode::Labeled).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert_eq!(a.to_index_tsv(), b.to_index_tsv());
    }

    #[test]
    fn information_gain_bounded_by_class_entropy(c in corpus()) {
        let ds = build_dataset(&c, &Lexicons::default(), DatasetMode::Labeled).unwrap();
        let vectors = ds.vectors();
        prop_assume!(vectors.len() >= 2);
        let labels: Vec<Class> = vectors.iter().map(|v| v.class_label.unwrap()).collect();
        let h = label_entropy(&labels);
        for a in Attribute::ALL {
            let ig = information_gain(&vectors, a).unwrap();
            prop_assert!(ig >= 0.0 && ig <= h + 1e-12, "{a}: {ig} > {h}");
        }
    }

    #[test]
    fn word_counts_sum_to_token_total(c in corpus()) {
        let from_docs: usize = c.documents.iter().map(|d| d.word_count).sum();
        let retokenized: usize = c
            .documents
            .iter()
            .map(|d| segment_sentences(d).iter().map(|s| s.tokens.len()).sum::<usize>())
            .sum();
        prop_assert_eq!(from_docs, c.total_tokens());
        prop_assert_eq!(from_docs, retokenized);
    }

    #[test]
    fn segmenting_a_single_sentence_is_idempotent(text in sentence_text()) {
        let seg = Segmenter::default();
        let once = seg.split(&text);
        prop_assert!(once.len() <= 1);
        for piece in &once {
            prop_assert_eq!(&seg.split(piece), &vec![*piece]);
        }
        prop_assert_eq!(seg.segment("d", &text), seg.segment("d", &text));
    }

    #[test]
    fn tf_idf_decreases_with_document_frequency(f in 1usize..20, extra in 0usize..20, c in 2usize..50) {
        let s = f + extra;
        let mut last = f64::INFINITY;
        for n_f in 1..=c {
            let v = tf_idf(f, s, n_f, c);
            prop_assert!(v < last);
            prop_assert_eq!(v == 0.0, n_f == c);
            last = v;
        }
    }

    #[test]
    fn typed_export_round_trips(
        words in prop::collection::vec(prop::sample::select(VOCAB.to_vec()), 2..10),
        raw_edges in prop::collection::vec((0..4usize, any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..12),
    ) {
        let tags = ["NN", "JJ", "VBZ", "RB"];
        let n = words.len();
        let tokens: Vec<Token> = words.iter().enumerate().map(|(i, w)| Token::new(*w, i, tags[i % 4])).collect();
        let labels = ["nsubj", "amod", "dobj", "advmod"];
        let edges: Vec<Edge> = raw_edges
            .into_iter()
            .map(|(l, h, d)| Edge::new(labels[l], h.index(n) + 1, d.index(n) + 1))
            .collect();
        let g = DepGraph::new("doc7", 3, tokens, edges).unwrap();
        let text = write_typed(std::slice::from_ref(&g));
        let back = parse_dep_str(&text, Path::new("mem"), &AliasMap::empty()).unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0], &g);
        for e in &back[0].edges {
            let mention = format!("-{}", e.head);
            prop_assert!(text.contains(&mention));
            prop_assert!(back[0].token(e.head).is_some() && back[0].token(e.dependent).is_some());
        }
    }
}

fn fv(position: i8, pos: PosClass, negation: bool, modifier: bool, class: Class) -> FeatureVector {
    FeatureVector {
        tf_idf: position as f64 * 0.1 + if negation { 0.05 } else { 0.0 },
        position,
        pos_class: pos,
        seed: opinion_miner::features::Seed::None,
        negation,
        modifier,
        class_label: Some(class),
    }
}

#[test]
fn information_gain_matches_brute_force_on_hand_tables() {
    use Class::*;
    use PosClass::*;
    let table = [
        fv(-1, Adjective, true, false, Subjective),
        fv(0, Noun, false, true, Objective),
        fv(1, Adjective, false, false, Subjective),
        fv(0, Verb, true, true, Objective),
        fv(-1, Noun, false, false, Objective),
        fv(1, Adjective, true, true, Subjective),
        fv(0, Noun, false, false, Objective),
        fv(-1, Adverb, true, false, Subjective),
    ];
    let labels: Vec<Class> = table.iter().map(|v| v.class_label.unwrap()).collect();
    let cases: [(Attribute, Vec<i32>); 5] = [
        (Attribute::Position, table.iter().map(|v| v.position as i32).collect()),
        (Attribute::Pos, table.iter().map(|v| v.pos_class as i32).collect()),
        (Attribute::Negation, table.iter().map(|v| v.negation as i32).collect()),
        (Attribute::Modifier, table.iter().map(|v| v.modifier as i32).collect()),
        // fewer than ten instances: every distinct value is its own bin
        (Attribute::TfIdf, table.iter().map(|v| (v.tf_idf * 100.0).round() as i32).collect()),
    ];
    for (attr, keys) in cases {
        let ig = information_gain(&table, attr).unwrap();
        assert!((ig - brute_force_ig(&keys, &labels)).abs() < 1e-9, "{attr}");
    }

    // perfect predictor: IG = H(class)
    let perfect: Vec<FeatureVector> = labels
        .iter()
        .map(|&c| fv(0, Noun, c == Subjective, false, c))
        .collect();
    let h = entropy(&[4, 4]);
    assert!((information_gain(&perfect, Attribute::Negation).unwrap() - h).abs() < 1e-9);

    // independent attribute: each value splits the classes evenly
    let independent = [
        fv(0, Noun, true, false, Subjective),
        fv(0, Noun, true, false, Objective),
        fv(0, Noun, false, false, Subjective),
        fv(0, Noun, false, false, Objective),
        fv(0, Noun, true, true, Subjective),
        fv(0, Noun, true, true, Objective),
        fv(0, Noun, false, true, Subjective),
        fv(0, Noun, false, true, Objective),
    ];
    assert!(information_gain(&independent, Attribute::Negation).unwrap().abs() < 1e-9);
    assert!(information_gain(&independent, Attribute::Modifier).unwrap().abs() < 1e-9);
}

#[test]
fn tokenizer_word_counts_match_hand_count() {
    assert_eq!(tokenize("I love it!").len(), 4);
}
