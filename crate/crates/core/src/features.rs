//! Per-unigram feature vectors and dataset assembly.
//!
//! Each non-stop-word token becomes a six-attribute vector: TF-IDF weight,
//! position in sentence, coarse POS class, seed-word polarity, negation flag
//! and modifier flag, plus the class label of its document when known.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{Class, Corpus, ReviewDocument, Sentence, Token};
use crate::error::{Error, Result};
use crate::lexicon::Lexicons;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PosClass {
    Adjective,
    Adverb,
    Noun,
    Verb,
    Other,
}

impl PosClass {
    pub const ALL: [PosClass; 5] = [
        PosClass::Adjective,
        PosClass::Adverb,
        PosClass::Noun,
        PosClass::Verb,
        PosClass::Other,
    ];

    /// Maps a Penn tag by prefix: JJ* → A, RB* → D, NN* → N, VB* → V.
    pub fn from_penn(tag: &str) -> Self {
        if tag.starts_with("JJ") {
            PosClass::Adjective
        } else if tag.starts_with("RB") {
            PosClass::Adverb
        } else if tag.starts_with("NN") {
            PosClass::Noun
        } else if tag.starts_with("VB") {
            PosClass::Verb
        } else {
            PosClass::Other
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PosClass::Adjective => "A",
            PosClass::Adverb => "D",
            PosClass::Noun => "N",
            PosClass::Verb => "V",
            PosClass::Other => "E",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for PosClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        PosClass::ALL
            .into_iter()
            .find(|p| p.symbol() == s)
            .ok_or_else(|| format!("unknown POS class `{s}`"))
    }
}

/// Seed-word attribute. Words in neither seed list get `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Seed {
    Positive,
    Negative,
    None,
}

impl Seed {
    pub const ALL: [Seed; 3] = [Seed::Positive, Seed::Negative, Seed::None];

    pub fn symbol(self) -> &'static str {
        match self {
            Seed::Positive => "1",
            Seed::Negative => "0",
            Seed::None => "none",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for Seed {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Seed::ALL
            .into_iter()
            .find(|v| v.symbol() == s)
            .ok_or_else(|| format!("unknown seed value `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub tf_idf: f64,
    /// -1 at the beginning of the sentence, 1 at the end, 0 in between.
    pub position: i8,
    pub pos_class: PosClass,
    pub seed: Seed,
    pub negation: bool,
    pub modifier: bool,
    pub class_label: Option<Class>,
}

/// The six attributes, in export column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attribute {
    TfIdf,
    Position,
    Pos,
    Seed,
    Negation,
    Modifier,
}

impl Attribute {
    pub const ALL: [Attribute; 6] = [
        Attribute::TfIdf,
        Attribute::Position,
        Attribute::Pos,
        Attribute::Seed,
        Attribute::Negation,
        Attribute::Modifier,
    ];

    /// The five nominal attributes.
    pub const CATEGORICAL: [Attribute; 5] = [
        Attribute::Position,
        Attribute::Pos,
        Attribute::Seed,
        Attribute::Negation,
        Attribute::Modifier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::TfIdf => "tf_idf",
            Attribute::Position => "position",
            Attribute::Pos => "pos",
            Attribute::Seed => "seed",
            Attribute::Negation => "negation",
            Attribute::Modifier => "modifier",
        }
    }

    /// Size of a nominal attribute's declared domain; `None` for TF-IDF.
    pub fn domain_size(self) -> Option<usize> {
        match self {
            Attribute::TfIdf => None,
            Attribute::Position => Some(3),
            Attribute::Pos => Some(5),
            Attribute::Seed => Some(3),
            Attribute::Negation | Attribute::Modifier => Some(2),
        }
    }

    /// Index of the vector's value within the attribute's domain.
    pub fn value_index(self, fv: &FeatureVector) -> Option<usize> {
        match self {
            Attribute::TfIdf => None,
            Attribute::Position => Some((fv.position + 1) as usize),
            Attribute::Pos => Some(fv.pos_class.index()),
            Attribute::Seed => Some(fv.seed.index()),
            Attribute::Negation => Some(fv.negation as usize),
            Attribute::Modifier => Some(fv.modifier as usize),
        }
    }

    /// Printable name of a domain value.
    pub fn value_label(self, index: usize) -> String {
        match self {
            Attribute::TfIdf => index.to_string(),
            Attribute::Position => (index as i64 - 1).to_string(),
            Attribute::Pos => PosClass::ALL[index].symbol().to_string(),
            Attribute::Seed => Seed::ALL[index].symbol().to_string(),
            Attribute::Negation | Attribute::Modifier => index.to_string(),
        }
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Attribute {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown attribute `{s}`"))
    }
}

/// Document frequencies over a corpus.
#[derive(Debug, Clone, Default)]
pub struct CorpusStats {
    doc_freq: HashMap<String, usize>,
    num_docs: usize,
}

impl CorpusStats {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        CorpusStats::from_documents(&corpus.documents)
    }

    pub fn from_documents(documents: &[ReviewDocument]) -> Self {
        let mut doc_freq: HashMap<String, usize> = HashMap::new();
        for doc in documents {
            let mut seen: Vec<&str> = doc.tokens().map(|t| t.normalized.as_str()).collect();
            seen.sort_unstable();
            seen.dedup();
            for w in seen {
                *doc_freq.entry(w.to_string()).or_default() += 1;
            }
        }
        CorpusStats {
            doc_freq,
            num_docs: documents.len(),
        }
    }

    pub fn document_frequency(&self, unigram: &str) -> usize {
        self.doc_freq.get(unigram).copied().unwrap_or(0)
    }

    pub fn num_documents(&self) -> usize {
        self.num_docs
    }
}

/// `(f / s) * -log2(n_f / c)`.
pub fn tf_idf(f: usize, s: usize, n_f: usize, c: usize) -> f64 {
    let idf = -((n_f as f64) / (c as f64)).log2();
    // -log2(1) is -0.0; report a plain zero.
    (f as f64 / s as f64) * idf + 0.0
}

/// TF-IDF of a unigram occurring in `doc`.
pub fn compute_tf_idf(unigram: &str, doc: &ReviewDocument, stats: &CorpusStats) -> Result<f64> {
    let f = doc.tokens().filter(|t| t.normalized == unigram).count();
    let n_f = stats.document_frequency(unigram);
    if f == 0 || n_f == 0 || doc.word_count == 0 || stats.num_documents() == 0 {
        return Err(Error::UnigramNotInDocument {
            unigram: unigram.to_string(),
            doc_id: doc.doc_id.clone(),
        });
    }
    Ok(tf_idf(f, doc.word_count, n_f, stats.num_documents()))
}

/// Position attribute, computed over the word tokens of the sentence so a
/// trailing period does not hide the last word. The first word wins for
/// one-word sentences.
pub fn position_attribute(token: &Token, sentence: &Sentence) -> i8 {
    let words: Vec<usize> = sentence
        .tokens
        .iter()
        .filter(|t| t.is_word())
        .map(|t| t.position)
        .collect();
    let (first, last) = match (words.first(), words.last()) {
        (Some(&f), Some(&l)) if token.is_word() => (f, l),
        _ => (0, sentence.tokens.len().saturating_sub(1)),
    };
    if token.position == first {
        -1
    } else if token.position == last {
        1
    } else {
        0
    }
}

fn vector_for(
    token: &Token,
    sentence: &Sentence,
    doc: &ReviewDocument,
    tf_idf: f64,
    lexicons: &Lexicons,
) -> FeatureVector {
    let w = token.normalized.as_str();
    let seed = if lexicons.positive_seeds().contains(w) {
        Seed::Positive
    } else if lexicons.negative_seeds().contains(w) {
        Seed::Negative
    } else {
        Seed::None
    };
    FeatureVector {
        tf_idf,
        position: position_attribute(token, sentence),
        pos_class: PosClass::from_penn(&token.pos_tag),
        seed,
        negation: lexicons.negation_words.contains(w),
        modifier: lexicons.modifier_words.contains(w),
        class_label: doc.label,
    }
}

pub fn build_feature_vector(
    token: &Token,
    sentence: &Sentence,
    doc: &ReviewDocument,
    stats: &CorpusStats,
    lexicons: &Lexicons,
) -> Result<FeatureVector> {
    let weight = compute_tf_idf(&token.normalized, doc, stats)?;
    Ok(vector_for(token, sentence, doc, weight, lexicons))
}

/// A feature vector together with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub doc_id: String,
    pub sentence_index: usize,
    pub token_index: usize,
    pub unigram: String,
    pub vector: FeatureVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetMode {
    /// Every document must carry a label.
    Labeled,
    /// Labels are attached where present.
    Unlabeled,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub rows: Vec<DatasetRow>,
}

pub const DATASET_HEADER: &str = "tf_idf,position,pos,seed,negation,modifier,class";

impl Dataset {
    pub fn vectors(&self) -> Vec<FeatureVector> {
        self.rows.iter().map(|r| r.vector).collect()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Instance counts per class, indexed by [`Class::index`].
    pub fn supports(&self) -> [usize; 2] {
        let mut s = [0; 2];
        for r in &self.rows {
            if let Some(c) = r.vector.class_label {
                s[c.index()] += 1;
            }
        }
        s
    }

    pub fn is_labeled(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.vector.class_label.is_some())
    }

    /// Comma-separated export: header plus one row per vector. Missing
    /// classes are written as `?`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(DATASET_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&vector_to_csv(&r.vector));
            out.push('\n');
        }
        out
    }

    /// Row provenance, aligned line by line with [`Dataset::to_csv`].
    pub fn to_index_tsv(&self) -> String {
        let mut out = String::from("doc_id\tsentence_index\ttoken_index\tunigram\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", r.doc_id, r.sentence_index, r.token_index, r.unigram);
        }
        out
    }

    /// Rebuilds a dataset from its two exports.
    pub fn from_exports(csv: &str, index_tsv: &str) -> Result<Self> {
        let vectors = parse_dataset_csv(csv)?;
        let lines: Vec<(usize, &str)> = index_tsv
            .lines()
            .enumerate()
            .skip(1)
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        if lines.len() != vectors.len() {
            return Err(Error::InvalidInput(format!(
                "dataset export has {} rows but its index has {}",
                vectors.len(),
                lines.len()
            )));
        }
        let mut rows = Vec::with_capacity(vectors.len());
        for (vector, (i, line)) in vectors.into_iter().zip(lines) {
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = || Error::parse("<dataset index>", i + 1, "expected doc_id, sentence_index, token_index, unigram");
            if fields.len() != 4 {
                return Err(bad());
            }
            rows.push(DatasetRow {
                doc_id: fields[0].to_string(),
                sentence_index: fields[1].parse().map_err(|_| bad())?,
                token_index: fields[2].parse().map_err(|_| bad())?,
                unigram: fields[3].to_string(),
                vector,
            });
        }
        Ok(Dataset { rows })
    }
}

pub fn vector_to_csv(v: &FeatureVector) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        v.tf_idf,
        v.position,
        v.pos_class.symbol(),
        v.seed.symbol(),
        v.negation as u8,
        v.modifier as u8,
        v.class_label.map_or("?", Class::symbol)
    )
}

/// Parses the dataset export back into vectors.
pub fn parse_dataset_csv(text: &str) -> Result<Vec<FeatureVector>> {
    let source = "<dataset>";
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == DATASET_HEADER => {}
        _ => return Err(Error::parse(source, 1, format!("expected header `{DATASET_HEADER}`"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| Error::parse(source, i + 1, m);
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 7 {
            return Err(err(format!("expected 7 columns, found {}", f.len())));
        }
        let tf_idf: f64 = f[0].parse().map_err(|_| err(format!("bad tf_idf `{}`", f[0])))?;
        if !(tf_idf >= 0.0 && tf_idf.is_finite()) {
            return Err(err(format!("tf_idf must be a non-negative number, got `{}`", f[0])));
        }
        let position: i8 = match f[1] {
            "-1" => -1,
            "0" => 0,
            "1" => 1,
            other => return Err(err(format!("bad position `{other}`"))),
        };
        let bit = |s: &str| match s {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(err(format!("expected 0 or 1, got `{other}`"))),
        };
        out.push(FeatureVector {
            tf_idf,
            position,
            pos_class: f[2].parse().map_err(err)?,
            seed: f[3].parse().map_err(err)?,
            negation: bit(f[4])?,
            modifier: bit(f[5])?,
            class_label: match f[6] {
                "?" => None,
                c => Some(c.parse().map_err(err)?),
            },
        });
    }
    Ok(out)
}

/// Featurizes one document.
pub fn document_rows(doc: &ReviewDocument, stats: &CorpusStats, lexicons: &Lexicons) -> Vec<DatasetRow> {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in doc.tokens() {
        *counts.entry(t.normalized.as_str()).or_default() += 1;
    }
    let mut rows = Vec::new();
    for sentence in &doc.sentences {
        for token in &sentence.tokens {
            if !token.is_word() || lexicons.is_filtered(&token.normalized) {
                continue;
            }
            let f = counts[token.normalized.as_str()];
            let n_f = stats.document_frequency(&token.normalized).max(1);
            let weight = tf_idf(f, doc.word_count, n_f, stats.num_documents().max(n_f));
            rows.push(DatasetRow {
                doc_id: doc.doc_id.clone(),
                sentence_index: sentence.index,
                token_index: token.position,
                unigram: token.normalized.clone(),
                vector: vector_for(token, sentence, doc, weight, lexicons),
            });
        }
    }
    rows
}

/// One vector per non-stop-word token occurrence, in corpus order.
pub fn build_dataset(corpus: &Corpus, lexicons: &Lexicons, mode: DatasetMode) -> Result<Dataset> {
    if mode == DatasetMode::Labeled {
        let missing = corpus.unlabeled();
        if !missing.is_empty() {
            return Err(Error::MissingLabels(missing));
        }
    }
    let stats = CorpusStats::from_corpus(corpus);
    let rows = corpus
        .documents
        .par_iter()
        .map(|doc| document_rows(doc, &stats, lexicons))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(Dataset { rows })
}
