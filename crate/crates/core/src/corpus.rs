//! Review corpus loading, sentence segmentation and tokenization.
//!
//! A corpus lives on disk as `root/<category>/<doc_id>.txt`. A document may
//! carry a sibling `<doc_id>.conllu` holding its dependency parse; when it
//! does, the parser's sentences and tokens become the document's sentences
//! (they carry POS tags) and the rule engine can run over it.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::deps::{parse_dep_file, AliasMap, DepGraph};
use crate::error::{Error, Result};

/// Subjectivity class of a document, unigram or sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Subjective,
    Objective,
}

impl Class {
    pub const ALL: [Class; 2] = [Class::Subjective, Class::Objective];

    /// Stable array index: S = 0, O = 1.
    pub fn index(self) -> usize {
        match self {
            Class::Subjective => 0,
            Class::Objective => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Class::Subjective => "S",
            Class::Objective => "O",
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::Subjective => Class::Objective,
            Class::Objective => Class::Subjective,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "S" | "s" => Ok(Class::Subjective),
            "O" | "o" => Ok(Class::Objective),
            other => Err(format!("unknown class `{other}` (expected S or O)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    /// 0-based index within the sentence.
    pub position: usize,
    /// Penn-Treebank-style tag; empty when the document was never parsed.
    pub pos_tag: String,
}

impl Token {
    pub fn new(surface: impl Into<String>, position: usize, pos_tag: impl Into<String>) -> Self {
        let surface = surface.into();
        Token {
            normalized: surface.to_lowercase(),
            surface,
            position,
            pos_tag: pos_tag.into(),
        }
    }

    /// True when the token contains at least one alphanumeric character.
    pub fn is_word(&self) -> bool {
        self.surface.chars().any(char::is_alphanumeric)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub doc_id: String,
    pub index: usize,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone)]
pub struct ReviewDocument {
    pub doc_id: String,
    pub category: String,
    pub text: String,
    pub label: Option<Class>,
    /// Number of tokens in the document (the `s` of the TF-IDF weighting).
    pub word_count: usize,
    pub sentences: Vec<Sentence>,
    /// Dependency parse, present only when a `.conllu` sibling was found.
    pub parses: Option<Vec<DepGraph>>,
}

impl ReviewDocument {
    /// Builds a document from raw text using the given segmenter.
    pub fn from_text(
        doc_id: impl Into<String>,
        category: impl Into<String>,
        text: impl Into<String>,
        segmenter: &Segmenter,
    ) -> Self {
        let doc_id = doc_id.into();
        let text = text.into();
        let sentences = segmenter.segment(&doc_id, &text);
        let word_count = sentences.iter().map(|s| s.tokens.len()).sum();
        ReviewDocument {
            doc_id,
            category: category.into(),
            text,
            label: None,
            word_count,
            sentences,
            parses: None,
        }
    }

    /// Builds a document whose sentences and tokens come from its parse.
    pub fn from_parses(
        doc_id: impl Into<String>,
        category: impl Into<String>,
        text: impl Into<String>,
        mut parses: Vec<DepGraph>,
    ) -> Self {
        let doc_id = doc_id.into();
        for (i, g) in parses.iter_mut().enumerate() {
            g.doc_id = doc_id.clone();
            g.sentence_index = i;
        }
        let sentences: Vec<Sentence> = parses
            .iter()
            .filter(|g| !g.tokens.is_empty())
            .map(|g| Sentence {
                doc_id: doc_id.clone(),
                index: g.sentence_index,
                tokens: g.tokens.clone(),
            })
            .collect();
        let word_count = sentences.iter().map(|s| s.tokens.len()).sum();
        ReviewDocument {
            doc_id,
            category: category.into(),
            text: text.into(),
            label: None,
            word_count,
            sentences,
            parses: Some(parses),
        }
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    pub fn parse_for(&self, sentence_index: usize) -> Option<&DepGraph> {
        self.parses
            .as_ref()
            .and_then(|p| p.iter().find(|g| g.sentence_index == sentence_index))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// Sorted by (category, doc_id).
    pub documents: Vec<ReviewDocument>,
}

impl Corpus {
    pub fn new(mut documents: Vec<ReviewDocument>) -> Result<Self> {
        documents.sort_by(|a, b| (&a.category, &a.doc_id).cmp(&(&b.category, &b.doc_id)));
        let mut seen = HashMap::new();
        for d in &documents {
            if seen.insert(d.doc_id.as_str(), d.category.as_str()).is_some() {
                return Err(Error::DuplicateDocument {
                    category: d.category.clone(),
                    doc_id: d.doc_id.clone(),
                });
            }
        }
        Ok(Corpus { documents })
    }

    /// Number of documents (the `C` of the TF-IDF weighting).
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn categories(&self) -> Vec<String> {
        self.documents
            .iter()
            .map(|d| d.category.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn document(&self, doc_id: &str) -> Option<&ReviewDocument> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn total_tokens(&self) -> usize {
        self.documents.iter().map(|d| d.word_count).sum()
    }

    /// Documents that are missing a label.
    pub fn unlabeled(&self) -> Vec<String> {
        self.documents
            .iter()
            .filter(|d| d.label.is_none())
            .map(|d| d.doc_id.clone())
            .collect()
    }

    /// Assigns labels by doc id. Labels for unknown documents are logged and
    /// ignored; the ids of those entries are returned.
    pub fn apply_labels(&mut self, labels: &[(String, Class)]) -> Vec<String> {
        let index: HashMap<String, usize> = self
            .documents
            .iter()
            .enumerate()
            .map(|(i, d)| (d.doc_id.clone(), i))
            .collect();
        let mut unknown = Vec::new();
        for (doc_id, class) in labels {
            match index.get(doc_id) {
                Some(&i) => self.documents[i].label = Some(*class),
                None => {
                    log::warn!("label given for unknown document `{doc_id}`; ignored");
                    unknown.push(doc_id.clone());
                }
            }
        }
        unknown
    }
}

/// Options controlling corpus ingestion.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub segmenter: Segmenter,
    pub aliases: AliasMap,
}

/// Loads `root/<category>/<doc_id>.txt` files (plus `.conllu` siblings) and
/// optionally applies a labels file.
pub fn load_corpus(root: &Path, labels_path: Option<&Path>, options: &IngestOptions) -> Result<Corpus> {
    let mut sources: Vec<(String, PathBuf)> = Vec::new();
    for category_dir in sorted_entries(root)? {
        if !category_dir.is_dir() {
            continue;
        }
        let category = file_stem(&category_dir);
        for path in sorted_entries(&category_dir)? {
            if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
                sources.push((category.clone(), path));
            }
        }
    }

    let documents = sources
        .par_iter()
        .map(|(category, path)| load_document(category, path, options))
        .collect::<Result<Vec<_>>>()?;

    let mut corpus = Corpus::new(documents)?;
    if let Some(labels_path) = labels_path {
        let labels = read_labels(labels_path)?;
        corpus.apply_labels(&labels);
    }
    Ok(corpus)
}

fn load_document(category: &str, path: &Path, options: &IngestOptions) -> Result<ReviewDocument> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let text = strip_markup(&raw);
    let doc_id = file_stem(path);
    let parse_path = path.with_extension("conllu");
    if parse_path.is_file() {
        let parses = parse_dep_file(&parse_path, &options.aliases)?;
        Ok(ReviewDocument::from_parses(doc_id, category, text, parses))
    } else {
        Ok(ReviewDocument::from_text(doc_id, category, text, &options.segmenter))
    }
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(dir, e))?;
    entries.sort();
    Ok(entries)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Reads a labels file: one `doc_id<TAB>S|O` per line. Any run of
/// whitespace is accepted as the separator; `#` starts a comment.
pub fn read_labels(path: &Path) -> Result<Vec<(String, Class)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, path)
}

pub fn parse_labels(text: &str, source: &Path) -> Result<Vec<(String, Class)>> {
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(doc_id), Some(class), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::parse(source, i + 1, "expected `doc_id<TAB>S|O`"));
        };
        let class = class
            .parse::<Class>()
            .map_err(|m| Error::parse(source, i + 1, m))?;
        labels.push((doc_id.to_string(), class));
    }
    Ok(labels)
}

/// Removes `<...>` markup and decodes the handful of entities that survive
/// typical review scraping.
pub fn strip_markup(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut in_tag = false;
    for c in raw.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                out.push(' ');
            }
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out.replace("&nbsp;", " ")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}

/// Heuristic sentence splitter.
///
/// A terminator character ends a sentence only when it is followed by
/// whitespace, another terminator, or the end of the text, so `$4.99` and
/// `e.g.x` stay intact.
#[derive(Debug, Clone)]
pub struct Segmenter {
    terminators: Vec<char>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter {
            terminators: vec!['.', '!', '?'],
        }
    }
}

impl Segmenter {
    pub fn new(terminators: impl IntoIterator<Item = char>) -> Self {
        Segmenter {
            terminators: terminators.into_iter().collect(),
        }
    }

    pub fn terminators(&self) -> &[char] {
        &self.terminators
    }

    /// Splits text into sentence strings (terminators included).
    pub fn split<'a>(&self, text: &'a str) -> Vec<&'a str> {
        let mut pieces = Vec::new();
        let mut start = 0;
        let mut chars = text.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if !self.terminators.contains(&c) {
                continue;
            }
            let end = i + c.len_utf8();
            let boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                pieces.push(&text[start..end]);
                start = end;
            }
        }
        if start < text.len() {
            pieces.push(&text[start..]);
        }
        pieces
            .into_iter()
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .collect()
    }

    pub fn segment(&self, doc_id: &str, text: &str) -> Vec<Sentence> {
        self.split(text)
            .into_iter()
            .map(tokenize)
            .filter(|tokens| !tokens.is_empty())
            .enumerate()
            .map(|(index, tokens)| Sentence {
                doc_id: doc_id.to_string(),
                index,
                tokens,
            })
            .collect()
    }
}

/// Segments a document's text with the default terminator set.
pub fn segment_sentences(doc: &ReviewDocument) -> Vec<Sentence> {
    Segmenter::default().segment(&doc.doc_id, &doc.text)
}

/// Whitespace tokenizer that peels leading and trailing punctuation off each
/// chunk into single-character tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut surfaces: Vec<String> = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chars_of(chunk);
        let first = chars.iter().position(|c| c.is_alphanumeric());
        let Some(first) = first else {
            surfaces.extend(chars.iter().map(|c| c.to_string()));
            continue;
        };
        let last = chars.iter().rposition(|c| c.is_alphanumeric()).unwrap_or(first);
        surfaces.extend(chars[..first].iter().map(|c| c.to_string()));
        surfaces.push(chars[first..=last].iter().collect());
        surfaces.extend(chars[last + 1..].iter().map(|c| c.to_string()));
    }
    surfaces
        .into_iter()
        .enumerate()
        .map(|(i, s)| Token::new(s, i, ""))
        .collect()
}

fn chars_of(s: &str) -> Vec<char> {
    s.chars().collect()
}
