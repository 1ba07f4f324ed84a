//! Dependency graphs and the two on-disk parse formats.
//!
//! Two formats are accepted and auto-detected from the first non-comment
//! line:
//!
//! * CoNLL-U: ten tab-separated columns per token, blank line between
//!   sentences.
//! * Typed dependencies: one block per sentence holding an optional tagged
//!   token line (`Samsung/NNP S5830/NNP has/VBZ ...`) followed by relations
//!   written as `nn(S5830-2, Samsung-1)`, any number per line.
//!
//! Both formats understand `# doc_id = ...` and `# sentence_index = ...`
//! comment lines. Relation labels are lowercased and mapped through an
//! [`AliasMap`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::corpus::Token;
use crate::error::{Error, Result};

const DEFAULT_ALIASES: &str = include_str!("../resources/aliases.tsv");

/// Maps parser-specific relation spellings onto canonical labels.
#[derive(Debug, Clone)]
pub struct AliasMap {
    map: HashMap<String, String>,
}

impl Default for AliasMap {
    fn default() -> Self {
        AliasMap::parse(DEFAULT_ALIASES, Path::new("<default aliases>"))
            .expect("bundled alias map is well-formed")
    }
}

impl AliasMap {
    pub fn empty() -> Self {
        AliasMap { map: HashMap::new() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        AliasMap::parse(&text, path)
    }

    /// Parses `alias<TAB>canonical` lines; `#` starts a comment.
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut map = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            match (fields.next(), fields.next(), fields.next()) {
                (Some(alias), Some(canonical), None) => {
                    map.insert(alias.to_lowercase(), canonical.to_lowercase());
                }
                _ => return Err(Error::parse(source, i + 1, "expected `alias<TAB>canonical`")),
            }
        }
        Ok(AliasMap { map })
    }

    pub fn insert(&mut self, alias: &str, canonical: &str) {
        self.map.insert(alias.to_lowercase(), canonical.to_lowercase());
    }

    pub fn normalize(&self, label: &str) -> String {
        let label = label.trim().to_lowercase();
        self.map.get(&label).cloned().unwrap_or(label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub label: String,
    /// 1-based token index.
    pub head: usize,
    /// 1-based token index.
    pub dependent: usize,
}

impl Edge {
    pub fn new(label: impl Into<String>, head: usize, dependent: usize) -> Self {
        Edge {
            label: label.into(),
            head,
            dependent,
        }
    }
}

/// One parsed sentence. Token `i` (0-based in `tokens`) has parser index
/// `i + 1`; edges use parser indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepGraph {
    pub doc_id: String,
    pub sentence_index: usize,
    pub tokens: Vec<Token>,
    pub edges: Vec<Edge>,
}

impl DepGraph {
    /// Builds a graph, rejecting edges that point outside the token range.
    pub fn new(
        doc_id: impl Into<String>,
        sentence_index: usize,
        tokens: Vec<Token>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let n = tokens.len();
        if let Some(e) = edges
            .iter()
            .find(|e| e.head == 0 || e.dependent == 0 || e.head > n || e.dependent > n)
        {
            return Err(Error::InvalidInput(format!(
                "edge {}({}, {}) references a token outside 1..={n}",
                e.label, e.head, e.dependent
            )));
        }
        Ok(DepGraph {
            doc_id: doc_id.into(),
            sentence_index,
            tokens,
            edges,
        })
    }

    /// Token by 1-based parser index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn pos(&self, index: usize) -> &str {
        self.token(index).map_or("", |t| t.pos_tag.as_str())
    }

    pub fn edges_labeled<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.label == label)
    }

    /// Dependents of `head` along edges with `label`, in token order.
    pub fn dependents(&self, head: usize, label: &str) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges_labeled(label)
            .filter(|e| e.head == head)
            .map(|e| e.dependent)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// True if a Penn tag matches a star pattern such as `NN*`, i.e. starts with
/// the given prefix.
pub fn pos_matches(tag: &str, prefix: &str) -> bool {
    !prefix.is_empty() && tag.starts_with(prefix)
}

/// Reads a dependency file in either supported format.
pub fn parse_dep_file(path: &Path, aliases: &AliasMap) -> Result<Vec<DepGraph>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dep_str(&text, path, aliases)
}

pub fn parse_dep_str(text: &str, source: &Path, aliases: &AliasMap) -> Result<Vec<DepGraph>> {
    let first = text
        .lines()
        .map(str::trim_end)
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some(first) = first else {
        return Ok(Vec::new());
    };
    if first.split('\t').count() == 10 {
        parse_conllu(text, source, aliases)
    } else {
        parse_typed(text, source, aliases)
    }
}

/// A blank-line-separated block of numbered lines plus its metadata.
struct Block<'a> {
    lines: Vec<(usize, &'a str)>,
    doc_id: Option<String>,
    sentence_index: Option<usize>,
}

fn blocks(text: &str) -> Vec<Block<'_>> {
    let mut out = Vec::new();
    let mut current = Block {
        lines: Vec::new(),
        doc_id: None,
        sentence_index: None,
    };
    let mut has_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            if has_content {
                out.push(std::mem::replace(
                    &mut current,
                    Block {
                        lines: Vec::new(),
                        doc_id: None,
                        sentence_index: None,
                    },
                ));
                has_content = false;
            }
            continue;
        }
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                match key.trim() {
                    "doc_id" => current.doc_id = Some(value.trim().to_string()),
                    "sentence_index" => current.sentence_index = value.trim().parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        current.lines.push((i + 1, line));
        has_content = true;
    }
    if has_content {
        out.push(current);
    }
    out
}

fn parse_conllu(text: &str, source: &Path, aliases: &AliasMap) -> Result<Vec<DepGraph>> {
    let mut graphs = Vec::new();
    for (ordinal, block) in blocks(text).into_iter().enumerate() {
        let mut tokens = Vec::new();
        // (label, head, dependent, line)
        let mut raw_edges: Vec<(String, usize, usize, usize)> = Vec::new();
        for &(line_no, line) in &block.lines {
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 10 {
                return Err(Error::parse(
                    source,
                    line_no,
                    format!("expected 10 tab-separated columns, found {}", cols.len()),
                ));
            }
            // Multiword ranges and empty nodes carry no basic dependency.
            if cols[0].contains('-') || cols[0].contains('.') {
                continue;
            }
            let id: usize = cols[0]
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("bad token id `{}`", cols[0])))?;
            if id != tokens.len() + 1 {
                return Err(Error::parse(
                    source,
                    line_no,
                    format!("token id {id} out of sequence (expected {})", tokens.len() + 1),
                ));
            }
            let tag = if cols[4] != "_" {
                cols[4].to_string()
            } else {
                upos_to_penn(cols[3]).to_string()
            };
            tokens.push(Token::new(cols[1], id - 1, tag));
            if cols[6] == "_" {
                continue;
            }
            let head: usize = cols[6]
                .parse()
                .map_err(|_| Error::parse(source, line_no, format!("bad head `{}`", cols[6])))?;
            if head != 0 {
                raw_edges.push((aliases.normalize(cols[7]), head, id, line_no));
            }
        }
        let n = tokens.len();
        if let Some(&(_, head, _, line_no)) = raw_edges.iter().find(|e| e.1 > n) {
            return Err(Error::parse(
                source,
                line_no,
                format!("head {head} references a token outside 1..={n}"),
            ));
        }
        let mut edges: Vec<Edge> = raw_edges
            .into_iter()
            .map(|(label, head, dep, _)| Edge::new(label, head, dep))
            .collect();
        relabel_and_conjuncts(&tokens, &mut edges);
        let graph = DepGraph::new(
            block.doc_id.unwrap_or_default(),
            block.sentence_index.unwrap_or(ordinal),
            tokens,
            edges,
        )?;
        graphs.push(graph);
    }
    Ok(graphs)
}

/// Basic UD writes coordination as `conj` plus a `cc` on the last conjunct.
/// When any conjunct of a head has `cc` "and", every `conj` edge from that
/// head becomes `and`, which is what the enhanced `conj:and` label says.
fn relabel_and_conjuncts(tokens: &[Token], edges: &mut [Edge]) {
    let has_and_cc = |dep: usize, edges: &[Edge]| {
        edges.iter().any(|e| {
            e.label == "cc"
                && e.head == dep
                && tokens
                    .get(e.dependent - 1)
                    .is_some_and(|t| t.normalized == "and")
        })
    };
    let and_heads: Vec<usize> = edges
        .iter()
        .filter(|e| e.label == "conj" && has_and_cc(e.dependent, edges))
        .map(|e| e.head)
        .collect();
    for e in edges.iter_mut() {
        if e.label == "conj" && and_heads.contains(&e.head) {
            e.label = "and".to_string();
        }
    }
}

fn upos_to_penn(upos: &str) -> &'static str {
    match upos {
        "ADJ" => "JJ",
        "ADV" => "RB",
        "NOUN" => "NN",
        "PROPN" => "NNP",
        "VERB" | "AUX" => "VB",
        "DET" => "DT",
        "ADP" => "IN",
        "CCONJ" => "CC",
        "PRON" => "PRP",
        "NUM" => "CD",
        "PART" => "RP",
        "PUNCT" => ".",
        "INTJ" => "UH",
        "SYM" => "SYM",
        "SCONJ" => "IN",
        _ => "_",
    }
}

fn relation_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"([A-Za-z][A-Za-z_:]*)\s*\(\s*(\S+?)-(\d+)'*\s*,\s*(\S+?)-(\d+)'*\s*\)")
            .expect("valid relation regex")
    })
}

fn strip_tags(line: &str) -> String {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"</?[A-Za-z][^>]*>").expect("valid tag regex"))
        .replace_all(line, "")
        .into_owned()
}

struct Mention {
    label: String,
    head: (String, usize),
    dependent: (String, usize),
    line: usize,
}

/// Parses the relations on a line; `None` if the line has other content.
fn relations_on_line(line: &str, line_no: usize) -> Option<Vec<Mention>> {
    let re = relation_regex();
    let mut mentions = Vec::new();
    let mut rest = String::new();
    let mut last = 0;
    for caps in re.captures_iter(line) {
        let m = caps.get(0).expect("whole match");
        rest.push_str(&line[last..m.start()]);
        last = m.end();
        mentions.push(Mention {
            label: caps[1].to_string(),
            head: (caps[2].to_string(), caps[3].parse().ok()?),
            dependent: (caps[4].to_string(), caps[5].parse().ok()?),
            line: line_no,
        });
    }
    rest.push_str(&line[last..]);
    let leftover_is_separators = rest.chars().all(|c| c.is_whitespace() || matches!(c, '.' | ',' | ';'));
    (!mentions.is_empty() && leftover_is_separators).then_some(mentions)
}

fn parse_typed(text: &str, source: &Path, aliases: &AliasMap) -> Result<Vec<DepGraph>> {
    let mut graphs = Vec::new();
    for (ordinal, block) in blocks(text).into_iter().enumerate() {
        let mut tagged: Option<Vec<Token>> = None;
        let mut mentions: Vec<Mention> = Vec::new();
        for &(line_no, raw) in &block.lines {
            let line = strip_tags(raw);
            if let Some(found) = relations_on_line(&line, line_no) {
                mentions.extend(found);
            } else if tagged.is_none() && mentions.is_empty() {
                tagged = Some(parse_tagged_line(&line, source, line_no)?);
            } else {
                return Err(Error::parse(source, line_no, format!("malformed dependency line `{}`", raw.trim())));
            }
        }

        let tokens = match tagged {
            Some(tokens) => {
                for m in &mentions {
                    for (word, index) in [&m.head, &m.dependent] {
                        if *index == 0 {
                            continue;
                        }
                        match tokens.get(index - 1) {
                            None => {
                                return Err(Error::parse(
                                    source,
                                    m.line,
                                    format!("{word}-{index} references a token outside 1..={}", tokens.len()),
                                ))
                            }
                            Some(t) if t.surface != *word => {
                                return Err(Error::parse(
                                    source,
                                    m.line,
                                    format!("{word}-{index} does not match token `{}`", t.surface),
                                ))
                            }
                            Some(_) => {}
                        }
                    }
                }
                tokens
            }
            None => tokens_from_mentions(&mentions),
        };

        let edges = mentions
            .iter()
            .filter(|m| m.head.1 != 0 && m.dependent.1 != 0)
            .map(|m| Edge::new(aliases.normalize(&m.label), m.head.1, m.dependent.1))
            .collect();
        graphs.push(DepGraph::new(
            block.doc_id.unwrap_or_default(),
            block.sentence_index.unwrap_or(ordinal),
            tokens,
            edges,
        )?);
    }
    Ok(graphs)
}

fn parse_tagged_line(line: &str, source: &Path, line_no: usize) -> Result<Vec<Token>> {
    line.split_whitespace()
        .enumerate()
        .map(|(i, item)| match item.rsplit_once('/') {
            Some((word, tag)) if !word.is_empty() && !tag.is_empty() => Ok(Token::new(word, i, tag)),
            _ => Err(Error::parse(
                source,
                line_no,
                format!("expected `word/TAG`, found `{item}`"),
            )),
        })
        .collect()
}

/// Without a tagged line, tokens are recovered from the relation mentions;
/// unmentioned positions get `_` for surface and tag.
fn tokens_from_mentions(mentions: &[Mention]) -> Vec<Token> {
    let n = mentions
        .iter()
        .map(|m| m.head.1.max(m.dependent.1))
        .max()
        .unwrap_or(0);
    let mut surfaces = vec!["_".to_string(); n];
    for m in mentions {
        for (word, index) in [&m.head, &m.dependent] {
            if *index > 0 {
                surfaces[index - 1] = word.clone();
            }
        }
    }
    surfaces
        .into_iter()
        .enumerate()
        .map(|(i, s)| Token::new(s, i, "_"))
        .collect()
}

/// Writes graphs in the typed-dependency format, including metadata
/// comments and the tagged token line.
pub fn write_typed(graphs: &[DepGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        let _ = writeln!(out, "# doc_id = {}", g.doc_id);
        let _ = writeln!(out, "# sentence_index = {}", g.sentence_index);
        let tagged: Vec<String> = g
            .tokens
            .iter()
            .map(|t| {
                let tag = if t.pos_tag.is_empty() { "_" } else { t.pos_tag.as_str() };
                format!("{}/{}", t.surface, tag)
            })
            .collect();
        let _ = writeln!(out, "{}", tagged.join(" "));
        for e in &g.edges {
            let head = &g.tokens[e.head - 1].surface;
            let dep = &g.tokens[e.dependent - 1].surface;
            let _ = writeln!(out, "{}({}-{}, {}-{})", e.label, head, e.head, dep, e.dependent);
        }
        out.push('\n');
    }
    out
}
