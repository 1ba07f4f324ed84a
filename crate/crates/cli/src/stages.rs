//! The pipeline stages. Each one reads the previous stage's files from the
//! output directory, writes its own, and leaves a manifest behind.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use log::{info, warn};
use opinion_miner::classifier::{classify_sentence, k_fold, predict_token, train, NbModel, TokenClassifier};
use opinion_miner::corpus::{load_corpus, Class, Corpus, ReviewDocument, Sentence, Token};
use opinion_miner::deps::{parse_dep_file, write_typed, AliasMap, DepGraph};
use opinion_miner::evaluation::{
    classification_report, evaluate_extraction, format_classification_tsv, format_extraction_text,
    format_extraction_tsv, format_roc_csv, read_gold_pairs, roc_points,
};
use opinion_miner::features::{build_dataset, parse_dataset_csv, Dataset, DatasetMode, FeatureVector};
use opinion_miner::info_gain::rank_attributes;
use opinion_miner::reliability::{
    build_graph, filter_noisy, format_document_rows, format_pair_rows, score_graph, DOCUMENT_REPORT_HEADER,
    PAIR_REPORT_HEADER,
};
use opinion_miner::rules::{extract_triples, format_triples, parse_triples, RuleId, Triple};

use crate::config::PipelineConfig;
use crate::manifest::Manifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<String>),
    #[error("{stage}: missing input {}", .path.display())]
    MissingInput { stage: &'static str, path: PathBuf },
    #[error("{stage}: {message}")]
    Invalid { stage: &'static str, message: String },
    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: opinion_miner::Error,
    },
    #[error("{stage}: {}: {source}", .path.display())]
    Io {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput { .. } => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Target,
}

impl Split {
    fn dir(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Target => "target",
        }
    }
}

/// A stage invocation: the configuration plus the stage name used in
/// diagnostics.
pub struct Stage<'a> {
    pub name: &'static str,
    pub cfg: &'a PipelineConfig,
}

impl<'a> Stage<'a> {
    pub fn new(name: &'static str, cfg: &'a PipelineConfig) -> Self {
        Stage { name, cfg }
    }

    fn out(&self, file: &str) -> PathBuf {
        self.cfg.out_dir.join(file)
    }

    fn split_file(&self, split: Split, file: &str) -> PathBuf {
        self.cfg.out_dir.join(split.dir()).join(file)
    }

    /// The split the classifier learns from.
    fn training_split(&self) -> Split {
        if self.cfg.train_corpus.is_some() {
            Split::Train
        } else {
            Split::Target
        }
    }

    fn splits(&self) -> Vec<Split> {
        if self.cfg.train_corpus.is_some() {
            vec![Split::Train, Split::Target]
        } else {
            vec![Split::Target]
        }
    }

    fn core<T>(&self, r: opinion_miner::Result<T>) -> Result<T> {
        r.map_err(|source| CliError::Core { stage: self.name, source })
    }

    fn invalid(&self, message: impl Into<String>) -> CliError {
        CliError::Invalid {
            stage: self.name,
            message: message.into(),
        }
    }

    fn require(&self, path: &Path) -> Result<()> {
        if path.is_file() {
            Ok(())
        } else {
            Err(CliError::MissingInput {
                stage: self.name,
                path: path.to_path_buf(),
            })
        }
    }

    fn read(&self, path: &Path) -> Result<String> {
        self.require(path)?;
        fs::read_to_string(path).map_err(|source| CliError::Io {
            stage: self.name,
            path: path.to_path_buf(),
            source,
        })
    }

    fn write(&self, path: &Path, contents: &str) -> Result<PathBuf> {
        let io_err = |source| CliError::Io {
            stage: self.name,
            path: path.to_path_buf(),
            source,
        };
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err)?;
        }
        fs::write(path, contents).map_err(io_err)?;
        Ok(path.to_path_buf())
    }

    fn finish(&self, manifest: Manifest) -> Result<()> {
        manifest
            .write(&self.cfg.out_dir)
            .map(|_| ())
            .map_err(|source| CliError::Io {
                stage: self.name,
                path: self.cfg.out_dir.join("manifests"),
                source,
            })
    }

    fn manifest(&self) -> Manifest {
        Manifest::new(self.name, &self.cfg.hash())
    }

    /// Rows of a tab-separated table, header skipped, each checked for
    /// `columns` fields.
    fn table(&self, path: &Path, columns: usize) -> Result<Vec<Vec<String>>> {
        let text = self.read(path)?;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<String> = line.split('\t').map(str::to_string).collect();
            if fields.len() != columns {
                return Err(self.invalid(format!(
                    "{}:{}: expected {columns} tab-separated fields, found {}",
                    path.display(),
                    i + 1,
                    fields.len()
                )));
            }
            rows.push(fields);
        }
        Ok(rows)
    }

    fn number<T: std::str::FromStr>(&self, path: &Path, field: &str) -> Result<T> {
        field
            .parse()
            .map_err(|_| self.invalid(format!("{}: `{field}` is not a number", path.display())))
    }

    fn split_inputs(&self, split: Split) -> Vec<PathBuf> {
        ["documents.tsv", "tokens.tsv", "dependencies.txt"]
            .iter()
            .map(|f| self.split_file(split, f))
            .collect()
    }

    /// `doc_id -> category` from a split's document table.
    fn categories(&self, split: Split) -> Result<BTreeMap<String, String>> {
        let rows = self.table(&self.split_file(split, "documents.tsv"), 6)?;
        Ok(rows.into_iter().map(|r| (r[0].clone(), r[1].clone())).collect())
    }

    /// Rebuilds a corpus from the files written by `ingest`.
    fn read_split(&self, split: Split) -> Result<Corpus> {
        let docs_path = self.split_file(split, "documents.tsv");
        let tokens_path = self.split_file(split, "tokens.tsv");
        let deps_path = self.split_file(split, "dependencies.txt");
        let doc_rows = self.table(&docs_path, 6)?;
        let token_rows = self.table(&tokens_path, 5)?;
        self.require(&deps_path)?;
        let graphs = self.core(parse_dep_file(&deps_path, &AliasMap::empty()))?;

        let mut sentences: BTreeMap<(String, usize), Vec<Token>> = BTreeMap::new();
        for r in &token_rows {
            let index: usize = self.number(&tokens_path, &r[1])?;
            let position: usize = self.number(&tokens_path, &r[2])?;
            let tag = if r[4] == "_" { "" } else { r[4].as_str() };
            sentences
                .entry((r[0].clone(), index))
                .or_default()
                .push(Token::new(r[3].clone(), position, tag));
        }
        let mut parses: HashMap<String, Vec<DepGraph>> = HashMap::new();
        for g in graphs {
            parses.entry(g.doc_id.clone()).or_default().push(g);
        }

        let mut documents = Vec::with_capacity(doc_rows.len());
        for r in doc_rows {
            let doc_id = r[0].clone();
            let label = match r[2].as_str() {
                "?" => None,
                s => Some(s.parse::<Class>().map_err(|e| self.invalid(format!("{}: {e}", docs_path.display())))?),
            };
            let doc_sentences: Vec<Sentence> = sentences
                .range((doc_id.clone(), 0)..=(doc_id.clone(), usize::MAX))
                .map(|((_, index), tokens)| Sentence {
                    doc_id: doc_id.clone(),
                    index: *index,
                    tokens: tokens.clone(),
                })
                .collect();
            let doc_parses = (r[5] == "yes").then(|| {
                let mut g = parses.remove(&doc_id).unwrap_or_default();
                g.sort_by_key(|g| g.sentence_index);
                g
            });
            documents.push(ReviewDocument {
                text: doc_sentences.iter().map(Sentence::text).collect::<Vec<_>>().join(" "),
                doc_id,
                category: r[1].clone(),
                label,
                word_count: self.number(&docs_path, &r[3])?,
                sentences: doc_sentences,
                parses: doc_parses,
            });
        }
        self.core(Corpus::new(documents))
    }

    fn write_split(&self, split: Split, corpus: &Corpus) -> Result<Vec<PathBuf>> {
        let mut docs = String::from("doc_id\tcategory\tlabel\tword_count\tsentences\tparsed\n");
        let mut tokens = String::from("doc_id\tsentence_index\ttoken_index\tsurface\tpos\n");
        let mut sentences = String::from("doc_id\tsentence_index\ttext\n");
        let mut graphs: Vec<DepGraph> = Vec::new();
        for d in &corpus.documents {
            let label = d.label.map_or("?", Class::symbol);
            let parsed = if d.parses.is_some() { "yes" } else { "no" };
            let _ = writeln!(
                docs,
                "{}\t{}\t{label}\t{}\t{}\t{parsed}",
                d.doc_id,
                d.category,
                d.word_count,
                d.sentences.len()
            );
            for s in &d.sentences {
                let _ = writeln!(sentences, "{}\t{}\t{}", d.doc_id, s.index, s.text());
                for t in &s.tokens {
                    let tag = if t.pos_tag.is_empty() { "_" } else { t.pos_tag.as_str() };
                    let _ = writeln!(tokens, "{}\t{}\t{}\t{}\t{tag}", d.doc_id, s.index, t.position, t.surface);
                }
            }
            if let Some(p) = &d.parses {
                graphs.extend(p.iter().filter(|g| !g.tokens.is_empty()).cloned());
            }
        }
        Ok(vec![
            self.write(&self.split_file(split, "documents.tsv"), &docs)?,
            self.write(&self.split_file(split, "tokens.tsv"), &tokens)?,
            self.write(&self.split_file(split, "sentences.tsv"), &sentences)?,
            self.write(&self.split_file(split, "dependencies.txt"), &write_typed(&graphs))?,
        ])
    }

    fn read_dataset(&self, split: Split) -> Result<Dataset> {
        let csv = self.read(&self.split_file(split, "dataset.csv"))?;
        let index = self.read(&self.split_file(split, "dataset_index.tsv"))?;
        self.core(Dataset::from_exports(&csv, &index))
    }

    fn read_triples(&self) -> Result<Vec<Triple>> {
        let text = self.read(&self.out("triples.tsv"))?;
        let mut triples = self.core(parse_triples(&text))?;
        if !self.cfg.include_secondary {
            triples.retain(|t| t.rule != RuleId::R1Secondary);
        }
        Ok(triples)
    }
}

pub fn ingest(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("ingest", cfg);
    let Some(corpus_root) = &cfg.corpus else {
        return Err(CliError::Config(vec!["corpus is not set".into()]));
    };
    let options = st.core(cfg.ingest_options())?;
    let mut manifest = st.manifest();
    let mut sources = vec![(Split::Target, corpus_root.clone(), cfg.labels.clone())];
    if let Some(train_root) = &cfg.train_corpus {
        sources.insert(0, (Split::Train, train_root.clone(), cfg.train_labels.clone()));
    }
    for (split, root, labels) in sources {
        let corpus = st.core(load_corpus(&root, labels.as_deref(), &options))?;
        let unlabeled = corpus.unlabeled().len();
        if labels.is_some() && unlabeled > 0 {
            warn!("{} documents in the {} split have no label", unlabeled, split.dir());
        }
        info!("{} split: {} documents", split.dir(), corpus.len());
        manifest.inputs.push(root);
        manifest.inputs.extend(labels);
        manifest.outputs.extend(st.write_split(split, &corpus)?);
        let prefix = split.dir();
        let sentences: usize = corpus.documents.iter().map(|d| d.sentences.len()).sum();
        let parsed = corpus.documents.iter().filter(|d| d.parses.is_some()).count();
        manifest.extra.push((format!("{prefix}.documents"), corpus.len().to_string()));
        manifest.extra.push((format!("{prefix}.sentences"), sentences.to_string()));
        manifest.extra.push((format!("{prefix}.parsed_documents"), parsed.to_string()));
        manifest.extra.push((format!("{prefix}.unlabeled_documents"), unlabeled.to_string()));
    }
    manifest.inputs.extend(cfg.resource_files());
    st.finish(manifest)
}

pub fn featurize(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("featurize", cfg);
    let lexicons = st.core(cfg.lexicons())?;
    let mut manifest = st.manifest();
    let mut training: Option<Dataset> = None;
    for split in st.splits() {
        manifest.inputs.extend(st.split_inputs(split));
        let corpus = st.read_split(split)?;
        let mode = if split == st.training_split() || corpus.unlabeled().is_empty() {
            DatasetMode::Labeled
        } else {
            DatasetMode::Unlabeled
        };
        let dataset = st.core(build_dataset(&corpus, &lexicons, mode))?;
        manifest.outputs.push(st.write(&st.split_file(split, "dataset.csv"), &dataset.to_csv())?);
        manifest
            .outputs
            .push(st.write(&st.split_file(split, "dataset_index.tsv"), &dataset.to_index_tsv())?);
        let [s, o] = dataset.supports();
        manifest.extra.push((format!("{}.instances", split.dir()), dataset.len().to_string()));
        manifest.extra.push((format!("{}.support.S", split.dir()), s.to_string()));
        manifest.extra.push((format!("{}.support.O", split.dir()), o.to_string()));
        if split == st.training_split() {
            training = Some(dataset);
        }
    }
    let training = training.expect("training split featurized");
    let ranked = st.core(rank_attributes(&training.vectors()))?;
    let mut ig = String::from("attribute\tinformation_gain\n");
    for (a, g) in ranked {
        let _ = writeln!(ig, "{a}\t{g:.6}");
    }
    manifest.outputs.push(st.write(&st.out("information_gain.tsv"), &ig)?);
    manifest.inputs.extend(cfg.resource_files());
    st.finish(manifest)
}

fn accuracy(model: &impl TokenClassifier, test: &[FeatureVector]) -> f64 {
    let correct = test
        .iter()
        .filter(|v| Some(model.predict_token(v).class) == v.class_label)
        .count();
    correct as f64 / test.len() as f64
}

pub fn train_model(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("train", cfg);
    let split = st.training_split();
    let path = st.split_file(split, "dataset.csv");
    let vectors = st.core(parse_dataset_csv(&st.read(&path)?))?;
    let model = st.core(train(&vectors, cfg.nb_params()))?;
    let mut manifest = st.manifest();
    manifest.inputs.push(path);
    manifest.outputs.push(st.write(&st.out("model.txt"), &model.to_text())?);
    manifest.extra.push(("instances".into(), vectors.len().to_string()));

    if cfg.cv_folds >= 2 {
        let folds = st.core(k_fold(vectors.len(), cfg.cv_folds, cfg.seed))?;
        let mut report = String::from("fold\ttrain\ttest\taccuracy\n");
        let mut total = 0.0;
        for (i, (train_idx, test_idx)) in folds.iter().enumerate() {
            let pick = |idx: &[usize]| idx.iter().map(|&j| vectors[j]).collect::<Vec<_>>();
            let fold_model = st.core(train(&pick(train_idx), cfg.nb_params()))?;
            let acc = accuracy(&fold_model, &pick(test_idx));
            total += acc;
            let _ = writeln!(report, "{}\t{}\t{}\t{acc:.6}", i + 1, train_idx.len(), test_idx.len());
        }
        let _ = writeln!(report, "mean\t\t\t{:.6}", total / folds.len() as f64);
        manifest.outputs.push(st.write(&st.out("cross_validation.tsv"), &report)?);
    }
    st.finish(manifest)
}

pub fn classify(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("classify", cfg);
    let model_path = st.out("model.txt");
    let model = st.core(NbModel::from_text(&st.read(&model_path)?))?;
    let dataset = st.read_dataset(Split::Target)?;
    let corpus = st.read_split(Split::Target)?;

    let mut by_sentence: HashMap<(&str, usize), Vec<FeatureVector>> = HashMap::new();
    let mut tokens = String::from("doc_id\tsentence_index\ttoken_index\tunigram\tactual\tpredicted\tsubjective_probability\n");
    for r in &dataset.rows {
        by_sentence
            .entry((r.doc_id.as_str(), r.sentence_index))
            .or_default()
            .push(r.vector);
        let p = predict_token(&model, &r.vector);
        let _ = writeln!(
            tokens,
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}",
            r.doc_id,
            r.sentence_index,
            r.token_index,
            r.unigram,
            r.vector.class_label.map_or("?", Class::symbol),
            p.class,
            p.subjective_probability
        );
    }

    let mut predictions = String::from("doc_id\tsentence_index\tlabel\tsubjective_probability\n");
    let (mut total, mut subjective) = (0usize, 0usize);
    for d in &corpus.documents {
        for s in &d.sentences {
            let (label, p) = match by_sentence.get(&(d.doc_id.as_str(), s.index)) {
                Some(v) => {
                    let verdict = st.core(classify_sentence(&model, v))?;
                    (verdict.label, verdict.subjective_probability)
                }
                None => (Class::Objective, 0.0),
            };
            total += 1;
            subjective += usize::from(label == Class::Subjective);
            let _ = writeln!(predictions, "{}\t{}\t{label}\t{p:.6}", d.doc_id, s.index);
        }
    }
    let mut manifest = st.manifest();
    manifest.inputs.push(model_path);
    manifest.inputs.push(st.split_file(Split::Target, "dataset.csv"));
    manifest.inputs.push(st.split_file(Split::Target, "dataset_index.tsv"));
    manifest.inputs.extend(st.split_inputs(Split::Target));
    manifest.outputs.push(st.write(&st.out("predictions.tsv"), &predictions)?);
    manifest.outputs.push(st.write(&st.out("token_scores.tsv"), &tokens)?);
    manifest.extra.push(("sentences".into(), total.to_string()));
    manifest.extra.push(("subjective_sentences".into(), subjective.to_string()));
    st.finish(manifest)
}

pub fn extract(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("extract", cfg);
    let lexicons = st.core(cfg.lexicons())?;
    let pred_path = st.out("predictions.tsv");
    let rows = st.table(&pred_path, 4)?;
    let corpus = st.read_split(Split::Target)?;
    let mut subjective = Vec::new();
    for r in &rows {
        if r[2] == Class::Subjective.symbol() {
            subjective.push((r[0].clone(), st.number::<usize>(&pred_path, &r[1])?));
        }
    }
    let graphs = subjective
        .iter()
        .map(|(doc, idx)| corpus.document(doc).and_then(|d| d.parse_for(*idx)));
    let extraction = extract_triples(graphs, &lexicons.stop_words);
    if extraction.skipped > 0 {
        warn!("{} subjective sentences have no dependency parse", extraction.skipped);
    }
    let mut manifest = st.manifest();
    manifest.inputs.push(pred_path);
    manifest.inputs.extend(st.split_inputs(Split::Target));
    manifest.inputs.extend(cfg.resource_files());
    manifest
        .outputs
        .push(st.write(&st.out("triples.tsv"), &format_triples(&extraction.triples))?);
    manifest.extra.push(("subjective_sentences".into(), subjective.len().to_string()));
    manifest.extra.push(("skipped_unparsed".into(), extraction.skipped.to_string()));
    manifest.extra.push(("triples".into(), extraction.triples.len().to_string()));
    st.finish(manifest)
}

pub fn score(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("score", cfg);
    let triples = st.read_triples()?;
    let categories = st.categories(Split::Target)?;
    let mut grouped: BTreeMap<&str, Vec<Triple>> = BTreeMap::new();
    for t in &triples {
        let cat = categories
            .get(&t.doc_id)
            .ok_or_else(|| st.invalid(format!("triple from unknown document `{}`", t.doc_id)))?;
        grouped.entry(cat.as_str()).or_default().push(t.clone());
    }

    let mut pairs = format!("{PAIR_REPORT_HEADER}\n");
    let mut docs = format!("{DOCUMENT_REPORT_HEADER}\n");
    let mut feasible = format!("{PAIR_REPORT_HEADER}\n");
    let mut removed = format!("{PAIR_REPORT_HEADER}\n");
    let mut manifest = st.manifest();
    for (cat, ts) in &grouped {
        let graph = st.core(build_graph(ts, cat))?;
        let table = score_graph(&graph, cfg.hits_params());
        if !table.converged {
            warn!("{cat}: no convergence after {} iterations", table.iterations);
        }
        let split = st.core(filter_noisy(&table.pairs, cfg.tau))?;
        pairs.push_str(&format_pair_rows(cat, &table.pairs));
        docs.push_str(&format_document_rows(&table));
        feasible.push_str(&format_pair_rows(cat, &split.kept));
        removed.push_str(&format_pair_rows(cat, &split.removed));
        manifest.extra.push((format!("category.{cat}.converged"), table.converged.to_string()));
        manifest.extra.push((format!("category.{cat}.iterations"), table.iterations.to_string()));
        manifest.extra.push((format!("category.{cat}.pairs"), table.pairs.len().to_string()));
        manifest.extra.push((format!("category.{cat}.removed"), split.removed.len().to_string()));
    }
    manifest.inputs.push(st.out("triples.tsv"));
    manifest.inputs.push(st.split_file(Split::Target, "documents.tsv"));
    manifest.outputs.push(st.write(&st.out("pair_scores.tsv"), &pairs)?);
    manifest.outputs.push(st.write(&st.out("document_scores.tsv"), &docs)?);
    manifest.outputs.push(st.write(&st.out("feasible_pairs.tsv"), &feasible)?);
    manifest.outputs.push(st.write(&st.out("removed_pairs.tsv"), &removed)?);
    st.finish(manifest)
}

pub fn evaluate(cfg: &PipelineConfig) -> Result<()> {
    let st = Stage::new("evaluate", cfg);
    let Some(gold_path) = &cfg.gold_pairs else {
        return Err(CliError::Config(vec!["gold_pairs is not set".into()]));
    };
    let gold = st.core(read_gold_pairs(gold_path))?;
    if gold.is_empty() {
        return Err(st.invalid("no gold pairs"));
    }
    let triples = st.read_triples()?;
    let categories = st.categories(Split::Target)?;
    let feasible_path = st.out("feasible_pairs.tsv");
    let feasible: BTreeSet<(String, String, String)> = st
        .table(&feasible_path, 6)?
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone(), r[2].clone()))
        .collect();
    let category_of = |d: &str| categories.get(d).cloned();

    let before = st.core(evaluate_extraction(&triples, &gold, category_of))?;
    let kept: Vec<Triple> = triples
        .iter()
        .filter(|t| {
            let (f, o) = t.pair_key();
            category_of(&t.doc_id).is_some_and(|c| feasible.contains(&(c, f, o)))
        })
        .cloned()
        .collect();
    let after = st.core(evaluate_extraction(&kept, &gold, category_of))?;
    let report = format!(
        "Before noise filtering\n{}\nAfter noise filtering (tau = {})\n{}",
        format_extraction_text(&before),
        cfg.tau,
        format_extraction_text(&after)
    );

    let mut manifest = st.manifest();
    manifest.inputs.push(gold_path.clone());
    manifest.inputs.push(st.out("triples.tsv"));
    manifest.inputs.push(feasible_path);
    manifest.inputs.push(st.split_file(Split::Target, "documents.tsv"));
    manifest.outputs.push(st.write(&st.out("extraction_report.txt"), &report)?);
    manifest
        .outputs
        .push(st.write(&st.out("extraction_before.tsv"), &format_extraction_tsv(&before))?);
    manifest
        .outputs
        .push(st.write(&st.out("extraction_after.tsv"), &format_extraction_tsv(&after))?);

    let scores_path = st.out("token_scores.tsv");
    if scores_path.is_file() {
        manifest.inputs.push(scores_path.clone());
        let rows = st.table(&scores_path, 7)?;
        if rows.iter().any(|r| r[4] == "?") {
            info!("target split is unlabeled; skipping classifier metrics");
        } else {
            let mut pairs = Vec::with_capacity(rows.len());
            let mut scored = Vec::with_capacity(rows.len());
            for r in &rows {
                let parse = |s: &str| s.parse::<Class>().map_err(|e| st.invalid(e));
                let actual = parse(&r[4])?;
                pairs.push((parse(&r[5])?, actual));
                scored.push((st.number::<f64>(&scores_path, &r[6])?, actual));
            }
            if let Ok((class_rows, weighted)) = classification_report(&pairs) {
                manifest.outputs.push(st.write(
                    &st.out("classification.tsv"),
                    &format_classification_tsv(&class_rows, &weighted),
                )?);
            }
            match roc_points(&scored) {
                Ok(points) => manifest.outputs.push(st.write(&st.out("roc.csv"), &format_roc_csv(&points))?),
                Err(e) => warn!("no ROC curve: {e}"),
            }
        }
    }
    st.finish(manifest)
}

/// Every stage in order; evaluation runs only when gold pairs are configured.
pub fn pipeline(cfg: &PipelineConfig) -> Result<()> {
    ingest(cfg)?;
    featurize(cfg)?;
    train_model(cfg)?;
    classify(cfg)?;
    extract(cfg)?;
    score(cfg)?;
    if cfg.gold_pairs.is_some() {
        evaluate(cfg)?;
    } else {
        info!("gold_pairs not set; skipping evaluation");
    }
    Ok(())
}
