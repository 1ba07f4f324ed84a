//! Subjectivity classification, feature-opinion extraction and reliability
//! scoring for product reviews.
//!
//! The modules follow the pipeline order: [`corpus`] and [`deps`] load the
//! review documents and their dependency parses, [`features`] turns every
//! unigram into a six-attribute vector, [`classifier`] labels sentences with
//! naive Bayes, [`rules`] pulls feature-opinion triples out of subjective
//! sentences, [`reliability`] scores the pairs, and [`evaluation`] measures
//! the results.

pub mod classifier;
pub mod corpus;
pub mod deps;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod info_gain;
pub mod lexicon;
pub mod reliability;
pub mod rules;

pub use corpus::{Class, Corpus, ReviewDocument, Sentence, Token};
pub use deps::{AliasMap, DepGraph, Edge};
pub use error::{Error, Result};
pub use features::{Attribute, Dataset, FeatureVector};
pub use lexicon::Lexicons;
pub use rules::{RuleId, Triple};
