//! Word lists used by featurization and the rule engine.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const POSITIVE_SEEDS: &str = include_str!("../resources/positive_seeds.txt");
const NEGATIVE_SEEDS: &str = include_str!("../resources/negative_seeds.txt");
const NEGATION: &str = include_str!("../resources/negation.txt");
const MODIFIERS: &str = include_str!("../resources/modifiers.txt");
const STOP_WORDS: &str = include_str!("../resources/stop_words.txt");

/// A lowercased word set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordList(BTreeSet<String>);

impl WordList {
    /// One word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        WordList(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(WordList::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl<S: Into<String>> FromIterator<S> for WordList {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        WordList(iter.into_iter().map(|w| w.into().to_lowercase()).collect())
    }
}

/// The word lists shipped with the crate.
pub mod bundled {
    use super::WordList;

    pub fn positive_seeds() -> WordList {
        WordList::parse(super::POSITIVE_SEEDS)
    }

    pub fn negative_seeds() -> WordList {
        WordList::parse(super::NEGATIVE_SEEDS)
    }

    pub fn negation_words() -> WordList {
        WordList::parse(super::NEGATION)
    }

    pub fn modifier_words() -> WordList {
        WordList::parse(super::MODIFIERS)
    }

    pub fn stop_words() -> WordList {
        WordList::parse(super::STOP_WORDS)
    }
}

#[derive(Debug, Clone)]
pub struct Lexicons {
    positive_seeds: WordList,
    negative_seeds: WordList,
    pub negation_words: WordList,
    pub modifier_words: WordList,
    pub stop_words: WordList,
}

impl Default for Lexicons {
    fn default() -> Self {
        Lexicons::new(
            bundled::positive_seeds(),
            bundled::negative_seeds(),
            bundled::negation_words(),
            bundled::modifier_words(),
            bundled::stop_words(),
        )
        .expect("bundled seed lists are disjoint")
    }
}

impl Lexicons {
    /// Fails if a word is both a positive and a negative seed.
    pub fn new(
        positive_seeds: WordList,
        negative_seeds: WordList,
        negation_words: WordList,
        modifier_words: WordList,
        stop_words: WordList,
    ) -> Result<Self> {
        let overlap: Vec<&str> = positive_seeds
            .iter()
            .filter(|w| negative_seeds.contains(w))
            .collect();
        if !overlap.is_empty() {
            return Err(Error::InvalidInput(format!(
                "words listed as both positive and negative seeds: {}",
                overlap.join(", ")
            )));
        }
        Ok(Lexicons {
            positive_seeds,
            negative_seeds,
            negation_words,
            modifier_words,
            stop_words,
        })
    }

    pub fn positive_seeds(&self) -> &WordList {
        &self.positive_seeds
    }

    pub fn negative_seeds(&self) -> &WordList {
        &self.negative_seeds
    }

    /// Stop-word test used when building datasets. Cue words (negations,
    /// modifiers, seeds) are kept even if the stop list names them, since
    /// their attributes would otherwise never fire.
    pub fn is_filtered(&self, normalized: &str) -> bool {
        self.stop_words.contains(normalized)
            && !self.negation_words.contains(normalized)
            && !self.modifier_words.contains(normalized)
            && !self.positive_seeds.contains(normalized)
            && !self.negative_seeds.contains(normalized)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_load() {
        let l = Lexicons::default();
        assert!(l.positive_seeds().contains("amazing"));
        assert!(l.negative_seeds().contains("faulty"));
        assert!(l.modifier_words.contains("really"));
        assert!(l.negation_words.contains("n't"));
        assert!(l.stop_words.len() > 100);
    }

    #[test]
    fn overlapping_seeds_rejected() {
        let err = Lexicons::new(
            ["good", "fine"].into_iter().collect(),
            ["fine"].into_iter().collect(),
            WordList::default(),
            WordList::default(),
            WordList::default(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("fine"));
    }

    #[test]
    fn cue_words_survive_stop_filter() {
        let l = Lexicons::new(
            WordList::default(),
            WordList::default(),
            ["not"].into_iter().collect(),
            WordList::default(),
            ["not", "the"].into_iter().collect(),
        )
        .unwrap();
        assert!(!l.is_filtered("not"));
        assert!(l.is_filtered("the"));
    }

    #[test]
    fn word_list_parse_skips_comments() {
        let w = WordList::parse("# header\nGood\n\n  nice \n");
        assert_eq!(w.iter().collect::<Vec<_>>(), ["good", "nice"]);
    }
}
