use std::collections::HashMap;
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use super::rules::{RuleSet, WordConversion};
use super::{G2pError, RuleFileError};
use crate::stream::IpaSegment;

/// Pronunciation dictionary keyed by case-folded word.
///
/// File format: `word<TAB>seg seg seg`, one entry per line, `#` comments.
/// When a word repeats, the first pronunciation is kept.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, Vec<IpaSegment>>,
}

fn fold_case(word: &str) -> String {
    word.nfc().collect::<String>().to_lowercase()
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, segments: Vec<IpaSegment>) {
        self.entries.entry(fold_case(word)).or_insert(segments);
    }

    pub fn get(&self, word: &str) -> Option<&[IpaSegment]> {
        self.entries.get(&fold_case(word)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, RuleFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| RuleFileError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, RuleFileError> {
        let mut lexicon = Lexicon::new();
        for (number, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (word, pron) = line
                .split_once('\t')
                .ok_or_else(|| RuleFileError::line(number + 1, "expected `word<TAB>segments`"))?;
            let word = word.trim();
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(RuleFileError::line(number + 1, format!("bad lexicon word {word:?}")));
            }
            let segments =
                crate::stream::parse_segments(pron).map_err(|e| RuleFileError::line(number + 1, e.to_string()))?;
            lexicon.insert(word, segments);
        }
        Ok(lexicon)
    }

    /// Dictionary lookup, falling back to `fallback` rules on a miss.
    pub fn convert(&self, fallback: Option<&RuleSet>, word: &str) -> Result<WordConversion, G2pError> {
        if let Some(segments) = self.get(word) {
            return Ok(WordConversion {
                segments: segments.to_vec(),
                unmapped: Vec::new(),
            });
        }
        match fallback {
            Some(rules) => Ok(rules.convert(word)),
            None => Err(G2pError::OutOfVocabulary(word.to_string())),
        }
    }
}
