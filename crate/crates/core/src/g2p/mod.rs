//! Orthography to phoneme streams.
//!
//! A [`Backend`] converts one word at a time; [`Backend::convert_utterance`]
//! splits an utterance into words, drops punctuation-only words, and joins
//! the results into a [`PhonemeStream`]. The output is uncorrected: folding
//! onto an inventory happens afterwards.

pub mod lexicon;
pub mod rules;
pub mod syllable;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::glyph;
use crate::stream::{PhonemeStream, SegmentError, StreamToken};

pub use lexicon::Lexicon;
pub use rules::{Context, GraphemeMap, RewriteRule, RuleSet, UnmappedReport, WordConversion};
pub use syllable::{NucleusRule, PendingSyllable, SyllableEntry, SyllableTable};

#[derive(Debug, Error)]
pub enum G2pError {
    #[error("word {0:?} is not in the lexicon")]
    OutOfVocabulary(String),
    #[error("cannot split {text:?} into syllables at offset {offset}")]
    Segmentation { text: String, offset: usize },
    #[error("syllable {0:?} is not in the table")]
    UnknownSyllable(String),
    #[error("no nucleus in syllable [{syllable}] to carry tone {tone}")]
    ToneAttachment { syllable: String, tone: String },
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error("word {index} ({word:?}): {source}")]
    Word {
        index: usize,
        word: String,
        #[source]
        source: Box<G2pError>,
    },
}

#[derive(Debug, Error)]
pub enum RuleFileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
}

impl RuleFileError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RuleFileError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn line(line: usize, message: impl Into<String>) -> Self {
        RuleFileError::Line {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Rules(RuleSet),
    Lexicon {
        lexicon: Lexicon,
        fallback: Option<RuleSet>,
    },
    Syllabary {
        table: SyllableTable,
        split_tones: bool,
    },
    /// Input lines are already phoneme streams, e.g. output of an external tool.
    Passthrough,
}

/// A converted utterance and the characters the backend could not map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Conversion {
    pub stream: PhonemeStream,
    pub unmapped: UnmappedReport,
}

fn is_punctuation_only(word: &str) -> bool {
    word.chars().all(glyph::is_punctuation)
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Rules(_) => "rules",
            Backend::Lexicon { .. } => "lexicon",
            Backend::Syllabary { .. } => "syllabary",
            Backend::Passthrough => "passthrough",
        }
    }

    pub fn convert_word(&self, word: &str) -> Result<WordConversion, G2pError> {
        match self {
            Backend::Rules(rules) => Ok(rules.convert(word)),
            Backend::Lexicon { lexicon, fallback } => lexicon.convert(fallback.as_ref(), word),
            Backend::Syllabary { table, split_tones } => Ok(WordConversion {
                segments: table.convert(word, *split_tones)?,
                unmapped: Vec::new(),
            }),
            Backend::Passthrough => Ok(WordConversion {
                segments: crate::stream::parse_segments(word)?,
                unmapped: Vec::new(),
            }),
        }
    }

    /// Converts one utterance. Word boundaries go between words when
    /// `keep_word_boundaries` is set; errors name the failing word.
    pub fn convert_utterance(&self, text: &str, keep_word_boundaries: bool) -> Result<Conversion, G2pError> {
        if let Backend::Passthrough = self {
            let stream = PhonemeStream::parse(text);
            let stream = if keep_word_boundaries {
                stream
            } else {
                stream.without_word_boundaries()
            };
            return Ok(Conversion {
                stream,
                unmapped: UnmappedReport::default(),
            });
        }

        let mut tokens = Vec::new();
        let mut unmapped = UnmappedReport::default();
        // punctuation glued to a word edge ("cha,") is trimmed; inner
        // punctuation such as apostrophes reaches the backend
        let words = text
            .split_whitespace()
            .filter(|w| !is_punctuation_only(w))
            .map(|w| w.trim_matches(glyph::is_punctuation));
        for (index, word) in words.enumerate() {
            let converted = self.convert_word(word).map_err(|source| G2pError::Word {
                index,
                word: word.to_string(),
                source: Box::new(source),
            })?;
            if index > 0 && keep_word_boundaries {
                tokens.push(StreamToken::WordBoundary);
            }
            tokens.extend(converted.segments.into_iter().map(StreamToken::Segment));
            unmapped.record(&converted.unmapped);
        }
        tokens.push(StreamToken::UttBoundary);
        Ok(Conversion {
            stream: PhonemeStream::from_tokens(tokens),
            unmapped,
        })
    }
}
