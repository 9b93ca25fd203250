//! The phoneme stream: IPA segments separated by single spaces, with
//! reserved word and utterance boundary tokens.
//!
//! ```
//! use phonostream::stream::PhonemeStream;
//!
//! let s = PhonemeStream::parse("ɛ n dʒ ɔɪ WORD_BOUNDARY");
//! assert_eq!(s.segment_count(), 4);
//! assert_eq!(s.emit(true), "ɛ n dʒ ɔɪ WORD_BOUNDARY");
//! assert_eq!(s.emit(false), "ɛ n dʒ ɔɪ");
//! ```
//!
//! Streams are kept in a canonical form: no repeated word boundaries, no word
//! boundary touching an utterance boundary, and no utterance boundary at
//! either end (the end of a line already ends the utterance).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const WORD_BOUNDARY: &str = "WORD_BOUNDARY";
pub const UTT_BOUNDARY: &str = "UTT_BOUNDARY";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("empty segment")]
    Empty,
    #[error("segment {0:?} contains whitespace")]
    Whitespace(String),
    #[error("segment {0:?} is a reserved boundary literal")]
    Reserved(String),
}

/// One phoneme, stored in canonical decomposition.
///
/// Multi-character phonemes such as `dʒ` or `ɔɪ` are a single segment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IpaSegment(String);

impl IpaSegment {
    pub fn new(text: &str) -> Result<Self, SegmentError> {
        let normalized: String = text.nfd().collect();
        if normalized.is_empty() {
            return Err(SegmentError::Empty);
        }
        if normalized.chars().any(char::is_whitespace) {
            return Err(SegmentError::Whitespace(normalized));
        }
        if normalized == WORD_BOUNDARY || normalized == UTT_BOUNDARY {
            return Err(SegmentError::Reserved(normalized));
        }
        Ok(IpaSegment(normalized))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for IpaSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for IpaSegment {
    type Err = SegmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IpaSegment::new(s)
    }
}

impl TryFrom<String> for IpaSegment {
    type Error = SegmentError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        IpaSegment::new(&value)
    }
}

impl From<IpaSegment> for String {
    fn from(seg: IpaSegment) -> String {
        seg.0
    }
}

impl AsRef<str> for IpaSegment {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Parses a space-separated list of segments, e.g. a rule right-hand side.
pub fn parse_segments(text: &str) -> Result<Vec<IpaSegment>, SegmentError> {
    text.split_whitespace().map(IpaSegment::new).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StreamToken {
    Segment(IpaSegment),
    WordBoundary,
    UttBoundary,
}

impl StreamToken {
    pub fn as_segment(&self) -> Option<&IpaSegment> {
        match self {
            StreamToken::Segment(seg) => Some(seg),
            _ => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        !matches!(self, StreamToken::Segment(_))
    }

    fn as_str(&self) -> &str {
        match self {
            StreamToken::Segment(seg) => seg.as_str(),
            StreamToken::WordBoundary => WORD_BOUNDARY,
            StreamToken::UttBoundary => UTT_BOUNDARY,
        }
    }

    fn parse(token: &str) -> Self {
        match token {
            WORD_BOUNDARY => StreamToken::WordBoundary,
            UTT_BOUNDARY => StreamToken::UttBoundary,
            // callers hand in non-empty whitespace-free tokens
            other => StreamToken::Segment(IpaSegment::new(other).expect("non-empty token")),
        }
    }
}

impl From<IpaSegment> for StreamToken {
    fn from(seg: IpaSegment) -> Self {
        StreamToken::Segment(seg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PhonemeStream {
    tokens: Vec<StreamToken>,
}

impl PhonemeStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a stream, dropping boundaries that would break the canonical form.
    pub fn from_tokens<I>(tokens: I) -> Self
    where
        I: IntoIterator<Item = StreamToken>,
    {
        let mut out: Vec<StreamToken> = Vec::new();
        for token in tokens {
            match token {
                StreamToken::Segment(_) => out.push(token),
                StreamToken::WordBoundary => match out.last() {
                    Some(StreamToken::WordBoundary) | Some(StreamToken::UttBoundary) => {}
                    _ => out.push(token),
                },
                StreamToken::UttBoundary => {
                    while out.last() == Some(&StreamToken::WordBoundary) {
                        out.pop();
                    }
                    match out.last() {
                        None | Some(StreamToken::UttBoundary) => {}
                        _ => out.push(token),
                    }
                }
            }
        }
        if out.last() == Some(&StreamToken::UttBoundary) {
            out.pop();
        }
        PhonemeStream { tokens: out }
    }

    pub fn from_segments<I>(segments: I) -> Self
    where
        I: IntoIterator<Item = IpaSegment>,
    {
        PhonemeStream {
            tokens: segments.into_iter().map(StreamToken::Segment).collect(),
        }
    }

    /// Parses one line. Total: every line yields a stream.
    pub fn parse(line: &str) -> Self {
        Self::from_tokens(line.split_whitespace().map(StreamToken::parse))
    }

    /// Single-space-joined tokens; word boundaries only when `keep_word_boundaries`.
    pub fn emit(&self, keep_word_boundaries: bool) -> String {
        let mut out = String::new();
        for token in &self.tokens {
            if !keep_word_boundaries && *token == StreamToken::WordBoundary {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(token.as_str());
        }
        out
    }

    pub fn tokens(&self) -> &[StreamToken] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<StreamToken> {
        self.tokens
    }

    pub fn segments(&self) -> impl Iterator<Item = &IpaSegment> + '_ {
        self.tokens.iter().filter_map(StreamToken::as_segment)
    }

    pub fn segment_count(&self) -> usize {
        self.segments().count()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Distinct segments of the stream, boundaries excluded.
    pub fn segment_types(&self) -> BTreeSet<IpaSegment> {
        self.segments().cloned().collect()
    }

    /// Same stream with every word boundary removed.
    pub fn without_word_boundaries(&self) -> Self {
        PhonemeStream {
            tokens: self
                .tokens
                .iter()
                .filter(|t| **t != StreamToken::WordBoundary)
                .cloned()
                .collect(),
        }
    }

    /// Splits at utterance boundaries.
    pub fn utterances(&self) -> Vec<PhonemeStream> {
        self.tokens
            .split(|t| *t == StreamToken::UttBoundary)
            .map(|part| PhonemeStream::from_tokens(part.iter().cloned()))
            .collect()
    }

    /// Joins utterances with utterance boundaries.
    pub fn join_utterances<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a PhonemeStream>,
    {
        let mut tokens = Vec::new();
        for part in parts {
            tokens.extend(part.tokens.iter().cloned());
            tokens.push(StreamToken::UttBoundary);
        }
        Self::from_tokens(tokens)
    }
}

impl fmt::Display for PhonemeStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit(true))
    }
}

impl FromStr for PhonemeStream {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(PhonemeStream::parse(s))
    }
}

/// Distinct segments over several streams.
pub fn segment_types<'a, I>(streams: I) -> BTreeSet<IpaSegment>
where
    I: IntoIterator<Item = &'a PhonemeStream>,
{
    streams.into_iter().flat_map(|s| s.segments().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seg(s: &str) -> StreamToken {
        StreamToken::Segment(IpaSegment::new(s).unwrap())
    }

    #[test]
    fn parses_enjoy() {
        let s = PhonemeStream::parse("ɛ n dʒ ɔɪ WORD_BOUNDARY");
        assert_eq!(
            s.tokens(),
            &[seg("ɛ"), seg("n"), seg("dʒ"), seg("ɔɪ"), StreamToken::WordBoundary]
        );
    }

    #[test]
    fn parses_empty_line() {
        assert!(PhonemeStream::parse("").is_empty());
        assert!(PhonemeStream::parse("   \t ").is_empty());
    }

    #[test]
    fn repairs_adjacent_boundaries() {
        let s = PhonemeStream::parse("a  WORD_BOUNDARY WORD_BOUNDARY b");
        assert_eq!(s.tokens(), &[seg("a"), StreamToken::WordBoundary, seg("b")]);

        let s = PhonemeStream::parse("a WORD_BOUNDARY UTT_BOUNDARY WORD_BOUNDARY b UTT_BOUNDARY");
        assert_eq!(s.tokens(), &[seg("a"), StreamToken::UttBoundary, seg("b")]);

        let s = PhonemeStream::parse("UTT_BOUNDARY UTT_BOUNDARY a");
        assert_eq!(s.tokens(), &[seg("a")]);
    }

    #[test]
    fn emits() {
        let s = PhonemeStream::parse("ɛ n dʒ ɔɪ WORD_BOUNDARY");
        assert_eq!(s.emit(true), "ɛ n dʒ ɔɪ WORD_BOUNDARY");
        assert_eq!(PhonemeStream::new().emit(true), "");
        let s = PhonemeStream::parse("a WORD_BOUNDARY b");
        assert_eq!(s.emit(false), "a b");
        let s = PhonemeStream::parse("a UTT_BOUNDARY b");
        assert_eq!(s.emit(false), "a UTT_BOUNDARY b");
    }

    #[test]
    fn segment_types_keep_multichar_atomic() {
        let types = PhonemeStream::parse("a b a WORD_BOUNDARY").segment_types();
        assert_eq!(types.len(), 2);
        assert!(PhonemeStream::new().segment_types().is_empty());
        let types = PhonemeStream::parse("dʒ d ʒ").segment_types();
        let texts: Vec<_> = types.iter().map(IpaSegment::as_str).collect();
        assert_eq!(texts, ["d", "dʒ", "ʒ"]);
    }

    #[test]
    fn segment_rejects_invalid() {
        assert_eq!(IpaSegment::new(""), Err(SegmentError::Empty));
        assert!(matches!(IpaSegment::new("a b"), Err(SegmentError::Whitespace(_))));
        assert!(matches!(
            IpaSegment::new("WORD_BOUNDARY"),
            Err(SegmentError::Reserved(_))
        ));
    }

    #[test]
    fn canonically_equivalent_segments_are_equal() {
        // precomposed ã versus a + combining tilde
        let composed = IpaSegment::new("\u{00E3}").unwrap();
        let decomposed = IpaSegment::new("a\u{0303}").unwrap();
        assert_eq!(composed, decomposed);
        assert_eq!(composed.as_str().chars().count(), 2);
    }

    #[test]
    fn utterances_split_and_join() {
        let s = PhonemeStream::parse("a b UTT_BOUNDARY c");
        let parts = s.utterances();
        assert_eq!(parts.len(), 2);
        assert_eq!(PhonemeStream::join_utterances(&parts), s);
    }

    fn token_strategy() -> impl Strategy<Value = String> {
        prop_oneof![
            6 => prop::sample::select(vec!["a", "b", "dʒ", "ɔɪ", "ã", "a˥", "tʰ", "n̪"]).prop_map(String::from),
            2 => Just(WORD_BOUNDARY.to_string()),
            1 => Just(UTT_BOUNDARY.to_string()),
        ]
    }

    proptest! {
        #[test]
        fn segment_normalization_is_idempotent(text in "[a-zɛɔʒ\u{0300}-\u{036F}ː]{1,6}") {
            let once = IpaSegment::new(&text).unwrap();
            let twice = IpaSegment::new(once.as_str()).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn emit_parse_round_trip(tokens in prop::collection::vec(token_strategy(), 0..40)) {
            let s = PhonemeStream::parse(&tokens.join(" "));
            prop_assert_eq!(PhonemeStream::parse(&s.emit(true)), s.clone());
            prop_assert!(!s.emit(false).contains(WORD_BOUNDARY));
        }
    }
}
