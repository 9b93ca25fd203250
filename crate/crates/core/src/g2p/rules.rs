//! Rewrite-rule backend: grapheme pre-rules, a greedy grapheme map, and
//! phoneme post-rules.
//!
//! Rule file layout:
//!
//! ```text
//! # comment
//! pre:
//! ph -> f
//! c -> s / _ e
//! map:
//! ch -> tʃ
//! c -> k
//! a -> a
//! post:
//! d ʒ -> dʒ
//! n -> ŋ / _ k
//! s -> z / a _ #
//! ```
//!
//! A rule is `lhs -> rhs`, optionally followed by `/ left _ right`. `#` at
//! the outer edge of a context anchors it to the word edge. An empty rhs or
//! `∅` deletes. Pre-rule sides are grapheme strings (spaces ignored);
//! post-rule sides are space-separated segments.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use super::RuleFileError;
use crate::stream::IpaSegment;

const EMPTY_MARK: &str = "∅";
const ANCHOR: &str = "#";

/// Literal context on one side of a rewrite target.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Context<T> {
    pub items: Vec<T>,
    /// The context must reach the word edge.
    pub anchored: bool,
}

impl<T: PartialEq> Context<T> {
    fn matches_left(&self, input: &[T], at: usize) -> bool {
        let n = self.items.len();
        at >= n && input[at - n..at] == self.items[..] && (!self.anchored || at == n)
    }

    fn matches_right(&self, input: &[T], at: usize) -> bool {
        let n = self.items.len();
        at + n <= input.len() && input[at..at + n] == self.items[..] && (!self.anchored || at + n == input.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule<T> {
    pub target: Vec<T>,
    pub replacement: Vec<T>,
    pub left: Context<T>,
    pub right: Context<T>,
}

impl<T: PartialEq + Clone> RewriteRule<T> {
    pub fn new(target: Vec<T>, replacement: Vec<T>) -> Self {
        assert!(!target.is_empty(), "rewrite target must be non-empty");
        RewriteRule {
            target,
            replacement,
            left: Context {
                items: Vec::new(),
                anchored: false,
            },
            right: Context {
                items: Vec::new(),
                anchored: false,
            },
        }
    }

    pub fn with_context(mut self, left: Context<T>, right: Context<T>) -> Self {
        self.left = left;
        self.right = right;
        self
    }

    /// One left-to-right pass replacing non-overlapping matches. Contexts are
    /// checked against the input of the pass, not the partial output.
    pub fn apply(&self, input: &[T]) -> Vec<T> {
        let n = self.target.len();
        let mut out = Vec::with_capacity(input.len());
        let mut i = 0;
        while i < input.len() {
            if i + n <= input.len()
                && input[i..i + n] == self.target[..]
                && self.left.matches_left(input, i)
                && self.right.matches_right(input, i + n)
            {
                out.extend_from_slice(&self.replacement);
                i += n;
            } else {
                out.push(input[i].clone());
                i += 1;
            }
        }
        out
    }
}

/// Grapheme strings mapped to segment sequences, matched longest first.
#[derive(Debug, Clone, Default)]
pub struct GraphemeMap {
    entries: Vec<(String, Vec<IpaSegment>)>,
    index: HashMap<String, usize>,
    max_len: usize,
}

impl GraphemeMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry. When a grapheme string repeats, the first entry wins.
    pub fn insert(&mut self, grapheme: &str, segments: Vec<IpaSegment>) {
        let key: String = grapheme.nfc().collect();
        assert!(!key.is_empty(), "grapheme string must be non-empty");
        self.max_len = self.max_len.max(key.chars().count());
        self.index.entry(key.clone()).or_insert(self.entries.len());
        self.entries.push((key, segments));
    }

    pub fn entries(&self) -> &[(String, Vec<IpaSegment>)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Longest entry matching at the start of `chars`, with its length.
    pub fn longest_match(&self, chars: &[char]) -> Option<(usize, &[IpaSegment])> {
        let mut key = String::new();
        for len in (1..=self.max_len.min(chars.len())).rev() {
            key.clear();
            key.extend(&chars[..len]);
            if let Some(&i) = self.index.get(&key) {
                return Some((len, &self.entries[i].1));
            }
        }
        None
    }
}

/// Output of converting one word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordConversion {
    pub segments: Vec<IpaSegment>,
    /// Characters that had no map entry and were passed through.
    pub unmapped: Vec<char>,
}

#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    pub pre_rules: Vec<RewriteRule<char>>,
    pub map: GraphemeMap,
    pub post_rules: Vec<RewriteRule<IpaSegment>>,
}

impl RuleSet {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, RuleFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| RuleFileError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, RuleFileError> {
        #[derive(Clone, Copy)]
        enum Section {
            Pre,
            Map,
            Post,
        }
        let mut rules = RuleSet::default();
        let mut section = Section::Map;
        for (number, raw) in text.lines().enumerate() {
            let line_no = number + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "pre:" => {
                    section = Section::Pre;
                    continue;
                }
                "map:" => {
                    section = Section::Map;
                    continue;
                }
                "post:" => {
                    section = Section::Post;
                    continue;
                }
                _ => {}
            }
            let raw_rule = split_rule(line).map_err(|m| RuleFileError::line(line_no, m))?;
            match section {
                Section::Pre => {
                    let rule = raw_rule
                        .into_grapheme_rule()
                        .map_err(|m| RuleFileError::line(line_no, m))?;
                    rules.pre_rules.push(rule);
                }
                Section::Map => {
                    if raw_rule.context.is_some() {
                        return Err(RuleFileError::line(line_no, "map entries take no context"));
                    }
                    let grapheme: String = raw_rule.lhs.split_whitespace().collect();
                    let segments = segments_of(raw_rule.rhs).map_err(|m| RuleFileError::line(line_no, m))?;
                    rules.map.insert(&grapheme, segments);
                }
                Section::Post => {
                    let rule = raw_rule
                        .into_segment_rule()
                        .map_err(|m| RuleFileError::line(line_no, m))?;
                    rules.post_rules.push(rule);
                }
            }
        }
        Ok(rules)
    }

    /// Converts one whitespace-free word: pre-rules, greedy map, post-rules.
    /// Characters without a map entry become one-character segments and are
    /// listed in `unmapped`.
    pub fn convert(&self, word: &str) -> WordConversion {
        let mut chars: Vec<char> = word.nfc().collect();
        for rule in &self.pre_rules {
            chars = rule.apply(&chars);
        }

        let mut segments = Vec::new();
        let mut unmapped = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            match self.map.longest_match(&chars[i..]) {
                Some((len, mapped)) => {
                    segments.extend_from_slice(mapped);
                    i += len;
                }
                None => {
                    let c = chars[i];
                    // whitespace cannot reach here: callers split words on it
                    if let Ok(seg) = IpaSegment::new(c.encode_utf8(&mut [0; 4])) {
                        segments.push(seg);
                    }
                    unmapped.push(c);
                    i += 1;
                }
            }
        }

        for rule in &self.post_rules {
            segments = rule.apply(&segments);
        }
        WordConversion { segments, unmapped }
    }
}

/// Counts of unmapped characters; merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct UnmappedReport {
    pub counts: BTreeMap<char, u64>,
}

impl UnmappedReport {
    pub fn record(&mut self, chars: &[char]) {
        for &c in chars {
            *self.counts.entry(c).or_insert(0) += 1;
        }
    }

    pub fn merge(&mut self, other: &UnmappedReport) {
        for (&c, &n) in &other.counts {
            *self.counts.entry(c).or_insert(0) += n;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

struct RawRule<'a> {
    lhs: &'a str,
    rhs: &'a str,
    context: Option<(&'a str, &'a str)>,
}

fn split_rule(line: &str) -> Result<RawRule<'_>, String> {
    let (lhs, rest) = line
        .split_once("->")
        .ok_or_else(|| format!("expected `lhs -> rhs`, got {line:?}"))?;
    let (rhs, context) = match rest.split_once('/') {
        Some((rhs, ctx)) => {
            let (left, right) = ctx
                .split_once('_')
                .ok_or_else(|| format!("context {:?} lacks the `_` target marker", ctx.trim()))?;
            (rhs, Some((left.trim(), right.trim())))
        }
        None => (rest, None),
    };
    let lhs = lhs.trim();
    if lhs.is_empty() {
        return Err("empty left-hand side".to_string());
    }
    let rhs = rhs.trim();
    let rhs = if rhs == EMPTY_MARK { "" } else { rhs };
    Ok(RawRule { lhs, rhs, context })
}

fn segments_of(text: &str) -> Result<Vec<IpaSegment>, String> {
    crate::stream::parse_segments(text).map_err(|e| e.to_string())
}

impl RawRule<'_> {
    fn into_grapheme_rule(self) -> Result<RewriteRule<char>, String> {
        let chars = |s: &str| -> Vec<char> { s.split_whitespace().collect::<String>().nfc().collect() };
        let rule = RewriteRule::new(chars(self.lhs), chars(self.rhs));
        Ok(match self.context {
            None => rule,
            Some((left, right)) => {
                let (left, left_anchor) = strip_anchor_start(left);
                let (right, right_anchor) = strip_anchor_end(right);
                rule.with_context(
                    Context {
                        items: chars(left),
                        anchored: left_anchor,
                    },
                    Context {
                        items: chars(right),
                        anchored: right_anchor,
                    },
                )
            }
        })
    }

    fn into_segment_rule(self) -> Result<RewriteRule<IpaSegment>, String> {
        let rule = RewriteRule::new(segments_of(self.lhs)?, segments_of(self.rhs)?);
        Ok(match self.context {
            None => rule,
            Some((left, right)) => {
                let (left, left_anchor) = strip_anchor_start(left);
                let (right, right_anchor) = strip_anchor_end(right);
                rule.with_context(
                    Context {
                        items: segments_of(left)?,
                        anchored: left_anchor,
                    },
                    Context {
                        items: segments_of(right)?,
                        anchored: right_anchor,
                    },
                )
            }
        })
    }
}

fn strip_anchor_start(text: &str) -> (&str, bool) {
    match text.strip_prefix(ANCHOR) {
        Some(rest) => (rest.trim(), true),
        None => (text, false),
    }
}

fn strip_anchor_end(text: &str) -> (&str, bool) {
    match text.strip_suffix(ANCHOR) {
        Some(rest) => (rest.trim(), true),
        None => (text, false),
    }
}
