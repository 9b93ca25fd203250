//! Folding maps: ordered segment-sequence rewrites that align backend output
//! with a reference inventory.
//!
//! File format, one rule per line:
//!
//! ```text
//! # Serbian backend splits the affricate
//! d ʒ -> dʒ
//! n -> n̪
//! aɪʊ -> aɪ ʊ
//! ô -> øː [orthographic]
//! ʔ -> ∅
//! ```
//!
//! Rules run in file order; each rule makes one left-to-right pass over the
//! stream replacing non-overlapping matches. A match never spans a word or
//! utterance boundary. The optional `[label]` overrides the inferred kind.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::glyph;
use crate::inventory::{Inventory, SegmentClass};
use crate::stream::{IpaSegment, PhonemeStream, StreamToken};

const EMPTY_MARK: &str = "∅";

#[derive(Debug, Error)]
pub enum FoldMapError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: left-hand side repeats line {first_line}")]
    DuplicateLhs { line: usize, first_line: usize },
}

/// Error-taxonomy label of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldKind {
    OneToOne,
    ManyToOne,
    Merge,
    Split,
    Dedup,
    Diacritic,
    Orthographic,
    Delete,
    /// Several segments rewritten to several segments, e.g. `ʊ ɔ -> w ɔ`.
    Contextual,
}

impl FoldKind {
    pub fn label(self) -> &'static str {
        match self {
            FoldKind::OneToOne => "one_to_one",
            FoldKind::ManyToOne => "many_to_one",
            FoldKind::Merge => "merge",
            FoldKind::Split => "split",
            FoldKind::Dedup => "dedup",
            FoldKind::Diacritic => "diacritic",
            FoldKind::Orthographic => "orthographic",
            FoldKind::Delete => "delete",
            FoldKind::Contextual => "contextual",
        }
    }

    fn from_label(label: &str) -> Option<Self> {
        Some(match label {
            "one_to_one" => FoldKind::OneToOne,
            "many_to_one" => FoldKind::ManyToOne,
            "merge" => FoldKind::Merge,
            "split" => FoldKind::Split,
            "dedup" => FoldKind::Dedup,
            "diacritic" => FoldKind::Diacritic,
            "orthographic" => FoldKind::Orthographic,
            "delete" => FoldKind::Delete,
            "contextual" => FoldKind::Contextual,
            _ => return None,
        })
    }

    /// Whether a rule with these side lengths can carry this label.
    fn fits(self, lhs: usize, rhs: usize) -> bool {
        match self {
            FoldKind::Delete => rhs == 0,
            FoldKind::OneToOne | FoldKind::ManyToOne | FoldKind::Orthographic => lhs == 1 && rhs == 1,
            FoldKind::Merge | FoldKind::Dedup => lhs > 1 && rhs == 1,
            FoldKind::Diacritic => lhs >= 1 && rhs == 1,
            FoldKind::Split => lhs == 1 && rhs > 1,
            FoldKind::Contextual => lhs > 1 && rhs > 1,
        }
    }
}

impl fmt::Display for FoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldRule {
    pub lhs: Vec<IpaSegment>,
    pub rhs: Vec<IpaSegment>,
    pub kind: FoldKind,
    pub line: usize,
}

impl FoldRule {
    /// Change in token count each time the rule fires.
    pub fn token_delta(&self) -> isize {
        self.rhs.len() as isize - self.lhs.len() as isize
    }

    fn is_identity(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `k h -> kʰ`: the trailing segments are plain letters written for a
/// modifier letter that belongs on the first.
fn is_detached_diacritic(lhs: &[IpaSegment], rhs: &IpaSegment) -> bool {
    let mut expected = lhs[0].as_str().to_string();
    for seg in &lhs[1..] {
        let mut chars = seg.as_str().chars();
        match (chars.next().and_then(glyph::superscript_of), chars.next()) {
            (Some(sup), None) => expected.push(sup),
            _ => return false,
        }
    }
    expected == rhs.as_str()
}

fn infer_kind(rule: &FoldRule, shared_rhs: bool) -> FoldKind {
    match (rule.lhs.len(), rule.rhs.len()) {
        (_, 0) => FoldKind::Delete,
        (1, 1) if shared_rhs => FoldKind::ManyToOne,
        (1, 1) => FoldKind::OneToOne,
        (1, _) => FoldKind::Split,
        (_, 1) if rule.lhs.iter().all(|s| *s == rule.lhs[0]) => FoldKind::Dedup,
        (_, 1) if is_detached_diacritic(&rule.lhs, &rule.rhs[0]) => FoldKind::Diacritic,
        (_, 1) => FoldKind::Merge,
        _ => FoldKind::Contextual,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FoldMap {
    pub rules: Vec<FoldRule>,
    pub provenance: Option<PathBuf>,
}

impl FoldMap {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, FoldMapError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FoldMapError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut map = Self::parse(&text)?;
        map.provenance = Some(path.to_path_buf());
        Ok(map)
    }

    pub fn parse(text: &str) -> Result<Self, FoldMapError> {
        let syntax = |line: usize, message: String| FoldMapError::Syntax { line, message };
        let mut rules: Vec<FoldRule> = Vec::new();
        let mut labels: Vec<Option<FoldKind>> = Vec::new();
        let mut first_line: HashMap<Vec<IpaSegment>, usize> = HashMap::new();

        for (number, raw) in text.lines().enumerate() {
            let line = number + 1;
            let mut body = raw.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let mut label = None;
            if let Some(open) = body.rfind('[') {
                let tag = body[open..]
                    .strip_prefix('[')
                    .and_then(|t| t.strip_suffix(']'))
                    .ok_or_else(|| syntax(line, format!("unterminated label in {body:?}")))?;
                let kind = FoldKind::from_label(tag.trim())
                    .ok_or_else(|| syntax(line, format!("unknown rule label {:?}", tag.trim())))?;
                label = Some(kind);
                body = body[..open].trim_end();
            }
            let (lhs, rhs) = body
                .split_once("->")
                .ok_or_else(|| syntax(line, format!("expected `lhs -> rhs`, got {body:?}")))?;
            let lhs = crate::stream::parse_segments(lhs).map_err(|e| syntax(line, e.to_string()))?;
            if lhs.is_empty() {
                return Err(syntax(line, "empty left-hand side".to_string()));
            }
            let rhs = match rhs.trim() {
                EMPTY_MARK => Vec::new(),
                other => crate::stream::parse_segments(other).map_err(|e| syntax(line, e.to_string()))?,
            };
            if let Some(kind) = label {
                if !kind.fits(lhs.len(), rhs.len()) {
                    return Err(syntax(
                        line,
                        format!("label {kind} does not fit a {}-to-{} rule", lhs.len(), rhs.len()),
                    ));
                }
            }
            if let Some(&first) = first_line.get(&lhs) {
                return Err(FoldMapError::DuplicateLhs {
                    line,
                    first_line: first,
                });
            }
            first_line.insert(lhs.clone(), line);
            rules.push(FoldRule {
                lhs,
                rhs,
                kind: FoldKind::Delete,
                line,
            });
            labels.push(label);
        }

        let mut single_rhs: HashMap<&IpaSegment, usize> = HashMap::new();
        for rule in rules.iter().filter(|r| r.lhs.len() == 1 && r.rhs.len() == 1) {
            *single_rhs.entry(&rule.rhs[0]).or_insert(0) += 1;
        }
        let kinds: Vec<FoldKind> = rules
            .iter()
            .zip(&labels)
            .map(|(rule, label)| {
                label.unwrap_or_else(|| {
                    let shared = rule.rhs.len() == 1 && single_rhs.get(&rule.rhs[0]).copied().unwrap_or(0) > 1;
                    infer_kind(rule, shared)
                })
            })
            .collect();
        for (rule, kind) in rules.iter_mut().zip(kinds) {
            rule.kind = kind;
        }
        Ok(FoldMap {
            rules,
            provenance: None,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn apply(&self, stream: &PhonemeStream) -> PhonemeStream {
        self.apply_counting(stream).0
    }

    /// Applies the map and reports how many times each rule fired.
    pub fn apply_counting(&self, stream: &PhonemeStream) -> (PhonemeStream, Vec<usize>) {
        let mut tokens: Vec<StreamToken> = stream.tokens().to_vec();
        let mut counts = Vec::with_capacity(self.rules.len());
        for rule in &self.rules {
            let (next, fired) = apply_rule(rule, &tokens);
            tokens = next;
            counts.push(fired);
        }
        (PhonemeStream::from_tokens(tokens), counts)
    }

    /// Authoring problems that make the result depend on rule order or on
    /// how many times the map is applied. A map with no diagnostics is
    /// idempotent.
    pub fn check(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (i, from) in self.rules.iter().enumerate() {
            if from.rhs.is_empty() {
                out.push(Diagnostic::Deletion { line: from.line });
            }
            if from.is_identity() {
                continue;
            }
            for to in &self.rules {
                if !from.rhs.is_empty() && overlaps(&from.rhs, &to.lhs) {
                    out.push(Diagnostic::Feeds {
                        from_line: from.line,
                        to_line: to.line,
                    });
                }
            }
            for other in &self.rules[i + 1..] {
                if overlaps(&from.lhs, &other.lhs) {
                    out.push(Diagnostic::LhsOverlap {
                        first_line: from.line,
                        second_line: other.line,
                    });
                }
            }
        }
        out
    }
}

fn apply_rule(rule: &FoldRule, tokens: &[StreamToken]) -> (Vec<StreamToken>, usize) {
    let n = rule.lhs.len();
    let mut out = Vec::with_capacity(tokens.len());
    let mut fired = 0;
    let mut i = 0;
    while i < tokens.len() {
        let matched = i + n <= tokens.len()
            && tokens[i..i + n]
                .iter()
                .zip(&rule.lhs)
                .all(|(t, l)| t.as_segment() == Some(l));
        if matched {
            out.extend(rule.rhs.iter().cloned().map(StreamToken::Segment));
            fired += 1;
            i += n;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    (out, fired)
}

/// True when `a` and `b` can be laid over each other with at least one
/// shared position and agree wherever they overlap (prefix, suffix or
/// containment in either direction).
fn overlaps<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    let (la, lb) = (a.len() as isize, b.len() as isize);
    // b starts at offset `shift` relative to a
    (1 - lb..la).any(|shift| {
        let start = shift.max(0);
        let end = la.min(shift + lb);
        (start..end).all(|k| a[k as usize] == b[(k - shift) as usize])
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// Output of one rule can form (part of) the input of another, so a
    /// second application could change the result.
    Feeds { from_line: usize, to_line: usize },
    /// Two left-hand sides share segments at an edge; which fires depends on order.
    LhsOverlap { first_line: usize, second_line: usize },
    /// Deletion rules can join segments into new matches.
    Deletion { line: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Feeds { from_line, to_line } => write!(
                f,
                "warning: output of line {from_line} can match the input of line {to_line} (not confluent)"
            ),
            Diagnostic::LhsOverlap {
                first_line,
                second_line,
            } => write!(
                f,
                "warning: left-hand sides of lines {first_line} and {second_line} overlap (order-dependent)"
            ),
            Diagnostic::Deletion { line } => write!(f, "warning: line {line} deletes segments"),
        }
    }
}

/// Unknown (produced, not in the inventory) and unseen (in the inventory,
/// never produced) segments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiffReport {
    pub observed: BTreeSet<IpaSegment>,
    pub reference: BTreeSet<IpaSegment>,
    pub unknown: BTreeSet<IpaSegment>,
    pub unseen: BTreeSet<IpaSegment>,
}

impl DiffReport {
    pub fn new(observed: BTreeSet<IpaSegment>, reference: BTreeSet<IpaSegment>) -> Self {
        let unknown = observed.difference(&reference).cloned().collect();
        let unseen = reference.difference(&observed).cloned().collect();
        DiffReport {
            observed,
            reference,
            unknown,
            unseen,
        }
    }

    pub fn is_aligned(&self) -> bool {
        self.unknown.is_empty() && self.unseen.is_empty()
    }

    /// Aligned once the allowed residual segments are ignored.
    pub fn is_aligned_except(&self, allowed: &BTreeSet<IpaSegment>) -> bool {
        self.unknown.is_subset(allowed) && self.unseen.is_subset(allowed)
    }
}

pub fn diff_inventory(observed: &BTreeSet<IpaSegment>, inventory: &Inventory) -> DiffReport {
    DiffReport::new(observed.clone(), inventory.segment_set())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub unknown: IpaSegment,
    pub candidate: IpaSegment,
    pub reason: &'static str,
    pub same_class: bool,
}

/// Candidate one-to-one mappings from unknown to unseen segments that differ
/// only in diacritics or modifier letters. Same-class candidates rank first.
/// Nothing is applied.
pub fn suggest_mappings(report: &DiffReport, inventory: &Inventory) -> Vec<Suggestion> {
    let mut out = Vec::new();
    for unknown in &report.unknown {
        let base = glyph::strip_marks(unknown.as_str());
        let class = SegmentClass::infer(unknown);
        let mut found: Vec<Suggestion> = report
            .unseen
            .iter()
            .filter(|candidate| glyph::strip_marks(candidate.as_str()) == base)
            .map(|candidate| {
                let candidate_class = inventory
                    .segment(candidate)
                    .map_or_else(|| SegmentClass::infer(candidate), |s| s.class);
                Suggestion {
                    unknown: unknown.clone(),
                    candidate: candidate.clone(),
                    reason: "diacritic",
                    same_class: candidate_class == class,
                }
            })
            .collect();
        // stable: keeps set order within each group
        found.sort_by_key(|s| !s.same_class);
        out.extend(found);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub unknown: BTreeSet<IpaSegment>,
    pub unseen: BTreeSet<IpaSegment>,
    pub suggestions: Vec<Suggestion>,
}

impl ValidationReport {
    pub fn new(report: &DiffReport, suggestions: Vec<Suggestion>) -> Self {
        ValidationReport {
            unknown: report.unknown.clone(),
            unseen: report.unseen.clone(),
            suggestions,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let join = |set: &BTreeSet<IpaSegment>| set.iter().map(IpaSegment::as_str).collect::<Vec<_>>().join(" ");
        let mut out = format!(
            "unknown ({}): {}\nunseen ({}): {}\n",
            self.unknown.len(),
            join(&self.unknown),
            self.unseen.len(),
            join(&self.unseen)
        );
        if !self.suggestions.is_empty() {
            out.push_str("suggestions:\n");
            for s in &self.suggestions {
                out.push_str(&format!("  {} -> {} ({})\n", s.unknown, s.candidate, s.reason));
            }
        }
        out
    }
}
