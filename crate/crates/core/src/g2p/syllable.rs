//! Syllabary backend for romanized tonal languages (pinyin, Jyutping).
//!
//! Text is split into syllables by greedy longest match against the table,
//! each syllable is looked up, and its tone is attached to the syllable
//! nucleus (`m a` + `˥` becomes `m a˥`) unless tones are split out.
//!
//! Table format: `romanization<TAB>segments<TAB>tone`, the tone column
//! optional. `#` comments.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use unicode_normalization::UnicodeNormalization;

use super::{G2pError, RuleFileError};
use crate::glyph;
use crate::stream::IpaSegment;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyllableEntry {
    pub segments: Vec<IpaSegment>,
    pub tone: Option<String>,
}

/// Which segment of a syllable carries its tone: the first vowel, else the
/// first segment marked syllabic or listed as a syllabic consonant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NucleusRule {
    pub syllabic_consonants: BTreeSet<IpaSegment>,
}

impl NucleusRule {
    pub fn with_syllabic_consonants<I: IntoIterator<Item = IpaSegment>>(segments: I) -> Self {
        NucleusRule {
            syllabic_consonants: segments.into_iter().collect(),
        }
    }

    pub fn find(&self, segments: &[IpaSegment]) -> Option<usize> {
        segments
            .iter()
            .position(|s| glyph::vowel_glyph_count(s.as_str()) > 0)
            .or_else(|| {
                segments
                    .iter()
                    .position(|s| glyph::has_syllabic_mark(s.as_str()) || self.syllabic_consonants.contains(s))
            })
    }
}

/// A converted syllable whose tone has not yet been placed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingSyllable {
    pub segments: Vec<IpaSegment>,
    pub tone: Option<String>,
    pub nucleus: Option<usize>,
}

impl PendingSyllable {
    /// Places the tone. Merged: appended to the nucleus text, one token.
    /// Split: a separate token right after the nucleus (or at the end of a
    /// syllable without one).
    pub fn merge_tones(self, split_tones: bool) -> Result<Vec<IpaSegment>, G2pError> {
        let PendingSyllable {
            mut segments,
            tone,
            nucleus,
        } = self;
        let Some(tone) = tone else {
            return Ok(segments);
        };
        let tone_segment = IpaSegment::new(&tone).map_err(G2pError::Segment)?;
        match (nucleus, split_tones) {
            (Some(i), false) => {
                let merged = format!("{}{}", segments[i], tone_segment);
                segments[i] = IpaSegment::new(&merged).map_err(G2pError::Segment)?;
            }
            (Some(i), true) => segments.insert(i + 1, tone_segment),
            (None, true) => segments.push(tone_segment),
            (None, false) => {
                let text = segments.iter().map(IpaSegment::as_str).collect::<Vec<_>>().join(" ");
                return Err(G2pError::ToneAttachment { syllable: text, tone });
            }
        }
        Ok(segments)
    }
}

#[derive(Debug, Clone, Default)]
pub struct SyllableTable {
    entries: HashMap<String, SyllableEntry>,
    max_len: usize,
    pub nucleus: NucleusRule,
}

impl SyllableTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, romanization: &str, entry: SyllableEntry) {
        let key: String = romanization.nfc().collect();
        assert!(!key.is_empty(), "romanization must be non-empty");
        assert!(!entry.segments.is_empty(), "syllable needs at least one segment");
        self.max_len = self.max_len.max(key.chars().count());
        self.entries.entry(key).or_insert(entry);
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
        let mut table = SyllableTable::new();
        for (number, line) in text.lines().enumerate() {
            let line_no = number + 1;
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let key = cols.next().unwrap_or("").trim();
            let segs = cols.next().unwrap_or("");
            let tone = cols.next().map(str::trim).filter(|t| !t.is_empty());
            if key.is_empty() {
                return Err(RuleFileError::line(line_no, "empty romanization"));
            }
            let segments =
                crate::stream::parse_segments(segs).map_err(|e| RuleFileError::line(line_no, e.to_string()))?;
            if segments.is_empty() {
                return Err(RuleFileError::line(
                    line_no,
                    format!("syllable {key:?} has no segments"),
                ));
            }
            let tone = tone.map(|t| t.nfd().collect::<String>());
            table.insert(key, SyllableEntry { segments, tone });
        }
        Ok(table)
    }

    /// Greedy longest-match split; the whole text must be consumed.
    pub fn syllabify(&self, text: &str) -> Result<Vec<String>, G2pError> {
        let chars: Vec<char> = text.nfc().collect();
        let mut out = Vec::new();
        let mut i = 0;
        let mut key = String::new();
        'outer: while i < chars.len() {
            for len in (1..=self.max_len.min(chars.len() - i)).rev() {
                key.clear();
                key.extend(&chars[i..i + len]);
                if self.entries.contains_key(&key) {
                    out.push(key.clone());
                    i += len;
                    continue 'outer;
                }
            }
            return Err(G2pError::Segmentation {
                text: text.to_string(),
                offset: i,
            });
        }
        Ok(out)
    }

    pub fn syllable_to_ipa(&self, syllable: &str) -> Result<PendingSyllable, G2pError> {
        let key: String = syllable.nfc().collect();
        let entry = self
            .entries
            .get(&key)
            .ok_or_else(|| G2pError::UnknownSyllable(syllable.to_string()))?;
        Ok(PendingSyllable {
            segments: entry.segments.clone(),
            tone: entry.tone.clone(),
            nucleus: self.nucleus.find(&entry.segments),
        })
    }

    pub fn convert(&self, word: &str, split_tones: bool) -> Result<Vec<IpaSegment>, G2pError> {
        let mut out = Vec::new();
        for syllable in self.syllabify(word)? {
            out.extend(self.syllable_to_ipa(&syllable)?.merge_tones(split_tones)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PINYIN: &str = "ni\tn i\nhao\th a u\nha\th a\nma1\tm a\t˥\nde\td ə\n";

    fn strings(segments: &[IpaSegment]) -> Vec<&str> {
        segments.iter().map(IpaSegment::as_str).collect()
    }

    #[test]
    fn syllabifies_greedily() {
        let table = SyllableTable::parse(PINYIN).unwrap();
        assert_eq!(table.syllabify("nihao").unwrap(), ["ni", "hao"]);
        assert_eq!(table.syllabify("ni").unwrap(), ["ni"]);
        match table.syllabify("niq") {
            Err(G2pError::Segmentation { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn looks_up_syllables() {
        let table = SyllableTable::parse(PINYIN).unwrap();
        let ma = table.syllable_to_ipa("ma1").unwrap();
        assert_eq!(strings(&ma.segments), ["m", "a"]);
        assert_eq!(ma.tone.as_deref(), Some("˥"));
        assert_eq!(ma.nucleus, Some(1));
        let de = table.syllable_to_ipa("de").unwrap();
        assert_eq!(strings(&de.segments), ["d", "ə"]);
        assert_eq!(de.tone, None);
        assert!(matches!(table.syllable_to_ipa("xx"), Err(G2pError::UnknownSyllable(_))));
    }

    #[test]
    fn merges_or_splits_tones() {
        let table = SyllableTable::parse(PINYIN).unwrap();
        let merged = table.syllable_to_ipa("ma1").unwrap().merge_tones(false).unwrap();
        assert_eq!(strings(&merged), ["m", "a˥"]);
        let split = table.syllable_to_ipa("ma1").unwrap().merge_tones(true).unwrap();
        assert_eq!(strings(&split), ["m", "a", "˥"]);
    }

    #[test]
    fn tone_without_nucleus_fails() {
        let table = SyllableTable::parse("s1\ts\t˥\n").unwrap();
        let pending = table.syllable_to_ipa("s1").unwrap();
        assert!(matches!(
            pending.clone().merge_tones(false),
            Err(G2pError::ToneAttachment { .. })
        ));
        assert_eq!(strings(&pending.merge_tones(true).unwrap()), ["s", "˥"]);
    }

    #[test]
    fn syllabic_consonant_nucleus() {
        let mut table = SyllableTable::parse("m4\tm\t˨˩\nng5\tŋ\t˩˧\n").unwrap();
        table.nucleus = NucleusRule::with_syllabic_consonants([IpaSegment::new("m").unwrap()]);
        assert_eq!(strings(&table.convert("m4", false).unwrap()), ["m˨˩"]);
        assert!(table.convert("ng5", false).is_err());

        let marked = SyllableTable::parse("n1\tn\u{0329}\t˥\n").unwrap();
        assert_eq!(marked.convert("n1", false).unwrap().len(), 1);
    }

    #[test]
    fn rejects_empty_rows() {
        assert!(SyllableTable::parse("ma\t\t˥\n").is_err());
        assert!(SyllableTable::parse("\tm a\n").is_err());
    }
}
