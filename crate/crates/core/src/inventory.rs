//! Reference phoneme inventories with ternary distinctive features.
//!
//! Inventories are read from a PHOIBLE-style CSV: one row per segment with
//! the columns `InventoryID`, `LanguageName`, `ISO6393`, `Phoneme`,
//! `SegmentClass`, followed by feature columns. Every column that is not one
//! of those (or a known PHOIBLE metadata column) is taken as a feature, so
//! the feature schema is whatever the header says.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::glyph;
use crate::stream::{IpaSegment, SegmentError};

const COL_ID: &str = "InventoryID";
const COL_LANGUAGE: &str = "LanguageName";
const COL_ISO: &str = "ISO6393";
const COL_PHONEME: &str = "Phoneme";
const COL_CLASS: &str = "SegmentClass";

/// PHOIBLE columns that carry metadata rather than features.
const METADATA_COLUMNS: &[&str] = &[
    "Glottocode",
    "SpecificDialect",
    "GlyphID",
    "Allophones",
    "Marginal",
    "Source",
];

#[derive(Debug, Error)]
pub enum InventoryError {
    #[error("inventory file: {0}")]
    Csv(#[from] csv::Error),
    #[error("inventory file is missing the {0:?} column")]
    MissingColumn(String),
    #[error("line {line}: {source}")]
    BadSegment {
        line: u64,
        #[source]
        source: SegmentError,
    },
    #[error("line {line}: unknown segment class {value:?}")]
    BadClass { line: u64, value: String },
    #[error("line {line}: inventory id {value:?} is not an integer")]
    BadId { line: u64, value: String },
    #[error("line {line}: segment {segment} repeats line {first_line} in inventory {inventory}")]
    DuplicateSegment {
        inventory: u32,
        segment: IpaSegment,
        line: u64,
        first_line: u64,
    },
    #[error("segment {segment} is not in inventory {inventory}")]
    UnknownSegment { inventory: u32, segment: IpaSegment },
    #[error("feature {0:?} is not in the inventory schema")]
    UnknownFeature(String),
    #[error("no candidate inventories to match against")]
    NoCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TernaryValue {
    Plus,
    Minus,
    Unspecified,
}

impl TernaryValue {
    /// `+` and `-` map to themselves; anything else, including multi-valued
    /// cells such as `+,-`, is unspecified.
    pub fn from_cell(cell: &str) -> Self {
        match cell.trim() {
            "+" => TernaryValue::Plus,
            "-" => TernaryValue::Minus,
            _ => TernaryValue::Unspecified,
        }
    }
}

impl fmt::Display for TernaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TernaryValue::Plus => "+",
            TernaryValue::Minus => "-",
            TernaryValue::Unspecified => "0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentClass {
    Consonant,
    Vowel,
    Tone,
}

impl SegmentClass {
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "consonant" => Some(SegmentClass::Consonant),
            "vowel" => Some(SegmentClass::Vowel),
            "tone" => Some(SegmentClass::Tone),
            _ => None,
        }
    }

    /// Class guessed from the glyphs alone: tone letters only is a tone,
    /// any vowel letter makes a vowel, everything else is a consonant.
    pub fn infer(seg: &IpaSegment) -> Self {
        let text = seg.as_str();
        if glyph::is_tone_only(text) {
            SegmentClass::Tone
        } else if glyph::vowel_glyph_count(text) > 0 {
            SegmentClass::Vowel
        } else {
            SegmentClass::Consonant
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventorySegment {
    pub segment: IpaSegment,
    pub class: SegmentClass,
    /// Values in the order of the owning inventory's feature schema.
    pub values: Vec<TernaryValue>,
}

/// Vowel with two or more vowel-quality letters. Length and tone marks and
/// combining diacritics are not letters and do not count.
pub fn is_diphthong(seg: &InventorySegment) -> bool {
    seg.class == SegmentClass::Vowel && glyph::vowel_glyph_count(seg.segment.as_str()) >= 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inventory {
    pub id: u32,
    pub language_name: String,
    pub iso_code: String,
    feature_names: Vec<String>,
    segments: Vec<InventorySegment>,
}

impl Inventory {
    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn segments(&self) -> &[InventorySegment] {
        &self.segments
    }

    pub fn segment(&self, seg: &IpaSegment) -> Option<&InventorySegment> {
        self.segments.iter().find(|s| &s.segment == seg)
    }

    pub fn segment_set(&self) -> BTreeSet<IpaSegment> {
        self.segments.iter().map(|s| s.segment.clone()).collect()
    }

    pub fn profile(&self) -> CountProfile {
        let mut profile = CountProfile::default();
        for seg in &self.segments {
            profile.add(seg.class, is_diphthong(seg));
        }
        profile
    }

    pub fn feature_index(&self, feature: &str) -> Option<usize> {
        self.feature_names.iter().position(|f| f == feature)
    }

    /// Stored value of `feature` for `seg`. A missing segment or feature is
    /// an error, never `Unspecified`.
    pub fn feature_of(&self, seg: &IpaSegment, feature: &str) -> Result<TernaryValue, InventoryError> {
        let index = self
            .feature_index(feature)
            .ok_or_else(|| InventoryError::UnknownFeature(feature.to_string()))?;
        let entry = self.segment(seg).ok_or_else(|| InventoryError::UnknownSegment {
            inventory: self.id,
            segment: seg.clone(),
        })?;
        Ok(entry.values[index])
    }
}

pub fn load_inventories_from_path(path: impl AsRef<Path>) -> Result<Vec<Inventory>, InventoryError> {
    let reader = csv::Reader::from_path(path)?;
    read_inventories(reader)
}

pub fn load_inventories<R: Read>(input: R) -> Result<Vec<Inventory>, InventoryError> {
    read_inventories(csv::Reader::from_reader(input))
}

fn read_inventories<R: Read>(mut reader: csv::Reader<R>) -> Result<Vec<Inventory>, InventoryError> {
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| InventoryError::MissingColumn(name.to_string()))
    };
    let id_col = column(COL_ID)?;
    let language_col = column(COL_LANGUAGE)?;
    let iso_col = column(COL_ISO)?;
    let phoneme_col = column(COL_PHONEME)?;
    let class_col = column(COL_CLASS)?;
    let fixed = [id_col, language_col, iso_col, phoneme_col, class_col];

    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|i| !fixed.contains(i) && !METADATA_COLUMNS.contains(&headers[*i].trim()))
        .collect();
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| headers[i].trim().to_string()).collect();

    let mut inventories: Vec<Inventory> = Vec::new();
    let mut by_id: HashMap<u32, usize> = HashMap::new();
    // (inventory id, segment) -> first line seen
    let mut seen: HashMap<(u32, IpaSegment), u64> = HashMap::new();

    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |i: usize| record.get(i).unwrap_or("");

        let id_text = cell(id_col).trim();
        let id: u32 = id_text.parse().map_err(|_| InventoryError::BadId {
            line,
            value: id_text.to_string(),
        })?;
        let segment =
            IpaSegment::new(cell(phoneme_col).trim()).map_err(|source| InventoryError::BadSegment { line, source })?;
        let class = SegmentClass::parse(cell(class_col)).ok_or_else(|| InventoryError::BadClass {
            line,
            value: cell(class_col).to_string(),
        })?;
        if let Some(&first_line) = seen.get(&(id, segment.clone())) {
            return Err(InventoryError::DuplicateSegment {
                inventory: id,
                segment,
                line,
                first_line,
            });
        }
        seen.insert((id, segment.clone()), line);

        let values = feature_cols.iter().map(|&i| TernaryValue::from_cell(cell(i))).collect();
        let slot = *by_id.entry(id).or_insert_with(|| {
            inventories.push(Inventory {
                id,
                language_name: cell(language_col).trim().to_string(),
                iso_code: cell(iso_col).trim().to_string(),
                feature_names: feature_names.clone(),
                segments: Vec::new(),
            });
            inventories.len() - 1
        });
        inventories[slot]
            .segments
            .push(InventorySegment { segment, class, values });
    }
    Ok(inventories)
}

/// Type counts used to compare a phoneme set against inventories.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CountProfile {
    pub n_types: usize,
    pub n_consonants: usize,
    pub n_vowels: usize,
    pub n_diphthongs: usize,
    pub n_tones: usize,
}

impl CountProfile {
    /// Profile of a bare segment set, classes inferred from glyphs.
    pub fn of_segments<'a, I>(segments: I) -> Self
    where
        I: IntoIterator<Item = &'a IpaSegment>,
    {
        let mut profile = CountProfile::default();
        let distinct: BTreeSet<&IpaSegment> = segments.into_iter().collect();
        for seg in distinct {
            let class = SegmentClass::infer(seg);
            let diphthong = class == SegmentClass::Vowel && glyph::vowel_glyph_count(seg.as_str()) >= 2;
            profile.add(class, diphthong);
        }
        profile
    }

    fn add(&mut self, class: SegmentClass, diphthong: bool) {
        self.n_types += 1;
        match class {
            SegmentClass::Consonant => self.n_consonants += 1,
            SegmentClass::Vowel => {
                self.n_vowels += 1;
                if diphthong {
                    self.n_diphthongs += 1;
                }
            }
            SegmentClass::Tone => self.n_tones += 1,
        }
    }

    /// Sum of absolute differences of types, consonants, vowels and diphthongs.
    pub fn l1_distance(&self, other: &CountProfile) -> usize {
        self.n_types.abs_diff(other.n_types)
            + self.n_consonants.abs_diff(other.n_consonants)
            + self.n_vowels.abs_diff(other.n_vowels)
            + self.n_diphthongs.abs_diff(other.n_diphthongs)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InventoryMatch<'a> {
    pub inventory: &'a Inventory,
    pub distance: usize,
    pub jaccard: f64,
}

pub fn jaccard(a: &BTreeSet<IpaSegment>, b: &BTreeSet<IpaSegment>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// Ranks candidates by profile distance (lower first), then segment-set
/// overlap (higher first), then inventory id (lower first).
pub fn best_match<'a>(
    observed_profile: &CountProfile,
    observed: &BTreeSet<IpaSegment>,
    candidates: &'a [Inventory],
) -> Result<Vec<InventoryMatch<'a>>, InventoryError> {
    if candidates.is_empty() {
        return Err(InventoryError::NoCandidates);
    }
    let mut ranked: Vec<InventoryMatch<'a>> = candidates
        .iter()
        .map(|inventory| InventoryMatch {
            inventory,
            distance: observed_profile.l1_distance(&inventory.profile()),
            jaccard: jaccard(observed, &inventory.segment_set()),
        })
        .collect();
    ranked.sort_by(|x, y| {
        x.distance
            .cmp(&y.distance)
            .then_with(|| y.jaccard.total_cmp(&x.jaccard))
            .then_with(|| x.inventory.id.cmp(&y.inventory.id))
    });
    Ok(ranked)
}
