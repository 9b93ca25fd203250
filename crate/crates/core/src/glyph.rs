//! Character-level classification of IPA glyphs.
//!
//! These helpers work on canonically decomposed text, so a precomposed
//! `ã` is seen as `a` followed by a combining tilde.

use unicode_general_category::{get_general_category, GeneralCategory};

/// Base vowel-quality letters of the IPA chart, including the rhotacized
/// schwas and the two "barred" small capitals.
const VOWEL_GLYPHS: &[char] = &[
    'i', 'y', 'ɨ', 'ʉ', 'ɯ', 'u', 'ɪ', 'ʏ', 'ʊ', 'e', 'ø', 'ɘ', 'ɵ', 'ɤ', 'o', 'ə', 'ɛ', 'œ', 'ɜ', 'ɞ', 'ʌ', 'ɔ', 'æ',
    'ɐ', 'a', 'ɶ', 'ɑ', 'ɒ', 'ɚ', 'ɝ', 'ᵻ', 'ᵿ',
];

/// Combining marks that make a consonant syllabic.
const SYLLABIC_MARKS: &[char] = &['\u{0329}', '\u{030D}'];

pub fn is_vowel_glyph(c: char) -> bool {
    VOWEL_GLYPHS.contains(&c)
}

/// Chao tone letters and the modifier tone letters block.
pub fn is_tone_glyph(c: char) -> bool {
    matches!(c, '\u{02E5}'..='\u{02E9}' | '\u{A700}'..='\u{A71F}')
}

pub fn is_combining_mark(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::NonspacingMark | GeneralCategory::SpacingMark | GeneralCategory::EnclosingMark
    )
}

pub fn is_modifier_letter(c: char) -> bool {
    get_general_category(c) == GeneralCategory::ModifierLetter
}

pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

pub fn vowel_glyph_count(text: &str) -> usize {
    text.chars().filter(|&c| is_vowel_glyph(c)).count()
}

pub fn has_syllabic_mark(text: &str) -> bool {
    text.chars().any(|c| SYLLABIC_MARKS.contains(&c))
}

/// True when the text is made only of tone letters.
pub fn is_tone_only(text: &str) -> bool {
    !text.is_empty() && text.chars().all(is_tone_glyph)
}

pub fn contains_tone(text: &str) -> bool {
    text.chars().any(is_tone_glyph)
}

/// Removes combining marks and modifier letters, leaving the base glyphs.
pub fn strip_marks(text: &str) -> String {
    text.chars()
        .filter(|&c| !is_combining_mark(c) && !is_modifier_letter(c))
        .collect()
}

/// Superscript modifier letter written for a plain letter, used to recognise
/// a diacritic emitted as a separate symbol (`k h` for `kʰ`).
pub fn superscript_of(c: char) -> Option<char> {
    Some(match c {
        'h' => 'ʰ',
        'ɦ' => 'ʱ',
        'w' => 'ʷ',
        'j' => 'ʲ',
        'ɣ' => 'ˠ',
        'ʕ' => 'ˤ',
        'n' => 'ⁿ',
        'l' => 'ˡ',
        'ʔ' => 'ˀ',
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_glyphs() {
        assert!(is_vowel_glyph('ɔ'));
        assert!(!is_vowel_glyph('ʒ'));
        assert!(is_tone_glyph('˥'));
        assert!(is_modifier_letter('ʰ'));
        assert!(is_modifier_letter('ː'));
        assert!(is_combining_mark('\u{0303}'));
        assert!(is_punctuation('.'));
        assert!(is_punctuation('¿'));
        assert!(!is_punctuation('a'));
    }

    #[test]
    fn strips_marks() {
        assert_eq!(strip_marks("tʰ"), "t");
        assert_eq!(strip_marks("n\u{032A}"), "n");
        assert_eq!(strip_marks("aː"), "a");
        assert_eq!(strip_marks("ɒ"), "ɒ");
    }

    #[test]
    fn counts_vowels() {
        assert_eq!(vowel_glyph_count("ɔɪ"), 2);
        assert_eq!(vowel_glyph_count("aː"), 1);
        assert_eq!(vowel_glyph_count("dʒ"), 0);
        assert!(is_tone_only("˨˩˦"));
        assert!(!is_tone_only("a˥"));
    }
}
