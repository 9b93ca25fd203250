// Syllabary conversion of pinyin with tones merged onto the nucleus or
// kept as separate tokens.

use phonostream::g2p::{Backend, SyllableTable};
use phonostream::IpaSegment;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let table = SyllableTable::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/data/pinyin.tsv"))?;

    let merged = Backend::Syllabary {
        table: table.clone(),
        split_tones: false,
    };
    let split = Backend::Syllabary {
        table: table.clone(),
        split_tones: true,
    };

    for line in ["ma1", "ni3hao3", "wo3 ai4 ma1ma", "zhong1guo2"] {
        println!("{line:<14} merged: {}", merged.convert_utterance(line, true)?.stream);
        println!("{:<14} split:  {}", "", split.convert_utterance(line, true)?.stream);
    }
    assert_eq!(merged.convert_utterance("ma1", false)?.stream.to_string(), "m a˥");
    assert_eq!(split.convert_utterance("ma1", false)?.stream.to_string(), "m a ˥");

    // syllabic nasals carry the tone once they are declared as nuclei
    let mut table = table;
    table.nucleus = phonostream::g2p::NucleusRule::with_syllabic_consonants([IpaSegment::new("n̩")?]);
    let backend = Backend::Syllabary {
        table,
        split_tones: false,
    };
    println!(
        "{:<14} merged: {}",
        "n2",
        backend.convert_utterance("n2", false)?.stream
    );

    match merged.convert_utterance("mx1", false) {
        Err(e) => println!("mx1            error:  {e}"),
        Ok(_) => unreachable!("mx1 is not a syllable"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("tone_merging example failed");
}
