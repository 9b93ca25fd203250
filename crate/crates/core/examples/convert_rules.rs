// Rule-based conversion: pre-rules on graphemes, a greedy grapheme map,
// then post-rules on segments.

use phonostream::g2p::{Backend, RuleSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/toy.rules");
    let backend = Backend::Rules(RuleSet::from_path(path)?);

    for line in ["cha", "the djinn", "hello bank", "xylophone"] {
        let out = backend.convert_utterance(line, true)?;
        println!("{line:<12} -> {}", out.stream);
        if !out.unmapped.is_empty() {
            println!("{:<12}    unmapped: {:?}", "", out.unmapped.counts);
        }
    }

    // longest grapheme wins: "ch" before "c"
    let out = backend.convert_utterance("cha", false)?;
    assert_eq!(out.stream.to_string(), "tʃ a");
    // post-rule d ʒ -> dʒ applies to map output
    let out = backend.convert_utterance("djin", false)?;
    assert_eq!(out.stream.to_string(), "dʒ i n");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("convert_rules example failed");
}
