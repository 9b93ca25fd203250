// Parsing, repairing and emitting phoneme streams.

use phonostream::{IpaSegment, PhonemeStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // sloppy input: doubled and leading boundaries are repaired on parse
    let stream =
        PhonemeStream::parse("UTT_BOUNDARY h ə l oʊ WORD_BOUNDARY WORD_BOUNDARY w ɜː l d UTT_BOUNDARY UTT_BOUNDARY");
    assert_eq!(stream.to_string(), "h ə l oʊ WORD_BOUNDARY w ɜː l d");
    println!("canonical:      {stream}");
    println!("without words:  {}", stream.emit(false));
    println!("segment tokens: {}", stream.segment_count());

    // precomposed and decomposed spellings are the same segment
    let composed = IpaSegment::new("\u{00e3}")?;
    let decomposed = IpaSegment::new("a\u{0303}")?;
    assert_eq!(composed, decomposed);

    let two = PhonemeStream::parse("k æ t UTT_BOUNDARY d ɒ ɡ");
    for (i, utt) in two.utterances().iter().enumerate() {
        println!("utterance {i}: {utt}");
    }
    let types: Vec<String> = two.segment_types().iter().map(|s| s.to_string()).collect();
    println!("types: {}", types.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("phoneme_stream example failed");
}
