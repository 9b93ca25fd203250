// Dictionary lookup with a rule-based fallback for missing words.

use phonostream::g2p::{Backend, Lexicon, RuleSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let lexicon = Lexicon::parse("the\tð ə\ncake\tk eɪ k\nbake\tb eɪ k\n")?;
    let fallback = RuleSet::from_path(concat!(env!("CARGO_MANIFEST_DIR"), "/data/toy.rules"))?;

    let strict = Backend::Lexicon {
        lexicon: lexicon.clone(),
        fallback: None,
    };
    let lenient = Backend::Lexicon {
        lexicon,
        fallback: Some(fallback),
    };

    let line = "The cake is big";
    match strict.convert_utterance(line, true) {
        Ok(out) => println!("strict:  {}", out.stream),
        Err(e) => println!("strict:  {e}"),
    }
    let out = lenient.convert_utterance(line, true)?;
    println!("lenient: {}", out.stream);
    assert_eq!(
        out.stream.to_string(),
        "ð ə WORD_BOUNDARY k eɪ k WORD_BOUNDARY i s WORD_BOUNDARY b i ɡ"
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("lexicon_fallback example failed");
}
