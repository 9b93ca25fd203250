// Converting a CSV corpus with several workers while keeping its metadata.

use phonostream::corpus::{self, ConvertOptions, CorpusSchema};
use phonostream::g2p::{Backend, RuleSet};
use phonostream::FoldMap;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let backend = Backend::Rules(RuleSet::from_path(format!("{data}/toy.rules"))?);
    // one correction: the toy backend's r becomes an approximant
    let map = FoldMap::parse("r -> ɹ\n")?;
    let mut corpus = corpus::read_corpus_path(format!("{data}/corpus.csv"), &CorpusSchema::default())?;

    let options = ConvertOptions {
        keep_word_boundaries: true,
        uncorrected: false,
        workers: 4,
    };
    let mut summary = corpus::convert_corpus(&mut corpus.records, &backend, Some(&map), options)?;
    summary.skipped_rows = corpus.skipped.len();

    let mut out = Vec::new();
    corpus::write_corpus(&corpus.records, &corpus.header, &mut out)?;
    print!("{}", String::from_utf8(out)?);
    println!("{}", summary.to_json());
    assert_eq!(summary.converted, corpus.records.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("corpus_pipeline example failed");
}
