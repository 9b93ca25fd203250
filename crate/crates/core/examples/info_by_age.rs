// Mean unigram information of child-directed speech per child-age year.

use phonostream::analysis::{child_directed, info_by_age, info_curve_csv, InfoOptions, ModelScope, UnigramModel};
use phonostream::corpus::{self, ConvertOptions, CorpusSchema};
use phonostream::g2p::{Backend, RuleSet};
use phonostream::PhonemeStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // four equiprobable segments: each costs exactly 2 bits
    let model = UnigramModel::build(&[PhonemeStream::parse("a b c d")], Default::default())?;
    assert_eq!(model.information(&PhonemeStream::parse("a b"))?, 4.0);

    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let backend = Backend::Rules(RuleSet::from_path(format!("{data}/toy.rules"))?);
    let mut corpus = corpus::read_corpus_path(format!("{data}/corpus.csv"), &CorpusSchema::default())?;
    let options = ConvertOptions {
        uncorrected: true,
        ..ConvertOptions::default()
    };
    corpus::convert_corpus(&mut corpus.records, &backend, None, options)?;

    let utterances = child_directed(&corpus.records);
    let pooled = info_by_age(&utterances, InfoOptions::default())?;
    print!("pooled model\n{}", info_curve_csv(&pooled));

    let per_bucket = InfoOptions {
        scope: ModelScope::PerBucket,
        sample_size: Some(2),
        seed: 7,
        ..InfoOptions::default()
    };
    print!(
        "per-bucket model, 2 utterances per year\n{}",
        info_curve_csv(&info_by_age(&utterances, per_bucket)?)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("info_by_age example failed");
}
