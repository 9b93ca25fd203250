// Folding a backend's output onto a reference inventory and checking
// what is left over.

use std::collections::BTreeSet;

use phonostream::folding::{self, FoldMap, ValidationReport};
use phonostream::inventory::load_inventories_from_path;
use phonostream::{IpaSegment, PhonemeStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let raw = std::fs::read_to_string(format!("{data}/french_backend.txt"))?;
    let streams: Vec<PhonemeStream> = raw.lines().map(PhonemeStream::parse).collect();
    let map = FoldMap::from_path(format!("{data}/french.fold"))?;
    let french = load_inventories_from_path(format!("{data}/inventories.csv"))?
        .into_iter()
        .find(|inv| inv.id == 2269)
        .ok_or("inventory 2269 missing")?;

    for rule in &map.rules {
        println!("{:<12} delta {:+}", rule.kind.label(), rule.token_delta());
    }
    for d in map.check() {
        println!("check: {d}");
    }

    let before: BTreeSet<IpaSegment> = phonostream::stream::segment_types(&streams);
    let raw_report = folding::diff_inventory(&before, &french);
    println!(
        "before folding: {} unknown, {} unseen",
        raw_report.unknown.len(),
        raw_report.unseen.len()
    );

    let folded: Vec<PhonemeStream> = streams.iter().map(|s| map.apply(s)).collect();
    let after = phonostream::stream::segment_types(&folded);
    let report = folding::diff_inventory(&after, &french);
    let view = ValidationReport::new(&report, folding::suggest_mappings(&report, &french));
    print!("{}", view.to_text());

    let seg = |s: &str| IpaSegment::new(s).expect("valid segment");
    assert_eq!(report.unknown, BTreeSet::from([seg("dʒ"), seg("tʃ")]));
    assert_eq!(report.unseen, BTreeSet::from([seg("ɧ")]));
    // the loanword affricates are accepted, the missing phoneme too
    let allowed = BTreeSet::from([seg("dʒ"), seg("tʃ"), seg("ɧ")]);
    assert!(report.is_aligned_except(&allowed));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("fold_and_validate example failed");
}
