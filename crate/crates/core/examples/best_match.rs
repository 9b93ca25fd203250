// Picking the reference inventory whose shape best fits a backend's output.

use phonostream::inventory::{best_match, load_inventories_from_path, CountProfile};
use phonostream::PhonemeStream;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let inventories = load_inventories_from_path(format!("{data}/inventories.csv"))?;
    let map = phonostream::FoldMap::from_path(format!("{data}/french.fold"))?;
    let raw = std::fs::read_to_string(format!("{data}/french_backend.txt"))?;
    let folded: Vec<PhonemeStream> = raw.lines().map(|l| map.apply(&PhonemeStream::parse(l))).collect();
    let observed = phonostream::stream::segment_types(&folded);

    let profile = CountProfile::of_segments(&observed);
    println!("observed {profile:?}");
    let ranked = best_match(&profile, &observed, &inventories)?;
    for m in &ranked {
        println!(
            "{:>5}  {:<18} distance {:>2}  jaccard {:.3}",
            m.inventory.id, m.inventory.language_name, m.distance, m.jaccard
        );
    }
    assert_eq!(ranked[0].inventory.id, 2269);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("best_match example failed");
}
