// Feature eligibility, probe significance and cluster separation.

use phonostream::analysis::{binomial_test, eligible_features, silhouette, LabeledVectorSet};
use phonostream::inventory::load_inventories_from_path;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let inventory = load_inventories_from_path(format!("{data}/features.csv"))?.remove(0);
    let eligible = eligible_features(&inventory, 4);
    println!("features with >= 4 plus and >= 4 minus segments: {eligible:?}");
    assert_eq!(eligible, ["f_a", "f_c"]);

    // a probe that got 5 of 5 right against a coin flip
    let p = binomial_test(5, 5, 0.5)?;
    println!("P(X >= 5 | n = 5, p = 0.5) = {p}");
    assert_eq!(p, 0.03125);
    // and 612 of 1000
    println!("P(X >= 612 | n = 1000, p = 0.5) = {:e}", binomial_test(612, 1000, 0.5)?);

    let vectors = "label,x,y\nvoiced,0,0\nvoiced,0,1\nvoiceless,10,0\nvoiceless,10,1\n";
    let set = LabeledVectorSet::from_csv(vectors.as_bytes(), "label")?;
    let score = silhouette(&set)?;
    println!("silhouette = {score:.6}");
    assert!((score - 0.900249).abs() < 1e-6);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("feature_statistics example failed");
}
