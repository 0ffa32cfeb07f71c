//! Checking support sequences: a computed certificate passes, a reordered
//! one breaks the ratio order, a merged one admits an improving split.
//!
//! cargo run --example validate_certificate

use dyngeo::geodesic::SupportSequence;
use dyngeo::{compute_geodesic, parse_newick, validate_supports};

fn main() -> dyngeo::Result<()> {
    let x = parse_newick("(((1:1,2:1):1,3:1):1,((4:1,5:1):3,6:1):1,0:1);", None)?;
    let t = parse_newick("(((2:1,3:1):1,1:1):1,((5:1,6:1):1,4:1):1,0:1);", None)?;
    let geo = compute_geodesic(&x, &t)?;
    println!("computed: {:?}", validate_supports(&geo.supports, &x, &t).violations);

    let mut pairs = geo.supports.split_pairs();
    pairs.swap(0, 1);
    let swapped = SupportSequence::from_splits(&pairs, &x, &t)?;
    println!("swapped:  {:?}", validate_supports(&swapped, &x, &t).violations);

    let merged = vec![(
        [pairs[0].0.clone(), pairs[1].0.clone()].concat(),
        [pairs[0].1.clone(), pairs[1].1.clone()].concat(),
    )];
    let merged = SupportSequence::from_splits(&merged, &x, &t)?;
    println!("merged:   {:?}", validate_supports(&merged, &x, &t).violations);

    let json = serde_json::to_string_pretty(&geo.to_json()).expect("serializable");
    println!("{json}");
    Ok(())
}
