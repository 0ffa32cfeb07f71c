//! Sweeping one endpoint along a segment and watching the certificate change.
//!
//! cargo run --example sweep_segment [-- --json]

use dyngeo::dynamic::{sweep, Segment, SweepConfig};
use dyngeo::parse_newick;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let w = |v: f64| v.sqrt();
    // squared lengths of {1,2} and {4,5} go from (0.7, 0.3) to (0.2, 0.8)
    let x0 = parse_newick(&format!("((1:1,2:1):{},3:1,(4:1,5:1):{},0:1);", w(0.7), w(0.3)), None)?;
    let x1 = parse_newick(&format!("((1:1,2:1):{},3:1,(4:1,5:1):{},0:1);", w(0.2), w(0.8)), None)?;
    let t = parse_newick(&format!("(((2:1,3:1):{},4:1):{},1:1,5:1,0:1);", w(0.6), w(0.4)), None)?;
    let seg = Segment::new(x0, x1, t)?;

    let res = sweep(&seg, &SweepConfig::default())?;
    if std::env::args().any(|a| a == "--json") {
        println!("{}", serde_json::to_string_pretty(&res.to_json())?);
        return Ok(());
    }
    for e in &res.events {
        println!(
            "λ = {:.9} {:?} at pair {}: cover A {:?} B {:?}, distance {:.12}",
            e.lambda, e.kind, e.pair_index, e.cover_a, e.cover_b, e.distance_after
        );
    }
    for iv in &res.intervals {
        println!("from λ = {:.6}: {} pairs", iv.start, iv.pairs.len());
    }
    for i in 0..=10 {
        let l = i as f64 / 10.0;
        println!("d(X^{l:.1}, T) = {:.12}", res.distance_at(l)?);
    }
    println!("{} augmentations in total", res.augmentations);
    Ok(())
}
