//! Work done by the sweep versus recomputing the geodesic from scratch.
//!
//! cargo run --release --example bench -- [leaves] [trials] [seed]

use dyngeo::bench::run_bench;
use dyngeo::dynamic::SweepConfig;

fn main() -> dyngeo::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let leaves = args.first().copied().unwrap_or(30) as usize;
    let trials = args.get(1).copied().unwrap_or(10) as usize;
    let seed = args.get(2).copied().unwrap_or(1);

    let report = run_bench(leaves, trials, seed, &SweepConfig::default())?;
    print!("{}", report.render(true));
    println!(
        "sweep used no more augmentations than scratch on {} of {} trials",
        report.sweep_wins(),
        trials
    );
    Ok(())
}
