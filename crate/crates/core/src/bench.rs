//! Sweep-with-updates versus recomputation from scratch on random segments.
//!
//! Each trial sweeps a random same-orthant segment toward an independent
//! random target, then recomputes the geodesic from scratch at every event
//! parameter and on a uniform grid. Work is counted in max-flow
//! augmentations (plus path reroutings on the sweep side).

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamic::{sweep, SweepConfig};
use crate::error::{Error, Result};
use crate::geodesic::compute_geodesic;
use crate::random::random_segment;

/// Grid points evaluated per trial, in addition to the event parameters.
pub const GRID_POINTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchTrial {
    pub trial: usize,
    pub k0: usize,
    pub events: usize,
    pub sweep_augmentations: usize,
    pub scratch_augmentations: usize,
    pub sweep_time: Duration,
    pub scratch_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub leaves: usize,
    pub seed: u64,
    pub trials: Vec<BenchTrial>,
}

pub fn run_bench(leaves: usize, trials: usize, seed: u64, cfg: &SweepConfig) -> Result<BenchReport> {
    if leaves < 4 {
        return Err(Error::InvalidConfig(format!(
            "bench needs at least 4 leaves, got {leaves}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let seg = random_segment(leaves, &mut rng)?;

        let start = Instant::now();
        let res = sweep(&seg, cfg)?;
        let sweep_time = start.elapsed();

        let grid = (0..GRID_POINTS).map(|i| i as f64 / (GRID_POINTS - 1) as f64);
        let points: Vec<f64> = res.events.iter().map(|e| e.lambda).chain(grid).collect();
        let start = Instant::now();
        let mut scratch_augmentations = 0;
        for &l in &points {
            scratch_augmentations += compute_geodesic(&seg.point(l)?, seg.t())?.augmentations;
        }
        let scratch_time = start.elapsed();

        out.push(BenchTrial {
            trial,
            k0: res.initial.supports.k(),
            events: res.events.len(),
            sweep_augmentations: res.augmentations,
            scratch_augmentations,
            sweep_time,
            scratch_time,
        });
    }
    Ok(BenchReport {
        leaves,
        seed,
        trials: out,
    })
}

impl BenchReport {
    /// Trials where the sweep used no more augmentations than scratch.
    pub fn sweep_wins(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.sweep_augmentations <= t.scratch_augmentations)
            .count()
    }

    /// Plain-text table; timing columns are left out when `timing` is false
    /// so that output depends only on the seed.
    pub fn render(&self, timing: bool) -> String {
        let mut s = String::new();
        write!(s, "{:>5} {:>4} {:>6} {:>10} {:>12}", "trial", "k0", "events", "sweep_aug", "scratch_aug").unwrap();
        if timing {
            write!(s, " {:>10} {:>12}", "sweep_ms", "scratch_ms").unwrap();
        }
        s.push('\n');
        for t in &self.trials {
            write!(
                s,
                "{:>5} {:>4} {:>6} {:>10} {:>12}",
                t.trial, t.k0, t.events, t.sweep_augmentations, t.scratch_augmentations
            )
            .unwrap();
            if timing {
                write!(
                    s,
                    " {:>10.3} {:>12.3}",
                    t.sweep_time.as_secs_f64() * 1e3,
                    t.scratch_time.as_secs_f64() * 1e3
                )
                .unwrap();
            }
            s.push('\n');
        }
        s
    }
}
