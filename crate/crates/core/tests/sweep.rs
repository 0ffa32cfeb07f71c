mod common;

use common::rel_err;
use dyngeo::dynamic::{scaled_drift, sweep, EventKind, Segment, SweepConfig};
use dyngeo::random::random_segment;
use dyngeo::{compute_geodesic, parse_newick, validate_supports};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_segment(seg: &Segment, grid: usize) {
    let res = sweep(seg, &SweepConfig::default()).unwrap();
    let mut lambdas: Vec<f64> = (0..=grid).map(|i| i as f64 / grid as f64).collect();
    for e in &res.events {
        lambdas.extend([e.lambda - 1e-6, e.lambda, e.lambda + 1e-6]);
    }
    for l in lambdas.into_iter().filter(|l| (0.0..=1.0).contains(l)) {
        let x = seg.point(l).unwrap();
        let seq = res.supports_at(l).unwrap();
        let report = validate_supports(&seq, &x, seg.t());
        assert!(report.is_valid(), "λ={l}: {report:?}");
        let scratch = compute_geodesic(&x, seg.t()).unwrap().distance;
        let kept = res.distance_at(l).unwrap();
        assert!(rel_err(kept, scratch) <= 1e-9, "λ={l}: {kept} vs {scratch}");
    }
}

#[test]
fn random_segments_match_scratch() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for r in 4..=9 {
        for _ in 0..15 {
            let seg = random_segment(r, &mut rng).unwrap();
            check_segment(&seg, 40);
        }
    }
}

#[test]
fn nearby_targets_match_scratch() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for r in [6, 10, 16] {
        for swaps in 1..=3 {
            for _ in 0..8 {
                check_segment(&common::nearby_segment(r, swaps, &mut rng), 40);
            }
        }
    }
}

#[test]
fn events_are_ordered_and_continuous() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let seg = random_segment(8, &mut rng).unwrap();
        let res = sweep(&seg, &SweepConfig::default()).unwrap();
        for w in res.events.windows(2) {
            assert!(w[0].lambda <= w[1].lambda);
        }
        for e in &res.events {
            assert!((0.0..=1.0).contains(&e.lambda));
            assert!(rel_err(e.distance_before, e.distance_after) < 1e-9);
        }
        assert_eq!(res.intervals.len(), res.events.len() + 1);
    }
}

#[test]
fn reversed_sweep_mirrors_events() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut compared = 0;
    for _ in 0..60 {
        let seg = random_segment(7, &mut rng).unwrap();
        let fwd = sweep(&seg, &SweepConfig::default()).unwrap();
        let back = sweep(&seg.reversed(), &SweepConfig::default()).unwrap();
        let mut f: Vec<(f64, EventKind)> = fwd.events.iter().map(|e| (e.lambda, e.kind)).collect();
        let mut b: Vec<(f64, EventKind)> = back
            .events
            .iter()
            .map(|e| {
                let kind = match e.kind {
                    EventKind::P2 => EventKind::P3,
                    EventKind::P3 => EventKind::P2,
                };
                (1.0 - e.lambda, kind)
            })
            .collect();
        f.sort_by(|x, y| x.0.total_cmp(&y.0));
        b.sort_by(|x, y| x.0.total_cmp(&y.0));
        // simultaneous events may be resolved in a different order
        let distinct = f.windows(2).all(|w| w[1].0 - w[0].0 > 1e-6);
        if !distinct {
            continue;
        }
        assert_eq!(f.len(), b.len(), "{f:?} vs {b:?}");
        for (x, y) in f.iter().zip(&b) {
            assert!((x.0 - y.0).abs() < 1e-7, "{f:?} vs {b:?}");
            assert_eq!(x.1, y.1);
        }
        compared += 1;
    }
    assert!(compared > 30);
}

#[test]
fn distance_is_lipschitz_along_segment() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let seg = random_segment(8, &mut rng).unwrap();
        let res = sweep(&seg, &SweepConfig::default()).unwrap();
        let n = 1000;
        let pts: Vec<_> = (0..=n).map(|i| seg.point(i as f64 / n as f64).unwrap()).collect();
        let d: Vec<f64> = (0..=n).map(|i| res.distance_at(i as f64 / n as f64).unwrap()).collect();
        for i in 0..n {
            // both points lie in one orthant, so the straight-line length bounds the change
            let step: f64 = pts[i]
                .edges()
                .map(|(s, l)| (l - pts[i + 1].length(s).unwrap()).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!((d[i + 1] - d[i]).abs() <= step * (1.0 + 1e-9) + 1e-12);
        }
    }
}

#[test]
fn scaled_drift_sums_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        let seg = random_segment(8, &mut rng).unwrap();
        let g = compute_geodesic(seg.x0(), seg.t()).unwrap();
        for p in g.supports.pairs() {
            let sw = scaled_drift(p, &seg).unwrap();
            assert!(sw.drift.iter().sum::<f64>().abs() < 1e-14);
        }
    }
}

fn fixture(name: &str) -> dyngeo::PhyloTree {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_newick(&std::fs::read_to_string(path).unwrap(), None).unwrap()
}

#[test]
fn one_split_example() {
    // one pair ({1,2},{4,5}) vs ({2,3},{2,3,4}); weights (0.7,0.3) move to (0.2,0.8)
    let seg = Segment::new(
        fixture("one_split_x0.nwk"),
        fixture("one_split_x1.nwk"),
        fixture("one_split_t.nwk"),
    )
    .unwrap();
    let res = sweep(&seg, &SweepConfig::default()).unwrap();
    assert_eq!(res.initial.supports.k(), 1);
    assert_eq!(res.events.len(), 1);
    let e = &res.events[0];
    assert_eq!(e.kind, EventKind::P3);
    assert!((e.lambda - 0.2).abs() < 1e-12);
    let names = |v: &[dyngeo::Split]| v.iter().map(|s| s.members()).collect::<Vec<_>>();
    assert_eq!(names(&e.cover_a), vec![vec![1, 2]]);
    assert_eq!(names(&e.cover_b), vec![vec![2, 3, 4]]);
    assert_eq!(res.supports_at(0.5).unwrap().k(), 2);
    for i in 0..100 {
        let l = i as f64 / 99.0;
        let scratch = compute_geodesic(&seg.point(l).unwrap(), seg.t()).unwrap().distance;
        assert!(rel_err(res.distance_at(l).unwrap(), scratch) <= 1e-9);
    }
    check_segment(&seg, 100);
}
