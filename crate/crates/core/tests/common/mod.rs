//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use dyngeo::flow::IncompatibilityNetwork;
use dyngeo::geodesic::SupportPair;
use dyngeo::tree_model::{classify_edges, PhyloTree, Split};
use rand::Rng;

/// Minimum weight of a vertex cover, by enumerating every subset of a-nodes
/// and taking all b-nodes adjacent to the excluded ones.
pub fn exhaustive_min_cover(net: &IncompatibilityNetwork) -> f64 {
    let (na, nb) = (net.a_len(), net.b_len());
    assert!(na <= 20);
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << na) {
        let mut need_b = vec![false; nb];
        for &(a, b) in net.arcs() {
            if mask & (1 << a) == 0 {
                need_b[b] = true;
            }
        }
        let w: f64 = (0..na)
            .filter(|a| mask & (1 << a) != 0)
            .map(|a| net.a_weights()[a])
            .sum::<f64>()
            + (0..nb).filter(|&b| need_b[b]).map(|b| net.b_weights()[b]).sum::<f64>();
        best = best.min(w);
    }
    best
}

/// Outcome of enumerating every partition `C1 ∪ C2`, `D1 ∪ D2` with
/// `C2 ∪ D1` independent and all parts nonempty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improvement {
    /// Some partition has `‖C1‖/‖D1‖ < ‖C2‖/‖D2‖` by more than the margin.
    Exists,
    /// Every partition has `‖C1‖/‖D1‖ >= ‖C2‖/‖D2‖` by more than the margin.
    None,
    /// The best partition is within the margin of equality.
    Borderline,
}

/// Improving-partition search on squared side weights.
pub fn exhaustive_improvement(a: &[f64], b: &[f64], arcs: &[(usize, usize)], margin: f64) -> Improvement {
    let (na, nb) = (a.len(), b.len());
    let mut best = f64::INFINITY;
    for c1 in 1u32..(1 << na) - 1 {
        for d2 in 1u32..(1 << nb) - 1 {
            // C2 = a not in c1, D1 = b not in d2; they must share no arc
            let clash = arcs
                .iter()
                .any(|&(x, y)| c1 & (1 << x) == 0 && d2 & (1 << y) == 0);
            if clash {
                continue;
            }
            let sum = |w: &[f64], m: u32, inside: bool| -> f64 {
                (0..w.len())
                    .filter(|&i| (m & (1 << i) != 0) == inside)
                    .map(|i| w[i])
                    .sum()
            };
            let (nc1, nc2) = (sum(a, c1, true), sum(a, c1, false));
            let (nd1, nd2) = (sum(b, d2, false), sum(b, d2, true));
            // improving iff nc1 * nd2 < nc2 * nd1
            let lhs = nc1 * nd2;
            let rhs = nc2 * nd1;
            best = best.min((lhs - rhs) / lhs.max(rhs));
        }
    }
    if best < -margin {
        Improvement::Exists
    } else if best > margin || best == f64::INFINITY {
        Improvement::None
    } else {
        Improvement::Borderline
    }
}

/// Improvement search for a support pair using squared lengths.
pub fn pair_improvement(pair: &SupportPair, margin: f64) -> Improvement {
    let sq = |side: &[(Split, f64)]| side.iter().map(|(_, l)| l * l).collect::<Vec<_>>();
    let mut arcs = Vec::new();
    for (i, (sa, _)) in pair.a().iter().enumerate() {
        for (j, (sb, _)) in pair.b().iter().enumerate() {
            if !dyngeo::tree_model::splits_compatible(sa, sb).unwrap() {
                arcs.push((i, j));
            }
        }
    }
    exhaustive_improvement(&sq(pair.a()), &sq(pair.b()), &arcs, margin)
}

/// Every assignment of `n` items to `k` ordered nonempty blocks.
fn surjections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    loop {
        let mut hit = vec![false; k];
        cur.iter().for_each(|&i| hit[i] = true);
        if hit.iter().all(|&h| h) {
            out.push(cur.clone());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            cur[i] += 1;
            if cur[i] < k {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

/// Geodesic distance as the minimum of the path-length formula over every
/// ordered partition that is cross-compatible and has nondecreasing ratios.
pub fn exhaustive_distance(x: &PhyloTree, t: &PhyloTree) -> f64 {
    let c = classify_edges(x, t).unwrap();
    let common: f64 = c
        .common
        .iter()
        .map(|e| (e.length_x - e.length_t).powi(2))
        .sum();
    let (ax, bt) = (&c.only_x, &c.only_t);
    if ax.is_empty() {
        return common.sqrt();
    }
    let la: Vec<f64> = ax.iter().map(|s| x.length(s).unwrap()).collect();
    let lb: Vec<f64> = bt.iter().map(|s| t.length(s).unwrap()).collect();
    let mut best = f64::INFINITY;
    for k in 1..=ax.len().min(bt.len()) {
        let sa = surjections(ax.len(), k);
        let sb = surjections(bt.len(), k);
        for fa in &sa {
            for fb in &sb {
                // P1: A_i compatible with B_j whenever i > j
                let p1 = (0..ax.len()).all(|i| {
                    (0..bt.len()).all(|j| fa[i] <= fb[j] || splits_ok(&ax[i], &bt[j]))
                });
                if !p1 {
                    continue;
                }
                let mut na = vec![0.0; k];
                let mut nb = vec![0.0; k];
                fa.iter().zip(&la).for_each(|(&i, l)| na[i] += l * l);
                fb.iter().zip(&lb).for_each(|(&i, l)| nb[i] += l * l);
                let (na, nb): (Vec<f64>, Vec<f64>) = (
                    na.iter().map(|v| v.sqrt()).collect(),
                    nb.iter().map(|v| v.sqrt()).collect(),
                );
                let p2 = (1..k).all(|i| na[i - 1] * nb[i] <= na[i] * nb[i - 1] * (1.0 + 1e-12));
                if !p2 {
                    continue;
                }
                let d: f64 = (0..k).map(|i| (na[i] + nb[i]).powi(2)).sum::<f64>() + common;
                best = best.min(d.sqrt());
            }
        }
    }
    best
}

fn splits_ok(a: &Split, b: &Split) -> bool {
    dyngeo::tree_model::splits_compatible(a, b).unwrap()
}

/// Random bipartite network with `1..=max` nodes per side and positive weights.
pub fn random_network<R: Rng>(rng: &mut R, max: usize) -> IncompatibilityNetwork {
    loop {
        let na = rng.gen_range(1..=max);
        let nb = rng.gen_range(1..=max);
        let p: f64 = rng.gen_range(0.2..0.9);
        let mut arcs = Vec::new();
        for a in 0..na {
            for b in 0..nb {
                if rng.gen_bool(p) {
                    arcs.push((a, b));
                }
            }
        }
        let w = |rng: &mut R, n: usize| {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let mut v: Vec<f64> = raw.iter().map(|x| x / s).collect();
            let rest: f64 = v[1..].iter().sum();
            v[0] = 1.0 - rest;
            v
        };
        let (aw, bw) = (w(rng, na), w(rng, nb));
        if let Ok(net) = IncompatibilityNetwork::from_weights(aw, bw, arcs) {
            return net;
        }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `tree` with `swaps` random pairs of nonzero leaf labels exchanged and
/// fresh random lengths; a target close to `tree`'s orthant.
pub fn swapped_leaves<R: Rng>(tree: &PhyloTree, swaps: usize, rng: &mut R) -> PhyloTree {
    let labels = tree.labels();
    let r = labels.r();
    let mut perm: Vec<usize> = (0..=r).collect();
    for _ in 0..swaps {
        let i = rng.gen_range(1..=r);
        let j = rng.gen_range(1..=r);
        perm.swap(i, j);
    }
    let edges = tree.splits().map(|s| {
        let moved = Split::new(labels, s.members().into_iter().map(|m| perm[m])).unwrap();
        (moved, rng.gen_range(0.5..=2.0))
    });
    PhyloTree::from_edges(labels, edges.collect::<Vec<_>>()).unwrap()
}

/// Segment from a random tree to fresh lengths on its topology, aimed at a
/// target `swaps` leaf exchanges away.
pub fn nearby_segment<R: Rng>(r: usize, swaps: usize, rng: &mut R) -> dyngeo::dynamic::Segment {
    let x0 = dyngeo::random::random_tree(r, rng).unwrap();
    let splits: Vec<Split> = x0.splits().cloned().collect();
    let x1 = dyngeo::random::with_random_lengths(x0.labels(), &splits, rng).unwrap();
    let t = swapped_leaves(&x0, swaps, rng);
    dyngeo::dynamic::Segment::new(x0, x1, t).unwrap()
}
