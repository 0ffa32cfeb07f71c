//! Seeded random trees and segments.
//!
//! Topologies are grown by sequential leaf attachment: starting from the
//! three-leaf star on `{0, 1, 2}`, leaf `i` subdivides a uniformly chosen
//! edge. This samples unrooted binary topologies uniformly. Lengths are
//! uniform in `[0.5, 2.0]`.

use rand::Rng;

use crate::dynamic::Segment;
use crate::error::Result;
use crate::tree_model::{LabelSet, PhyloTree, Split};

pub const LENGTH_RANGE: (f64, f64) = (0.5, 2.0);

/// Split set of a random binary topology on labels `0..=r`.
pub fn random_topology<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<Vec<Split>> {
    let labels = LabelSet::new(r)?;
    // nodes 0..=r are leaves, internal nodes follow
    let mut edges: Vec<(usize, usize)> = vec![(0, r + 1), (1, r + 1), (2, r + 1)];
    let mut next = r + 2;
    for leaf in 3..=r {
        let k = rng.gen_range(0..edges.len());
        let (u, v) = edges[k];
        let w = next;
        next += 1;
        edges[k] = (u, w);
        edges.push((w, v));
        edges.push((leaf, w));
    }

    let mut adj = vec![Vec::new(); next];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    // root at leaf 0; each edge's split is the leaf set below it
    let words = (r + 1).div_ceil(64);
    let mut below = vec![vec![0u64; words]; next];
    let mut parent = vec![usize::MAX; next];
    let mut order = vec![0];
    parent[0] = 0;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                order.push(v);
            }
        }
    }
    let mut splits = Vec::new();
    for &u in order.iter().rev() {
        if u == 0 {
            continue;
        }
        if u <= r {
            below[u][u / 64] |= 1 << (u % 64);
        }
        let p = parent[u];
        if p != 0 {
            let child = below[u].clone();
            for (w, c) in below[p].iter_mut().zip(child) {
                *w |= c;
            }
        }
        splits.push(Split::from_side(labels, &below[u])?);
    }
    splits.sort();
    Ok(splits)
}

/// Random lengths on a fixed split set.
pub fn with_random_lengths<R: Rng + ?Sized>(
    labels: LabelSet,
    splits: &[Split],
    rng: &mut R,
) -> Result<PhyloTree> {
    let (lo, hi) = LENGTH_RANGE;
    PhyloTree::from_edges(
        labels,
        splits.iter().map(|s| (s.clone(), rng.gen_range(lo..=hi))),
    )
}

pub fn random_tree<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<PhyloTree> {
    let splits = random_topology(r, rng)?;
    with_random_lengths(LabelSet::new(r)?, &splits, rng)
}

/// Same-orthant segment `X0 -> X1` and an independent target `T`.
pub fn random_segment<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<Segment> {
    let x0 = random_tree(r, rng)?;
    let splits: Vec<Split> = x0.splits().cloned().collect();
    let x1 = with_random_lengths(x0.labels(), &splits, rng)?;
    let t = random_tree(r, rng)?;
    Segment::new(x0, x1, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn binary_topologies_have_full_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for r in 2..40 {
            let t = random_tree(r, &mut rng).unwrap();
            assert_eq!(t.edge_count(), 2 * r - 1);
            assert_eq!(t.splits().filter(|s| s.is_leaf_edge()).count(), r + 1);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = random_tree(12, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = random_tree(12, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }
}
