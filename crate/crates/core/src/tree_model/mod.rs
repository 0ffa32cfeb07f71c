//! Trees as weighted split sets.
//!
//! A [`PhyloTree`] is a point of treespace: a set of pairwise compatible
//! splits over the labels `0..=r`, each carrying a strictly positive length.
//! Splits are stored by their 0-free side, so two trees agree on an edge
//! exactly when they hold equal [`Split`] values.

mod classify;
mod newick;
mod split;

use std::collections::BTreeMap;

pub use classify::{classify_edges, CommonEdge, EdgeClassification};
pub use newick::{parse_newick, parse_newick_with_names, serialize_newick};
pub use split::{splits_compatible, LabelSet, Split, SplitJson};

use crate::error::{Error, Result};

/// A phylogenetic tree: compatible splits with positive lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree {
    labels: LabelSet,
    edges: BTreeMap<Split, f64>,
}

impl PhyloTree {
    /// Validates positivity, pairwise compatibility and the edge count bound.
    pub fn from_edges<I>(labels: LabelSet, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Split, f64)>,
    {
        let mut map = BTreeMap::new();
        for (s, len) in edges {
            labels.check_same(&s.label_set())?;
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::NonPositiveLength(len));
            }
            if map.insert(s.clone(), len).is_some() {
                return Err(Error::InvalidTree(format!("split {s} given twice")));
            }
        }
        let max = 2 * labels.r() - 1;
        if map.len() > max {
            return Err(Error::InvalidTree(format!(
                "{} splits exceed the maximum of {max} for {} labels",
                map.len(),
                labels.len()
            )));
        }
        let splits: Vec<&Split> = map.keys().collect();
        for (i, s) in splits.iter().enumerate() {
            for t in &splits[i + 1..] {
                if !s.compatible_with(t) {
                    return Err(Error::InvalidTree(format!(
                        "splits {s} and {t} are incompatible"
                    )));
                }
            }
        }
        Ok(PhyloTree { labels, edges: map })
    }

    pub fn labels(&self) -> LabelSet {
        self.labels
    }

    pub fn length(&self, split: &Split) -> Option<f64> {
        self.edges.get(split).copied()
    }

    pub fn contains(&self, split: &Split) -> bool {
        self.edges.contains_key(split)
    }

    /// Edges in canonical split order.
    pub fn edges(&self) -> impl Iterator<Item = (&Split, f64)> {
        self.edges.iter().map(|(s, &l)| (s, l))
    }

    pub fn splits(&self) -> impl Iterator<Item = &Split> {
        self.edges.keys()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Same topology as `self`, i.e. identical split sets.
    pub fn same_topology(&self, other: &PhyloTree) -> bool {
        self.labels == other.labels && self.edges.keys().eq(other.edges.keys())
    }

    /// Drops every pendant edge, keeping only interior splits.
    pub fn without_leaf_edges(&self) -> PhyloTree {
        PhyloTree {
            labels: self.labels,
            edges: self
                .edges
                .iter()
                .filter(|(s, _)| !s.is_leaf_edge())
                .map(|(s, &l)| (s.clone(), l))
                .collect(),
        }
    }

    /// Replaces lengths with `f(split, length)`; the result is revalidated.
    pub fn map_lengths<F>(&self, mut f: F) -> Result<PhyloTree>
    where
        F: FnMut(&Split, f64) -> f64,
    {
        PhyloTree::from_edges(
            self.labels,
            self.edges.iter().map(|(s, &l)| (s.clone(), f(s, l))),
        )
    }
}

/// A tree in squared coordinates: every length replaced by its square.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredTree {
    labels: LabelSet,
    coords: BTreeMap<Split, f64>,
}

impl SquaredTree {
    pub fn from_coords<I>(labels: LabelSet, coords: I) -> Self
    where
        I: IntoIterator<Item = (Split, f64)>,
    {
        SquaredTree {
            labels,
            coords: coords.into_iter().collect(),
        }
    }

    pub fn labels(&self) -> LabelSet {
        self.labels
    }

    pub fn coord(&self, split: &Split) -> Option<f64> {
        self.coords.get(split).copied()
    }

    pub fn coords(&self) -> impl Iterator<Item = (&Split, f64)> {
        self.coords.iter().map(|(s, &c)| (s, c))
    }
}

pub fn square_coords(tree: &PhyloTree) -> SquaredTree {
    SquaredTree {
        labels: tree.labels,
        coords: tree.edges.iter().map(|(s, &l)| (s.clone(), l * l)).collect(),
    }
}

/// Inverse of [`square_coords`]. Negative coordinates are rejected.
pub fn unsquare_coords(sq: &SquaredTree) -> Result<PhyloTree> {
    let mut edges = Vec::with_capacity(sq.coords.len());
    for (s, &c) in &sq.coords {
        if c < 0.0 {
            return Err(Error::Numerical(format!(
                "negative squared coordinate {c} on split {s}"
            )));
        }
        edges.push((s.clone(), c.sqrt()));
    }
    PhyloTree::from_edges(sq.labels, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(text: &str) -> PhyloTree {
        parse_newick(text, None).unwrap()
    }

    #[test]
    fn square_examples() {
        let tree = t("((1:2,2:1):1,3:1,0:1);");
        let sq = square_coords(&tree);
        let l = tree.labels();
        assert_eq!(sq.coord(&Split::new(l, [1]).unwrap()), Some(4.0));
        assert_eq!(sq.coord(&Split::new(l, [2]).unwrap()), Some(1.0));
        assert_eq!(unsquare_coords(&sq).unwrap(), tree);
    }

    #[test]
    fn unsquare_rejects_negative() {
        let l = LabelSet::new(3).unwrap();
        let sq = SquaredTree::from_coords(l, [(Split::new(l, [1]).unwrap(), -1.0)]);
        assert!(unsquare_coords(&sq).is_err());
    }

    #[test]
    fn rejects_incompatible_and_nonpositive() {
        let l = LabelSet::new(4).unwrap();
        let a = Split::new(l, [1, 2]).unwrap();
        let b = Split::new(l, [2, 3]).unwrap();
        assert!(PhyloTree::from_edges(l, [(a.clone(), 1.0), (b, 1.0)]).is_err());
        assert!(PhyloTree::from_edges(l, [(a, 0.0)]).is_err());
    }

    #[test]
    fn leaf_edges_can_be_dropped() {
        let tree = t("((1:1,2:1):1,3:1,0:1);");
        let interior = tree.without_leaf_edges();
        assert_eq!(interior.edge_count(), 1);
    }

    #[test]
    fn square_round_trip_within_ulp() {
        let tree = t("((1:0.1,2:1.7):0.3,(3:2.9,4:1e-3):5.5,0:1);");
        let back = unsquare_coords(&square_coords(&tree)).unwrap();
        for ((s, a), (_, b)) in tree.edges().zip(back.edges()) {
            let ulp = a * f64::EPSILON;
            assert!((a - b).abs() <= ulp, "{s}: {a} vs {b}");
        }
    }
}
