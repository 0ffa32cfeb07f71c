use serde::Serialize;

use super::{PhyloTree, Split};
use crate::error::Result;

/// A split compatible with every edge of both trees, with its length in each.
/// An absent side carries length 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommonEdge {
    pub split: Split,
    pub length_x: f64,
    pub length_t: f64,
}

/// Partition of the two edge sets into the common set and the parts that
/// must be exchanged along the geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeClassification {
    pub common: Vec<CommonEdge>,
    pub only_x: Vec<Split>,
    pub only_t: Vec<Split>,
}

/// Splits `E_X ∪ E_T` into common edges and the incompatible remainders.
pub fn classify_edges(x: &PhyloTree, t: &PhyloTree) -> Result<EdgeClassification> {
    x.labels().check_same(&t.labels())?;
    let mut common = Vec::new();
    let mut only_x = Vec::new();
    let mut only_t = Vec::new();

    for (s, lx) in x.edges() {
        if let Some(lt) = t.length(s) {
            common.push(CommonEdge {
                split: s.clone(),
                length_x: lx,
                length_t: lt,
            });
        } else if t.splits().all(|u| s.compatible_with(u)) {
            common.push(CommonEdge {
                split: s.clone(),
                length_x: lx,
                length_t: 0.0,
            });
        } else {
            only_x.push(s.clone());
        }
    }
    for (s, lt) in t.edges() {
        if x.contains(s) {
            continue;
        }
        if x.splits().all(|u| s.compatible_with(u)) {
            common.push(CommonEdge {
                split: s.clone(),
                length_x: 0.0,
                length_t: lt,
            });
        } else {
            only_t.push(s.clone());
        }
    }
    common.sort_by(|a, b| a.split.cmp(&b.split));
    Ok(EdgeClassification {
        common,
        only_x,
        only_t,
    })
}

impl EdgeClassification {
    /// Same classification with lengths read from new endpoint trees.
    /// Absent-side zeros stay zero.
    pub(crate) fn reweighted(&self, x: &PhyloTree, t: &PhyloTree) -> EdgeClassification {
        EdgeClassification {
            common: self
                .common
                .iter()
                .map(|c| CommonEdge {
                    split: c.split.clone(),
                    length_x: x.length(&c.split).unwrap_or(0.0),
                    length_t: t.length(&c.split).unwrap_or(0.0),
                })
                .collect(),
            only_x: self.only_x.clone(),
            only_t: self.only_t.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_model::{parse_newick, LabelSet};

    fn split(l: LabelSet, m: &[usize]) -> Split {
        Split::new(l, m.iter().copied()).unwrap()
    }

    #[test]
    fn identical_trees_are_all_common() {
        let x = parse_newick("((1:1,2:2):3,(3:1,4:1):0.5,0:1);", None).unwrap();
        let c = classify_edges(&x, &x).unwrap();
        assert!(c.only_x.is_empty() && c.only_t.is_empty());
        assert_eq!(c.common.len(), x.edge_count());
        assert!(c.common.iter().all(|e| e.length_x == e.length_t));
    }

    #[test]
    fn crossing_splits_are_exchanged() {
        let x = parse_newick("((1:1,2:1):1,3:1,4:1,0:1);", None).unwrap();
        let t = parse_newick("((2:1,3:1):1,1:1,4:1,0:1);", None).unwrap();
        let l = x.labels();
        let c = classify_edges(&x, &t).unwrap();
        assert_eq!(c.only_x, vec![split(l, &[1, 2])]);
        assert_eq!(c.only_t, vec![split(l, &[2, 3])]);
        assert!(c.common.iter().all(|e| e.split.is_leaf_edge()));
    }

    #[test]
    fn nested_splits_are_common_with_zero_partner() {
        let x = parse_newick("(((1:1,2:1):3,3:1):1,4:1,0:1);", None)
            .unwrap()
            .without_leaf_edges();
        let t = parse_newick("((1:1,2:1,3:1):4,4:1,0:1);", None)
            .unwrap()
            .without_leaf_edges();
        let l = x.labels();
        let c = classify_edges(&x, &t).unwrap();
        assert!(c.only_x.is_empty() && c.only_t.is_empty());
        let e12 = c.common.iter().find(|e| e.split == split(l, &[1, 2])).unwrap();
        assert_eq!((e12.length_x, e12.length_t), (3.0, 0.0));
        let e123 = c.common.iter().find(|e| e.split == split(l, &[1, 2, 3])).unwrap();
        assert_eq!((e123.length_x, e123.length_t), (1.0, 4.0));
    }

    #[test]
    fn label_mismatch() {
        let x = parse_newick("(1:1,2:1,0:1);", None).unwrap();
        let t = parse_newick("(1:1,2:1,3:1,0:1);", None).unwrap();
        assert!(classify_edges(&x, &t).is_err());
    }
}
