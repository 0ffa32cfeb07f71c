//! Newick reading and canonical writing.
//!
//! Leaves are named by decimal labels (or names mapped to labels). Leaf 0
//! may appear either as an ordinary leaf or as the label of the root node,
//! in which case the root's branch length is the length of leaf 0's edge.
//! Writing always uses the second form with children ordered by their
//! smallest leaf label, e.g. `((1:1,2:1):1,3:1)0:1;`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use super::{LabelSet, PhyloTree, Split};
use crate::error::{Error, Result};

struct Node {
    name: Option<String>,
    length: Option<f64>,
    children: Vec<usize>,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nodes: Vec<Node>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        loop {
            match self.src.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                // bracketed comments
                Some(b'[') => {
                    while self.pos < self.src.len() && self.src[self.pos] != b']' {
                        self.pos += 1;
                    }
                    self.pos += 1;
                }
                _ => break,
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            if matches!(c, b'(' | b')' | b',' | b':' | b';' | b'[') || c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn subtree(&mut self) -> Result<usize> {
        let mut children = Vec::new();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek() {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return self.err("expected ',' or ')'"),
                }
            }
        }
        let name = self.token();
        let name = (!name.is_empty()).then(|| name.to_string());
        if children.is_empty() && name.is_none() {
            return self.err("leaf without a name");
        }
        let length = if self.peek() == Some(b':') {
            self.pos += 1;
            let tok = self.token();
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => Some(v),
                _ => return self.err(format!("bad branch length `{tok}`")),
            }
        } else {
            None
        };
        self.nodes.push(Node {
            name,
            length,
            children,
        });
        Ok(self.nodes.len() - 1)
    }
}

/// Parses a rooted Newick string whose leaves are named by decimal labels.
pub fn parse_newick(text: &str, labels: Option<LabelSet>) -> Result<PhyloTree> {
    parse_newick_with_names(text, labels, None)
}

/// Parses with an optional name-to-label dictionary; names not in the
/// dictionary must be decimal labels.
pub fn parse_newick_with_names(
    text: &str,
    labels: Option<LabelSet>,
    names: Option<&HashMap<String, usize>>,
) -> Result<PhyloTree> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        nodes: Vec::new(),
    };
    let root = p.subtree()?;
    if p.peek() != Some(b';') {
        return p.err("expected ';'");
    }
    p.pos += 1;
    if p.peek().is_some() {
        return p.err("trailing input after ';'");
    }
    let nodes = p.nodes;

    let resolve = |name: &str| -> Result<usize> {
        if let Some(&id) = names.and_then(|m| m.get(name)) {
            return Ok(id);
        }
        name.parse::<usize>()
            .map_err(|_| Error::UnknownLeaf(name.to_string()))
    };

    // leaf labels, plus the root when it names leaf 0
    let mut label_of: Vec<Option<usize>> = vec![None; nodes.len()];
    let mut seen: BTreeMap<usize, String> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        let is_root_leaf0 = i == root
            && !n.children.is_empty()
            && n.name.as_deref().map(|s| resolve(s).ok() == Some(0)) == Some(true);
        if !n.children.is_empty() && !is_root_leaf0 {
            continue;
        }
        let name = n.name.as_deref().unwrap_or_default();
        let id = resolve(name)?;
        if seen.insert(id, name.to_string()).is_some() {
            return Err(Error::DuplicateLeaf(name.to_string()));
        }
        label_of[i] = Some(id);
    }
    let count = seen.len();
    if seen.keys().copied().ne(0..count) {
        return Err(Error::InvalidLabels(format!(
            "leaf labels must be exactly 0..=r, found {:?}",
            seen.keys().collect::<Vec<_>>()
        )));
    }
    if count < 3 {
        return Err(Error::InvalidLabels(format!(
            "need at least 3 leaves (r >= 2), found {count}"
        )));
    }
    let labelset = LabelSet::new(count - 1)?;
    if let Some(expected) = labels {
        expected.check_same(&labelset)?;
    }

    let words = labelset.len().div_ceil(64);
    let mut sides: Vec<Vec<u64>> = vec![vec![0; words]; nodes.len()];
    // nodes are pushed in post-order, children first
    for i in 0..nodes.len() {
        if let Some(id) = label_of[i] {
            if i != root {
                sides[i][id / 64] |= 1 << (id % 64);
            }
        }
        for &c in &nodes[i].children {
            let child = sides[c].clone();
            for (w, cw) in sides[i].iter_mut().zip(child) {
                *w |= cw;
            }
        }
    }

    let describe = |i: usize| -> String {
        nodes[i]
            .name
            .clone()
            .unwrap_or_else(|| format!("internal node {i}"))
    };

    let mut edges: BTreeMap<Split, (f64, bool)> = BTreeMap::new();
    let mut add = |split: Split, len: f64, at_root: bool| -> Result<()> {
        if len <= 0.0 {
            return Err(Error::NonPositiveLength(len));
        }
        match edges.get_mut(&split) {
            None => {
                edges.insert(split, (len, at_root));
            }
            // the two halves of a root edge induce the same bipartition
            Some((l, true)) if at_root => *l += len,
            Some(_) => {
                return Err(Error::InvalidTree(format!(
                    "split {split} induced by two edges (unary internal node?)"
                )))
            }
        }
        Ok(())
    };
    let root_children = &nodes[root].children;
    for (i, n) in nodes.iter().enumerate() {
        if i == root {
            continue;
        }
        let len = n.length.ok_or_else(|| Error::MissingLength(describe(i)))?;
        let split = Split::from_side(labelset, &sides[i])
            .map_err(|_| Error::InvalidTree(format!("edge above {} is trivial", describe(i))))?;
        add(split, len, root_children.contains(&i))?;
    }
    if label_of[root] == Some(0) {
        let len = nodes[root]
            .length
            .ok_or_else(|| Error::MissingLength(describe(root)))?;
        let split = Split::new(labelset, 1..labelset.len())?;
        add(split, len, true)?;
    }
    PhyloTree::from_edges(labelset, edges.into_iter().map(|(s, (l, _))| (s, l)))
}

/// Canonical rooted Newick: leaf 0 is the root label, children ordered by
/// their smallest leaf. Lengths use the shortest round-trip decimal form.
/// Pendant edges missing from the tree are written without a length.
pub fn serialize_newick(tree: &PhyloTree) -> String {
    let labels = tree.labels();
    let n = labels.len();
    let full = Split::new(labels, 1..n).expect("r >= 2");

    // clades: interior splits (and leaves), laminar on {1..r}
    let mut clades: Vec<&Split> = tree
        .splits()
        .filter(|s| s.len() >= 2 && **s != full)
        .collect();
    clades.sort_by_key(|s| std::cmp::Reverse(s.len()));

    // parent of each clade = smallest strictly larger clade containing it
    let mut kids: Vec<Vec<Child>> = vec![Vec::new(); clades.len() + 1];
    let root_slot = clades.len();
    for (i, c) in clades.iter().enumerate() {
        let parent = (0..i)
            .rev()
            .find(|&j| c.is_subset(clades[j]) && clades[j].len() > c.len())
            .unwrap_or(root_slot);
        kids[parent].push(Child::Clade(i, c.min_member()));
    }
    for leaf in 1..n {
        let parent = (0..clades.len())
            .rev()
            .find(|&j| clades[j].contains(leaf))
            .unwrap_or(root_slot);
        kids[parent].push(Child::Leaf(leaf));
    }
    for k in &mut kids {
        k.sort_by_key(Child::min_leaf);
    }

    let mut out = String::new();
    write_children(&mut out, tree, &clades, &kids, root_slot);
    out.push('0');
    push_length(&mut out, tree.length(&full));
    out.push(';');
    out
}

#[derive(Clone)]
enum Child {
    Clade(usize, usize),
    Leaf(usize),
}

impl Child {
    fn min_leaf(&self) -> usize {
        match *self {
            Child::Clade(_, m) | Child::Leaf(m) => m,
        }
    }
}

fn write_children(
    out: &mut String,
    tree: &PhyloTree,
    clades: &[&Split],
    kids: &[Vec<Child>],
    slot: usize,
) {
    out.push('(');
    for (i, child) in kids[slot].iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        match *child {
            Child::Leaf(leaf) => {
                let _ = write!(out, "{leaf}");
                let s = Split::new(tree.labels(), [leaf]).expect("valid leaf");
                push_length(out, tree.length(&s));
            }
            Child::Clade(j, _) => {
                write_children(out, tree, clades, kids, j);
                push_length(out, tree.length(clades[j]));
            }
        }
    }
    out.push(')');
}

fn push_length(out: &mut String, len: Option<f64>) {
    if let Some(l) = len {
        let _ = write!(out, ":{l}");
    }
}
