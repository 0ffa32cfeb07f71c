use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Label set `{0, 1, ..., r}`. Label 0 is the root/outgroup side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelSet {
    size: usize,
}

impl LabelSet {
    /// Labels `0..=r`; requires `r >= 2`.
    pub fn new(r: usize) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidLabels(format!(
                "need at least labels 0..=2, got 0..={r}"
            )));
        }
        Ok(LabelSet { size: r + 1 })
    }

    /// Largest label `r`.
    pub fn r(&self) -> usize {
        self.size - 1
    }

    /// Number of labels, `r + 1`.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub(crate) fn check_same(&self, other: &LabelSet) -> Result<()> {
        if self.size != other.size {
            return Err(Error::LabelMismatch {
                expected: self.size,
                found: other.size,
            });
        }
        Ok(())
    }
}

/// A bipartition of the label set, stored as the side that excludes label 0.
///
/// Singleton members are leaf edges; the full side `{1..r}` is the edge of
/// leaf 0 itself.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Split {
    labels: usize,
    words: Box<[u64]>,
}

impl Split {
    /// Builds a split from members of the 0-free side.
    pub fn new<I>(labels: LabelSet, members: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let n = labels.len();
        let mut words = vec![0u64; n.div_ceil(64)].into_boxed_slice();
        let mut count = 0;
        for m in members {
            if m == 0 {
                return Err(Error::InvalidSplit("label 0 cannot be a member".into()));
            }
            if m >= n {
                return Err(Error::InvalidSplit(format!(
                    "label {m} outside 0..={}",
                    n - 1
                )));
            }
            let (w, b) = (m / 64, m % 64);
            if words[w] & (1 << b) == 0 {
                count += 1;
            }
            words[w] |= 1 << b;
        }
        if count == 0 {
            return Err(Error::InvalidSplit("empty split".into()));
        }
        Ok(Split { labels: n, words })
    }

    /// Builds a split from either side of a bipartition: if `side` contains
    /// label 0 its complement is stored.
    pub(crate) fn from_side(labels: LabelSet, side: &[u64]) -> Result<Self> {
        let n = labels.len();
        let mut words: Box<[u64]> = side.into();
        if words[0] & 1 == 1 {
            for (i, w) in words.iter_mut().enumerate() {
                *w = !*w & valid_mask(n, i);
            }
        }
        if words.iter().all(|&w| w == 0) {
            return Err(Error::InvalidSplit("trivial bipartition".into()));
        }
        Ok(Split { labels: n, words })
    }

    pub fn label_count(&self) -> usize {
        self.labels
    }

    pub fn label_set(&self) -> LabelSet {
        LabelSet { size: self.labels }
    }

    /// Members of the 0-free side in increasing order.
    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w & (1u64 << b) != 0).map(move |b| i * 64 + b)
        })
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, label: usize) -> bool {
        label < self.labels && self.words[label / 64] & (1 << (label % 64)) != 0
    }

    pub fn min_member(&self) -> usize {
        self.iter().next().expect("splits are nonempty")
    }

    /// True for pendant edges: a single leaf, or leaf 0 (side `{1..r}`).
    pub fn is_leaf_edge(&self) -> bool {
        let k = self.len();
        k == 1 || k == self.labels - 1
    }

    pub fn is_subset(&self, other: &Split) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Split) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// Compatibility without the label-set check; both sides exclude 0 so
    /// the test reduces to disjoint-or-nested.
    pub(crate) fn compatible_with(&self, other: &Split) -> bool {
        self.is_disjoint(other) || self.is_subset(other) || other.is_subset(self)
    }
}

fn valid_mask(n: usize, word: usize) -> u64 {
    let lo = word * 64;
    let hi = (lo + 64).min(n);
    let mut mask = if hi - lo == 64 {
        u64::MAX
    } else {
        (1u64 << (hi - lo)) - 1
    };
    if word == 0 {
        mask &= !1;
    }
    mask
}

/// True iff the two splits can coexist in one tree.
pub fn splits_compatible(s1: &Split, s2: &Split) -> Result<bool> {
    s1.label_set().check_same(&s2.label_set())?;
    Ok(s1.compatible_with(s2))
}

impl Ord for Split {
    fn cmp(&self, other: &Self) -> Ordering {
        self.labels
            .cmp(&other.labels)
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for Split {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// JSON form: the sorted member list. Deserialization needs the label count,
/// so splits are only read back through [`SplitJson`].
impl Serialize for Split {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.members().serialize(s)
    }
}

/// Member list as it appears in JSON, resolved against a label set later.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitJson(pub Vec<usize>);

impl<'de> Deserialize<'de> for SplitJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(SplitJson(Vec::deserialize(d)?))
    }
}

impl SplitJson {
    pub fn resolve(&self, labels: LabelSet) -> Result<Split> {
        Split::new(labels, self.0.iter().copied())
    }
}
