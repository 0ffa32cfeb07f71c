//! Geodesics between two fixed trees.
//!
//! A geodesic is certified by a support sequence `(A_1, B_1), ..., (A_k, B_k)`
//! partitioning the non-common edges, subject to three conditions:
//!
//! * cross-compatibility: `A_i` is compatible with `B_j` whenever `i > j`;
//! * monotone ratios: `‖A_1‖/‖B_1‖ <= ... <= ‖A_k‖/‖B_k‖`;
//! * no pair admits an improving partition (checked with [`crate::flow`]).
//!
//! [`compute_geodesic`] starts from the single pair `(E_X \ C, E_T \ C)` and
//! keeps splitting pairs until every extension check is satisfied.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, check_extension_network, ExtensionResult, Partition};
use crate::tree_model::{
    classify_edges, CommonEdge, EdgeClassification, LabelSet, PhyloTree, Split, SplitJson,
};

/// Relative slack allowed on the cross-multiplied ratio chain.
pub const RATIO_CHAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SupportPair {
    a: Vec<(Split, f64)>,
    b: Vec<(Split, f64)>,
    norm_a: f64,
    norm_b: f64,
}

impl SupportPair {
    /// `a` carries lengths in X, `b` lengths in T (ordinary coordinates).
    pub fn new(a: Vec<(Split, f64)>, b: Vec<(Split, f64)>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::InvalidSupports("support pair with an empty side".into()));
        }
        let norm_a = a.iter().map(|(_, l)| l * l).sum::<f64>().sqrt();
        let norm_b = b.iter().map(|(_, l)| l * l).sum::<f64>().sqrt();
        if !(norm_a > 0.0 && norm_b > 0.0) {
            return Err(Error::InvalidSupports("support pair with zero norm".into()));
        }
        Ok(SupportPair {
            a,
            b,
            norm_a,
            norm_b,
        })
    }

    pub fn a(&self) -> &[(Split, f64)] {
        &self.a
    }

    pub fn b(&self) -> &[(Split, f64)] {
        &self.b
    }

    pub fn norm_a(&self) -> f64 {
        self.norm_a
    }

    pub fn norm_b(&self) -> f64 {
        self.norm_b
    }

    pub fn ratio(&self) -> f64 {
        self.norm_a / self.norm_b
    }

    pub fn a_splits(&self) -> Vec<Split> {
        self.a.iter().map(|(s, _)| s.clone()).collect()
    }

    pub fn b_splits(&self) -> Vec<Split> {
        self.b.iter().map(|(s, _)| s.clone()).collect()
    }

    pub(crate) fn squared_a(&self) -> Vec<(Split, f64)> {
        self.a.iter().map(|(s, l)| (s.clone(), l * l)).collect()
    }

    pub(crate) fn squared_b(&self) -> Vec<(Split, f64)> {
        self.b.iter().map(|(s, l)| (s.clone(), l * l)).collect()
    }

    pub fn network(&self) -> Result<flow::IncompatibilityNetwork> {
        flow::build_network(&self.squared_a(), &self.squared_b())
    }

    /// Splits the pair along an index partition, `(C1, D1)` first.
    pub fn partitioned(&self, part: &Partition) -> Result<(SupportPair, SupportPair)> {
        let pick = |side: &[(Split, f64)], idx: &[usize]| -> Vec<(Split, f64)> {
            idx.iter().map(|&i| side[i].clone()).collect()
        };
        Ok((
            SupportPair::new(pick(&self.a, &part.c1), pick(&self.b, &part.d1))?,
            SupportPair::new(pick(&self.a, &part.c2), pick(&self.b, &part.d2))?,
        ))
    }

    /// Concatenation of two pairs, `self` first.
    pub fn merged(&self, next: &SupportPair) -> SupportPair {
        let mut a = self.a.clone();
        a.extend(next.a.iter().cloned());
        let mut b = self.b.clone();
        b.extend(next.b.iter().cloned());
        SupportPair::new(a, b).expect("merging nonempty pairs")
    }

    fn reweighted(&self, x: &PhyloTree, t: &PhyloTree) -> Result<SupportPair> {
        let look = |tree: &PhyloTree, side: &[(Split, f64)], name: &str| {
            side.iter()
                .map(|(s, _)| {
                    tree.length(s)
                        .map(|l| (s.clone(), l))
                        .ok_or_else(|| Error::InvalidSupports(format!("split {s} not in {name}")))
                })
                .collect::<Result<Vec<_>>>()
        };
        SupportPair::new(look(x, &self.a, "X")?, look(t, &self.b, "T")?)
    }
}

/// Ordered support pairs plus the common-edge classification.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSequence {
    pairs: Vec<SupportPair>,
    classification: EdgeClassification,
}

impl SupportSequence {
    pub fn new(pairs: Vec<SupportPair>, classification: EdgeClassification) -> Self {
        SupportSequence {
            pairs,
            classification,
        }
    }

    /// Builds a sequence from split lists, reading lengths from `x` and `t`.
    pub fn from_splits(pairs: &[(Vec<Split>, Vec<Split>)], x: &PhyloTree, t: &PhyloTree) -> Result<Self> {
        let classification = classify_edges(x, t)?;
        let zero = |v: &[Split]| v.iter().map(|s| (s.clone(), 0.0)).collect::<Vec<_>>();
        let pairs = pairs
            .iter()
            .map(|(a, b)| {
                SupportPair {
                    a: zero(a),
                    b: zero(b),
                    norm_a: 0.0,
                    norm_b: 0.0,
                }
                .reweighted(x, t)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SupportSequence {
            pairs,
            classification,
        })
    }

    pub fn pairs(&self) -> &[SupportPair] {
        &self.pairs
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn classification(&self) -> &EdgeClassification {
        &self.classification
    }

    pub fn common(&self) -> &[CommonEdge] {
        &self.classification.common
    }

    /// Same combinatorics with lengths read from new endpoints.
    pub fn reweighted(&self, x: &PhyloTree, t: &PhyloTree) -> Result<SupportSequence> {
        Ok(SupportSequence {
            pairs: self
                .pairs
                .iter()
                .map(|p| p.reweighted(x, t))
                .collect::<Result<_>>()?,
            classification: self.classification.reweighted(x, t),
        })
    }

    /// Split lists of every pair, the combinatorial part of the certificate.
    pub fn split_pairs(&self) -> Vec<(Vec<Split>, Vec<Split>)> {
        self.pairs
            .iter()
            .map(|p| (p.a_splits(), p.b_splits()))
            .collect()
    }

    pub(crate) fn replace_pairs(&mut self, at: usize, remove: usize, with: Vec<SupportPair>) {
        self.pairs.splice(at..at + remove, with);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub x: PhyloTree,
    pub t: PhyloTree,
    pub supports: SupportSequence,
    pub distance: f64,
    /// Max-flow augmentations spent computing the certificate.
    pub augmentations: usize,
}

/// Computes the geodesic from `x` to `t` by successive pair splitting.
pub fn compute_geodesic(x: &PhyloTree, t: &PhyloTree) -> Result<Geodesic> {
    let classification = classify_edges(x, t)?;
    let mut augmentations = 0;
    let mut pairs = Vec::new();
    match (classification.only_x.is_empty(), classification.only_t.is_empty()) {
        (true, true) => {}
        (false, false) => {
            let with_len = |tree: &PhyloTree, v: &[Split]| -> Vec<(Split, f64)> {
                v.iter()
                    .map(|s| (s.clone(), tree.length(s).expect("classified from tree")))
                    .collect()
            };
            pairs.push(SupportPair::new(
                with_len(x, &classification.only_x),
                with_len(t, &classification.only_t),
            )?);
        }
        _ => {
            return Err(Error::Numerical(
                "one-sided incompatible edge set after classification".into(),
            ))
        }
    }

    let mut i = 0;
    while i < pairs.len() {
        let net = pairs[i].network()?;
        let (result, flow) = check_extension_network(&net, None)?;
        augmentations += flow.augmentations;
        match result {
            ExtensionResult::Satisfied => i += 1,
            ExtensionResult::Split(part) => {
                let (first, second) = pairs[i].partitioned(&part)?;
                pairs.splice(i..=i, [first, second]);
            }
        }
    }

    let supports = SupportSequence::new(pairs, classification);
    let distance = geodesic_distance(&supports);
    Ok(Geodesic {
        x: x.clone(),
        t: t.clone(),
        supports,
        distance,
        augmentations,
    })
}

/// Path length of the certificate, in ordinary coordinates:
/// the Euclidean norm of `(‖A_i‖ + ‖B_i‖)_i` and every common-edge difference.
pub fn geodesic_distance(seq: &SupportSequence) -> f64 {
    let pairs: f64 = seq
        .pairs
        .iter()
        .map(|p| (p.norm_a + p.norm_b).powi(2))
        .sum();
    let common: f64 = seq
        .classification
        .common
        .iter()
        .map(|c| (c.length_x - c.length_t).powi(2))
        .sum();
    (pairs + common).sqrt()
}

/// A failed certificate condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    /// The pairs do not partition the incompatible edge sets.
    Structure { message: String },
    /// `A_later` has a split incompatible with one of `B_earlier`.
    P1 {
        later: usize,
        earlier: usize,
        a: Split,
        b: Split,
    },
    /// Ratio of pair `index` exceeds that of pair `index + 1`.
    P2 { index: usize, left: f64, right: f64 },
    /// Pair `index` admits the improving partition shown.
    P3 {
        index: usize,
        c1: Vec<Split>,
        d1: Vec<Split>,
        c2: Vec<Split>,
        d2: Vec<Split>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a certificate against the endpoint trees. Lengths are re-read
/// from `x` and `t`, so a sequence stored at one point can be checked at another.
pub fn validate_supports(seq: &SupportSequence, x: &PhyloTree, t: &PhyloTree) -> ValidationReport {
    let mut report = ValidationReport::default();
    let structure = |message: String| ValidationReport {
        violations: vec![Violation::Structure { message }],
    };

    let classification = match classify_edges(x, t) {
        Ok(c) => c,
        Err(e) => return structure(e.to_string()),
    };
    let seq = match seq.reweighted(x, t) {
        Ok(s) => s,
        Err(e) => return structure(e.to_string()),
    };
    let mut seen_a: Vec<&Split> = seq.pairs.iter().flat_map(|p| p.a.iter().map(|(s, _)| s)).collect();
    let mut seen_b: Vec<&Split> = seq.pairs.iter().flat_map(|p| p.b.iter().map(|(s, _)| s)).collect();
    seen_a.sort();
    seen_b.sort();
    let mut want_a: Vec<&Split> = classification.only_x.iter().collect();
    let mut want_b: Vec<&Split> = classification.only_t.iter().collect();
    want_a.sort();
    want_b.sort();
    if seen_a != want_a || seen_b != want_b {
        return structure("pairs do not partition the incompatible edges".into());
    }

    for (i, later) in seq.pairs.iter().enumerate() {
        for (j, earlier) in seq.pairs[..i].iter().enumerate() {
            let witness = later.a.iter().find_map(|(sa, _)| {
                earlier
                    .b
                    .iter()
                    .find(|(sb, _)| !sa.compatible_with(sb))
                    .map(|(sb, _)| (sa.clone(), sb.clone()))
            });
            if let Some((a, b)) = witness {
                report.violations.push(Violation::P1 {
                    later: i,
                    earlier: j,
                    a,
                    b,
                });
            }
        }
    }

    for (i, w) in seq.pairs.windows(2).enumerate() {
        let left = w[0].norm_a * w[1].norm_b;
        let right = w[1].norm_a * w[0].norm_b;
        if left > right * (1.0 + RATIO_CHAIN_TOL) {
            report.violations.push(Violation::P2 {
                index: i,
                left: w[0].ratio(),
                right: w[1].ratio(),
            });
        }
    }

    for (i, p) in seq.pairs.iter().enumerate() {
        let outcome = p
            .network()
            .and_then(|net| check_extension_network(&net, None));
        match outcome {
            Ok((ExtensionResult::Satisfied, _)) => {}
            Ok((ExtensionResult::Split(part), _)) => {
                let pick = |side: &[(Split, f64)], idx: &[usize]| -> Vec<Split> {
                    idx.iter().map(|&k| side[k].0.clone()).collect()
                };
                report.violations.push(Violation::P3 {
                    index: i,
                    c1: pick(&p.a, &part.c1),
                    d1: pick(&p.b, &part.d1),
                    c2: pick(&p.a, &part.c2),
                    d2: pick(&p.b, &part.d2),
                });
            }
            Err(e) => report.violations.push(Violation::Structure {
                message: format!("pair {i}: {e}"),
            }),
        }
    }
    report
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    Ok(())
}

/// Index `l` of the leg containing `γ(λ)`: the number of pairs already
/// exchanged, i.e. with `(1-λ)‖A_i‖ < λ‖B_i‖`. Boundaries go to the lower leg.
pub fn leg_of(geo: &Geodesic, lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    Ok(geo
        .supports
        .pairs
        .iter()
        .filter(|p| (1.0 - lambda) * p.norm_a < lambda * p.norm_b)
        .count())
}

/// The tree `γ(λ)` on the geodesic. Edges whose length is exactly zero at
/// a leg boundary are omitted.
pub fn eval_point(geo: &Geodesic, lambda: f64) -> Result<PhyloTree> {
    check_lambda(lambda)?;
    if lambda == 0.0 {
        return Ok(geo.x.clone());
    }
    if lambda == 1.0 {
        return Ok(geo.t.clone());
    }
    let mut edges = Vec::new();
    for p in &geo.supports.pairs {
        let shrink = (1.0 - lambda) * p.norm_a - lambda * p.norm_b;
        if shrink > 0.0 {
            edges.extend(p.a.iter().map(|(s, l)| (s.clone(), shrink / p.norm_a * l)));
        } else if shrink < 0.0 {
            edges.extend(p.b.iter().map(|(s, l)| (s.clone(), -shrink / p.norm_b * l)));
        }
    }
    for c in &geo.supports.classification.common {
        let len = (1.0 - lambda) * c.length_x + lambda * c.length_t;
        if len > 0.0 {
            edges.push((c.split.clone(), len));
        }
    }
    PhyloTree::from_edges(geo.x.labels(), edges)
}

// ---- JSON certificate -------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeJson {
    pub split: SplitJson,
    pub length: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub a: Vec<EdgeJson>,
    pub b: Vec<EdgeJson>,
    pub norm_a: f64,
    pub norm_b: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommonJson {
    pub split: SplitJson,
    pub length_x: f64,
    pub length_t: f64,
}

/// Serialized geodesic (schema `geodesic.v1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicJson {
    pub version: u32,
    pub labels: usize,
    pub distance: f64,
    pub pairs: Vec<PairJson>,
    pub common: Vec<CommonJson>,
}

fn edges_json(side: &[(Split, f64)]) -> Vec<EdgeJson> {
    side.iter()
        .map(|(s, l)| EdgeJson {
            split: SplitJson(s.members()),
            length: *l,
        })
        .collect()
}

impl SupportSequence {
    pub fn to_json(&self, labels: LabelSet) -> GeodesicJson {
        GeodesicJson {
            version: 1,
            labels: labels.len(),
            distance: geodesic_distance(self),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairJson {
                    a: edges_json(&p.a),
                    b: edges_json(&p.b),
                    norm_a: p.norm_a,
                    norm_b: p.norm_b,
                    ratio: p.ratio(),
                })
                .collect(),
            common: self
                .classification
                .common
                .iter()
                .map(|c| CommonJson {
                    split: SplitJson(c.split.members()),
                    length_x: c.length_x,
                    length_t: c.length_t,
                })
                .collect(),
        }
    }

    /// Reads the pair structure of a certificate; lengths come from `x`, `t`.
    pub fn from_json(json: &GeodesicJson, x: &PhyloTree, t: &PhyloTree) -> Result<Self> {
        if json.version != 1 {
            return Err(Error::InvalidSupports(format!(
                "unsupported certificate version {}",
                json.version
            )));
        }
        let labels = x.labels();
        if json.labels != labels.len() {
            return Err(Error::LabelMismatch {
                expected: labels.len(),
                found: json.labels,
            });
        }
        let resolve = |v: &[EdgeJson]| -> Result<Vec<Split>> {
            v.iter().map(|e| e.split.resolve(labels)).collect()
        };
        let pairs = json
            .pairs
            .iter()
            .map(|p| Ok((resolve(&p.a)?, resolve(&p.b)?)))
            .collect::<Result<Vec<_>>>()?;
        SupportSequence::from_splits(&pairs, x, t)
    }
}

impl Geodesic {
    pub fn to_json(&self) -> GeodesicJson {
        let mut j = self.supports.to_json(self.x.labels());
        j.distance = self.distance;
        j
    }
}
