use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{CoverCertificate, FlowState, IncompatibilityNetwork, Partition};
use crate::geodesic::{compute_geodesic, geodesic_distance, Geodesic, SupportPair, SupportSequence};
use crate::tree_model::{Split, SplitJson};

use super::p2::{merge_pairs, p2_candidates, DiscardedRoot, P2Event};
use super::parametric::{P3Outcome, ParametricFlow};
use super::rescale::{scaled_drift, RescaleMap};
use super::Segment;

/// Environment variable overriding [`SweepConfig::residual_tol`].
pub const TOLERANCE_ENV: &str = "DYNGEO_TOLERANCE";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Arc flows at or below this are treated as empty.
    pub residual_tol: f64,
    /// Relative tolerance on ratio equality when merging pairs.
    pub ratio_tol: f64,
    /// Events closer than this are treated as simultaneous.
    pub event_tol: f64,
    /// Defaults to `10 · max(k0, 1) · r`.
    pub max_events: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            residual_tol: 1e-10,
            ratio_tol: 1e-8,
            event_tol: 1e-9,
            max_events: None,
        }
    }
}

impl SweepConfig {
    /// Defaults, with the residual tolerance read from `DYNGEO_TOLERANCE` if set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = SweepConfig::default();
        if let Ok(v) = std::env::var(TOLERANCE_ENV) {
            cfg.residual_tol = parse_tolerance(&v)?;
        }
        Ok(cfg)
    }
}

pub(crate) fn parse_tolerance(v: &str) -> Result<f64> {
    match v.trim().parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(Error::InvalidConfig(format!(
            "{TOLERANCE_ENV} must be a positive number, got `{v}`"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// Two adjacent pairs merged because their ratios met.
    P2,
    /// A pair split because its flow stopped saturating.
    P3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEvent {
    pub lambda: f64,
    pub kind: EventKind,
    pub pair_index: usize,
    /// Split: the cover `C1`/`D2`. Merge: `A_l` and `B_{l+1}`.
    pub cover_a: Vec<Split>,
    pub cover_b: Vec<Split>,
    pub distance_before: f64,
    pub distance_after: f64,
}

/// The certificate valid from `start` until the next interval starts.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportInterval {
    pub start: f64,
    pub pairs: Vec<(Vec<Split>, Vec<Split>)>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub segment: Segment,
    pub initial: Geodesic,
    pub events: Vec<SweepEvent>,
    pub intervals: Vec<SupportInterval>,
    /// Max-flow augmentations plus path reroutings over the whole sweep.
    pub augmentations: usize,
    /// Ratio-order roots seen outside the remaining range.
    pub discarded_roots: Vec<DiscardedRoot>,
}

impl SweepResult {
    fn interval_at(&self, lambda: f64) -> Result<&SupportInterval> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        let i = self.intervals.partition_point(|iv| iv.start <= lambda);
        Ok(&self.intervals[i.max(1) - 1])
    }

    /// The support sequence at `X^λ`, with lengths read at `λ`.
    pub fn supports_at(&self, lambda: f64) -> Result<SupportSequence> {
        let iv = self.interval_at(lambda)?;
        SupportSequence::from_splits(&iv.pairs, &self.segment.point(lambda)?, self.segment.t())
    }

    pub fn distance_at(&self, lambda: f64) -> Result<f64> {
        Ok(geodesic_distance(&self.supports_at(lambda)?))
    }

    pub fn to_json(&self) -> SweepJson {
        let splits = |v: &[Split]| v.iter().map(|s| SplitJson(s.members())).collect::<Vec<_>>();
        let ends = self
            .intervals
            .iter()
            .skip(1)
            .map(|iv| iv.start)
            .chain([1.0]);
        SweepJson {
            version: 1,
            labels: self.segment.x0().labels().len(),
            initial_distance: self.initial.distance,
            final_distance: self.distance_at(1.0).unwrap_or(f64::NAN),
            augmentations: self.augmentations,
            events: self
                .events
                .iter()
                .map(|e| EventJson {
                    lambda: e.lambda,
                    kind: e.kind,
                    pair_index: e.pair_index,
                    cover_a: splits(&e.cover_a),
                    cover_b: splits(&e.cover_b),
                    distance_before: e.distance_before,
                    distance_after: e.distance_after,
                })
                .collect(),
            intervals: self
                .intervals
                .iter()
                .zip(ends)
                .map(|(iv, end)| IntervalJson {
                    start: iv.start,
                    end,
                    pairs: iv
                        .pairs
                        .iter()
                        .map(|(a, b)| PairSplitsJson {
                            a: splits(a),
                            b: splits(b),
                        })
                        .collect(),
                })
                .collect(),
            samples: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EventJson {
    pub lambda: f64,
    pub kind: EventKind,
    pub pair_index: usize,
    pub cover_a: Vec<SplitJson>,
    pub cover_b: Vec<SplitJson>,
    pub distance_before: f64,
    pub distance_after: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSplitsJson {
    pub a: Vec<SplitJson>,
    pub b: Vec<SplitJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalJson {
    pub start: f64,
    pub end: f64,
    pub pairs: Vec<PairSplitsJson>,
}

/// Serialized sweep (schema `sweep.v1`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SweepJson {
    pub version: u32,
    pub labels: usize,
    pub initial_distance: f64,
    pub final_distance: f64,
    pub augmentations: usize,
    pub events: Vec<EventJson>,
    pub intervals: Vec<IntervalJson>,
    /// Distances sampled along the segment, when requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleJson>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleJson {
    pub lambda: f64,
    pub distance: f64,
}

/// Replaces pair `l` by `(C1, D1), (C2, D2)` read off `cover`, whose
/// indices refer to the pair's network.
pub fn split_pair(seq: &SupportSequence, l: usize, cover: &CoverCertificate) -> Result<SupportSequence> {
    let pair = seq
        .pairs()
        .get(l)
        .ok_or_else(|| Error::InvalidSupports(format!("no pair {l} (k = {})", seq.k())))?;
    let part = Partition::from_cover(&pair.network()?, cover)?;
    let (first, second) = pair.partitioned(&part)?;
    let mut out = seq.clone();
    out.replace_pairs(l, 1, vec![first, second]);
    Ok(out)
}

struct Tracker {
    flow: ParametricFlow,
    map: RescaleMap,
    next: Option<(f64, CoverCertificate)>,
}

impl Tracker {
    fn build(
        pair: &SupportPair,
        seg: &Segment,
        lambda: f64,
        warm: Option<Vec<f64>>,
        cfg: &SweepConfig,
    ) -> Result<Tracker> {
        let sw = scaled_drift(pair, seg)?;
        let s = sw.map.to_scaled(lambda);
        let shape = pair.network()?;
        let net = IncompatibilityNetwork::from_weights(sw.at(s), shape.b_weights().to_vec(), shape.arcs().to_vec())?;
        let warm = warm.map(|f| FlowState::project(&net, f));
        let mut flow = ParametricFlow::new(net, sw.drift.clone(), s, warm.as_ref(), cfg.residual_tol)?;
        let next = match flow.p3_next_event()? {
            P3Outcome::ReachedEnd => None,
            P3Outcome::Boundary { lambda: b, cover } => Some((sw.map.to_lambda(b).max(lambda), cover)),
        };
        Ok(Tracker {
            flow,
            map: sw.map,
            next,
        })
    }

    fn flow_at(&self, lambda: f64) -> Vec<f64> {
        self.flow.flow_at(self.map.to_scaled(lambda))
    }
}

fn squared_sum(side: &[(Split, f64)], seg: &Segment, lambda: f64) -> f64 {
    side.iter().map(|(s, _)| seg.squared_at(s, lambda)).sum()
}

/// Copies flow from `from` onto the sub-network on `rows × cols` of `to`,
/// scaled by `scale`; `row_offset`/`col_offset` shift indices into `to`.
fn carry_flow(
    flow: &[f64],
    from: &IncompatibilityNetwork,
    to: &IncompatibilityNetwork,
    map_row: impl Fn(usize) -> Option<usize>,
    map_col: impl Fn(usize) -> Option<usize>,
    scale: f64,
    out: &mut [f64],
) {
    for (id, &(a, b)) in from.arcs().iter().enumerate() {
        if let (Some(na), Some(nb)) = (map_row(a), map_col(b)) {
            if let Some(nid) = to.arc_id(na, nb) {
                out[nid] = flow[id] * scale;
            }
        }
    }
}

enum Choice {
    Merge(P2Event),
    Split(usize, f64),
}

fn merged_fingerprint(seq: &SupportSequence, l: usize) -> Vec<(Vec<Split>, Vec<Split>)> {
    let mut fp = seq.split_pairs();
    let (a, b) = fp.remove(l + 1);
    fp[l].0.extend(a);
    fp[l].1.extend(b);
    fp
}

/// Sweeps `X^λ` from 0 to 1, reporting every certificate change.
pub fn sweep(seg: &Segment, cfg: &SweepConfig) -> Result<SweepResult> {
    let t = seg.t();
    let initial = compute_geodesic(seg.x0(), t)?;
    let mut augmentations = initial.augmentations;
    let mut seq = initial.supports.clone();
    let mut trackers = Vec::with_capacity(seq.k());
    for p in seq.pairs() {
        let tr = Tracker::build(p, seg, 0.0, None, cfg)?;
        augmentations += tr.flow.augmentations();
        trackers.push(tr);
    }
    let cap = cfg
        .max_events
        .unwrap_or(10 * seq.k().max(1) * seg.x0().labels().r());

    let mut events = Vec::new();
    let mut intervals = vec![SupportInterval {
        start: 0.0,
        pairs: seq.split_pairs(),
    }];
    let mut discarded = Vec::new();
    let mut lambda = 0.0;
    // certificates already visited at the current parameter
    let mut history = vec![seq.split_pairs()];

    loop {
        let mut merges = p2_candidates(&seq, seg, lambda, &mut discarded)?;
        merges.sort_by(|a, b| {
            a.lambda
                .total_cmp(&b.lambda)
                .then(a.pair_index.cmp(&b.pair_index))
        });
        let merge = merges.into_iter().find(|e| {
            e.lambda > lambda + cfg.event_tol || !history.contains(&merged_fingerprint(&seq, e.pair_index))
        });
        let split = trackers
            .iter()
            .enumerate()
            .filter_map(|(i, tr)| tr.next.as_ref().map(|(l, _)| (i, *l)))
            .fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(b) if b.1 <= c.1 => Some(b),
                _ => Some(c),
            });
        let choice = match (merge, split) {
            (None, None) => break,
            (Some(e), None) => Choice::Merge(e),
            (None, Some((i, l))) => Choice::Split(i, l),
            (Some(e), Some((i, l))) => {
                if e.lambda <= l + cfg.event_tol {
                    Choice::Merge(e)
                } else {
                    Choice::Split(i, l)
                }
            }
        };
        let at = match &choice {
            Choice::Merge(e) => e.lambda,
            Choice::Split(_, l) => *l,
        }
        .max(lambda)
        .min(1.0);
        if events.len() >= cap {
            return Err(Error::EventCap(cap));
        }
        if at > lambda + cfg.event_tol {
            history = vec![seq.split_pairs()];
        }

        let seq_at = seq.reweighted(&seg.point(at)?, t)?;
        let before = geodesic_distance(&seq_at);
        let (next_seq, event) = match choice {
            Choice::Merge(e) => {
                let l = e.pair_index;
                let merged = merge_pairs(&seq_at, l, cfg.ratio_tol)?;
                let (left, right) = (&seq_at.pairs()[l], &seq_at.pairs()[l + 1]);
                let pair = &merged.pairs()[l];
                let net = pair.network()?;
                let (sl, sr) = (squared_sum(left.a(), seg, at), squared_sum(right.a(), seg, at));
                let mut warm = vec![0.0; net.arcs().len()];
                let (na, nb) = (left.a().len(), left.b().len());
                carry_flow(
                    &trackers[l].flow_at(at),
                    trackers[l].flow.network(),
                    &net,
                    Some,
                    Some,
                    sl / (sl + sr),
                    &mut warm,
                );
                carry_flow(
                    &trackers[l + 1].flow_at(at),
                    trackers[l + 1].flow.network(),
                    &net,
                    |a| Some(a + na),
                    |b| Some(b + nb),
                    sr / (sl + sr),
                    &mut warm,
                );
                let tr = Tracker::build(pair, seg, at, Some(warm), cfg)?;
                augmentations += tr.flow.augmentations();
                trackers.splice(l..=l + 1, [tr]);
                let event = (EventKind::P2, l, left.a_splits(), right.b_splits());
                (merged, event)
            }
            Choice::Split(l, _) => {
                let (_, cover) = trackers[l].next.clone().expect("split candidate has a cover");
                let pair = &seq_at.pairs()[l];
                let old_net = pair.network()?;
                let part = Partition::from_cover(&old_net, &cover)?;
                let (first, second) = pair.partitioned(&part)?;
                let flow = trackers[l].flow_at(at);
                let total = squared_sum(pair.a(), seg, at);
                let mut new_trackers = Vec::with_capacity(2);
                for (piece, rows, cols) in [(&first, &part.c1, &part.d1), (&second, &part.c2, &part.d2)] {
                    let net = piece.network()?;
                    let mut warm = vec![0.0; net.arcs().len()];
                    carry_flow(
                        &flow,
                        &old_net,
                        &net,
                        |a| rows.iter().position(|&x| x == a),
                        |b| cols.iter().position(|&x| x == b),
                        total / squared_sum(piece.a(), seg, at),
                        &mut warm,
                    );
                    let tr = Tracker::build(piece, seg, at, Some(warm), cfg)?;
                    augmentations += tr.flow.augmentations();
                    new_trackers.push(tr);
                }
                trackers.splice(l..=l, new_trackers);
                let pick = |side: &[(Split, f64)], idx: &[usize]| -> Vec<Split> {
                    idx.iter().map(|&i| side[i].0.clone()).collect()
                };
                let event = (EventKind::P3, l, pick(pair.a(), &cover.c1), pick(pair.b(), &cover.d2));
                let mut next = seq_at.clone();
                next.replace_pairs(l, 1, vec![first, second]);
                (next, event)
            }
        };

        let fp = next_seq.split_pairs();
        if history.contains(&fp) {
            return Err(Error::Numerical(format!(
                "certificate revisited at λ = {at} after {} events",
                events.len()
            )));
        }
        history.push(fp.clone());
        let (kind, pair_index, cover_a, cover_b) = event;
        events.push(SweepEvent {
            lambda: at,
            kind,
            pair_index,
            cover_a,
            cover_b,
            distance_before: before,
            distance_after: geodesic_distance(&next_seq),
        });
        intervals.push(SupportInterval { start: at, pairs: fp });
        seq = next_seq;
        lambda = at;
    }

    Ok(SweepResult {
        segment: seg.clone(),
        initial,
        events,
        intervals,
        augmentations,
        discarded_roots: discarded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::validate_supports;
    use crate::tree_model::parse_newick;

    fn tree(s: &str) -> crate::PhyloTree {
        parse_newick(s, None).unwrap()
    }

    #[test]
    fn static_segment_has_no_events() {
        let x = tree("(((1:1,2:1):1,3:1):1,((4:1,5:1):3,6:1):1,0:1);");
        let t = tree("(((2:1,3:1):1,1:1):1,((5:1,6:1):1,4:1):1,0:1);");
        let res = sweep(&Segment::new(x.clone(), x, t).unwrap(), &SweepConfig::default()).unwrap();
        assert!(res.events.is_empty());
        assert_eq!(res.intervals.len(), 1);
    }

    #[test]
    fn ratio_crossing_merges_pairs() {
        let x0 = tree("(((1:1,2:1):1,3:1):1,((4:1,5:1):3,6:1):1,0:1);");
        let x1 = tree("(((1:1,2:1):1,3:1):1,((4:1,5:1):0.5,6:1):1,0:1);");
        let t = tree("(((2:1,3:1):1,1:1):1,((5:1,6:1):1,4:1):1,0:1);");
        let seg = Segment::new(x0, x1, t).unwrap();
        let res = sweep(&seg, &SweepConfig::default()).unwrap();
        assert!(!res.events.is_empty());
        let first = &res.events[0];
        assert_eq!(first.kind, EventKind::P2);
        assert!((first.lambda - 8.0 / 8.75).abs() < 1e-12);
        for e in &res.events {
            assert!((e.distance_before - e.distance_after).abs() < 1e-9);
        }
        for i in 0..=20 {
            let l = i as f64 / 20.0;
            let seq = res.supports_at(l).unwrap();
            let x = seg.point(l).unwrap();
            assert!(validate_supports(&seq, &x, seg.t()).is_valid(), "invalid at {l}");
            let d = compute_geodesic(&x, seg.t()).unwrap().distance;
            assert!((res.distance_at(l).unwrap() - d).abs() < 1e-9);
        }
    }

    #[test]
    fn tolerance_parsing() {
        assert_eq!(parse_tolerance("1e-8").unwrap(), 1e-8);
        assert!(parse_tolerance("0").is_err());
        assert!(parse_tolerance("abc").is_err());
    }
}
