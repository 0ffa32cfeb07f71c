//! Weighted bipartite incompatibility networks.
//!
//! A support pair `(A, B)` becomes an s-t network: `s -> a` with capacity
//! `w_a`, `a -> b` for every incompatible pair with unbounded capacity, and
//! `b -> t` with capacity `w_b`. Weights are squared lengths normalized to
//! sum 1 per side, so the maximum flow value is at most 1 and equals 1 iff
//! the pair admits no improving partition.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tree_model::Split;

/// Capacity standing in for "unbounded" on middle arcs; side weights sum to
/// one, so anything above one never binds.
pub const MIDDLE_CAPACITY: f64 = 2.0;

/// A pair is accepted as unsplittable when its max flow reaches `1 - EXTENSION_EPS`.
pub const EXTENSION_EPS: f64 = 1e-10;

/// Residual capacities at or below this are treated as saturated while
/// searching for augmenting paths.
pub(crate) const FLOW_EPS: f64 = 1e-14;

const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IncompatibilityNetwork {
    a_weights: Vec<f64>,
    b_weights: Vec<f64>,
    arcs: Vec<(usize, usize)>,
    a_adj: Vec<Vec<usize>>,
    b_adj: Vec<Vec<usize>>,
}

impl IncompatibilityNetwork {
    /// Builds a network from normalized weights and `(a, b)` arcs.
    pub fn from_weights(
        a_weights: Vec<f64>,
        b_weights: Vec<f64>,
        mut arcs: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if a_weights.is_empty() || b_weights.is_empty() {
            return Err(Error::InvalidNetwork("empty side".into()));
        }
        for (side, w) in [("a", &a_weights), ("b", &b_weights)] {
            if w.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidNetwork(format!("negative {side}-weight")));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
                return Err(Error::InvalidNetwork(format!(
                    "{side}-weights sum to {sum}, not 1"
                )));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let mut a_adj = vec![Vec::new(); a_weights.len()];
        let mut b_adj = vec![Vec::new(); b_weights.len()];
        for (id, &(a, b)) in arcs.iter().enumerate() {
            if a >= a_weights.len() || b >= b_weights.len() {
                return Err(Error::InvalidNetwork(format!("arc ({a}, {b}) out of range")));
            }
            a_adj[a].push(id);
            b_adj[b].push(id);
        }
        if let Some(a) = a_adj.iter().position(Vec::is_empty) {
            return Err(Error::InvalidNetwork(format!("a-node {a} has no incident arc")));
        }
        if let Some(b) = b_adj.iter().position(Vec::is_empty) {
            return Err(Error::InvalidNetwork(format!("b-node {b} has no incident arc")));
        }
        Ok(IncompatibilityNetwork {
            a_weights,
            b_weights,
            arcs,
            a_adj,
            b_adj,
        })
    }

    pub fn a_len(&self) -> usize {
        self.a_weights.len()
    }

    pub fn b_len(&self) -> usize {
        self.b_weights.len()
    }

    pub fn a_weights(&self) -> &[f64] {
        &self.a_weights
    }

    pub fn b_weights(&self) -> &[f64] {
        &self.b_weights
    }

    /// Arcs sorted by `(a, b)`; arc ids index this slice.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Arc ids leaving a-node `a`, in increasing `b` order.
    pub fn a_arcs(&self, a: usize) -> &[usize] {
        &self.a_adj[a]
    }

    /// Arc ids entering b-node `b`, in increasing `a` order.
    pub fn b_arcs(&self, b: usize) -> &[usize] {
        &self.b_adj[b]
    }

    pub fn arc_id(&self, a: usize, b: usize) -> Option<usize> {
        self.arcs.binary_search(&(a, b)).ok()
    }

    /// JSON dump of nodes, weights, arcs and (optionally) arc flows.
    pub fn debug_json(&self, flow: Option<&FlowState>) -> serde_json::Value {
        serde_json::json!({
            "a_weights": self.a_weights,
            "b_weights": self.b_weights,
            "arcs": self.arcs.iter().enumerate().map(|(id, &(a, b))| serde_json::json!({
                "a": a,
                "b": b,
                "flow": flow.map(|f| f.arc_flow[id]),
            })).collect::<Vec<_>>(),
            "value": flow.map(|f| f.value),
        })
    }
}

/// Builds the network for a support pair from squared lengths.
pub fn build_network(a: &[(Split, f64)], b: &[(Split, f64)]) -> Result<IncompatibilityNetwork> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidNetwork("support pair side is empty".into()));
    }
    let a_weights = normalize(a.iter().map(|(_, l)| *l))?;
    let b_weights = normalize(b.iter().map(|(_, l)| *l))?;
    let mut arcs = Vec::new();
    for (i, (sa, _)) in a.iter().enumerate() {
        for (j, (sb, _)) in b.iter().enumerate() {
            if !sa.compatible_with(sb) {
                arcs.push((i, j));
            }
        }
    }
    IncompatibilityNetwork::from_weights(a_weights, b_weights, arcs)
}

pub(crate) fn normalize(values: impl Iterator<Item = f64> + Clone) -> Result<Vec<f64>> {
    let sum: f64 = values.clone().sum();
    if !(sum > 0.0) {
        return Err(Error::InvalidNetwork("side has zero total weight".into()));
    }
    let mut w: Vec<f64> = values.map(|v| v / sum).collect();
    if w.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidNetwork("non-positive squared length".into()));
    }
    // push the rounding residue onto the largest entry
    let total: f64 = w.iter().sum();
    let (imax, _) = w
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    w[imax] += 1.0 - total;
    Ok(w)
}

/// Flow on every middle arc; source and sink arc flows follow by conservation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowState {
    pub arc_flow: Vec<f64>,
    pub value: f64,
    /// Augmenting paths pushed to reach this state.
    pub augmentations: usize,
}

/// One arc of the residual graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualArc {
    SourceToA(usize),
    AToSource(usize),
    AToB(usize),
    BToA(usize),
    BToSink(usize),
    SinkToB(usize),
}

impl FlowState {
    pub fn zero(net: &IncompatibilityNetwork) -> Self {
        FlowState {
            arc_flow: vec![0.0; net.arcs.len()],
            value: 0.0,
            augmentations: 0,
        }
    }

    pub fn source_flow(&self, net: &IncompatibilityNetwork, a: usize) -> f64 {
        net.a_adj[a].iter().map(|&id| self.arc_flow[id]).sum()
    }

    pub fn sink_flow(&self, net: &IncompatibilityNetwork, b: usize) -> f64 {
        net.b_adj[b].iter().map(|&id| self.arc_flow[id]).sum()
    }

    /// Residual capacity `c - z + z_rev` of a residual arc.
    pub fn residual(&self, net: &IncompatibilityNetwork, arc: ResidualArc) -> f64 {
        match arc {
            ResidualArc::SourceToA(a) => net.a_weights[a] - self.source_flow(net, a),
            ResidualArc::AToSource(a) => self.source_flow(net, a),
            ResidualArc::AToB(id) => MIDDLE_CAPACITY - self.arc_flow[id],
            ResidualArc::BToA(id) => self.arc_flow[id],
            ResidualArc::BToSink(b) => net.b_weights[b] - self.sink_flow(net, b),
            ResidualArc::SinkToB(b) => self.sink_flow(net, b),
        }
    }

    /// Capacity bounds and conservation within `tol`.
    pub fn is_feasible(&self, net: &IncompatibilityNetwork, tol: f64) -> bool {
        if self.arc_flow.len() != net.arcs.len() {
            return false;
        }
        if self
            .arc_flow
            .iter()
            .any(|&z| !(z >= -tol) || z > MIDDLE_CAPACITY + tol)
        {
            return false;
        }
        let a_ok = (0..net.a_len()).all(|a| self.source_flow(net, a) <= net.a_weights[a] + tol);
        let b_ok = (0..net.b_len()).all(|b| self.sink_flow(net, b) <= net.b_weights[b] + tol);
        a_ok && b_ok
    }

    /// Scales arc flows down until every capacity holds; negative entries
    /// are clamped to zero. Used to repair carried-over warm starts.
    pub fn project(net: &IncompatibilityNetwork, mut arc_flow: Vec<f64>) -> FlowState {
        arc_flow.resize(net.arcs.len(), 0.0);
        for z in arc_flow.iter_mut() {
            *z = z.clamp(0.0, MIDDLE_CAPACITY);
        }
        for a in 0..net.a_len() {
            let out: f64 = net.a_adj[a].iter().map(|&id| arc_flow[id]).sum();
            if out > net.a_weights[a] {
                let f = net.a_weights[a] / out;
                for &id in &net.a_adj[a] {
                    arc_flow[id] *= f;
                }
            }
        }
        for b in 0..net.b_len() {
            let inflow: f64 = net.b_adj[b].iter().map(|&id| arc_flow[id]).sum();
            if inflow > net.b_weights[b] {
                let f = net.b_weights[b] / inflow;
                for &id in &net.b_adj[b] {
                    arc_flow[id] *= f;
                }
            }
        }
        let value = arc_flow.iter().sum();
        FlowState {
            arc_flow,
            value,
            augmentations: 0,
        }
    }
}

#[derive(Clone, Copy)]
enum Via {
    Source,
    Forward(usize),
    Backward(usize),
}

/// Shortest-augmenting-path maximum flow. A feasible warm start is
/// augmented; an infeasible one is discarded and the flow solved cold.
pub fn max_flow(net: &IncompatibilityNetwork, warm_start: Option<&FlowState>) -> FlowState {
    let mut state = match warm_start {
        Some(w) if w.is_feasible(net, 1e-12) => FlowState {
            arc_flow: w.arc_flow.clone(),
            value: 0.0,
            augmentations: 0,
        },
        _ => FlowState::zero(net),
    };
    let (na, nb) = (net.a_len(), net.b_len());
    let mut src = vec![0.0; na];
    let mut snk = vec![0.0; nb];
    for (id, &(a, b)) in net.arcs.iter().enumerate() {
        src[a] += state.arc_flow[id];
        snk[b] += state.arc_flow[id];
    }

    loop {
        // BFS over a- and b-nodes; the source is the implicit root.
        let mut a_via: Vec<Option<Via>> = vec![None; na];
        let mut b_via: Vec<Option<usize>> = vec![None; nb];
        let mut queue = VecDeque::new();
        for a in 0..na {
            if net.a_weights[a] - src[a] > FLOW_EPS {
                a_via[a] = Some(Via::Source);
                queue.push_back(a);
            }
        }
        let mut end = None;
        'bfs: while let Some(a) = queue.pop_front() {
            for &id in &net.a_adj[a] {
                let b = net.arcs[id].1;
                if b_via[b].is_some() || MIDDLE_CAPACITY - state.arc_flow[id] <= FLOW_EPS {
                    continue;
                }
                b_via[b] = Some(id);
                if net.b_weights[b] - snk[b] > FLOW_EPS {
                    end = Some(b);
                    break 'bfs;
                }
                for &back in &net.b_adj[b] {
                    let a2 = net.arcs[back].0;
                    if a_via[a2].is_none() && state.arc_flow[back] > FLOW_EPS {
                        a_via[a2] = Some(Via::Backward(back));
                        queue.push_back(a2);
                    }
                }
            }
        }
        let Some(b_end) = end else { break };

        // walk back to the source collecting the path
        let mut path: Vec<Via> = Vec::new();
        let mut b = b_end;
        let start_a;
        loop {
            let id = b_via[b].expect("reached b has a parent");
            path.push(Via::Forward(id));
            let a = net.arcs[id].0;
            match a_via[a].expect("reached a has a parent") {
                Via::Source => {
                    start_a = a;
                    break;
                }
                Via::Backward(back) => {
                    path.push(Via::Backward(back));
                    b = net.arcs[back].1;
                }
                Via::Forward(_) => unreachable!(),
            }
        }
        let mut delta = (net.a_weights[start_a] - src[start_a]).min(net.b_weights[b_end] - snk[b_end]);
        for step in &path {
            delta = delta.min(match *step {
                Via::Forward(id) => MIDDLE_CAPACITY - state.arc_flow[id],
                Via::Backward(id) => state.arc_flow[id],
                Via::Source => f64::INFINITY,
            });
        }
        for step in &path {
            match *step {
                Via::Forward(id) => state.arc_flow[id] += delta,
                Via::Backward(id) => state.arc_flow[id] = (state.arc_flow[id] - delta).max(0.0),
                Via::Source => {}
            }
        }
        src[start_a] += delta;
        snk[b_end] += delta;
        state.augmentations += 1;
    }
    state.value = src.iter().sum();
    state
}

/// Minimum-weight vertex cover read off the residual graph of a maximum
/// flow: `C1` are the a-nodes unreachable from `s`, `D2` the reachable b-nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverCertificate {
    pub c1: Vec<usize>,
    pub d2: Vec<usize>,
    pub weight: f64,
}

impl CoverCertificate {
    /// Every arc has an endpoint in the cover.
    pub fn covers(&self, net: &IncompatibilityNetwork) -> bool {
        net.arcs
            .iter()
            .all(|(a, b)| self.c1.contains(a) || self.d2.contains(b))
    }
}

pub fn min_cover(net: &IncompatibilityNetwork, flow: &FlowState) -> CoverCertificate {
    let reach_tol = 1e-12;
    let (na, nb) = (net.a_len(), net.b_len());
    let mut a_seen = vec![false; na];
    let mut b_seen = vec![false; nb];
    let mut queue = VecDeque::new();
    for a in 0..na {
        if flow.residual(net, ResidualArc::SourceToA(a)) > reach_tol {
            a_seen[a] = true;
            queue.push_back(a);
        }
    }
    while let Some(a) = queue.pop_front() {
        for &id in &net.a_adj[a] {
            let b = net.arcs[id].1;
            if b_seen[b] {
                continue;
            }
            b_seen[b] = true;
            for &back in &net.b_adj[b] {
                let a2 = net.arcs[back].0;
                if !a_seen[a2] && flow.arc_flow[back] > reach_tol {
                    a_seen[a2] = true;
                    queue.push_back(a2);
                }
            }
        }
    }
    let c1: Vec<usize> = (0..na).filter(|&a| !a_seen[a]).collect();
    let d2: Vec<usize> = (0..nb).filter(|&b| b_seen[b]).collect();
    let weight = c1.iter().map(|&a| net.a_weights[a]).sum::<f64>()
        + d2.iter().map(|&b| net.b_weights[b]).sum::<f64>();
    CoverCertificate { c1, d2, weight }
}

/// Index partition of a support pair: `(C1, D1)` precedes `(C2, D2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub c1: Vec<usize>,
    pub d1: Vec<usize>,
    pub c2: Vec<usize>,
    pub d2: Vec<usize>,
}

impl Partition {
    pub(crate) fn from_cover(net: &IncompatibilityNetwork, cover: &CoverCertificate) -> Result<Self> {
        let c2: Vec<usize> = (0..net.a_len()).filter(|a| !cover.c1.contains(a)).collect();
        let d1: Vec<usize> = (0..net.b_len()).filter(|b| !cover.d2.contains(b)).collect();
        if cover.c1.is_empty() || cover.d2.is_empty() || c2.is_empty() || d1.is_empty() {
            return Err(Error::Numerical(format!(
                "degenerate cover C1={:?} D2={:?} with weight {}",
                cover.c1, cover.d2, cover.weight
            )));
        }
        Ok(Partition {
            c1: cover.c1.clone(),
            d1,
            c2,
            d2: cover.d2.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExtensionResult {
    Satisfied,
    Split(Partition),
}

/// Extension check on a prepared network; also returns the maximum flow.
pub fn check_extension_network(
    net: &IncompatibilityNetwork,
    warm_start: Option<&FlowState>,
) -> Result<(ExtensionResult, FlowState)> {
    let flow = max_flow(net, warm_start);
    if flow.value >= 1.0 - EXTENSION_EPS {
        return Ok((ExtensionResult::Satisfied, flow));
    }
    let cover = min_cover(net, &flow);
    let part = Partition::from_cover(net, &cover)?;
    Ok((ExtensionResult::Split(part), flow))
}

/// Decides whether the pair `(A, B)` (squared lengths) has an improving
/// partition, returning it if so.
pub fn check_extension(a: &[(Split, f64)], b: &[(Split, f64)]) -> Result<ExtensionResult> {
    let net = build_network(a, b)?;
    check_extension_network(&net, None).map(|(r, _)| r)
}
