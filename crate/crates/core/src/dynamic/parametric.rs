//! Tracking a saturating flow while the a-side weights move linearly.
//!
//! Weights are `w(s) = w(s0) + (s - s0) d` with `Σ d = 0` and fixed b-side
//! weights. As long as some flow of value 1 exists it can follow the
//! weights along a piecewise-linear path: the drift surplus of every
//! growing a-node is routed to shrinking a-nodes through alternating paths
//! `a -> b` (any arc) and `b -> a'` (arcs currently carrying flow), and the
//! resulting arc rates are applied until an arc carrying flow runs dry.
//! When the surplus can no longer be routed, the a-nodes reachable from
//! the unrouted supplies close off a vertex cover of weight 1 whose weight
//! is decreasing, so the flow value drops below 1 immediately after.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{max_flow, min_cover, CoverCertificate, FlowState, IncompatibilityNetwork, EXTENSION_EPS};

/// Drift entries at or below this magnitude are treated as zero.
const DRIFT_EPS: f64 = 1e-14;

/// One unit of routed drift: `amount` per unit parameter from `supply` to
/// `demand` along `path`, which alternates forward and backward arc ids and
/// starts with a forward arc.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub supply: usize,
    pub demand: usize,
    pub amount: f64,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum P3Outcome {
    /// The flow stays saturating up to the end of the parameter range.
    ReachedEnd,
    /// The flow value drops below one right after `lambda`.
    Boundary { lambda: f64, cover: CoverCertificate },
}

/// Result of routing the drift through the current residual graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Balance {
    Balanced,
    /// Some supply cannot be routed. `closed_a`/`closed_b` are the nodes
    /// reachable from the unroutable supplies.
    Blocked {
        pathless: Vec<usize>,
        closed_a: Vec<bool>,
        closed_b: Vec<bool>,
    },
}

#[derive(Debug, Clone)]
pub struct ParametricFlow {
    net: IncompatibilityNetwork,
    base: Vec<f64>,
    drift: Vec<f64>,
    flow: Vec<f64>,
    lambda: f64,
    rate: Vec<f64>,
    assignments: Vec<Assignment>,
    trajectory: Vec<(f64, Vec<f64>)>,
    tol: f64,
    augmentations: usize,
    outcome: Option<P3Outcome>,
}

#[derive(PartialEq)]
struct Width(f64);

impl Eq for Width {}

impl PartialOrd for Width {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Width {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

struct Reach {
    a_prev: Vec<Option<usize>>,
    b_prev: Vec<Option<usize>>,
    a_seen: Vec<bool>,
    b_seen: Vec<bool>,
}

impl ParametricFlow {
    /// `net` carries the a-weights at parameter `start`; `drift` is their
    /// rate of change. `tol` is the flow below which an arc is treated as
    /// empty. A warm start is used when feasible.
    pub fn new(
        net: IncompatibilityNetwork,
        drift: Vec<f64>,
        start: f64,
        warm: Option<&FlowState>,
        tol: f64,
    ) -> Result<Self> {
        if drift.len() != net.a_len() {
            return Err(Error::InvalidNetwork(format!(
                "{} drift entries for {} a-nodes",
                drift.len(),
                net.a_len()
            )));
        }
        if !(0.0..=1.0).contains(&start) {
            return Err(Error::LambdaOutOfRange(start));
        }
        let mf = max_flow(&net, warm);
        let base = net
            .a_weights()
            .iter()
            .zip(&drift)
            .map(|(w, d)| w - start * d)
            .collect();
        let outcome = (mf.value < 1.0 - EXTENSION_EPS).then(|| P3Outcome::Boundary {
            lambda: start,
            cover: min_cover(&net, &mf),
        });
        Ok(ParametricFlow {
            rate: vec![0.0; net.arcs().len()],
            trajectory: vec![(start, mf.arc_flow.clone())],
            flow: mf.arc_flow,
            augmentations: mf.augmentations,
            net,
            base,
            drift,
            lambda: start,
            assignments: Vec::new(),
            tol,
            outcome,
        })
    }

    pub fn network(&self) -> &IncompatibilityNetwork {
        &self.net
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    /// Current parameter.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Current arc flows.
    pub fn flow(&self) -> &[f64] {
        &self.flow
    }

    /// Arc rates of the current linear piece.
    pub fn rates(&self) -> &[f64] {
        &self.rate
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    /// Augmenting and rerouting steps so far, including the initial max flow.
    pub fn augmentations(&self) -> usize {
        self.augmentations
    }

    pub fn weights_at(&self, s: f64) -> Vec<f64> {
        self.base
            .iter()
            .zip(&self.drift)
            .map(|(b, d)| b + s * d)
            .collect()
    }

    /// Arc flows at parameter `s`, interpolated along the tracked path and
    /// clamped to its ends.
    pub fn flow_at(&self, s: f64) -> Vec<f64> {
        let tr = &self.trajectory;
        let i = tr.partition_point(|(l, _)| *l <= s);
        if i == 0 {
            return tr[0].1.clone();
        }
        if i == tr.len() {
            return tr[i - 1].1.clone();
        }
        let (l0, f0) = &tr[i - 1];
        let (l1, f1) = &tr[i];
        let u = (s - l0) / (l1 - l0);
        f0.iter()
            .zip(f1)
            .map(|(a, b)| ((1.0 - u) * a + u * b).max(0.0))
            .collect()
    }

    /// Breakpoints `(s, flow)` visited so far.
    pub fn trajectory(&self) -> &[(f64, Vec<f64>)] {
        &self.trajectory
    }

    /// Residual reachability from `from`, keeping for every node the path
    /// whose smallest backward flow is largest, so that routes last long.
    fn reach(&self, from: usize) -> Reach {
        let (na, nb) = (self.net.a_len(), self.net.b_len());
        let arcs = self.net.arcs();
        let mut r = Reach {
            a_prev: vec![None; na],
            b_prev: vec![None; nb],
            a_seen: vec![false; na],
            b_seen: vec![false; nb],
        };
        let mut a_width = vec![f64::NEG_INFINITY; na];
        let mut b_width = vec![f64::NEG_INFINITY; nb];
        a_width[from] = f64::INFINITY;
        let mut heap = BinaryHeap::from([(Width(f64::INFINITY), Reverse(from))]);
        while let Some((Width(w), Reverse(a))) = heap.pop() {
            if r.a_seen[a] {
                continue;
            }
            r.a_seen[a] = true;
            for &id in self.net.a_arcs(a) {
                let b = arcs[id].1;
                if w <= b_width[b] {
                    continue;
                }
                b_width[b] = w;
                r.b_seen[b] = true;
                r.b_prev[b] = Some(id);
                for &back in self.net.b_arcs(b) {
                    let a2 = arcs[back].0;
                    let z = self.flow[back];
                    if r.a_seen[a2] || z <= self.tol {
                        continue;
                    }
                    let w2 = w.min(z);
                    if w2 > a_width[a2] {
                        a_width[a2] = w2;
                        r.a_prev[a2] = Some(back);
                        heap.push((Width(w2), Reverse(a2)));
                    }
                }
            }
        }
        r
    }

    fn path_to(&self, reach: &Reach, to: usize) -> Option<Vec<usize>> {
        if !reach.a_seen[to] {
            return None;
        }
        let arcs = self.net.arcs();
        let mut path = Vec::new();
        let mut a = to;
        while let Some(back) = reach.a_prev[a] {
            path.push(back);
            let fwd = reach.b_prev[arcs[back].1].expect("reached b has a parent");
            path.push(fwd);
            a = arcs[fwd].0;
        }
        path.reverse();
        Some(path)
    }

    fn path_usable(&self, path: &[usize]) -> bool {
        path.iter()
            .skip(1)
            .step_by(2)
            .all(|&id| self.flow[id] > self.tol)
    }

    /// Routes the drift of every supply to demands, repairing paths that
    /// use arcs which have run dry. On success the arc rates are updated.
    pub fn balance_paths(&mut self) -> Balance {
        let na = self.net.a_len();
        let supply: Vec<bool> = self.drift.iter().map(|&d| d > DRIFT_EPS).collect();
        let demand: Vec<bool> = self.drift.iter().map(|&d| d < -DRIFT_EPS).collect();
        let total: f64 = self.drift.iter().filter(|&&d| d > DRIFT_EPS).sum();
        let eps = 1e-13 * total;
        let mut reach: Vec<Option<Reach>> = (0..na).map(|_| None).collect();

        // repair or drop assignments whose paths are no longer usable
        let mut kept = Vec::with_capacity(self.assignments.len());
        for mut asg in std::mem::take(&mut self.assignments) {
            if !self.path_usable(&asg.path) {
                let r = reach[asg.supply].get_or_insert_with(|| self.reach(asg.supply));
                match self.path_to(r, asg.demand) {
                    Some(p) => {
                        asg.path = p;
                        self.augmentations += 1;
                    }
                    None => continue,
                }
            }
            kept.push(asg);
        }
        self.assignments = kept;

        let mut rem: Vec<f64> = self.drift.iter().map(|d| d.abs()).collect();
        for (a, r) in rem.iter_mut().enumerate() {
            if !supply[a] && !demand[a] {
                *r = 0.0;
            }
        }
        for asg in &self.assignments {
            rem[asg.supply] -= asg.amount;
            rem[asg.demand] -= asg.amount;
        }

        // transport augmentation: supply -> reachable demand, possibly
        // reassigning demand already served by another supply
        let mut visited_s;
        loop {
            visited_s = vec![false; na];
            let mut visited_d = vec![false; na];
            let mut parent_d: Vec<usize> = vec![usize::MAX; na];
            let mut parent_s: Vec<Option<(usize, usize)>> = vec![None; na];
            let mut queue = VecDeque::new();
            for a in 0..na {
                if supply[a] && rem[a] > eps {
                    visited_s[a] = true;
                    queue.push_back(a);
                }
            }
            let mut end = None;
            'bfs: while let Some(i) = queue.pop_front() {
                if reach[i].is_none() {
                    reach[i] = Some(self.reach(i));
                }
                let seen = &reach[i].as_ref().unwrap().a_seen;
                for j in 0..na {
                    if !demand[j] || visited_d[j] || !seen[j] {
                        continue;
                    }
                    visited_d[j] = true;
                    parent_d[j] = i;
                    if rem[j] > eps {
                        end = Some(j);
                        break 'bfs;
                    }
                    for (k, asg) in self.assignments.iter().enumerate() {
                        if asg.demand == j && asg.amount > eps && !visited_s[asg.supply] {
                            visited_s[asg.supply] = true;
                            parent_s[asg.supply] = Some((j, k));
                            queue.push_back(asg.supply);
                        }
                    }
                }
            }
            let Some(j_end) = end else { break };

            // collect (increase supply->demand) and (decrease assignment) steps
            let mut increases = Vec::new();
            let mut decreases = Vec::new();
            let mut j = j_end;
            let start = loop {
                let i = parent_d[j];
                increases.push((i, j));
                match parent_s[i] {
                    Some((j_prev, k)) => {
                        decreases.push(k);
                        j = j_prev;
                    }
                    None => break i,
                }
            };
            let mut delta = rem[start].min(rem[j_end]);
            for &k in &decreases {
                delta = delta.min(self.assignments[k].amount);
            }
            for &k in &decreases {
                self.assignments[k].amount -= delta;
            }
            for (i, j) in increases {
                match self
                    .assignments
                    .iter_mut()
                    .find(|a| a.supply == i && a.demand == j)
                {
                    Some(asg) => asg.amount += delta,
                    None => {
                        let path = self
                            .path_to(reach[i].as_ref().expect("searched supply"), j)
                            .expect("demand reached from supply");
                        self.assignments.push(Assignment {
                            supply: i,
                            demand: j,
                            amount: delta,
                            path,
                        });
                    }
                }
            }
            self.assignments.retain(|a| a.amount > eps);
            rem[start] -= delta;
            rem[j_end] -= delta;
            self.augmentations += 1;
        }

        let pathless: Vec<usize> = (0..na).filter(|&a| supply[a] && rem[a] > eps).collect();
        if !pathless.is_empty() {
            let mut closed_a = vec![false; na];
            let mut closed_b = vec![false; self.net.b_len()];
            for i in (0..na).filter(|&i| visited_s[i]) {
                let r = reach[i].get_or_insert_with(|| self.reach(i));
                for (c, &s) in closed_a.iter_mut().zip(&r.a_seen) {
                    *c |= s;
                }
                for (c, &s) in closed_b.iter_mut().zip(&r.b_seen) {
                    *c |= s;
                }
            }
            return Balance::Blocked {
                pathless,
                closed_a,
                closed_b,
            };
        }

        self.rate.iter_mut().for_each(|r| *r = 0.0);
        for asg in &self.assignments {
            for (pos, &id) in asg.path.iter().enumerate() {
                if pos % 2 == 0 {
                    self.rate[id] += asg.amount;
                } else {
                    self.rate[id] -= asg.amount;
                }
            }
        }
        Balance::Balanced
    }

    fn cover_from_closure(&self, closed_a: &[bool], closed_b: &[bool]) -> CoverCertificate {
        let w = self.weights_at(self.lambda);
        let c1: Vec<usize> = (0..self.net.a_len()).filter(|&a| !closed_a[a]).collect();
        let d2: Vec<usize> = (0..self.net.b_len()).filter(|&b| closed_b[b]).collect();
        let weight = c1.iter().map(|&a| w[a]).sum::<f64>()
            + d2.iter().map(|&b| self.net.b_weights()[b]).sum::<f64>();
        CoverCertificate { c1, d2, weight }
    }

    /// Follows the flow from the current parameter towards 1 and reports
    /// where it stops being saturating. Calling it again returns the same
    /// outcome.
    pub fn p3_next_event(&mut self) -> Result<P3Outcome> {
        if let Some(o) = &self.outcome {
            return Ok(o.clone());
        }
        let m = self.net.arcs().len();
        let max_iter = 10 * (m + 1) * (m + 1) + 1000;
        for _ in 0..max_iter {
            if let Balance::Blocked {
                closed_a, closed_b, ..
            } = self.balance_paths()
            {
                let cover = self.cover_from_closure(&closed_a, &closed_b);
                let o = P3Outcome::Boundary {
                    lambda: self.lambda,
                    cover,
                };
                self.outcome = Some(o.clone());
                return Ok(o);
            }

            let room = 1.0 - self.lambda;
            let step = self
                .flow
                .iter()
                .zip(&self.rate)
                .filter(|(_, &r)| r < 0.0)
                .map(|(&z, &r)| z / -r)
                .fold(f64::INFINITY, f64::min);
            let last = step >= room;
            let step = step.min(room);
            for (z, r) in self.flow.iter_mut().zip(&self.rate) {
                *z += step * r;
            }
            self.lambda = if last { 1.0 } else { self.lambda + step };
            for (z, r) in self.flow.iter_mut().zip(&self.rate) {
                if *z < -self.tol {
                    return Err(Error::Numerical(format!(
                        "tracked arc flow went negative ({z})"
                    )));
                }
                if *r < 0.0 && *z <= self.tol {
                    *z = 0.0;
                }
            }
            self.trajectory.push((self.lambda, self.flow.clone()));
            if last {
                self.outcome = Some(P3Outcome::ReachedEnd);
                return Ok(P3Outcome::ReachedEnd);
            }
        }
        Err(Error::Numerical(format!(
            "flow tracking did not settle within {max_iter} steps"
        )))
    }
}
