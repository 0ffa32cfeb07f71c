//! Ratio-order events between adjacent support pairs.
//!
//! In squared coordinates `‖A_l‖²(λ)` is affine in `λ` while `‖B_l‖` is
//! fixed, so the ordering constraint between pairs `l` and `l+1` reads
//! `a_l λ + b_l >= 0` with
//! `a_l = ‖B_l‖² Σ_{A_{l+1}} d_e - ‖B_{l+1}‖² Σ_{A_l} d_e` and `b_l` the same
//! expression in the starting squared lengths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geodesic::{SupportPair, SupportSequence};

use super::Segment;

/// Candidate merge of pairs `pair_index` and `pair_index + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct P2Event {
    pub pair_index: usize,
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
}

fn side_sum(side: &[(crate::tree_model::Split, f64)], f: impl Fn(&crate::tree_model::Split) -> f64) -> f64 {
    side.iter().map(|(s, _)| f(s)).sum()
}

/// `(a_l, b_l)` for the adjacent pairs `l`, `l+1`.
pub fn p2_coefficients(seq: &SupportSequence, l: usize, seg: &Segment) -> Result<(f64, f64)> {
    let (p, q) = adjacent(seq, l)?;
    let bl = p.norm_b().powi(2);
    let bn = q.norm_b().powi(2);
    let a = bl * side_sum(q.a(), |s| seg.drift(s)) - bn * side_sum(p.a(), |s| seg.drift(s));
    let b = bl * side_sum(q.a(), |s| seg.squared0(s)) - bn * side_sum(p.a(), |s| seg.squared0(s));
    Ok((a, b))
}

fn adjacent(seq: &SupportSequence, l: usize) -> Result<(&SupportPair, &SupportPair)> {
    let pairs = seq.pairs();
    if l + 1 >= pairs.len() {
        return Err(Error::InvalidSupports(format!(
            "no adjacent pair after index {l} (k = {})",
            pairs.len()
        )));
    }
    Ok((&pairs[l], &pairs[l + 1]))
}

/// A root of the ordering constraint that cannot fire in `[from, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscardedRoot {
    pub pair_index: usize,
    pub root: f64,
    pub from: f64,
}

/// Every pair whose ordering constraint becomes tight in `[from, 1]`.
/// Constraints already tight or slightly violated at `from` fire at `from`.
pub(crate) fn p2_candidates(
    seq: &SupportSequence,
    seg: &Segment,
    from: f64,
    discarded: &mut Vec<DiscardedRoot>,
) -> Result<Vec<P2Event>> {
    let mut out = Vec::new();
    for l in 0..seq.k().saturating_sub(1) {
        let (a, b) = p2_coefficients(seq, l, seg)?;
        let (p, q) = adjacent(seq, l)?;
        let scale = p.norm_b().powi(2) * side_sum(q.a(), |s| seg.drift(s).abs())
            + q.norm_b().powi(2) * side_sum(p.a(), |s| seg.drift(s).abs());
        if !(a < -1e-14 * scale) {
            if a != 0.0 {
                discarded.push(DiscardedRoot {
                    pair_index: l,
                    root: -b / a,
                    from,
                });
            }
            continue;
        }
        let root = -b / a;
        if root > 1.0 {
            discarded.push(DiscardedRoot {
                pair_index: l,
                root,
                from,
            });
            continue;
        }
        out.push(P2Event {
            pair_index: l,
            a,
            b,
            lambda: root.max(from),
        });
    }
    Ok(out)
}

/// Earliest ratio-order event at or after `from`; ties go to the lowest index.
pub fn next_p2_event(seq: &SupportSequence, seg: &Segment, from: f64) -> Result<Option<P2Event>> {
    let events = p2_candidates(seq, seg, from, &mut Vec::new())?;
    Ok(events
        .into_iter()
        .fold(None, |best: Option<P2Event>, e| match best {
            Some(b) if b.lambda <= e.lambda => Some(b),
            _ => Some(e),
        }))
}

/// Replaces pairs `l` and `l+1` by their union. The two ratios must agree
/// to relative tolerance `ratio_tol`.
pub fn merge_pairs(seq: &SupportSequence, l: usize, ratio_tol: f64) -> Result<SupportSequence> {
    let (p, q) = adjacent(seq, l)?;
    let left = p.norm_a() * q.norm_b();
    let right = q.norm_a() * p.norm_b();
    if (left - right).abs() > ratio_tol * left.max(right) {
        return Err(Error::InvalidSupports(format!(
            "pairs {l} and {} have ratios {} and {}",
            l + 1,
            p.ratio(),
            q.ratio()
        )));
    }
    let merged = p.merged(q);
    let mut out = seq.clone();
    out.replace_pairs(l, 2, vec![merged]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::compute_geodesic;
    use crate::tree_model::parse_newick;

    // Two independent crossings; moving the second cherry length changes its ratio.
    const T: &str = "(((2:1,3:1):1,1:1):1,((5:1,6:1):1,4:1):1,0:1);";

    fn seg(len0: f64, len1: f64) -> Segment {
        let x0 = parse_newick(&format!("(((1:1,2:1):1,3:1):1,((4:1,5:1):{len0},6:1):1,0:1);"), None).unwrap();
        let x1 = parse_newick(&format!("(((1:1,2:1):1,3:1):1,((4:1,5:1):{len1},6:1):1,0:1);"), None).unwrap();
        Segment::new(x0, x1, parse_newick(T, None).unwrap()).unwrap()
    }

    #[test]
    fn decreasing_ratio_crosses_at_root() {
        // ratios 1 and 3 at λ=0; squared length 9 -> 0.25 gives ratio 1 at 9 - 8.75 λ = 1
        let s = seg(3.0, 0.5);
        let g = compute_geodesic(s.x0(), s.t()).unwrap();
        assert_eq!(g.supports.k(), 2);
        let (a, b) = p2_coefficients(&g.supports, 0, &s).unwrap();
        assert!((a - -8.75).abs() < 1e-12 && (b - 8.0).abs() < 1e-12);
        let e = next_p2_event(&g.supports, &s, 0.0).unwrap().unwrap();
        assert!((e.lambda - 8.0 / 8.75).abs() < 1e-15);

        let at = s.point(e.lambda).unwrap();
        let seq = g.supports.reweighted(&at, s.t()).unwrap();
        let merged = merge_pairs(&seq, 0, 1e-8).unwrap();
        assert_eq!(merged.k(), 1);
        assert!(merge_pairs(&g.supports, 0, 1e-8).is_err());
    }

    #[test]
    fn increasing_ratio_has_no_event() {
        let s = seg(3.0, 4.0);
        let g = compute_geodesic(s.x0(), s.t()).unwrap();
        assert_eq!(next_p2_event(&g.supports, &s, 0.0).unwrap(), None);
    }

    #[test]
    fn root_beyond_segment_is_discarded() {
        let s = seg(3.0, 1.5);
        let g = compute_geodesic(s.x0(), s.t()).unwrap();
        let mut d = Vec::new();
        assert!(p2_candidates(&g.supports, &s, 0.0, &mut d).unwrap().is_empty());
        assert_eq!(d.len(), 1);
        assert!(d[0].root > 1.0);
    }
}
