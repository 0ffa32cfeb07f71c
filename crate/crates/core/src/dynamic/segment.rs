use crate::error::{Error, Result};
use crate::tree_model::{square_coords, PhyloTree, Split, SquaredTree};

/// A straight segment `X^λ` between two trees of one topology, with the
/// fixed far endpoint `T`.
///
/// Interpolation is linear in squared coordinates: the squared length of
/// edge `e` at `λ` is `(1-λ)|e|²_{X0} + λ|e|²_{X1}`. Endpoints given in
/// ordinary lengths are squared on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    x0: PhyloTree,
    x1: PhyloTree,
    t: PhyloTree,
    sq0: SquaredTree,
    sq1: SquaredTree,
}

impl Segment {
    pub fn new(x0: PhyloTree, x1: PhyloTree, t: PhyloTree) -> Result<Self> {
        x0.labels().check_same(&x1.labels())?;
        x0.labels().check_same(&t.labels())?;
        if !x0.same_topology(&x1) {
            return Err(Error::OrthantMismatch(
                "X0 and X1 have different split sets".into(),
            ));
        }
        let sq0 = square_coords(&x0);
        let sq1 = square_coords(&x1);
        Ok(Segment {
            x0,
            x1,
            t,
            sq0,
            sq1,
        })
    }

    pub fn x0(&self) -> &PhyloTree {
        &self.x0
    }

    pub fn x1(&self) -> &PhyloTree {
        &self.x1
    }

    pub fn t(&self) -> &PhyloTree {
        &self.t
    }

    /// Squared length at the start of the segment.
    pub fn squared0(&self, split: &Split) -> f64 {
        self.sq0.coord(split).unwrap_or(0.0)
    }

    /// Squared length at the end of the segment.
    pub fn squared1(&self, split: &Split) -> f64 {
        self.sq1.coord(split).unwrap_or(0.0)
    }

    /// `d_e = |e|²_{X1} - |e|²_{X0}`.
    pub fn drift(&self, split: &Split) -> f64 {
        self.squared1(split) - self.squared0(split)
    }

    pub fn squared_at(&self, split: &Split, lambda: f64) -> f64 {
        (1.0 - lambda) * self.squared0(split) + lambda * self.squared1(split)
    }

    /// The tree `X^λ` in ordinary coordinates.
    pub fn point(&self, lambda: f64) -> Result<PhyloTree> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        if lambda == 0.0 {
            return Ok(self.x0.clone());
        }
        if lambda == 1.0 {
            return Ok(self.x1.clone());
        }
        self.x0
            .map_lengths(|s, _| self.squared_at(s, lambda).sqrt())
    }

    /// The same segment traversed from `X1` to `X0`.
    pub fn reversed(&self) -> Segment {
        Segment {
            x0: self.x1.clone(),
            x1: self.x0.clone(),
            t: self.t.clone(),
            sq0: self.sq1.clone(),
            sq1: self.sq0.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_model::parse_newick;

    #[test]
    fn interpolates_squared_lengths() {
        let x0 = parse_newick("((1:1,2:1):1,3:1,0:1);", None).unwrap();
        let x1 = parse_newick("((1:1,2:1):3,3:1,0:1);", None).unwrap();
        let seg = Segment::new(x0.clone(), x1.clone(), x0.clone()).unwrap();
        let s = x0.splits().find(|s| s.len() == 2).unwrap().clone();
        assert_eq!(seg.drift(&s), 8.0);
        let mid = seg.point(0.5).unwrap();
        assert_eq!(mid.length(&s), Some(5f64.sqrt()));
        assert_eq!(seg.point(0.0).unwrap(), x0);
        assert_eq!(seg.point(1.0).unwrap(), x1);
        assert!(seg.point(1.1).is_err());
        assert_eq!(seg.reversed().drift(&s), -8.0);
    }

    #[test]
    fn rejects_topology_change() {
        let x0 = parse_newick("((1:1,2:1):1,3:1,0:1);", None).unwrap();
        let x1 = parse_newick("((1:1,3:1):1,2:1,0:1);", None).unwrap();
        assert!(matches!(
            Segment::new(x0.clone(), x1, x0),
            Err(Error::OrthantMismatch(_))
        ));
    }
}
