//! Geodesics in Billera–Holmes–Vogtmann treespace, with dynamic maintenance
//! of the geodesic from a moving tree to a fixed one.
//!
//! * [`tree_model`]: splits, trees, Newick I/O, common-edge classification.
//! * [`flow`]: incompatibility networks, max flow and minimum vertex covers.
//! * [`geodesic`]: support-sequence certificates, distance, path evaluation.
//! * [`dynamic`]: sweeping one endpoint along a segment and tracking the
//!   boundary events where the certificate changes.
//! * [`cli`]: the `dyngeo` command-line front end.

pub mod bench;
pub mod cli;
pub mod dynamic;
pub mod error;
pub mod flow;
pub mod geodesic;
pub mod random;
pub mod tree_model;

pub use error::{Error, Result};
pub use geodesic::{compute_geodesic, eval_point, geodesic_distance, leg_of, validate_supports, Geodesic};
pub use tree_model::{parse_newick, serialize_newick, LabelSet, PhyloTree, Split};
