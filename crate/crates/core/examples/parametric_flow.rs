//! Following a saturating flow while a-side weights drift linearly, until
//! the pair hits an extension boundary.
//!
//! cargo run --example parametric_flow

use dyngeo::dynamic::{Balance, P3Outcome, ParametricFlow};
use dyngeo::flow::{FlowState, IncompatibilityNetwork};

fn main() -> dyngeo::Result<()> {
    let net = IncompatibilityNetwork::from_weights(vec![0.7, 0.3], vec![0.6, 0.4], vec![(0, 0), (0, 1), (1, 1)])?;
    let start = FlowState {
        arc_flow: vec![0.6, 0.1, 0.3],
        value: 1.0,
        augmentations: 0,
    };
    // a1 shrinks, a2 grows at unit rate
    let mut pf = ParametricFlow::new(net, vec![-1.0, 1.0], 0.0, Some(&start), 1e-10)?;

    if pf.balance_paths() == Balance::Balanced {
        for a in pf.assignments() {
            println!("supply a{} -> demand a{} amount {} via arcs {:?}", a.supply, a.demand, a.amount, a.path);
        }
        println!("arc rates {:?}", pf.rates());
    }

    match pf.p3_next_event()? {
        P3Outcome::ReachedEnd => println!("flow stays saturating up to 1"),
        P3Outcome::Boundary { lambda, cover } => {
            println!("boundary at {lambda:.12}");
            println!("cover C1 = {:?} D2 = {:?} weight {:.12}", cover.c1, cover.d2, cover.weight);
        }
    }
    for (s, flow) in pf.trajectory() {
        println!("  breakpoint {s:.3}: {flow:?}");
    }
    Ok(())
}
