//! The extension check on a small incompatibility network: max flow,
//! minimum vertex cover, and the improving partition it yields.
//!
//! cargo run --example extension_problem

use dyngeo::flow::{check_extension_network, max_flow, min_cover, ExtensionResult, IncompatibilityNetwork};

fn main() -> dyngeo::Result<()> {
    // a-weights and b-weights are normalized squared lengths
    let net = IncompatibilityNetwork::from_weights(vec![0.3, 0.7], vec![0.6, 0.4], vec![(0, 0), (0, 1), (1, 1)])?;
    let flow = max_flow(&net, None);
    println!("max flow = {:.6} after {} augmentations", flow.value, flow.augmentations);
    println!("arc flows = {:?}", flow.arc_flow);

    let cover = min_cover(&net, &flow);
    println!("min cover: C1 = {:?} D2 = {:?} weight = {:.6}", cover.c1, cover.d2, cover.weight);

    match check_extension_network(&net, None)?.0 {
        ExtensionResult::Satisfied => println!("pair cannot be improved"),
        ExtensionResult::Split(p) => println!(
            "pair splits into (C1 {:?}, D1 {:?}) then (C2 {:?}, D2 {:?})",
            p.c1, p.d1, p.c2, p.d2
        ),
    }

    // with the weights swapped every arc is needed and the flow saturates
    let full = IncompatibilityNetwork::from_weights(vec![0.7, 0.3], vec![0.6, 0.4], vec![(0, 0), (0, 1), (1, 1)])?;
    println!("swapped weights: max flow = {:.6}", max_flow(&full, None).value);
    println!("{}", full.debug_json(None));
    Ok(())
}
