//! Walking along a geodesic: legs, intermediate trees and additivity.
//!
//! cargo run --example geodesic_path

use dyngeo::{compute_geodesic, eval_point, leg_of, parse_newick, serialize_newick};

fn main() -> dyngeo::Result<()> {
    let x = parse_newick("(((1:1,2:1):1,3:1):1,((4:1,5:1):3,6:1):1,0:1);", None)?;
    let t = parse_newick("(((2:1,3:1):1,1:1):1,((5:1,6:1):1,4:1):1,0:1);", None)?;
    let geo = compute_geodesic(&x, &t)?;

    for i in 0..=8 {
        let lambda = i as f64 / 8.0;
        let p = eval_point(&geo, lambda)?;
        let to_x = compute_geodesic(&x, &p)?.distance;
        let to_t = compute_geodesic(&p, &t)?.distance;
        println!(
            "λ = {lambda:.3} leg {} {}  d(X,γ)+d(γ,T) = {:.12}",
            leg_of(&geo, lambda)?,
            serialize_newick(&p),
            to_x + to_t
        );
    }
    println!("d(X, T)            = {:.12}", geo.distance);
    Ok(())
}
