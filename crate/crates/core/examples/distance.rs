//! Geodesic distance between two trees and the support pairs behind it.
//!
//! cargo run --example distance

use dyngeo::{compute_geodesic, parse_newick};

fn main() -> dyngeo::Result<()> {
    // leaf 0 roots the tree; the two cherries are resolved differently in T
    let x = parse_newick("(((1:1,2:1):1,3:1):1,((4:1,5:1):3,6:1):1,0:1);", None)?;
    let t = parse_newick("(((2:1,3:1):1,1:1):1,((5:1,6:1):1,4:1):1,0:1);", Some(x.labels()))?;

    let geo = compute_geodesic(&x, &t)?;
    println!("d(X, T) = {:.12}", geo.distance);
    println!("{} support pairs, {} common edges", geo.supports.k(), geo.supports.common().len());
    for (i, p) in geo.supports.pairs().iter().enumerate() {
        println!(
            "  pair {i}: A = {:?} B = {:?} ratio |A|/|B| = {:.6}",
            p.a_splits(),
            p.b_splits(),
            p.ratio()
        );
    }

    let back = compute_geodesic(&t, &x)?;
    println!("d(T, X) = {:.12}", back.distance);
    Ok(())
}
