//! Reading Newick in either leaf-0 convention and writing the canonical form.
//!
//! cargo run --example newick_roundtrip

use dyngeo::tree_model::{classify_edges, parse_newick, serialize_newick};

fn main() -> dyngeo::Result<()> {
    let as_leaf = parse_newick("(0:0.5,((1:1,2:2):0.25,3:1):1, 4:3);", None)?;
    let as_root = parse_newick("(((1:1,2:2):0.25,3:1):1,4:3)0:0.5;", None)?;
    println!("same tree: {}", as_leaf == as_root);

    let text = serialize_newick(&as_leaf);
    println!("canonical: {text}");
    let again = parse_newick(&text, None)?;
    println!("round trip exact: {}", again == as_leaf);

    for (split, len) in as_leaf.edges() {
        println!("  {split} : {len}");
    }

    let other = parse_newick("(((1:1,3:1):1,2:2):0.5,4:3)0:0.5;", None)?;
    let c = classify_edges(&as_leaf, &other)?;
    println!("common {} / only in first {:?} / only in second {:?}", c.common.len(), c.only_x, c.only_t);
    Ok(())
}
