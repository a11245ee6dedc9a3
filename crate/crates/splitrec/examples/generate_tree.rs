//! Generate split trees from the built-in families and print their
//! structural summaries plus the text serialization.

use splitrec::model::SplitVectorModel;
use splitrec::rng::{stream, tags};
use splitrec::tree::{generate_tree, SplitParams};

fn main() {
    let seed = 42;
    let families = vec![
        ("binary search tree", SplitParams::bst()),
        ("3-ary search tree", SplitParams::mary(3).unwrap()),
        (
            "symmetric trie (b = 2, s = 1, s0 = 0)",
            SplitParams::new(SplitVectorModel::symmetric(2).unwrap(), 1, 0, 0).unwrap(),
        ),
        (
            "buffered binary split (s = 4, s1 = 2)",
            SplitParams::new(SplitVectorModel::bst(), 4, 0, 2).unwrap(),
        ),
    ];

    for (name, params) in &families {
        let mut rng = stream(seed, &[tags::TREE]);
        let tree = generate_tree(params, 5000, &mut rng).unwrap();
        let summary = tree.summarize();
        println!("== {name}");
        println!(
            "   balls n = {}, nodes N = {}, height = {}, Υ = {}, Ψ = {}",
            tree.n(),
            summary.n_nodes,
            summary.height,
            summary.upsilon,
            summary.psi
        );
        println!(
            "   last ball settled at depth {} (≈ μ⁻¹ ln n for large n)",
            tree.last_insertion_depth().unwrap()
        );
        let violations = tree.validate();
        println!("   validation: {}", if violations.is_empty() { "clean" } else { "VIOLATIONS" });
    }

    // the text format round-trips
    let mut rng = stream(seed, &[tags::TREE]);
    let small = generate_tree(&SplitParams::bst(), 8, &mut rng).unwrap();
    let mut buf = Vec::new();
    small.write_text(&mut buf, seed).unwrap();
    println!("\nserialized 8-ball tree:\n{}", String::from_utf8(buf).unwrap());
}
