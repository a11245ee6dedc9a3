//! Exact expectation identities for records on small fixed trees, checked
//! against brute-force enumeration of every label ordering.

use splitrec::records::{
    brute_force_mean_records, expected_records_edges_rational,
    expected_records_vertices_rational, CutKind,
};
use splitrec::tree::SplitTree;

fn main() {
    let shapes: Vec<(&str, SplitTree)> = vec![
        ("single node", SplitTree::from_parents(&[]).unwrap()),
        ("path, 3 edges", SplitTree::path(3)),
        ("star, 4 leaves", SplitTree::star(4)),
        ("complete binary, height 2", SplitTree::from_parents(&[0, 0, 1, 1, 2, 2]).unwrap()),
        ("caterpillar", SplitTree::from_parents(&[0, 1, 1, 2, 4, 4]).unwrap()),
    ];
    println!("E X_v = Σ 1/(d(v)+1) and E X_e = Σ_(v≠root) 1/d(v), exactly:\n");
    for (name, tree) in &shapes {
        let brute_v = brute_force_mean_records(tree, CutKind::Vertex).unwrap();
        let closed_v = expected_records_vertices_rational(tree);
        let brute_e = brute_force_mean_records(tree, CutKind::Edge).unwrap();
        let closed_e = expected_records_edges_rational(tree);
        println!(
            "  {name:26} E X_v = {}/{} (enumeration {}/{})   E X_e = {}/{} (enumeration {}/{})",
            closed_v.num, closed_v.den, brute_v.num, brute_v.den,
            closed_e.num, closed_e.den, brute_e.num, brute_e.den,
        );
        assert_eq!(brute_v, closed_v);
        assert_eq!(brute_e, closed_e);
    }
    println!("\nall identities hold exactly (rational arithmetic).");
}
