//! Depth laws for the last inserted ball: D_n/ln n → μ⁻¹, the central limit
//! law (D_n − μ⁻¹ ln n)/√(σ²μ⁻³ ln n) → N(0,1), and Var(D_n)/ln n → σ²μ⁻³.

use splitrec::stats::depth_clt_check;
use splitrec::tree::SplitParams;

fn main() {
    let params = SplitParams::bst();
    let (mu, sigma2) = (0.5, 0.25);
    println!("binary search tree, 2000 replicates per n (μ⁻¹ = 2, σ²μ⁻³ = 2):");
    println!(
        "  {:>8} {:>10} {:>10} {:>12} {:>10}",
        "n", "mean D_n", "2 ln n", "Var/ln n", "KS vs N"
    );
    for n in [4_096u64, 32_768, 262_144] {
        let diag = depth_clt_check(&params, n, 2_000, mu, sigma2, 5).unwrap();
        let ln_n = (n as f64).ln();
        println!(
            "  {n:>8} {:>10.3} {:>10.3} {:>12.3} {:>10.4}",
            diag.mean_depth,
            2.0 * ln_n,
            diag.var_depth / ln_n,
            diag.ks_vs_normal
        );
    }
    println!(
        "\nThe KS column plateaus near 0.14: the exact mean is 2(H_n − 1) ≈ 2 ln n − 0.845,\n\
         and the integer lattice contributes ≈ 0.04, so the standardized law approaches\n\
         N(0,1) only at the 1/√(ln n) rate."
    );
}
