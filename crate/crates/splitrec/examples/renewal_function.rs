//! The renewal function U(t) = Σ b^k P(Y_k ≤ t) and the integral W(x).
//!
//! For the binary search tree Y_k ~ Gamma(k, 1), so U(t) = 2(e^t - 1)
//! exactly and W(x) = 2e^{-x} - 2; both closed forms are reproduced here by
//! the series evaluation, and e^{-t} U(t) approaches μ⁻¹ for the 3-ary
//! family as well.

use splitrec::model::SplitVectorModel;
use splitrec::renewal::{renewal_u, renewal_w, RenewalMethod};

fn main() {
    let bst = SplitVectorModel::bst();
    println!("binary search tree (analytic Gamma route):");
    println!("  {:>3} {:>14} {:>14} {:>9} {:>4}", "t", "U(t)", "2(e^t - 1)", "e^-t U", "K");
    for t in [1.0f64, 2.0, 4.0, 6.0, 8.0, 10.0] {
        let expect = 2.0 * (t.exp() - 1.0);
        let eval = renewal_u(&bst, t, 0.002 * expect, RenewalMethod::SeriesAnalytic, 0).unwrap();
        println!(
            "  {t:3} {:14.3} {expect:14.3} {:9.5} {:4}",
            eval.u,
            (-t).exp() * eval.u,
            eval.truncation_depth
        );
    }
    let w10 = renewal_w(&bst, 10.0, 0.01, RenewalMethod::SeriesAnalytic, 0).unwrap();
    println!("  W(10) = {w10:.5}  (limit (σ²-μ²)/(2μ²) - μ⁻¹ = -2)");

    let mary = SplitVectorModel::uniform_spacings(3).unwrap();
    println!("\n3-ary search tree (Monte Carlo series, μ⁻¹ = 1.2):");
    for t in [2.0f64, 5.0, 8.0] {
        let eval = renewal_u(
            &mary,
            t,
            0.02 * 1.2 * t.exp(),
            RenewalMethod::SeriesMonteCarlo { paths: 2_000_000 },
            9,
        )
        .unwrap();
        println!(
            "  t = {t}: U = {:12.1}, e^-t U = {:.4}, K = {}, tail ≤ {:.2}, se = {:.2}",
            eval.u,
            (-t).exp() * eval.u,
            eval.truncation_depth,
            eval.tail_bound,
            eval.std_error.unwrap()
        );
    }
}
