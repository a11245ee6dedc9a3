//! The constant set (μ, σ², α, ς, ζ) across split-tree families, computed by
//! closed form, quadrature and simulation.

use splitrec::constants::{
    estimate_alpha, estimate_path_constants, mu_sigma_analytic, mu_sigma_monte_carlo,
    mu_sigma_quadrature, EULER_GAMMA,
};
use splitrec::model::SplitVectorModel;
use splitrec::rng::{stream, tags};
use splitrec::stable::constant_c;
use splitrec::tree::SplitParams;

fn main() {
    println!("mu and sigma^2 by three routes:");
    let catalogue = vec![
        ("bst", SplitVectorModel::bst()),
        ("uniform_spacings(3)", SplitVectorModel::uniform_spacings(3).unwrap()),
        ("permuted_fixed(0.3, 0.7)", SplitVectorModel::permuted_fixed(vec![0.3, 0.7]).unwrap()),
        ("symmetric(2)", SplitVectorModel::symmetric(2).unwrap()),
    ];
    for (name, model) in &catalogue {
        let analytic = mu_sigma_analytic(model).ok();
        let quad = mu_sigma_quadrature(model).ok();
        let mut rng = stream(1, &[tags::MC]);
        let mc = mu_sigma_monte_carlo(model, 200_000, &mut rng).unwrap();
        print!("  {name:26}");
        if let Some(a) = analytic {
            print!(" analytic ({:.6}, {:.6})", a.mu, a.sigma2);
        }
        if let Some(q) = quad {
            print!(" quadrature ({:.6}, {:.6})", q.mu, q.sigma2);
        }
        println!(
            " monte carlo ({:.4}±{:.4}, {:.4}±{:.4})",
            mc.mu,
            mc.mu_se.unwrap(),
            mc.sigma2,
            mc.sigma2_se.unwrap()
        );
    }

    println!("\nlocation constant C = -μ⁻¹ln μ⁻¹ + 2μ⁻¹ - μ⁻²σ² - μ⁻¹γ - (σ²-μ²)/(2μ²):");
    println!(
        "  bst: C = {:.6} (= 3 - 2 ln 2 - 2γ = {:.6})",
        constant_c(0.5, 0.25).unwrap(),
        3.0 - 2.0 * 2f64.ln() - 2.0 * EULER_GAMMA
    );

    // estimated constants for the 3-ary search tree
    let params = SplitParams::mary(3).unwrap();
    let alpha = estimate_alpha(&params, &[1024, 4096, 16384], 200, 77).unwrap();
    println!("\n3-ary search tree, estimated along a coupled grid:");
    for p in &alpha.per_n {
        println!(
            "  n = {:6}: N/n = {:.4} ± {:.4}, Var(N)/n² = {:.2e}",
            p.n, p.ratio_mean, p.ratio_se, p.var_n_over_n2
        );
    }
    println!("  α̂ = {:.4} ± {:.4}", alpha.alpha, alpha.alpha_se);

    let mu = mu_sigma_analytic(params.model()).unwrap().mu;
    let paths = estimate_path_constants(&params, mu, alpha.alpha, &[1024, 4096, 16384], 200, 78, false)
        .unwrap();
    println!("  ς̂ = {:.4} ± {:.4}, ζ̂ = {:.4} ± {:.4}", paths.varsigma, paths.varsigma_se, paths.zeta, paths.zeta_se);
}
