//! The weakly 1-stable limit law: characteristic function, inversion
//! CDF/PDF, quantiles, direct sampling, and the centering/scaling that maps
//! raw record counts onto it.

use splitrec::constants::LimitConstants;
use splitrec::model::SplitVectorModel;
use splitrec::rng::stream;
use splitrec::stable::{LimitDistribution, NormalizationContext};
use splitrec::stats;

fn main() {
    let model = SplitVectorModel::bst();
    let dist = LimitDistribution::for_model(&model, 0.5, 0.25).unwrap();
    println!(
        "limit law: index 1, skew 1, scale πμ⁻¹/2 = {:.6}, location C = {:.6}",
        dist.scale(),
        dist.location()
    );

    println!("\ncharacteristic function (modulus decays like e^(-πμ⁻¹t/2)):");
    for t in [0.5f64, 1.0, 2.0] {
        let cf = dist.cf(t);
        let levy = dist.cf_levy(t, 1e-8).unwrap();
        println!(
            "  t = {t}: cf = {:.6} + {:.6}i, Lévy-integral route differs by {:.1e}",
            cf.re,
            cf.im,
            (cf - levy).norm()
        );
    }

    println!("\ninversion CDF/PDF and quantiles:");
    for p in [0.1f64, 0.5, 0.9] {
        let q = dist.quantile(p, 1e-8).unwrap();
        println!(
            "  quantile({p}) = {q:8.4}   cdf back = {:.6}   pdf there = {:.6}",
            dist.cdf(q, 1e-10).unwrap(),
            dist.pdf(q, 1e-10).unwrap()
        );
    }

    let mut rng = stream(11, &[]);
    let samples = dist.sample_n(200_000, &mut rng);
    let emp = stats::empirical_cf(&samples, &[1.0]).unwrap()[0];
    println!(
        "\n200k draws: empirical cf(1) = {:.4} + {:.4}i vs analytic {:.4} + {:.4}i",
        emp.re,
        emp.im,
        dist.cf(1.0).re,
        dist.cf(1.0).im
    );
    let heavy = samples.iter().filter(|&&x| x > 50.0).count() as f64 / samples.len() as f64;
    println!("  P(W > 50) ≈ {heavy:.5} (Lévy tail μ⁻¹/50 = {:.5})", 2.0 / 50.0);

    // the normalization of Theorem-style record counts
    let constants = LimitConstants::bst();
    let ctx = NormalizationContext::from_constants(10_000, &constants).unwrap();
    println!(
        "\nnormalization at n = 10^4: centering C_n = {:.2}, scale = {:.2}",
        ctx.centering(),
        ctx.scale()
    );
    println!("  a record count of 900 maps to w = {:.4}", ctx.normalize(900.0));
}
