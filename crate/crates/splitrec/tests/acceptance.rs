//! Acceptance suite: every pinned numeric target, one test per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see one
//! pass/fail line per criterion. Monte Carlo checks use fixed master seeds
//! so the suite is reproducible bit for bit.

use splitrec::constants::{
    self, estimate_alpha, estimate_path_constants, LimitConstants, EULER_GAMMA,
};
use splitrec::model::SplitVectorModel;
use splitrec::records::{
    brute_force_mean_records, conditional_expected_records, count_records_vertices_capped,
    expected_records_edges_rational, expected_records_vertices_rational, CutKind,
};
use splitrec::renewal::{renewal_u, renewal_w, RenewalMethod};
use splitrec::rng::{stream, tags};
use splitrec::stable::{constant_c, LimitDistribution};
use splitrec::stats::{self, ExperimentConfig, Target};
use splitrec::tree::{SplitParams, SplitTree};

use num_complex::Complex64;
use rand::Rng;

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn harmonic(n: u64) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// All parent vectors (p_1, ..., p_{size-1}) with p_i < i: every increasing
/// tree on `size` nodes, covering every rooted shape of that size.
fn all_parent_vectors(size: usize, out: &mut Vec<Vec<u32>>) {
    fn recurse(size: usize, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if acc.len() == size - 1 {
            out.push(acc.clone());
            return;
        }
        let next = acc.len() as u32 + 1;
        for p in 0..next {
            acc.push(p);
            recurse(size, acc, out);
            acc.pop();
        }
    }
    if size == 1 {
        out.push(Vec::new());
        return;
    }
    recurse(size, &mut Vec::new(), out);
}

#[test]
fn criterion_01_exact_record_identities() {
    // Brute-force permutation means equal the closed-form expectations,
    // exactly in rational arithmetic, over >= 100 trees with <= 7 nodes.
    let mut corpus: Vec<Vec<u32>> = Vec::new();
    for size in 1..=5usize {
        all_parent_vectors(size, &mut corpus);
    }
    let mut rng = stream(0x01, &[]);
    for _ in 0..40 {
        for size in [6usize, 7] {
            let parents: Vec<u32> = (1..size as u32).map(|i| rng.random_range(0..i)).collect();
            corpus.push(parents);
        }
    }
    assert!(corpus.len() >= 100, "corpus holds {} trees", corpus.len());
    for parents in &corpus {
        let tree = SplitTree::from_parents(parents).unwrap();
        let brute_v = brute_force_mean_records(&tree, CutKind::Vertex).unwrap();
        let direct_v = expected_records_vertices_rational(&tree);
        assert_eq!(brute_v, direct_v, "vertex identity failed on {parents:?}");
        let brute_e = brute_force_mean_records(&tree, CutKind::Edge).unwrap();
        let direct_e = expected_records_edges_rational(&tree);
        assert_eq!(brute_e, direct_e, "edge identity failed on {parents:?}");
    }
    println!(
        "[criterion 1] PASS: brute-force vs closed-form record means agree exactly on {} trees",
        corpus.len()
    );
}

#[test]
fn criterion_02_bst_constants_by_quadrature() {
    let ms = constants::mu_sigma_quadrature(&SplitVectorModel::bst()).unwrap();
    assert!((ms.mu - 0.5).abs() < 1e-8, "mu = {}", ms.mu);
    assert!((ms.sigma2 - 0.25).abs() < 1e-8, "sigma2 = {}", ms.sigma2);
    println!(
        "[criterion 2] PASS: quadrature mu = {:.12}, sigma2 = {:.12}",
        ms.mu, ms.sigma2
    );
}

#[test]
fn criterion_03_renewal_suite() {
    let bst = SplitVectorModel::bst();
    // U(t) vs the closed form 2(e^t - 1), analytic Gamma route
    for t in 1..=10 {
        let tf = t as f64;
        let expect = 2.0 * (tf.exp() - 1.0);
        let eval = renewal_u(&bst, tf, 0.005 * expect, RenewalMethod::SeriesAnalytic, 0).unwrap();
        assert!(
            (eval.u - expect).abs() <= 0.01 * expect,
            "t={t}: U = {} vs {expect}",
            eval.u
        );
    }
    // Monte Carlo route spot check
    let expect5 = 2.0 * (5f64.exp() - 1.0);
    let mc = renewal_u(
        &bst,
        5.0,
        0.01 * expect5,
        RenewalMethod::SeriesMonteCarlo { paths: 1_000_000 },
        0x03,
    )
    .unwrap();
    assert!(
        (mc.u - expect5).abs() <= 3.0 * mc.std_error.unwrap() + mc.tail_bound,
        "MC U(5) = {} vs {expect5}",
        mc.u
    );
    // W(10) vs -2 within 0.05
    let w10 = renewal_w(&bst, 10.0, 0.02, RenewalMethod::SeriesAnalytic, 0).unwrap();
    assert!((w10 - (-2.0)).abs() < 0.05, "W(10) = {w10}");
    // limit identity (sigma^2 - mu^2)/(2 mu^2) - mu^{-1} = -2
    let (mu, sigma2) = (0.5, 0.25);
    let identity = (sigma2 - mu * mu) / (2.0 * mu * mu) - 1.0 / mu;
    assert_eq!(identity, -2.0);
    assert!((w10 - identity).abs() < 0.05);
    println!(
        "[criterion 3] PASS: U matches 2(e^t - 1) within 1% on t = 1..10; W(10) = {w10:.4} vs {identity}"
    );
}

#[test]
fn criterion_04_depth_laws() {
    let n = 100_000u64;
    let reps = 10_000u32;
    let diag = stats::depth_clt_check(&SplitParams::bst(), n, reps, 0.5, 0.25, 0x41).unwrap();

    let oracle = 2.0 * (harmonic(n) - 1.0);
    let se = (diag.var_depth / reps as f64).sqrt();
    let mean_ok = (diag.mean_depth - oracle).abs() <= 3.0 * se;
    let ratio = diag.var_depth / (n as f64).ln();
    let var_ok = (ratio - 2.0).abs() / 2.0 <= 0.15;
    let ks_ok = diag.ks_vs_normal < 0.05;
    println!(
        "[criterion 4] mean {} (oracle {:.4}, {}σ off): {}; Var/ln n = {:.4} ({:.1}% from 2): {}; KS vs N(0,1) = {:.4} (target < 0.05): {}",
        diag.mean_depth,
        oracle,
        ((diag.mean_depth - oracle) / se).abs().round(),
        if mean_ok { "PASS" } else { "FAIL" },
        ratio,
        100.0 * (ratio - 2.0).abs() / 2.0,
        if var_ok { "PASS" } else { "FAIL" },
        diag.ks_vs_normal,
        if ks_ok { "PASS" } else { "FAIL" },
    );
    assert!(mean_ok, "mean {} vs oracle {oracle} (se {se})", diag.mean_depth);
    assert!(var_ok, "Var/ln n = {ratio}");
    // The standardization (D_n - 2 ln n)/sqrt(2 ln n) leaves a centering
    // offset of 2γ - 2 ≈ -0.85 (≈ 0.18 sd), a ~15% variance deficit and an
    // integer lattice, so the distance to N(0,1) plateaus near 0.14 at this
    // n; the 0.05 target is out of reach for the law itself, not for the
    // implementation. Kept as specified; expected to fail.
    assert!(
        ks_ok,
        "KS vs N(0,1) = {:.4}: the standardized depth law itself sits ≈ 0.14 from normal at n = 1e5 \
         (offset 2γ-2, variance ratio ≈ 0.85, lattice step ≈ 0.21 sd), so the 0.05 target cannot be met",
        diag.ks_vs_normal
    );
}

#[test]
fn criterion_05_records_equal_cuttings() {
    let config = ExperimentConfig {
        params: SplitParams::bst(),
        n_grid: vec![500],
        reps: 5_000,
        master_seed: 0x55,
        targets: vec![
            Target::RecordsV,
            Target::RecordsE,
            Target::CutsV,
            Target::CutsE,
        ],
        constants: None,
    };
    let report = stats::run_experiment(&config).unwrap();
    let s = &report.results[0].samples;
    let (dv, pv) = stats::ks_two_sample(&s["records_v"], &s["cuts_v"]).unwrap();
    assert!(pv >= 0.001, "vertex variant rejected: D = {dv}, p = {pv}");
    let (de, pe) = stats::ks_two_sample(&s["records_e"], &s["cuts_e"]).unwrap();
    assert!(pe >= 0.001, "edge variant rejected: D = {de}, p = {pe}");
    println!(
        "[criterion 5] PASS: records ≡ cuttings on 5000+5000 replicates (vertex p = {pv:.3}, edge p = {pe:.3})"
    );
}

#[test]
fn criterion_06_conditional_expectation() {
    // fixed 20-node tree
    let parents = [0, 0, 1, 1, 2, 3, 3, 4, 5, 5, 6, 8, 8, 9, 11, 12, 14, 14, 16];
    let tree = SplitTree::from_parents(&parents).unwrap();
    assert_eq!(tree.node_count(), 20);
    let mut rng = stream(0x06, &[tags::LABELS]);
    for (i, cap) in [0.1, 0.3, 1.0].into_iter().enumerate() {
        let phi = conditional_expected_records(&tree, cap).unwrap();
        let samples: Vec<f64> = (0..100_000)
            .map(|_| count_records_vertices_capped(&tree, cap, &mut rng) as f64)
            .collect();
        let (mean, se) = mean_se(&samples);
        assert!(
            (mean - phi).abs() <= 3.0 * se,
            "cap {cap}: Monte Carlo {mean} vs phi {phi} (se {se})"
        );
        if i == 2 {
            println!(
                "[criterion 6] PASS: φ(T, Λ) matches capped record counting within 3 SE at Λ ∈ {{0.1, 0.3, 1.0}}"
            );
        }
    }
}

#[test]
fn criterion_07_stable_law_numerics() {
    let mu = 0.5;
    let sigma2 = 0.25;
    // location constant, exactly
    let c_exact = 3.0 - 2.0 * 2f64.ln() - 2.0 * EULER_GAMMA;
    let c_val = constant_c(mu, sigma2).unwrap();
    assert!((c_val - c_exact).abs() < 1e-10, "C = {c_val} vs {c_exact}");

    let dist = LimitDistribution::new(2.0, c_val).unwrap();

    // mapping identity: the general totally skewed 1-stable form with
    // (c, beta, d) = (pi mu^{-1}/2, 1, C) reproduces the closed form
    let mut worst_map = 0.0f64;
    for i in -40..=40i32 {
        let t = i as f64 * 0.25;
        let general = if t == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            let inner = Complex64::new(
                1.0,
                std::f64::consts::FRAC_2_PI * t.signum() * t.abs().ln(),
            );
            (Complex64::i() * dist.location() * t - inner.scale(dist.scale() * t.abs())).exp()
        };
        worst_map = worst_map.max((general - dist.cf(t)).norm());
    }
    assert!(worst_map < 1e-12, "mapping identity error {worst_map:e}");

    // sampler vs analytic characteristic function at 1e6 draws
    let n = 1_000_000usize;
    let mut rng = stream(0x07, &[tags::SAMPLER]);
    let mut samples = dist.sample_n(n, &mut rng);
    let t_grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.25).collect();
    let emp = stats::empirical_cf(&samples, &t_grid).unwrap();
    let mut worst_cf = 0.0f64;
    for (e, &t) in emp.iter().zip(&t_grid) {
        worst_cf = worst_cf.max((e - dist.cf(t)).norm());
    }
    assert!(worst_cf < 0.01, "sampler CF error {worst_cf}");

    // inversion CDF vs the empirical CDF of the same draws: evaluate the
    // exact CDF on 4096 order-statistic knots; the knot spacing adds at
    // most ~5e-4 to the estimated supremum
    samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let knots = 4096usize;
    let mut d_est = 0.0f64;
    for j in 0..=knots {
        let idx = (j * (n - 1)) / knots;
        let f = dist.cdf(samples[idx], 1e-9).unwrap();
        let lo = idx as f64 / n as f64;
        let hi = (idx as f64 + 1.0) / n as f64;
        d_est = d_est.max((f - lo).abs()).max((f - hi).abs());
    }
    assert!(d_est + 6e-4 < 0.005, "KS inversion vs empirical = {d_est}");

    // the Lévy-representation route matches the closed form
    let mut worst_levy = 0.0f64;
    for &t in &[0.5, 1.0, 2.0] {
        let levy = dist.cf_levy(t, 1e-8).unwrap();
        worst_levy = worst_levy.max((levy - dist.cf(t)).norm());
    }
    assert!(worst_levy < 1e-6, "Lévy route error {worst_levy:e}");

    println!(
        "[criterion 7] PASS: mapping {worst_map:.2e}; sampler CF {worst_cf:.4}; inversion KS {d_est:.4}; Lévy route {worst_levy:.2e}; C exact"
    );
}

#[test]
fn criterion_08_limit_theorem_trend() {
    let constants = LimitConstants::bst();
    let config = ExperimentConfig {
        params: SplitParams::bst(),
        n_grid: vec![1 << 10, 1 << 14, 1 << 18],
        reps: 2_000,
        master_seed: 0x88,
        targets: vec![Target::RecordsV],
        constants: Some(constants),
    };
    let report = stats::run_experiment(&config).unwrap();
    let ks: Vec<f64> = report
        .results
        .iter()
        .map(|r| r.ks_vs_limit["records_v"])
        .collect();
    let lead: Vec<f64> = report
        .results
        .iter()
        .map(|r| {
            let n = r.n as f64;
            (r.stats["records_v"].mean * 2.0 * n.ln() / n - 1.0).abs()
        })
        .collect();
    println!(
        "[criterion 8] KS vs limit along n = 2^10, 2^14, 2^18: {ks:?}; leading-order mean check: {lead:?}"
    );
    assert!(
        ks.windows(2).all(|w| w[1] <= w[0]),
        "KS distances not non-increasing: {ks:?}"
    );
    assert!(
        lead.windows(2).all(|w| w[1] < w[0]),
        "leading-order mean check not decreasing: {lead:?}"
    );
    println!("[criterion 8] PASS: both trends move toward the limit");
}

#[test]
fn criterion_09_cross_family_sanity() {
    let params = SplitParams::mary(3).unwrap();
    let model = params.model().clone();

    // alpha >= 1/s and Var(N)/n^2 decreasing
    let alpha_est = estimate_alpha(&params, &[512, 2048, 8192], 64, 0x91).unwrap();
    assert!(
        alpha_est.alpha >= 1.0 / params.s() as f64,
        "alpha = {}",
        alpha_est.alpha
    );
    let vars: Vec<f64> = alpha_est.per_n.iter().map(|p| p.var_n_over_n2).collect();
    assert!(
        vars.windows(2).all(|w| w[1] < w[0]),
        "Var(N)/n^2 not decreasing: {vars:?}"
    );

    // e^{-t} U(t) within 10% of the quadrature mu^{-1} at t = 8
    let mu = constants::mu_sigma_quadrature(&model).unwrap().mu;
    let mu_inv = 1.0 / mu;
    let t = 8.0;
    let eval = renewal_u(
        &model,
        t,
        0.05 * mu_inv * t.exp(),
        RenewalMethod::SeriesMonteCarlo { paths: 4_000_000 },
        0x9a,
    )
    .unwrap();
    let scaled = (-t).exp() * eval.u;
    assert!(
        (scaled - mu_inv).abs() / mu_inv <= 0.10,
        "e^-t U(t) = {scaled} vs mu^-1 = {mu_inv}"
    );

    // |q(2n) - q(n)| decreasing along the grid
    let paths = estimate_path_constants(
        &params,
        mu,
        alpha_est.alpha,
        &[256, 512, 1024, 2048],
        300,
        0x99,
        false,
    )
    .unwrap();
    let diffs: Vec<f64> = paths
        .per_n
        .windows(2)
        .map(|w| (w[1].q_hat - w[0].q_hat).abs())
        .collect();
    assert!(
        diffs.windows(2).all(|w| w[1] < w[0]),
        "|q(2n) - q(n)| not decreasing: {diffs:?}"
    );

    println!(
        "[criterion 9] PASS: alpha = {:.4} >= 1/2; Var(N)/n² {vars:?} decreasing; e^-t U(t) = {scaled:.4} vs {mu_inv:.4}; q-differences {diffs:?} decreasing",
        alpha_est.alpha
    );
}
