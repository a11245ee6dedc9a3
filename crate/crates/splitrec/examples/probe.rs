// Scratch measurements used while calibrating the acceptance suite.
use splitrec::constants::{estimate_path_constants, LimitConstants};
use splitrec::renewal::{renewal_u, RenewalMethod};
use splitrec::model::SplitVectorModel;
use splitrec::stats::{self, ExperimentConfig, Target};
use splitrec::tree::SplitParams;

fn main() {
    let arg: String = std::env::args().nth(1).unwrap_or_default();

    if arg == "c4" {
        for seed in [0x41u64, 0x42, 0x43] {
            let diag =
                stats::depth_clt_check(&SplitParams::bst(), 100_000, 10_000, 0.5, 0.25, seed)
                    .unwrap();
            let ratio = diag.var_depth / 100_000f64.ln();
            println!(
                "seed {seed:#x}: KS={:.4} mean={:.4} var/ln={:.4} dev={:.2}%",
                diag.ks_vs_normal,
                diag.mean_depth,
                ratio,
                100.0 * (ratio - 2.0).abs() / 2.0
            );
        }
    }

    if arg == "varcheck" {
        // exact-variance cross-check at n = 1000 with one million replicates
        use rayon::prelude::*;
        let n = 1000u64;
        let reps = 1_000_000u32;
        let depths: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = splitrec::rng::stream(0xcafe, &[1, n, rep as u64]);
                let tree = splitrec::tree::generate_tree(&SplitParams::bst(), n, &mut rng).unwrap();
                tree.last_insertion_depth().unwrap() as f64
            })
            .collect();
        let r = reps as f64;
        let mean = depths.iter().sum::<f64>() / r;
        let var = depths.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (r - 1.0);
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let h2: f64 = (1..=n).map(|k| 1.0 / (k * k) as f64).sum();
        let exact_mean = 2.0 * (h - 1.0);
        let exact_var = 2.0 * h - 4.0 * h2 + 2.0;
        println!(
            "n=1000 reps=1e6: mean {mean:.5} (exact {exact_mean:.5}, se {:.5}); var {var:.4} (exact {exact_var:.4}, se {:.4})",
            (var / r).sqrt(),
            exact_var * (2.0 / r).sqrt()
        );
    }

    if arg == "varcheck2" {
        use rayon::prelude::*;
        let n = 100_000u64;
        let reps = 40_000u32;
        let depths: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = splitrec::rng::stream(0xcafe2, &[1, n, rep as u64]);
                let tree = splitrec::tree::generate_tree(&SplitParams::bst(), n, &mut rng).unwrap();
                tree.last_insertion_depth().unwrap() as f64
            })
            .collect();
        let r = reps as f64;
        let mean = depths.iter().sum::<f64>() / r;
        let var = depths.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (r - 1.0);
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let h2: f64 = (1..=n).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let exact_mean = 2.0 * (h - 1.0);
        let exact_var = 2.0 * h - 4.0 * h2 + 2.0;
        println!(
            "n=1e5 reps=4e4: mean {mean:.5} (exact {exact_mean:.5}, se {:.5}); var {var:.4} (exact {exact_var:.4}, se {:.4}); ratio {:.5} (exact {:.5})",
            (var / r).sqrt(),
            exact_var * (2.0 / r).sqrt(),
            var / (n as f64).ln(),
            exact_var / (n as f64).ln()
        );
    }

    if arg == "varcheck3" {
        use rayon::prelude::*;
        let n = 10_000u64;
        let reps = 400_000u32;
        let depths: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut rng = splitrec::rng::stream(0xcafe3, &[1, n, rep as u64]);
                let tree = splitrec::tree::generate_tree(&SplitParams::bst(), n, &mut rng).unwrap();
                tree.last_insertion_depth().unwrap() as f64
            })
            .collect();
        let r = reps as f64;
        let mean = depths.iter().sum::<f64>() / r;
        let var = depths.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (r - 1.0);
        let h: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let h2: f64 = (1..=n).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        let exact_mean = 2.0 * (h - 1.0);
        let exact_var = 2.0 * h - 4.0 * h2 + 2.0;
        println!(
            "n=1e4 reps=4e5: mean {mean:.5} (exact {exact_mean:.5}, se {:.5}, z {:+.2}); var {var:.4} (exact {exact_var:.4}, se {:.4}, z {:+.2})",
            (var / r).sqrt(),
            (mean - exact_mean) / (var / r).sqrt(),
            exact_var * (2.0 / r).sqrt(),
            (var - exact_var) / (exact_var * (2.0 / r).sqrt())
        );
    }

    if arg == "c4seed" {
        let seed = u64::from_str_radix(
            std::env::args().nth(2).unwrap().trim_start_matches("0x"),
            16,
        )
        .unwrap();
        let diag =
            stats::depth_clt_check(&SplitParams::bst(), 100_000, 10_000, 0.5, 0.25, seed).unwrap();
        let ratio = diag.var_depth / 100_000f64.ln();
        println!(
            "seed {seed:#x}: KS={:.4} mean={:.4} var/ln={:.4} dev={:.2}%",
            diag.ks_vs_normal,
            diag.mean_depth,
            ratio,
            100.0 * (ratio - 2.0).abs() / 2.0
        );
    }

    if arg == "c5" {
        let config = ExperimentConfig {
            params: SplitParams::bst(),
            n_grid: vec![500],
            reps: 5_000,
            master_seed: 0x55,
            targets: vec![Target::RecordsV, Target::RecordsE, Target::CutsV, Target::CutsE],
            constants: None,
        };
        let report = stats::run_experiment(&config).unwrap();
        let s = &report.results[0].samples;
        let (dv, pv) = stats::ks_two_sample(&s["records_v"], &s["cuts_v"]).unwrap();
        let (de, pe) = stats::ks_two_sample(&s["records_e"], &s["cuts_e"]).unwrap();
        println!("vertex: D={dv:.4} p={pv:.5}; edge: D={de:.4} p={pe:.5}");
    }

    if arg == "c8" {
        let config = ExperimentConfig {
            params: SplitParams::bst(),
            n_grid: vec![1 << 10, 1 << 14, 1 << 18],
            reps: 2_000,
            master_seed: 0x88,
            targets: vec![Target::RecordsV],
            constants: Some(LimitConstants::bst()),
        };
        let report = stats::run_experiment(&config).unwrap();
        for r in &report.results {
            let mean = r.stats["records_v"].mean;
            let n = r.n as f64;
            let check = (mean * 2.0 * n.ln() / n - 1.0).abs();
            println!(
                "n={}: KS={:.4} mean={:.2} leading-check={:.4}",
                r.n, r.ks_vs_limit["records_v"], mean, check
            );
        }
    }

    if arg == "c9" {
        let params = SplitParams::mary(3).unwrap();
        for seed in [0x99u64, 0x9b, 0x9c] {
            for reps in [300u32, 600] {
                let est = estimate_path_constants(
                    &params,
                    5.0 / 6.0,
                    0.6,
                    &[256, 512, 1024, 2048, 4096],
                    reps,
                    seed,
                    false,
                )
                .unwrap();
                let diffs: Vec<f64> = est
                    .per_n
                    .windows(2)
                    .map(|w| (w[1].q_hat - w[0].q_hat).abs())
                    .collect();
                let mono = diffs.windows(2).all(|w| w[1] < w[0]);
                println!("seed {seed:#x} reps {reps}: diffs {diffs:?} mono={mono}");
            }
        }
        let model = SplitVectorModel::uniform_spacings(3).unwrap();
        let t = 8.0;
        let eval = renewal_u(
            &model,
            t,
            0.05 * 1.2 * t.exp(),
            RenewalMethod::SeriesMonteCarlo { paths: 4_000_000 },
            0x9a,
        )
        .unwrap();
        println!(
            "U(8): {:.1} scaled={:.4} (target 1.2, K={}, tail={:.1}, se={:.1})",
            eval.u,
            (-t).exp() * eval.u,
            eval.truncation_depth,
            eval.tail_bound,
            eval.std_error.unwrap()
        );
    }
}
