//! Statistical comparison machinery and the Monte Carlo experiment
//! orchestrator: Kolmogorov–Smirnov tests, empirical characteristic
//! functions, the depth CLT diagnostic, and reproducible replicated
//! experiments over a grid of tree sizes.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::LimitConstants;
use crate::error::{Error, Result};
use crate::records;
use crate::rng::{stream, tags};
use crate::stable::{LimitDistribution, NormalizationContext};
use crate::tree::{generate_tree, SplitParams};

/// Complementary error function (Chebyshev fit, |relative error| <= 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t * (-z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587
                                    + t * (-0.82215223 + t * 0.17087277)))))))))
    .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Asymptotic Kolmogorov survival function
/// `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2 k² λ²}`.
pub fn ks_asymptotic_sf(lambda: f64) -> f64 {
    if lambda < 0.15 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted_copy(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::invalid("sample must be nonempty"));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(Error::invalid("sample contains NaN"));
    }
    let mut v = sample.to_vec();
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(v)
}

/// One-sample Kolmogorov–Smirnov statistic `D = sup |F̂ - F|`.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    let sorted = sorted_copy(sample)?;
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max((f - (i as f64 + 1.0) / n).abs());
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    let xa = sorted_copy(a)?;
    let xb = sorted_copy(b)?;
    let (na, nb) = (xa.len(), xb.len());
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na as f64 * nb as f64) / (na as f64 + nb as f64);
    Ok((d, ks_asymptotic_sf(ne.sqrt() * d)))
}

/// Empirical characteristic function averaged over the sample, per grid
/// point; equals 1 at `t = 0`.
pub fn empirical_cf(sample: &[f64], t_grid: &[f64]) -> Result<Vec<Complex64>> {
    if sample.is_empty() {
        return Err(Error::invalid("sample must be nonempty"));
    }
    let n = sample.len() as f64;
    Ok(t_grid
        .iter()
        .map(|&t| {
            let mut re = 0.0;
            let mut im = 0.0;
            for &x in sample {
                let (s, c) = (t * x).sin_cos();
                re += c;
                im += s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DepthDiagnostics {
    pub n: u64,
    pub reps: u32,
    /// One-sample KS of the standardized last-ball depths against N(0,1).
    pub ks_vs_normal: f64,
    pub mean_depth: f64,
    pub var_depth: f64,
}

/// Standardize the last-ball depths `(D_n - μ^{-1} ln n) / sqrt(σ² μ^{-3} ln n)`
/// across replicates and compare against the standard normal.
/// Requires `σ² > 0` (monoatomic split vectors have no depth CLT).
pub fn depth_clt_check(
    params: &SplitParams,
    n: u64,
    reps: u32,
    mu: f64,
    sigma2: f64,
    master_seed: u64,
) -> Result<DepthDiagnostics> {
    if !(sigma2 > 0.0) {
        return Err(Error::Capability(
            "sigma2 = 0 (constant split component): the depth CLT does not apply".into(),
        ));
    }
    if reps < 2 || n < 2 {
        return Err(Error::invalid("need n >= 2 and reps >= 2"));
    }
    let depths: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<f64> {
            let mut rng = stream(master_seed, &[tags::TREE, n, rep as u64]);
            let tree = generate_tree(params, n, &mut rng)?;
            Ok(tree.last_insertion_depth().unwrap() as f64)
        })
        .collect::<Result<_>>()?;
    let r = reps as f64;
    let mean = depths.iter().sum::<f64>() / r;
    let var = depths.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (r - 1.0);
    let mu_inv = 1.0 / mu;
    let ln_n = (n as f64).ln();
    let sd = (sigma2 * mu_inv.powi(3) * ln_n).sqrt();
    let standardized: Vec<f64> = depths.iter().map(|d| (d - mu_inv * ln_n) / sd).collect();
    let ks = ks_one_sample(&standardized, standard_normal_cdf)?;
    Ok(DepthDiagnostics {
        n,
        reps,
        ks_vs_normal: ks,
        mean_depth: mean,
        var_depth: var,
    })
}

/// What to evaluate per replicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    RecordsV,
    RecordsE,
    CutsV,
    CutsE,
    Depths,
    Summaries,
}

impl Target {
    pub const ALL: [Target; 6] = [
        Target::RecordsV,
        Target::RecordsE,
        Target::CutsV,
        Target::CutsE,
        Target::Depths,
        Target::Summaries,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::RecordsV => "records_v",
            Target::RecordsE => "records_e",
            Target::CutsV => "cuts_v",
            Target::CutsE => "cuts_e",
            Target::Depths => "depths",
            Target::Summaries => "summaries",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "records_v" => Ok(Target::RecordsV),
            "records_e" => Ok(Target::RecordsE),
            "cuts_v" => Ok(Target::CutsV),
            "cuts_e" => Ok(Target::CutsE),
            "depths" => Ok(Target::Depths),
            "summaries" => Ok(Target::Summaries),
            other => Err(Error::invalid(format!("unknown target `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub params: SplitParams,
    pub n_grid: Vec<u64>,
    pub reps: u32,
    pub master_seed: u64,
    pub targets: Vec<Target>,
    /// Constants for the normalized-limit comparison, when available.
    pub constants: Option<LimitConstants>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleStats {
    pub mean: f64,
    pub se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridResult {
    pub n: u64,
    /// Sample arrays keyed by target name (summaries expand into
    /// `n_nodes`, `height`, `upsilon`, `psi`).
    pub samples: BTreeMap<String, Vec<f64>>,
    pub stats: BTreeMap<String, SampleStats>,
    /// One-sample KS of the negated normalized record counts against the
    /// limit CDF, per record-type target, when constants are available and
    /// the model is non-lattice.
    pub ks_vs_limit: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureRecord {
    pub n: u64,
    pub replicate: u32,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub model: String,
    pub b: u32,
    pub s: u32,
    pub s0: u32,
    pub s1: u32,
    pub n_grid: Vec<u64>,
    pub reps: u32,
    pub master_seed: u64,
    pub targets: Vec<String>,
    pub constants: Option<LimitConstants>,
    pub results: Vec<GridResult>,
    pub failures: Vec<FailureRecord>,
    /// Wall-clock metadata; excluded from reproducibility comparisons.
    pub wall_clock_secs: f64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// One CSV row per sample: `n,replicate,target,value`.
    pub fn write_csv_samples<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "n,replicate,target,value")?;
        for grid in &self.results {
            for (target, values) in &grid.samples {
                for (rep, value) in values.iter().enumerate() {
                    writeln!(w, "{},{},{},{}", grid.n, rep, target, value)?;
                }
            }
        }
        Ok(())
    }
}

struct RepOutcome {
    values: Vec<(&'static str, f64)>,
    error: Option<String>,
}

fn evaluate_replicate(config: &ExperimentConfig, n: u64, rep: u32) -> RepOutcome {
    let mut values = Vec::new();
    let mut run = || -> Result<()> {
        let mut tree_rng = stream(config.master_seed, &[tags::TREE, n, rep as u64]);
        let tree = generate_tree(&config.params, n, &mut tree_rng)?;
        for target in &config.targets {
            match target {
                Target::RecordsV => {
                    let mut rng = stream(config.master_seed, &[tags::RECORDS_V, n, rep as u64]);
                    values.push(("records_v", records::count_records_vertices(&tree, &mut rng) as f64));
                }
                Target::RecordsE => {
                    let mut rng = stream(config.master_seed, &[tags::RECORDS_E, n, rep as u64]);
                    values.push(("records_e", records::count_records_edges(&tree, &mut rng) as f64));
                }
                Target::CutsV => {
                    let mut rng = stream(config.master_seed, &[tags::CUTS_V, n, rep as u64]);
                    values.push(("cuts_v", records::simulate_cuts_vertices(&tree, &mut rng).count() as f64));
                }
                Target::CutsE => {
                    let mut rng = stream(config.master_seed, &[tags::CUTS_E, n, rep as u64]);
                    values.push(("cuts_e", records::simulate_cuts_edges(&tree, &mut rng).count() as f64));
                }
                Target::Depths => {
                    values.push(("depths", tree.last_insertion_depth().unwrap() as f64));
                }
                Target::Summaries => {
                    let s = tree.summarize();
                    values.push(("n_nodes", s.n_nodes as f64));
                    values.push(("height", s.height as f64));
                    values.push(("upsilon", s.upsilon as f64));
                    values.push(("psi", s.psi as f64));
                }
            }
        }
        Ok(())
    };
    let error = run().err().map(|e| e.to_string());
    RepOutcome { values, error }
}

/// Run the replicated experiment described by `config`.
///
/// Each `(n, replicate)` cell works on streams derived from
/// `(master_seed, n, replicate, purpose)`, so the report is identical
/// whatever the execution order or thread count. Failures are recorded per
/// replicate, never dropped.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if config.n_grid.is_empty() || config.reps < 1 {
        return Err(Error::invalid("need a nonempty grid and reps >= 1"));
    }
    if config.n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    if config.targets.is_empty() {
        return Err(Error::invalid("need at least one target"));
    }
    let started = Instant::now();

    let limit_dist = match &config.constants {
        Some(k) if !config.params.model().is_lattice() => {
            Some(LimitDistribution::for_model(config.params.model(), k.mu, k.sigma2)?)
        }
        _ => None,
    };

    let mut results = Vec::with_capacity(config.n_grid.len());
    let mut failures = Vec::new();
    for &n in &config.n_grid {
        let outcomes: Vec<RepOutcome> = (0..config.reps)
            .into_par_iter()
            .map(|rep| evaluate_replicate(config, n, rep))
            .collect();
        let mut samples: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (rep, outcome) in outcomes.into_iter().enumerate() {
            if let Some(message) = outcome.error {
                failures.push(FailureRecord {
                    n,
                    replicate: rep as u32,
                    message,
                });
                continue;
            }
            for (key, value) in outcome.values {
                samples.entry(key.to_string()).or_default().push(value);
            }
        }
        let mut stats = BTreeMap::new();
        for (key, vals) in &samples {
            let r = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / r;
            let var = if vals.len() > 1 {
                vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0)
            } else {
                0.0
            };
            stats.insert(key.clone(), SampleStats { mean, se: (var / r).sqrt() });
        }
        let mut ks_vs_limit = BTreeMap::new();
        if let (Some(dist), Some(constants)) = (&limit_dist, &config.constants) {
            let ctx = NormalizationContext::from_constants(n, constants)?;
            for key in ["records_v", "records_e"] {
                if let Some(vals) = samples.get(key) {
                    // X_v normalized converges to -W, so compare -w with W
                    let neg: Vec<f64> = vals.iter().map(|&x| -ctx.normalize(x)).collect();
                    let d = ks_one_sample(&neg, |x| {
                        dist.cdf(x, 1e-6).expect("cdf evaluation")
                    })?;
                    ks_vs_limit.insert(key.to_string(), d);
                }
            }
        }
        results.push(GridResult {
            n,
            samples,
            stats,
            ks_vs_limit,
        });
    }

    Ok(ExperimentReport {
        model: config.params.model().description(),
        b: config.params.b(),
        s: config.params.s(),
        s0: config.params.s0(),
        s1: config.params.s1(),
        n_grid: config.n_grid.clone(),
        reps: config.reps,
        master_seed: config.master_seed,
        targets: config.targets.iter().map(|t| t.name().to_string()).collect(),
        constants: config.constants,
        results,
        failures,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}
