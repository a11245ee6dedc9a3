//! The constants of the limit theorem: `mu = b E(-V ln V)`,
//! `sigma2 = b E(V ln^2 V) - mu^2`, the node-count slope `alpha` with
//! `E(N) = alpha n + o(n)`, and the second-order path-length constants
//! `varsigma` (balls) and `zeta` (vertices).
//!
//! `mu` and `sigma2` come analytically, by quadrature on the component
//! density, or by Monte Carlo. `alpha`, `varsigma` and `zeta` have no closed
//! form outside special families and are estimated from growing trees
//! observed along a grid of ball counts; one tree per replicate serves every
//! grid point, which couples the grid estimates and makes the convergence
//! trends testable at simulation scale.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SplitFamily, SplitVectorModel};
use crate::quad;
use crate::rng::{stream, tags};
use crate::tree::{SplitParams, TreeBuilder};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// How a constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Quadrature,
    Estimated { se: f64 },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConstantsProvenance {
    pub mu: Provenance,
    pub sigma2: Provenance,
    pub alpha: Provenance,
    pub varsigma: Provenance,
    pub zeta: Provenance,
}

/// The full constant set `(mu, sigma2, alpha, varsigma, zeta, C)` of the
/// limit theorem, with per-field provenance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LimitConstants {
    pub mu: f64,
    pub sigma2: f64,
    pub alpha: f64,
    pub varsigma: f64,
    pub zeta: f64,
    /// Location constant `C` of the limit characteristic function.
    pub location_c: f64,
    pub provenance: ConstantsProvenance,
}

impl LimitConstants {
    /// Binary search tree: everything is known in closed form.
    /// `mu = 1/2`, `sigma2 = 1/4`, `alpha = 1` (one vertex per ball), and the
    /// path-length constants equal `2γ - 4` since `E Ψ_n = 2(n+1)H_n - 4n`
    /// and `Υ = Ψ`.
    pub fn bst() -> Self {
        let mu = 0.5;
        let sigma2 = 0.25;
        let varsigma = 2.0 * EULER_GAMMA - 4.0;
        LimitConstants {
            mu,
            sigma2,
            alpha: 1.0,
            varsigma,
            zeta: varsigma,
            location_c: crate::stable::constant_c(mu, sigma2).expect("bst constants are valid"),
            provenance: ConstantsProvenance {
                mu: Provenance::Analytic,
                sigma2: Provenance::Analytic,
                alpha: Provenance::Analytic,
                varsigma: Provenance::Analytic,
                zeta: Provenance::Analytic,
            },
        }
    }

    /// Validate the numeric invariants against the family parameters:
    /// `mu` lies in `(0, ln b]`, `sigma2 >= 0`, and `alpha >= 1/s` since a
    /// vertex holds at most `s` balls.
    pub fn check(&self, b: u32, s: u32) -> Result<()> {
        if !(self.mu > 0.0) || self.mu > (b as f64).ln() + 1e-9 {
            return Err(Error::invalid(format!(
                "mu = {} must lie in (0, ln b = {}]",
                self.mu,
                (b as f64).ln()
            )));
        }
        if self.sigma2 < -1e-12 {
            return Err(Error::invalid(format!("sigma2 = {} must be >= 0", self.sigma2)));
        }
        if self.alpha * (s as f64) < 1.0 - 1e-6 {
            return Err(Error::invalid(format!(
                "alpha = {} must be >= 1/s = {}",
                self.alpha,
                1.0 / s as f64
            )));
        }
        Ok(())
    }

    /// The JSON export object
    /// `{model, b, s, s0, s1, mu, sigma2, alpha, varsigma, zeta, provenance}`.
    pub fn export_json(&self, params: &SplitParams) -> serde_json::Value {
        serde_json::json!({
            "model": params.model().description(),
            "b": params.b(),
            "s": params.s(),
            "s0": params.s0(),
            "s1": params.s1(),
            "mu": self.mu,
            "sigma2": self.sigma2,
            "alpha": self.alpha,
            "varsigma": self.varsigma,
            "zeta": self.zeta,
            "provenance": serde_json::to_value(self.provenance).expect("provenance serializes"),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MuSigma {
    pub mu: f64,
    pub sigma2: f64,
    pub mu_se: Option<f64>,
    pub sigma2_se: Option<f64>,
}

/// Closed-form `(mu, sigma2)`; errors for families without one.
pub fn mu_sigma_analytic(model: &SplitVectorModel) -> Result<MuSigma> {
    let (mu, sigma2) = model.analytic_mu_sigma().ok_or_else(|| {
        Error::Capability("no closed-form moments for this model".into())
    })?;
    Ok(MuSigma {
        mu,
        sigma2,
        mu_se: None,
        sigma2_se: None,
    })
}

/// `(mu, sigma2)` by adaptive quadrature on the component density.
///
/// With `v = e^{-u}` the integrable `-v ln v` endpoint becomes
/// `u e^{-2u} f(e^{-u})`, smooth and exponentially decaying, so plain
/// adaptive panels reach 1e-10 comfortably.
pub fn mu_sigma_quadrature(model: &SplitVectorModel) -> Result<MuSigma> {
    let density = model.component_density().ok_or_else(|| {
        Error::Capability("quadrature needs a component density".into())
    })?;
    let b = model.branch_factor() as f64;
    let f1 = {
        let density = density.clone();
        move |u: f64| u * (-2.0 * u).exp() * density((-u).exp())
    };
    let f2 = move |u: f64| u * u * (-2.0 * u).exp() * density((-u).exp());
    let m1 = quad::integrate(f1, 0.0, 80.0, 1e-12)?;
    let m2 = quad::integrate(f2, 0.0, 80.0, 1e-12)?;
    let mu = b * m1;
    let sigma2 = b * m2 - mu * mu;
    Ok(MuSigma {
        mu,
        sigma2: sigma2.max(0.0),
        mu_se: None,
        sigma2_se: None,
    })
}

/// Monte Carlo `(mu, sigma2)` with standard errors.
///
/// Each draw contributes `x = Σ_i -v_i ln v_i` and `y = Σ_i v_i ln^2 v_i`,
/// whose means are `mu` and `b E(V ln^2 V)`; the `sigma2` standard error
/// comes from the delta method on `ȳ - x̄^2`.
pub fn mu_sigma_monte_carlo<R: rand::Rng + ?Sized>(
    model: &SplitVectorModel,
    reps: u64,
    rng: &mut R,
) -> Result<MuSigma> {
    if reps < 2 {
        return Err(Error::invalid("monte carlo needs at least 2 draws"));
    }
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    let mut buf = Vec::new();
    for _ in 0..reps {
        model.sample_into(rng, &mut buf)?;
        let mut x = 0.0;
        let mut y = 0.0;
        for &v in &buf {
            if v > 0.0 {
                let lv = v.ln();
                x -= v * lv;
                y += v * lv * lv;
            }
        }
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let r = reps as f64;
    let mx = sx / r;
    let my = sy / r;
    let var_x = (sxx - sx * sx / r) / (r - 1.0);
    let var_y = (syy - sy * sy / r) / (r - 1.0);
    let cov_xy = (sxy - sx * sy / r) / (r - 1.0);
    let mu = mx;
    let sigma2 = my - mx * mx;
    // sigma2 = g(x̄, ȳ) with g = y - x^2: grad = (-2x, 1)
    let var_sigma2 = (4.0 * mx * mx * var_x + var_y - 4.0 * mx * cov_xy) / r;
    Ok(MuSigma {
        mu,
        sigma2,
        mu_se: Some((var_x / r).sqrt()),
        sigma2_se: Some(var_sigma2.max(0.0).sqrt()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MuSigmaMethod {
    Analytic,
    Quadrature,
    MonteCarlo { reps: u64 },
}

pub fn mu_sigma(
    model: &SplitVectorModel,
    method: MuSigmaMethod,
    seed: u64,
) -> Result<MuSigma> {
    match method {
        MuSigmaMethod::Analytic => mu_sigma_analytic(model),
        MuSigmaMethod::Quadrature => mu_sigma_quadrature(model),
        MuSigmaMethod::MonteCarlo { reps } => {
            let mut rng = stream(seed, &[tags::MC]);
            mu_sigma_monte_carlo(model, reps, &mut rng)
        }
    }
}

/// Best non-sampling route: closed form when available, else quadrature.
pub fn mu_sigma_best(model: &SplitVectorModel) -> Result<MuSigma> {
    mu_sigma_analytic(model).or_else(|_| mu_sigma_quadrature(model))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlphaPoint {
    pub n: u64,
    /// Mean of `N/n` over replicates.
    pub ratio_mean: f64,
    pub ratio_se: f64,
    /// Sample `Var(N)/n^2`, the `o(n^2)` trend quantity.
    pub var_n_over_n2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaEstimate {
    pub per_n: Vec<AlphaPoint>,
    /// `N̄/n` at the largest grid point.
    pub alpha: f64,
    pub alpha_se: f64,
}

fn check_grid(n_grid: &[u64], reps: u32) -> Result<()> {
    if n_grid.is_empty() {
        return Err(Error::invalid("grid must be nonempty"));
    }
    if n_grid[0] < 1 {
        return Err(Error::invalid("grid entries must be >= 1"));
    }
    if n_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("grid must be nondecreasing"));
    }
    if reps < 2 {
        return Err(Error::invalid("need at least 2 replicates"));
    }
    Ok(())
}

/// Grow one tree per replicate and snapshot it at every grid point.
/// Returns, per replicate, `(N, upsilon, psi)` per grid point.
fn grid_snapshots(
    params: &SplitParams,
    n_grid: &[u64],
    reps: u32,
    master_seed: u64,
) -> Result<Vec<Vec<(u64, u64, u64)>>> {
    let max_n = *n_grid.last().unwrap();
    (0..reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<(u64, u64, u64)>> {
            let mut rng = stream(master_seed, &[tags::TREE, rep as u64]);
            let mut builder = TreeBuilder::new(params.clone());
            let mut out = Vec::with_capacity(n_grid.len());
            let mut next = 0usize;
            for balls in 1..=max_n {
                builder.insert_ball(&mut rng)?;
                while next < n_grid.len() && n_grid[next] == balls {
                    out.push((builder.node_count(), builder.upsilon(), builder.psi()));
                    next += 1;
                }
            }
            Ok(out)
        })
        .collect()
}

fn mean_se(values: &[f64]) -> (f64, f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt(), var)
}

/// Estimate `alpha` from `E(N) = alpha n + o(n)` along a grid of ball
/// counts; the final estimate uses the largest grid point.
pub fn estimate_alpha(
    params: &SplitParams,
    n_grid: &[u64],
    reps: u32,
    master_seed: u64,
) -> Result<AlphaEstimate> {
    check_grid(n_grid, reps)?;
    let snaps = grid_snapshots(params, n_grid, reps, master_seed)?;
    let mut per_n = Vec::with_capacity(n_grid.len());
    for (gi, &n) in n_grid.iter().enumerate() {
        let ratios: Vec<f64> = snaps.iter().map(|s| s[gi].0 as f64 / n as f64).collect();
        let counts: Vec<f64> = snaps.iter().map(|s| s[gi].0 as f64).collect();
        let (ratio_mean, ratio_se, _) = mean_se(&ratios);
        let (_, _, var_n) = mean_se(&counts);
        per_n.push(AlphaPoint {
            n,
            ratio_mean,
            ratio_se,
            var_n_over_n2: var_n / (n as f64 * n as f64),
        });
    }
    let last = per_n.last().unwrap();
    Ok(AlphaEstimate {
        alpha: last.ratio_mean,
        alpha_se: last.ratio_se,
        per_n,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PathPoint {
    pub n: u64,
    /// `q̂(n) = (Ψ̄ - μ^{-1} n ln n) / n`.
    pub q_hat: f64,
    pub q_se: f64,
    /// `r̂(n) = (Ῡ - μ^{-1} α n ln n) / n`.
    pub r_hat: f64,
    pub r_se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathConstantsEstimate {
    pub per_n: Vec<PathPoint>,
    /// `varsigma` estimate (from the largest grid point unless extrapolated).
    pub varsigma: f64,
    pub varsigma_se: f64,
    pub zeta: f64,
    pub zeta_se: f64,
    pub extrapolated: bool,
}

/// Estimate the second-order path-length constants `varsigma` and `zeta`
/// given `mu` and `alpha`. By default the estimate is the value at the
/// largest grid point; `extrapolate` fits `q(n) ≈ ς + c/ln n` through the
/// last two grid points instead (no convergence rate is guaranteed, so the
/// plain estimate is what acceptance uses).
pub fn estimate_path_constants(
    params: &SplitParams,
    mu: f64,
    alpha: f64,
    n_grid: &[u64],
    reps: u32,
    master_seed: u64,
    extrapolate: bool,
) -> Result<PathConstantsEstimate> {
    check_grid(n_grid, reps)?;
    if !(mu > 0.0) || !(alpha > 0.0) {
        return Err(Error::invalid("mu and alpha must be positive"));
    }
    let snaps = grid_snapshots(params, n_grid, reps, master_seed)?;
    let mu_inv = 1.0 / mu;
    let mut per_n = Vec::with_capacity(n_grid.len());
    for (gi, &n) in n_grid.iter().enumerate() {
        let nf = n as f64;
        let qs: Vec<f64> = snaps
            .iter()
            .map(|s| (s[gi].2 as f64 - mu_inv * nf * nf.ln()) / nf)
            .collect();
        let rs: Vec<f64> = snaps
            .iter()
            .map(|s| (s[gi].1 as f64 - mu_inv * alpha * nf * nf.ln()) / nf)
            .collect();
        let (q_hat, q_se, _) = mean_se(&qs);
        let (r_hat, r_se, _) = mean_se(&rs);
        per_n.push(PathPoint {
            n,
            q_hat,
            q_se,
            r_hat,
            r_se,
        });
    }
    let last = per_n.last().unwrap();
    let (varsigma, varsigma_se, zeta, zeta_se) = if extrapolate && per_n.len() >= 2 {
        let a = &per_n[per_n.len() - 2];
        let b = last;
        let la = (a.n as f64).ln();
        let lb = (b.n as f64).ln();
        let w = lb / (lb - la);
        let q = b.q_hat + (b.q_hat - a.q_hat) * (la / (lb - la));
        let r = b.r_hat + (b.r_hat - a.r_hat) * (la / (lb - la));
        let q_se = (w * b.q_se).hypot((w - 1.0) * a.q_se);
        let r_se = (w * b.r_se).hypot((w - 1.0) * a.r_se);
        (q, q_se, r, r_se)
    } else {
        (last.q_hat, last.q_se, last.r_hat, last.r_se)
    };
    Ok(PathConstantsEstimate {
        per_n,
        varsigma,
        varsigma_se,
        zeta,
        zeta_se,
        extrapolated: extrapolate,
    })
}

/// Assemble a full constant set for a family: analytic moments when known,
/// quadrature otherwise; `alpha`, `varsigma`, `zeta` by simulation along the
/// grid unless the family is the binary search tree.
pub fn derive_constants(
    params: &SplitParams,
    n_grid: &[u64],
    reps: u32,
    master_seed: u64,
) -> Result<LimitConstants> {
    if matches!(params.model().family(), SplitFamily::BinarySearchTree)
        && (params.s(), params.s0(), params.s1()) == (1, 1, 0)
    {
        return Ok(LimitConstants::bst());
    }
    let (ms, moment_prov) = match mu_sigma_analytic(params.model()) {
        Ok(ms) => (ms, Provenance::Analytic),
        Err(_) => (mu_sigma_quadrature(params.model())?, Provenance::Quadrature),
    };
    let alpha_est = estimate_alpha(params, n_grid, reps, master_seed)?;
    let paths = estimate_path_constants(
        params,
        ms.mu,
        alpha_est.alpha,
        n_grid,
        reps,
        master_seed ^ 0x517a,
        false,
    )?;
    let constants = LimitConstants {
        mu: ms.mu,
        sigma2: ms.sigma2,
        alpha: alpha_est.alpha,
        varsigma: paths.varsigma,
        zeta: paths.zeta,
        location_c: crate::stable::constant_c(ms.mu, ms.sigma2)?,
        provenance: ConstantsProvenance {
            mu: moment_prov,
            sigma2: moment_prov,
            alpha: Provenance::Estimated {
                se: alpha_est.alpha_se,
            },
            varsigma: Provenance::Estimated {
                se: paths.varsigma_se,
            },
            zeta: Provenance::Estimated { se: paths.zeta_se },
        },
    };
    constants.check(params.b(), params.s())?;
    Ok(constants)
}
