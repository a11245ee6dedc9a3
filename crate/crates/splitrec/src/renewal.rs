//! The renewal function `U(t) = Σ_k b^k P(Y_k <= t)` where `Y_k` is a sum of
//! `k` independent copies of `-ln V`, and the derived integral
//! `W(x) = ∫_0^x e^{-t} (U(t) - μ^{-1} e^t) dt`.
//!
//! `U(t) = (μ^{-1} + o(1)) e^t` and `W(x) → (σ²-μ²)/(2μ²) - μ^{-1}`; both
//! are exercised as numerical checks of the implementation. The series is
//! truncated at a depth `K` chosen so the Chernoff bound
//! `Σ_{k>K} b^k (E V^s)^k e^{st}` falls below the requested tolerance for an
//! optimized `s > 1`; such an `s` exists because `E(V^s) < E(V) = 1/b`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{SplitFamily, SplitVectorModel};
use crate::quad;
use crate::rng::{stream, tags};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RenewalMethod {
    /// Closed-form law of `Y_k` (binary search tree: Gamma(k, 1); symmetric
    /// split: the deterministic lattice `k ln b`).
    SeriesAnalytic,
    /// Monte Carlo estimate of every `P(Y_k <= t)` from shared `-ln V` paths.
    SeriesMonteCarlo { paths: u64 },
}

#[derive(Clone, Copy, Debug)]
pub struct RenewalEvaluation {
    pub t: f64,
    /// Estimate of `U(t)`.
    pub u: f64,
    /// Series truncation depth `K`.
    pub truncation_depth: u32,
    /// Chernoff bound on the discarded tail `Σ_{k>K} b^k P(Y_k <= t)`.
    pub tail_bound: f64,
    /// Monte Carlo standard error, when applicable.
    pub std_error: Option<f64>,
}

/// Truncation depth: the smallest `K` with
/// `e^{st} ρ^{K+1} / (1 - ρ) <= tol` where `ρ = b E(V^s)`, minimized over
/// `s` by golden-section search.
fn chernoff_truncation(
    model: &SplitVectorModel,
    t: f64,
    tol: f64,
) -> Result<(u32, f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let b = model.branch_factor() as f64;
    let required_k = |s: f64| -> Result<f64> {
        let rho = b * model.moment_v_pow(s)?;
        if !(rho > 0.0) || rho >= 1.0 {
            return Ok(f64::INFINITY);
        }
        Ok(((s * t - (1.0 - rho).ln() - tol.ln()) / -rho.ln()).max(1.0))
    };
    // golden-section over s in (1, 8]
    let golden = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (1.02_f64, 8.0_f64);
    let mut s1 = hi - golden * (hi - lo);
    let mut s2 = lo + golden * (hi - lo);
    let mut f1 = required_k(s1)?;
    let mut f2 = required_k(s2)?;
    for _ in 0..48 {
        if f1 <= f2 {
            hi = s2;
            s2 = s1;
            f2 = f1;
            s1 = hi - golden * (hi - lo);
            f1 = required_k(s1)?;
        } else {
            lo = s1;
            s1 = s2;
            f1 = f2;
            s2 = lo + golden * (hi - lo);
            f2 = required_k(s2)?;
        }
    }
    let (s, k_real) = if f1 <= f2 { (s1, f1) } else { (s2, f2) };
    if !k_real.is_finite() {
        return Err(Error::Convergence(
            "no Chernoff exponent drives the renewal tail below tolerance".into(),
        ));
    }
    let k = k_real.ceil() as u32;
    let rho = b * model.moment_v_pow(s)?;
    let bound = (s * t).exp() * rho.powi(k as i32 + 1) / (1.0 - rho);
    if !bound.is_finite() || bound > tol {
        return Err(Error::Convergence(format!(
            "Chernoff tail bound {bound:e} exceeds tolerance {tol:e}"
        )));
    }
    Ok((k, bound, s))
}

/// Regularized lower incomplete gamma `P(k, x)` for integer `k >= 1`.
fn gamma_p_int(k: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = k as f64;
    if x < a + 1.0 {
        // series: P(a,x) = x^a e^{-x} / Γ(a+1) · Σ_n x^n / ((a+1)...(a+n))
        let mut ln_fact = 0.0;
        for j in 1..=k {
            ln_fact += (j as f64).ln();
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut denom = a;
        for _ in 0..500 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        (a * x.ln() - x - ln_fact).exp() * sum
    } else {
        // complement: Q(k,x) = e^{-x} Σ_{j<k} x^j / j!
        let mut term = (-x).exp();
        let mut q = term;
        for j in 1..k {
            term *= x / j as f64;
            q += term;
        }
        (1.0 - q).clamp(0.0, 1.0)
    }
}

fn series_analytic_u(model: &SplitVectorModel, t: f64, k_max: u32) -> Result<f64> {
    match model.family() {
        SplitFamily::BinarySearchTree => {
            // Y_k ~ Gamma(k, 1)
            let mut sum = 0.0;
            let mut pow = 1.0;
            for k in 1..=k_max {
                pow *= 2.0;
                sum += pow * gamma_p_int(k, t);
            }
            Ok(sum)
        }
        SplitFamily::Symmetric { b } => {
            // Y_k = k ln b exactly
            let lb = (*b as f64).ln();
            let reach = (t / lb).floor() as u32;
            let mut sum = 0.0;
            let mut pow = 1.0;
            for _ in 1..=reach.min(k_max) {
                pow *= *b as f64;
                sum += pow;
            }
            Ok(sum)
        }
        _ => Err(Error::Capability(
            "no closed-form law of Y_k for this model; use the Monte Carlo series".into(),
        )),
    }
}

fn series_monte_carlo_u(
    model: &SplitVectorModel,
    t: f64,
    k_max: u32,
    paths: u64,
    master_seed: u64,
) -> Result<(f64, f64)> {
    let b = model.branch_factor() as f64;
    let chunk: u64 = 16_384;
    let chunks = paths.div_ceil(chunk);
    let partials: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|ci| -> Result<(f64, f64)> {
            let mut rng = stream(master_seed, &[tags::RENEWAL, ci]);
            let lo = ci * chunk;
            let hi = (lo + chunk).min(paths);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in lo..hi {
                let mut y = 0.0;
                let mut pow = 1.0;
                let mut stat = 0.0;
                for _ in 1..=k_max {
                    let v = model.sample_component(&mut rng)?;
                    y -= v.ln();
                    if y > t {
                        break;
                    }
                    pow *= b;
                    stat += pow;
                }
                sum += stat;
                sumsq += stat * stat;
            }
            Ok((sum, sumsq))
        })
        .collect::<Result<_>>()?;
    let (sum, sumsq) = partials
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let r = paths as f64;
    let mean = sum / r;
    let var = ((sumsq - sum * sum / r) / (r - 1.0)).max(0.0);
    Ok((mean, (var / r).sqrt()))
}

/// Evaluate the renewal function `U(t)`.
pub fn renewal_u(
    model: &SplitVectorModel,
    t: f64,
    tolerance: f64,
    method: RenewalMethod,
    master_seed: u64,
) -> Result<RenewalEvaluation> {
    if !(t >= 0.0) {
        return Err(Error::invalid("t must be >= 0"));
    }
    if t == 0.0 {
        // P(Y_k <= 0) = 0 since P(V = 1) = 0
        return Ok(RenewalEvaluation {
            t,
            u: 0.0,
            truncation_depth: 0,
            tail_bound: 0.0,
            std_error: None,
        });
    }
    let (k_max, tail_bound, _s) = chernoff_truncation(model, t, tolerance)?;
    match method {
        RenewalMethod::SeriesAnalytic => {
            let u = series_analytic_u(model, t, k_max)?;
            let exact_lattice = matches!(model.family(), SplitFamily::Symmetric { .. });
            Ok(RenewalEvaluation {
                t,
                u,
                truncation_depth: k_max,
                tail_bound: if exact_lattice { 0.0 } else { tail_bound },
                std_error: None,
            })
        }
        RenewalMethod::SeriesMonteCarlo { paths } => {
            if paths < 2 {
                return Err(Error::invalid("need at least 2 Monte Carlo paths"));
            }
            let (u, se) = series_monte_carlo_u(model, t, k_max, paths, master_seed)?;
            Ok(RenewalEvaluation {
                t,
                u,
                truncation_depth: k_max,
                tail_bound,
                std_error: Some(se),
            })
        }
    }
}

/// Evaluate `W(x) = ∫_0^x e^{-t} (U(t) - μ^{-1} e^t) dt`.
///
/// `μ` is computed from the model (closed form or quadrature). The series
/// truncation depth is chosen so the integrated truncation error stays below
/// half the tolerance; the quadrature gets the other half.
pub fn renewal_w(
    model: &SplitVectorModel,
    x: f64,
    tolerance: f64,
    method: RenewalMethod,
    master_seed: u64,
) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::invalid("x must be >= 0"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mu = crate::constants::mu_sigma_best(model)?.mu;
    let mu_inv = 1.0 / mu;
    // sup_t e^{-t} tail_K(t) is attained at t = x; requiring it below
    // tol/(2x) bounds the integrated truncation error by tol/2.
    let w_tail_tol = (tolerance / (2.0 * x)) * x.exp();
    let (k_max, _, _) = chernoff_truncation(model, x, w_tail_tol)?;
    match method {
        RenewalMethod::SeriesAnalytic => match model.family() {
            SplitFamily::Symmetric { b } => {
                // U is an exact staircase: integrate piecewise.
                let bf = *b as f64;
                let lb = bf.ln();
                let mut w = -mu_inv * x;
                let mut level_start = lb;
                let mut u_level = 0.0;
                let mut pow = 1.0;
                while level_start < x {
                    pow *= bf;
                    u_level += pow;
                    let seg_end = (level_start + lb).min(x);
                    w += u_level * ((-level_start).exp() - (-seg_end).exp());
                    level_start += lb;
                }
                Ok(w)
            }
            _ => {
                let g = |t: f64| -> f64 {
                    let u = series_analytic_u(model, t, k_max).expect("family supports series");
                    (-t).exp() * u - mu_inv
                };
                // probe for capability before handing to the quadrature
                series_analytic_u(model, x, 1)?;
                quad::integrate(g, 0.0, x, tolerance / 2.0)
            }
        },
        RenewalMethod::SeriesMonteCarlo { paths } => {
            if paths < 2 {
                return Err(Error::invalid("need at least 2 Monte Carlo paths"));
            }
            // ∫_0^x e^{-t} 1[Y_k <= t] dt = e^{-Y_k} - e^{-x} for Y_k <= x,
            // so each path integrates its own staircase exactly.
            let b = model.branch_factor() as f64;
            let chunk: u64 = 16_384;
            let chunks = paths.div_ceil(chunk);
            let partials: Vec<f64> = (0..chunks)
                .into_par_iter()
                .map(|ci| -> Result<f64> {
                    let mut rng = stream(master_seed, &[tags::RENEWAL, 0x77, ci]);
                    let lo = ci * chunk;
                    let hi = (lo + chunk).min(paths);
                    let ex = (-x).exp();
                    let mut sum = 0.0;
                    for _ in lo..hi {
                        let mut y = 0.0;
                        let mut pow = 1.0;
                        for _ in 1..=k_max {
                            let v = model.sample_component(&mut rng)?;
                            y -= v.ln();
                            if y > x {
                                break;
                            }
                            pow *= b;
                            sum += pow * ((-y).exp() - ex);
                        }
                    }
                    Ok(sum)
                })
                .collect::<Result<_>>()?;
            let total: f64 = partials.iter().sum();
            Ok(total / paths as f64 - mu_inv * x)
        }
    }
}
