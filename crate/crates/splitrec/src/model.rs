//! Split-vector models: the law of the per-node probability vector.
//!
//! A split tree routes balls at each node by an independent copy of a random
//! probability vector `(V_1, ..., V_b)` with nonnegative entries summing to 1.
//! `V` denotes a generic identically distributed component, so `E(V) = 1/b`.
//! The catalogue below covers the classical families (binary search tree,
//! m-ary search tree, tries with permuted fixed probabilities, symmetric
//! split) plus caller-supplied samplers.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};

/// Absolute tolerance for "entries sum to one".
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A caller-supplied split-vector law.
#[derive(Clone)]
pub struct CustomModel {
    /// Branch factor; every sampled vector must have this length.
    pub b: u32,
    /// Draws one split vector.
    pub sampler: Arc<dyn Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync>,
    /// Analytic `(mu, sigma2)` when known.
    pub moments: Option<(f64, f64)>,
    /// Density of the identically distributed component on (0,1), when known.
    pub component_density: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Whether `-ln V` is lattice. The caller knows the law; we cannot tell
    /// from a black-box sampler.
    pub lattice: bool,
}

impl fmt::Debug for CustomModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomModel")
            .field("b", &self.b)
            .field("moments", &self.moments)
            .field("lattice", &self.lattice)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum SplitFamily {
    /// `b = 2`, vector distributed as `(U, 1-U)` with `U` uniform on (0,1).
    BinarySearchTree,
    /// Spacings of `m-1` independent uniforms on [0,1]; the component
    /// marginal is Beta(1, m-1). This is the m-ary search tree split law.
    UniformSpacings { m: u32 },
    /// Uniform random permutation of a fixed probability vector, as in tries
    /// and digital search trees.
    PermutedFixed { probs: Vec<f64> },
    /// `V ≡ 1/b`; `-ln V` is lattice.
    Symmetric { b: u32 },
    /// Caller-supplied sampler.
    Custom(CustomModel),
}

/// A validated split-vector model.
#[derive(Clone, Debug)]
pub struct SplitVectorModel {
    family: SplitFamily,
    branch_factor: u32,
    lattice: bool,
}

impl SplitVectorModel {
    /// Binary search tree: `b = 2`, split vector `(U, 1-U)`.
    pub fn bst() -> Self {
        SplitVectorModel {
            family: SplitFamily::BinarySearchTree,
            branch_factor: 2,
            lattice: false,
        }
    }

    /// Uniform spacings with branch factor `m >= 2` (m-ary search tree law).
    pub fn uniform_spacings(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("uniform spacings require m >= 2"));
        }
        Ok(SplitVectorModel {
            family: SplitFamily::UniformSpacings { m },
            branch_factor: m,
            lattice: false,
        })
    }

    /// Uniform random permutation of a fixed probability vector.
    ///
    /// Rejects vectors with an entry at 1 (that would give `P(V = 1) > 0`,
    /// which breaks every asymptotic in sight). Lattice detection: `-ln V` is
    /// lattice iff the `-ln p_i` are commensurable, which we test by rational
    /// approximation of their ratios.
    pub fn permuted_fixed(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::invalid("fixed probability vector needs length >= 2"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!(
                "fixed probabilities sum to {sum}, expected 1"
            )));
        }
        if probs.iter().any(|&p| !(0.0..1.0).contains(&p)) {
            return Err(Error::invalid(
                "fixed probabilities must lie in [0, 1); an entry of 1 gives P(V=1) > 0",
            ));
        }
        let lattice = log_ratios_commensurable(&probs);
        let b = probs.len() as u32;
        Ok(SplitVectorModel {
            family: SplitFamily::PermutedFixed { probs },
            branch_factor: b,
            lattice,
        })
    }

    /// Symmetric split `V ≡ 1/b` (flagged lattice).
    pub fn symmetric(b: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::invalid("branch factor must be >= 2"));
        }
        Ok(SplitVectorModel {
            family: SplitFamily::Symmetric { b },
            branch_factor: b,
            lattice: true,
        })
    }

    /// Caller-supplied model. The sampler is probed with a fixed stream: a
    /// degenerate law with `P(V = 1) > 0` cannot be detected exactly from a
    /// black box, so any probe draw with a component at 1 (or an invalid
    /// vector) is rejected here.
    pub fn custom(model: CustomModel) -> Result<Self> {
        if model.b < 2 {
            return Err(Error::invalid("branch factor must be >= 2"));
        }
        let mut probe = crate::rng::stream(0x70b3, &[crate::rng::tags::SAMPLER]);
        let b = model.b;
        for _ in 0..256 {
            let v = (model.sampler)(&mut probe);
            validate_vector(&v, b)?;
            if v.iter().any(|&x| x >= 1.0 - PROB_SUM_TOL) {
                return Err(Error::ModelViolation(
                    "custom sampler produced a component at 1; P(V=1) must be 0".into(),
                ));
            }
        }
        if let Some((mu, sigma2)) = model.moments {
            if !(mu > 0.0) || sigma2 < 0.0 {
                return Err(Error::invalid("custom moments need mu > 0 and sigma2 >= 0"));
            }
        }
        let lattice = model.lattice;
        Ok(SplitVectorModel {
            family: SplitFamily::Custom(model),
            branch_factor: b,
            lattice,
        })
    }

    pub fn family(&self) -> &SplitFamily {
        &self.family
    }

    pub fn branch_factor(&self) -> u32 {
        self.branch_factor
    }

    /// True when `-ln V` has a lattice law. Lattice models are fine for tree
    /// generation and renewal sums but are refused by the limit-law types.
    pub fn is_lattice(&self) -> bool {
        self.lattice
    }

    /// Short identifier used in exports.
    pub fn description(&self) -> String {
        match &self.family {
            SplitFamily::BinarySearchTree => "bst".into(),
            SplitFamily::UniformSpacings { m } => format!("uniform_spacings({m})"),
            SplitFamily::PermutedFixed { probs } => {
                let parts: Vec<String> = probs.iter().map(|p| format!("{p}")).collect();
                format!("permuted_fixed({})", parts.join(","))
            }
            SplitFamily::Symmetric { b } => format!("symmetric({b})"),
            SplitFamily::Custom(c) => format!("custom(b={})", c.b),
        }
    }

    /// Draw one split vector.
    pub fn sample_vector<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>> {
        let mut buf = Vec::with_capacity(self.branch_factor as usize);
        self.sample_into(rng, &mut buf)?;
        Ok(buf)
    }

    /// Draw one split vector into a reused buffer (hot path of the generator).
    pub(crate) fn sample_into<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        buf: &mut Vec<f64>,
    ) -> Result<()> {
        buf.clear();
        match &self.family {
            SplitFamily::BinarySearchTree => {
                let u: f64 = rng.random();
                buf.push(u);
                buf.push(1.0 - u);
            }
            SplitFamily::UniformSpacings { m } => {
                let m = *m as usize;
                buf.resize(m - 1, 0.0);
                for slot in buf.iter_mut() {
                    *slot = rng.random();
                }
                buf.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                let mut prev = 0.0;
                for slot in buf.iter_mut() {
                    let cut = *slot;
                    *slot = cut - prev;
                    prev = cut;
                }
                buf.push(1.0 - prev);
            }
            SplitFamily::PermutedFixed { probs } => {
                buf.extend_from_slice(probs);
                // Fisher–Yates
                for i in (1..buf.len()).rev() {
                    let j = rng.random_range(0..=i);
                    buf.swap(i, j);
                }
            }
            SplitFamily::Symmetric { b } => {
                buf.resize(*b as usize, 1.0 / *b as f64);
            }
            SplitFamily::Custom(c) => {
                let mut reborrow: &mut R = rng;
                let v = (c.sampler)(&mut reborrow);
                validate_vector(&v, c.b)?;
                buf.extend_from_slice(&v);
            }
        }
        Ok(())
    }

    /// Draw one copy of the identically distributed component `V`.
    pub fn sample_component<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match &self.family {
            SplitFamily::BinarySearchTree => Ok(rng.random()),
            SplitFamily::UniformSpacings { m } => {
                // First spacing is Beta(1, m-1): 1 - U^{1/(m-1)}.
                let u: f64 = rng.random();
                Ok(1.0 - u.powf(1.0 / (*m as f64 - 1.0)))
            }
            SplitFamily::PermutedFixed { probs } => {
                Ok(probs[rng.random_range(0..probs.len())])
            }
            SplitFamily::Symmetric { b } => Ok(1.0 / *b as f64),
            SplitFamily::Custom(_) => {
                let v = self.sample_vector(rng)?;
                Ok(v[rng.random_range(0..v.len())])
            }
        }
    }

    /// Density of the component marginal on (0,1), when one exists.
    pub fn component_density(&self) -> Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
        match &self.family {
            SplitFamily::BinarySearchTree => Some(Arc::new(|_v| 1.0)),
            SplitFamily::UniformSpacings { m } => {
                let beta = *m as f64 - 1.0;
                Some(Arc::new(move |v: f64| {
                    if (0.0..=1.0).contains(&v) {
                        beta * (1.0 - v).powf(beta - 1.0)
                    } else {
                        0.0
                    }
                }))
            }
            SplitFamily::Custom(c) => c.component_density.clone(),
            _ => None,
        }
    }

    /// Analytic `(mu, sigma2)` when the family has closed forms.
    ///
    /// `mu = b E(-V ln V)` and `sigma2 = b E(V ln^2 V) - mu^2`.
    pub fn analytic_mu_sigma(&self) -> Option<(f64, f64)> {
        match &self.family {
            SplitFamily::BinarySearchTree => Some((0.5, 0.25)),
            SplitFamily::UniformSpacings { m } => {
                // mu = H_m - 1, sigma2 = H_m^{(2)} - 1.
                let mut h1 = 0.0;
                let mut h2 = 0.0;
                for k in 1..=*m {
                    h1 += 1.0 / k as f64;
                    h2 += 1.0 / (k as f64 * k as f64);
                }
                Some((h1 - 1.0, h2 - 1.0))
            }
            SplitFamily::PermutedFixed { probs } => {
                let mu: f64 = probs.iter().map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 }).sum();
                let m2: f64 = probs
                    .iter()
                    .map(|&p| if p > 0.0 { p * p.ln() * p.ln() } else { 0.0 })
                    .sum();
                Some((mu, m2 - mu * mu))
            }
            SplitFamily::Symmetric { b } => {
                let lb = (*b as f64).ln();
                Some((lb, 0.0))
            }
            SplitFamily::Custom(c) => c.moments,
        }
    }

    /// `E(V^s)`, needed by the Chernoff truncation of the renewal series.
    /// Uses the closed form when available, otherwise quadrature on the
    /// component density, otherwise a fixed-stream Monte Carlo estimate.
    pub fn moment_v_pow(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::invalid("moment order must be positive"));
        }
        match &self.family {
            SplitFamily::BinarySearchTree => Ok(1.0 / (s + 1.0)),
            SplitFamily::UniformSpacings { m } => {
                // Beta(1, m-1): E V^s = prod_{j=1}^{m-1} j / (s + j).
                let mut e = 1.0;
                for j in 1..*m {
                    e *= j as f64 / (s + j as f64);
                }
                Ok(e)
            }
            SplitFamily::PermutedFixed { probs } => {
                Ok(probs.iter().map(|&p| p.powf(s)).sum::<f64>() / probs.len() as f64)
            }
            SplitFamily::Symmetric { b } => Ok((*b as f64).powf(-s)),
            SplitFamily::Custom(_) => {
                if let Some(f) = self.component_density() {
                    // E V^s = ∫_0^∞ e^{-(s+1)u} f(e^{-u}) du with v = e^{-u}.
                    return crate::quad::integrate(
                        move |u: f64| (-(s + 1.0) * u).exp() * f((-u).exp()),
                        0.0,
                        60.0,
                        1e-12,
                    );
                }
                let mut rng = crate::rng::stream(0x3a0d, &[crate::rng::tags::SAMPLER, s.to_bits()]);
                let reps = 200_000;
                let mut acc = 0.0;
                for _ in 0..reps {
                    acc += self.sample_component(&mut rng)?.powf(s);
                }
                Ok(acc / reps as f64)
            }
        }
    }
}

fn validate_vector(v: &[f64], b: u32) -> Result<()> {
    if v.len() != b as usize {
        return Err(Error::ModelViolation(format!(
            "split vector has length {}, expected {b}",
            v.len()
        )));
    }
    if v.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(Error::ModelViolation(
            "split vector has a negative or non-finite entry".into(),
        ));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::ModelViolation(format!(
            "split vector sums to {sum}, expected 1 within {PROB_SUM_TOL:e}"
        )));
    }
    Ok(())
}

/// True iff all ratios `ln p_i / ln p_j` look rational with small denominator,
/// in which case `-ln V` sits on a lattice (e.g. (1/2, 1/4, 1/4)).
fn log_ratios_commensurable(probs: &[f64]) -> bool {
    let logs: Vec<f64> = probs.iter().filter(|&&p| p > 0.0).map(|&p| -p.ln()).collect();
    let base = logs[0];
    logs.iter().all(|&l| {
        let ratio = l / base;
        rational_approx(ratio, 1 << 12, 1e-9).is_some()
    })
}

/// Best rational approximation by continued fractions; `Some((p, q))` when a
/// fraction with denominator <= max_den lands within tol.
fn rational_approx(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut frac = x;
    for _ in 0..64 {
        let a = frac.floor();
        if a < 0.0 || a > u64::MAX as f64 {
            return None;
        }
        let a_int = a as u64;
        let h2 = a_int.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a_int.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        if (x - h2 as f64 / k2 as f64).abs() <= tol {
            return Some((h2, k2));
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let rem = frac - a;
        if rem.abs() < 1e-15 {
            return None;
        }
        frac = 1.0 / rem;
    }
    None
}
