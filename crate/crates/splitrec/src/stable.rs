//! The weakly 1-stable limit law `W` of the normalized record count.
//!
//! The characteristic function is
//! `E e^{itW} = exp(-(μ^{-1}/2) π |t| + i t (C - μ^{-1} ln |t|))`
//! with location constant
//! `C = -μ^{-1} ln μ^{-1} + 2 μ^{-1} - μ^{-2} σ² - μ^{-1} γ - (σ²-μ²)/(2μ²)`.
//! Matching the general 1-stable form
//! `exp(i d t - c |t| (1 + i β (2/π) sign(t) ln |t|))`
//! gives stability index 1, skewness `β = 1`, scale `c = π μ^{-1} / 2` and
//! location `d = C`; equivalently `W` is infinitely divisible with Lévy
//! density `μ^{-1}/x²` on `(0, ∞)`.
//!
//! The CDF and PDF come from numerically inverting the characteristic
//! function (it decays like `e^{-π μ^{-1} t / 2}`, so half-line quadrature is
//! cheap); far tails use the Lévy tail `ν(x, ∞) = μ^{-1}/x` on the right and
//! a Chernoff bound on the exponentially small left tail. Sampling uses the
//! classical uniform-exponential transform for totally skewed index-1 stable
//! laws, rescaled into the parameterization above.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::constants::{LimitConstants, EULER_GAMMA};
use crate::error::{Error, Result};
use crate::model::SplitVectorModel;
use crate::quad::{integrate, integrate_with_panels};

/// Location constant `C` of the limit characteristic function.
pub fn constant_c(mu: f64, sigma2: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::invalid("mu must be positive"));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::invalid("sigma2 must be >= 0"));
    }
    let mu_inv = 1.0 / mu;
    Ok(-mu_inv * mu_inv.ln() + 2.0 * mu_inv
        - mu_inv * mu_inv * sigma2
        - mu_inv * EULER_GAMMA
        - (sigma2 - mu * mu) / (2.0 * mu * mu))
}

/// Beyond this distance from the location the inversion integral is handed
/// over to the tail formulas.
const TAIL_WINDOW: f64 = 2.0e4;

#[derive(Clone, Copy, Debug)]
pub struct LimitDistribution {
    mu_inv: f64,
    location: f64,
    scale: f64,
}

impl LimitDistribution {
    /// Direct parameterization by `μ^{-1} > 0` and the location `C`.
    pub fn new(mu_inv: f64, location_c: f64) -> Result<Self> {
        if !(mu_inv > 0.0 && mu_inv.is_finite()) {
            return Err(Error::invalid("mu_inv must be positive and finite"));
        }
        if !location_c.is_finite() {
            return Err(Error::invalid("C must be finite"));
        }
        Ok(LimitDistribution {
            mu_inv,
            location: location_c,
            scale: FRAC_PI_2 * mu_inv,
        })
    }

    /// Construct from a model's `(mu, sigma2)`. Refuses lattice models:
    /// the limit theorem requires `-ln V` non-lattice.
    pub fn for_model(model: &SplitVectorModel, mu: f64, sigma2: f64) -> Result<Self> {
        if model.is_lattice() {
            return Err(Error::Capability(
                "limit law undefined for lattice models (-ln V must be non-lattice)".into(),
            ));
        }
        Self::new(1.0 / mu, constant_c(mu, sigma2)?)
    }

    pub fn mu_inv(&self) -> f64 {
        self.mu_inv
    }

    /// Location `C`.
    pub fn location(&self) -> f64 {
        self.location
    }

    /// Scale `c = π μ^{-1} / 2`; note `c (2/π) β = μ^{-1}`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn skewness(&self) -> f64 {
        1.0
    }

    pub fn stability_index(&self) -> f64 {
        1.0
    }

    /// `{mu_inv, C, scale, beta, alpha}` export object.
    pub fn export_json(&self) -> serde_json::Value {
        serde_json::json!({
            "mu_inv": self.mu_inv,
            "C": self.location,
            "scale": self.scale,
            "beta": 1,
            "alpha": 1,
        })
    }

    /// Characteristic function; `t ln |t|` extends by 0 at `t = 0`.
    pub fn cf(&self, t: f64) -> Complex64 {
        if t == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let modulus = (-self.scale * t.abs()).exp();
        let phase = t * (self.location - self.mu_inv * t.abs().ln());
        Complex64::from_polar(modulus, phase)
    }

    /// Characteristic function through the Lévy representation
    /// `exp(it(C + μ^{-1}(γ-1)) + μ^{-1} ∫ (e^{itx} - 1 - itx 1[x<1]) x^{-2} dx)`,
    /// with the integral evaluated numerically. Independent route used to
    /// check the closed form.
    pub fn cf_levy(&self, t: f64, tol: f64) -> Result<Complex64> {
        if t == 0.0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if t < 0.0 {
            return Ok(self.cf_levy(-t, tol)?.conj());
        }
        let quarter = (tol / 8.0).max(1e-13);
        let re1 = integrate(
            |x| {
                if x < 1e-8 {
                    -t * t / 2.0
                } else {
                    ((t * x).cos() - 1.0) / (x * x)
                }
            },
            0.0,
            1.0,
            quarter,
        )?;
        let im1 = integrate(
            |x| {
                if x < 1e-8 {
                    -t * t * t * x / 6.0
                } else {
                    ((t * x).sin() - t * x) / (x * x)
                }
            },
            0.0,
            1.0,
            quarter,
        )?;
        // cut the oscillatory half line at T with a two-term tail expansion,
        // remainder below 2/(t^2 T^3)
        let big_t = (16.0 / (t * t * quarter)).cbrt().max(8.0);
        let panels = ((big_t - 1.0) * t / 4.0).ceil() as usize + 8;
        let re2_main = integrate_with_panels(
            |x| (t * x).cos() / (x * x),
            1.0,
            big_t,
            quarter,
            panels,
        )?;
        let im2_main = integrate_with_panels(
            |x| (t * x).sin() / (x * x),
            1.0,
            big_t,
            quarter,
            panels,
        )?;
        let tt = t * big_t;
        let re_tail = -tt.sin() / (t * big_t * big_t)
            + 2.0 * tt.cos() / (t * t * big_t * big_t * big_t);
        let im_tail = tt.cos() / (t * big_t * big_t)
            + 2.0 * tt.sin() / (t * t * big_t * big_t * big_t);
        let levy_integral = Complex64::new(re1 + re2_main + re_tail - 1.0, im1 + im2_main + im_tail);
        let exponent = Complex64::new(
            0.0,
            t * (self.location + self.mu_inv * (EULER_GAMMA - 1.0)),
        ) + levy_integral.scale(self.mu_inv);
        Ok(exponent.exp())
    }

    /// Chernoff bound on the left tail from the Laplace transform
    /// `E e^{-sW} = exp(μ^{-1} s ln s - C s)` (the Lévy measure sits on the
    /// positive axis, so negative exponential moments exist).
    fn left_tail_bound(&self, x: f64) -> f64 {
        let mu = 1.0 / self.mu_inv;
        let s_star = (mu * (self.location - x) - 1.0).exp();
        (-self.mu_inv * s_star).exp()
    }

    /// Gil–Pelaez inversion: `F(x) = 1/2 - (1/π) ∫_0^∞ Im(e^{-itx} φ(t))/t dt`.
    ///
    /// The integrand is `e^{-ct} sin(θ(t))/t` with
    /// `θ(t) = t (C - x) - μ^{-1} t ln t`; the logarithmic blow-up of
    /// `sin θ / t` at 0 is handled by the substitution `t = e^u`, and the
    /// panel counts track the oscillation frequency `|C - x|`.
    pub fn cdf(&self, x: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !x.is_finite() {
            return Ok(if x > 0.0 { 1.0 } else { 0.0 });
        }
        let d = self.location - x;
        if -d > TAIL_WINDOW {
            // Lévy right tail: P(W > x) = μ^{-1}/x + O(ln x / x^2)
            return Ok((1.0 - self.mu_inv / x).clamp(0.0, 1.0));
        }
        if d > TAIL_WINDOW {
            return Ok(self.left_tail_bound(x).clamp(0.0, 1.0));
        }
        let integral = self.gil_pelaez(d, tol)?;
        Ok((0.5 - integral / PI).clamp(0.0, 1.0))
    }

    fn gil_pelaez(&self, d: f64, tol: f64) -> Result<f64> {
        let c = self.scale;
        let mu_inv = self.mu_inv;
        let tol_i = (tol * PI / 2.0).max(1e-13);
        let share = tol_i / 4.0;

        // upper cutoff: |∫_T^∞| <= e^{-cT}/(cT)
        let mut big_t = (1.0 + (4.0 / (share * c)).ln() / c).max(1.0);
        for _ in 0..4 {
            big_t = ((4.0 / (share * c * big_t)).ln() / c).max(1.0);
        }
        // split point below which the phase has not completed a cycle
        let t0 = (1.0 / (d.abs() + 1.0)).min(1.0).min(big_t / 2.0);

        let theta = move |t: f64| t * d - mu_inv * t * t.ln();

        // (0, t0] via t = e^u: integrand e^{-c e^u} sin(theta(e^u))
        let mut u_lo = -((d.abs() + 2.0 * mu_inv + 2.0) / share).ln() - 2.0;
        while (u_lo.exp()) * (d.abs() + mu_inv * (2.0 + u_lo.abs())) > share {
            u_lo -= 2.0;
        }
        let u_hi = t0.ln();
        let ih = {
            let f = move |u: f64| {
                let t = u.exp();
                (-c * t).exp() * theta(t).sin()
            };
            let freq_u = t0 * (d.abs() + mu_inv * (1.0 + u_lo.abs())) + 1.0;
            let panels = (((u_hi - u_lo) * freq_u / 4.0).ceil() as usize).max(8);
            integrate_with_panels(f, u_lo, u_hi, share, panels)?
        };

        // [t0, T] directly
        let it = {
            let f = move |t: f64| (-c * t).exp() * theta(t).sin() / t;
            let ln_bound = t0.ln().abs().max(big_t.ln().abs());
            let freq = d.abs() + mu_inv * (1.0 + ln_bound) + 1.0;
            let panels = (((big_t - t0) * freq / 4.0).ceil() as usize).max(8);
            integrate_with_panels(f, t0, big_t, share, panels)?
        };

        Ok(ih + it)
    }

    /// Density by inversion: `f(x) = (1/π) ∫_0^∞ e^{-ct} cos θ(t) dt`.
    pub fn pdf(&self, x: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if !x.is_finite() {
            return Ok(0.0);
        }
        let d = self.location - x;
        if -d > TAIL_WINDOW {
            return Ok(self.mu_inv / (x * x));
        }
        if d > TAIL_WINDOW {
            return Ok(0.0);
        }
        let c = self.scale;
        let mu_inv = self.mu_inv;
        let tol_i = (tol * PI / 2.0).max(1e-13);
        // |∫_T^∞ e^{-ct} cos θ dt| <= e^{-cT}/c
        let big_t = ((2.0 / (tol_i * c)).ln() / c).max(1.0);
        // t ln t extends by 0 at t = 0
        let f = move |t: f64| {
            if t <= 0.0 {
                1.0
            } else {
                (-c * t).exp() * (t * d - mu_inv * t * t.ln()).cos()
            }
        };
        let freq = d.abs() + mu_inv * (1.0 + big_t.ln().abs()) + 1.0;
        let panels = ((big_t * freq / 4.0).ceil() as usize).max(8);
        let integral = integrate_with_panels(f, 0.0, big_t, tol_i / 2.0, panels)?;
        Ok((integral / PI).max(0.0))
    }

    /// Quantile by monotone bisection on the CDF with bracket expansion.
    pub fn quantile(&self, p: f64, tol: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid("quantile needs p in (0, 1)"));
        }
        let ctol = (tol / 4.0).min(1e-9);
        let mut lo = self.location - 5.0 * (self.scale + 1.0);
        let mut hi = self.location + 5.0 * (self.scale + 1.0);
        let mut step = 10.0 * (self.scale + 1.0);
        while self.cdf(lo, ctol)? > p {
            lo -= step;
            step *= 2.0;
        }
        step = 10.0 * (self.scale + 1.0);
        while self.cdf(hi, ctol)? < p {
            hi += step;
            step *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let fm = self.cdf(mid, ctol)?;
            if (fm - p).abs() <= tol.min(1e-7) || hi - lo < 1e-12 * (1.0 + mid.abs()) {
                return Ok(mid);
            }
            if fm < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Draw one variate: classical uniform-exponential transform for the
    /// standard totally skewed index-1 stable law, then
    /// `W = c X₀ + C + μ^{-1} ln c` (the `ln c` shift is what the `t ln t`
    /// term of the characteristic function demands under rescaling).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.random();
            if u <= f64::EPSILON || u >= 1.0 - f64::EPSILON {
                continue;
            }
            let w: f64 = rng.sample(Exp1);
            if w <= 1e-300 {
                continue;
            }
            let v = PI * (u - 0.5);
            let a = FRAC_PI_2 + v;
            let x0 = FRAC_2_PI * (a * v.tan() - (FRAC_PI_2 * w * v.cos() / a).ln());
            let x = self.scale * x0 + self.location + self.mu_inv * self.scale.ln();
            if x.is_finite() {
                return x;
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }

    /// Write a `x,cdf,pdf` table over `[lo, hi]`.
    pub fn write_table<W: Write>(
        &self,
        w: &mut W,
        lo: f64,
        hi: f64,
        points: usize,
        tol: f64,
    ) -> Result<()> {
        if !(hi > lo) || points < 2 {
            return Err(Error::invalid("need hi > lo and at least 2 points"));
        }
        writeln!(w, "x,cdf,pdf")?;
        let step = (hi - lo) / (points - 1) as f64;
        for i in 0..points {
            let x = lo + i as f64 * step;
            let cdf = self.cdf(x, tol)?;
            let pdf = self.pdf(x, tol)?;
            writeln!(w, "{x},{cdf},{pdf}")?;
        }
        Ok(())
    }
}

/// The deterministic centering and scaling of the limit theorem:
/// `C_n = αn/(μ^{-1} ln n) + αn lnln n/(μ^{-1} ln²n) - ζn/(μ^{-1} ln²n)`
/// and scale `αn/(μ^{-2} ln²n)`. The theorem sends the normalized record
/// count to `-W`, so comparisons against `W` use the negated values.
#[derive(Clone, Copy, Debug)]
pub struct NormalizationContext {
    n: u64,
    alpha: f64,
    mu: f64,
    zeta: f64,
}

impl NormalizationContext {
    pub fn new(n: u64, alpha: f64, mu: f64, zeta: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid("need n >= 3 so that ln ln n is defined"));
        }
        if !(alpha > 0.0 && mu > 0.0) {
            return Err(Error::invalid("alpha and mu must be positive"));
        }
        Ok(NormalizationContext { n, alpha, mu, zeta })
    }

    pub fn from_constants(n: u64, constants: &LimitConstants) -> Result<Self> {
        Self::new(n, constants.alpha, constants.mu, constants.zeta)
    }

    /// `C_n`.
    pub fn centering(&self) -> f64 {
        let n = self.n as f64;
        let ln = n.ln();
        let lnln = ln.ln();
        let mu_inv = 1.0 / self.mu;
        self.alpha * n / (mu_inv * ln) + self.alpha * n * lnln / (mu_inv * ln * ln)
            - self.zeta * n / (mu_inv * ln * ln)
    }

    /// `α n / (μ^{-2} ln² n)`.
    pub fn scale(&self) -> f64 {
        let n = self.n as f64;
        let ln = n.ln();
        let mu_inv = 1.0 / self.mu;
        self.alpha * n / (mu_inv * mu_inv * ln * ln)
    }

    /// `w = (x - C_n) / scale`; the theorem asserts `w -> -W` in law.
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.centering()) / self.scale()
    }
}
