//! Adaptive quadrature helpers used by the constants and limit-law numerics.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 * (1.0 + a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Convergence(format!(
            "adaptive quadrature stalled on [{a}, {b}] (residual {delta:e})"
        )));
    }
    let l = adapt(f, a, fa, m, fm, flm, left, 0.5 * tol, depth + 1)?;
    let r = adapt(f, m, fm, b, fb, frm, right, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_panels(f, a, b, tol, 8)
}

/// Adaptive Simpson with a caller-chosen number of initial panels.
///
/// Oscillatory integrands need enough initial panels that the convergence
/// check cannot alias over whole periods; callers pass roughly one panel per
/// quarter period.
pub fn integrate_with_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    min_panels: usize,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature endpoints must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let panels = min_panels.clamp(1, 1 << 22);
    let h = (b - a) / panels as f64;
    let panel_tol = tol / panels as f64;
    let mut total = 0.0;
    let mut fa = f(a);
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = if i + 1 == panels { b } else { a + (i + 1) as f64 * h };
        let fm = f(0.5 * (x0 + x1));
        let fb = f(x1);
        let whole = simpson(fa, fm, fb, x1 - x0);
        total += adapt(&f, x0, fa, x1, fb, fm, whole, panel_tol, 0)?;
        fa = fb;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn log_endpoint_after_substitution() {
        // ∫_0^1 -v ln v dv = 1/4 via v = e^{-u}.
        let v = integrate(|u| u * (-2.0 * u).exp(), 0.0, 60.0, 1e-12).unwrap();
        assert!((v - 0.25).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_with_panels() {
        // ∫_0^{2π} sin(40 x) dx = 0, needle-prone without pre-splitting.
        let v = integrate_with_panels(|x| (40.0 * x).sin(), 0.0, std::f64::consts::TAU, 1e-10, 64)
            .unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-9).unwrap(), 0.0);
    }
}
