//! Adaptive Simpson quadrature, including a cumulative variant anchored at zero
//! for integrands with an integrable power-law singularity at the origin.

use crate::error::{Error, Result};

/// Number of geometric (halving) panels between zero and the first requested point.
const HEAD_PANELS: i32 = 64;

/// Maximum bisection depth of a single adaptive Simpson panel.
pub const MAX_DEPTH: u32 = 48;

struct Panel {
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::Quadrature(format!("integrand is not finite at t={x:e}")))
    }
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> Result<Panel> {
    let m = 0.5 * (a + b);
    let fm = eval(f, m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Ok(Panel {
        a,
        fa,
        m,
        fm,
        b,
        fb,
        whole,
    })
}

fn refine<F: Fn(f64) -> f64>(f: &F, p: Panel, eps: f64, depth: u32) -> Result<f64> {
    let left = panel(f, p.a, p.fa, p.m, p.fm)?;
    let right = panel(f, p.m, p.fm, p.b, p.fb)?;
    let delta = left.whole + right.whole - p.whole;
    // interval no longer resolvable in floating point
    let exhausted = left.m <= p.a || right.m >= p.b;
    if delta.abs() <= 15.0 * eps || exhausted {
        return Ok(left.whole + right.whole + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Quadrature(format!(
            "adaptive Simpson did not converge on [{:e}, {:e}]",
            p.a, p.b
        )));
    }
    Ok(refine(f, left, 0.5 * eps, depth - 1)? + refine(f, right, 0.5 * eps, depth - 1)?)
}

/// Integrates `f` over `[a, b]` with adaptive Simpson; `rel_tol` is relative to the panel's
/// own magnitude.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = eval(f, a)?;
    let fb = eval(f, b)?;
    let p = panel(f, a, fa, b, fb)?;
    let eps = (rel_tol * p.whole.abs()).max(f64::MIN_POSITIVE);
    refine(f, p, eps, MAX_DEPTH)
}

/// Returns `∫_0^{x_i} f` for every point of the strictly increasing, positive `points`.
///
/// The stretch `[0, x_0]` is covered by geometrically shrinking panels; the remaining sliver
/// next to zero is closed with a local power-law fit `f(t) ≈ c t^p`, which must satisfy
/// `p > -1`. Later points reuse the running total, so each panel is integrated once.
pub fn cumulative_from_zero<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    rel_tol: f64,
) -> Result<Vec<f64>> {
    let Some(&x0) = points.first() else {
        return Ok(Vec::new());
    };
    if !(x0 > 0.0) {
        return Err(Error::Quadrature(format!(
            "first point must be positive, got {x0:e}"
        )));
    }
    if points.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Quadrature("points must be strictly increasing".into()));
    }

    let eps = x0 * 2f64.powi(-HEAD_PANELS);
    let mut head = power_law_tail(f, eps)?;
    // smallest panels first
    for j in (0..HEAD_PANELS).rev() {
        let hi = x0 * 2f64.powi(-j);
        head += adaptive_simpson(f, 0.5 * hi, hi, rel_tol)?;
    }

    let mut out = Vec::with_capacity(points.len());
    out.push(head);
    let mut total = head;
    for w in points.windows(2) {
        total += adaptive_simpson(f, w[0], w[1], rel_tol)?;
        out.push(total);
    }
    Ok(out)
}

/// `∫_0^eps f` assuming `f(t) = c t^p` on `(0, eps]`.
fn power_law_tail<F: Fn(f64) -> f64>(f: &F, eps: f64) -> Result<f64> {
    let hi = eval(f, eps)?;
    let lo = eval(f, 0.5 * eps)?;
    if hi == 0.0 && lo == 0.0 {
        return Ok(0.0);
    }
    if !(hi > 0.0 && lo > 0.0) && !(hi < 0.0 && lo < 0.0) {
        return Err(Error::Quadrature(
            "integrand changes sign next to zero; no power-law asymptote".into(),
        ));
    }
    let p = (hi / lo).log2();
    if !(p > -1.0 + 1e-9) {
        return Err(Error::Quadrature(format!(
            "integrand behaves like t^{p:.4} at zero and is not integrable"
        )));
    }
    Ok(eps * hi / (p + 1.0))
}
