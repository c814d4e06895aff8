//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Plain bisection on a sign-changing bracket, to relative tolerance `rel_tol` in `x`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Root(format!(
            "no sign change on [{lo:e}, {hi:e}] (f = {flo:e}, {fhi:e})"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grows `hi` geometrically until the increasing function `f` is positive there.
pub fn expand_upper<F: Fn(f64) -> f64>(f: &F, lo: f64, mut hi: f64) -> Result<f64> {
    if !(f(lo) < 0.0) {
        return Err(Error::Root(format!("lower bracket {lo:e} is not below the root")));
    }
    for _ in 0..200 {
        if f(hi) >= 0.0 {
            return Ok(hi);
        }
        hi *= 4.0;
    }
    Err(Error::Root("could not bracket root from above".into()))
}

/// Newton's method safeguarded by a bracket, for a function that is increasing on `[lo, hi]`.
///
/// `fdf` returns `(f(x), f'(x))`. Iterates until the step is below `x_tol * |x|` or `f`
/// vanishes; Newton steps leaving the bracket fall back to bisection.
pub fn newton_bracketed<F: Fn(f64) -> (f64, f64)>(
    fdf: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> Result<f64> {
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if !(flo <= 0.0 && fhi >= 0.0) {
        return Err(Error::Root(format!(
            "bracket [{lo:e}, {hi:e}] does not enclose a root of an increasing function"
        )));
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= x_tol * next.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Root("Newton iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_no_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn newton_cubic() {
        let r = newton_bracketed(|c| (2.0 * c * c + 3.0 * c * c * c - 5.0, 4.0 * c + 9.0 * c * c), 1e-9, 10.0, 1e-15)
            .unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn expand_finds_upper_bracket() {
        let f = |x: f64| x - 1e3;
        let hi = expand_upper(&f, 0.0, 1.0).unwrap();
        assert!(hi >= 1e3);
    }
}
