//! Monotone piecewise-cubic interpolation.

use crate::error::{domain, Result};

fn locate(x: &[f64], t: f64) -> usize {
    // index i with x[i] <= t <= x[i+1]
    match x.binary_search_by(|v| v.partial_cmp(&t).expect("finite knots")) {
        Ok(i) => i.min(x.len() - 2),
        Err(i) => i.saturating_sub(1).min(x.len() - 2),
    }
}

fn hermite(h: f64, s: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, slope)
}

/// Fritsch–Carlson piecewise cubic Hermite interpolant (PCHIP).
///
/// Preserves monotonicity of the data in either direction and is C¹.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return domain("interpolation table needs at least two (x, y) pairs of equal length");
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return domain("interpolation table contains non-finite values");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("interpolation abscissae must be strictly increasing");
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn first_x(&self) -> f64 {
        self.x[0]
    }

    pub fn last_x(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.first_x() && t <= self.last_x()
    }

    /// Value and first derivative of the interpolant at `t`.
    pub fn eval_with_slope(&self, t: f64) -> Result<(f64, f64)> {
        if !self.contains(t) {
            return domain(format!(
                "{t:e} outside tabulated range [{:e}, {:e}]",
                self.first_x(),
                self.last_x()
            ));
        }
        let i = locate(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        Ok(hermite(h, s, self.y[i], self.y[i + 1], self.d[i], self.d[i + 1]))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.eval_with_slope(t).map(|(v, _)| v)
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Cubic Hermite interpolation of positive, increasing data in log–log coordinates, using
/// supplied derivatives. Exact for power laws; below the first knot it extends the first
/// segment's local power law down to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogHermite {
    u: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>,
}

impl LogLogHermite {
    /// `x`, `y` positive and strictly increasing; `dy` the derivatives dy/dx at the knots.
    pub fn new(x: &[f64], y: &[f64], dy: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() != dy.len() || x.is_empty() {
            return domain("log-log interpolant needs equally long, non-empty arrays");
        }
        if x.iter().chain(y).any(|v| !(*v > 0.0 && v.is_finite())) {
            return domain("log-log interpolant needs positive finite knots and values");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || y.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("log-log interpolant needs strictly increasing data");
        }
        let u: Vec<f64> = x.iter().map(|t| t.ln()).collect();
        let v: Vec<f64> = y.iter().map(|t| t.ln()).collect();
        let mut m: Vec<f64> = x
            .iter()
            .zip(y)
            .zip(dy)
            .map(|((xi, yi), di)| (xi * di / yi).max(0.0))
            .collect();
        // Fritsch–Carlson limiter keeps each segment monotone
        for k in 0..u.len().saturating_sub(1) {
            let secant = (v[k + 1] - v[k]) / (u[k + 1] - u[k]);
            let a = m[k] / secant;
            let b = m[k + 1] / secant;
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                m[k] = tau * a * secant;
                m[k + 1] = tau * b * secant;
            }
        }
        if m.iter().any(|s| !s.is_finite()) {
            return domain("non-finite log-log slope");
        }
        Ok(Self { u, v, m })
    }

    /// Interpolated value at `t >= 0`; `t` above the last knot is rejected.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        if !(t > 0.0) {
            return domain(format!("cannot interpolate at {t:e}"));
        }
        let lu = t.ln();
        let n = self.u.len();
        let last = self.u[n - 1];
        if lu > last {
            // tolerate rounding at the right end
            if lu - last > 1e-12 {
                return domain(format!("{t:e} beyond last knot {:e}", last.exp()));
            }
            return Ok(self.v[n - 1].exp());
        }
        if lu <= self.u[0] {
            return Ok((self.v[0] + self.m[0] * (lu - self.u[0])).exp());
        }
        let i = locate(&self.u, lu);
        let h = self.u[i + 1] - self.u[i];
        let s = (lu - self.u[i]) / h;
        let (val, _) = hermite(h, s, self.v[i], self.v[i + 1], self.m[i], self.m[i + 1]);
        Ok(val.exp())
    }

    /// Local log–log slope at the first knot.
    pub fn first_slope(&self) -> f64 {
        self.m[0]
    }
}
