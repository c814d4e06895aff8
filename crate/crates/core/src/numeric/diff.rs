//! Finite-difference derivatives.

/// Central difference with step `max(1e-6, 1e-6 |x|)`, shrunk to stay inside `[lo, hi]`;
/// falls back to a one-sided difference at the edges.
pub fn central<F: Fn(f64) -> f64>(f: F, x: f64, lo: f64, hi: f64) -> f64 {
    let h = (1e-6f64).max(1e-6 * x.abs());
    let up = (x + h).min(hi);
    let down = (x - h).max(lo);
    if up > down {
        (f(up) - f(down)) / (up - down)
    } else {
        f64::NAN
    }
}

/// Fornberg weights for the first derivative at `x0` from the given nodes.
pub fn fornberg_first(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // c[j][k]: weight of node j for the k-th derivative
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Derivative of tabulated `y(x)` at every node using five-point Fornberg stencils
/// (one-sided at the ends).
pub fn grid_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let width = n.min(5);
    (0..n)
        .map(|i| {
            let start = i.saturating_sub(width / 2).min(n - width);
            let nodes = &x[start..start + width];
            let w = fornberg_first(x[i], nodes);
            w.iter().zip(&y[start..start + width]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_three_point_central() {
        let w = fornberg_first(0.0, &[-1.0, 0.0, 1.0]);
        assert!((w[0] + 0.5).abs() < 1e-15 && w[1].abs() < 1e-15 && (w[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_derivative_exact_on_quartic() {
        let x: Vec<f64> = (0..12).map(|i| 0.1 * 1.3f64.powi(i)).collect();
        let y: Vec<f64> = x.iter().map(|t| t.powi(4) - t * t).collect();
        let d = grid_derivative(&x, &y);
        for (t, got) in x.iter().zip(&d) {
            let want = 4.0 * t.powi(3) - 2.0 * t;
            assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn central_clamps_at_edges() {
        let d = central(|t| t * t, 0.0, 0.0, 1.0);
        assert!((d - 1e-6).abs() < 1e-12);
        let d = central(|t| t * t, 0.5, 0.0, 1.0);
        assert!((d - 1.0).abs() < 1e-9);
    }
}
