//! Numerical building blocks: quadrature, root finding, ODE stepping, interpolation and
//! finite differences.

pub mod diff;
pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod roots;

/// `m` log-spaced points from `lo` to `hi` inclusive; the endpoints are exact.
pub fn log_space(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![hi],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut v: Vec<f64> = (0..m)
                .map(|i| (a + (b - a) * i as f64 / (m - 1) as f64).exp())
                .collect();
            v[0] = lo;
            v[m - 1] = hi;
            v
        }
    }
}
