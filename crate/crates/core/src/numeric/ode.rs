//! Dormand–Prince 5(4) integrator for scalar ODEs with output at prescribed points.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-300,
            max_steps: 1_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `(t0, y0)` and returns `y` at each of `targets`.
///
/// Targets must be monotone and lie on one side of `t0` (integration runs backwards when they
/// are below it). Steps are clipped to land on every target exactly.
pub fn integrate<F>(mut f: F, t0: f64, y0: f64, targets: &[f64], opts: OdeOptions) -> Result<Vec<f64>>
where
    F: FnMut(f64, f64) -> Result<f64>,
{
    let Some(&first) = targets.first() else {
        return Ok(Vec::new());
    };
    let dir = if targets.last().copied().unwrap_or(first) >= t0 { 1.0 } else { -1.0 };
    if targets
        .windows(2)
        .any(|w| (w[1] - w[0]) * dir < 0.0)
        || (first - t0) * dir < 0.0
    {
        return Err(Error::Domain("ODE targets must be monotone away from t0".into()));
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y)?;
    let scale = t0.abs().max(first.abs()).max(f64::MIN_POSITIVE);
    let mut h = dir * 1e-3 * scale;
    let mut steps = 0usize;
    let mut out = Vec::with_capacity(targets.len());

    for &target in targets {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Domain(format!("ODE step budget exhausted at t={t:e}")));
            }
            let remaining = target - t;
            let clipped = h.abs() >= remaining.abs();
            let step = if clipped { remaining } else { h };
            if t + step == t {
                return Err(Error::Domain(format!("ODE step underflow at t={t:e}")));
            }

            let k2 = f(t + C2 * step, y + step * A21 * k1)?;
            let k3 = f(t + C3 * step, y + step * (A31 * k1 + A32 * k2))?;
            let k4 = f(t + C4 * step, y + step * (A41 * k1 + A42 * k2 + A43 * k3))?;
            let k5 = f(
                t + C5 * step,
                y + step * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
            )?;
            let k6 = f(
                t + step,
                y + step * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            )?;
            let y_new = y + step * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
            let t_new = if clipped { target } else { t + step };
            let k7 = f(t_new, y_new)?;

            let err_abs =
                (step * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
            let sc = opts.atol + opts.rtol * y.abs().max(y_new.abs());
            let err = err_abs / sc;
            if !err.is_finite() {
                return Err(Error::Domain(format!("non-finite ODE error estimate at t={t:e}")));
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                // keep the unclipped step size when a target truncated this step
                if !clipped || step.abs() * factor > h.abs() {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(1.0);
            }
        }
        out.push(y);
    }
    Ok(out)
}
