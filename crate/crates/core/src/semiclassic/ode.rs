//! Dormand-Prince 5(4) with step control, exact landing on requested output
//! points and a stop predicate checked after every accepted step.

use crate::error::{Error, Result};

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
// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-13, atol: 1e-300, h0: 1e-4, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Outcome<const N: usize> {
    Reached([f64; N]),
    /// Stop predicate fired at the end of the step ending at `t`.
    Stopped { t: f64, state: [f64; N] },
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        *o += h * s;
    }
    out
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end > t0`. `outputs` must be
/// ascending; each one inside `(t0, t_end]` is hit exactly and passed to
/// `sink`. Outputs equal to `t0` are emitted immediately.
pub(crate) fn integrate<const N: usize, F, S, K>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    outputs: &[f64],
    opts: OdeOptions,
    stop: S,
    mut sink: K,
) -> Result<Outcome<N>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    S: Fn(f64, &[f64; N]) -> bool,
    K: FnMut(f64, &[f64; N]),
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = opts.h0.min(t_end - t0);
    let mut next_out = 0;
    while next_out < outputs.len() && outputs[next_out] <= t0 {
        sink(outputs[next_out], &y);
        next_out += 1;
    }
    let mut steps = 0;
    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::solver("dopri", format!("step limit reached at t = {t:e}")));
        }
        let target = if next_out < outputs.len() { outputs[next_out].min(t_end) } else { t_end };
        let mut landing = false;
        let mut hs = h;
        if t + hs >= target {
            hs = target - t;
            landing = true;
        }
        let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            t + hs,
            &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + hs, &y_new);
        let mut err = 0.0;
        for i in 0..N {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            h = hs * 0.1;
            if h <= f64::EPSILON * t.abs().max(1e-300) {
                return Err(Error::solver("dopri", format!("non-finite derivative at t = {t:e}")));
            }
            continue;
        }
        if err <= 1.0 {
            t = if landing { target } else { t + hs };
            y = y_new;
            k1 = k7;
            if !landing || hs >= h {
                h = hs * (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            }
            while next_out < outputs.len() && outputs[next_out] <= t {
                sink(outputs[next_out], &y);
                next_out += 1;
            }
            if stop(t, &y) {
                return Ok(Outcome::Stopped { t, state: y });
            }
        } else {
            h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h <= f64::EPSILON * t.abs().max(1e-300) {
                return Err(Error::solver("dopri", format!("step size underflow at t = {t:e}")));
            }
        }
    }
    Ok(Outcome::Reached(y))
}
