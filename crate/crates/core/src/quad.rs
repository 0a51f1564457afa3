//! Scalar numerics shared by the physics modules: adaptive Gauss-Kronrod
//! quadrature, monotone bisection and bounded maximisation.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel; returns (integral, error estimate).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-12, abs_tol: 0.0, max_panels: 4000 }
    }
}

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Panels with the largest error estimate are bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`. Running out of panels is
/// reported as a solver error, never silently accepted.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    // Start from a handful of panels so narrow features are less likely missed.
    let n0 = 8;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..n0)
        .map(|i| {
            let x0 = lo + (hi - lo) * i as f64 / n0 as f64;
            let x1 = lo + (hi - lo) * (i + 1) as f64 / n0 as f64;
            let (v, e) = gk15(&f, x0, x1);
            (x0, x1, v, e)
        })
        .collect();
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(Error::solver("integrate", "non-finite integrand"));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) || err == 0.0 {
            return Ok(sign * total);
        }
        if panels.len() >= opts.max_panels {
            return Err(Error::solver(
                "integrate",
                format!("panel limit reached: estimate {total:e}, error {err:e}"),
            ));
        }
        let (k, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("panels non-empty");
        let (x0, x1, _, _) = panels.swap_remove(k);
        let xm = 0.5 * (x0 + x1);
        if xm <= x0 || xm >= x1 {
            // Cannot subdivide further in f64; accept what we have.
            return Ok(sign * total);
        }
        let (v0, e0) = gk15(&f, x0, xm);
        let (v1, e1) = gk15(&f, xm, x1);
        panels.push((x0, xm, v0, e0));
        panels.push((xm, x1, v1, e1));
    }
}

/// Bisection for a root of `f` bracketed by `[lo, hi]` (signs must differ).
///
/// Runs until the bracket stops shrinking in floating point or its width falls
/// below `x_tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::solver(
            "bisect",
            format!("root not bracketed: f({lo:e}) = {flo:e}, f({hi:e}) = {fhi:e}"),
        ));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) || (hi - lo).abs() <= x_tol {
            break;
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

/// Maximises `f` over `[lo, hi]`: coarse scan on `n` equispaced points, then
/// golden-section refinement around the best sample. Returns (argmax, max).
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize, x_tol: f64) -> (f64, f64) {
    let n = n.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = 0;
    let mut fbest = f64::NEG_INFINITY;
    for i in 0..n {
        let v = f(lo + step * i as f64);
        if v > fbest {
            fbest = v;
            best = i;
        }
    }
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = lo + step * (best + 1).min(n - 1) as f64;
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx >= fbest {
        (x, fx)
    } else {
        (lo + step * best as f64, fbest)
    }
}
