//! Thomas-Fermi universal screening function and the neutral TF atom.
//!
//! The equation `y'' = y^{3/2}/sqrt(x)` is integrated in `u = sqrt(x)`, where it
//! becomes the regular system `dy/du = 2u w`, `dw/du = 2 y^{3/2}` with
//! `w = dy/dx`. The initial slope is found by shooting. A single shot cannot
//! reach large `x`: slope errors of one ulp grow roughly like `x^{4.8}` while
//! the solution decays like `x^{-3}`. Once the slope bracket is exhausted the
//! two bracketing trajectories still agree up to some `x_sep`; the solution is
//! restarted from their common state well inside that range and the slope there
//! is bisected again.

use super::ode::{self, OdeOptions, Outcome};
use crate::error::{Error, Result};
use crate::radial::{self, RadialDensity, RadialGrid};
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

/// `b_0 = (1/2)(3 pi/4)^{2/3}`; the TF length unit is `b_0 Z^{-1/3}` Bohr.
pub fn tf_length_constant() -> f64 {
    0.5 * (0.75 * PI).powf(2.0 / 3.0)
}

const SEPARATION_TOL: f64 = 1e-12;
// Shots are classified by integrating until they visibly fail; an inexact
// slope always does so eventually.
const CLASSIFY_HORIZON: f64 = 1e8;
const RESTART_FRACTION: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shot {
    Crossed,
    TurnedUp,
    Survived,
}

fn rhs(u: f64, s: &[f64; 2]) -> [f64; 2] {
    let y = s[0].max(0.0);
    [2.0 * u * s[1], 2.0 * y * y.sqrt()]
}

fn opts() -> OdeOptions {
    OdeOptions { rtol: 1e-14, atol: 1e-300, h0: 1e-3, ..Default::default() }
}

fn shoot(u0: f64, y0: f64, w0: f64) -> Result<Shot> {
    let out = ode::integrate(rhs, u0, [y0, w0], CLASSIFY_HORIZON, &[], opts(), |_, s| s[0] < 0.0 || s[1] > 0.0, |_, _| {})?;
    Ok(match out {
        Outcome::Reached(_) => Shot::Survived,
        Outcome::Stopped { state, .. } => {
            if state[0] < 0.0 {
                Shot::Crossed
            } else {
                Shot::TurnedUp
            }
        }
    })
}

/// One restart segment: the solution on `[u0, u1]` is the trajectory started
/// from `(y0, w0)` at `u0`.
#[derive(Debug, Clone, Copy)]
struct Piece {
    u0: f64,
    y0: f64,
    w0: f64,
    u1: f64,
}

/// The universal screening function `y` on `[0, x_max]`.
#[derive(Debug, Clone)]
pub struct TfUniversal {
    slope: f64,
    x_max: f64,
    pieces: Vec<Piece>,
}

/// Solves the universal TF equation on `[0, x_max]`.
pub fn solve_tf_universal_to(x_max: f64) -> Result<TfUniversal> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::domain("solve_tf_universal", format!("x_max must be positive, got {x_max}")));
    }
    let u_max = x_max.sqrt();
    let horizon = 1.1 * u_max;
    let mut pieces = Vec::new();
    let (mut u0, mut y0) = (0.0, 1.0);
    let (mut lo, mut hi) = (-1.7, -1.5);
    let mut slope = f64::NAN;
    for _stage in 0..64 {
        let (l0, h0) = (shoot(u0, y0, lo)?, shoot(u0, y0, hi)?);
        if l0 != Shot::Crossed || h0 != Shot::TurnedUp {
            return Err(Error::solver(
                "solve_tf_universal",
                format!("slope bracket [{lo:e}, {hi:e}] at u = {u0} classified as {l0:?}/{h0:?}"),
            ));
        }
        let mut survivor = None;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match shoot(u0, y0, mid)? {
                Shot::Crossed => lo = mid,
                Shot::TurnedUp => hi = mid,
                Shot::Survived => {
                    survivor = Some(mid);
                    break;
                }
            }
        }
        let w_mid = survivor.unwrap_or(0.5 * (lo + hi));
        if pieces.is_empty() {
            slope = w_mid;
        }
        if survivor.is_some() {
            pieces.push(Piece { u0, y0, w0: w_mid, u1: u_max });
            break;
        }
        // where do the bracketing trajectories part?
        let n_chk = 2000;
        let start = u0.max(1e-3);
        let checks: Vec<f64> =
            (1..=n_chk).map(|k| start * (horizon / start).powf(k as f64 / n_chk as f64)).collect();
        let mut y_lo = vec![f64::NAN; n_chk];
        let mut y_hi = vec![f64::NAN; n_chk];
        let stop = |_: f64, s: &[f64; 2]| s[0] < 0.0 || s[1] > 0.0;
        let mut k = 0;
        ode::integrate(rhs, u0, [y0, lo], horizon, &checks, opts(), stop, |_, s| {
            y_lo[k] = s[0];
            k += 1;
        })?;
        k = 0;
        ode::integrate(rhs, u0, [y0, hi], horizon, &checks, opts(), stop, |_, s| {
            y_hi[k] = s[0];
            k += 1;
        })?;
        let sep = (0..n_chk).find(|&i| {
            let (a, b) = (y_lo[i], y_hi[i]);
            !(a.is_finite() && b.is_finite()) || (a - b).abs() > SEPARATION_TOL * b.abs()
        });
        let u_sep = match sep {
            Some(i) if checks[i] <= u_max => checks[i],
            _ => {
                pieces.push(Piece { u0, y0, w0: w_mid, u1: u_max });
                break;
            }
        };
        let u_r = u0 + RESTART_FRACTION * (u_sep - u0);
        let at = |w: f64| -> Result<[f64; 2]> {
            match ode::integrate(rhs, u0, [y0, w], u_r, &[], opts(), |_, _| false, |_, _| {})? {
                Outcome::Reached(s) => Ok(s),
                Outcome::Stopped { state, .. } => Ok(state),
            }
        };
        let (s_lo, s_hi) = (at(lo)?, at(hi)?);
        pieces.push(Piece { u0, y0, w0: w_mid, u1: u_r });
        u0 = u_r;
        y0 = 0.5 * (s_lo[0] + s_hi[0]);
        let w_c = 0.5 * (s_lo[1] + s_hi[1]);
        let mut d = ((s_hi[1] - s_lo[1]).abs() * 100.0).max(1e-13 * w_c.abs());
        for _ in 0..200 {
            if shoot(u0, y0, w_c - d)? == Shot::Crossed {
                break;
            }
            d *= 4.0;
        }
        lo = w_c - d;
        d = ((s_hi[1] - s_lo[1]).abs() * 100.0).max(1e-13 * w_c.abs());
        for _ in 0..200 {
            if shoot(u0, y0, w_c + d)? == Shot::TurnedUp {
                break;
            }
            d *= 4.0;
        }
        hi = (w_c + d).min(-f64::MIN_POSITIVE);
    }
    if pieces.last().map(|p| p.u1) != Some(u_max) {
        return Err(Error::solver("solve_tf_universal", "restart limit reached"));
    }
    Ok(TfUniversal { slope, x_max, pieces })
}

/// The universal function on `[0, 10^4]`.
pub fn solve_tf_universal() -> Result<TfUniversal> {
    solve_tf_universal_to(1e4)
}

/// Process-wide copy of [`solve_tf_universal`], solved on first use.
pub fn universal() -> Result<&'static TfUniversal> {
    static CACHE: OnceLock<Result<TfUniversal>> = OnceLock::new();
    CACHE.get_or_init(solve_tf_universal).as_ref().map_err(Clone::clone)
}

impl TfUniversal {
    /// `y'(0)`.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Number of shooting restarts that were needed to reach `x_max`.
    pub fn restarts(&self) -> usize {
        self.pieces.len() - 1
    }

    /// `(y(x), y'(x))` at ascending points in `[0, x_max]`.
    pub fn sample(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Structural("sample points must be ascending".into()));
        }
        if let Some(&x) = xs.iter().find(|x| !(**x >= 0.0 && **x <= self.x_max)) {
            return Err(Error::domain("TfUniversal::sample", format!("x = {x} outside [0, {}]", self.x_max)));
        }
        let mut out = Vec::with_capacity(xs.len());
        let mut i = 0;
        for (j, p) in self.pieces.iter().enumerate() {
            let last = j + 1 == self.pieces.len();
            let mut us = Vec::new();
            while i < xs.len() && (xs[i].sqrt() < p.u1 || last) {
                us.push(xs[i].sqrt().max(p.u0));
                i += 1;
            }
            if us.is_empty() {
                continue;
            }
            let end = *us.last().expect("non-empty");
            if end <= p.u0 {
                out.extend(us.iter().map(|_| (p.y0, p.w0)));
                continue;
            }
            ode::integrate(rhs, p.u0, [p.y0, p.w0], end, &us, opts(), |_, _| false, |_, s| {
                out.push((s[0], s[1]))
            })?;
        }
        Ok(out)
    }
}

/// Layout of the TF grid in the dimensionless variable `x = r/b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfGridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nodes: usize,
}

impl Default for TfGridSpec {
    fn default() -> Self {
        TfGridSpec { x_min: 1e-12, x_max: 1e4, nodes: 4000 }
    }
}

/// Neutral non-relativistic TF atom.
#[derive(Debug, Clone)]
pub struct TFSolution {
    pub z: f64,
    /// TF length `b = b_0 Z^{-1/3}` in Bohr.
    pub b: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
    /// `y'(0)`.
    pub slope: f64,
    pub sigma: RadialDensity,
    /// `phi_sigma = Z/r - sigma * |.|^{-1}`, in Hartree, at the grid nodes.
    pub phi_sigma: Vec<f64>,
    /// `D[sigma]`.
    pub d_sigma: f64,
    /// TF functional at `sigma`.
    pub e_tf: f64,
    /// `-E_TF / Z^{7/3}`.
    pub e_tf_constant: f64,
    /// The same constant from the virial relation `E = (3/7) V_ne`, which only
    /// needs `y'(0)`: `e = -(3/7) y'(0) / b_0`.
    pub e_tf_slope_constant: f64,
}

/// `(3/10)(3 pi^2)^{2/3}`.
pub fn tf_kinetic_constant() -> f64 {
    0.3 * (3.0 * PI * PI).powf(2.0 / 3.0)
}

/// Non-relativistic TF functional of a density.
pub fn tf_functional(rho: &RadialDensity, z: f64) -> Result<f64> {
    let g = rho.grid();
    let kin: Vec<f64> = rho.rho().iter().map(|v| v.powf(5.0 / 3.0)).collect();
    Ok(tf_kinetic_constant() * radial::integrate_radial(g, &kin)?
        + radial::nuclear_attraction(rho, z)?
        + radial::coulomb_self_energy(rho))
}

pub fn tf_atom(z: f64) -> Result<TFSolution> {
    tf_atom_with(z, universal()?, TfGridSpec::default())
}

/// Builds the TF atom of charge `z` from a precomputed universal function.
pub fn tf_atom_with(z: f64, univ: &TfUniversal, spec: TfGridSpec) -> Result<TFSolution> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain("tf_atom", format!("Z must be > 0, got {z}")));
    }
    if spec.x_max > univ.x_max() {
        return Err(Error::domain(
            "tf_atom",
            format!("grid extends to x = {} beyond the solved range {}", spec.x_max, univ.x_max()),
        ));
    }
    let b0 = tf_length_constant();
    let b = b0 * z.powf(-1.0 / 3.0);
    let xgrid = RadialGrid::log_spaced(spec.x_min, spec.x_max, spec.nodes)?;
    let x = xgrid.nodes().to_vec();
    let yd = univ.sample(&x)?;
    let y: Vec<f64> = yd.iter().map(|p| p.0.max(0.0)).collect();
    let dy: Vec<f64> = yd.iter().map(|p| p.1).collect();
    let grid = Arc::new(RadialGrid::from_nodes(x.iter().map(|v| b * v).collect())?);
    let phi_sigma: Vec<f64> = grid.nodes().iter().zip(&y).map(|(r, yv)| z * yv / r).collect();
    let rho: Vec<f64> = phi_sigma.iter().map(|p| (2.0 * p).powf(1.5) / (3.0 * PI * PI)).collect();
    let sigma = RadialDensity::new(grid, rho)?;
    let kin: Vec<f64> = sigma.rho().iter().map(|v| v.powf(5.0 / 3.0)).collect();
    let d_sigma = radial::coulomb_self_energy(&sigma);
    let e_tf = tf_kinetic_constant() * radial::integrate_radial(sigma.grid(), &kin)?
        + radial::nuclear_attraction(&sigma, z)?
        + d_sigma;
    let slope = univ.slope();
    Ok(TFSolution {
        z,
        b,
        x,
        y,
        dy,
        slope,
        sigma,
        phi_sigma,
        d_sigma,
        e_tf,
        e_tf_constant: -e_tf / z.powf(7.0 / 3.0),
        e_tf_slope_constant: -3.0 / 7.0 * slope / b0,
    })
}

impl TFSolution {
    pub fn grid(&self) -> &RadialGrid {
        self.sigma.grid()
    }

    /// `phi_sigma(r)`. Inside the innermost node the nucleus dominates and
    /// `r phi` is interpolated linearly to `Z`; beyond the last node the
    /// `r^{-4}` tail of the neutral atom is continued.
    pub fn potential_at(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::domain("tf_potential_at", format!("r must be > 0, got {r}")));
        }
        let g = self.grid();
        let (r0, r1) = (g.r_min(), g.r_max());
        if r < r0 {
            let rphi0 = r0 * self.phi_sigma[0];
            return Ok((self.z + (rphi0 - self.z) * r / r0) / r);
        }
        if r > r1 {
            let last = *self.phi_sigma.last().expect("non-empty");
            return Ok(last * (r1 / r).powi(4));
        }
        // interpolate r phi = Z y (smooth, bounded by Z) rather than phi itself
        let v = self.z * g.interpolate(&self.y, r).clamp(0.0, 1.0);
        Ok(v / r)
    }
}

pub fn tf_potential_at(sol: &TFSolution, r: f64) -> Result<f64> {
    sol.potential_at(r)
}
