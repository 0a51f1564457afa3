//! Minimizer of the non-relativistic TF-Weizsäcker functional
//! `(beta/2) int |grad sqrt(rho)|^2 + E_TF(rho)` in the variable `u = sqrt(rho)`.
//!
//! The kinetic term uses differences on the staggered (midpoint) grid, which
//! has no odd-even null mode. Descent directions are gradients preconditioned
//! by the local part of the Hessian (kinetic tridiagonal plus diagonal
//! potential terms); the Hartree coupling is left to the line search.

use super::tf::{tf_atom, tf_kinetic_constant, TFSolution};
use crate::error::{Error, Result};
use crate::radial::{self, RadialDensity, RadialGrid};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfwOptions {
    /// Convergence threshold for [`TFWSolution::el_residual`].
    pub tol: f64,
    pub max_iter: usize,
    pub nodes: usize,
    /// Innermost node is `r_min_factor / max(Z, 1)`.
    pub r_min_factor: f64,
    pub r_max: f64,
}

impl Default for TfwOptions {
    fn default() -> Self {
        TfwOptions { tol: 1e-6, max_iter: 3000, nodes: 4000, r_min_factor: 1e-6, r_max: 50.0 }
    }
}

#[derive(Debug, Clone)]
pub struct TFWSolution {
    pub z: f64,
    pub beta: f64,
    pub rho_w: RadialDensity,
    /// Minimal energy, Hartree.
    pub energy: f64,
    /// `max|P^{-1} g| / max|u|` with `g` the discrete gradient and `P` the
    /// local Hessian used as preconditioner: the relative size of the
    /// remaining Newton-like correction.
    pub el_residual: f64,
    pub iterations: usize,
    pub energy_history: Vec<f64>,
}

impl TFWSolution {
    /// Electrons beyond neutrality, `int rho_W - Z`.
    pub fn excess_charge(&self) -> f64 {
        self.rho_w.n_electrons() - self.z
    }
}

struct Problem {
    z: f64,
    beta: f64,
    grid: Arc<RadialGrid>,
    /// `4 pi r^2 w_i`
    vol: Vec<f64>,
    /// staggered stiffness `4 pi r_i r_{i+1} / (r_{i+1} - r_i)`
    stiff: Vec<f64>,
    gamma: f64,
}

struct State {
    u: Vec<f64>,
    phi: Vec<f64>,
    energy: f64,
}

impl Problem {
    fn new(z: f64, beta: f64, grid: Arc<RadialGrid>) -> Self {
        let r = grid.nodes();
        let vol = r.iter().zip(grid.weights()).map(|(r, w)| 4.0 * PI * r * r * w).collect();
        let stiff = r.windows(2).map(|p| 4.0 * PI * p[0] * p[1] / (p[1] - p[0])).collect();
        Problem { z, beta, grid, vol, stiff, gamma: (3.0 * PI * PI).powf(2.0 / 3.0) }
    }

    fn density(&self, u: &[f64]) -> RadialDensity {
        RadialDensity::new(self.grid.clone(), u.iter().map(|v| v * v).collect()).expect("u finite")
    }

    fn state(&self, u: Vec<f64>) -> State {
        let rho = self.density(&u);
        let phi = radial::hartree_potential(&rho);
        let r = self.grid.nodes();
        let mut kin = 0.0;
        for (i, a) in self.stiff.iter().enumerate() {
            kin += a * (u[i + 1] - u[i]).powi(2);
        }
        let mut local = 0.0;
        let mut hartree = 0.0;
        let c_tf = tf_kinetic_constant();
        for i in 0..u.len() {
            let rho_i = u[i] * u[i];
            local += self.vol[i] * (c_tf * rho_i.powf(5.0 / 3.0) - self.z * rho_i / r[i]);
            hartree += self.vol[i] * rho_i * phi[i];
        }
        let energy = 0.5 * self.beta * kin + local + 0.5 * hartree;
        State { u, phi, energy }
    }

    fn gradient(&self, s: &State) -> Vec<f64> {
        let u = &s.u;
        let r = self.grid.nodes();
        let n = u.len();
        let mut g: Vec<f64> = (0..n)
            .map(|i| {
                self.vol[i] * (self.gamma * u[i].abs().powf(4.0 / 3.0) * u[i] - 2.0 * self.z * u[i] / r[i] + 2.0 * s.phi[i] * u[i])
            })
            .collect();
        for (i, a) in self.stiff.iter().enumerate() {
            let d = self.beta * a * (u[i + 1] - u[i]);
            g[i] -= d;
            g[i + 1] += d;
        }
        g
    }

    /// Solves `(beta K + diag(vol (v + shift))) x = b` with
    /// `v = (7/3) gamma u^{4/3} + 2 Phi - 2Z/r`; `None` if not positive definite.
    fn precondition(&self, s: &State, shift: f64, b: &[f64]) -> Option<Vec<f64>> {
        let n = b.len();
        let r = self.grid.nodes();
        let mut diag: Vec<f64> = (0..n)
            .map(|i| {
                let v = 7.0 / 3.0 * self.gamma * s.u[i].abs().powf(4.0 / 3.0) + 2.0 * s.phi[i] - 2.0 * self.z / r[i];
                self.vol[i] * (v + shift)
            })
            .collect();
        for (i, a) in self.stiff.iter().enumerate() {
            diag[i] += self.beta * a;
            diag[i + 1] += self.beta * a;
        }
        // LDL^T of the symmetric tridiagonal matrix
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n];
        d[0] = diag[0];
        if !(d[0] > 0.0) {
            return None;
        }
        for i in 1..n {
            let off = -self.beta * self.stiff[i - 1];
            l[i] = off / d[i - 1];
            d[i] = diag[i] - l[i] * off;
            if !(d[i] > 0.0 && d[i].is_finite()) {
                return None;
            }
        }
        let mut x = b.to_vec();
        for i in 1..n {
            x[i] -= l[i] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= l[i + 1] * x[i + 1];
        }
        Some(x)
    }
}

/// Minimizes the TFW functional for nuclear charge `z` with Weizsäcker weight
/// `beta` on the default radial grid.
pub fn solve_tfw(z: f64, beta: f64) -> Result<TFWSolution> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain("solve_tfw", format!("Z must be > 0, got {z}")));
    }
    let tf = tf_atom(z)?;
    solve_tfw_with(&tf, beta, TfwOptions::default())
}

/// As [`solve_tfw`], starting from a given TF atom.
pub fn solve_tfw_with(tf: &TFSolution, beta: f64, opts: TfwOptions) -> Result<TFWSolution> {
    let z = tf.z;
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain("solve_tfw", format!("beta must be > 0, got {beta}")));
    }
    let grid = Arc::new(RadialGrid::log_spaced(opts.r_min_factor / z.max(1.0), opts.r_max, opts.nodes)?);
    let r_cap = 1.0 / z;
    let mut u0 = Vec::with_capacity(grid.len());
    for &r in grid.nodes() {
        let phi = tf.potential_at(r.max(r_cap))?;
        u0.push(((2.0 * phi).powf(1.5) / (3.0 * PI * PI)).sqrt());
    }
    minimize(Problem::new(z, beta, grid), u0, opts)
}

fn minimize(p: Problem, u0: Vec<f64>, opts: TfwOptions) -> Result<TFWSolution> {
    let mut s = p.state(u0);
    let mut history = vec![s.energy];
    let mut shift = 0.0;
    let scale = p.z * p.z;
    let mut residual = f64::INFINITY;
    for it in 0..opts.max_iter {
        let g = p.gradient(&s);
        let mut dir = None;
        for _ in 0..60 {
            if let Some(x) = p.precondition(&s, shift, &g) {
                let slope: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
                if slope > 0.0 {
                    dir = Some((x, slope));
                    break;
                }
            }
            shift = if shift == 0.0 { 1e-3 * scale } else { 4.0 * shift };
        }
        let (x, slope) = dir.ok_or_else(|| Error::solver("solve_tfw", "preconditioner is not positive definite"))?;
        let u_max = s.u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        residual = x.iter().fold(0.0f64, |m, v| m.max(v.abs())) / u_max;
        if residual < opts.tol {
            return Ok(finish(&p, s, residual, it, history));
        }
        // Armijo backtracking along -x
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<f64> = s.u.iter().zip(&x).map(|(u, d)| (u - alpha * d).abs()).collect();
            let t = p.state(trial);
            if t.energy <= s.energy - 1e-4 * alpha * slope {
                accepted = Some(t);
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some(t) => {
                history.push(t.energy);
                s = t;
                // relax the shift after full steps
                if alpha == 1.0 {
                    shift *= 0.25;
                    if shift < 1e-6 * scale {
                        shift = 0.0;
                    }
                }
            }
            None => {
                return Err(Error::solver(
                    "solve_tfw",
                    format!(
                        "line search failed at iteration {it}, residual {residual:e}; energy history tail {:?}",
                        &history[history.len().saturating_sub(5)..]
                    ),
                ));
            }
        }
    }
    Err(Error::solver(
        "solve_tfw",
        format!(
            "no convergence in {} iterations, residual {residual:e}; energy history tail {:?}",
            opts.max_iter,
            &history[history.len().saturating_sub(5)..]
        ),
    ))
}

fn finish(p: &Problem, s: State, residual: f64, iterations: usize, history: Vec<f64>) -> TFWSolution {
    TFWSolution {
        z: p.z,
        beta: p.beta,
        rho_w: p.density(&s.u),
        energy: s.energy,
        el_residual: residual,
        iterations,
        energy_history: history,
    }
}

/// The TFW functional evaluated on a density, with the gradient term from
/// finite differences of `sqrt(rho)` (independent of the minimizer's
/// staggered discretization).
pub fn tfw_functional(rho: &RadialDensity, z: f64, beta: f64) -> Result<f64> {
    let g = rho.grid();
    let u: Vec<f64> = rho.rho().iter().map(|v| v.sqrt()).collect();
    let du = radial::radial_gradient(g, &u)?;
    let grad2: Vec<f64> = du.iter().map(|d| d * d).collect();
    Ok(0.5 * beta * radial::integrate_radial(g, &grad2)? + super::tf::tf_functional(rho, z)?)
}
