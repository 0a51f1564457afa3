//! Upper and lower bounds on the TFWD ground-state energy of a heavy atom at
//! fixed `kappa = Z/c`.
//!
//! Upper bound: the TFWD functional at the TFW minimizer `rho_W`. Lower bound:
//! the toothless relativistic phase-space energy of the TF potential minus
//! `D[sigma]`, the Coulomb tooth `|x| < 1/Z` and the linear exchange term.

use crate::edf::{self, AtomicSystem, EnergyBreakdown, DEFAULT_LAMBDA};
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::radial::{integrate_radial, RadialGrid};
use crate::semiclassic::{self, TFSolution, TFWSolution, TfGridSpec, TfwOptions};
use crate::specfun::{self, raw};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KineticKind {
    /// `T(xi) = xi^2/2`
    NonRelativistic,
    /// `T(xi) = sqrt(c^2 xi^2 + c^4) - c^2`
    Relativistic { c: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseSpaceSpec<'a> {
    pub kinetic: KineticKind,
    /// Points with `|x| < r_cut` are excluded.
    pub r_cut: f64,
    pub tf: &'a TFSolution,
}

/// `2 int dxi/(2 pi)^3 (T(xi) - phi)_-`, the minimal phase-space energy per
/// unit volume at potential `phi` (occupation 2 below the Fermi surface).
pub fn phase_space_density(kind: KineticKind, phi: f64) -> f64 {
    if phi <= 0.0 {
        return 0.0;
    }
    match kind {
        KineticKind::NonRelativistic => -(2.0 * phi).powf(2.5) / (15.0 * PI * PI),
        KineticKind::Relativistic { c } => {
            let t = fermi_t(phi, c);
            c.powi(5) / (8.0 * PI * PI) * raw::tf(t) - phi * (c * t).powi(3) / (3.0 * PI * PI)
        }
    }
}

/// `p_F / c` with `sqrt(c^2 p^2 + c^4) - c^2 = phi`.
fn fermi_t(phi: f64, c: f64) -> f64 {
    let e = phi / (c * c);
    (e * (e + 2.0)).sqrt()
}

/// [`phase_space_density`] by direct quadrature over `|xi|`, for checking the
/// closed forms.
pub fn phase_space_density_quadrature(kind: KineticKind, phi: f64) -> Result<f64> {
    if phi <= 0.0 {
        return Ok(0.0);
    }
    let (p_f, t): (f64, Box<dyn Fn(f64) -> f64>) = match kind {
        KineticKind::NonRelativistic => ((2.0 * phi).sqrt(), Box::new(|xi: f64| 0.5 * xi * xi)),
        KineticKind::Relativistic { c } => {
            let c2 = c * c;
            (c * fermi_t(phi, c), Box::new(move |xi: f64| c2 * xi * xi / ((c2 * xi * xi + c2 * c2).sqrt() + c2)))
        }
    };
    let v = quad::integrate(
        |xi| xi * xi * (t(xi) - phi),
        0.0,
        p_f,
        QuadOptions { rel_tol: 1e-14, ..Default::default() },
    )?;
    // 2 * 4 pi / (2 pi)^3
    Ok(v / (PI * PI))
}

/// Nodes of the TF grid restricted to `r >= r_cut`, with `r_cut` itself as the
/// first node (unless it lies inside the grid's first interval).
fn cut_grid(tf: &TFSolution, r_cut: f64) -> Result<(RadialGrid, Vec<f64>)> {
    let g = tf.grid();
    let nodes = g.nodes();
    if r_cut <= nodes[0] {
        return Ok((g.clone(), tf.phi_sigma.clone()));
    }
    if r_cut >= g.r_max() {
        return Err(Error::domain("phase_space_energy", format!("r_cut = {r_cut} beyond the grid")));
    }
    let i = nodes.partition_point(|&r| r <= r_cut);
    let h = (nodes[i] / nodes[i - 1]).ln();
    // skip a node that would make the first interval degenerate
    let skip = usize::from((nodes[i] / r_cut).ln() < 0.3 * h && i + 1 < nodes.len());
    let mut r = vec![r_cut];
    let mut phi = vec![tf.potential_at(r_cut)?];
    r.extend_from_slice(&nodes[i + skip..]);
    phi.extend_from_slice(&tf.phi_sigma[i + skip..]);
    Ok((RadialGrid::from_nodes(r)?, phi))
}

/// `2 int_{|x| > r_cut} dx int dxi/(2 pi)^3 (T(xi) - phi_sigma(x))_-`.
///
/// The radial integral uses the TF grid's high-order rule. With `r_cut` inside
/// the first node the non-relativistic integral is closed analytically with
/// `phi = Z/r`; the relativistic one diverges at the nucleus and needs
/// `r_cut > 0`.
pub fn phase_space_energy(spec: &PhaseSpaceSpec) -> Result<f64> {
    if !(spec.r_cut >= 0.0) {
        return Err(Error::domain("phase_space_energy", format!("r_cut must be >= 0, got {}", spec.r_cut)));
    }
    let r0 = spec.tf.grid().r_min();
    let mut inner = 0.0;
    match spec.kinetic {
        KineticKind::Relativistic { c } => {
            if !(c > 0.0) {
                return Err(Error::domain("phase_space_energy", format!("c must be > 0, got {c}")));
            }
            if spec.r_cut < r0 {
                return Err(Error::domain(
                    "phase_space_energy",
                    "relativistic phase-space energy diverges at the nucleus; use r_cut > 0",
                ));
            }
        }
        KineticKind::NonRelativistic => {
            if spec.r_cut < r0 {
                // int_{r_cut}^{r0} 4 pi r^2 (-(2Z/r)^{5/2}/(15 pi^2)) dr
                let z = spec.tf.z;
                inner = -4.0 * PI * (2.0 * z).powf(2.5) / (15.0 * PI * PI) * 2.0 * (r0.sqrt() - spec.r_cut.sqrt());
            }
        }
    }
    let (grid, phi) = cut_grid(spec.tf, spec.r_cut)?;
    let v: Vec<f64> = phi.iter().map(|p| phase_space_density(spec.kinetic, *p)).collect();
    Ok(inner + integrate_radial(&grid, &v)?)
}

/// Non-relativistic minus relativistic toothless phase-space energy, over
/// `|x| > 1/Z`, for `c = Z/kappa`. Summed pointwise so that no cancellation
/// between the two totals occurs.
pub fn lemma_l_gap(tf: &TFSolution, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::domain("lemma_l_gap", format!("kappa must be > 0, got {kappa}")));
    }
    let c = tf.z / kappa;
    let (grid, phi) = cut_grid(tf, 1.0 / tf.z)?;
    let v: Vec<f64> = phi
        .iter()
        .map(|p| {
            phase_space_density(KineticKind::NonRelativistic, *p)
                - phase_space_density(KineticKind::Relativistic { c }, *p)
        })
        .collect();
    integrate_radial(&grid, &v)
}

/// Constant `3^{5/3} / (2^7 pi^{2/3})` of the Hardy lower bound on W.
fn hardy_constant() -> f64 {
    3f64.powf(5.0 / 3.0) / (128.0 * PI.powf(2.0 / 3.0))
}

/// `ln` of both sides of the complete-square condition at `s = e^l`:
/// `sqrt(A 3 tf(s)(3 pi^2)^{1/3}/(8 s^4))` and `kappa/(sqrt(lambda) 2 sqrt(arsinh s))`.
fn s0_log_sides(l: f64, kappa: f64, lambda: f64) -> (f64, f64) {
    let delta = (3.0 * PI * PI).cbrt();
    let (tf_over_s4, arsinh) = if l > 40.0 {
        // tf(s)/s^4 = 2 - 8/(3s) + ... is 2 to double precision here
        (2.0, std::f64::consts::LN_2 + l)
    } else {
        let s = l.exp();
        (raw::tf(s) / s.powi(4), specfun::arsinh(s))
    };
    let lhs = 0.5 * (hardy_constant() * 3.0 * tf_over_s4 * delta / 8.0).ln();
    let rhs = (kappa / (2.0 * lambda.sqrt())).ln() - 0.5 * arsinh.ln();
    (lhs, rhs)
}

/// Both sides of the complete-square condition at `s` (for residual checks).
pub fn s0_equation_sides(s: f64, kappa: f64, lambda: f64) -> (f64, f64) {
    let (a, b) = s0_log_sides(s.ln(), kappa, lambda);
    (a.exp(), b.exp())
}

/// `ln lhs - ln rhs` of the complete-square condition at `s = e^{ln_s}`, i.e. the
/// relative residual; usable where `s` overflows.
pub fn s0_log_residual(ln_s: f64, kappa: f64, lambda: f64) -> f64 {
    let (a, b) = s0_log_sides(ln_s, kappa, lambda);
    a - b
}

/// `ln s_0`; finite even where `s_0` itself overflows.
pub fn solve_ln_s0(kappa: f64, lambda: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::domain("solve_s0", format!("kappa must be > 0, got {kappa}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("solve_s0", format!("lambda must be > 0, got {lambda}")));
    }
    let h = |l: f64| {
        let (a, b) = s0_log_sides(l, kappa, lambda);
        a - b
    };
    let (mut lo, mut hi) = (-60.0, 60.0);
    while h(lo) > 0.0 {
        lo *= 2.0;
        if lo < -1e4 {
            return Err(Error::solver("solve_s0", "no sign change below"));
        }
    }
    while h(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::solver("solve_s0", "no sign change above"));
        }
    }
    quad::bisect(h, lo, hi, 0.0)
}

/// The splitting parameter `s_0(kappa)` making the Hardy, TF and Coulomb terms
/// a complete square.
pub fn solve_s0(kappa: f64, lambda: f64) -> Result<f64> {
    Ok(solve_ln_s0(kappa, lambda)?.exp())
}

/// Magnitude of the explicit tooth estimate: on `|x| < 1/Z` with `p/c < s_0`,
/// `I >= -int_{|x|<1/Z} (Z/|x|)(c s_0)^3/(3 pi^2) = -2 c^3 s_0^3/(3 pi Z)`.
pub fn tooth_term(z: f64, kappa: f64, ln_s0: f64) -> f64 {
    let c = z / kappa;
    // evaluated in logs: s_0^3 overflows for kappa beyond ~2.5 at lambda = 1/9
    (3.0 * (c.ln() + ln_s0) + (2.0 / (3.0 * PI * z)).ln()).exp()
}

/// The tooth estimate by radial quadrature of its integrand.
pub fn tooth_term_quadrature(z: f64, kappa: f64, s0: f64) -> Result<f64> {
    let c = z / kappa;
    let rho_cap = (c * s0).powi(3) / (3.0 * PI * PI);
    quad::integrate(|r| 4.0 * PI * r * r * (z / r) * rho_cap, 0.0, 1.0 / z, QuadOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeAudit {
    /// `-X(rho_W)`
    pub minus_x: f64,
    /// `(3 pi^2)^{4/3}/(8 pi^3) int rho_W^{4/3}`, from `-X(t) <= t^4`.
    pub dirac_bound: f64,
    /// `C (int rho_W^{5/3} int rho_W)^{1/2}` with `C = (3 pi^2)^{4/3}/(8 pi^3)` (Hölder).
    pub holder_bound: f64,
    pub holder_constant: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub energy: EnergyBreakdown,
    /// Non-relativistic TFW functional at `rho_W` (same gradient discretization as `energy.W`).
    pub tfw_energy: f64,
    /// Minimum found by the TFW solver (staggered discretization).
    pub tfw_minimum: f64,
    pub beta: f64,
    pub exchange: ExchangeAudit,
    pub excess_charge: f64,
    pub tfw_residual: f64,
}

impl UpperBound {
    pub fn value(&self) -> f64 {
        self.energy.total
    }

    /// `E^nrTFW(rho_W) + (3 pi^2)^{4/3}/(8 pi^3) int rho_W^{4/3}`, which dominates
    /// the TFWD value by the pointwise bounds on `f^2`, `tf` and `X`.
    pub fn comparison_bound(&self) -> f64 {
        self.tfw_energy + self.exchange.dirac_bound
    }
}

/// TFWD at the TFW minimizer.
pub fn upper_bound_with(tfw: &TFWSolution, sys: &AtomicSystem) -> Result<UpperBound> {
    let rho = &tfw.rho_w;
    let energy = edf::total_energy_atomic(rho, sys)?;
    let holder_constant = (3.0 * PI * PI).powf(4.0 / 3.0) / (8.0 * PI.powi(3));
    let dirac_bound = holder_constant * edf::density_power_integral(rho, 4.0 / 3.0)?;
    let holder_bound = holder_constant * (edf::density_power_integral(rho, 5.0 / 3.0)? * rho.n_electrons()).sqrt();
    let minus_x = -energy.x;
    Ok(UpperBound {
        energy,
        tfw_energy: semiclassic::tfw_functional(rho, sys.z, tfw.beta)?,
        tfw_minimum: tfw.energy,
        beta: tfw.beta,
        exchange: ExchangeAudit {
            minus_x,
            dirac_bound,
            holder_bound,
            holder_constant,
            holds: minus_x <= dirac_bound && dirac_bound <= holder_bound * (1.0 + 1e-12),
        },
        excess_charge: tfw.excess_charge(),
        tfw_residual: tfw.el_residual,
    })
}

pub fn upper_bound(z: f64, kappa: f64) -> Result<UpperBound> {
    let opts = BoundsOptions::default();
    let sys = AtomicSystem::with_kappa(z, kappa, opts.lambda)?;
    let tf = semiclassic::tf_atom(z)?;
    let tfw = semiclassic::solve_tfw_with(&tf, opts.beta, opts.tfw)?;
    upper_bound_with(&tfw, &sys)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// `2 int_{|x|>=1/Z} int dxi/(2 pi)^3 (sqrt(c^2 xi^2 + c^4) - c^2 - phi_sigma)_-`
    pub toothless_rel: f64,
    pub d_sigma: f64,
    /// `2 c^3 s_0^3 / (3 pi Z)`, subtracted.
    pub tooth: f64,
    /// `(3/2) eta c N_ref`, subtracted.
    pub exchange_linear: f64,
    /// Particle number used in the exchange term (the atom is not constrained
    /// to a fixed `N`; we take `N = Z`).
    pub n_ref: f64,
    pub s0: f64,
    pub ln_s0: f64,
    pub total: f64,
}

pub fn lower_bound_with(tf: &TFSolution, sys: &AtomicSystem) -> Result<LowerBound> {
    let z = sys.z;
    let kappa = sys.kappa();
    let ln_s0 = solve_ln_s0(kappa, sys.lambda)?;
    let toothless_rel = phase_space_energy(&PhaseSpaceSpec {
        kinetic: KineticKind::Relativistic { c: sys.c },
        r_cut: 1.0 / z,
        tf,
    })?;
    let tooth = tooth_term(z, kappa, ln_s0);
    let n_ref = z;
    let exchange_linear = specfun::exchange_particle_coefficient() * sys.c * n_ref;
    Ok(LowerBound {
        toothless_rel,
        d_sigma: tf.d_sigma,
        tooth,
        exchange_linear,
        n_ref,
        s0: ln_s0.exp(),
        ln_s0,
        total: toothless_rel - tf.d_sigma - tooth - exchange_linear,
    })
}

pub fn lower_bound(z: f64, kappa: f64) -> Result<LowerBound> {
    let sys = AtomicSystem::with_kappa(z, kappa, DEFAULT_LAMBDA)?;
    lower_bound_with(&semiclassic::tf_atom(z)?, &sys)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsOptions {
    pub lambda: f64,
    pub beta: f64,
    pub tfw: TfwOptions,
    pub tf_grid: TfGridSpec,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        BoundsOptions { lambda: DEFAULT_LAMBDA, beta: 2.0, tfw: TfwOptions::default(), tf_grid: TfGridSpec::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    #[serde(rename = "Z")]
    pub z: f64,
    pub kappa: f64,
    pub c: f64,
    pub upper: f64,
    pub lower: f64,
    #[serde(rename = "E_TF")]
    pub e_tf: f64,
    pub upper_gap_over_z2: f64,
    pub lower_gap_over_z2: f64,
    pub s0: f64,
    pub lemma_l_gap: f64,
    pub upper_detail: UpperBound,
    pub lower_detail: LowerBound,
}

/// Upper and lower bound for one `(Z, kappa)`.
pub fn bounds_report(z: f64, kappa: f64, opts: &BoundsOptions) -> Result<BoundsReport> {
    let sys = AtomicSystem::with_kappa(z, kappa, opts.lambda)?;
    let tf = semiclassic::tf_atom_with(z, semiclassic::universal()?, opts.tf_grid)?;
    let tfw = semiclassic::solve_tfw_with(&tf, opts.beta, opts.tfw)?;
    let up = upper_bound_with(&tfw, &sys)?;
    let lo = lower_bound_with(&tf, &sys)?;
    let z2 = z * z;
    Ok(BoundsReport {
        z,
        kappa,
        c: sys.c,
        upper: up.value(),
        lower: lo.total,
        e_tf: tf.e_tf,
        upper_gap_over_z2: (up.value() - tf.e_tf) / z2,
        lower_gap_over_z2: (tf.e_tf - lo.total) / z2,
        s0: lo.s0,
        lemma_l_gap: lemma_l_gap(&tf, kappa)?,
        upper_detail: up,
        lower_detail: lo,
    })
}

#[derive(Debug, Clone)]
pub struct SweepItem {
    pub z: f64,
    pub report: Result<BoundsReport>,
}

/// One report per `Z`; failures are kept in place and do not stop the sweep.
pub fn asymptotics_sweep(kappa: f64, z_list: &[f64], opts: &BoundsOptions) -> Result<Vec<SweepItem>> {
    validate_z_list(z_list)?;
    Ok(z_list.iter().map(|&z| SweepItem { z, report: bounds_report(z, kappa, opts) }).collect())
}

pub fn validate_z_list(z_list: &[f64]) -> Result<()> {
    if z_list.is_empty() {
        return Err(Error::Structural("empty Z list".into()));
    }
    if z_list.windows(2).any(|w| w[1] <= w[0]) || z_list.iter().any(|z| !(*z > 0.0)) {
        return Err(Error::Structural("Z list must be positive and strictly increasing".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    /// Least-squares slope of `ln(-upper)` against `ln Z`.
    pub loglog_slope: f64,
    pub upper_gap_min: f64,
    pub upper_gap_max: f64,
    pub upper_gap_ratio: f64,
    pub lower_gap_min: f64,
    pub lower_gap_max: f64,
    pub lower_gap_ratio: f64,
    pub lower_le_upper: bool,
    pub n: usize,
}

/// Least-squares line `y = a + b x`; returns `(a, b, R^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let b = sxy / sxx;
    (my - b * mx, b, sxy * sxy / (sxx * syy))
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)))
}

/// Fit over the successful reports. The gap ratios compare magnitudes
/// (`max|g| / min|g|`), infinite if a gap changes sign.
pub fn summarize(reports: &[BoundsReport]) -> Option<SweepSummary> {
    if reports.len() < 2 {
        return None;
    }
    let lz: Vec<f64> = reports.iter().map(|r| r.z.ln()).collect();
    let le: Vec<f64> = reports.iter().map(|r| (-r.upper).ln()).collect();
    let (_, slope, _) = linear_fit(&lz, &le);
    let ratio = |g: &[f64]| {
        let (lo, hi) = min_max(g);
        if lo * hi <= 0.0 {
            f64::INFINITY
        } else {
            hi.abs().max(lo.abs()) / hi.abs().min(lo.abs())
        }
    };
    let ug: Vec<f64> = reports.iter().map(|r| r.upper_gap_over_z2).collect();
    let lg: Vec<f64> = reports.iter().map(|r| r.lower_gap_over_z2).collect();
    let (umin, umax) = min_max(&ug);
    let (lmin, lmax) = min_max(&lg);
    Some(SweepSummary {
        loglog_slope: slope,
        upper_gap_min: umin,
        upper_gap_max: umax,
        upper_gap_ratio: ratio(&ug),
        lower_gap_min: lmin,
        lower_gap_max: lmax,
        lower_gap_ratio: ratio(&lg),
        lower_le_upper: reports.iter().all(|r| r.lower <= r.upper),
        n: reports.len(),
    })
}
