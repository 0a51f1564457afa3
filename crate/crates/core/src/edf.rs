//! The relativistic TFWD energy `W + TF - X + V` on radial densities, for
//! single atoms and for molecules built from spherical parts.

use crate::error::{Error, Result};
use crate::radial::{self, RadialDensity, RadialGrid};
use crate::specfun::raw;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Speed of light in Hartree units.
pub const PHYSICAL_C: f64 = 137.037;
/// Gradient-expansion value of the Weizsäcker coefficient.
pub const DEFAULT_LAMBDA: f64 = 1.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicSystem {
    pub z: f64,
    pub c: f64,
    pub lambda: f64,
}

fn check_params(op: &'static str, c: f64, lambda: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain(op, format!("c must be > 0, got {c}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(op, format!("lambda must be > 0, got {lambda}")));
    }
    Ok(())
}

impl AtomicSystem {
    pub fn new(z: f64, c: f64, lambda: f64) -> Result<Self> {
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::domain("AtomicSystem", format!("Z must be >= 0, got {z}")));
        }
        check_params("AtomicSystem", c, lambda)?;
        Ok(AtomicSystem { z, c, lambda })
    }

    /// Physical speed of light and `lambda = 1/9`.
    pub fn physical(z: f64) -> Result<Self> {
        Self::new(z, PHYSICAL_C, DEFAULT_LAMBDA)
    }

    /// `c = Z/kappa`.
    pub fn with_kappa(z: f64, kappa: f64, lambda: f64) -> Result<Self> {
        if !(kappa > 0.0 && z > 0.0) {
            return Err(Error::domain("AtomicSystem::with_kappa", format!("need Z > 0 and kappa > 0, got {z}, {kappa}")));
        }
        Self::new(z, z / kappa, lambda)
    }

    pub fn kappa(&self) -> f64 {
        self.z / self.c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularSystem {
    pub centers: Vec<[f64; 3]>,
    pub charges: Vec<f64>,
    pub c: f64,
    pub lambda: f64,
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub(crate) fn validate_nuclei(centers: &[[f64; 3]], charges: &[f64]) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::Structural("no nuclei".into()));
    }
    if centers.len() != charges.len() {
        return Err(Error::Structural(format!("{} centers but {} charges", centers.len(), charges.len())));
    }
    if let Some(z) = charges.iter().find(|z| !(**z >= 0.0 && z.is_finite())) {
        return Err(Error::Structural(format!("nuclear charges must be >= 0, got {z}")));
    }
    if centers.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Structural("nuclear positions must be finite".into()));
    }
    for k in 0..centers.len() {
        for l in k + 1..centers.len() {
            if distance(&centers[k], &centers[l]) <= 0.0 {
                return Err(Error::Structural(format!("nuclei {k} and {l} coincide")));
            }
        }
    }
    Ok(())
}

impl MolecularSystem {
    pub fn new(centers: Vec<[f64; 3]>, charges: Vec<f64>, c: f64, lambda: f64) -> Result<Self> {
        validate_nuclei(&centers, &charges)?;
        check_params("MolecularSystem", c, lambda)?;
        Ok(MolecularSystem { centers, charges, c, lambda })
    }

    /// `sum_{k<l} Z_k Z_l / |R_k - R_l|`.
    pub fn nuclear_repulsion(&self) -> f64 {
        let mut u = 0.0;
        for k in 0..self.centers.len() {
            for l in k + 1..self.centers.len() {
                u += self.charges[k] * self.charges[l] / distance(&self.centers[k], &self.centers[l]);
            }
        }
        u
    }
}

/// Energy terms in Hartree; `N` in electrons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "TF")]
    pub tf: f64,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "V_ne")]
    pub v_ne: f64,
    #[serde(rename = "D_ee")]
    pub d_ee: f64,
    #[serde(rename = "U_nn")]
    pub u_nn: f64,
    pub total: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl EnergyBreakdown {
    fn assemble(w: f64, tf: f64, x: f64, v_ne: f64, d_ee: f64, u_nn: f64, n: f64) -> Self {
        EnergyBreakdown { w, tf, x, v_ne, d_ee, u_nn, total: w + tf - x + v_ne + d_ee + u_nn, n }
    }
}

fn momenta(rho: &RadialDensity) -> Vec<f64> {
    rho.rho().iter().map(|&v| radial::fermi_momentum(v)).collect()
}

/// Per-node Weizsäcker integrand `(3 lambda/8 pi^2)(p')^2 c f(p/c)^2`.
pub fn weizsacker_density(rho: &RadialDensity, c: f64, lambda: f64) -> Result<Vec<f64>> {
    let p = momenta(rho);
    let dp = radial::radial_gradient(rho.grid(), &p)?;
    Ok(p.iter()
        .zip(&dp)
        .map(|(p, d)| if *p == 0.0 { 0.0 } else { 3.0 * lambda / (8.0 * PI * PI) * d * d * c * raw::f_sq(p / c) })
        .collect())
}

pub fn weizsacker_energy(rho: &RadialDensity, sys: &AtomicSystem) -> Result<f64> {
    radial::integrate_radial(rho.grid(), &weizsacker_density(rho, sys.c, sys.lambda)?)
}

pub fn tf_energy(rho: &RadialDensity, sys: &AtomicSystem) -> Result<f64> {
    let c = sys.c;
    let pref = c.powi(5) / (8.0 * PI * PI);
    let v: Vec<f64> = momenta(rho).iter().map(|p| pref * raw::tf(p / c)).collect();
    radial::integrate_radial(rho.grid(), &v)
}

pub fn exchange_energy(rho: &RadialDensity, sys: &AtomicSystem) -> Result<f64> {
    let c = sys.c;
    let pref = c.powi(4) / (8.0 * PI.powi(3));
    let v: Vec<f64> = momenta(rho).iter().map(|p| pref * raw::x(p / c)).collect();
    radial::integrate_radial(rho.grid(), &v)
}

/// `int |grad sqrt(rho)|^2`.
pub fn gradient_sqrt_norm(rho: &RadialDensity) -> Result<f64> {
    radial::integrate_radial(rho.grid(), &gradient_sqrt_density(rho)?)
}

/// Per-node `|d sqrt(rho)/dr|^2`.
pub fn gradient_sqrt_density(rho: &RadialDensity) -> Result<Vec<f64>> {
    let u: Vec<f64> = rho.rho().iter().map(|v| v.sqrt()).collect();
    Ok(radial::radial_gradient(rho.grid(), &u)?.iter().map(|d| d * d).collect())
}

/// `int rho^q`.
pub fn density_power_integral(rho: &RadialDensity, q: f64) -> Result<f64> {
    let v: Vec<f64> = rho.rho().iter().map(|r| r.powf(q)).collect();
    radial::integrate_radial(rho.grid(), &v)
}

/// Non-relativistic TF kinetic energy `(3/10)(3 pi^2)^{2/3} int rho^{5/3}`.
pub fn tf_energy_nonrel(rho: &RadialDensity) -> Result<f64> {
    Ok(0.3 * (3.0 * PI * PI).powf(2.0 / 3.0) * density_power_integral(rho, 5.0 / 3.0)?)
}

/// Dirac exchange `(3/4)(3/pi)^{1/3} int rho^{4/3}`.
pub fn dirac_exchange(rho: &RadialDensity) -> Result<f64> {
    Ok(0.75 * (3.0 / PI).cbrt() * density_power_integral(rho, 4.0 / 3.0)?)
}

/// Discrete version of the functional's domain: `int rho^{4/3}`, `D[rho]` and
/// `int |(F o p)'|^2` must be finite.
pub fn domain_check(rho: &RadialDensity, sys: &AtomicSystem) -> Result<()> {
    let l43 = density_power_integral(rho, 4.0 / 3.0)?;
    if !l43.is_finite() {
        return Err(Error::InvalidDensity { condition: "rho in L^{4/3}", detail: format!("int rho^(4/3) = {l43}") });
    }
    let d = radial::coulomb_self_energy(rho);
    if !d.is_finite() {
        return Err(Error::InvalidDensity { condition: "D[rho] < inf", detail: format!("D[rho] = {d}") });
    }
    let c = sys.c;
    let fp: Vec<f64> = momenta(rho)
        .iter()
        .map(|p| crate::specfun::f_int(p / c).map(|v| c * v))
        .collect::<Result<_>>()?;
    let dfp = radial::radial_gradient(rho.grid(), &fp)?;
    let g2: Vec<f64> = dfp.iter().map(|d| d * d).collect();
    let h = radial::integrate_radial(rho.grid(), &g2)?;
    if !h.is_finite() {
        return Err(Error::InvalidDensity { condition: "F o p in D^1", detail: format!("int |(F o p)'|^2 = {h}") });
    }
    Ok(())
}

pub fn total_energy_atomic(rho: &RadialDensity, sys: &AtomicSystem) -> Result<EnergyBreakdown> {
    domain_check(rho, sys)?;
    Ok(EnergyBreakdown::assemble(
        weizsacker_energy(rho, sys)?,
        tf_energy(rho, sys)?,
        exchange_energy(rho, sys)?,
        radial::nuclear_attraction(rho, sys.z)?,
        radial::coulomb_self_energy(rho),
        0.0,
        rho.n_electrons(),
    ))
}

/// Hartree data of one spherical part needed for off-center interactions.
struct PartField<'a> {
    grid: &'a RadialGrid,
    n: f64,
    phi: Vec<f64>,
    /// `G(s) = int_0^s t Phi(t) dt` at the nodes.
    g: Vec<f64>,
}

impl<'a> PartField<'a> {
    fn new(rho: &'a RadialDensity) -> Result<Self> {
        let grid = rho.grid();
        let phi = radial::hartree_potential(rho);
        let sp: Vec<f64> = grid.nodes().iter().zip(&phi).map(|(r, p)| r * p).collect();
        let g0 = 0.5 * phi[0] * grid.r_min() * grid.r_min();
        let g = grid.cumulative_dr(&sp)?.into_iter().map(|v| v + g0).collect();
        Ok(PartField { grid, n: rho.n_electrons(), phi, g })
    }

    /// Spherical average of the part's potential over a sphere of radius `s`
    /// about its center, i.e. `Phi(s)`.
    fn potential(&self, s: f64) -> f64 {
        if s >= self.grid.r_max() {
            self.n / s
        } else {
            self.grid.interpolate(&self.phi, s)
        }
    }

    fn big_g(&self, s: f64) -> f64 {
        let (r0, r1) = (self.grid.r_min(), self.grid.r_max());
        if s <= r0 {
            0.5 * self.phi[0] * s * s
        } else if s >= r1 {
            self.g[self.g.len() - 1] + self.n * (s - r1)
        } else {
            self.grid.interpolate(&self.g, s)
        }
    }

    /// Average of `Phi(|x - R|)` over the sphere `|x| = a` with `|R| = d > 0`.
    fn shell_average(&self, a: f64, d: f64) -> f64 {
        if a < 1e-5 * d {
            return self.potential(d);
        }
        (self.big_g(d + a) - self.big_g((d - a).abs())) / (2.0 * a * d)
    }
}

/// TFWD energy of `parts[k]` (a spherical density centred at `sys.centers[k]`).
///
/// W, TF and X are summed part by part, which is exact when the parts have
/// disjoint supports. The Coulomb terms are exact for arbitrary overlap.
pub fn total_energy_molecular(parts: &[RadialDensity], sys: &MolecularSystem) -> Result<EnergyBreakdown> {
    let u_nn = sys.nuclear_repulsion();
    if parts.is_empty() {
        return Ok(EnergyBreakdown::assemble(0.0, 0.0, 0.0, 0.0, 0.0, u_nn, 0.0));
    }
    if parts.len() != sys.centers.len() {
        return Err(Error::Structural(format!(
            "{} density parts for {} centers",
            parts.len(),
            sys.centers.len()
        )));
    }
    let (mut w, mut tf, mut x, mut n, mut d_ee, mut v_ne) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let mut fields = Vec::with_capacity(parts.len());
    for p in parts {
        let atom = AtomicSystem::new(0.0, sys.c, sys.lambda)?;
        domain_check(p, &atom)?;
        w += weizsacker_energy(p, &atom)?;
        tf += tf_energy(p, &atom)?;
        x += exchange_energy(p, &atom)?;
        n += p.n_electrons();
        d_ee += radial::coulomb_self_energy(p);
        fields.push(PartField::new(p)?);
    }
    for (j, (p, f)) in parts.iter().zip(&fields).enumerate() {
        for (k, zk) in sys.charges.iter().enumerate() {
            let d = distance(&sys.centers[j], &sys.centers[k]);
            v_ne += if d == 0.0 { radial::nuclear_attraction(p, *zk)? } else { -zk * f.potential(d) };
        }
        for i in j + 1..parts.len() {
            let d = distance(&sys.centers[i], &sys.centers[j]);
            let a_density: Vec<f64> = parts[i].grid().nodes().iter().map(|a| f.shell_average(*a, d)).collect();
            let rho_avg: Vec<f64> = parts[i].rho().iter().zip(&a_density).map(|(r, a)| r * a).collect();
            d_ee += radial::integrate_radial(parts[i].grid(), &rho_avg)?;
        }
    }
    Ok(EnergyBreakdown::assemble(w, tf, x, v_ne, d_ee, u_nn, n))
}
