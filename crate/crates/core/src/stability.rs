//! Stability of matter for the TFWD functional: Voronoi/ball geometry of the
//! nuclei, the Lieb-Yau constants, a molecular lower-bound certificate and the
//! critical charge `Z_max(c)`.

use crate::edf::{distance, validate_nuclei};
use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use crate::specfun;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `delta = (3 pi^2)^{1/3}`, so that `p = delta rho^{1/3}`.
pub fn delta() -> f64 {
    (3.0 * PI * PI).cbrt()
}

/// Coefficient `3^{5/3} / (2^7 pi^{2/3})` of `lambda c H_k` in the Weizsäcker bound.
pub fn hardy_coefficient(lambda: f64) -> f64 {
    3f64.powf(5.0 / 3.0) * lambda / (128.0 * PI.powf(2.0 / 3.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearConfiguration {
    pub centers: Vec<[f64; 3]>,
    pub charges: Vec<f64>,
    pub c: f64,
    pub lambda: f64,
    /// Half nearest-neighbour distances; `inf` for a single nucleus.
    pub d: Vec<f64>,
}

impl NuclearConfiguration {
    pub fn new(centers: Vec<[f64; 3]>, charges: Vec<f64>, c: f64, lambda: f64) -> Result<Self> {
        validate_nuclei(&centers, &charges)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Structural(format!("c must be > 0, got {c}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Structural(format!("lambda must be >= 0, got {lambda}")));
        }
        let d = if centers.len() > 64 { half_nn_kdtree(&centers) } else { half_nn_brute(&centers) };
        Ok(NuclearConfiguration { centers, charges, c, lambda, d })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Index of the Voronoi cell containing `x` (lowest index on ties).
    pub fn cell_of(&self, x: &[f64; 3]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (k, r) in self.centers.iter().enumerate() {
            let d = distance(x, r);
            if d < best.1 {
                best = (k, d);
            }
        }
        best.0
    }

    /// Nuclear potential at `x` of all nuclei except the one owning the cell of `x`.
    pub fn phi_other(&self, x: &[f64; 3]) -> f64 {
        let own = self.cell_of(x);
        self.centers
            .iter()
            .zip(&self.charges)
            .enumerate()
            .filter(|(k, _)| *k != own)
            .map(|(_, (r, z))| z / distance(x, r))
            .sum()
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        let mut u = 0.0;
        for k in 0..self.len() {
            for l in k + 1..self.len() {
                u += self.charges[k] * self.charges[l] / distance(&self.centers[k], &self.centers[l]);
            }
        }
        u
    }

    /// Same configuration with all positions multiplied by `factor`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        let centers = self.centers.iter().map(|r| r.map(|v| v * factor)).collect();
        NuclearConfiguration::new(centers, self.charges.clone(), self.c, self.lambda)
    }
}

pub fn half_nn_brute(centers: &[[f64; 3]]) -> Vec<f64> {
    (0..centers.len())
        .map(|k| {
            let m = (0..centers.len())
                .filter(|&l| l != k)
                .map(|l| distance(&centers[k], &centers[l]))
                .fold(f64::INFINITY, f64::min);
            0.5 * m
        })
        .collect()
}

pub fn half_nn_kdtree(centers: &[[f64; 3]]) -> Vec<f64> {
    use kiddo::{KdTree, SquaredEuclidean};
    if centers.len() < 2 {
        return vec![f64::INFINITY; centers.len()];
    }
    let mut tree: KdTree<f64, 3> = KdTree::new();
    for (i, p) in centers.iter().enumerate() {
        tree.add(p, i as u64);
    }
    centers
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let nn = tree.nearest_n::<SquaredEuclidean>(p, 2);
            let other = nn.iter().find(|n| n.item != i as u64).expect("two points");
            // recompute exactly instead of taking sqrt of the squared distance
            0.5 * distance(p, &centers[other.item as usize])
        })
        .collect()
}

/// `Y(r) = 1 + r^2/4`
pub fn lieb_yau_y(r: f64) -> f64 {
    1.0 + 0.25 * r * r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiebYauValue {
    /// `(1/(4|x-R_k|^2) - D_k^{-2} Y(|x-R_k|/D_k))_+`; `inf` at the centre.
    pub hardy: f64,
    /// `H_k(x) = 2 sqrt(Y(|x-R_k|/D_k)) / D_k`
    pub h: f64,
}

/// The Lieb-Yau ball potential of nucleus `k` at `x`, which must lie in the
/// closed ball `B_k`.
pub fn lieb_yau_potential(x: &[f64; 3], k: usize, config: &NuclearConfiguration) -> Result<LiebYauValue> {
    let d = *config
        .d
        .get(k)
        .ok_or_else(|| Error::domain("lieb_yau_potential", format!("no nucleus {k}")))?;
    let r = distance(x, &config.centers[k]);
    if r > d {
        return Err(Error::domain("lieb_yau_potential", format!("|x - R_k| = {r} outside ball of radius {d}")));
    }
    let y = lieb_yau_y(r / d);
    let hardy = if r == 0.0 { f64::INFINITY } else { (0.25 / (r * r) - y / (d * d)).max(0.0) };
    Ok(LiebYauValue { hardy, h: 2.0 * y.sqrt() / d })
}

/// Radius in units of `D` where the Hardy part switches off:
/// `1/(4t^2) = 1 + t^2/4`, i.e. `t^2 = sqrt(5) - 2`.
pub fn lieb_yau_switch_radius() -> f64 {
    (5f64.sqrt() - 2.0).sqrt()
}

/// The same radius by bisection on the sign change of the Hardy part.
pub fn lieb_yau_switch_radius_numeric() -> Result<f64> {
    quad::bisect(|t| 0.25 / (t * t) - lieb_yau_y(t), 1e-3, 1.0, 0.0)
}

/// `int_0^1 r^2 (1 + r^2/4)^2 dr` exactly.
pub fn ball_integral() -> Ratio<i64> {
    // r^2 (1 + r^2/2 + r^4/16)
    let coeffs = [(2, Ratio::from_integer(1)), (4, Ratio::new(1, 2)), (6, Ratio::new(1, 16))];
    coeffs.iter().map(|(p, a)| a / Ratio::from_integer(p + 1)).sum()
}

/// `128 pi int_0^1 r^2 Y(r)^2 dr / pi`, the rational part of the ball constant.
pub fn ball_term_constant() -> Ratio<i64> {
    Ratio::from_integer(128) * ball_integral()
}

/// Which ball constant enters the feasibility condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BallTermVariant {
    /// `5944 pi / 105`, as derived from the pointwise minimization on each ball.
    #[default]
    Strict,
    /// `2972 pi / 105`, as printed in the feasibility condition.
    Halved,
}

impl BallTermVariant {
    pub fn constant(self) -> Ratio<i64> {
        match self {
            BallTermVariant::Strict => ball_term_constant(),
            BallTermVariant::Halved => ball_term_constant() / Ratio::from_integer(2),
        }
    }
}

/// `R` with `Z_max = c^{3/2} sqrt(pi R)`, from
/// `c (B + 3/4) pi kappa^4 / delta^3 <= Z^2/8` and `delta^3 = 3 pi^2`.
pub fn z_max_ratio(variant: BallTermVariant) -> Ratio<i64> {
    let b = variant.constant() + Ratio::new(3, 4);
    Ratio::from_integer(3) / (Ratio::from_integer(8) * b)
}

/// The closed form `Z_max = 3 sqrt(1686370 pi)/48182 c^{3/2}` as printed.
pub fn z_max_paper(c: f64) -> f64 {
    3.0 * (1686370.0 * PI).sqrt() / 48182.0 * c.powf(1.5)
}

/// `(3/48182)^2 * 1686370` as a rational, for exact comparison with [`z_max_ratio`].
pub fn z_max_paper_ratio() -> Ratio<i64> {
    Ratio::new(9 * 1686370, 48182 * 48182)
}

fn z_max_from_ratio(r: Ratio<i64>, c: f64) -> f64 {
    let r = *r.numer() as f64 / *r.denom() as f64;
    (PI * r).sqrt() * c.powf(1.5)
}

/// Solves the feasibility condition as printed (ball constant `2972 pi/105`).
pub fn z_max_rederived(c: f64) -> f64 {
    z_max_from_ratio(z_max_ratio(BallTermVariant::Halved), c)
}

/// Solves the feasibility condition with the derived ball constant `5944 pi/105`.
pub fn z_max_strict(c: f64) -> f64 {
    z_max_from_ratio(z_max_ratio(BallTermVariant::Strict), c)
}

pub fn z_max(c: f64, variant: BallTermVariant) -> f64 {
    z_max_from_ratio(z_max_ratio(variant), c)
}

/// `C(cap) = -inf int (3/4 rho^{4/3} - rho/|x|) dx` over `rho <= cap`, closed form
/// `2 pi cap^{1/3}`.
pub fn tooth_constant_closed(cap: f64) -> f64 {
    2.0 * PI * cap.cbrt()
}

/// [`tooth_constant_closed`] by radial quadrature of the pointwise minimizer
/// `rho*(r) = min(r^{-3}, cap)`.
pub fn tooth_constant_with_cap(cap: f64) -> Result<f64> {
    if !(cap > 0.0 && cap.is_finite()) {
        return Err(Error::domain("tooth_constant", format!("cap must be > 0, got {cap}")));
    }
    let r_s = cap.cbrt().recip();
    let profile = |r: f64| {
        let rho = cap.min(r.powi(-3));
        4.0 * PI * r * r * (0.75 * rho.powf(4.0 / 3.0) - rho / r)
    };
    let opts = QuadOptions { rel_tol: 1e-13, ..Default::default() };
    let inner = quad::integrate(profile, 0.0, r_s, opts)?;
    // r = r_s / u maps (r_s, inf) onto (0, 1]
    let outer = quad::integrate(|u: f64| if u == 0.0 { 0.0 } else { profile(r_s / u) * r_s / (u * u) }, 0.0, 1.0, opts)?;
    Ok(-(inner + outer))
}

/// The tooth constant at the cap `p < 1`, i.e. `rho <= 1/(3 pi^2)`.
pub fn tooth_constant_3a() -> Result<f64> {
    tooth_constant_with_cap(1.0 / (3.0 * PI * PI))
}

/// `arsinh(s) = kappa^2 / (4 A (3/8) delta)`, which turns the Weizsäcker,
/// TF and Coulomb terms on each ball into a complete square.
pub fn splitting_arsinh(kappa: f64, lambda: f64) -> f64 {
    kappa * kappa / (1.5 * hardy_coefficient(lambda) * delta())
}

/// Relative discriminant `(kappa^2/arsinh s - 4 A (3/8) delta) / (4 A (3/8) delta)`.
pub fn square_discriminant(kappa: f64, lambda: f64, arsinh_s: f64) -> f64 {
    let q = 1.5 * hardy_coefficient(lambda) * delta();
    (kappa * kappa / arsinh_s - q) / q
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomTerms {
    pub z: f64,
    pub kappa: f64,
    pub d: f64,
    pub s: f64,
    pub arsinh_s: f64,
    /// Relative discriminant of the completed square; the square itself is `>= 0` and dropped.
    pub term_2_discriminant: f64,
    pub term_3a: f64,
    pub term_4a: f64,
    pub term_5a: f64,
    /// `Z^2 / (8 D_k)`
    pub repulsion: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub atoms: Vec<AtomTerms>,
    pub variant: BallTermVariant,
    pub n: f64,
    /// `C_c = c^2 + (3/2) eta c`: rest mass from the TF bound plus the exchange bound.
    pub c_c: f64,
    /// `-C_c N`
    pub linear_n: f64,
    pub tooth_constant: f64,
    /// Sum of every term as derived.
    pub raw_total: f64,
    /// Lower bound with each atom's `4a + 5a + repulsion` replaced by `min(0, .)`.
    pub total: f64,
    pub per_particle: f64,
    pub feasible: bool,
}

impl StabilityCertificate {
    pub fn term_sum(&self, f: impl Fn(&AtomTerms) -> f64) -> f64 {
        self.atoms.iter().map(f).sum()
    }
}

/// Lower bound on the molecular TFWD energy for `n` electrons.
pub fn molecular_certificate(config: &NuclearConfiguration, n: f64) -> Result<StabilityCertificate> {
    molecular_certificate_with(config, n, BallTermVariant::default())
}

pub fn molecular_certificate_with(
    config: &NuclearConfiguration,
    n: f64,
    variant: BallTermVariant,
) -> Result<StabilityCertificate> {
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::Structural(format!("N must be >= 0, got {n}")));
    }
    let c = config.c;
    let d3 = 3.0 * PI * PI;
    let dl = delta();
    let tooth_constant = tooth_constant_closed(1.0 / d3);
    let ball = variant.constant();
    let ball = *ball.numer() as f64 / *ball.denom() as f64;
    let mut atoms = Vec::with_capacity(config.len());
    let (mut raw, mut clipped) = (0.0, 0.0);
    for (k, &z) in config.charges.iter().enumerate() {
        let d = config.d[k];
        let kappa = z / c;
        let arsinh_s = splitting_arsinh(kappa, config.lambda);
        let s = arsinh_s.sinh();
        let term_3a = -tooth_constant * c * c * s * kappa.powi(3) / (dl * dl);
        let k4 = c * PI * kappa.powi(4) / d3;
        let term_4a = -ball * k4 / d;
        let term_5a = -0.75 * k4 / d;
        let repulsion = z * z / (8.0 * d);
        let feasible = c * (ball + 0.75) * PI * kappa.powi(4) / d3 <= z * z / 8.0;
        raw += term_3a + term_4a + term_5a + repulsion;
        clipped += term_3a + (term_4a + term_5a + repulsion).min(0.0);
        atoms.push(AtomTerms {
            z,
            kappa,
            d,
            s,
            arsinh_s,
            term_2_discriminant: if kappa > 0.0 { square_discriminant(kappa, config.lambda, s.asinh()) } else { 0.0 },
            term_3a,
            term_4a,
            term_5a,
            repulsion,
            feasible,
        });
    }
    let c_c = c * c + specfun::exchange_particle_coefficient() * c;
    let linear_n = -c_c * n;
    let total = clipped + linear_n;
    Ok(StabilityCertificate {
        feasible: atoms.iter().all(|a| a.feasible),
        atoms,
        variant,
        n,
        c_c,
        linear_n,
        tooth_constant,
        raw_total: raw + linear_n,
        total,
        per_particle: total / (config.len() as f64 + n),
    })
}

/// A uniformly charged ball of the trial measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallCharge {
    pub center: [f64; 3],
    pub radius: f64,
    pub charge: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElectrostaticCheck {
    /// `D(nu, nu) = (1/2) int int dnu dnu / |x - y|`
    pub self_energy: f64,
    /// `int Phi dnu`, with `Phi` the potential of the other cells' nuclei.
    pub attraction: f64,
    pub repulsion: f64,
    /// `(1/8) sum_k Z_k^2 / D_k`
    pub rhs: f64,
    pub slack: f64,
    pub scale: f64,
    pub holds: bool,
}

/// Evaluates `D(nu, nu) - int Phi dnu + sum_{k<l} Z_k Z_l/|R_k - R_l| - (1/8) sum Z_k^2/D_k`
/// for a measure made of disjoint uniform balls, each inside one Voronoi cell.
pub fn electrostatic_inequality_check(config: &NuclearConfiguration, nu: &[BallCharge]) -> Result<ElectrostaticCheck> {
    for (i, b) in nu.iter().enumerate() {
        if !(b.radius > 0.0 && b.charge >= 0.0 && b.charge.is_finite()) {
            return Err(Error::Structural(format!("ball {i}: radius must be > 0 and charge >= 0")));
        }
        let k = config.cell_of(&b.center);
        let dk = distance(&b.center, &config.centers[k]);
        for (l, r) in config.centers.iter().enumerate() {
            if l == k {
                continue;
            }
            // distance from the centre to the bisecting plane of R_k, R_l
            let dl = distance(&b.center, r);
            let gap = (dl * dl - dk * dk) / (2.0 * distance(&config.centers[k], r));
            if gap < b.radius {
                return Err(Error::Structural(format!("ball {i} crosses the boundary of cell {k}")));
            }
        }
        for (j, o) in nu.iter().enumerate().skip(i + 1) {
            if distance(&b.center, &o.center) < b.radius + o.radius {
                return Err(Error::Structural(format!("balls {i} and {j} overlap")));
            }
        }
    }
    let mut self_energy = 0.0;
    let mut attraction = 0.0;
    for (i, b) in nu.iter().enumerate() {
        self_energy += 0.6 * b.charge * b.charge / b.radius;
        for o in &nu[i + 1..] {
            self_energy += b.charge * o.charge / distance(&b.center, &o.center);
        }
        // Newton: the ball average of 1/|x - R_l| for R_l outside the ball
        attraction += b.charge * config.phi_other(&b.center);
    }
    let repulsion = config.nuclear_repulsion();
    let rhs: f64 = config.charges.iter().zip(&config.d).map(|(z, d)| z * z / (8.0 * d)).sum();
    let slack = self_energy - attraction + repulsion - rhs;
    let scale = self_energy.abs() + attraction.abs() + repulsion.abs() + rhs.abs();
    Ok(ElectrostaticCheck { self_energy, attraction, repulsion, rhs, slack, scale, holds: slack >= -1e-9 * scale })
}
