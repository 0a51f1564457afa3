//! Radial grids, quadrature and spherically symmetric electrostatics.
//!
//! Integrals are taken in the log coordinate `x = ln r`. On each interval
//! `[x_i, x_{i+1}]` the integrand (with the Jacobian `r` absorbed) is replaced
//! by the degree-5 Lagrange interpolant through the six nearest nodes and
//! integrated exactly. Summing the interval rules gives the trapezoidal rule in
//! `ln r` with high-order end corrections; keeping the interval rules separately
//! gives cumulative integrals of the same order, which the Hartree potential uses.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

const STENCIL: usize = 6;
const DERIV_STENCIL: usize = 5;

// 4-point Gauss-Legendre on [0, 1]; exact for the degree-5 interpolants.
const GL_X: [f64; 4] = [
    0.5 - 0.5 * 0.861_136_311_594_052_6,
    0.5 - 0.5 * 0.339_981_043_584_856_3,
    0.5 + 0.5 * 0.339_981_043_584_856_3,
    0.5 + 0.5 * 0.861_136_311_594_052_6,
];
const GL_W: [f64; 4] = [
    0.5 * 0.347_854_845_137_453_8,
    0.5 * 0.652_145_154_862_546_1,
    0.5 * 0.652_145_154_862_546_1,
    0.5 * 0.347_854_845_137_453_8,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridScheme {
    LogSpaced { r_min: f64, r_max: f64 },
    Custom,
}

/// Integration rule for one interval: `int_{r_i}^{r_{i+1}} g dr = sum_j w[j] g(r_{start+j})`.
#[derive(Debug, Clone)]
struct Segment {
    start: usize,
    len: usize,
    w: [f64; STENCIL],
}

#[derive(Debug, Clone)]
struct DerivStencil {
    start: usize,
    len: usize,
    w: [f64; DERIV_STENCIL],
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: GridScheme,
    segments: Vec<Segment>,
    deriv: Vec<DerivStencil>,
}

fn lagrange_basis(xs: &[f64], j: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (k, &xk) in xs.iter().enumerate() {
        if k != j {
            v *= (x - xk) / (xs[j] - xk);
        }
    }
    v
}

/// Fornberg's recursion for first-derivative weights at `x0` on nodes `xs`.
fn fornberg_first_derivative(x0: f64, xs: &[f64]) -> [f64; DERIV_STENCIL] {
    let n = xs.len();
    let mut c = [[0.0f64; 2]; DERIV_STENCIL];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
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
    let mut w = [0.0; DERIV_STENCIL];
    for (i, wi) in w.iter_mut().enumerate().take(n) {
        *wi = c[i][1];
    }
    w
}

impl RadialGrid {
    /// `n` nodes equally spaced in `ln r` on `[r_min, r_max]`.
    pub fn log_spaced(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Structural(format!(
                "log grid needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::Structural(format!("grid needs at least 2 nodes, got {n}")));
        }
        let (a, b) = (r_min.ln(), r_max.ln());
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| (a + h * i as f64).exp()).collect();
        nodes[0] = r_min;
        nodes[n - 1] = r_max;
        let mut g = Self::from_nodes(nodes)?;
        g.scheme = GridScheme::LogSpaced { r_min, r_max };
        Ok(g)
    }

    /// Default grid for nuclear charge `z`: `[1e-6/Z, 50 Z^{-1/3} max(1, Z^{1/3})]`
    /// with 4000 log-spaced nodes. `z` below 1 is treated as 1 for the inner
    /// radius.
    pub fn default_for(z: f64) -> Result<Self> {
        Self::for_charge(z, 4000)
    }

    pub fn for_charge(z: f64, n: usize) -> Result<Self> {
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::domain("RadialGrid::default_for", format!("Z must be >= 0, got {z}")));
        }
        let zc = z.max(1.0);
        let r_min = 1e-6 / zc;
        let r_max = 50.0 * zc.powf(-1.0 / 3.0) * zc.powf(1.0 / 3.0).max(1.0);
        Self::log_spaced(r_min, r_max, n)
    }

    /// Arbitrary strictly increasing positive nodes (e.g. read from CSV).
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 {
            return Err(Error::Structural(format!("grid needs at least 2 nodes, got {n}")));
        }
        if !nodes.iter().all(|r| r.is_finite() && *r > 0.0) {
            return Err(Error::Structural("grid nodes must be finite and positive".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Structural("grid nodes must be strictly increasing".into()));
        }
        let xs: Vec<f64> = nodes.iter().map(|r| r.ln()).collect();
        let m = STENCIL.min(n);
        let mut segments = Vec::with_capacity(n - 1);
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let start = i.saturating_sub((m - 1) / 2).min(n - m);
            let stencil = &xs[start..start + m];
            let (x0, x1) = (xs[i], xs[i + 1]);
            let mut w = [0.0; STENCIL];
            for (j, wj) in w.iter_mut().enumerate().take(m) {
                let mut acc = 0.0;
                for q in 0..4 {
                    let x = x0 + (x1 - x0) * GL_X[q];
                    acc += GL_W[q] * lagrange_basis(stencil, j, x);
                }
                // integrand in x is g(r) * r
                *wj = acc * (x1 - x0) * nodes[start + j];
                weights[start + j] += *wj;
            }
            segments.push(Segment { start, len: m, w });
        }
        let md = DERIV_STENCIL.min(n);
        let deriv = (0..n)
            .map(|i| {
                let start = i.saturating_sub(md / 2).min(n - md);
                let w = fornberg_first_derivative(nodes[i], &nodes[start..start + md]);
                DerivStencil { start, len: md, w }
            })
            .collect();
        Ok(RadialGrid { nodes, weights, scheme: GridScheme::Custom, segments, deriv })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Quadrature weights for `int dr` over `[r_1, r_N]`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.nodes.len() {
            return Err(Error::Structural(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        Ok(())
    }

    /// `int g(r) dr` over the grid.
    pub fn integrate_dr(&self, g: &[f64]) -> Result<f64> {
        self.check_len(g)?;
        Ok(self.weights.iter().zip(g).map(|(w, v)| w * v).sum())
    }

    /// Running integral `C_i = int_{r_1}^{r_i} g(r) dr`.
    pub fn cumulative_dr(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(g)?;
        let mut out = Vec::with_capacity(g.len());
        let mut acc = 0.0;
        out.push(0.0);
        for seg in &self.segments {
            let mut s = 0.0;
            for j in 0..seg.len {
                s += seg.w[j] * g[seg.start + j];
            }
            acc += s;
            out.push(acc);
        }
        Ok(out)
    }

    /// Cubic Lagrange interpolation in `ln r` of grid values at radius `r`.
    /// Outside `[r_1, r_N]` the end values are returned.
    pub fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let n = self.nodes.len();
        if r <= self.nodes[0] {
            return values[0];
        }
        if r >= self.nodes[n - 1] {
            return values[n - 1];
        }
        let i = self.nodes.partition_point(|&x| x <= r).saturating_sub(1);
        let m = 4.min(n);
        let start = i.saturating_sub(1).min(n - m);
        let xs: Vec<f64> = self.nodes[start..start + m].iter().map(|v| v.ln()).collect();
        let x = r.ln();
        (0..m).map(|j| values[start + j] * lagrange_basis(&xs, j, x)).sum()
    }
}

/// `int 4 pi r^2 v(r) dr` over the grid.
pub fn integrate_radial(grid: &RadialGrid, values: &[f64]) -> Result<f64> {
    grid.check_len(values)?;
    Ok(grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .zip(values)
        .map(|((r, w), v)| 4.0 * PI * r * r * w * v)
        .sum())
}

/// `dv/dr` by five-point finite differences on the (nonuniform) grid,
/// one-sided near the ends.
pub fn radial_gradient(grid: &RadialGrid, values: &[f64]) -> Result<Vec<f64>> {
    grid.check_len(values)?;
    if grid.len() < 3 {
        return Err(Error::Structural(format!(
            "gradient needs at least 3 nodes, got {}",
            grid.len()
        )));
    }
    Ok(grid
        .deriv
        .iter()
        .map(|d| (0..d.len).map(|j| d.w[j] * values[d.start + j]).sum())
        .collect())
}

/// Electron density on a radial grid, in electrons per Bohr^3.
#[derive(Debug, Clone)]
pub struct RadialDensity {
    grid: Arc<RadialGrid>,
    rho: Vec<f64>,
    n_electrons: f64,
}

impl RadialDensity {
    pub fn new(grid: Arc<RadialGrid>, rho: Vec<f64>) -> Result<Self> {
        grid.check_len(&rho)?;
        if let Some((i, v)) = rho.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidDensity {
                condition: "rho >= 0",
                detail: format!("rho[{i}] = {v} at r = {}", grid.nodes[i]),
            });
        }
        let n_electrons = integrate_radial(&grid, &rho)?;
        Ok(RadialDensity { grid, rho, n_electrons })
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        RadialDensity { grid, rho: vec![0.0; n], n_electrons: 0.0 }
    }

    /// Samples `f(r)` on the grid.
    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let rho = grid.nodes.iter().map(|&r| f(r)).collect();
        Self::new(grid, rho)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Particle number `int rho`.
    pub fn n_electrons(&self) -> f64 {
        self.n_electrons
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.rho.iter().map(|v| v * factor).collect())
    }

    pub fn fermi_momentum(&self) -> FermiMomentumField {
        FermiMomentumField {
            grid: self.grid.clone(),
            p: self.rho.iter().map(|&v| fermi_momentum(v)).collect(),
        }
    }

    /// CSV with header `r,rho`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "rho"])?;
        for (r, v) in self.grid.nodes.iter().zip(&self.rho) {
            w.write_record([format!("{r:e}"), format!("{v:e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
        let headers = rd.headers()?.clone();
        if headers.len() < 2 || &headers[0] != "r" || &headers[1] != "rho" {
            return Err(Error::Structural(format!(
                "density CSV must start with header `r,rho`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut nodes = Vec::new();
        let mut rho = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::Structural(format!("row {}: missing column", line + 2)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Structural(format!("row {}: {e}", line + 2)))
            };
            nodes.push(parse(0)?);
            rho.push(parse(1)?);
        }
        let grid = Arc::new(RadialGrid::from_nodes(nodes)?);
        Self::new(grid, rho)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// `p = (3 pi^2 rho)^{1/3}` in 1/Bohr.
#[inline]
pub fn fermi_momentum(rho: f64) -> f64 {
    (3.0 * PI * PI * rho).cbrt()
}

#[inline]
pub fn density_from_momentum(p: f64) -> f64 {
    p * p * p / (3.0 * PI * PI)
}

#[derive(Debug, Clone)]
pub struct FermiMomentumField {
    grid: Arc<RadialGrid>,
    p: Vec<f64>,
}

impl FermiMomentumField {
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn to_density(&self) -> Result<RadialDensity> {
        RadialDensity::new(self.grid.clone(), self.p.iter().map(|&p| density_from_momentum(p)).collect())
    }
}

/// Hartree potential of a spherical density by Newton's theorem:
/// `Phi(r) = Q(r)/r + int_r 4 pi s rho(s) ds`.
pub fn hartree_potential(rho: &RadialDensity) -> Vec<f64> {
    let g = &rho.grid;
    let q_density: Vec<f64> = g.nodes.iter().zip(&rho.rho).map(|(r, v)| 4.0 * PI * r * r * v).collect();
    let o_density: Vec<f64> = g.nodes.iter().zip(&rho.rho).map(|(r, v)| 4.0 * PI * r * v).collect();
    let enclosed = g.cumulative_dr(&q_density).expect("lengths match");
    let o_cum = g.cumulative_dr(&o_density).expect("lengths match");
    let o_total = *o_cum.last().expect("non-empty grid");
    g.nodes
        .iter()
        .zip(enclosed.iter().zip(&o_cum))
        .map(|(r, (q, o))| q / r + (o_total - o))
        .collect()
}

/// `D[rho] = 1/2 int rho Phi`, the classical self-repulsion.
pub fn coulomb_self_energy(rho: &RadialDensity) -> f64 {
    let phi = hartree_potential(rho);
    let v: Vec<f64> = rho.rho.iter().zip(&phi).map(|(a, b)| a * b).collect();
    0.5 * integrate_radial(&rho.grid, &v).expect("lengths match")
}

/// `-Z int rho(x)/|x| dx`.
pub fn nuclear_attraction(rho: &RadialDensity, z: f64) -> Result<f64> {
    if !(z >= 0.0) {
        return Err(Error::domain("nuclear_attraction", format!("Z must be >= 0, got {z}")));
    }
    let g = &rho.grid;
    let s: f64 = g.nodes.iter().zip(&g.weights).zip(&rho.rho).map(|((r, w), v)| 4.0 * PI * r * w * v).sum();
    Ok(-z * s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RadialGrid::from_nodes(vec![1.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![1.0, 1.0, 2.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![0.0, 1.0, 2.0]).is_err());
        assert!(RadialGrid::log_spaced(2.0, 1.0, 10).is_err());
    }

    #[test]
    fn weights_positive_and_shell_volume_exact() {
        for g in [
            RadialGrid::default_for(1.0).unwrap(),
            RadialGrid::default_for(92.0).unwrap(),
            RadialGrid::log_spaced(1.0, 2.0, 4000).unwrap(),
        ] {
            assert!(g.weights().iter().all(|w| *w > 0.0));
            let ones = vec![1.0; g.len()];
            let v = integrate_radial(&g, &ones).unwrap();
            let exact = 4.0 * PI / 3.0 * (g.r_max().powi(3) - g.r_min().powi(3));
            assert!(rel(v, exact) < 1e-10, "{} nodes: {}", g.len(), rel(v, exact));
        }
    }

    #[test]
    fn coarse_grid_weights_positive() {
        for n in [3, 4, 5, 6, 7, 12, 40] {
            let g = RadialGrid::log_spaced(0.1, 3.0, n).unwrap();
            assert!(g.weights().iter().all(|w| *w > 0.0), "{n}");
        }
    }

    #[test]
    fn integrate_examples() {
        let g = RadialGrid::log_spaced(1e-6, 50.0, 4000).unwrap();
        assert_eq!(integrate_radial(&g, &vec![0.0; g.len()]).unwrap(), 0.0);
        let v: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
        assert!(rel(integrate_radial(&g, &v).unwrap(), 8.0 * PI) < 1e-8);
        let g = RadialGrid::log_spaced(1.0, 2.0, 4000).unwrap();
        let one = integrate_radial(&g, &vec![1.0; g.len()]).unwrap();
        assert!((one - 4.0 * PI / 3.0 * 7.0).abs() < 1e-10);
        assert!(integrate_radial(&g, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn cumulative_matches_total() {
        let g = RadialGrid::log_spaced(1e-3, 10.0, 600).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|r| r * (-r).exp()).collect();
        let c = g.cumulative_dr(&v).unwrap();
        assert!(rel(*c.last().unwrap(), g.integrate_dr(&v).unwrap()) < 1e-13);
        // int_a^r s e^{-s} ds = (1+a)e^{-a} - (1+r)e^{-r}
        let a = g.r_min();
        for (i, r) in g.nodes().iter().enumerate().step_by(37) {
            let exact = (1.0 + a) * (-a).exp() - (1.0 + r) * (-r).exp();
            assert!((c[i] - exact).abs() < 1e-11, "{i}: {}", c[i] - exact);
        }
    }

    #[test]
    fn gradient_examples() {
        let g = RadialGrid::log_spaced(1e-2, 10.0, 2000).unwrap();
        let c = vec![3.0; g.len()];
        assert!(radial_gradient(&g, &c).unwrap().iter().all(|d| d.abs() < 1e-9));
        let sq: Vec<f64> = g.nodes().iter().map(|r| r * r).collect();
        let d = radial_gradient(&g, &sq).unwrap();
        for (i, r) in g.nodes().iter().enumerate().skip(1).take(g.len() - 2) {
            assert!(rel(d[i], 2.0 * r) < 1e-6);
        }
        let ex: Vec<f64> = g.nodes().iter().map(|r| (-r).exp()).collect();
        let d = radial_gradient(&g, &ex).unwrap();
        for (i, r) in g.nodes().iter().enumerate().skip(1).take(g.len() - 2) {
            assert!((d[i] + (-r).exp()).abs() < 1e-5);
        }
        let tiny = RadialGrid::log_spaced(1.0, 2.0, 2).unwrap();
        assert!(radial_gradient(&tiny, &[1.0, 2.0]).is_err());
    }

    fn uniform_ball(n_el: f64, radius: f64) -> RadialDensity {
        let g = Arc::new(RadialGrid::log_spaced(1e-6 * radius, radius, 4000).unwrap());
        let rho0 = n_el / (4.0 * PI / 3.0 * radius.powi(3));
        RadialDensity::from_fn(g, |_| rho0).unwrap()
    }

    #[test]
    fn uniform_ball_electrostatics() {
        let (n_el, radius) = (3.0, 2.0);
        let ball = uniform_ball(n_el, radius);
        let phi = hartree_potential(&ball);
        for (r, p) in ball.grid().nodes().iter().zip(&phi) {
            let exact = n_el * (3.0 * radius * radius - r * r) / (2.0 * radius.powi(3));
            assert!((p - exact).abs() < 1e-8, "r = {r}: {p} vs {exact}");
        }
        let last = *phi.last().unwrap();
        assert!(rel(last * radius, n_el) < 1e-8);
        assert!(rel(coulomb_self_energy(&ball), 0.6 * n_el * n_el / radius) < 1e-7);
        assert!(rel(nuclear_attraction(&ball, 1.0).unwrap(), -1.5 * n_el / radius) < 1e-8);
        let v2 = nuclear_attraction(&ball, 2.0).unwrap();
        assert!(rel(v2, 2.0 * nuclear_attraction(&ball, 1.0).unwrap()) < 1e-15);
    }

    #[test]
    fn zero_density() {
        let g = Arc::new(RadialGrid::default_for(1.0).unwrap());
        let z = RadialDensity::zero(g);
        assert!(hartree_potential(&z).iter().all(|p| *p == 0.0));
        assert_eq!(coulomb_self_energy(&z), 0.0);
        assert_eq!(nuclear_attraction(&z, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn narrow_gaussian_far_field() {
        let g = Arc::new(RadialGrid::log_spaced(1e-6, 30.0, 4000).unwrap());
        let w: f64 = 0.05;
        let norm = (2.0 * PI * w * w).powf(1.5);
        let rho = RadialDensity::from_fn(g, |r| (-(r * r) / (2.0 * w * w)).exp() / norm).unwrap();
        let phi = hartree_potential(&rho);
        for (r, p) in rho.grid().nodes().iter().zip(&phi) {
            if *r > 1.0 {
                assert!(rel(p * r, 1.0) < 1e-8);
            }
        }
    }

    #[test]
    fn self_energy_is_quadratic() {
        let g = Arc::new(RadialGrid::log_spaced(1e-5, 20.0, 800).unwrap());
        let rho = RadialDensity::from_fn(g, |r| (-2.0 * r).exp()).unwrap();
        let d1 = coulomb_self_energy(&rho);
        let d3 = coulomb_self_energy(&rho.scaled(3.0).unwrap());
        assert!(rel(d3, 9.0 * d1) < 1e-13);
        // hydrogen 1s density is e^{-2r}/pi with D = 5/16
        assert!(rel(d1, 5.0 * PI * PI / 16.0) < 1e-9);
    }

    #[test]
    fn fermi_roundtrip() {
        let g = Arc::new(RadialGrid::log_spaced(1e-4, 10.0, 200).unwrap());
        let rho = RadialDensity::from_fn(g, |r| 7.0 * (-r).exp()).unwrap();
        let back = rho.fermi_momentum().to_density().unwrap();
        for (a, b) in rho.rho().iter().zip(back.rho()) {
            assert!(rel(*b, *a) < 1e-12);
        }
    }

    #[test]
    fn rejects_negative_density() {
        let g = Arc::new(RadialGrid::log_spaced(1e-4, 10.0, 20).unwrap());
        let mut v = vec![1.0; 20];
        v[3] = -1e-12;
        assert!(matches!(RadialDensity::new(g, v), Err(Error::InvalidDensity { .. })));
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let g = Arc::new(RadialGrid::log_spaced(1e-4, 10.0, 50).unwrap());
        let rho = RadialDensity::from_fn(g, |r| (-r).exp()).unwrap();
        let mut buf = Vec::new();
        rho.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("r,rho\n"));
        let back = RadialDensity::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.rho(), rho.rho());
        assert_eq!(back.grid().nodes(), rho.grid().nodes());
        assert!(RadialDensity::read_csv("1,2\n3,4\n".as_bytes()).is_err());
    }
}
