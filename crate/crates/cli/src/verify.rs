//! Registry of inequality and identity checks run by `tfwd verify`.

use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;
use tfwd_core::bounds::{self, KineticKind};
use tfwd_core::edf::{self, AtomicSystem, DEFAULT_LAMBDA};
use tfwd_core::radial::{self, RadialDensity, RadialGrid};
use tfwd_core::sampling;
use tfwd_core::semiclassic;
use tfwd_core::specfun::{self, raw};
use tfwd_core::stability::{self, BallTermVariant};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub statement: &'static str,
    /// Smallest margin found; negative means violated.
    pub slack: f64,
    /// Violations up to `-tolerance` are accepted.
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

pub struct Context {
    pub seed: u64,
    /// Name of a check whose input is deliberately corrupted.
    pub fault: Option<String>,
}

impl Context {
    fn faulty(&self, name: &str) -> bool {
        self.fault.as_deref() == Some(name)
    }
}

type CheckFn = fn(&Context) -> anyhow::Result<(f64, String)>;

struct Check {
    name: &'static str,
    statement: &'static str,
    tolerance: f64,
    run: CheckFn,
}

pub fn run_all(ctx: &Context) -> Vec<CheckResult> {
    registry()
        .iter()
        .map(|c| match (c.run)(ctx) {
            Ok((slack, detail)) => CheckResult {
                name: c.name,
                statement: c.statement,
                slack,
                tolerance: c.tolerance,
                passed: slack >= -c.tolerance,
                detail,
            },
            Err(e) => CheckResult {
                name: c.name,
                statement: c.statement,
                slack: f64::NEG_INFINITY,
                tolerance: c.tolerance,
                passed: false,
                detail: format!("error: {e:#}"),
            },
        })
        .collect()
}

pub fn check_names() -> Vec<&'static str> {
    registry().iter().map(|c| c.name).collect()
}

fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `min_i (rhs_i - lhs_i) / scale_i` over the samples.
fn min_margin(ts: &[f64], f: impl Fn(f64) -> (f64, f64)) -> (f64, f64) {
    let mut worst = (f64::INFINITY, f64::NAN);
    for &t in ts {
        let (lhs, rhs) = f(t);
        let m = (rhs - lhs) / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        if m < worst.0 {
            worst = (m, t);
        }
    }
    worst
}

fn registry() -> Vec<Check> {
    vec![
        Check {
            name: "weizsacker_bracket_max",
            statement: "max_t (sqrt(1+t^2) + 2t arsinh t)/(1+t^2) = 1.658290113",
            tolerance: 0.0,
            run: |_| {
                let m = specfun::weizsacker_bracket_max();
                Ok((1e-8 - (m.value - 1.658290113).abs(), format!("max {:.12} at t = {:.6}", m.value, m.argmax)))
            },
        },
        Check {
            name: "eta0_alpha3",
            statement: "sup X(t)/t^3 = 1.15 +- 0.01 and eta = sup/(4 pi) = 0.0914 +- 0.001",
            tolerance: 0.0,
            run: |_| {
                let e = specfun::eta0(3.0)?.value;
                let eta = e / (4.0 * PI);
                Ok((
                    (0.01 - (e - 1.15).abs()).min(0.001 - (eta - 0.0914).abs()),
                    format!("eta0 = {e:.8}, eta = {eta:.8}"),
                ))
            },
        },
        Check {
            name: "f_int_lower_bound",
            statement: "F(t) >= t sqrt(arsinh t) / 2",
            tolerance: 1e-12,
            run: |_| {
                let ts = log_grid(200, 1e-4, 1e4);
                let (m, t) = min_margin(&ts, |t| (t * specfun::arsinh(t).sqrt() / 2.0, specfun::f_int(t).unwrap_or(f64::NAN)));
                Ok((m, format!("worst relative margin at t = {t:e}")))
            },
        },
        Check {
            name: "tfls_lower_bound",
            statement: "tf(t) >= 2t^4 - 8t^3/3",
            tolerance: 1e-12,
            run: |ctx| {
                let scale = if ctx.faulty("tfls_lower_bound") { 1.0 - 1e-3 } else { 1.0 };
                let ts = log_grid(10_000, 1e-4, 1e4);
                let (m, t) = min_margin(&ts, |t| (2.0 * t.powi(4) - 8.0 * t.powi(3) / 3.0, scale * raw::tf(t)));
                Ok((m, format!("worst relative margin at t = {t:e}")))
            },
        },
        Check {
            name: "exchange_quartic_bound",
            statement: "-X(t) <= t^4",
            tolerance: 1e-12,
            run: |_| {
                let (m, t) = min_margin(&log_grid(10_000, 1e-4, 1e4), |t| (-raw::x(t), t.powi(4)));
                Ok((m, format!("worst relative margin at t = {t:e}")))
            },
        },
        Check {
            name: "exchange_cubic_bound",
            statement: "X(t) <= eta0(3) t^3",
            tolerance: 1e-12,
            run: |_| {
                let e = specfun::eta0(3.0)?.value;
                let (m, t) = min_margin(&log_grid(10_000, 1e-4, 1e4), |t| (raw::x(t), e * t.powi(3)));
                Ok((m, format!("worst relative margin at t = {t:e}")))
            },
        },
        Check {
            name: "tf_quartic_monotone",
            statement: "tf(t)/t^4 increasing, tf(1e6)/1e24 in [2 - 1e-5, 2]",
            tolerance: 0.0,
            run: |_| {
                let ts = log_grid(10_000, 1e-4, 1e6);
                let q: Vec<f64> = ts.iter().map(|t| raw::tf(*t) / t.powi(4)).collect();
                let worst = q.windows(2).map(|w| (w[1] - w[0]) / w[1]).fold(f64::INFINITY, f64::min);
                let top = raw::tf(1e6) / 1e24;
                Ok((
                    worst.min(1e-5 - (2.0 - top)).min(2.0 - top),
                    format!("min relative increment {worst:e}; 2 - tf(1e6)/1e24 = {:e}; 2 - tf(1e3)/1e12 = {:e}", 2.0 - top, 2.0 - raw::tf(1e3) / 1e12),
                ))
            },
        },
        Check {
            name: "tf_prime_identity",
            statement: "tf'(t) = 8t^2 (sqrt(1+t^2) - 1) against central differences",
            tolerance: 0.0,
            run: |ctx| {
                let mut rng = sampling::rng(ctx.seed);
                let mut worst: f64 = 0.0;
                for _ in 0..100 {
                    let t = 10f64.powf(rng.gen_range(-3.0..3.0));
                    let h = 1e-5 * t;
                    let fd = (raw::tf(t + h) - raw::tf(t - h)) / (2.0 * h);
                    worst = worst.max(((fd - raw::tf_prime(t)) / raw::tf_prime(t)).abs());
                }
                Ok((1e-8 - worst, format!("max relative deviation {worst:e}")))
            },
        },
        Check {
            name: "tf_quintic_bound",
            statement: "tf(t) <= (4/5) t^5",
            tolerance: 1e-12,
            run: |_| {
                let (m, t) = min_margin(&log_grid(10_000, 1e-4, 1e4), |t| (raw::tf(t), 0.8 * t.powi(5)));
                Ok((m, format!("worst relative margin at t = {t:e}; sup tf/t^5 = {}", specfun::tf_quintic_constant().value)))
            },
        },
        Check {
            name: "series_branch_agreement",
            statement: "series and closed forms agree at the switch points",
            tolerance: 0.0,
            run: |_| {
                let a = specfun::crossover_agreement();
                let worst = a.iter().map(|x| x.2).fold(0.0, f64::max);
                Ok((1e-12 - worst, format!("{a:?}")))
            },
        },
        Check {
            name: "weizsacker_domination",
            statement: "(3/8 pi^2)|p'|^2 c f(p/c)^2 <= |(sqrt rho)'|^2 pointwise, random densities",
            tolerance: 1e-10,
            run: |ctx| {
                let mut rng = sampling::rng(ctx.seed.wrapping_add(1));
                let grid = Arc::new(RadialGrid::log_spaced(1e-4, 40.0, 1500)?);
                let mut worst = f64::INFINITY;
                for _ in 0..10 {
                    let rho = sampling::smooth_density(&mut rng, grid.clone());
                    let c = 10f64.powf(rng.gen_range(-1.0..3.0));
                    let w = edf::weizsacker_density(&rho, c, 1.0)?;
                    let g = edf::gradient_sqrt_density(&rho)?;
                    let scale = g.iter().cloned().fold(0.0, f64::max);
                    for (a, b) in w.iter().zip(&g) {
                        worst = worst.min((b - a) / scale);
                    }
                    let sys = AtomicSystem::new(1.0, c, DEFAULT_LAMBDA)?;
                    let total = edf::weizsacker_energy(&rho, &sys)?;
                    let bound = DEFAULT_LAMBDA * edf::gradient_sqrt_norm(&rho)?;
                    worst = worst.min((bound - total) / bound);
                }
                Ok((worst, "10 random densities".into()))
            },
        },
        Check {
            name: "exchange_particle_bound",
            statement: "X(rho) <= (3/2) eta c N",
            tolerance: 1e-10,
            run: |ctx| {
                let mut rng = sampling::rng(ctx.seed.wrapping_add(2));
                let grid = Arc::new(RadialGrid::log_spaced(1e-4, 40.0, 1500)?);
                let mut worst = f64::INFINITY;
                let mut ratio: f64 = 0.0;
                for i in 0..20 {
                    let rho = sampling::smooth_density(&mut rng, grid.clone());
                    let kappa = [0.1, 0.5, 1.0, 2.0][i % 4];
                    let sys = AtomicSystem::with_kappa(10.0, kappa, DEFAULT_LAMBDA)?;
                    let x = edf::exchange_energy(&rho, &sys)?;
                    let bound = specfun::exchange_particle_coefficient() * sys.c * rho.n_electrons();
                    worst = worst.min((bound - x) / bound);
                    ratio = ratio.max(x / (specfun::exchange_eta() * sys.c * rho.n_electrons()));
                }
                Ok((worst, format!("20 random densities; max X / (eta c N) = {ratio:.4}")))
            },
        },
        Check {
            name: "nonrelativistic_limits",
            statement: "W, TF, X tend to Weizsäcker, Thomas-Fermi and Dirac terms as c -> inf",
            tolerance: 0.0,
            run: |_| {
                let grid = Arc::new(RadialGrid::log_spaced(1e-5, 40.0, 4000)?);
                let rho = RadialDensity::from_fn(grid, |r| (-2.0 * r).exp() / PI + 0.1 * (-0.5 * r * r).exp())?;
                let sys = AtomicSystem::new(1.0, 1e8, DEFAULT_LAMBDA)?;
                let rel = |a: f64, b: f64| ((a - b) / b).abs();
                let dw = rel(edf::weizsacker_energy(&rho, &sys)?, 0.5 * DEFAULT_LAMBDA * edf::gradient_sqrt_norm(&rho)?);
                let dt = rel(edf::tf_energy(&rho, &sys)?, edf::tf_energy_nonrel(&rho)?);
                let dx = rel(edf::exchange_energy(&rho, &sys)?, edf::dirac_exchange(&rho)?);
                Ok((1e-4 - dw.max(dt).max(dx), format!("W {dw:e}, TF {dt:e}, X {dx:e}")))
            },
        },
        Check {
            name: "phase_space_closed_form",
            statement: "closed-form momentum integrals equal direct quadrature",
            tolerance: 0.0,
            run: |ctx| {
                let mut rng = sampling::rng(ctx.seed.wrapping_add(3));
                let mut worst: f64 = 0.0;
                for _ in 0..20 {
                    let phi = 10f64.powf(rng.gen_range(-3.0..4.0));
                    for kind in [KineticKind::NonRelativistic, KineticKind::Relativistic { c: 10f64.powf(rng.gen_range(0.0..2.5)) }] {
                        let a = bounds::phase_space_density(kind, phi);
                        let b = bounds::phase_space_density_quadrature(kind, phi)?;
                        worst = worst.max(((a - b) / b).abs());
                    }
                }
                Ok((1e-10 - worst, format!("max relative deviation {worst:e}")))
            },
        },
        Check {
            name: "tf_energy_dual_route",
            statement: "TF energy constant by functional evaluation and by initial slope agree",
            tolerance: 0.0,
            run: |_| {
                let tf = semiclassic::tf_atom(10.0)?;
                let d = (tf.e_tf_constant - tf.e_tf_slope_constant).abs() / tf.e_tf_slope_constant;
                let n = (tf.sigma.n_electrons() - 10.0).abs() / 10.0;
                Ok(((5e-3 - d).min(1e-6 - n), format!("relative difference {d:e}; charge deficit {n:e}")))
            },
        },
        Check {
            name: "relativistic_gap_nonnegative",
            statement: "non-relativistic minus relativistic toothless phase-space energy >= 0",
            tolerance: 1e-9,
            run: |_| {
                let mut worst = f64::INFINITY;
                for z in [10.0, 40.0] {
                    let tf = semiclassic::tf_atom(z)?;
                    for kappa in [0.1, 1.0, 2.0] {
                        let g = bounds::lemma_l_gap(&tf, kappa)?;
                        worst = worst.min(g / (z * z));
                    }
                }
                Ok((worst, "Z in {10, 40}, kappa in {0.1, 1, 2}; slack is gap / Z^2".into()))
            },
        },
        Check {
            name: "s0_monotone",
            statement: "s0(kappa) strictly increasing",
            tolerance: 0.0,
            run: |_| {
                let ks = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];
                let l: Vec<f64> = ks.iter().map(|k| bounds::solve_ln_s0(*k, DEFAULT_LAMBDA)).collect::<Result<_, _>>()?;
                let worst = l.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
                Ok((worst, format!("ln s0 = {l:?}")))
            },
        },
        Check {
            name: "z_max_closed_form",
            statement: "Z_max(137.037) = 229.9029615; closed form equals the strict-ball-constant condition exactly",
            tolerance: 0.0,
            run: |_| {
                let z = stability::z_max_paper(137.037);
                let exact = stability::z_max_ratio(BallTermVariant::Strict) == stability::z_max_paper_ratio();
                Ok((
                    if exact { 1e-4 - (z - 229.9029615).abs() } else { -1.0 },
                    format!(
                        "closed form {z:.10}; as printed (2972) {:.10}; strict (5944) {:.10}",
                        stability::z_max_rederived(137.037),
                        stability::z_max_strict(137.037)
                    ),
                ))
            },
        },
        Check {
            name: "ball_constant_exact",
            statement: "int_0^1 r^2 (1 + r^2/4)^2 dr = 743/1680 and 128 times it = 5944/105",
            tolerance: 0.0,
            run: |_| {
                use num_rational::Ratio;
                let ok = stability::ball_integral() == Ratio::new(743, 1680)
                    && stability::ball_term_constant() == Ratio::new(5944, 105);
                Ok((if ok { 0.0 } else { -1.0 }, format!("{}", stability::ball_integral())))
            },
        },
        Check {
            name: "electrostatic_inequality",
            statement: "D(nu,nu) - int Phi dnu + U >= (1/8) sum Z^2/D_k for ball-smeared measures",
            tolerance: 1e-9,
            run: |ctx| {
                let mut rng = sampling::rng(ctx.seed.wrapping_add(4));
                let mut worst = f64::INFINITY;
                for _ in 0..100 {
                    let k = rng.gen_range(2..=6);
                    let z = rng.gen_range(0.5..5.0);
                    let cfg = sampling::random_configuration(&mut rng, k, z, 0.05, 0.5, 137.037, DEFAULT_LAMBDA)?;
                    let count = rng.gen_range(1..30);
                    let nu = sampling::random_trial_measure(&mut rng, &cfg, count, 0.1, z);
                    let e = stability::electrostatic_inequality_check(&cfg, &nu)?;
                    worst = worst.min(e.slack / e.scale);
                }
                Ok((worst, "100 random configurations".into()))
            },
        },
        Check {
            name: "hartree_gauss_law",
            statement: "r Phi(r) -> N for a compactly supported density",
            tolerance: 0.0,
            run: |_| {
                let grid = Arc::new(RadialGrid::log_spaced(1e-5, 30.0, 3000)?);
                let rho = RadialDensity::from_fn(grid.clone(), |r| if r < 2.0 { (2.0 - r).powi(3) } else { 0.0 })?;
                let phi = radial::hartree_potential(&rho);
                let n = rho.n_electrons();
                let d = (grid.r_max() * phi[phi.len() - 1] - n).abs() / n;
                Ok((1e-8 - d, format!("relative deviation {d:e}")))
            },
        },
    ]
}
