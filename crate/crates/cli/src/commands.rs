use crate::config::RunConfig;
use crate::verify;
use crate::{write_json, Outcome};
use anyhow::Context;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tfwd_core::bounds::{self, BoundsReport};
use tfwd_core::edf::{self, AtomicSystem};
use tfwd_core::radial::RadialDensity;
use tfwd_core::semiclassic::{self, TfGridSpec};
use tfwd_core::specfun::{self, raw};
use tfwd_core::stability::{self, BallTermVariant, NuclearConfiguration};

pub fn verify(cfg: &RunConfig, fault: Option<String>) -> anyhow::Result<Outcome> {
    let results = verify::run_all(&verify::Context { seed: cfg.seed, fault });
    for r in &results {
        say!("{} {:<30} slack {:+.3e}  {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.slack, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    say!("{} checks, {} failed", results.len(), failed);
    let path = cfg.out.join("verify_report.json");
    write_json(&path, &serde_json::json!({ "seed": cfg.seed, "checks": results, "failed": failed }))?;
    Ok(Outcome { outputs: vec![path], check_failed: failed > 0, solver_failed: false })
}

pub fn tf_solve(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let z = cfg.z.unwrap_or(1.0);
    let univ = semiclassic::universal()?;
    let tf = semiclassic::tf_atom_with(z, univ, TfGridSpec::default())?;
    let mut w = csv::Writer::from_path(cfg.out.join("tf_atom.csv"))?;
    w.write_record(["x", "y", "dy_dx", "r", "sigma", "phi_sigma"])?;
    for i in 0..tf.x.len() {
        let r = tf.grid().nodes()[i];
        w.write_record(
            [tf.x[i], tf.y[i], tf.dy[i], r, tf.sigma.rho()[i], tf.phi_sigma[i]].map(|v| format!("{v:e}")),
        )?;
    }
    w.flush()?;
    let summary = serde_json::json!({
        "Z": z,
        "slope": univ.slope(),
        "x_max": univ.x_max(),
        "restarts": univ.restarts(),
        "length_scale_b": tf.b,
        "N": tf.sigma.n_electrons(),
        "E_TF": tf.e_tf,
        "e_TF_functional": tf.e_tf_constant,
        "e_TF_slope": tf.e_tf_slope_constant,
        "D_sigma": tf.d_sigma,
    });
    say!("{}", serde_json::to_string_pretty(&summary)?);
    let path = cfg.out.join("tf_solve.json");
    write_json(&path, &summary)?;
    Ok(Outcome::ok(vec![cfg.out.join("tf_atom.csv"), path]))
}

pub fn tfw_solve(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let z = cfg.require_z()?;
    let tf = semiclassic::tf_atom(z)?;
    let sol = semiclassic::solve_tfw_with(&tf, cfg.beta, cfg.tfw_options())?;
    let csv_path = cfg.out.join("tfw_density.csv");
    sol.rho_w.save_csv(&csv_path)?;
    let summary = serde_json::json!({
        "Z": z,
        "beta": sol.beta,
        "energy": sol.energy,
        "E_TF": tf.e_tf,
        "iterations": sol.iterations,
        "el_residual": sol.el_residual,
        "N": sol.rho_w.n_electrons(),
        "excess_charge": sol.excess_charge(),
    });
    say!("{}", serde_json::to_string_pretty(&summary)?);
    let path = cfg.out.join("tfw_solve.json");
    write_json(&path, &summary)?;
    Ok(Outcome::ok(vec![csv_path, path]))
}

pub fn energy(cfg: &RunConfig, density: Option<&Path>) -> anyhow::Result<Outcome> {
    let z = cfg.require_z()?;
    let sys = AtomicSystem::new(z, cfg.c_for(z), cfg.lambda)?;
    let (rho, source) = match density {
        Some(p) => (RadialDensity::load_csv(p).with_context(|| format!("loading {}", p.display()))?, p.display().to_string()),
        None => {
            let tf = semiclassic::tf_atom(z)?;
            (semiclassic::solve_tfw_with(&tf, cfg.beta, cfg.tfw_options())?.rho_w, format!("TFW minimizer, beta = {}", cfg.beta))
        }
    };
    let e = edf::total_energy_atomic(&rho, &sys)?;
    let report = serde_json::json!({
        "Z": sys.z, "c": sys.c, "kappa": sys.kappa(), "lambda": sys.lambda,
        "density": source, "units": "Hartree", "energy": e,
    });
    say!("{}", serde_json::to_string_pretty(&report)?);
    let path = cfg.out.join("energy.json");
    write_json(&path, &report)?;
    Ok(Outcome::ok(vec![path]))
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct SweepRow {
    #[serde(rename = "Z")]
    z: f64,
    kappa: f64,
    upper: Option<f64>,
    lower: Option<f64>,
    #[serde(rename = "E_TF")]
    e_tf: Option<f64>,
    upper_gap_over_Z2: Option<f64>,
    lower_gap_over_Z2: Option<f64>,
    s0: Option<f64>,
    lemma_l_gap: Option<f64>,
    errors: String,
}

pub fn sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let kappa = cfg.kappa.context("--kappa is required")?;
    let zs = cfg.z_values()?;
    bounds::validate_z_list(&zs)?;
    let opts = cfg.bounds_options();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build()?;
    let results: Vec<(f64, tfwd_core::Result<BoundsReport>)> =
        pool.install(|| zs.par_iter().map(|&z| (z, bounds::bounds_report(z, kappa, &opts))).collect());

    let csv_path = cfg.out.join("sweep.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    let mut ok = Vec::new();
    let mut errors = Vec::new();
    let mut solver_failed = false;
    for (z, r) in &results {
        let row = match r {
            Ok(r) => {
                ok.push(*r);
                SweepRow {
                    z: *z,
                    kappa,
                    upper: Some(r.upper),
                    lower: Some(r.lower),
                    e_tf: Some(r.e_tf),
                    upper_gap_over_Z2: Some(r.upper_gap_over_z2),
                    lower_gap_over_Z2: Some(r.lower_gap_over_z2),
                    s0: Some(r.s0),
                    lemma_l_gap: Some(r.lemma_l_gap),
                    errors: String::new(),
                }
            }
            Err(e) => {
                solver_failed |= matches!(e, tfwd_core::Error::Solver { .. });
                errors.push(serde_json::json!({ "Z": z, "error": e.to_string() }));
                SweepRow {
                    z: *z,
                    kappa,
                    upper: None,
                    lower: None,
                    e_tf: None,
                    upper_gap_over_Z2: None,
                    lower_gap_over_Z2: None,
                    s0: None,
                    lemma_l_gap: None,
                    errors: e.to_string(),
                }
            }
        };
        w.serialize(row)?;
    }
    w.flush()?;
    let summary = bounds::summarize(&ok);
    if let Some(s) = &summary {
        say!(
            "log-log slope of -upper: {:.4}; upper gap/Z^2 in [{:.4}, {:.4}]; lower gap/Z^2 in [{:.4e}, {:.4e}]",
            s.loglog_slope, s.upper_gap_min, s.upper_gap_max, s.lower_gap_min, s.lower_gap_max
        );
    }
    for r in &ok {
        say!("Z = {:>6}: upper {:.6e}, lower {:.6e}, E_TF {:.6e}", r.z, r.upper, r.lower, r.e_tf);
    }
    let json_path = cfg.out.join("sweep.json");
    write_json(
        &json_path,
        &serde_json::json!({
            "kappa": kappa,
            "lambda": opts.lambda,
            "beta": opts.beta,
            "grid": {
                "tfw_nodes": opts.tfw.nodes, "tfw_r_min_factor": opts.tfw.r_min_factor, "tfw_r_max": opts.tfw.r_max,
                "tf_x_min": opts.tf_grid.x_min, "tf_x_max": opts.tf_grid.x_max, "tf_nodes": opts.tf_grid.nodes,
            },
            "tolerances": { "tfw_residual": opts.tfw.tol },
            "N_ref": "Z",
            "fit": summary,
            "reports": ok,
            "errors": errors,
        }),
    )?;
    Ok(Outcome { outputs: vec![csv_path, json_path], check_failed: !errors.is_empty() && !solver_failed, solver_failed })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleiInput {
    pub centers: Vec<[f64; 3]>,
    pub charges: Vec<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(default)]
    pub lambda: Option<f64>,
}

pub fn stability(cfg: &RunConfig, nuclei: &Path, variant: BallTermVariant) -> anyhow::Result<Outcome> {
    let text = std::fs::read_to_string(nuclei).with_context(|| format!("reading {}", nuclei.display()))?;
    let input: NucleiInput = serde_json::from_str(&text).with_context(|| format!("parsing {}", nuclei.display()))?;
    let c = input.c.unwrap_or(cfg.c);
    let conf = NuclearConfiguration::new(input.centers, input.charges, c, input.lambda.unwrap_or(cfg.lambda))?;
    let cert = stability::molecular_certificate_with(&conf, input.n, variant)?;
    let zmax = stability::z_max(c, variant);
    let violated: Vec<String> = cert
        .atoms
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.feasible)
        .map(|(k, a)| {
            format!(
                "nucleus {k}: c (B + 3/4) pi kappa^4 / delta^3 <= Z^2/8 fails for Z = {} (Z_max = {zmax:.6} with B = {})",
                a.z,
                variant.constant()
            )
        })
        .collect();
    let atoms: Vec<_> = cert
        .atoms
        .iter()
        .map(|a| {
            serde_json::json!({
                "Z": a.z, "kappa": a.kappa, "D": a.d, "s": a.s, "ln_s": ln_sinh(a.arsinh_s),
                "term_2": 0.0, "term_2_discriminant": a.term_2_discriminant,
                "term_3a": a.term_3a, "term_4a": a.term_4a, "term_5a": a.term_5a,
                "repulsion": a.repulsion, "feasible": a.feasible,
            })
        })
        .collect();
    let report = serde_json::json!({
        "c": c,
        "N": cert.n,
        "K": conf.len(),
        "ball_term_variant": variant,
        "atoms": atoms,
        "linear_N": cert.linear_n,
        "C_c": cert.c_c,
        "tooth_constant": cert.tooth_constant,
        "raw_total": cert.raw_total,
        "total": cert.total,
        "per_particle": cert.per_particle,
        "feasible": cert.feasible,
        "violated": violated,
        "z_max_paper": stability::z_max_paper(c),
        "z_max_rederived": stability::z_max_rederived(c),
        "z_max_strict": stability::z_max_strict(c),
        "z_max_ratio_rederived_over_paper": stability::z_max_rederived(c) / stability::z_max_paper(c),
    });
    say!("{}", serde_json::to_string_pretty(&report)?);
    let path = cfg.out.join("stability.json");
    write_json(&path, &report)?;
    Ok(Outcome::ok(vec![path]))
}

pub fn specfun_table(cfg: &RunConfig, t_min: f64, t_max: f64, points: usize) -> anyhow::Result<Outcome> {
    if !(t_min > 0.0 && t_max > t_min) || points < 2 {
        anyhow::bail!("need 0 < t-min < t-max and at least 2 points");
    }
    let path: PathBuf = cfg.out.join("specfun_table.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["t", "f_sq", "F", "tf", "X"])?;
    let (a, b) = (t_min.ln(), t_max.ln());
    for i in 0..points {
        let t = (a + (b - a) * i as f64 / (points - 1) as f64).exp();
        w.write_record([t, raw::f_sq(t), specfun::f_int(t)?, raw::tf(t), raw::x(t)].map(|v| format!("{v:e}")))?;
    }
    w.flush()?;
    say!("wrote {} rows to {}", points, path.display());
    Ok(Outcome::ok(vec![path]))
}

/// `ln sinh(a)`, finite where `sinh(a)` overflows.
fn ln_sinh(a: f64) -> f64 {
    if a > 20.0 {
        a - std::f64::consts::LN_2 + (-2.0 * a).exp().ln_1p()
    } else {
        a.sinh().ln()
    }
}
