use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;
use tfwd_core::edf::{self, AtomicSystem, MolecularSystem, DEFAULT_LAMBDA, PHYSICAL_C};
use tfwd_core::radial::{RadialDensity, RadialGrid};
use tfwd_core::{sampling, specfun, Error};

fn grid() -> Arc<RadialGrid> {
    Arc::new(RadialGrid::log_spaced(1e-6, 40.0, 4000).unwrap())
}

/// Normalized Gaussian `exp(-r^2/w^2)` carrying `n` electrons.
fn gaussian(w: f64, n: f64) -> RadialDensity {
    let norm = n / (PI * w * w).powf(1.5);
    RadialDensity::from_fn(grid(), |r| norm * (-(r * r) / (w * w)).exp()).unwrap()
}

#[test]
fn system_validation() {
    assert!(AtomicSystem::new(-1.0, PHYSICAL_C, DEFAULT_LAMBDA).is_err());
    assert!(AtomicSystem::new(1.0, 0.0, DEFAULT_LAMBDA).is_err());
    assert!(AtomicSystem::new(1.0, PHYSICAL_C, -1.0).is_err());
    assert!((AtomicSystem::with_kappa(80.0, 0.5, DEFAULT_LAMBDA).unwrap().c - 160.0).abs() < 1e-12);
    assert!(matches!(MolecularSystem::new(vec![], vec![], PHYSICAL_C, DEFAULT_LAMBDA), Err(Error::Structural(_))));
    assert!(MolecularSystem::new(vec![[0.0; 3], [0.0; 3]], vec![1.0, 1.0], PHYSICAL_C, DEFAULT_LAMBDA).is_err());
    assert!(MolecularSystem::new(vec![[0.0; 3]], vec![1.0, 2.0], PHYSICAL_C, DEFAULT_LAMBDA).is_err());
}

#[test]
fn energy_terms_sum_to_total() {
    let rho = gaussian(0.8, 3.0);
    let sys = AtomicSystem::physical(3.0).unwrap();
    let e = edf::total_energy_atomic(&rho, &sys).unwrap();
    assert!((e.total - (e.w + e.tf - e.x + e.v_ne + e.d_ee + e.u_nn)).abs() < 1e-12 * e.total.abs());
    assert!((e.n - 3.0).abs() < 1e-10);
    // D of a normalized Gaussian is N^2 / (sqrt(2 pi) w)
    assert!((e.d_ee - 9.0 / ((2.0 * PI).sqrt() * 0.8)).abs() < 1e-9);
    assert!((e.v_ne + 3.0 * 3.0 * 2.0 / (PI.sqrt() * 0.8)).abs() < 1e-9);
}

#[test]
fn exchange_per_particle_bound_is_sharp_at_three_halves_eta() {
    // A homogeneous density at the maximizer of X(t)/t^3 makes X(rho) / (c N)
    // equal (3/2) eta; no smaller per-particle constant can hold.
    let c = PHYSICAL_C;
    let t = specfun::eta0(3.0).unwrap().argmax;
    let rho0 = (c * t).powi(3) / (3.0 * PI * PI);
    let g = Arc::new(RadialGrid::log_spaced(1e-6, 2.0, 2000).unwrap());
    let rho = RadialDensity::from_fn(g, |_| rho0).unwrap();
    let sys = AtomicSystem::new(1.0, c, DEFAULT_LAMBDA).unwrap();
    let x = edf::exchange_energy(&rho, &sys).unwrap();
    let ratio = x / (specfun::exchange_eta() * c * rho.n_electrons());
    assert!((ratio - 1.5).abs() < 1e-9, "{ratio}");
    assert!(x <= specfun::exchange_particle_coefficient() * c * rho.n_electrons() * (1.0 + 1e-12));
}

#[test]
fn nonrelativistic_limits_converge() {
    let rho = gaussian(1.3, 2.0);
    let w_nr = 0.5 * DEFAULT_LAMBDA * edf::gradient_sqrt_norm(&rho).unwrap();
    let tf_nr = edf::tf_energy_nonrel(&rho).unwrap();
    let x_nr = edf::dirac_exchange(&rho).unwrap();
    // the (p/c)^2 correction falls to a ~1e-9 floor set by differentiating p
    // instead of sqrt(rho) on the grid
    let mut last = f64::INFINITY;
    for c in [1e1, 1e2, 1e3, 1e4, 1e8] {
        let sys = AtomicSystem::new(2.0, c, DEFAULT_LAMBDA).unwrap();
        let dev = [
            edf::weizsacker_energy(&rho, &sys).unwrap() / w_nr - 1.0,
            edf::tf_energy(&rho, &sys).unwrap() / tf_nr - 1.0,
            edf::exchange_energy(&rho, &sys).unwrap() / x_nr - 1.0,
        ]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
        assert!(dev < last || dev < 1e-8, "c = {c}: {dev}");
        last = dev;
    }
    assert!(last < 1e-8);
}

#[test]
fn relativistic_terms_below_nonrelativistic() {
    // tf(t) <= (4/5) t^5 and f(t)^2 <= 1.6583 t bound the relativistic terms by
    // their non-relativistic counterparts
    let rho = gaussian(0.05, 10.0);
    let sys = AtomicSystem::new(10.0, 5.0, DEFAULT_LAMBDA).unwrap();
    assert!(edf::tf_energy(&rho, &sys).unwrap() < edf::tf_energy_nonrel(&rho).unwrap());
    let w_nr = 0.5 * DEFAULT_LAMBDA * edf::gradient_sqrt_norm(&rho).unwrap();
    assert!(edf::weizsacker_energy(&rho, &sys).unwrap() < specfun::weizsacker_bracket_max().value * w_nr);
}

#[test]
fn molecular_energy_of_one_centre_is_atomic() {
    let rho = gaussian(0.7, 2.0);
    let mol = MolecularSystem::new(vec![[0.3, -1.0, 2.0]], vec![2.0], PHYSICAL_C, DEFAULT_LAMBDA).unwrap();
    let a = edf::total_energy_molecular(&[rho.clone()], &mol).unwrap();
    let b = edf::total_energy_atomic(&rho, &AtomicSystem::physical(2.0).unwrap()).unwrap();
    assert!((a.total - b.total).abs() < 1e-12 * b.total.abs());
}

#[test]
fn molecular_coulomb_terms_match_gaussian_closed_forms() {
    let (w1, w2, d) = (0.6, 0.9, 1.7);
    let (z1, z2) = (1.0, 3.0);
    let (p1, p2) = (gaussian(w1, 1.0), gaussian(w2, 2.0));
    let mol = MolecularSystem::new(vec![[0.0; 3], [0.0, 0.0, d]], vec![z1, z2], PHYSICAL_C, DEFAULT_LAMBDA).unwrap();
    let e = edf::total_energy_molecular(&[p1.clone(), p2.clone()], &mol).unwrap();
    let erf = libm::erf;
    let self_d = |w: f64, n: f64| n * n / ((2.0 * PI).sqrt() * w);
    let d_ee = self_d(w1, 1.0) + self_d(w2, 2.0) + 2.0 * erf(d / (w1 * w1 + w2 * w2).sqrt()) / d;
    let on_site = |w: f64, n: f64, z: f64| -z * n * 2.0 / (PI.sqrt() * w);
    let v_ne = on_site(w1, 1.0, z1) + on_site(w2, 2.0, z2) - z2 * 1.0 * erf(d / w1) / d - z1 * 2.0 * erf(d / w2) / d;
    assert!((e.d_ee - d_ee).abs() < 1e-7 * d_ee, "{} vs {d_ee}", e.d_ee);
    assert!((e.v_ne - v_ne).abs() < 1e-7 * v_ne.abs(), "{} vs {v_ne}", e.v_ne);
    assert!((e.u_nn - z1 * z2 / d).abs() < 1e-14);
    assert!(edf::total_energy_molecular(&[p1], &mol).is_err());
}

#[test]
fn separated_neutral_atoms_do_not_interact() {
    let rho = gaussian(0.5, 1.0);
    let atom = edf::total_energy_atomic(&rho, &AtomicSystem::physical(1.0).unwrap()).unwrap();
    let mol = MolecularSystem::new(vec![[0.0; 3], [30.0, 0.0, 0.0]], vec![1.0, 1.0], PHYSICAL_C, DEFAULT_LAMBDA).unwrap();
    let e = edf::total_energy_molecular(&[rho.clone(), rho], &mol).unwrap();
    assert!((e.total - 2.0 * atom.total).abs() < 1e-9);
}

proptest! {
    #[test]
    fn weizsacker_dominated_pointwise(seed in 0u64..1000, lc in -1.0f64..3.0) {
        let mut rng = sampling::rng(seed);
        let g = Arc::new(RadialGrid::log_spaced(1e-4, 40.0, 1500).unwrap());
        let rho = sampling::smooth_density(&mut rng, g);
        let c = 10f64.powf(lc);
        let w = edf::weizsacker_density(&rho, c, 1.0).unwrap();
        let grad = edf::gradient_sqrt_density(&rho).unwrap();
        let scale = grad.iter().cloned().fold(0.0, f64::max);
        for (a, b) in w.iter().zip(&grad) {
            prop_assert!(a - b <= 1e-10 * scale);
        }
    }

    #[test]
    fn exchange_particle_bound(seed in 0u64..1000, kappa in 0.05f64..3.0) {
        let mut rng = sampling::rng(seed);
        let g = Arc::new(RadialGrid::log_spaced(1e-4, 40.0, 1500).unwrap());
        let rho = sampling::smooth_density(&mut rng, g);
        let sys = AtomicSystem::with_kappa(20.0, kappa, DEFAULT_LAMBDA).unwrap();
        let x = edf::exchange_energy(&rho, &sys).unwrap();
        prop_assert!(x <= specfun::exchange_particle_coefficient() * sys.c * rho.n_electrons() * (1.0 + 1e-10));
    }

    #[test]
    fn kinetic_terms_nonnegative(seed in 0u64..1000, lc in -1.0f64..4.0) {
        let mut rng = sampling::rng(seed);
        let g = Arc::new(RadialGrid::log_spaced(1e-4, 40.0, 1500).unwrap());
        let rho = sampling::smooth_density(&mut rng, g);
        let sys = AtomicSystem::new(1.0, 10f64.powf(lc), DEFAULT_LAMBDA).unwrap();
        prop_assert!(edf::weizsacker_energy(&rho, &sys).unwrap() >= 0.0);
        prop_assert!(edf::tf_energy(&rho, &sys).unwrap() >= 0.0);
    }
}
