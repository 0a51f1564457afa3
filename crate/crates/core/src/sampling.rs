//! Seeded random inputs for property checks: smooth radial densities, nuclear
//! configurations and ball-smeared trial measures.

use crate::edf::distance;
use crate::error::{Error, Result};
use crate::radial::{RadialDensity, RadialGrid};
use crate::stability::{BallCharge, NuclearConfiguration};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub use rand::SeedableRng;
pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sum of one to three terms `a exp(-b r)` or `a exp(-b r^2)` on `grid`.
pub fn smooth_density(rng: &mut SampleRng, grid: Arc<RadialGrid>) -> RadialDensity {
    let terms: Vec<(f64, f64, bool)> = (0..rng.gen_range(1..=3))
        .map(|_| (10f64.powf(rng.gen_range(-1.0..2.0)), rng.gen_range(0.3..4.0), rng.gen_bool(0.5)))
        .collect();
    RadialDensity::from_fn(grid, |r| {
        terms.iter().map(|(a, b, gauss)| a * (-b * if *gauss { r * r } else { r }).exp()).sum()
    })
    .expect("positive finite values")
}

/// `k` equal charges `z` placed uniformly in a cube of side `(k/density)^{1/3}`,
/// rejecting positions closer than `min_sep` to an earlier nucleus.
pub fn random_configuration(
    rng: &mut SampleRng,
    k: usize,
    z: f64,
    number_density: f64,
    min_sep: f64,
    c: f64,
    lambda: f64,
) -> Result<NuclearConfiguration> {
    let side = (k as f64 / number_density).cbrt();
    let mut centers: Vec<[f64; 3]> = Vec::with_capacity(k);
    let mut tries = 0;
    while centers.len() < k {
        tries += 1;
        if tries > 100_000 {
            return Err(Error::Structural(format!("cannot place {k} nuclei with separation {min_sep}")));
        }
        let p = [rng.gen_range(0.0..side), rng.gen_range(0.0..side), rng.gen_range(0.0..side)];
        if centers.iter().all(|q| distance(&p, q) >= min_sep) {
            centers.push(p);
        }
    }
    NuclearConfiguration::new(centers, vec![z; k], c, lambda)
}

/// Disjoint uniform balls, each strictly inside one Voronoi cell, with
/// radii `radius_fraction * min D_k` and charges up to `max_charge`.
pub fn random_trial_measure(
    rng: &mut SampleRng,
    config: &NuclearConfiguration,
    count: usize,
    radius_fraction: f64,
    max_charge: f64,
) -> Vec<BallCharge> {
    let d_min = config.d.iter().cloned().fold(f64::INFINITY, f64::min);
    let radius = radius_fraction * if d_min.is_finite() { d_min } else { 1.0 };
    let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
    for c in &config.centers {
        for i in 0..3 {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    let pad = 2.0 * d_min.min(10.0).max(radius);
    let mut balls: Vec<BallCharge> = Vec::with_capacity(count);
    let mut tries = 0;
    while balls.len() < count && tries < 100 * count {
        tries += 1;
        let center: [f64; 3] = std::array::from_fn(|i| rng.gen_range(lo[i] - pad..hi[i] + pad));
        let k = config.cell_of(&center);
        let dk = distance(&center, &config.centers[k]);
        let inside = config.centers.iter().enumerate().all(|(l, r)| {
            l == k || {
                let dl = distance(&center, r);
                (dl * dl - dk * dk) / (2.0 * distance(&config.centers[k], r)) >= radius * (1.0 + 1e-9)
            }
        });
        let free = balls.iter().all(|b| distance(&b.center, &center) >= (b.radius + radius) * (1.0 + 1e-9));
        if inside && free {
            balls.push(BallCharge { center, radius, charge: rng.gen_range(0.0..max_charge) });
        }
    }
    balls
}
