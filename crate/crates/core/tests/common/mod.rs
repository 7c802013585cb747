#![allow(dead_code)]

use gapdiff::{ChainSpec, SpectralMeasure};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const Z_POINTS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Chain with top state in `1..=max_top`, log-uniform rates on [0.1, 10]
/// and interior right probabilities in (0.05, 0.95).
pub fn random_chain<R: Rng>(rng: &mut R, max_top: usize) -> ChainSpec {
    let top = rng.random_range(1..=max_top);
    let rates = (0..=top)
        .map(|_| 10f64.powf(rng.random_range(-1.0..1.0)))
        .collect();
    let interior: Vec<f64> = (1..top).map(|_| rng.random_range(0.05..0.95)).collect();
    ChainSpec::with_interior_probs(rates, &interior).unwrap()
}

/// `size` atoms with locations spread over [0.1, 10] and weights in [0.1, 1].
pub fn random_measure<R: Rng>(rng: &mut R, size: usize) -> SpectralMeasure {
    let atoms = (0..size)
        .map(|k| {
            // one location per log-spaced slot keeps the atoms apart
            let lo = -1.0 + 2.0 * k as f64 / size as f64;
            let hi = -1.0 + 2.0 * (k as f64 + 0.8) / size as f64;
            (
                10f64.powf(rng.random_range(lo..hi)),
                rng.random_range(0.1..1.0),
            )
        })
        .collect();
    SpectralMeasure::new(atoms).unwrap()
}

pub fn two_state() -> ChainSpec {
    ChainSpec::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 0.0]).unwrap()
}

pub fn three_state() -> ChainSpec {
    ChainSpec::with_interior_probs(vec![1.0, 1.0, 1.0], &[0.5]).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Uniform grid `start, start + h, ...` with `n` points.
pub fn uniform_grid(start: f64, h: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + h * i as f64).collect()
}

pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (min.ln(), max.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
