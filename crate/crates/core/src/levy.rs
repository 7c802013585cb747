//! Lévy representation of the inverse local time at 0.
//!
//! For a finite chain the inverse local time is a compound Poisson
//! subordinator with drift: jumps (excursions) arrive at rate `r_0` per unit
//! local time and have the completely monotone density
//! `S(y) = Σ λ_k e^{-x_k y}`. The Lévy density is `n(y) = r_0 S(y)` and
//!
//! ```text
//! ψ(z) = b z + ∫ (1 - e^{-z y}) n(y) dy = b z + r_0 Σ λ_k z / (x_k (z + x_k)).
//! ```

use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::error::{invalid_arg, Error, Result};
use crate::jfraction::jfraction_from_chain;
use crate::spectral::{spectrum, SpectralMeasure};

/// How local time at 0 is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Local time is the occupation time of state 0: `b = 1`, `r_0 = a_0`.
    #[serde(rename = "chain-units")]
    ChainUnits,
    /// Occupation time divided by `2 m_0`: `b = 2 m_0`, `r_0 = 2 m_0 a_0`.
    /// Needed for refinement, where `m_0 → 0`.
    #[serde(rename = "speed-units")]
    SpeedUnits,
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Convention::ChainUnits => "chain-units",
            Convention::SpeedUnits => "speed-units",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyRepresentation {
    pub drift: f64,
    #[serde(rename = "rate")]
    pub excursion_rate: f64,
    pub convention: Convention,
    #[serde(flatten)]
    pub measure: SpectralMeasure,
}

impl LevyRepresentation {
    pub fn new(
        drift: f64,
        excursion_rate: f64,
        measure: SpectralMeasure,
        convention: Convention,
    ) -> Result<Self> {
        if !(drift >= 0.0) || !drift.is_finite() {
            return invalid_arg("levy_measure", format!("drift must be >= 0, got {drift}"));
        }
        if !(excursion_rate > 0.0) || !excursion_rate.is_finite() {
            return invalid_arg(
                "levy_measure",
                format!("excursion rate must be > 0, got {excursion_rate}"),
            );
        }
        Ok(LevyRepresentation {
            drift,
            excursion_rate,
            measure,
            convention,
        })
    }

    /// Full pipeline: chain → J-fraction → spectrum → representation.
    pub fn from_chain(chain: &ChainSpec, convention: Convention) -> Result<Self> {
        let measure = spectrum(&jfraction_from_chain(chain))?;
        Self::from_chain_and_measure(chain, measure, convention)
    }

    /// Attaches drift and rate for `chain` to an already computed spectrum.
    pub fn from_chain_and_measure(
        chain: &ChainSpec,
        measure: SpectralMeasure,
        convention: Convention,
    ) -> Result<Self> {
        let a0 = chain.rate(0);
        let (drift, rate) = match convention {
            Convention::ChainUnits => (1.0, a0),
            Convention::SpeedUnits => {
                let scale = 2.0 * chain.speed_mass_at_zero();
                (scale, scale * a0)
            }
        };
        Self::new(drift, rate, measure, convention)
    }

    /// Excursion-length transform `Σ λ_k / (z + x_k)`.
    pub fn excursion_transform(&self, z: f64) -> f64 {
        crate::spectral::stieltjes_eval(&self.measure, z)
    }
}

/// `n(y) = r_0 Σ λ_k e^{-y x_k}`.
pub fn levy_density(rep: &LevyRepresentation, y: f64) -> f64 {
    rep.excursion_rate
        * rep
            .measure
            .atoms()
            .iter()
            .map(|&(x, w)| w * (-y * x).exp())
            .sum::<f64>()
}

/// `r_0 Σ λ_k / (x_k (1 + x_k))`, i.e. `∫ μ(dx) / (x (1 + x))` for
/// `μ = r_0 Σ λ_k δ_{x_k}`.
pub fn knight_functional(rep: &LevyRepresentation) -> f64 {
    rep.excursion_rate
        * rep
            .measure
            .atoms()
            .iter()
            .map(|&(x, w)| w / (x * (1.0 + x)))
            .sum::<f64>()
}

/// `ψ(z) = b z + r_0 Σ λ_k z / (x_k (z + x_k))`.
pub fn laplace_exponent(rep: &LevyRepresentation, z: f64) -> f64 {
    rep.drift * z
        + rep.excursion_rate
            * rep
                .measure
                .atoms()
                .iter()
                .map(|&(x, w)| w * z / (x * (z + x)))
                .sum::<f64>()
}

/// `∫_z^∞ n(y) dy = r_0 Σ (λ_k / x_k) e^{-z x_k}`.
pub fn tail_mass(rep: &LevyRepresentation, z: f64) -> f64 {
    rep.excursion_rate
        * rep
            .measure
            .atoms()
            .iter()
            .map(|&(x, w)| w / x * (-z * x).exp())
            .sum::<f64>()
}

/// `max_z |tail_a(z) - tail_b(z)| / max(tail_b(z), 1e-300)`.
pub fn tail_convergence_gap(
    rep_a: &LevyRepresentation,
    rep_b: &LevyRepresentation,
    z_grid: &[f64],
) -> Result<f64> {
    if z_grid.is_empty() || z_grid.iter().any(|&z| !(z > 0.0)) {
        return invalid_arg("tail_convergence_gap", "grid must be nonempty and positive");
    }
    Ok(z_grid
        .iter()
        .map(|&z| {
            let a = tail_mass(rep_a, z);
            let b = tail_mass(rep_b, z);
            (a - b).abs() / b.max(1e-300)
        })
        .fold(0.0, f64::max))
}

/// Sign check of one difference order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCheck {
    pub order: usize,
    pub passed: bool,
    /// Minimum of `(-1)^j Δ^j f` over the grid.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub tolerance: f64,
    pub orders: Vec<OrderCheck>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.orders.iter().all(|o| o.passed)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.orders.iter().find(|o| !o.passed).map(|o| o.order)
    }
}

/// Relative tolerance on forward differences, scaled by the largest sample.
pub const MONOTONICITY_TOL: f64 = 1e-9;

/// Checks `(-1)^j Δ^j n >= -tol` for `j = 1..=order` on a uniform grid,
/// with `tol = 1e-9 · max |n|`.
pub fn monotonicity_profile(samples: &[(f64, f64)], order: usize) -> Result<MonotonicityReport> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidSamples(format!(
            "difference order must be in 1..=4, got {order}"
        )));
    }
    if samples.len() < order + 1 {
        return Err(Error::InvalidSamples(format!(
            "grid of {} points is too short for order {order}",
            samples.len()
        )));
    }
    let h = samples[1].0 - samples[0].0;
    if !(h > 0.0) {
        return Err(Error::InvalidSamples(
            "grid must be strictly increasing".into(),
        ));
    }
    if samples
        .windows(2)
        .any(|w| ((w[1].0 - w[0].0) - h).abs() > 1e-9 * h + 4.0 * f64::EPSILON * w[1].0.abs())
    {
        return Err(Error::InvalidSamples("grid spacing must be uniform".into()));
    }
    let scale = samples.iter().fold(0.0_f64, |m, s| m.max(s.1.abs()));
    let tolerance = MONOTONICITY_TOL * scale;
    let mut diffs: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut orders = Vec::with_capacity(order);
    for j in 1..=order {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let worst = diffs.iter().map(|d| sign * d).fold(f64::INFINITY, f64::min);
        orders.push(OrderCheck {
            order: j,
            passed: worst >= -tolerance,
            worst,
        });
    }
    Ok(MonotonicityReport { tolerance, orders })
}

/// Samples `n(y)` on `ys`.
pub fn sample_density(rep: &LevyRepresentation, ys: &[f64]) -> Vec<(f64, f64)> {
    ys.iter().map(|&y| (y, levy_density(rep, y))).collect()
}
