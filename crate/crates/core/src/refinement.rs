//! Finite-to-continuum refinement.
//!
//! A target speed measure is discretized on uniform grids of increasing size;
//! each discretization is a finite chain whose Lévy representation (in speed
//! units) is computed through the continued-fraction pipeline. The report
//! tracks `ψ_N`, `n_N`, the Knight functional and tail gaps between
//! consecutive sizes.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{
    chain_from_speed_measure, first_passage_transform, ChainSpec, Endpoint, SpeedMeasureSpec,
};
use crate::error::{invalid_arg, Result};
use crate::levy::{
    knight_functional, laplace_exponent, levy_density, tail_convergence_gap, Convention,
    LevyRepresentation,
};

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementPlan {
    pub target: SpeedMeasureSpec,
    pub sizes: Vec<usize>,
    /// Right end `L` of the discretized interval.
    pub domain_cutoff: f64,
}

impl RefinementPlan {
    /// `cutoff` is required when the target's endpoint is infinite; for a
    /// finite endpoint it defaults to (and may not exceed) the endpoint.
    pub fn new(target: SpeedMeasureSpec, sizes: Vec<usize>, cutoff: Option<f64>) -> Result<Self> {
        if sizes.len() < 2 {
            return invalid_arg("refinement", "need at least two grid sizes");
        }
        if sizes[0] == 0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
            return invalid_arg(
                "refinement",
                "grid sizes must be positive and strictly increasing",
            );
        }
        let domain_cutoff = match (target.endpoint, cutoff) {
            (Endpoint::Finite(l), None) => l,
            (Endpoint::Finite(l), Some(c)) if c > 0.0 && c <= l => c,
            (Endpoint::Finite(l), Some(c)) => {
                return invalid_arg("refinement", format!("cutoff {c} outside (0, {l}]"))
            }
            (Endpoint::Infinite, Some(c)) if c > 0.0 && c.is_finite() => c,
            (Endpoint::Infinite, _) => {
                return invalid_arg(
                    "refinement",
                    "an infinite endpoint needs a finite positive cutoff",
                )
            }
        };
        Ok(RefinementPlan {
            target,
            sizes,
            domain_cutoff,
        })
    }

    pub fn convention(&self) -> Convention {
        Convention::SpeedUnits
    }

    /// Uniform grid of `n + 1` points on `[0, L]`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let h = self.domain_cutoff / n as f64;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.domain_cutoff
                } else {
                    i as f64 * h
                }
            })
            .collect()
    }
}

/// Truncation for an infinite endpoint: `5 √(max y)`.
pub fn cutoff_for_y_grid(y_grid: &[f64]) -> f64 {
    5.0 * y_grid.iter().fold(0.0_f64, |m, &y| m.max(y)).sqrt()
}

/// One chain per grid size.
pub fn refine(plan: &RefinementPlan) -> Result<Vec<ChainSpec>> {
    plan.sizes
        .iter()
        .map(|&n| chain_from_speed_measure(&plan.target, &plan.grid(n)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub size: usize,
    pub representation: LevyRepresentation,
    /// `(z, ψ_N(z))`
    pub psi: Vec<(f64, f64)>,
    /// `(y, n_N(y))`
    pub density: Vec<(f64, f64)>,
    pub knight: f64,
    pub psi_slope: f64,
    pub density_slope: f64,
    /// Largest relative gap between the spectral `ψ_N` and the one rebuilt
    /// from the resolvent oracle, `b z + r_0 (1 - T(z))`.
    pub oracle_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub cutoff: f64,
    pub levels: Vec<LevelReport>,
    /// `tail_convergence_gap(level i, level i + 1)` on the y-grid.
    pub gaps: Vec<f64>,
}

/// JSON summary of a [`ConvergenceReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub sizes: Vec<usize>,
    pub cutoff: f64,
    pub convention: Convention,
    pub slopes: SlopeSummary,
    pub knight: Vec<f64>,
    pub drift: Vec<f64>,
    pub gaps: Vec<f64>,
    pub oracle_deviation: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeSummary {
    pub psi: Vec<f64>,
    pub density: Vec<f64>,
}

impl ConvergenceReport {
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            sizes: self.levels.iter().map(|l| l.size).collect(),
            cutoff: self.cutoff,
            convention: Convention::SpeedUnits,
            slopes: SlopeSummary {
                psi: self.levels.iter().map(|l| l.psi_slope).collect(),
                density: self.levels.iter().map(|l| l.density_slope).collect(),
            },
            knight: self.levels.iter().map(|l| l.knight).collect(),
            drift: self.levels.iter().map(|l| l.representation.drift).collect(),
            gaps: self.gaps.clone(),
            oracle_deviation: self.levels.iter().map(|l| l.oracle_deviation).collect(),
        }
    }

    pub fn last(&self) -> &LevelReport {
        self.levels.last().expect("a plan has at least two sizes")
    }
}

/// Runs the pipeline at every size of `plan` and gathers diagnostics.
pub fn convergence_experiment(
    plan: &RefinementPlan,
    z_grid: &[f64],
    y_grid: &[f64],
) -> Result<ConvergenceReport> {
    if z_grid.is_empty() || y_grid.is_empty() {
        return invalid_arg("convergence_experiment", "grids must be nonempty");
    }
    if z_grid
        .iter()
        .chain(y_grid)
        .any(|&v| !(v > 0.0) || !v.is_finite())
    {
        return invalid_arg("convergence_experiment", "grid values must be positive");
    }
    let chains = refine(plan)?;
    let levels: Vec<LevelReport> = plan
        .sizes
        .par_iter()
        .zip(chains.par_iter())
        .map(|(&size, chain)| level_report(size, chain, z_grid, y_grid))
        .collect::<Result<_>>()?;
    let gaps = levels
        .windows(2)
        .map(|w| tail_convergence_gap(&w[0].representation, &w[1].representation, y_grid))
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport {
        cutoff: plan.domain_cutoff,
        levels,
        gaps,
    })
}

fn level_report(
    size: usize,
    chain: &ChainSpec,
    z_grid: &[f64],
    y_grid: &[f64],
) -> Result<LevelReport> {
    let rep = LevyRepresentation::from_chain(chain, Convention::SpeedUnits)?;
    let psi: Vec<(f64, f64)> = z_grid
        .iter()
        .map(|&z| (z, laplace_exponent(&rep, z)))
        .collect();
    let density: Vec<(f64, f64)> = y_grid.iter().map(|&y| (y, levy_density(&rep, y))).collect();
    let mut oracle_deviation = 0.0_f64;
    for &(z, value) in &psi {
        let t = first_passage_transform(chain, z)?;
        let from_oracle = rep.drift * z + rep.excursion_rate * (1.0 - t);
        oracle_deviation = oracle_deviation.max((value - from_oracle).abs() / value);
    }
    Ok(LevelReport {
        size,
        knight: knight_functional(&rep),
        psi_slope: central_log_log_slope(&psi),
        density_slope: central_log_log_slope(&density),
        psi,
        density,
        representation: rep,
        oracle_deviation,
    })
}

/// Least-squares slope of `ln v` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    sxy / sxx
}

/// [`log_log_slope`] over the central half of `points` (by index).
pub fn central_log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    if n < 4 {
        return log_log_slope(points);
    }
    log_log_slope(&points[n / 4..n - n / 4])
}
