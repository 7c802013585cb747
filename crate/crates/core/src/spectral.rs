//! Spectral measure of a J-fraction.
//!
//! The last approximant splits into partial fractions
//! `K_N(z)/L_N(z) = Σ_k λ_k / (z + x_k)` with distinct poles `x_k > 0` and
//! positive Christoffel numbers `λ_k`. The poles are the eigenvalues of the
//! Jacobi matrix `tridiag(√k_{n+1}, l_n, √k_{n+1})`, and `λ_k = k_1 v_k[0]^2`
//! where `v_k` is the normalized eigenvector.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jfraction::{recurrence_values, JFraction};
use crate::tridiag::{definite_tridiagonal_eigen, min_relative_gap, symmetric_tridiagonal_eigen};

/// Relative gap below which two poles are reported as near-degenerate.
pub const DEGENERACY_GAP: f64 = 1e3 * f64::EPSILON;

/// Relative tolerance for the eigenvector-vs-residue weight cross-check.
pub const WEIGHT_CHECK_TOL: f64 = 1e-8;

/// Atoms `(x_k, λ_k)` sorted by increasing `x_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomsFile", into = "AtomsFile")]
pub struct SpectralMeasure {
    atoms: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct AtomsFile {
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<AtomsFile> for SpectralMeasure {
    type Error = Error;

    fn try_from(f: AtomsFile) -> Result<Self> {
        SpectralMeasure::new(f.atoms.into_iter().map(|[x, w]| (x, w)).collect())
    }
}

impl From<SpectralMeasure> for AtomsFile {
    fn from(sm: SpectralMeasure) -> Self {
        AtomsFile {
            atoms: sm.atoms.into_iter().map(|(x, w)| [x, w]).collect(),
        }
    }
}

impl SpectralMeasure {
    /// Sorts the atoms and checks positivity and distinctness.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(x, w) in &atoms {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom location must be positive, got {x}"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom weight must be positive, got {w}"
                )));
            }
        }
        if atoms.windows(2).any(|p| p[1].0 <= p[0].0) {
            return Err(Error::InvalidMeasure(
                "atom locations must be distinct".into(),
            ));
        }
        Ok(SpectralMeasure { atoms })
    }

    /// The empty measure (no atoms).
    pub fn empty() -> Self {
        SpectralMeasure { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn locations(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.0)
    }

    pub fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms.iter().map(|a| a.1)
    }

    /// `Σ λ_k`.
    pub fn total_weight(&self) -> f64 {
        self.weights().sum()
    }

    /// `Σ λ_k / x_k`, the mass of the density `Σ λ_k e^{-x_k y}`.
    /// Equals 1 for measures coming from a chain.
    pub fn density_mass(&self) -> f64 {
        self.atoms.iter().map(|&(x, w)| w / x).sum()
    }

    /// `∫ y^j Σ λ_k e^{-x_k y} dy = j! Σ λ_k / x_k^{j+1}`.
    pub fn density_moment(&self, j: u32) -> f64 {
        let fact: f64 = (1..=j).map(f64::from).product();
        fact * self
            .atoms
            .iter()
            .map(|&(x, w)| w / x.powi(j as i32 + 1))
            .sum::<f64>()
    }

    /// `∫_0^d Σ λ_k e^{-x_k y} dy`; the excursion-length CDF for chain measures.
    pub fn density_cdf(&self, d: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(x, w)| w / x * -(-x * d).exp_m1())
            .sum()
    }
}

/// Jacobi matrix data: diagonal `l_n`, off-diagonal `√k_{n+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

/// The Jacobi matrix whose eigenvalues are the poles `x_k`.
///
/// `L_N(z) = det(z I + J)`, so zeros of `L_N` sit at `-x_k`.
pub fn jacobi_matrix(jf: &JFraction) -> JacobiMatrix {
    JacobiMatrix {
        diag: jf.denominators().to_vec(),
        off: jf.numerators()[1..].iter().map(|k| k.sqrt()).collect(),
    }
}

/// Spectrum plus the diagnostics gathered while computing it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub measure: SpectralMeasure,
    /// Weights from the residue route `K_N(-x_k) / L_N'(-x_k)`.
    pub residue_weights: Vec<f64>,
    /// Largest relative disagreement between the two weight routes.
    pub weight_discrepancy: f64,
    /// Per atom, the relative error the residue route can itself incur:
    /// `Σ δ / (|u - x_k| - δ)` over the other poles and the zeros `u` of
    /// `K_N`, with `δ = 8 N eps (|x_k| + |u|)` the error of a computed
    /// difference. Infinite when a zero cancels a pole to within rounding,
    /// in which case the residue carries no digits. Zero when the residues
    /// came from the plain recurrences.
    pub residue_error_bounds: Vec<f64>,
    pub min_relative_gap: f64,
}

impl SpectrumReport {
    pub fn near_degenerate(&self) -> bool {
        self.min_relative_gap < DEGENERACY_GAP
    }

    /// Whether every weight agrees with its residue within
    /// `max(WEIGHT_CHECK_TOL, bound)`, the bound being the residue route's
    /// own error estimate.
    pub fn weights_consistent(&self) -> bool {
        self.measure
            .atoms
            .iter()
            .zip(&self.residue_weights)
            .zip(&self.residue_error_bounds)
            .all(|((&(_, w), &r), &bound)| (r - w).abs() / w <= WEIGHT_CHECK_TOL.max(bound))
    }
}

/// Atoms of `jf`'s spectral measure. See [`spectrum_report`] for diagnostics.
pub fn spectrum(jf: &JFraction) -> Result<SpectralMeasure> {
    spectrum_report(jf).map(|r| r.measure)
}

/// Poles and weights from the first eigenvector components of the Jacobi
/// matrix, cross-checked against the residues `K_N(-x_k) / L_N'(-x_k)`.
///
/// Positive definite Jacobi matrices go through the relatively accurate
/// `L D Lᵀ` solver, so small poles keep full relative precision. Residues
/// are then formed from the zeros of `L_N` (the poles) and of `K_N` (the
/// spectrum of the trailing block), `k_1 Π(y_j - x_k) / Π_{j≠k}(x_j - x_k)`,
/// which avoids the cancellation of evaluating the recurrences near a tiny
/// pole. Anything else falls back to QL and recurrence residues.
pub fn spectrum_report(jf: &JFraction) -> Result<SpectrumReport> {
    let k1 = jf.numerators()[0];
    let definite = jf
        .pivots()
        .and_then(|p| definite_tridiagonal_eigen(&p, &jf.numerators()[1..]));
    let (eig, numerator_zeros) = match definite {
        Some(eig) => {
            let inner = jf.pivots_from(1).and_then(|p| {
                definite_tridiagonal_eigen(&p, &jf.numerators()[2.min(jf.depth())..])
            });
            (eig, inner.map(|e| e.values))
        }
        None => {
            let jm = jacobi_matrix(jf);
            (symmetric_tridiagonal_eigen(&jm.diag, &jm.off)?, None)
        }
    };

    let mut atoms = Vec::with_capacity(eig.values.len());
    let mut residue_weights = Vec::with_capacity(eig.values.len());
    let mut weight_discrepancy = 0.0_f64;
    let mut residue_error_bounds = Vec::with_capacity(eig.values.len());
    for (i, (&x, &v)) in eig.values.iter().zip(&eig.first_components).enumerate() {
        if !(x > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "pole at x = {x} is not positive"
            )));
        }
        let w = k1 * v * v;
        if !(w > 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "Christoffel weight at x = {x} underflowed to zero"
            )));
        }
        let (residue, bound) = match &numerator_zeros {
            Some(ys) => {
                let unit = 8.0 * eig.values.len() as f64 * f64::EPSILON;
                let factor_error = |u: f64| {
                    let delta = unit * (x + u.abs());
                    let size = (u - x).abs() - delta;
                    if size > 0.0 {
                        delta / size
                    } else {
                        f64::INFINITY
                    }
                };
                let mut r = k1;
                let mut bound = 0.0;
                for (j, &xj) in eig.values.iter().enumerate() {
                    if j != i {
                        r /= xj - x;
                        bound += factor_error(xj);
                    }
                    if let Some(&y) = ys.get(j) {
                        r *= y - x;
                        bound += factor_error(y);
                    }
                }
                (r, bound)
            }
            None => {
                let (k, _, dl) = recurrence_values(jf, -x);
                (k / dl, 0.0)
            }
        };
        residue_error_bounds.push(bound);
        weight_discrepancy = weight_discrepancy.max((residue - w).abs() / w);
        residue_weights.push(residue);
        atoms.push((x, w));
    }
    let gap = min_relative_gap(&eig.values);
    if gap < DEGENERACY_GAP {
        warn!("near-degenerate spectrum: minimum relative pole gap {gap:e}");
    }
    let report = SpectrumReport {
        // poles may coincide numerically; keep them rather than failing
        measure: SpectralMeasure { atoms },
        residue_weights,
        weight_discrepancy,
        residue_error_bounds,
        min_relative_gap: gap,
    };
    if !report.weights_consistent() {
        warn!(
            "eigenvector and residue weights disagree by {weight_discrepancy:e} (relative), beyond the residue rounding bound"
        );
    }
    Ok(report)
}

/// `Σ_k λ_k / (z + x_k)` for `z ≥ 0`.
pub fn stieltjes_eval(sm: &SpectralMeasure, z: f64) -> f64 {
    sm.atoms.iter().map(|&(x, w)| w / (z + x)).sum()
}

/// Step function `Φ(t) = Σ {λ_k : x_k < t}`.
pub fn step_function(sm: &SpectralMeasure, t: f64) -> f64 {
    sm.atoms.iter().take_while(|a| a.0 < t).map(|a| a.1).sum()
}

/// Inverse map: Lanczos on `diag(x_k)` from the start vector
/// `(√(λ_k / Σλ))_k`, with full reorthogonalization.
/// Returns `k_1 = Σλ`, `k_{n+1} = β_n^2`, `l_n = α_n`.
pub fn jacobi_from_atoms(sm: &SpectralMeasure) -> Result<JFraction> {
    let n = sm.len();
    if n == 0 {
        return Err(Error::InvalidMeasure("no atoms".into()));
    }
    let xs: Vec<f64> = sm.locations().collect();
    let total = sm.total_weight();
    let scale = xs.iter().fold(0.0_f64, |m, x| m.max(x.abs()));

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut q: Vec<f64> = sm.weights().map(|w| (w / total).sqrt()).collect();
    let mut alphas = Vec::with_capacity(n);
    let mut betas: Vec<f64> = Vec::with_capacity(n.saturating_sub(1));
    for j in 0..n {
        let mut v: Vec<f64> = xs.iter().zip(&q).map(|(x, qi)| x * qi).collect();
        let alpha = dot(&q, &v);
        alphas.push(alpha);
        basis.push(q.clone());
        if j + 1 == n {
            break;
        }
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
            }
        }
        let beta = dot(&v, &v).sqrt();
        if !(beta > 1e-13 * scale) {
            return Err(Error::InvalidMeasure(format!(
                "Lanczos breakdown at step {}: atoms are not distinct enough",
                j + 1
            )));
        }
        betas.push(beta);
        q = v.into_iter().map(|vi| vi / beta).collect();
    }
    let mut numerators = Vec::with_capacity(n);
    numerators.push(total);
    numerators.extend(betas.iter().map(|b| b * b));
    JFraction::new(numerators, alphas)
}
