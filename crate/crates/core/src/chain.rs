//! Finite-state gap diffusions reflected at 0.
//!
//! A [`ChainSpec`] is a birth-death chain on ordered positions
//! `0 = b_0 < b_1 < ... < b_N`: exponential holding with rate `a_i` at `b_i`,
//! then a jump right with probability `p_i` or left with `q_i = 1 - p_i`.
//! State 0 always jumps right and the top state always jumps left.
//!
//! Chains are usually obtained by discretizing a speed measure
//! ([`SpeedMeasureSpec`]) on a grid with the generator convention
//! `(1/2) (d/dm)(d/dx)`, see [`chain_from_masses`].
//!
//! [`first_passage_transform`] is the resolvent oracle: the Laplace transform
//! of the excursion length, computed by a direct tridiagonal solve that shares
//! no code with the continued-fraction route.

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};

/// Finite gap diffusion: ordered states, holding rates, right-jump probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    states: Vec<f64>,
    rates: Vec<f64>,
    right_probs: Vec<f64>,
}

impl ChainSpec {
    /// Builds and validates a chain.
    pub fn new(states: Vec<f64>, rates: Vec<f64>, right_probs: Vec<f64>) -> Result<Self> {
        validate_chain(ChainSpec {
            states,
            rates,
            right_probs,
        })
    }

    /// Chain on unit-spaced states `0, 1, ..., N` with the given rates and
    /// interior right probabilities (`p_0 = 1` and `p_N = 0` are filled in).
    pub fn with_interior_probs(rates: Vec<f64>, interior: &[f64]) -> Result<Self> {
        if rates.len() != interior.len() + 2 {
            return Err(Error::InvalidChain(format!(
                "expected {} interior probabilities for {} states, got {}",
                rates.len().saturating_sub(2),
                rates.len(),
                interior.len()
            )));
        }
        let states = (0..rates.len()).map(|i| i as f64).collect();
        let mut probs = Vec::with_capacity(rates.len());
        probs.push(1.0);
        probs.extend_from_slice(interior);
        probs.push(0.0);
        Self::new(states, rates, probs)
    }

    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn right_probs(&self) -> &[f64] {
        &self.right_probs
    }

    /// Index of the top state, `N`. Always at least 1.
    pub fn top(&self) -> usize {
        self.states.len() - 1
    }

    /// Number of states, `N + 1`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn rate(&self, i: usize) -> f64 {
        self.rates[i]
    }

    pub fn right_prob(&self, i: usize) -> f64 {
        self.right_probs[i]
    }

    /// `q_i = 1 - p_i`; exactly 1 at the top state.
    pub fn left_prob(&self, i: usize) -> f64 {
        if i == self.top() {
            1.0
        } else {
            1.0 - self.right_probs[i]
        }
    }

    /// Speed mass at 0 implied by the generator convention,
    /// `m_0 = 1 / (2 a_0 (b_1 - b_0))`.
    pub fn speed_mass_at_zero(&self) -> f64 {
        1.0 / (2.0 * self.rates[0] * (self.states[1] - self.states[0]))
    }

    /// Speed masses at every state implied by the generator convention.
    /// Inverts [`chain_from_masses`].
    pub fn speed_masses(&self) -> Vec<f64> {
        let n = self.top();
        (0..=n)
            .map(|i| {
                if i == n {
                    1.0 / (2.0 * self.rates[n] * (self.states[n] - self.states[n - 1]))
                } else {
                    // right rate r_i = 1 / (2 m_i Δ_i)
                    let right_rate = self.rates[i] * self.right_probs[i];
                    1.0 / (2.0 * right_rate * (self.states[i + 1] - self.states[i]))
                }
            })
            .collect()
    }
}

/// Returns the chain unchanged when every invariant holds, otherwise the first
/// violated one.
pub fn validate_chain(spec: ChainSpec) -> Result<ChainSpec> {
    let n_states = spec.states.len();
    if n_states < 2 {
        return Err(Error::InvalidChain(
            "a chain needs at least two states".into(),
        ));
    }
    if spec.rates.len() != n_states || spec.right_probs.len() != n_states {
        return Err(Error::InvalidChain(format!(
            "length mismatch: {} states, {} rates, {} right probabilities",
            n_states,
            spec.rates.len(),
            spec.right_probs.len()
        )));
    }
    if spec.states[0] != 0.0 {
        return Err(Error::InvalidChain("first state must be 0".into()));
    }
    for (i, w) in spec.states.windows(2).enumerate() {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::InvalidChain(format!(
                "states must be strictly increasing (index {})",
                i + 1
            )));
        }
    }
    for (i, &a) in spec.rates.iter().enumerate() {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidChain(format!(
                "rate must be positive and finite (index {i}, got {a})"
            )));
        }
    }
    let top = n_states - 1;
    if spec.right_probs[0] != 1.0 {
        return Err(Error::InvalidChain("state 0 must reflect right".into()));
    }
    if spec.right_probs[top] != 0.0 {
        return Err(Error::InvalidChain("top state must jump left".into()));
    }
    for i in 1..top {
        let p = spec.right_probs[i];
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidChain(format!(
                "interior right probability must lie in (0, 1) (index {i}, got {p})"
            )));
        }
    }
    Ok(spec)
}

/// Chain from speed masses on a grid.
///
/// Interior state `i`: right rate `1/(2 m_i Δ_i)`, left rate `1/(2 m_i Δ_{i-1})`,
/// with `Δ_i = b_{i+1} - b_i`. State 0 only jumps right, state `N` only left.
pub fn chain_from_masses(grid: &[f64], masses: &[f64]) -> Result<ChainSpec> {
    check_grid(grid)?;
    if masses.len() != grid.len() {
        return Err(Error::InvalidSpeedMeasure(format!(
            "{} masses for {} grid points",
            masses.len(),
            grid.len()
        )));
    }
    if let Some(i) = masses.iter().position(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::InvalidSpeedMeasure(format!(
            "zero mass at grid point {i} (x = {})",
            grid[i]
        )));
    }
    let n = grid.len() - 1;
    let mut rates = Vec::with_capacity(n + 1);
    let mut probs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let right = if i < n {
            1.0 / (2.0 * masses[i] * (grid[i + 1] - grid[i]))
        } else {
            0.0
        };
        let left = if i > 0 {
            1.0 / (2.0 * masses[i] * (grid[i] - grid[i - 1]))
        } else {
            0.0
        };
        let a = right + left;
        rates.push(a);
        probs.push(if i == 0 {
            1.0
        } else if i == n {
            0.0
        } else {
            right / a
        });
    }
    ChainSpec::new(grid.to_vec(), rates, probs)
}

/// Discretizes `sm` on `grid` and builds the chain.
pub fn chain_from_speed_measure(sm: &SpeedMeasureSpec, grid: &[f64]) -> Result<ChainSpec> {
    let masses = sm.masses_on(grid)?;
    chain_from_masses(grid, &masses)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::InvalidSpeedMeasure(
            "grid needs at least two points".into(),
        ));
    }
    if grid[0] != 0.0 {
        return Err(Error::InvalidSpeedMeasure("grid must start at 0".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
        return Err(Error::InvalidSpeedMeasure(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Laplace transform of the excursion length at `z`.
///
/// Solves `(z + a_i) u_i = a_i (p_i u_{i+1} + q_i u_{i-1})`, `i = 1..N`, with
/// `u_0 = 1` and `q_N = 1`, and returns `u_1`: the transform of the first
/// hitting time of 0 started from `b_1`.
pub fn first_passage_transform(chain: &ChainSpec, z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return invalid_arg(
            "first_passage_transform",
            format!("z must be finite and nonnegative, got {z}"),
        );
    }
    let n = chain.top();
    // Rows scaled by 1/a_i: (1 + z/a_i) u_i - p_i u_{i+1} - q_i u_{i-1} = 0.
    let mut upper = vec![0.0; n + 1];
    let mut rhs = vec![0.0; n + 1];
    let mut prev_upper = 0.0;
    let mut prev_rhs = 0.0;
    for i in 1..=n {
        let diag = 1.0 + z / chain.rate(i);
        let up = -chain.right_prob(i);
        // u_0 = 1 moves to the right-hand side of the first row.
        let (lower, b) = if i == 1 {
            (0.0, chain.left_prob(1))
        } else {
            (-chain.left_prob(i), 0.0)
        };
        let pivot = diag - lower * prev_upper;
        if !(pivot.abs() > f64::EPSILON * diag.abs()) {
            return Err(Error::SingularSystem { row: i });
        }
        upper[i] = up / pivot;
        rhs[i] = (b - lower * prev_rhs) / pivot;
        prev_upper = upper[i];
        prev_rhs = rhs[i];
    }
    let mut u = rhs[n];
    for i in (1..n).rev() {
        u = rhs[i] - upper[i] * u;
    }
    Ok(u)
}

/// Right endpoint `l` of the speed measure's support interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    Finite(f64),
    Infinite,
}

impl Endpoint {
    pub fn is_finite(&self) -> bool {
        matches!(self, Endpoint::Finite(_))
    }
}

/// Closed-form densities accepted in speed-measure files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// `level` on the whole interval.
    Uniform { level: f64 },
    /// `intercept + slope * x`.
    Linear { intercept: f64, slope: f64 },
}

impl Density {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Density::Uniform { level } => level,
            Density::Linear { intercept, slope } => intercept + slope * x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpeedMeasureKind {
    /// Point masses `(position, mass)`.
    Atoms(Vec<(f64, f64)>),
    /// Density plus the default grid size used when none is supplied.
    Density { density: Density, grid_n: usize },
}

/// Speed measure `m(dx)` on `[0, l]`.
///
/// With `inextensible` set and `l` finite, `m` carries an implied infinite
/// atom at `l` (absorption there). The atom is kept symbolic: see
/// [`SpeedMeasureSpec::implied_endpoint_atom`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedMeasureSpec {
    pub kind: SpeedMeasureKind,
    pub endpoint: Endpoint,
    pub inextensible: bool,
}

impl SpeedMeasureSpec {
    pub fn atoms(atoms: Vec<(f64, f64)>, endpoint: Endpoint) -> Result<Self> {
        Self {
            kind: SpeedMeasureKind::Atoms(atoms),
            endpoint,
            inextensible: false,
        }
        .validated()
    }

    pub fn density(density: Density, endpoint: Endpoint, grid_n: usize) -> Result<Self> {
        Self {
            kind: SpeedMeasureKind::Density { density, grid_n },
            endpoint,
            inextensible: false,
        }
        .validated()
    }

    /// Uniform density 1 on `[0, l]`.
    pub fn uniform(l: f64, grid_n: usize) -> Result<Self> {
        Self::density(Density::Uniform { level: 1.0 }, Endpoint::Finite(l), grid_n)
    }

    pub fn validated(self) -> Result<Self> {
        if let Endpoint::Finite(l) = self.endpoint {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidSpeedMeasure(format!(
                    "endpoint must be positive, got {l}"
                )));
            }
        }
        let upper = match self.endpoint {
            Endpoint::Finite(l) => l,
            Endpoint::Infinite => f64::INFINITY,
        };
        match &self.kind {
            SpeedMeasureKind::Atoms(atoms) => {
                for &(x, m) in atoms {
                    if !(x >= 0.0 && x <= upper) {
                        return Err(Error::InvalidSpeedMeasure(format!(
                            "atom position {x} outside [0, l]"
                        )));
                    }
                    if !(m > 0.0) || !m.is_finite() {
                        return Err(Error::InvalidSpeedMeasure(format!(
                            "atom mass must be positive and finite, got {m}"
                        )));
                    }
                }
                if !atoms.iter().any(|&(x, _)| x == 0.0) {
                    return Err(Error::InvalidSpeedMeasure(
                        "mass at 0 must be strictly positive".into(),
                    ));
                }
            }
            SpeedMeasureKind::Density { density, grid_n } => {
                if *grid_n < 1 {
                    return Err(Error::InvalidSpeedMeasure(
                        "grid_n must be at least 1".into(),
                    ));
                }
                if !(density.eval(0.0) > 0.0) {
                    return Err(Error::InvalidSpeedMeasure(
                        "density must be strictly positive at 0".into(),
                    ));
                }
            }
        }
        Ok(self)
    }

    /// Position of the implied infinite atom, if any. Never a float infinity.
    pub fn implied_endpoint_atom(&self) -> Option<f64> {
        match (self.inextensible, self.endpoint) {
            (true, Endpoint::Finite(l)) => Some(l),
            _ => None,
        }
    }

    /// Finite mass of `[0, upto]` (exact for atoms and the closed-form densities).
    pub fn mass_up_to(&self, upto: f64) -> f64 {
        let upto = match self.endpoint {
            Endpoint::Finite(l) => upto.min(l),
            Endpoint::Infinite => upto,
        };
        match &self.kind {
            SpeedMeasureKind::Atoms(atoms) => atoms
                .iter()
                .filter(|&&(x, _)| x <= upto)
                .map(|&(_, m)| m)
                .sum(),
            SpeedMeasureKind::Density { density, .. } => match *density {
                Density::Uniform { level } => level * upto,
                Density::Linear { intercept, slope } => {
                    intercept * upto + 0.5 * slope * upto * upto
                }
            },
        }
    }

    /// Masses of the dual cells of `grid`: interior cells run between
    /// neighbouring midpoints, the two end cells are half-cells. Densities are
    /// integrated by the midpoint rule on each cell; atoms are lumped into the
    /// cell containing them. Mass beyond the last grid point is dropped.
    pub fn masses_on(&self, grid: &[f64]) -> Result<Vec<f64>> {
        check_grid(grid)?;
        if self.implied_endpoint_atom().is_some() {
            return Err(Error::InvalidSpeedMeasure(
                "inextensible measure absorbs at its endpoint; a reflected chain cannot be built"
                    .into(),
            ));
        }
        let n = grid.len() - 1;
        if let Endpoint::Finite(l) = self.endpoint {
            if grid[n] > l * (1.0 + 1e-12) {
                return Err(Error::InvalidSpeedMeasure(format!(
                    "grid extends to {} beyond the endpoint {l}",
                    grid[n]
                )));
            }
        }
        let cell = |i: usize| -> (f64, f64) {
            let lo = if i == 0 {
                grid[0]
            } else {
                0.5 * (grid[i - 1] + grid[i])
            };
            let hi = if i == n {
                grid[n]
            } else {
                0.5 * (grid[i] + grid[i + 1])
            };
            (lo, hi)
        };
        let masses: Vec<f64> = match &self.kind {
            SpeedMeasureKind::Density { density, .. } => (0..=n)
                .map(|i| {
                    let (lo, hi) = cell(i);
                    density.eval(0.5 * (lo + hi)) * (hi - lo)
                })
                .collect(),
            SpeedMeasureKind::Atoms(atoms) => {
                let mut masses = vec![0.0; n + 1];
                for &(x, m) in atoms {
                    if x > grid[n] {
                        continue;
                    }
                    let i = (0..=n)
                        .find(|&i| {
                            let (lo, hi) = cell(i);
                            x >= lo && (x < hi || i == n)
                        })
                        .unwrap_or(n);
                    masses[i] += m;
                }
                masses
            }
        };
        if let Some(i) = masses.iter().position(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidSpeedMeasure(format!(
                "zero mass at grid point {i} (x = {})",
                grid[i]
            )));
        }
        Ok(masses)
    }
}

/// On-disk form of a [`SpeedMeasureSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedMeasureFile {
    Atoms {
        atoms: Vec<[f64; 2]>,
        endpoint: EndpointRepr,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        inextensible: bool,
    },
    Density {
        density: String,
        endpoint: EndpointRepr,
        grid_n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        coefficients: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        inextensible: bool,
    },
}

/// A number, or the string `"inf"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EndpointRepr {
    Number(f64),
    Marker(String),
}

impl TryFrom<EndpointRepr> for Endpoint {
    type Error = Error;

    fn try_from(repr: EndpointRepr) -> Result<Self> {
        match repr {
            EndpointRepr::Number(l) => Ok(Endpoint::Finite(l)),
            EndpointRepr::Marker(s) if s == "inf" || s == "infinity" => Ok(Endpoint::Infinite),
            EndpointRepr::Marker(s) => Err(Error::InvalidSpeedMeasure(format!(
                "endpoint must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

impl From<Endpoint> for EndpointRepr {
    fn from(e: Endpoint) -> Self {
        match e {
            Endpoint::Finite(l) => EndpointRepr::Number(l),
            Endpoint::Infinite => EndpointRepr::Marker("inf".into()),
        }
    }
}

impl TryFrom<SpeedMeasureFile> for SpeedMeasureSpec {
    type Error = Error;

    fn try_from(file: SpeedMeasureFile) -> Result<Self> {
        match file {
            SpeedMeasureFile::Atoms {
                atoms,
                endpoint,
                inextensible,
            } => SpeedMeasureSpec {
                kind: SpeedMeasureKind::Atoms(atoms.into_iter().map(|[x, m]| (x, m)).collect()),
                endpoint: endpoint.try_into()?,
                inextensible,
            }
            .validated(),
            SpeedMeasureFile::Density {
                density,
                endpoint,
                grid_n,
                coefficients,
                inextensible,
            } => {
                let coeffs = coefficients.unwrap_or_default();
                let density = match density.as_str() {
                    "uniform" => Density::Uniform {
                        level: coeffs.first().copied().unwrap_or(1.0),
                    },
                    "linear" => Density::Linear {
                        intercept: coeffs.first().copied().unwrap_or(1.0),
                        slope: coeffs.get(1).copied().unwrap_or(1.0),
                    },
                    other => {
                        return Err(Error::InvalidSpeedMeasure(format!(
                            "unknown density {other:?} (expected \"uniform\" or \"linear\")"
                        )))
                    }
                };
                SpeedMeasureSpec {
                    kind: SpeedMeasureKind::Density { density, grid_n },
                    endpoint: endpoint.try_into()?,
                    inextensible,
                }
                .validated()
            }
        }
    }
}

impl From<&SpeedMeasureSpec> for SpeedMeasureFile {
    fn from(sm: &SpeedMeasureSpec) -> Self {
        match &sm.kind {
            SpeedMeasureKind::Atoms(atoms) => SpeedMeasureFile::Atoms {
                atoms: atoms.iter().map(|&(x, m)| [x, m]).collect(),
                endpoint: sm.endpoint.into(),
                inextensible: sm.inextensible,
            },
            SpeedMeasureKind::Density { density, grid_n } => {
                let (name, coefficients) = match *density {
                    Density::Uniform { level } => ("uniform", vec![level]),
                    Density::Linear { intercept, slope } => ("linear", vec![intercept, slope]),
                };
                SpeedMeasureFile::Density {
                    density: name.into(),
                    endpoint: sm.endpoint.into(),
                    grid_n: *grid_n,
                    coefficients: Some(coefficients),
                    inextensible: sm.inextensible,
                }
            }
        }
    }
}

/// Parses a chain JSON document and validates it.
pub fn chain_from_json(text: &str) -> Result<ChainSpec> {
    let raw: ChainSpec = serde_json::from_str(text)?;
    validate_chain(raw)
}

pub fn speed_measure_from_json(text: &str) -> Result<SpeedMeasureSpec> {
    let raw: SpeedMeasureFile = serde_json::from_str(text)?;
    raw.try_into()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_state() -> ChainSpec {
        ChainSpec::new(
            vec![0.0, 1.0, 2.0],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 0.5, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn minimal_chain_is_accepted() {
        let c = ChainSpec::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(c.top(), 1);
        assert_eq!(validate_chain(c.clone()).unwrap(), c);
    }

    #[test]
    fn zero_rate_rejected() {
        let err = ChainSpec::new(vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("rate must be positive"), "{err}");
    }

    #[test]
    fn non_reflecting_origin_rejected() {
        let err = ChainSpec::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.0]).unwrap_err();
        assert!(
            err.to_string().contains("state 0 must reflect right"),
            "{err}"
        );
    }

    #[test]
    fn other_violations() {
        assert!(ChainSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(ChainSpec::new(vec![0.5, 1.0], vec![1.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(ChainSpec::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![1.0, 0.2]).is_err());
        assert!(ChainSpec::new(vec![0.0, 1.0, 2.0], vec![1.0; 3], vec![1.0, 1.0, 0.0]).is_err());
        assert!(ChainSpec::new(vec![0.0], vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn uniform_density_quarter_grid() {
        let sm = SpeedMeasureSpec::uniform(1.0, 4).unwrap();
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let masses = sm.masses_on(&grid).unwrap();
        assert_eq!(masses, vec![0.125, 0.25, 0.25, 0.25, 0.125]);
        let c = chain_from_speed_measure(&sm, &grid).unwrap();
        for &a in c.rates() {
            assert!((a - 16.0).abs() < 1e-12);
        }
        assert_eq!(c.right_probs(), &[1.0, 0.5, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn single_interval_grid() {
        let c = chain_from_masses(&[0.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(c.rates(), &[1.0, 1.0]);
        assert_eq!(c.right_probs(), &[1.0, 0.0]);
    }

    #[test]
    fn equal_masses_equal_spacing_is_symmetric() {
        let grid: Vec<f64> = (0..8).map(|i| 0.3 * i as f64).collect();
        let c = chain_from_masses(&grid, &[0.7; 8]).unwrap();
        for i in 1..7 {
            assert!((c.right_prob(i) - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn speed_masses_invert_construction() {
        let grid = [0.0, 0.4, 1.0, 1.3];
        let masses = [0.2, 0.5, 0.1, 0.9];
        let c = chain_from_masses(&grid, &masses).unwrap();
        for (got, want) in c.speed_masses().iter().zip(masses) {
            assert!((got - want).abs() < 1e-14 * want);
        }
        assert!((c.speed_mass_at_zero() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_mass_and_bad_grid_rejected() {
        assert!(chain_from_masses(&[0.0, 1.0], &[0.5, 0.0]).is_err());
        assert!(chain_from_masses(&[0.0, 1.0, 1.0], &[0.5; 3]).is_err());
        let sm =
            SpeedMeasureSpec::atoms(vec![(0.0, 1.0), (2.0, 1.0)], Endpoint::Finite(2.0)).unwrap();
        // middle grid point gets no atom
        assert!(sm.masses_on(&[0.0, 1.0, 2.0]).is_err());
    }

    #[test]
    fn atoms_on_grid_are_a_fixed_point() {
        let grid = [0.0, 0.5, 1.0];
        let masses = [0.3, 0.1, 0.7];
        let sm = SpeedMeasureSpec::atoms(
            grid.iter().copied().zip(masses).collect(),
            Endpoint::Finite(1.0),
        )
        .unwrap();
        assert_eq!(
            chain_from_speed_measure(&sm, &grid).unwrap(),
            chain_from_masses(&grid, &masses).unwrap()
        );
    }

    #[test]
    fn inextensible_endpoint_stays_symbolic() {
        let mut sm = SpeedMeasureSpec::uniform(1.0, 4).unwrap();
        assert_eq!(sm.implied_endpoint_atom(), None);
        sm.inextensible = true;
        assert_eq!(sm.implied_endpoint_atom(), Some(1.0));
        assert!(sm.masses_on(&[0.0, 0.5, 1.0]).is_err());
        let inf =
            SpeedMeasureSpec::density(Density::Uniform { level: 1.0 }, Endpoint::Infinite, 10)
                .unwrap();
        assert_eq!(inf.implied_endpoint_atom(), None);
    }

    #[test]
    fn speed_measure_requires_mass_at_zero() {
        assert!(SpeedMeasureSpec::atoms(vec![(0.5, 1.0)], Endpoint::Finite(1.0)).is_err());
        assert!(SpeedMeasureSpec::density(
            Density::Linear {
                intercept: 0.0,
                slope: 1.0
            },
            Endpoint::Finite(1.0),
            4
        )
        .is_err());
    }

    #[test]
    fn oracle_two_state() {
        let c = ChainSpec::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 0.0]).unwrap();
        assert!((first_passage_transform(&c, 2.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oracle_three_state_by_hand() {
        let t = first_passage_transform(&three_state(), 1.0).unwrap();
        assert!((t - 2.0 / 7.0).abs() < 1e-15, "{t}");
    }

    #[test]
    fn oracle_is_one_at_zero() {
        let c = ChainSpec::with_interior_probs(vec![3.0, 0.2, 5.0, 1.1, 7.0], &[0.9, 0.1, 0.6])
            .unwrap();
        assert!((first_passage_transform(&c, 0.0).unwrap() - 1.0).abs() < 1e-13);
        assert!(first_passage_transform(&c, -1.0).is_err());
    }

    #[test]
    fn json_formats() {
        let c = chain_from_json(r#"{"states":[0,1,2],"rates":[1,1,1],"right_probs":[1,0.5,0]}"#)
            .unwrap();
        assert_eq!(c, three_state());
        assert!(chain_from_json(r#"{"states":[0,1],"rates":[1,0],"right_probs":[1,0]}"#).is_err());

        let sm =
            speed_measure_from_json(r#"{"atoms":[[0,0.5],[1,0.5]],"endpoint":"inf"}"#).unwrap();
        assert_eq!(sm.endpoint, Endpoint::Infinite);
        let sm =
            speed_measure_from_json(r#"{"density":"uniform","endpoint":1,"grid_n":4}"#).unwrap();
        assert_eq!(
            sm.kind,
            SpeedMeasureKind::Density {
                density: Density::Uniform { level: 1.0 },
                grid_n: 4
            }
        );
        let back = serde_json::to_string(&SpeedMeasureFile::from(&sm)).unwrap();
        assert_eq!(speed_measure_from_json(&back).unwrap(), sm);
        assert!(speed_measure_from_json(r#"{"density":"cubic","endpoint":1,"grid_n":4}"#).is_err());
    }
}
