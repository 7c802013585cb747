//! J-continued fractions
//!
//! ```text
//!   k_1           k_2           k_N
//! -------- ⊖ --------- ⊖ ... ⊖ ---------      where  a/b ⊖ c/d = a / (b - c/d)
//! l_1 + z      l_2 + z          l_N + z
//! ```
//!
//! For a chain, this fraction is the Laplace transform of the excursion
//! length `S` (see [`jfraction_from_chain`]).

use crate::chain::ChainSpec;
use crate::error::{invalid_arg, Error, Result};

/// Overflow guard for the running approximant pair.
const RESCALE_ABOVE: f64 = 1.3407807929942597e154; // 2^512
const RESCALE_BY: f64 = 7.458340731200207e-155; // 2^-512

#[derive(Debug, Clone)]
pub struct JFraction {
    numerators: Vec<f64>,
    denominators: Vec<f64>,
    /// Present for fractions built from a chain.
    split: Option<RateSplit>,
}

/// `l_n = right_n + left_n` with `k_1 = left_1`, `k_{n+1} = right_n left_{n+1}`:
/// the rightward (`p_n a_n`) and leftward (`q_n a_n`) rates of a chain.
/// Knowing the split lets pivots and approximants be formed without
/// subtraction.
#[derive(Debug, Clone)]
struct RateSplit {
    right: Vec<f64>,
    left: Vec<f64>,
}

/// Pivots of `z + J` restricted to the levels `start..`, by elimination
/// that tracks reduced row sums: `s_1 = z + left_1`,
/// `s_{n+1} = z + left_{n+1} s_n / d_n`, `d_n = s_n + right_n`.
fn split_pivots(split: &RateSplit, start: usize, z: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(split.left.len().saturating_sub(start));
    let mut sum = 0.0;
    for n in start..split.left.len() {
        sum = match out.last() {
            None => z + split.left[n],
            Some(&d) => z + split.left[n] * (sum / d),
        };
        out.push(sum + split.right[n]);
    }
    out
}

// equality is on the coefficients; the rate split is derived data
impl PartialEq for JFraction {
    fn eq(&self, other: &Self) -> bool {
        self.numerators == other.numerators && self.denominators == other.denominators
    }
}

impl JFraction {
    /// Partial numerators `k_n` must be positive; denominators `l_n` real.
    pub fn new(numerators: Vec<f64>, denominators: Vec<f64>) -> Result<Self> {
        if numerators.is_empty() {
            return Err(Error::InvalidFraction("need at least one level".into()));
        }
        if numerators.len() != denominators.len() {
            return Err(Error::InvalidFraction(format!(
                "{} numerators but {} denominators",
                numerators.len(),
                denominators.len()
            )));
        }
        if let Some(i) = numerators
            .iter()
            .position(|&k| !(k > 0.0) || !k.is_finite())
        {
            return Err(Error::InvalidFraction(format!(
                "partial numerator k_{} must be positive, got {}",
                i + 1,
                numerators[i]
            )));
        }
        if let Some(i) = denominators.iter().position(|l| !l.is_finite()) {
            return Err(Error::InvalidFraction(format!(
                "partial denominator l_{} is not finite",
                i + 1
            )));
        }
        Ok(JFraction {
            numerators,
            denominators,
            split: None,
        })
    }

    pub fn numerators(&self) -> &[f64] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[f64] {
        &self.denominators
    }

    /// Depth `N`.
    pub fn depth(&self) -> usize {
        self.numerators.len()
    }

    /// The fraction cut after its first `depth` levels.
    pub fn truncated(&self, depth: usize) -> Result<JFraction> {
        if depth == 0 || depth > self.depth() {
            return invalid_arg(
                "jfraction",
                format!("truncation depth {depth} outside 1..={}", self.depth()),
            );
        }
        let mut jf = JFraction::new(
            self.numerators[..depth].to_vec(),
            self.denominators[..depth].to_vec(),
        )?;
        // the last kept level's rightward rate becomes killing
        jf.split = self.split.as_ref().map(|s| RateSplit {
            right: s.right[..depth].to_vec(),
            left: s.left[..depth].to_vec(),
        });
        Ok(jf)
    }

    /// Pivots `d_n` of the Jacobi matrix factored as `L D Lᵀ`, or `None`
    /// when the matrix is not positive definite.
    ///
    /// Chain fractions get cancellation-free pivots from their rates;
    /// otherwise `d_1 = l_1`, `d_{n+1} = l_{n+1} - k_{n+1} / d_n`.
    pub fn pivots(&self) -> Option<Vec<f64>> {
        self.pivots_from(0)
    }

    /// Pivots of the trailing block of the Jacobi matrix from level
    /// `start` (0-based) down.
    pub(crate) fn pivots_from(&self, start: usize) -> Option<Vec<f64>> {
        let out = match &self.split {
            Some(split) => split_pivots(split, start, 0.0),
            None => {
                let mut out: Vec<f64> = Vec::with_capacity(self.depth().saturating_sub(start));
                for i in start..self.depth() {
                    let l = self.denominators[i];
                    out.push(match out.last() {
                        None => l,
                        Some(&d) => l - self.numerators[i] / d,
                    });
                }
                out
            }
        };
        out.iter().all(|&d| d > 0.0 && d.is_finite()).then_some(out)
    }
}

/// Coefficients of the fraction for `L(S)`:
/// `k_1 = q_1 a_1`, `k_n = p_{n-1} q_n a_{n-1} a_n`, `l_n = a_n`.
pub fn jfraction_from_chain(chain: &ChainSpec) -> JFraction {
    let n = chain.top();
    let mut k = Vec::with_capacity(n);
    let mut l = Vec::with_capacity(n);
    let mut split = RateSplit {
        right: Vec::with_capacity(n),
        left: Vec::with_capacity(n),
    };
    for i in 1..=n {
        split.right.push(chain.right_prob(i) * chain.rate(i));
        split.left.push(chain.left_prob(i) * chain.rate(i));
    }
    for i in 1..=n {
        let a = chain.rate(i);
        if i == 1 {
            k.push(chain.left_prob(1) * a);
        } else {
            k.push(chain.right_prob(i - 1) * chain.left_prob(i) * chain.rate(i - 1) * a);
        }
        l.push(a);
    }
    JFraction {
        numerators: k,
        denominators: l,
        split: Some(split),
    }
}

/// `N`-th approximant `A_N / B_N` at `z` by the forward three-term
/// recurrence, rescaling the pair by `2^-512` whenever it grows past `2^512`.
///
/// For chain fractions the recurrence runs in ratio form,
/// `B_n / B_{n-1} = z + l_n - k_n B_{n-2} / B_{n-1}`, with the subtraction
/// removed through the rate split (`A_n` is `k_1` times the same recurrence
/// started one level down). This keeps `A_N / B_N` at `z = 0` equal to 1 to
/// rounding even for stiff chains.
pub fn approximant_eval(jf: &JFraction, z: f64) -> Result<f64> {
    if !(z >= 0.0) || !z.is_finite() {
        return invalid_arg(
            "approximant_eval",
            format!("z must be finite and nonnegative, got {z}"),
        );
    }
    if let Some(split) = &jf.split {
        let den = split_pivots(split, 0, z);
        let num = split_pivots(split, 1, z);
        let mut value = jf.numerators[0] / den[0];
        for (a, b) in num.iter().zip(&den[1..]) {
            value *= a / b;
        }
        return Ok(value);
    }
    // (A_{-1}, B_{-1}) = (1, 0), (A_0, B_0) = (0, 1)
    let (mut a_prev, mut b_prev) = (1.0_f64, 0.0_f64);
    let (mut a_cur, mut b_cur) = (0.0_f64, 1.0_f64);
    for (n, (&k, &l)) in jf.numerators.iter().zip(&jf.denominators).enumerate() {
        let partial = if n == 0 { k } else { -k };
        let b = z + l;
        let a_next = b * a_cur + partial * a_prev;
        let b_next = b * b_cur + partial * b_prev;
        a_prev = a_cur;
        b_prev = b_cur;
        a_cur = a_next;
        b_cur = b_next;
        let big = a_cur.abs().max(b_cur.abs());
        if big > RESCALE_ABOVE {
            a_prev *= RESCALE_BY;
            b_prev *= RESCALE_BY;
            a_cur *= RESCALE_BY;
            b_cur *= RESCALE_BY;
        }
    }
    if b_cur == 0.0 || !b_cur.is_finite() {
        return Err(Error::ZeroDenominator { z });
    }
    Ok(a_cur / b_cur)
}

/// Numerator `K_N` and monic denominator `L_N` of the last approximant, as
/// coefficient lists in ascending powers of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialPair {
    pub numerator: Vec<f64>,
    pub denominator: Vec<f64>,
}

impl PolynomialPair {
    pub fn eval_numerator(&self, z: f64) -> f64 {
        horner(&self.numerator, z)
    }

    pub fn eval_denominator(&self, z: f64) -> f64 {
        horner(&self.denominator, z)
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.eval_numerator(z) / self.eval_denominator(z)
    }
}

fn horner(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// `L_0 = 1`, `L_1 = z + l_1`, `L_n = (z + l_n) L_{n-1} - k_n L_{n-2}`;
/// `K_0 = 0`, `K_1 = k_1`, `K_n = (z + l_n) K_{n-1} - k_n K_{n-2}`.
pub fn polynomial_pair(jf: &JFraction) -> PolynomialPair {
    let step = |cur: &[f64], prev: &[f64], k: f64, l: f64| -> Vec<f64> {
        // (z + l) cur - k prev
        let mut next = vec![0.0; cur.len() + 1];
        for (j, &c) in cur.iter().enumerate() {
            next[j] += l * c;
            next[j + 1] += c;
        }
        for (j, &p) in prev.iter().enumerate() {
            next[j] -= k * p;
        }
        next
    };
    let k = &jf.numerators;
    let l = &jf.denominators;
    let mut den_prev = vec![1.0];
    let mut den = vec![l[0], 1.0];
    let mut num_prev: Vec<f64> = Vec::new();
    let mut num = vec![k[0]];
    for n in 1..jf.depth() {
        let den_next = step(&den, &den_prev, k[n], l[n]);
        let num_next = step(&num, &num_prev, k[n], l[n]);
        den_prev = std::mem::replace(&mut den, den_next);
        num_prev = std::mem::replace(&mut num, num_next);
    }
    PolynomialPair {
        numerator: num,
        denominator: den,
    }
}

/// `(K_N(z), L_N(z), L_N'(z))` by the recurrences, jointly rescaled; only
/// ratios of the returned values are meaningful.
pub(crate) fn recurrence_values(jf: &JFraction, z: f64) -> (f64, f64, f64) {
    let (mut k_prev, mut l_prev, mut d_prev) = (0.0_f64, 1.0_f64, 0.0_f64);
    let mut k_cur = jf.numerators[0];
    let mut l_cur = z + jf.denominators[0];
    let mut d_cur = 1.0_f64;
    for n in 1..jf.depth() {
        let b = z + jf.denominators[n];
        let kn = jf.numerators[n];
        let k_next = b * k_cur - kn * k_prev;
        let l_next = b * l_cur - kn * l_prev;
        let d_next = l_cur + b * d_cur - kn * d_prev;
        k_prev = k_cur;
        l_prev = l_cur;
        d_prev = d_cur;
        k_cur = k_next;
        l_cur = l_next;
        d_cur = d_next;
        let big = k_cur.abs().max(l_cur.abs()).max(d_cur.abs());
        if big > RESCALE_ABOVE {
            for v in [
                &mut k_prev,
                &mut l_prev,
                &mut d_prev,
                &mut k_cur,
                &mut l_cur,
                &mut d_cur,
            ] {
                *v *= RESCALE_BY;
            }
        }
    }
    (k_cur, l_cur, d_cur)
}
