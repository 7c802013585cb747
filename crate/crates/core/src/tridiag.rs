//! Symmetric tridiagonal eigenproblems.
//!
//! Two solvers, both returning only the first row of the eigenvector
//! matrix, which is all a Jacobi matrix needs for quadrature-style weights:
//!
//! * [`symmetric_tridiagonal_eigen`]: implicit-shift QL, absolute accuracy.
//! * [`definite_tridiagonal_eigen`]: bisection and twisted factorizations on
//!   an `L D Lᵀ` factorization, relative accuracy for every eigenvalue. Tiny
//!   eigenvalues of stiff chains need this.

use crate::error::{Error, Result};

/// Sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS: usize = 60;

/// Eigenvalues (ascending) with the first component of each normalized
/// eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub first_components: Vec<f64>,
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off.len() == diag.len() - 1`).
///
/// An off-diagonal entry is deflated once `|e_i| <= eps (|d_i| + |d_{i+1}|)`.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagonalEigen> {
    let n = diag.len();
    if n == 0 {
        return Ok(TridiagonalEigen {
            values: Vec::new(),
            first_components: Vec::new(),
        });
    }
    assert_eq!(off.len() + 1, n, "off-diagonal must have n - 1 entries");
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut row = vec![0.0; n];
    row[0] = 1.0;

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence { index: l, sweeps });
            }
            // Wilkinson-style shift from the leading 2x2 block
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut deflated_early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated_early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let t = row[i + 1];
                row[i + 1] = s * row[i] + c * t;
                row[i] = c * row[i] - s * t;
            }
            if deflated_early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagonalEigen {
        values: order.iter().map(|&i| d[i]).collect(),
        first_components: order.iter().map(|&i| row[i]).collect(),
    })
}

/// Eigen-decomposition of the positive definite matrix `L D Lᵀ` with
/// `D = diag(pivots)` and unit lower bidiagonal `L` whose subdiagonal is
/// `√off_sq[i] / pivots[i]`; `off_sq` holds the squared off-diagonal of the
/// assembled matrix.
///
/// Eigenvalues come from bisection on the stationary qd count, each to a few
/// ulps relative. First eigenvector components come from the twisted
/// factorization at the computed eigenvalue. Returns `None` if a pivot is not
/// positive or a twisted factorization breaks down.
pub fn definite_tridiagonal_eigen(pivots: &[f64], off_sq: &[f64]) -> Option<TridiagonalEigen> {
    let n = pivots.len();
    assert_eq!(
        off_sq.len() + 1,
        n.max(1),
        "off-diagonal must have n - 1 entries"
    );
    if pivots.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return None;
    }
    let ldl = Ldl::new(pivots, off_sq);
    // Gershgorin bound on the assembled matrix
    let mut hi = 0.0_f64;
    for i in 0..n {
        let mut row = ldl.diag(i);
        if i > 0 {
            row += off_sq[i - 1].sqrt();
        }
        if i + 1 < n {
            row += off_sq[i].sqrt();
        }
        hi = hi.max(row);
    }
    hi *= 1.0 + 4.0 * f64::EPSILON;

    let mut values = Vec::with_capacity(n);
    let mut first_components = Vec::with_capacity(n);
    for k in 0..n {
        let x = ldl.bisect(k, hi);
        let (v0, x) = ldl.twisted_first_component(x)?;
        values.push(x);
        first_components.push(v0);
    }
    Some(TridiagonalEigen {
        values,
        first_components,
    })
}

struct Ldl<'a> {
    d: &'a [f64],
    /// `d_i ℓ_i`, the off-diagonal of the assembled matrix
    dl: Vec<f64>,
    /// `ℓ_i`
    ell: Vec<f64>,
    /// `d_i ℓ_i²`
    dll: Vec<f64>,
}

impl<'a> Ldl<'a> {
    fn new(d: &'a [f64], off_sq: &[f64]) -> Self {
        let dl: Vec<f64> = off_sq.iter().map(|e| e.sqrt()).collect();
        let ell = dl.iter().zip(d).map(|(a, b)| a / b).collect();
        let dll = off_sq.iter().zip(d).map(|(a, b)| a / b).collect();
        Ldl { d, dl, ell, dll }
    }

    fn diag(&self, i: usize) -> f64 {
        self.d[i] + if i > 0 { self.dll[i - 1] } else { 0.0 }
    }

    /// Number of eigenvalues below `sigma` (stationary qd transform).
    fn count_below(&self, sigma: f64) -> usize {
        let n = self.d.len();
        let mut s = -sigma;
        let mut negatives = 0;
        for i in 0..n {
            let mut dp = self.d[i] + s;
            if dp < 0.0 {
                negatives += 1;
            }
            if i + 1 == n {
                break;
            }
            if dp == 0.0 {
                dp = -f64::MIN_POSITIVE;
            }
            s = self.dll[i] * (s / dp) - sigma;
        }
        negatives
    }

    /// The `k`-th smallest eigenvalue, bisecting geometrically while the
    /// bracket spans more than a factor of two.
    fn bisect(&self, k: usize, upper: f64) -> f64 {
        let (mut lo, mut hi) = (0.0_f64, upper);
        for _ in 0..2200 {
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                break;
            }
            let mid = if lo > 0.0 && hi > 2.0 * lo {
                (lo * hi).sqrt()
            } else if lo == 0.0 {
                (hi * 1e-8).max(f64::MIN_POSITIVE).min(0.5 * hi)
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// First component of the unit eigenvector at the eigenvalue `sigma`,
    /// and `sigma` improved by the Rayleigh correction `γ_r / |z|²`.
    fn twisted_first_component(&self, sigma: f64) -> Option<(f64, f64)> {
        let n = self.d.len();
        if n == 1 {
            return Some((1.0, self.d[0]));
        }
        // stationary: L+ D+ L+ᵀ = L D Lᵀ - σ
        let mut s = vec![0.0; n];
        let mut lplus = vec![0.0; n - 1];
        s[0] = -sigma;
        for i in 0..n - 1 {
            let dp = self.d[i] + s[i];
            lplus[i] = self.dl[i] / dp;
            s[i + 1] = self.dll[i] * (s[i] / dp) - sigma;
        }
        // progressive: U- D- U-ᵀ = L D Lᵀ - σ
        let mut p = vec![0.0; n];
        let mut uminus = vec![0.0; n - 1];
        p[n - 1] = self.d[n - 1] - sigma;
        for i in (0..n - 1).rev() {
            let dm = self.dll[i] + p[i + 1];
            let t = self.d[i] / dm;
            uminus[i] = self.ell[i] * t;
            p[i] = p[i + 1] * t - sigma;
        }
        let r = (0..n).min_by(|&a, &b| {
            (s[a] + p[a] + sigma)
                .abs()
                .total_cmp(&(s[b] + p[b] + sigma).abs())
        })?;
        let mut z = vec![0.0; n];
        z[r] = 1.0;
        for i in (0..r).rev() {
            z[i] = -lplus[i] * z[i + 1];
        }
        for i in r..n - 1 {
            z[i + 1] = -uminus[i] * z[i];
        }
        let norm_sq: f64 = z.iter().map(|v| v * v).sum();
        let v0 = z[0] / norm_sq.sqrt();
        let shift = (s[r] + p[r] + sigma) / norm_sq;
        // bisection already pins sigma to a few ulps; ignore wild corrections
        let refined = if shift.abs() <= 1e-12 * sigma {
            sigma + shift
        } else {
            sigma
        };
        (v0.is_finite() && norm_sq.is_finite()).then_some((v0, refined))
    }
}

/// Smallest relative gap `(x_{k+1} - x_k) / max(|x_k|, |x_{k+1}|)` of an
/// ascending list; infinity for fewer than two entries.
pub fn min_relative_gap(sorted: &[f64]) -> f64 {
    sorted
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assembled(pivots: &[f64], off_sq: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ldl = Ldl::new(pivots, off_sq);
        let diag = (0..pivots.len()).map(|i| ldl.diag(i)).collect();
        (diag, off_sq.iter().map(|e| e.sqrt()).collect())
    }

    #[test]
    fn definite_solver_matches_ql() {
        let pivots = [1.0, 0.7, 2.5, 0.3, 1.1];
        let off_sq = [0.4, 0.9, 0.2, 0.6];
        let (diag, off) = assembled(&pivots, &off_sq);
        let ql = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
        let dq = definite_tridiagonal_eigen(&pivots, &off_sq).unwrap();
        for k in 0..5 {
            assert!((ql.values[k] - dq.values[k]).abs() < 1e-13 * ql.values[4]);
            let (a, b) = (
                ql.first_components[k].powi(2),
                dq.first_components[k].powi(2),
            );
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn definite_solver_resolves_tiny_eigenvalue() {
        // [[1, 1], [1, 1 + δ]] has determinant δ and smallest eigenvalue ≈ δ/2
        let delta = 1e-13;
        let dq = definite_tridiagonal_eigen(&[1.0, delta], &[1.0]).unwrap();
        let exact = {
            let (t, det) = (2.0 + delta, delta);
            // small root of x² - t x + det without cancellation
            2.0 * det / (t + (t * t - 4.0 * det).sqrt())
        };
        assert!(
            (dq.values[0] - exact).abs() < 1e-14 * exact,
            "{} vs {exact}",
            dq.values[0]
        );
        assert!(definite_tridiagonal_eigen(&[1.0, -1.0], &[0.5]).is_none());
    }

    #[test]
    fn one_by_one() {
        let eig = symmetric_tridiagonal_eigen(&[2.0], &[]).unwrap();
        assert_eq!(eig.values, vec![2.0]);
        assert_eq!(eig.first_components, vec![1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let h = 0.5_f64.sqrt();
        let eig = symmetric_tridiagonal_eigen(&[1.0, 1.0], &[h]).unwrap();
        assert!((eig.values[0] - (1.0 - h)).abs() < 1e-15);
        assert!((eig.values[1] - (1.0 + h)).abs() < 1e-15);
        for v in &eig.first_components {
            assert!((v * v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        // tridiag(-1, 2, -1) of size n: 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let eig = symmetric_tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        let np1 = (n + 1) as f64;
        for (k, &x) in eig.values.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / np1).cos();
            assert!((x - want).abs() < 1e-13, "k={k}: {x} vs {want}");
        }
        let norm: f64 = eig.first_components.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-13);
        for (k, v) in eig.first_components.iter().enumerate() {
            let want = 2.0 / np1 * ((k + 1) as f64 * std::f64::consts::PI / np1).sin().powi(2);
            assert!((v * v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn decoupled_blocks() {
        let eig = symmetric_tridiagonal_eigen(&[3.0, 1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(eig.first_components, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn gaps() {
        assert_eq!(min_relative_gap(&[1.0]), f64::INFINITY);
        assert!((min_relative_gap(&[1.0, 2.0, 2.2]) - 0.2 / 2.2).abs() < 1e-15);
    }
}
