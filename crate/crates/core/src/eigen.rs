//! Numeric eigenvalues of small dense complex matrices and roots of complex
//! polynomials.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("shifted QR did not converge within {iterations} iterations (residual of partial result {residual:e})")]
    ConvergenceFailure {
        iterations: usize,
        partial: Vec<Complex64>,
        residual: f64,
    },
    #[error("eigenvalue residual {residual:e} exceeds the bound {bound:e}")]
    ResidualTooLarge {
        eigenvalues: Vec<Complex64>,
        residual: f64,
        bound: f64,
    },
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    pub max_iter_per_eigenvalue: usize,
    pub residual_bound: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            max_iter_per_eigenvalue: 500,
            residual_bound: 1e-8,
        }
    }
}

/// Row-major `n × n` slice to a matrix.
pub fn to_matrix(n: usize, entries: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(n, n, entries)
}

/// Parlett–Reinsch balancing by powers of two, in place. Similarity
/// preserving, so the spectrum is unchanged.
pub fn balance(m: &mut DMatrix<Complex64>) {
    const RADIX: f64 = 2.0;
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let (mut cc, mut rr) = (c, r);
            while cc < rr / RADIX {
                cc *= RADIX;
                rr /= RADIX;
                f *= RADIX;
            }
            while cc >= rr * RADIX {
                cc /= RADIX;
                rr *= RADIX;
                f /= RADIX;
            }
            if (cc + rr) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

pub fn frobenius_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `det(λI − M)` by LU with partial pivoting.
pub fn shifted_det(m: &DMatrix<Complex64>, lambda: Complex64) -> Complex64 {
    let n = m.nrows();
    let a = DMatrix::from_diagonal_element(n, n, lambda) - m;
    a.lu().determinant()
}

/// `max_k |det(λ_k I − M)| / max(1, ‖M‖_F)^n`.
pub fn eigen_residual(m: &DMatrix<Complex64>, eigenvalues: &[Complex64]) -> f64 {
    let scale = frobenius_norm(m).max(1.0).powi(m.nrows() as i32);
    eigenvalues
        .iter()
        .map(|&l| shifted_det(m, l).norm() / scale)
        .fold(0.0, f64::max)
}

/// Lexicographic by real part, then imaginary part.
pub fn sort_eigenvalues(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Eigenvalues after balancing, via complex Hessenberg reduction and
/// shifted QR (Schur form). Sorted.
pub fn matrix_eigenvalues(m: &DMatrix<Complex64>, opts: &EigenOptions) -> Result<Vec<Complex64>, EigenError> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let n = m.nrows();
    let mut b = m.clone();
    balance(&mut b);
    let budget = opts.max_iter_per_eigenvalue * n.max(1);
    let Some(schur) = Schur::try_new(b.clone(), f64::EPSILON, budget) else {
        let partial: Vec<Complex64> = b.diagonal().iter().copied().collect();
        let residual = eigen_residual(m, &partial);
        return Err(EigenError::ConvergenceFailure {
            iterations: budget,
            partial,
            residual,
        });
    };
    let (_, t) = schur.unpack();
    let mut eig: Vec<Complex64> = t.diagonal().iter().copied().collect();
    sort_eigenvalues(&mut eig);
    let residual = eigen_residual(m, &eig);
    if residual > opts.residual_bound {
        return Err(EigenError::ResidualTooLarge {
            eigenvalues: eig,
            residual,
            bound: opts.residual_bound,
        });
    }
    Ok(eig)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Roots of `Σ c_k z^k` (lowest degree first) as eigenvalues of the
/// companion matrix, each polished by Newton steps that decrease `|p|`.
/// Exactly vanishing low coefficients give exact zero roots. Sorted.
pub fn polynomial_roots(coeffs: &[Complex64], opts: &EigenOptions) -> Result<Vec<Complex64>, EigenError> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| *z == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    let zeros = c.iter().take_while(|z| **z == Complex64::new(0.0, 0.0)).count();
    let c = &c[zeros..];
    let n = c.len().saturating_sub(1);
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if n > 0 {
        let lead = c[n];
        let mut comp = DMatrix::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -c[i] / lead;
        }
        let mut loose = opts.to_owned();
        loose.residual_bound = f64::INFINITY;
        for mut z in matrix_eigenvalues(&comp, &loose)? {
            for _ in 0..3 {
                let (p, dp) = horner(c, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let next = z - p / dp;
                if horner(c, next).0.norm() < p.norm() {
                    z = next;
                } else {
                    break;
                }
            }
            roots.push(z);
        }
    }
    sort_eigenvalues(&mut roots);
    Ok(roots)
}

/// Smallest pairwise distance.
pub fn min_gap(v: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.min((v[i] - v[j]).norm());
        }
    }
    best
}

/// Largest distance between two multisets of the same size under greedy
/// nearest matching.
pub fn matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let perm = match_frames(a, b);
    perm.iter()
        .enumerate()
        .map(|(i, &j)| (a[i] - b[j]).norm())
        .fold(0.0, f64::max)
}

/// Greedy nearest-neighbor assignment: `perm[i]` is the index in `next`
/// matched to `prev[i]`. Closest pairs are fixed first.
pub fn match_frames(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    assert_eq!(prev.len(), next.len());
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(prev.len() * next.len());
    for (i, a) in prev.iter().enumerate() {
        for (j, b) in next.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut perm = vec![usize::MAX; prev.len()];
    let mut taken = vec![false; next.len()];
    for (_, i, j) in pairs {
        if perm[i] == usize::MAX && !taken[j] {
            perm[i] = j;
            taken[j] = true;
        }
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonalizable_spectrum() {
        // similarity of diag(1, 2i, -3) by a fixed invertible matrix
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)]));
        let p = DMatrix::from_row_slice(3, 3, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(3.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let m = &p * d * p.clone().try_inverse().unwrap();
        let eig = matrix_eigenvalues(&m, &EigenOptions::default()).unwrap();
        let expect = [c(-3.0, 0.0), c(0.0, 2.0), c(1.0, 0.0)];
        for (a, b) in eig.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (z - 1)(z + 2)(z - i) z²
        let coeffs = [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0), c(-2.0, -1.0), c(1.0, -1.0), c(1.0, 0.0)];
        let r = polynomial_roots(&coeffs, &EigenOptions::default()).unwrap();
        assert_eq!(r.len(), 5);
        let expect = [c(-2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn balancing_preserves_spectrum() {
        let mut m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1e6, 0.0), c(1e-6, 0.0), c(2.0, 0.0)]);
        let before = matrix_eigenvalues(&m, &EigenOptions::default()).unwrap();
        balance(&mut m);
        assert!((m[(0, 1)].norm() - m[(1, 0)].norm()).abs() < 1.0);
        let after = matrix_eigenvalues(&m, &EigenOptions::default()).unwrap();
        assert!(matched_distance(&before, &after) < 1e-12);
    }

    #[test]
    fn greedy_matching() {
        let a = [c(0.0, 0.0), c(1.0, 0.0), c(5.0, 5.0)];
        let b = [c(5.1, 5.0), c(0.1, 0.0), c(0.9, 0.0)];
        assert_eq!(match_frames(&a, &b), vec![1, 2, 0]);
        assert!((min_gap(&a) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn residual_flags_wrong_eigenvalues() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(eigen_residual(&m, &[c(1.0, 0.0), c(-1.0, 0.0)]) < 1e-15);
        assert!(eigen_residual(&m, &[c(0.5, 0.0)]) > 0.1);
    }
}
