//! Square matrices over the exact series ring and the two determinant
//! routines used downstream: memoized cofactor expansion (any commutative
//! ring) and fraction-free Bareiss elimination (exact division in
//! `ℚ[q, t0..t5]`).

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::series::{QSeries, Rational, NUM_VARS};

/// The operations cofactor expansion needs.
pub trait CommRing: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl CommRing for QSeries {
    fn zero() -> Self {
        QSeries::zero()
    }
    fn one() -> Self {
        QSeries::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        QSeries::is_zero(self)
    }
}

/// Determinant by Laplace expansion along rows, memoized on the set of
/// remaining columns. Uses only ring operations, no division.
pub fn det_cofactor<R: CommRing>(rows: &[Vec<R>]) -> R {
    let n = rows.len();
    assert!(n <= 16, "cofactor expansion is for small matrices");
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return R::one();
    }
    let mut memo: HashMap<u32, R> = HashMap::new();
    minor(rows, (1u32 << n) - 1, &mut memo)
}

fn minor<R: CommRing>(rows: &[Vec<R>], cols: u32, memo: &mut HashMap<u32, R>) -> R {
    let n = rows.len();
    let k = cols.count_ones() as usize;
    if k == 0 {
        return R::one();
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let r = n - k;
    let mut acc = R::zero();
    let mut pos = 0;
    for c in 0..n {
        if cols & (1 << c) == 0 {
            continue;
        }
        let a = &rows[r][c];
        if !a.is_zero() {
            let sub = minor(rows, cols & !(1 << c), memo);
            let term = a.mul(&sub);
            acc = if pos % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        pos += 1;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Fraction-free Gaussian elimination; every intermediate entry is a minor
/// of the input, so each division is exact.
pub fn det_bareiss(rows: &[Vec<QSeries>]) -> QSeries {
    let n = rows.len();
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return QSeries::one();
    }
    let mut a: Vec<Vec<QSeries>> = rows.iter().map(|r| r.iter().map(QSeries::without_order).collect()).collect();
    let mut negate = false;
    let mut prev = QSeries::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return QSeries::zero();
            };
            a.swap(k, r);
            negate = !negate;
        }
        let pivot_row = a[k].clone();
        let pivot = pivot_row[k].clone();
        a[k + 1..].par_iter_mut().for_each(|row| {
            let lead = row[k].clone();
            for j in k + 1..n {
                let num = &(&row[j] * &pivot) - &(&lead * &pivot_row[j]);
                row[j] = num
                    .div_exact(&prev)
                    .expect("Bareiss step divides exactly");
            }
            row[k] = QSeries::zero();
        });
        prev = pivot;
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Dense square matrix of series, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    n: usize,
    entries: Vec<QSeries>,
}

impl SeriesMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![QSeries::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, QSeries::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QSeries>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &QSeries {
        &self.entries[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QSeries) {
        self.entries[r * self.n + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<QSeries>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(&QSeries) -> QSeries) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Entrywise `Σ_{d<α}`: the finite-energy truncation, read as exact
    /// polynomials in `q`.
    pub fn truncate(&self, alpha: u32) -> Self {
        self.map(|s| s.polynomial_part(alpha))
    }

    pub fn substitute(&self, var: usize, value: &Rational) -> Self {
        self.map(|s| s.substitute(var, value))
    }

    pub fn trace(&self) -> QSeries {
        (0..self.n).fold(QSeries::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(QSeries::is_zero)
    }

    pub fn mul(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                let mut acc = QSeries::zero();
                for k in 0..n {
                    let a = self.get(r, k);
                    let b = other.get(k, c);
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    pub fn add(&self, other: &SeriesMatrix) -> SeriesMatrix {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &QSeries) -> SeriesMatrix {
        self.map(|e| e * s)
    }

    pub fn det(&self) -> QSeries {
        det_bareiss(&self.rows())
    }

    /// Numeric specialization, row-major.
    pub fn evaluate(&self, t: &[Complex64; NUM_VARS], q: Complex64) -> Vec<Complex64> {
        self.entries.iter().map(|e| e.evaluate(t, q)).collect()
    }
}

impl fmt::Display for SeriesMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        let widths: Vec<usize> = (0..self.n)
            .map(|c| (0..self.n).map(|r| cells[r * self.n + c].chars().count()).max().unwrap_or(1))
            .collect();
        for r in 0..self.n {
            let line: Vec<String> = (0..self.n)
                .map(|c| format!("{:<w$}", cells[r * self.n + c], w = widths[c]))
                .collect();
            writeln!(f, "{}", line.join(" | ").trim_end())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, TPoly};

    fn s(n: i64) -> QSeries {
        QSeries::from_int(n)
    }

    #[test]
    fn integer_determinants_agree() {
        let m = vec![
            vec![s(2), s(-1), s(0), s(3)],
            vec![s(1), s(4), s(2), s(0)],
            vec![s(0), s(5), s(1), s(1)],
            vec![s(7), s(0), s(2), s(6)],
        ];
        let a = det_cofactor(&m);
        let b = det_bareiss(&m);
        assert_eq!(a, b);
        assert_eq!(a, s(26));
    }

    #[test]
    fn bareiss_with_zero_pivot() {
        let m = vec![vec![s(0), s(1)], vec![s(1), s(0)]];
        assert_eq!(det_bareiss(&m), s(-1));
        let sing = vec![vec![s(0), s(1)], vec![s(0), s(2)]];
        assert!(det_bareiss(&sing).is_zero());
    }

    #[test]
    fn symbolic_determinants_agree() {
        let t2 = QSeries::var(2);
        let q = QSeries::q_pow(1);
        let m = vec![
            vec![t2.clone(), &q * &t2, s(4)],
            vec![s(1), q.clone(), &t2 * &t2],
            vec![&q + &s(3), s(0), QSeries::term(1, TPoly::var(5))],
        ];
        assert_eq!(det_cofactor(&m), det_bareiss(&m));
    }

    #[test]
    fn identity_trace() {
        let id = SeriesMatrix::identity(6);
        assert_eq!(id.trace(), QSeries::constant(rat(6)));
        assert_eq!(id.det(), s(1));
        assert_eq!(id.mul(&id), id);
    }
}
