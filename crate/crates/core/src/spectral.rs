//! Exact characteristic polynomials, discriminants via the Sylvester
//! resultant, and valuation-based simplicity verdicts.

use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::dubrovin::{truncate_matrix, DubrovinMatrix};
use crate::matrix::{det_bareiss, det_cofactor, CommRing, SeriesMatrix};
use crate::series::{QSeries, Rational, TPoly, NUM_VARS};

/// Polynomial in `λ` with series coefficients, lowest degree first and no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaPoly(Vec<QSeries>);

impl LambdaPoly {
    pub fn new(mut coeffs: Vec<QSeries>) -> Self {
        while coeffs.last().is_some_and(QSeries::is_zero) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn constant(c: QSeries) -> Self {
        Self::new(vec![c])
    }

    /// `λ - c`.
    pub fn monic_linear(c: &QSeries) -> Self {
        Self::new(vec![-c, QSeries::one()])
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[QSeries] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> QSeries {
        self.0.get(k).cloned().unwrap_or_else(QSeries::zero)
    }

    pub fn leading(&self) -> Option<&QSeries> {
        self.0.last()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&Rational::from_integer((k as i64).into())))
                .collect(),
        )
    }

    fn scale(&self, s: &QSeries) -> Self {
        Self::new(self.0.iter().map(|c| c * s).collect())
    }

    fn shift_up(&self, k: usize) -> Self {
        let mut v = vec![QSeries::zero(); k];
        v.extend(self.0.iter().cloned());
        Self::new(v)
    }

    fn is_untruncated(&self) -> bool {
        self.0.iter().all(|c| c.order().is_none())
    }
}

impl CommRing for LambdaPoly {
    fn zero() -> Self {
        Self(Vec::new())
    }
    fn one() -> Self {
        Self::constant(QSeries::one())
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self(Vec::new());
        }
        let mut out = vec![QSeries::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += &(a * b);
                }
            }
        }
        Self::new(out)
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Monic `det(λI − M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharPoly {
    poly: LambdaPoly,
}

impl CharPoly {
    pub fn of(m: &SeriesMatrix) -> Self {
        let n = m.size();
        let rows: Vec<Vec<LambdaPoly>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        if r == c {
                            LambdaPoly::monic_linear(m.get(r, c))
                        } else {
                            LambdaPoly::constant(-m.get(r, c))
                        }
                    })
                    .collect()
            })
            .collect();
        let poly = det_cofactor(&rows);
        debug_assert_eq!(poly.degree(), Some(n));
        Self { poly }
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    /// Coefficient of `λ^k`.
    pub fn coeff(&self, k: usize) -> QSeries {
        self.poly.coeff(k)
    }

    pub fn as_lambda_poly(&self) -> &LambdaPoly {
        &self.poly
    }

    /// Number of coefficients `c_0, c_1, ...` that vanish identically, i.e.
    /// the multiplicity of the eigenvalue `0` for every parameter value.
    pub fn lambda_valuation(&self) -> usize {
        self.poly.0.iter().take_while(|c| c.is_zero()).count()
    }

    /// Coefficients at a numeric point, lowest degree first.
    pub fn evaluate_coeffs(&self, t: &[Complex64; NUM_VARS], q: Complex64) -> Vec<Complex64> {
        (0..=self.degree()).map(|k| self.coeff(k).evaluate(t, q)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "degree": self.degree(),
            "coefficients": self
                .poly
                .0
                .iter()
                .map(|c| serde_json::to_value(c).expect("series serialize"))
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in (0..=self.degree()).rev() {
            let c = self.coeff(k);
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let lam = match k {
                0 => String::new(),
                1 => "λ".to_string(),
                _ => format!("λ^{k}"),
            };
            match (c.is_one(), k) {
                (true, 0) => write!(f, "1")?,
                (true, _) => write!(f, "{lam}")?,
                (false, 0) => write!(f, "{c}")?,
                (false, _) => write!(f, "({c})*{lam}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

pub fn char_poly(m: &DubrovinMatrix) -> CharPoly {
    CharPoly::of(&m.matrix)
}

/// Sylvester matrix of `p` (degree `m`) and `r` (degree `n`): `n` shifted
/// rows of `p` followed by `m` shifted rows of `r`, coefficients from the
/// leading one down.
pub fn sylvester_matrix(p: &LambdaPoly, r: &LambdaPoly) -> SeriesMatrix {
    let m = p.degree().expect("nonzero polynomial");
    let n = r.degree().expect("nonzero polynomial");
    let size = m + n;
    let mut s = SeriesMatrix::zero(size);
    for row in 0..n {
        for k in 0..=m {
            s.set(row, row + k, p.coeff(m - k));
        }
    }
    for row in 0..m {
        for k in 0..=n {
            s.set(n + row, row + k, r.coeff(n - k));
        }
    }
    s
}

/// `Res(p, r)` as the Sylvester determinant.
pub fn resultant(p: &LambdaPoly, r: &LambdaPoly) -> QSeries {
    if p.degree().is_none() || r.degree().is_none() {
        return QSeries::zero();
    }
    let s = sylvester_matrix(p, r);
    if p.is_untruncated() && r.is_untruncated() {
        det_bareiss(&s.rows())
    } else {
        det_cofactor(&s.rows())
    }
}

/// `Δ = Res(p, p')` with its q-adic valuation (`None` when `Δ = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantResult {
    pub value: QSeries,
    pub valuation: Option<u32>,
}

impl DiscriminantResult {
    pub fn new(value: QSeries) -> Self {
        let valuation = value.q_valuation();
        Self { value, valuation }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Coefficient of `q^val`.
    pub fn leading(&self) -> Option<TPoly> {
        self.valuation.map(|v| self.value.coeff_or_zero(v))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "value": serde_json::to_value(&self.value).expect("series serialize"),
            "valuation": self.valuation,
            "leading": self.leading().map(|p| p.to_string()),
            "is_zero": self.is_zero(),
        })
    }
}

impl fmt::Display for DiscriminantResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.valuation, self.leading()) {
            (Some(v), Some(lead)) => write!(f, "({lead})*q^{v} + o(q^{v})"),
            _ => write!(f, "0"),
        }
    }
}

pub fn discriminant(p: &CharPoly) -> DiscriminantResult {
    DiscriminantResult::new(resultant(&p.poly, &p.poly.derivative()))
}

/// Pseudo-remainder `lc(b)^{deg a − deg b + 1} a mod b`.
fn pseudo_remainder(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let db = b.degree().expect("nonzero divisor");
    let lc = b.leading().unwrap().clone();
    let da = a.degree().unwrap_or(0);
    let mut r = a.clone();
    let mut steps = 0;
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let lead = r.leading().unwrap().clone();
        r = r.scale(&lc).sub(&b.scale(&lead).shift_up(dr - db));
        steps += 1;
    }
    if da < db {
        return r;
    }
    r.scale(&lc.pow((da - db + 1 - steps) as u32))
}

fn series_div(a: &QSeries, b: &QSeries) -> QSeries {
    a.div_exact(b).expect("subresultant step divides exactly")
}

/// Subresultant polynomial remainder sequence of `a` and `b`, with
/// `deg a ≥ deg b`. Entries are exact polynomials (no truncation order).
pub fn subresultant_prs(a: &LambdaPoly, b: &LambdaPoly) -> Vec<LambdaPoly> {
    assert!(a.is_untruncated() && b.is_untruncated(), "PRS needs exact coefficients");
    let mut seq = vec![a.clone(), b.clone()];
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut g = QSeries::one();
    let mut h = QSeries::one();
    while b.degree().is_some_and(|d| d > 0) {
        let delta = a.degree().unwrap() - b.degree().unwrap();
        let r = pseudo_remainder(&a, &b);
        if r.is_zero() {
            break;
        }
        let divisor = &g * &h.pow(delta as u32);
        let next = LambdaPoly::new(r.0.iter().map(|c| series_div(c, &divisor)).collect());
        a = b;
        b = next;
        g = a.leading().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            series_div(&g.pow(delta as u32), &h.pow(delta as u32 - 1))
        };
        seq.push(b.clone());
    }
    seq
}

/// Degree of `gcd(p, p')` over the fraction field of the coefficient ring.
pub fn gcd_degree_with_derivative(p: &CharPoly) -> usize {
    let seq = subresultant_prs(&p.poly, &p.poly.derivative());
    seq.last().and_then(LambdaPoly::degree).unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Simplicity {
    /// `Δ_{<α} ≢ 0 mod q^α`: the full operator has simple spectrum.
    SimpleCertified,
    /// `Δ_{<α} ≠ 0` but vanishes mod `q^α`: only the truncation is known
    /// to be simple.
    TruncationSimple,
    /// `Δ_{<α} = 0`.
    TruncationNonsimple,
}

impl fmt::Display for Simplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Simplicity::SimpleCertified => "SIMPLE_CERTIFIED",
            Simplicity::TruncationSimple => "TRUNCATION_SIMPLE",
            Simplicity::TruncationNonsimple => "TRUNCATION_NONSIMPLE",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicityVerdict {
    pub kind: Simplicity,
    pub alpha: u32,
    pub witness: DiscriminantResult,
}

impl SimplicityVerdict {
    pub fn from_discriminant(witness: DiscriminantResult, alpha: u32) -> Self {
        let kind = match witness.valuation {
            None => Simplicity::TruncationNonsimple,
            Some(v) if v < alpha => Simplicity::SimpleCertified,
            Some(_) => Simplicity::TruncationSimple,
        };
        Self { kind, alpha, witness }
    }

    /// What the truncated discriminant says about the untruncated operator.
    pub fn full_operator(&self) -> String {
        let a = self.alpha;
        match self.kind {
            Simplicity::SimpleCertified => "simple spectrum".into(),
            Simplicity::TruncationSimple => format!("undecided: the full discriminant vanishes mod q^{a}"),
            Simplicity::TruncationNonsimple => {
                format!("undecided: either non-simple spectrum or val(Δ) ≥ {a}")
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "verdict": self.kind,
            "alpha": self.alpha,
            "discriminant": self.witness.to_json(),
            "full_operator": self.full_operator(),
        })
    }
}

/// Verdict for `M_{<α}`.
pub fn classify(m: &DubrovinMatrix, alpha: u32) -> SimplicityVerdict {
    let truncated = truncate_matrix(m, alpha);
    SimplicityVerdict::from_discriminant(discriminant(&char_poly(&truncated)), alpha)
}

type Univariate = Vec<Rational>;

fn trim(mut p: Univariate) -> Univariate {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn univariate_rem(a: &Univariate, b: &Univariate) -> Univariate {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lc = b[db].clone();
    while r.len() > db {
        let f = r.last().unwrap() / &lc;
        let shift = r.len() - 1 - db;
        for (k, c) in b.iter().enumerate() {
            r[shift + k] -= &f * c;
        }
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn univariate_gcd(mut a: Univariate, mut b: Univariate) -> Univariate {
    while !b.is_empty() {
        let r = univariate_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(lc) = a.last().cloned() {
        for c in &mut a {
            *c /= &lc;
        }
    }
    a
}

/// For a one-parameter family in `t_var`: the monic gcd of the q-coefficients
/// of `Δ` as polynomials in `t_var`. Its roots are the parameter values where
/// the exact discriminant vanishes identically. `None` when `Δ = 0` or the
/// coefficients involve other coordinates.
pub fn exceptional_content(d: &DiscriminantResult, var: usize) -> Option<TPoly> {
    if d.is_zero() {
        return None;
    }
    let mut g: Univariate = Vec::new();
    for (_, p) in d.value.iter() {
        let mut u: Univariate = Vec::new();
        for (e, c) in p.terms() {
            if e.iter().enumerate().any(|(v, &k)| v != var && k > 0) {
                return None;
            }
            let k = e[var] as usize;
            if u.len() <= k {
                u.resize(k + 1, Rational::zero());
            }
            u[k] = c.clone();
        }
        g = univariate_gcd(g, trim(u));
    }
    let mut out = TPoly::zero();
    for (k, c) in g.into_iter().enumerate() {
        if !c.is_zero() {
            let mut e = [0; NUM_VARS];
            e[var] = k as u32;
            out.add_term(e, c);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, TPoly};

    fn lp(coeffs: &[&str]) -> LambdaPoly {
        LambdaPoly::new(coeffs.iter().map(|c| c.parse().unwrap()).collect())
    }

    #[test]
    fn resultant_of_linear_factors() {
        // Res((λ-1)(λ-2), λ-3) = (1-3)(2-3) = 2
        let p = lp(&["2", "-3", "1"]);
        let r = lp(&["-3", "1"]);
        assert_eq!(resultant(&p, &r), QSeries::from_int(2));
    }

    #[test]
    fn quadratic_discriminant_sign() {
        // Res(p, p') for λ² + bλ + c equals 4c − b² with the p-rows first
        let p = lp(&["t2", "t3", "1"]);
        let d = resultant(&p, &p.derivative());
        assert_eq!(d, "4t2 - t3^2".parse().unwrap());
    }

    #[test]
    fn cubic_discriminant() {
        // λ³ + aλ + b: Res(p, p') = 4a³ + 27b²
        let p = lp(&["t3", "t2", "0", "1"]);
        assert_eq!(resultant(&p, &p.derivative()), "4t2^3 + 27t3^2".parse().unwrap());
    }

    #[test]
    fn char_poly_of_small_matrix() {
        let m = SeriesMatrix::from_rows(vec![
            vec!["0".parse().unwrap(), "q".parse().unwrap()],
            vec!["q".parse().unwrap(), "0".parse().unwrap()],
        ]);
        let p = CharPoly::of(&m);
        assert_eq!(p.coeff(0), "-q^2".parse().unwrap());
        assert_eq!(p.coeff(1), QSeries::zero());
        assert_eq!(p.coeff(2), QSeries::one());
        assert_eq!(p.to_string(), "λ^2 + -q^2");
    }

    #[test]
    fn prs_detects_repeated_roots() {
        let sq = lp(&["t2^2", "-2t2", "1"]);
        let p = CharPoly { poly: sq.clone() };
        assert_eq!(gcd_degree_with_derivative(&p), 1);
        assert!(discriminant(&p).is_zero());
        let simple = CharPoly { poly: lp(&["-q", "0", "1"]) };
        assert_eq!(gcd_degree_with_derivative(&simple), 0);
        let last = subresultant_prs(&simple.poly, &simple.poly.derivative()).pop().unwrap();
        let res = resultant(&simple.poly, &simple.poly.derivative());
        assert!(last.coeff(0) == res || last.coeff(0) == -res);
    }

    #[test]
    fn verdicts() {
        let d = DiscriminantResult::new("3t2^2q^8".parse().unwrap());
        assert_eq!(SimplicityVerdict::from_discriminant(d.clone(), 2).kind, Simplicity::TruncationSimple);
        assert_eq!(SimplicityVerdict::from_discriminant(d, 9).kind, Simplicity::SimpleCertified);
        let z = DiscriminantResult::new(QSeries::zero());
        assert_eq!(SimplicityVerdict::from_discriminant(z, 2).kind, Simplicity::TruncationNonsimple);
    }

    #[test]
    fn content_of_family_discriminant() {
        let d = DiscriminantResult::new("(2t2^2 - 2t2^3)q^3 + 4t2^2q^4".parse().unwrap());
        let c = exceptional_content(&d, 2).unwrap();
        assert_eq!(c, TPoly::monomial([0, 0, 2, 0, 0, 0], rat(1)));
        assert_eq!(exceptional_content(&DiscriminantResult::new("t3q".parse().unwrap()), 2), None);
    }
}
