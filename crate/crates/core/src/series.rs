//! Exact polynomials in the deformation coordinates `t0..t5` and finitely
//! supported q-series with polynomial coefficients.
//!
//! [`TPoly`] is a sparse polynomial with big-rational coefficients.
//! [`QSeries`] maps non-negative q-exponents to `TPoly` coefficients and may
//! carry a truncation order `α`, in which case it represents a class modulo
//! `q^α`. Quantum coefficients never mention `t1` explicitly: `q = e^{t1}`,
//! so `∂/∂t1` acts on `q^d` as multiplication by `d`. Only the `q^0` part may
//! hold explicit `t1` monomials (the classical potential needs them).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Number of deformation coordinates `t0..t5`.
pub const NUM_VARS: usize = 6;

/// Exponent vector over `t0..t5`.
pub type Exponent = [u32; NUM_VARS];

/// The variable folded into `q`.
pub const T1: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("t1 is identified with log q; use derivative_t1 instead of partial_t(1)")]
    UseDerivativeT1,
    #[error("variable index {0} is out of range 0..6")]
    BadVariable(usize),
    #[error("explicit t1 found in the q^{0} coefficient (mixed representation)")]
    ExplicitT1InQuantumPart(u32),
    #[error("malformed series: {0}")]
    Malformed(String),
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // ratio of two huge integers; scale down via string lengths
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

fn parse_rational(s: &str) -> Result<Rational, SeriesError> {
    Rational::from_str(s.trim()).map_err(|_| SeriesError::Malformed(format!("bad rational {s:?}")))
}

/// Sparse polynomial in `t0..t5` with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap` keyed by exponent vector with no zero
/// coefficients, so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TPoly {
    terms: BTreeMap<Exponent, Rational>,
}

impl TPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0; NUM_VARS], c)
    }

    pub fn monomial(exp: Exponent, coeff: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        Self { terms }
    }

    /// The coordinate `t_i`.
    pub fn var(i: usize) -> Self {
        assert!(i < NUM_VARS, "variable index {i} out of range");
        let mut exp = [0; NUM_VARS];
        exp[i] = 1;
        Self::monomial(exp, Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exp: Exponent, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &Exponent) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.coeff(&[0; NUM_VARS])
    }

    /// Largest term in lexicographic exponent order.
    pub fn leading_term(&self) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exp: &Exponent, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| {
                    let mut k = *e;
                    for i in 0..NUM_VARS {
                        k[i] += exp[i];
                    }
                    (k, v * c)
                })
                .collect(),
        }
    }

    /// Formal partial derivative in `t_var`.
    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut k = *e;
            k[var] -= 1;
            out.add_term(k, c * rat(e[var] as i64));
        }
        out
    }

    /// Substitute the rational value `value` for `t_var`.
    pub fn substitute(&self, var: usize, value: &Rational) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut k = *e;
            let p = k[var];
            k[var] = 0;
            let factor = num_traits::pow(value.clone(), p as usize);
            out.add_term(k, c * factor);
        }
        out
    }

    /// Numeric value at the complex point `t`.
    pub fn evaluate(&self, t: &[Complex64; NUM_VARS]) -> Complex64 {
        let mut max_pow = [0u32; NUM_VARS];
        for e in self.terms.keys() {
            for i in 0..NUM_VARS {
                max_pow[i] = max_pow[i].max(e[i]);
            }
        }
        let powers: Vec<Vec<Complex64>> = (0..NUM_VARS)
            .map(|i| {
                let mut row = Vec::with_capacity(max_pow[i] as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=max_pow[i] {
                    row.push(acc);
                    acc *= t[i];
                }
                row
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = Complex64::new(rational_to_f64(c), 0.0);
                for i in 0..NUM_VARS {
                    if e[i] > 0 {
                        m *= powers[i][e[i] as usize];
                    }
                }
                m
            })
            .sum()
    }

    /// Largest monomial dividing every term (componentwise minimum exponent).
    pub fn monomial_content(&self) -> Option<Exponent> {
        let mut it = self.terms.keys();
        let first = *it.next()?;
        Some(it.fold(first, |mut acc, e| {
            for i in 0..NUM_VARS {
                acc[i] = acc[i].min(e[i]);
            }
            acc
        }))
    }
}

impl<'a> Add<&'a TPoly> for &'a TPoly {
    type Output = TPoly;
    fn add(self, rhs: &'a TPoly) -> TPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&TPoly> for TPoly {
    fn add_assign(&mut self, rhs: &TPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl SubAssign<&TPoly> for TPoly {
    fn sub_assign(&mut self, rhs: &TPoly) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

impl<'a> Sub<&'a TPoly> for &'a TPoly {
    type Output = TPoly;
    fn sub(self, rhs: &'a TPoly) -> TPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &TPoly {
    type Output = TPoly;
    fn neg(self) -> TPoly {
        TPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl<'a> Mul<&'a TPoly> for &'a TPoly {
    type Output = TPoly;
    fn mul(self, rhs: &'a TPoly) -> TPoly {
        let mut out = TPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let mut k = *e1;
                for i in 0..NUM_VARS {
                    k[i] += e2[i];
                }
                out.add_term(k, c1 * c2);
            }
        }
        out
    }
}

macro_rules! forward_owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}

forward_owned_ops!(TPoly);
forward_owned_ops!(QSeries);

fn fmt_monomial(e: &Exponent) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(format!("t{i}")),
            _ => parts.push(format!("t{i}^{k}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for TPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = fmt_monomial(e);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

/// Finitely supported series `Σ_d P_d q^d` with `P_d ∈ ℚ[t0..t5]`.
///
/// When `order` is `Some(α)` the value is only meaningful modulo `q^α` and
/// no coefficient at `d ≥ α` is stored. Binary operations take the smaller
/// of the two orders.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: BTreeMap<u32, TPoly>,
    order: Option<u32>,
}

fn min_order(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl QSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(TPoly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(TPoly::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn from_poly(p: TPoly) -> Self {
        Self::term(0, p)
    }

    /// `p · q^d`.
    pub fn term(d: u32, p: TPoly) -> Self {
        let mut coeffs = BTreeMap::new();
        if !p.is_zero() {
            coeffs.insert(d, p);
        }
        Self { coeffs, order: None }
    }

    /// `q^d`.
    pub fn q_pow(d: u32) -> Self {
        Self::term(d, TPoly::one())
    }

    /// The coordinate `t_i` as a series (q^0 coefficient).
    pub fn var(i: usize) -> Self {
        Self::from_poly(TPoly::var(i))
    }

    pub fn order(&self) -> Option<u32> {
        self.order
    }

    /// Reduce modulo `q^alpha`; the resulting order is the smaller of
    /// `alpha` and the current one.
    pub fn truncate(&self, alpha: u32) -> Self {
        let order = min_order(self.order, Some(alpha));
        let cut = order.unwrap();
        Self {
            coeffs: self.coeffs.range(..cut).map(|(d, p)| (*d, p.clone())).collect(),
            order,
        }
    }

    /// Keep only `d < alpha` and forget any truncation order, i.e. read the
    /// result as an exact polynomial in `q`.
    pub fn polynomial_part(&self, alpha: u32) -> Self {
        Self {
            coeffs: self.coeffs.range(..alpha).map(|(d, p)| (*d, p.clone())).collect(),
            order: None,
        }
    }

    /// Same coefficients, no truncation order.
    pub fn without_order(&self) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            order: None,
        }
    }

    fn with_raw(coeffs: BTreeMap<u32, TPoly>, order: Option<u32>) -> Self {
        let mut s = Self { coeffs, order };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.coeffs.retain(|_, p| !p.is_zero());
        if let Some(a) = self.order {
            self.coeffs.retain(|d, _| *d < a);
        }
    }

    pub fn coeff(&self, d: u32) -> Option<&TPoly> {
        self.coeffs.get(&d)
    }

    /// Coefficient of `q^d`, zero when absent.
    pub fn coeff_or_zero(&self, d: u32) -> TPoly {
        self.coeffs.get(&d).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &TPoly)> {
        self.coeffs.iter().map(|(d, p)| (*d, p))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1
            && self
                .coeffs
                .get(&0)
                .map(|p| p == &TPoly::one())
                .unwrap_or(false)
    }

    /// Smallest `d` with a nonzero coefficient; `None` stands for `+∞`.
    pub fn q_valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_q_degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.values().map(TPoly::len).sum()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::with_raw(
            self.coeffs.iter().map(|(d, p)| (*d, p.scale(c))).collect(),
            self.order,
        )
    }

    pub fn mul_poly(&self, p: &TPoly) -> Self {
        Self::with_raw(
            self.coeffs.iter().map(|(d, c)| (*d, c * p)).collect(),
            self.order,
        )
    }

    /// `∂/∂t_var` for `var ∈ {0, 2, 3, 4, 5}`.
    pub fn partial_t(&self, var: usize) -> Result<Self, SeriesError> {
        if var == T1 {
            return Err(SeriesError::UseDerivativeT1);
        }
        if var >= NUM_VARS {
            return Err(SeriesError::BadVariable(var));
        }
        Ok(Self::with_raw(
            self.coeffs.iter().map(|(d, p)| (*d, p.partial(var))).collect(),
            self.order,
        ))
    }

    /// `∂/∂t1` with `q = e^{t1}`: the `q^d` coefficient is multiplied by
    /// `d`, and the classical `q^0` part is differentiated in its explicit
    /// `t1` monomials.
    pub fn derivative_t1(&self) -> Result<Self, SeriesError> {
        let mut out = BTreeMap::new();
        for (d, p) in &self.coeffs {
            if *d == 0 {
                out.insert(0, p.partial(T1));
            } else {
                if p.involves(T1) {
                    return Err(SeriesError::ExplicitT1InQuantumPart(*d));
                }
                out.insert(*d, p.scale(&rat(*d as i64)));
            }
        }
        Ok(Self::with_raw(out, self.order))
    }

    /// Derivative along coordinate `i`, dispatching `t1` to
    /// [`QSeries::derivative_t1`].
    pub fn derivative(&self, var: usize) -> Result<Self, SeriesError> {
        if var == T1 {
            self.derivative_t1()
        } else {
            self.partial_t(var)
        }
    }

    pub fn substitute(&self, var: usize, value: &Rational) -> Self {
        Self::with_raw(
            self.coeffs
                .iter()
                .map(|(d, p)| (*d, p.substitute(var, value)))
                .collect(),
            self.order,
        )
    }

    pub fn involves(&self, var: usize) -> bool {
        self.coeffs.values().any(|p| p.involves(var))
    }

    /// Numeric specialization: every `TPoly` coefficient is evaluated at
    /// `t` and the q-polynomial is summed by Horner's rule.
    pub fn evaluate(&self, t: &[Complex64; NUM_VARS], q: Complex64) -> Complex64 {
        let Some(top) = self.max_q_degree() else {
            return Complex64::new(0.0, 0.0);
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for d in (0..=top).rev() {
            acc *= q;
            if let Some(p) = self.coeffs.get(&d) {
                acc += p.evaluate(t);
            }
        }
        acc
    }

    /// Leading term in the order "q-degree first, then lexicographic in
    /// `t0..t5`", a monomial order on `ℚ[q, t0..t5]`.
    fn leading_term(&self) -> Option<(u32, Exponent, Rational)> {
        let (d, p) = self.coeffs.iter().next_back()?;
        let (e, c) = p.leading_term()?;
        Some((*d, *e, c.clone()))
    }

    fn mul_monomial(&self, d: u32, e: &Exponent, c: &Rational) -> Self {
        Self::with_raw(
            self.coeffs
                .iter()
                .map(|(k, p)| (k + d, p.mul_monomial(e, c)))
                .collect(),
            self.order.map(|a| a.saturating_add(d)),
        )
    }

    /// Exact quotient `self / divisor` in `ℚ[q, t0..t5]`, or `None` if the
    /// division leaves a remainder. Both operands must be untruncated.
    pub fn div_exact(&self, divisor: &QSeries) -> Option<QSeries> {
        assert!(
            self.order.is_none() && divisor.order.is_none(),
            "exact division needs untruncated operands"
        );
        let (dd, de, dc) = divisor.leading_term()?;
        let mut rem = self.clone();
        let mut quot = QSeries::zero();
        while let Some((rd, re, rc)) = rem.leading_term() {
            if rd < dd || (0..NUM_VARS).any(|i| re[i] < de[i]) {
                return None;
            }
            let mut e = re;
            for i in 0..NUM_VARS {
                e[i] -= de[i];
            }
            let c = rc / &dc;
            rem -= &divisor.mul_monomial(rd - dd, &e, &c);
            quot.coeffs.entry(rd - dd).or_default().add_term(e, c);
        }
        quot.normalize();
        Some(quot)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = QSeries::one();
        if let Some(a) = self.order {
            acc = acc.truncate(a);
        }
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }
}

impl<'a> Add<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn add(self, rhs: &'a QSeries) -> QSeries {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&QSeries> for QSeries {
    fn add_assign(&mut self, rhs: &QSeries) {
        self.order = min_order(self.order, rhs.order);
        for (d, p) in &rhs.coeffs {
            *self.coeffs.entry(*d).or_default() += p;
        }
        self.normalize();
    }
}

impl SubAssign<&QSeries> for QSeries {
    fn sub_assign(&mut self, rhs: &QSeries) {
        self.order = min_order(self.order, rhs.order);
        for (d, p) in &rhs.coeffs {
            *self.coeffs.entry(*d).or_default() -= p;
        }
        self.normalize();
    }
}

impl<'a> Sub<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &'a QSeries) -> QSeries {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(d, p)| (*d, -p)).collect(),
            order: self.order,
        }
    }
}

impl<'a> Mul<&'a QSeries> for &'a QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &'a QSeries) -> QSeries {
        let order = min_order(self.order, rhs.order);
        let mut coeffs: BTreeMap<u32, TPoly> = BTreeMap::new();
        for (d1, p1) in &self.coeffs {
            for (d2, p2) in &rhs.coeffs {
                let d = d1 + d2;
                if order.is_some_and(|a| d >= a) {
                    break;
                }
                *coeffs.entry(d).or_default() += &(p1 * p2);
            }
        }
        QSeries::with_raw(coeffs, order)
    }
}

impl From<TPoly> for QSeries {
    fn from(p: TPoly) -> Self {
        QSeries::from_poly(p)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (n, (d, p)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let body = if p.len() > 1 && *d > 0 {
                format!("({p})")
            } else {
                p.to_string()
            };
            let minus_one = *p == -&TPoly::one();
            match d {
                0 => write!(f, "{body}")?,
                1 if p.is_one_poly() => write!(f, "q")?,
                1 if minus_one => write!(f, "-q")?,
                1 => write!(f, "{body}*q")?,
                _ if p.is_one_poly() => write!(f, "q^{d}")?,
                _ if minus_one => write!(f, "-q^{d}")?,
                _ => write!(f, "{body}*q^{d}")?,
            }
        }
        if let Some(a) = self.order {
            write!(f, " + O(q^{a})")?;
        }
        Ok(())
    }
}

impl TPoly {
    fn is_one_poly(&self) -> bool {
        *self == TPoly::one()
    }
}

/// JSON shape of a series: coefficients as decimal strings, exponents as
/// integer arrays.
#[derive(Serialize, Deserialize)]
struct QSeriesRepr {
    truncation_order: Option<u32>,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    q: u32,
    t: Exponent,
    coeff: String,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms = self
            .coeffs
            .iter()
            .flat_map(|(d, p)| {
                p.terms().map(move |(e, c)| TermRepr {
                    q: *d,
                    t: *e,
                    coeff: c.to_string(),
                })
            })
            .collect();
        QSeriesRepr {
            truncation_order: self.order,
            terms,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = QSeriesRepr::deserialize(deserializer)?;
        let mut coeffs: BTreeMap<u32, TPoly> = BTreeMap::new();
        for term in repr.terms {
            let c = parse_rational(&term.coeff).map_err(serde::de::Error::custom)?;
            if c.is_zero() {
                return Err(serde::de::Error::custom("zero coefficient stored"));
            }
            if repr.truncation_order.is_some_and(|a| term.q >= a) {
                return Err(serde::de::Error::custom(format!(
                    "term at q^{} beyond truncation order",
                    term.q
                )));
            }
            let p = coeffs.entry(term.q).or_default();
            if p.terms.contains_key(&term.t) {
                return Err(serde::de::Error::custom("duplicate term"));
            }
            p.add_term(term.t, c);
        }
        Ok(QSeries {
            coeffs,
            order: repr.truncation_order,
        })
    }
}

/// Parses sums of products of rationals, `t0..t5` (also written `t_k`),
/// `q`, powers and parentheses, e.g. `(1/2t_2^2t_3 + t_5)q - 3*t3*q^2`.
/// Juxtaposition multiplies. A trailing `+ O(q^a)` sets the order.
impl FromStr for QSeries {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parser = Parser { chars: &chars, pos: 0 };
        let value = parser.expr()?;
        if parser.pos != chars.len() {
            return Err(parser.error("unexpected character"));
        }
        Ok(value)
    }
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn error(&self, what: &str) -> SeriesError {
        SeriesError::Malformed(format!("{what} at position {}", self.pos))
    }

    fn expr(&mut self) -> Result<QSeries, SeriesError> {
        let mut acc = QSeries::zero();
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    false
                }
                Some('-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => return Ok(acc),
            };
            first = false;
            if self.chars[self.pos..].starts_with(&['O', '(']) {
                self.pos += 2;
                let order = match self.peek() {
                    Some('q') => {
                        self.pos += 1;
                        self.exponent()?
                    }
                    _ => return Err(self.error("expected q in O(...)")),
                };
                if self.peek() != Some(')') {
                    return Err(self.error("expected )"));
                }
                self.pos += 1;
                acc = acc.truncate(order);
                continue;
            }
            let t = self.term()?;
            acc = if negate { &acc - &t } else { &acc + &t };
        }
    }

    fn term(&mut self) -> Result<QSeries, SeriesError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(c) if c == '(' || c == 't' || c == 'q' || c.is_ascii_digit() => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<QSeries, SeriesError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected )"));
                }
                self.pos += 1;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            Some('t') => {
                self.pos += 1;
                if self.peek() == Some('_') {
                    self.pos += 1;
                }
                let v = match self.peek().and_then(|c| c.to_digit(10)) {
                    Some(v) if (v as usize) < NUM_VARS => v as usize,
                    _ => return Err(self.error("expected variable index 0..5")),
                };
                self.pos += 1;
                let e = self.exponent()?;
                if v == T1 {
                    return Err(SeriesError::ExplicitT1InQuantumPart(0));
                }
                let mut exp = [0; NUM_VARS];
                exp[v] = e;
                Ok(QSeries::from_poly(TPoly::monomial(exp, Rational::one())))
            }
            Some('q') => {
                self.pos += 1;
                let e = self.exponent()?;
                Ok(QSeries::q_pow(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let value = if self.peek() == Some('/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    Rational::new(num, den)
                } else {
                    Rational::from_integer(num)
                };
                Ok(QSeries::constant(value))
            }
            _ => Err(self.error("expected a factor")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, SeriesError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.error("expected an integer"))
    }

    fn exponent(&mut self) -> Result<u32, SeriesError> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        self.integer()?
            .to_u32()
            .ok_or_else(|| self.error("exponent too large"))
    }
}
