//! Genus-zero Gromov–Witten potential of Gr(2,4).
//!
//! `Φ = Φ_c + Σ_d (Σ_n̂ N(n̂) t̂^n̂ / n̂!) q^d` where `Φ_c` comes from triple
//! intersections and the numbers `N(n̂)` are recovered degree by degree from
//! the WDVV equations, starting from `N(0,0,1,1) = 1`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schubert::{dual_index, triple_intersection, DIM};
use crate::series::{rat, Exponent, QSeries, Rational, TPoly, NUM_VARS, T1};

/// Weight of `t2, t3, t4, t5` in the dimension constraint.
pub const HAT_WEIGHTS: [u32; 4] = [1, 1, 2, 3];

/// Degree used when nothing else is requested.
pub const DEFAULT_MAX_DEGREE: u32 = 2;

/// Index of an unknown Gromov–Witten number: insertions `n̂ = (n2,n3,n4,n5)`
/// in curve degree `d`, with `n2 + n3 + 2 n4 + 3 n5 = 4d + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GWKey {
    pub degree: u32,
    pub n_hat: [u32; 4],
}

impl GWKey {
    pub fn new(n_hat: [u32; 4], degree: u32) -> Option<Self> {
        (degree >= 1 && weighted_size(&n_hat) == 4 * degree + 1).then_some(Self { degree, n_hat })
    }

    /// Every valid key of the given degree, in lexicographic order of `n̂`.
    pub fn all(degree: u32) -> Vec<GWKey> {
        let w = 4 * degree + 1;
        let mut keys = Vec::new();
        for n2 in 0..=w {
            for n3 in 0..=(w - n2) {
                for n4 in 0..=(w - n2 - n3) / 2 {
                    let rest = w - n2 - n3 - 2 * n4;
                    if rest.is_multiple_of(3) {
                        keys.push(GWKey {
                            degree,
                            n_hat: [n2, n3, n4, rest / 3],
                        });
                    }
                }
            }
        }
        keys.sort();
        keys
    }

    /// Exponent vector over `t0..t5`.
    pub fn exponent(&self) -> Exponent {
        let [a, b, c, d] = self.n_hat;
        [0, 0, a, b, c, d]
    }

    /// `t̂^n̂ / n̂!`.
    pub fn monomial(&self) -> TPoly {
        let denom: u64 = self.n_hat.iter().map(|&k| factorial(k)).product();
        TPoly::monomial(
            self.exponent(),
            Rational::new(1.into(), denom.into()),
        )
    }
}

impl fmt::Display for GWKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.n_hat;
        write!(f, "N({a},{b},{c},{d})")
    }
}

pub fn weighted_size(n_hat: &[u32; 4]) -> u32 {
    n_hat.iter().zip(HAT_WEIGHTS).map(|(n, w)| n * w).sum()
}

fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WdvvError {
    #[error("max_degree must be at least 1")]
    InvalidDegree,
    #[error("WDVV system at degree {degree} has {count} contradictory equations")]
    InconsistentSystem { degree: u32, count: usize },
    #[error("WDVV system at degree {degree} leaves {} numbers undetermined: {}", free.len(), fmt_keys(free))]
    Underdetermined { degree: u32, free: Vec<GWKey> },
}

fn fmt_keys(keys: &[GWKey]) -> String {
    keys.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
}

/// Gromov–Witten numbers for every valid key up to `max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GWTable {
    entries: BTreeMap<GWKey, Rational>,
    max_degree: u32,
}

impl GWTable {
    /// Table with no degrees filled in.
    pub fn empty() -> Self {
        GWTable {
            entries: BTreeMap::new(),
            max_degree: 0,
        }
    }

    /// Table from explicit values; `max_degree` is the largest degree
    /// present.
    pub fn from_entries(entries: BTreeMap<GWKey, Rational>) -> Self {
        let max_degree = entries.keys().map(|k| k.degree).max().unwrap_or(0);
        GWTable { entries, max_degree }
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn get(&self, key: &GWKey) -> Option<&Rational> {
        self.entries.get(key)
    }

    /// Lookup by insertion vector; the degree follows from the constraint.
    pub fn value(&self, n_hat: [u32; 4]) -> Option<&Rational> {
        let w = weighted_size(&n_hat);
        if w % 4 != 1 {
            return None;
        }
        self.entries.get(&GWKey::new(n_hat, (w - 1) / 4)?)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&GWKey, &Rational)> {
        self.entries.iter()
    }

    pub fn degree_entries(&self, degree: u32) -> impl DoubleEndedIterator<Item = (&GWKey, &Rational)> {
        self.entries.iter().filter(move |(k, _)| k.degree == degree)
    }

    pub fn is_complete(&self) -> bool {
        (1..=self.max_degree).all(|d| GWKey::all(d).iter().all(|k| self.entries.contains_key(k)))
    }

    /// Restriction to degrees `≤ degree`.
    pub fn up_to(&self, degree: u32) -> GWTable {
        GWTable {
            entries: self
                .entries
                .iter()
                .filter(|(k, _)| k.degree <= degree)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
            max_degree: degree.min(self.max_degree),
        }
    }

    /// Whether `N(n2,n3,n4,n5) = N(n3,n2,n4,n5)` throughout, the symmetry
    /// exchanging σ_(2,0) and σ_(1,1).
    pub fn is_swap_symmetric(&self) -> bool {
        self.entries.iter().all(|(k, v)| {
            let [a, b, c, d] = k.n_hat;
            self.entries.get(&GWKey { degree: k.degree, n_hat: [b, a, c, d] }) == Some(v)
        })
    }

    /// Aligned listing, four entries per line, keys in descending order
    /// within each degree. When the table is symmetric under `n2 ↔ n3`
    /// only the keys with `n2 ≥ n3` are printed.
    pub fn to_text(&self) -> String {
        let symmetric = self.is_swap_symmetric();
        let mut out = String::new();
        for d in 1..=self.max_degree {
            out.push_str(&format!(
                "degree d={d} (|n̂| = n2+n3+2n4+3n5 = {})\n",
                4 * d + 1
            ));
            let cells: Vec<String> = self
                .degree_entries(d)
                .rev()
                .filter(|(k, _)| !symmetric || k.n_hat[0] >= k.n_hat[1])
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            let width = cells.iter().map(|c| c.chars().count()).max().unwrap_or(0);
            for row in cells.chunks(4) {
                let line: Vec<String> = row
                    .iter()
                    .map(|c| format!("{c:<width$}"))
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
            }
        }
        if symmetric {
            out.push_str("remaining entries: N(n2,n3,n4,n5) = N(n3,n2,n4,n5)\n");
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let degrees: Vec<serde_json::Value> = (1..=self.max_degree)
            .map(|d| {
                let entries: Vec<serde_json::Value> = self
                    .degree_entries(d)
                    .rev()
                    .map(|(k, v)| serde_json::json!({ "n_hat": k.n_hat, "value": v.to_string() }))
                    .collect();
                serde_json::json!({
                    "degree": d,
                    "weighted_size": 4 * d + 1,
                    "entries": entries,
                })
            })
            .collect();
        serde_json::json!({ "max_degree": self.max_degree, "degrees": degrees })
    }
}

/// Splitting `Φ = Φ_c + Φ̂`, with `Φ̂` stored degree by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Potential {
    pub classical: TPoly,
    pub quantum: BTreeMap<u32, TPoly>,
    pub max_degree: u32,
}

/// `Φ_c = Σ_{|n|=3} ⟨σ^n, [X]⟩ t^n / n!`.
pub fn classical_potential() -> TPoly {
    let mut phi = TPoly::zero();
    for i in 0..DIM {
        for j in i..DIM {
            for k in j..DIM {
                let c = triple_intersection(i, j, k);
                if c.is_zero() {
                    continue;
                }
                let mut e = [0u32; NUM_VARS];
                e[i] += 1;
                e[j] += 1;
                e[k] += 1;
                let sym: u64 = e.iter().map(|&m| factorial(m)).product();
                phi.add_term(e, c / rat(sym as i64));
            }
        }
    }
    phi
}

pub fn build_potential(table: &GWTable) -> Potential {
    let mut quantum = BTreeMap::new();
    for (key, n) in table.entries() {
        if n.is_zero() {
            continue;
        }
        let p: &mut TPoly = quantum.entry(key.degree).or_default();
        *p += &key.monomial().scale(n);
    }
    quantum.retain(|_, p: &mut TPoly| !p.is_zero());
    Potential {
        classical: classical_potential(),
        quantum,
        max_degree: table.max_degree(),
    }
}

impl Potential {
    /// `Φ` as a single series: `Φ_c` at `q^0` (with explicit `t1`), the
    /// quantum part at `q^d`.
    pub fn as_series(&self) -> QSeries {
        let mut s = QSeries::from_poly(self.classical.clone());
        for (d, p) in &self.quantum {
            s += &QSeries::term(*d, p.clone());
        }
        s
    }

    /// `Φ_{ije}` modulo `q^alpha`. Only degrees up to `max_degree` are
    /// known, so `alpha ≤ max_degree + 1` is needed for a faithful result.
    pub fn third_derivative(&self, i: usize, j: usize, e: usize, alpha: u32) -> QSeries {
        third_derivative_of(&self.as_series().truncate(alpha), [i, j, e])
    }

    /// All 216 third derivatives modulo `q^alpha`.
    pub fn structure_series(&self, alpha: u32) -> StructureSeries {
        let phi = self.as_series().truncate(alpha);
        let mut unique: BTreeMap<[usize; 3], QSeries> = BTreeMap::new();
        let mut data = Vec::with_capacity(DIM * DIM * DIM);
        for i in 0..DIM {
            for j in 0..DIM {
                for e in 0..DIM {
                    let mut key = [i, j, e];
                    key.sort_unstable();
                    let s = unique
                        .entry(key)
                        .or_insert_with(|| third_derivative_of(&phi, key))
                        .clone();
                    data.push(s);
                }
            }
        }
        StructureSeries { data, alpha }
    }
}

fn third_derivative_of(s: &QSeries, idx: [usize; 3]) -> QSeries {
    idx.iter().fold(s.clone(), |acc, &v| {
        acc.derivative(v)
            .expect("potential keeps t1 out of quantum coefficients")
    })
}

/// Table of `Φ_{ije}` indexed by `(i, j, e)`.
#[derive(Clone, Debug)]
pub struct StructureSeries {
    data: Vec<QSeries>,
    alpha: u32,
}

impl StructureSeries {
    pub fn get(&self, i: usize, j: usize, e: usize) -> &QSeries {
        &self.data[(i * DIM + j) * DIM + e]
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// `Σ_{e,f} Φ_{ije} g^{ef} Φ_{fkl}`.
    pub fn contraction(&self, i: usize, j: usize, k: usize, l: usize) -> QSeries {
        let mut acc = QSeries::zero().truncate(self.alpha);
        for e in 0..DIM {
            let a = self.get(i, j, e);
            if a.is_zero() {
                continue;
            }
            let b = self.get(dual_index(e), k, l);
            acc += &(a * b);
        }
        acc
    }
}

/// Index of the unordered pair `{i, j}` among the 21 pairs.
fn pair_index(i: usize, j: usize) -> usize {
    let (a, b) = (i.min(j), i.max(j));
    a * DIM - a * (a + 1) / 2 + b
}

const NUM_PAIRS: usize = DIM * (DIM + 1) / 2;

fn all_pairs() -> Vec<(usize, usize)> {
    (0..DIM).flat_map(|a| (a..DIM).map(move |b| (a, b))).collect()
}

/// Nonzero WDVV residuals `Σ Φ_{ije} g^{ef} Φ_{fkl} − Σ Φ_{jke} g^{ef} Φ_{fil}`
/// modulo `q^alpha`, over all 6⁴ quadruples.
pub fn wdvv_residual(potential: &Potential, alpha: u32) -> Vec<([usize; 4], QSeries)> {
    use rayon::prelude::*;
    let phi = potential.structure_series(alpha);
    let pairs = all_pairs();
    // contraction is symmetric under swapping the two pairs
    let mut jobs = Vec::new();
    for p in 0..NUM_PAIRS {
        for q in p..NUM_PAIRS {
            jobs.push((p, q));
        }
    }
    let values: Vec<((usize, usize), QSeries)> = jobs
        .par_iter()
        .map(|&(p, q)| {
            let (i, j) = pairs[p];
            let (k, l) = pairs[q];
            ((p, q), phi.contraction(i, j, k, l))
        })
        .collect();
    let mut table = vec![QSeries::zero(); NUM_PAIRS * NUM_PAIRS];
    for ((p, q), v) in values {
        table[p * NUM_PAIRS + q] = v.clone();
        table[q * NUM_PAIRS + p] = v;
    }
    let f = |a: usize, b: usize, c: usize, d: usize| &table[pair_index(a, b) * NUM_PAIRS + pair_index(c, d)];
    let mut out = Vec::new();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let r = f(i, j, k, l) - f(j, k, i, l);
                    if !r.is_zero() {
                        out.push(([i, j, k, l], r));
                    }
                }
            }
        }
    }
    out
}

/// One scalar equation `Σ_u coeffs[u] · N_u = rhs`, read off as the
/// coefficient of `q^degree · t̂^monomial` in the WDVV identity for
/// `quadruple`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdvvEquation {
    pub quadruple: [usize; 4],
    pub monomial: Exponent,
    pub coeffs: BTreeMap<GWKey, Rational>,
    pub rhs: Rational,
}

/// Third derivative of `t̂^n̂/n̂! · q^d` restricted to its only coefficient.
fn monomial_third_derivative(key: &GWKey, idx: [usize; 3]) -> TPoly {
    let mut p = key.monomial();
    for v in idx {
        if v == T1 {
            p = p.scale(&rat(key.degree as i64));
        } else {
            p = p.partial(v);
        }
    }
    p
}

/// Linear system for the degree-`degree` numbers given every lower degree
/// in `lower`. Equations are listed per quadruple and monomial, without
/// deduplication.
pub fn wdvv_equations(degree: u32, lower: &GWTable) -> Vec<WdvvEquation> {
    assert!(degree >= 1 && lower.max_degree() + 1 >= degree);
    let unknowns = GWKey::all(degree);
    let known = build_potential(&lower.up_to(degree - 1));
    let phi = known.structure_series(degree + 1);

    // q^0 parts of Φ_{ije} are the triple intersection numbers
    let tri: Vec<Rational> = (0..DIM * DIM * DIM)
        .map(|n| triple_intersection(n / (DIM * DIM), (n / DIM) % DIM, n % DIM))
        .collect();
    let tri_at = |i: usize, j: usize, e: usize| &tri[(i * DIM + j) * DIM + e];

    // derivatives of each unknown monomial, indexed like `tri`
    let derivs: Vec<Vec<TPoly>> = unknowns
        .iter()
        .map(|key| {
            (0..DIM * DIM * DIM)
                .map(|n| monomial_third_derivative(key, [n / (DIM * DIM), (n / DIM) % DIM, n % DIM]))
                .collect()
        })
        .collect();

    let pairs = all_pairs();
    // contraction[p][q] = (known q^d coefficient, linear part per unknown)
    let mut contraction: Vec<Vec<(TPoly, Vec<TPoly>)>> = Vec::with_capacity(NUM_PAIRS);
    for &(i, j) in &pairs {
        let mut row = Vec::with_capacity(NUM_PAIRS);
        for &(k, l) in &pairs {
            let known_part = phi.contraction(i, j, k, l).coeff_or_zero(degree);
            let linear: Vec<TPoly> = derivs
                .iter()
                .map(|dv| {
                    let mut acc = TPoly::zero();
                    for e in 0..DIM {
                        let f = dual_index(e);
                        let a = tri_at(i, j, e);
                        if !a.is_zero() {
                            acc += &dv[(f * DIM + k) * DIM + l].scale(a);
                        }
                        let b = tri_at(f, k, l);
                        if !b.is_zero() {
                            acc += &dv[(i * DIM + j) * DIM + e].scale(b);
                        }
                    }
                    acc
                })
                .collect();
            row.push((known_part, linear));
        }
        contraction.push(row);
    }

    let mut equations = Vec::new();
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let (lk, ll) = &contraction[pair_index(i, j)][pair_index(k, l)];
                    let (rk, rl) = &contraction[pair_index(j, k)][pair_index(i, l)];
                    let known_diff = lk - rk;
                    let lin_diff: Vec<TPoly> = ll.iter().zip(rl).map(|(a, b)| a - b).collect();
                    let mut monomials: Vec<Exponent> = known_diff.terms().map(|(e, _)| *e).collect();
                    for p in &lin_diff {
                        monomials.extend(p.terms().map(|(e, _)| *e));
                    }
                    monomials.sort_unstable();
                    monomials.dedup();
                    for m in monomials {
                        let coeffs: BTreeMap<GWKey, Rational> = unknowns
                            .iter()
                            .zip(&lin_diff)
                            .map(|(u, p)| (*u, p.coeff(&m)))
                            .filter(|(_, c)| !c.is_zero())
                            .collect();
                        equations.push(WdvvEquation {
                            quadruple: [i, j, k, l],
                            monomial: m,
                            coeffs,
                            rhs: -known_diff.coeff(&m),
                        });
                    }
                }
            }
        }
    }
    equations
}

/// The normalization `N(0,0,1,1) = 1`.
pub fn seed_key() -> GWKey {
    GWKey::new([0, 0, 1, 1], 1).unwrap()
}

// one equation with a right-hand side per sample of the lower table
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    coeffs: BTreeMap<usize, Rational>,
    rhs: Vec<Rational>,
}

impl Row {
    // scale so that the first coefficient is one
    fn normalized(mut self) -> Row {
        if let Some((_, lead)) = self.coeffs.iter().next() {
            let inv = lead.recip();
            for c in self.coeffs.values_mut() {
                *c *= &inv;
            }
            for r in &mut self.rhs {
                *r *= &inv;
            }
        }
        self
    }
}

struct Elimination {
    // per column, the pivot row's right-hand sides
    values: Vec<Option<Vec<Rational>>>,
    // right-hand sides of rows with no coefficients left
    residuals: Vec<Vec<Rational>>,
}

impl Elimination {
    fn free(&self, unknowns: &[GWKey]) -> Vec<GWKey> {
        unknowns
            .iter()
            .zip(&self.values)
            .filter(|(_, v)| v.is_none())
            .map(|(k, _)| *k)
            .collect()
    }

    fn inconsistent(&self) -> usize {
        self.residuals.iter().filter(|r| r.iter().any(|v| !v.is_zero())).count()
    }
}

// Equations at `degree` for several lower tables at once. The coefficients
// only involve triple intersections, so they agree across samples.
fn degree_rows(degree: u32, lowers: &[GWTable], pins: &[(GWKey, Rational)]) -> (Vec<GWKey>, Vec<Row>) {
    let unknowns = GWKey::all(degree);
    let col_of: BTreeMap<GWKey, usize> = unknowns.iter().enumerate().map(|(c, k)| (*k, c)).collect();
    let n = lowers.len();
    let mut merged: BTreeMap<([usize; 4], Exponent), Row> = BTreeMap::new();
    for (s, lower) in lowers.iter().enumerate() {
        for eq in wdvv_equations(degree, lower) {
            let row = merged.entry((eq.quadruple, eq.monomial)).or_insert_with(|| Row {
                coeffs: eq.coeffs.iter().map(|(k, v)| (col_of[k], v.clone())).collect(),
                rhs: vec![Rational::zero(); n],
            });
            row.rhs[s] = eq.rhs;
        }
    }
    let mut rows: Vec<Row> = merged.into_values().collect();
    let mut pins = pins.to_vec();
    if degree == 1 {
        pins.push((seed_key(), Rational::one()));
    }
    for (k, v) in pins {
        if let Some(&c) = col_of.get(&k) {
            rows.push(Row {
                coeffs: BTreeMap::from([(c, Rational::one())]),
                rhs: vec![v; n],
            });
        }
    }
    (unknowns, rows)
}

// Gauss–Jordan elimination over ℚ, columns in key order, pivot row with the
// fewest nonzeros.
fn eliminate(ncols: usize, raw: Vec<Row>) -> Elimination {
    let mut residuals = Vec::new();
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for r in raw {
        if r.coeffs.is_empty() {
            residuals.push(r.rhs);
            continue;
        }
        let r = r.normalized();
        if seen.insert(r.clone()) {
            rows.push(r);
        }
    }

    let mut pivot_of: Vec<Option<usize>> = vec![None; ncols];
    let mut is_pivot = vec![false; rows.len()];
    for col in 0..ncols {
        let Some(p) = (0..rows.len())
            .filter(|&r| !is_pivot[r] && rows[r].coeffs.contains_key(&col))
            .min_by_key(|&r| (rows[r].coeffs.len(), r))
        else {
            continue;
        };
        is_pivot[p] = true;
        pivot_of[col] = Some(p);
        let pivot_row = rows[p].clone().normalized_at(col);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == p {
                continue;
            }
            let Some(factor) = row.coeffs.get(&col).cloned() else {
                continue;
            };
            for (c, v) in &pivot_row.coeffs {
                let entry = row.coeffs.entry(*c).or_insert_with(Rational::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.coeffs.remove(c);
                }
            }
            for (x, y) in row.rhs.iter_mut().zip(&pivot_row.rhs) {
                *x -= &factor * y;
            }
        }
        rows[p] = pivot_row;
    }

    for (r, piv) in rows.iter().zip(&is_pivot) {
        if !piv && r.coeffs.is_empty() {
            residuals.push(r.rhs.clone());
        }
    }
    // pivot rows are single entries only when no column is free
    let values = pivot_of.iter().map(|p| p.map(|p| rows[p].rhs.clone())).collect();
    Elimination { values, residuals }
}

impl Row {
    fn normalized_at(self, col: usize) -> Row {
        let inv = self.coeffs[&col].recip();
        Row {
            coeffs: self.coeffs.iter().map(|(c, v)| (*c, v * &inv)).collect(),
            rhs: self.rhs.iter().map(|v| v * &inv).collect(),
        }
    }
}

fn solve_pinned(degree: u32, lower: &GWTable, pins: &[(GWKey, Rational)]) -> Result<Elimination, WdvvError> {
    let (unknowns, rows) = degree_rows(degree, std::slice::from_ref(lower), pins);
    let elim = eliminate(unknowns.len(), rows);
    let count = elim.inconsistent();
    if count > 0 {
        return Err(WdvvError::InconsistentSystem { degree, count });
    }
    Ok(elim)
}

fn extended(lower: &GWTable, degree: u32, elim: &Elimination) -> GWTable {
    let mut table = lower.clone();
    for (k, v) in GWKey::all(degree).into_iter().zip(&elim.values) {
        table.entries.insert(k, v.as_ref().expect("determined")[0].clone());
    }
    table.max_degree = degree;
    table
}

/// Solution of one degree's linear system given all lower degrees. Fails
/// with `Underdetermined` when the equations at this degree alone leave
/// numbers free; [`solve_wdvv`] resolves those from the next degree.
pub fn solve_degree(degree: u32, lower: &GWTable) -> Result<BTreeMap<GWKey, Rational>, WdvvError> {
    let elim = solve_pinned(degree, lower, &[])?;
    let unknowns = GWKey::all(degree);
    let free = elim.free(&unknowns);
    if !free.is_empty() {
        return Err(WdvvError::Underdetermined { degree, free });
    }
    Ok(extended(lower, degree, &elim).entries.split_off(&unknowns[0]))
}

// Roots in ℚ of `a x² + b x + c`, or `None` if the polynomial vanishes.
fn rational_roots(a: &Rational, b: &Rational, c: &Rational) -> Option<Vec<Rational>> {
    if a.is_zero() {
        if b.is_zero() {
            return if c.is_zero() { None } else { Some(Vec::new()) };
        }
        return Some(vec![-c / b]);
    }
    let disc = b * b - rat(4) * a * c;
    if disc.is_negative() {
        return Some(Vec::new());
    }
    let (num, den) = (disc.numer().sqrt(), disc.denom().sqrt());
    if &(&num * &num) != disc.numer() || &(&den * &den) != disc.denom() {
        return Some(Vec::new());
    }
    let root = Rational::new(num, den);
    let two_a = rat(2) * a;
    let mut roots = vec![(-b + &root) / &two_a, (-b - &root) / &two_a];
    roots.dedup();
    Some(roots)
}

// Fix a single free number at `degree` by consistency of the equations one
// degree up. Their right-hand sides are quadratic in the free value, so
// three samples determine them exactly.
fn resolve_free(degree: u32, lower: &GWTable, key: GWKey) -> Result<Rational, WdvvError> {
    let mut samples = Vec::new();
    for s in 0..3 {
        let elim = solve_pinned(degree, lower, &[(key, rat(s))])?;
        if !elim.free(&GWKey::all(degree)).is_empty() {
            return Err(WdvvError::Underdetermined {
                degree,
                free: elim.free(&GWKey::all(degree)),
            });
        }
        samples.push(extended(lower, degree, &elim));
    }
    let (unknowns, rows) = degree_rows(degree + 1, &samples, &[]);
    let elim = eliminate(unknowns.len(), rows);

    let mut candidates: Option<Vec<Rational>> = None;
    let mut conditions = Vec::new();
    for r in &elim.residuals {
        let c = r[0].clone();
        let a = (&r[2] - rat(2) * &r[1] + &r[0]) / rat(2);
        let b = &r[1] - &r[0] - &a;
        if let Some(roots) = rational_roots(&a, &b, &c) {
            if candidates.is_none() {
                candidates = Some(roots);
            }
            conditions.push((a, b, c));
        }
    }
    let Some(candidates) = candidates else {
        return Err(WdvvError::Underdetermined { degree, free: vec![key] });
    };
    let good: Vec<Rational> = candidates
        .into_iter()
        .filter(|x| conditions.iter().all(|(a, b, c)| (a * x * x + b * x + c).is_zero()))
        .collect();
    match good.len() {
        1 => Ok(good.into_iter().next().unwrap()),
        0 => Err(WdvvError::InconsistentSystem {
            degree: degree + 1,
            count: conditions.len(),
        }),
        _ => Err(WdvvError::Underdetermined { degree, free: vec![key] }),
    }
}

/// Solve the WDVV recursion for all numbers of degree `1..=max_degree`.
///
/// At each degree the linear equations leave `N(4d+1,0,0,0)` free; it is
/// fixed by requiring the equations at degree `d+1` to be consistent.
pub fn solve_wdvv(max_degree: u32) -> Result<GWTable, WdvvError> {
    if max_degree == 0 {
        return Err(WdvvError::InvalidDegree);
    }
    let mut table = GWTable::empty();
    for d in 1..=max_degree {
        let unknowns = GWKey::all(d);
        let elim = solve_pinned(d, &table, &[])?;
        let free = elim.free(&unknowns);
        let elim = match free.as_slice() {
            [] => elim,
            [key] => {
                let x = resolve_free(d, &table, *key)?;
                solve_pinned(d, &table, &[(*key, x)])?
            }
            _ => return Err(WdvvError::Underdetermined { degree: d, free }),
        };
        table = extended(&table, d, &elim);
    }
    Ok(table)
}

/// True if every entry is a non-negative integer.
pub fn all_nonnegative_integers(table: &GWTable) -> bool {
    table
        .entries()
        .all(|(_, v)| v.is_integer() && !v.is_negative())
}
