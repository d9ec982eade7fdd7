//! Big quantum product, the Dubrovin class `K^t` and its operator matrix in
//! the Schubert basis, with finite-energy truncations.
//!
//! Matrices use the column-action convention: column `j` holds the
//! σ-coefficients of `K^t ⋆ σ_j`.

use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::gw::{Potential, StructureSeries};
use crate::matrix::SeriesMatrix;
use crate::schubert::{codegree_of, dual_index, SchubertClassVector, BASIS, DIM};
use crate::series::{rat, QSeries, Rational, NUM_VARS, T1};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DubrovinError {
    #[error("truncation at q^{alpha} needs GW numbers up to degree {}, but the potential stops at degree {max_degree}", alpha - 1)]
    TruncationExceedsPotential { alpha: u32, max_degree: u32 },
}

/// Element of `QH^t(X)` in the σ-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumClassVector(pub [QSeries; DIM]);

impl QuantumClassVector {
    pub fn zero() -> Self {
        Self(std::array::from_fn(|_| QSeries::zero()))
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = QSeries::one();
        v
    }

    pub fn from_classical(v: &SchubertClassVector) -> Self {
        Self(std::array::from_fn(|i| QSeries::constant(v.0[i].clone())))
    }

    pub fn coeff(&self, i: usize) -> &QSeries {
        &self.0[i]
    }

    pub fn truncate(&self, alpha: u32) -> Self {
        Self(std::array::from_fn(|i| self.0[i].truncate(alpha)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] + &other.0[i]))
    }

    pub fn scale(&self, s: &QSeries) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] * s))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(QSeries::is_zero)
    }
}

impl fmt::Display for QuantumClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .zip(BASIS)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, d)| format!("({c})·σ({d})"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn check_alpha(potential: &Potential, alpha: u32) -> Result<(), DubrovinError> {
    if alpha > potential.max_degree + 1 {
        return Err(DubrovinError::TruncationExceedsPotential {
            alpha,
            max_degree: potential.max_degree,
        });
    }
    Ok(())
}

/// The structure constants of `⋆_t` modulo `q^α`.
#[derive(Clone, Debug)]
pub struct QuantumRing {
    phi: StructureSeries,
}

impl QuantumRing {
    pub fn new(potential: &Potential, alpha: u32) -> Result<Self, DubrovinError> {
        check_alpha(potential, alpha)?;
        Ok(Self {
            phi: potential.structure_series(alpha),
        })
    }

    pub fn alpha(&self) -> u32 {
        self.phi.alpha()
    }

    /// σ_f-coefficient of `σ_i ⋆ σ_j`, i.e. `Φ_{ije} g^{ef}`.
    pub fn structure(&self, i: usize, j: usize, f: usize) -> &QSeries {
        self.phi.get(i, j, dual_index(f))
    }

    pub fn basis_product(&self, i: usize, j: usize) -> QuantumClassVector {
        QuantumClassVector(std::array::from_fn(|f| self.structure(i, j, f).clone()))
    }

    pub fn product(&self, u: &QuantumClassVector, v: &QuantumClassVector) -> QuantumClassVector {
        let mut out = QuantumClassVector::zero().truncate(self.alpha());
        for i in 0..DIM {
            if u.0[i].is_zero() {
                continue;
            }
            for j in 0..DIM {
                if v.0[j].is_zero() {
                    continue;
                }
                let uv = &u.0[i] * &v.0[j];
                for f in 0..DIM {
                    let c = self.structure(i, j, f);
                    if !c.is_zero() {
                        out.0[f] += &(&uv * c);
                    }
                }
            }
        }
        out
    }
}

/// `u ⋆_t v` modulo `q^α`.
pub fn quantum_product(
    u: &QuantumClassVector,
    v: &QuantumClassVector,
    potential: &Potential,
    alpha: u32,
) -> Result<QuantumClassVector, DubrovinError> {
    Ok(QuantumRing::new(potential, alpha)?.product(u, v))
}

/// Bulk coordinates `t0, t2..t5`; `None` keeps a coordinate symbolic. `t1`
/// is carried by `q` and ignored here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BulkPoint {
    coords: [Option<Rational>; NUM_VARS],
}

impl BulkPoint {
    /// `t̂` symbolic with `t0 = 0`.
    pub fn symbolic() -> Self {
        let mut p = Self::fully_symbolic();
        p.coords[0] = Some(Rational::zero());
        p
    }

    /// Every coordinate symbolic, `t0` included.
    pub fn fully_symbolic() -> Self {
        Self {
            coords: std::array::from_fn(|_| None),
        }
    }

    /// All coordinates zero.
    pub fn origin() -> Self {
        Self {
            coords: std::array::from_fn(|_| Some(Rational::zero())),
        }
    }

    /// Only `t_cycle` is nonzero, kept symbolic.
    pub fn family(cycle: usize) -> Self {
        let mut p = Self::origin();
        p.coords[cycle] = None;
        p
    }

    pub fn with(mut self, var: usize, value: Option<Rational>) -> Self {
        assert!(var < NUM_VARS && var != T1, "t1 is not a bulk coordinate");
        self.coords[var] = value;
        self
    }

    pub fn get(&self, var: usize) -> Option<&Rational> {
        self.coords[var].as_ref()
    }

    fn specialize(&self, s: &QSeries) -> QSeries {
        let mut out = s.clone();
        for (v, c) in self.coords.iter().enumerate() {
            if let Some(c) = c {
                if v != T1 && out.involves(v) {
                    out = out.substitute(v, c);
                }
            }
        }
        out
    }
}

/// Coefficient of `σ_i` in `K^t`: `t0, 4, −t2, −t3, −2t4, −3t5`.
pub fn dubrovin_coefficient(i: usize) -> QSeries {
    match i {
        0 => QSeries::var(0),
        1 => QSeries::from_int(4),
        _ => QSeries::var(i).scale(&-rat((codegree_of(i) as i64 - 2) / 2)),
    }
}

/// `K^t = 4σ1 + t0σ0 − t2σ2 − t3σ3 − 2t4σ4 − 3t5σ5`.
pub fn dubrovin_class(point: &BulkPoint) -> QuantumClassVector {
    QuantumClassVector(std::array::from_fn(|i| point.specialize(&dubrovin_coefficient(i))))
}

/// Matrix of `K^t ⋆ −` in the σ-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DubrovinMatrix {
    pub matrix: SeriesMatrix,
    /// `Some(α)`: entries are exact polynomials in `q` of degree `< α`.
    /// `None`: entries are series modulo `q^{max_degree+1}`.
    pub alpha: Option<u32>,
}

impl DubrovinMatrix {
    pub fn get(&self, f: usize, j: usize) -> &QSeries {
        self.matrix.get(f, j)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<serde_json::Value>> = self
            .matrix
            .rows()
            .iter()
            .map(|r| r.iter().map(|e| serde_json::to_value(e).expect("series serialize")).collect())
            .collect();
        json!({
            "alpha": self.alpha,
            "basis": BASIS.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "entries": rows,
        })
    }
}

impl fmt::Display for DubrovinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.matrix)
    }
}

/// Entry `(f, j)` is `Σ_i K_i Φ_{i j e} g^{ef}`. With `alpha = None` the
/// whole computed potential is used.
pub fn dubrovin_matrix(
    point: &BulkPoint,
    potential: &Potential,
    alpha: Option<u32>,
) -> Result<DubrovinMatrix, DubrovinError> {
    let order = alpha.unwrap_or(potential.max_degree + 1);
    let ring = QuantumRing::new(potential, order)?;
    let k: Vec<QSeries> = (0..DIM).map(dubrovin_coefficient).collect();
    let entries: Vec<QSeries> = (0..DIM * DIM)
        .into_par_iter()
        .map(|n| {
            let (f, j) = (n / DIM, n % DIM);
            let mut acc = QSeries::zero();
            for (i, ki) in k.iter().enumerate() {
                let c = ring.structure(i, j, f);
                if !c.is_zero() {
                    acc += &(ki * c);
                }
            }
            let acc = point.specialize(&acc);
            match alpha {
                Some(a) => acc.polynomial_part(a),
                None => acc.truncate(order),
            }
        })
        .collect();
    let rows = entries.chunks(DIM).map(|r| r.to_vec()).collect();
    Ok(DubrovinMatrix {
        matrix: SeriesMatrix::from_rows(rows),
        alpha,
    })
}

/// `M_{<α}`: keep `q^d` for `d < α`.
pub fn truncate_matrix(m: &DubrovinMatrix, alpha: u32) -> DubrovinMatrix {
    let alpha = m.alpha.map_or(alpha, |a| a.min(alpha));
    DubrovinMatrix {
        matrix: m.matrix.truncate(alpha),
        alpha: Some(alpha),
    }
}

/// Monomials of entry `(f, j)` that break
/// `codeg(f) = 2 + codeg(j) − 8d + Σ_m n_m (codeg(m) − 2)`.
pub fn grading_violations(m: &DubrovinMatrix) -> Vec<(usize, usize, u32, [u32; NUM_VARS])> {
    let mut bad = Vec::new();
    for f in 0..DIM {
        for j in 0..DIM {
            for (d, p) in m.get(f, j).iter() {
                for (e, _) in p.terms() {
                    let shift: i64 = (0..NUM_VARS)
                        .map(|v| e[v] as i64 * (codegree_of(v) as i64 - 2))
                        .sum();
                    let rhs = 2 + codegree_of(j) as i64 - 8 * d as i64 + shift;
                    if codegree_of(f) as i64 != rhs {
                        bad.push((f, j, d, *e));
                    }
                }
            }
        }
    }
    bad
}
