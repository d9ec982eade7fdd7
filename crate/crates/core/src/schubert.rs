//! Classical cohomology of Gr(2,4) in the Schubert basis.
//!
//! The basis is ordered `σ0 = σ_∅, σ1 = σ_(1,0), σ2 = σ_(2,0),
//! σ3 = σ_(1,1), σ4 = σ_(2,1), σ5 = σ_(2,2)`. Every matrix in this crate
//! is written in this order; finite-energy truncations depend on it.

use std::fmt;
use std::ops::{Add, Index};
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::series::{rat, Rational};

pub const DIM: usize = 6;

/// A Young diagram `(a, b)` fitting in the 2×2 grid, `0 ≤ b ≤ a ≤ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct YoungDiagram22 {
    a: u8,
    b: u8,
}

/// The six diagrams in basis order.
pub const BASIS: [YoungDiagram22; DIM] = [
    YoungDiagram22 { a: 0, b: 0 },
    YoungDiagram22 { a: 1, b: 0 },
    YoungDiagram22 { a: 2, b: 0 },
    YoungDiagram22 { a: 1, b: 1 },
    YoungDiagram22 { a: 2, b: 1 },
    YoungDiagram22 { a: 2, b: 2 },
];

/// Basis indices of the four cycles that carry a bulk parameter `t̂`.
pub const BULK_CYCLES: [usize; 4] = [2, 3, 4, 5];

impl YoungDiagram22 {
    pub fn new(a: u8, b: u8) -> Option<Self> {
        (b <= a && a <= 2).then_some(Self { a, b })
    }

    pub fn from_index(i: usize) -> Option<Self> {
        BASIS.get(i).copied()
    }

    pub fn rows(self) -> (u8, u8) {
        (self.a, self.b)
    }

    pub fn index(self) -> usize {
        BASIS.iter().position(|d| *d == self).expect("valid diagram")
    }

    pub fn boxes(self) -> u32 {
        (self.a + self.b) as u32
    }

    /// Real codegree: twice the number of boxes.
    pub fn codegree(self) -> u32 {
        2 * self.boxes()
    }
}

impl PartialOrd for YoungDiagram22 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for YoungDiagram22 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for YoungDiagram22 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid Young diagram {0:?}: expected \"a,b\" with 0 <= b <= a <= 2")]
pub struct ParseDiagramError(pub String);

impl FromStr for YoungDiagram22 {
    type Err = ParseDiagramError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseDiagramError(s.to_string());
        let (a, b) = s.trim().split_once(',').ok_or_else(err)?;
        let a: u8 = a.trim().parse().map_err(|_| err())?;
        let b: u8 = b.trim().parse().map_err(|_| err())?;
        Self::new(a, b).ok_or_else(err)
    }
}

impl Serialize for YoungDiagram22 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for YoungDiagram22 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn codegree(d: YoungDiagram22) -> u32 {
    d.codegree()
}

/// Codegree of the basis element with index `i`.
pub fn codegree_of(i: usize) -> u32 {
    BASIS[i].codegree()
}

/// Element of `H(Gr(2,4); ℚ)` in the σ-basis.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SchubertClassVector(pub [Rational; DIM]);

impl SchubertClassVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.0[i] = rat(1);
        v
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self(std::array::from_fn(|i| &self.0[i] * c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..DIM).filter(|&i| !self.0[i].is_zero())
    }
}

impl Index<usize> for SchubertClassVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &SchubertClassVector {
    type Output = SchubertClassVector;
    fn add(self, rhs: &SchubertClassVector) -> SchubertClassVector {
        SchubertClassVector(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}

/// The Poincaré pairing `g` in the σ-basis. It is its own inverse.
pub const INTERSECTION_MATRIX: [[i64; DIM]; DIM] = [
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
];

pub fn pairing(i: usize, j: usize) -> i64 {
    INTERSECTION_MATRIX[i][j]
}

/// Entry `g^{ef}` of the inverse pairing (equal to `g` here).
pub fn inverse_pairing(e: usize, f: usize) -> i64 {
    INTERSECTION_MATRIX[e][f]
}

/// The unique `f` with `g^{ef} ≠ 0`.
pub fn dual_index(e: usize) -> usize {
    match e {
        2 | 3 => e,
        _ => DIM - 1 - e,
    }
}

type CupEntry = ((usize, usize), &'static [(usize, i64)]);

// Products σ_i·σ_j for i ≤ j as (index, coefficient) lists.
const CUP_TABLE: [CupEntry; 21] = [
    ((0, 0), &[(0, 1)]),
    ((0, 1), &[(1, 1)]),
    ((0, 2), &[(2, 1)]),
    ((0, 3), &[(3, 1)]),
    ((0, 4), &[(4, 1)]),
    ((0, 5), &[(5, 1)]),
    ((1, 1), &[(2, 1), (3, 1)]),
    ((1, 2), &[(4, 1)]),
    ((1, 3), &[(4, 1)]),
    ((1, 4), &[(5, 1)]),
    ((1, 5), &[]),
    ((2, 2), &[(5, 1)]),
    ((2, 3), &[]),
    ((2, 4), &[]),
    ((2, 5), &[]),
    ((3, 3), &[(5, 1)]),
    ((3, 4), &[]),
    ((3, 5), &[]),
    ((4, 4), &[]),
    ((4, 5), &[]),
    ((5, 5), &[]),
];

/// Cup product of basis classes by index.
pub fn cup_index(i: usize, j: usize) -> SchubertClassVector {
    let key = (i.min(j), i.max(j));
    let (_, terms) = CUP_TABLE
        .iter()
        .find(|(k, _)| *k == key)
        .expect("indices in 0..6");
    let mut out = SchubertClassVector::zero();
    for &(f, c) in terms.iter() {
        out.0[f] = rat(c);
    }
    out
}

pub fn cup(d1: YoungDiagram22, d2: YoungDiagram22) -> SchubertClassVector {
    cup_index(d1.index(), d2.index())
}

/// Cup product extended bilinearly.
pub fn cup_vectors(u: &SchubertClassVector, v: &SchubertClassVector) -> SchubertClassVector {
    let mut out = SchubertClassVector::zero();
    for i in u.support() {
        for j in v.support() {
            let c = &u.0[i] * &v.0[j];
            out = &out + &cup_index(i, j).scale(&c);
        }
    }
    out
}

/// `⟨σ_i σ_j σ_k, [X]⟩`.
pub fn triple_intersection(i: usize, j: usize, k: usize) -> Rational {
    let prod = cup_index(i, j);
    (0..DIM)
        .map(|f| &prod.0[f] * rat(pairing(f, k)))
        .fold(Rational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn six_diagrams_in_basis_order() {
        let mut all = Vec::new();
        for a in 0..=2u8 {
            for b in 0..=a {
                all.push(YoungDiagram22::new(a, b).unwrap());
            }
        }
        assert_eq!(all.len(), 6);
        all.sort();
        assert_eq!(all, BASIS.to_vec());
        assert_eq!(YoungDiagram22::new(1, 2), None);
        assert_eq!(YoungDiagram22::new(3, 0), None);
    }

    #[test]
    fn codegrees() {
        assert_eq!(codegree(YoungDiagram22::new(0, 0).unwrap()), 0);
        assert_eq!(codegree(YoungDiagram22::new(2, 1).unwrap()), 6);
        assert_eq!(codegree(YoungDiagram22::new(1, 1).unwrap()), 4);
        let degs: Vec<u32> = BASIS.iter().map(|d| d.codegree()).collect();
        assert_eq!(degs, vec![0, 2, 4, 4, 6, 8]);
    }

    #[test]
    fn parse_and_display() {
        let d: YoungDiagram22 = "2,1".parse().unwrap();
        assert_eq!(d.index(), 4);
        assert_eq!(d.to_string(), "2,1");
        assert!("1,2".parse::<YoungDiagram22>().is_err());
        assert!("x".parse::<YoungDiagram22>().is_err());
    }

    #[test]
    fn cup_examples() {
        let s1 = BASIS[1];
        let mut expect = SchubertClassVector::zero();
        expect.0[2] = rat(1);
        expect.0[3] = rat(1);
        assert_eq!(cup(s1, s1), expect);
        assert_eq!(cup(BASIS[0], BASIS[4]), SchubertClassVector::basis(4));
        assert_eq!(cup(s1, BASIS[4]), SchubertClassVector::basis(5));
    }

    #[test]
    fn triple_and_pairing_examples() {
        assert_eq!(triple_intersection(1, 1, 3), rat(1));
        assert_eq!(triple_intersection(0, 0, 5), rat(1));
        for k in 0..DIM {
            assert_eq!(triple_intersection(2, 3, k), rat(0));
        }
        assert_eq!(pairing(0, 5), 1);
        assert_eq!(pairing(2, 2), 1);
        assert_eq!(pairing(0, 0), 0);
        for i in 0..DIM {
            for j in 0..DIM {
                assert_eq!(rat(pairing(i, j)), triple_intersection(0, i, j));
            }
        }
    }

    #[test]
    fn pairing_is_an_involution() {
        for i in 0..DIM {
            for j in 0..DIM {
                let s: i64 = (0..DIM).map(|k| pairing(i, k) * pairing(k, j)).sum();
                assert_eq!(s, i64::from(i == j));
            }
            assert_eq!(inverse_pairing(i, dual_index(i)), 1);
        }
    }

    #[test]
    fn cup_is_commutative_and_associative() {
        for i in 0..DIM {
            for j in 0..DIM {
                assert_eq!(cup_index(i, j), cup_index(j, i));
                for k in 0..DIM {
                    let l = cup_vectors(&cup_index(i, j), &SchubertClassVector::basis(k));
                    let r = cup_vectors(&SchubertClassVector::basis(i), &cup_index(j, k));
                    assert_eq!(l, r, "({i},{j},{k})");
                }
            }
        }
    }

    #[test]
    fn cup_respects_codegree() {
        for i in 0..DIM {
            for j in 0..DIM {
                let prod = cup_index(i, j);
                for f in prod.support() {
                    assert_eq!(codegree_of(f), codegree_of(i) + codegree_of(j));
                    assert!(prod[f] > rat(0));
                }
                if codegree_of(i) + codegree_of(j) > 8 {
                    assert!(prod.is_zero());
                }
            }
        }
    }

    #[test]
    fn triple_intersection_is_symmetric() {
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let v = triple_intersection(i, j, k);
                    for (a, b, c) in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                        assert_eq!(triple_intersection(a, b, c), v);
                    }
                }
            }
        }
    }

    // Schur polynomials in two variables, multiplied as integer polynomials
    // and decomposed back into the Schur basis; partitions with a first row
    // longer than 2 span the ideal that vanishes in H(Gr(2,4)).
    type BiPoly = BTreeMap<(u32, u32), i64>;

    fn schur2(l1: u32, l2: u32) -> BiPoly {
        // s_(l1,l2)(x,y) = (xy)^l2 · h_{l1-l2}(x,y)
        let mut p = BiPoly::new();
        let k = l1 - l2;
        for i in 0..=k {
            p.insert((l2 + i, l2 + k - i), 1);
        }
        p
    }

    fn bimul(a: &BiPoly, b: &BiPoly) -> BiPoly {
        let mut out = BiPoly::new();
        for ((a1, a2), c1) in a {
            for ((b1, b2), c2) in b {
                *out.entry((a1 + b1, a2 + b2)).or_default() += c1 * c2;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    fn schur_expand(mut p: BiPoly) -> BTreeMap<(u32, u32), i64> {
        let mut out = BTreeMap::new();
        while let Some((&(e1, e2), &c)) = p.iter().filter(|((a, b), _)| a >= b).max_by_key(|(k, _)| **k) {
            out.insert((e1, e2), c);
            for (k, v) in schur2(e1, e2) {
                *p.entry(k).or_default() -= c * v;
            }
            p.retain(|_, c| *c != 0);
        }
        assert!(p.is_empty());
        out
    }

    #[test]
    fn cup_table_matches_schur_oracle() {
        for i in 0..DIM {
            for j in 0..DIM {
                let (a1, b1) = BASIS[i].rows();
                let (a2, b2) = BASIS[j].rows();
                let prod = bimul(&schur2(a1 as u32, b1 as u32), &schur2(a2 as u32, b2 as u32));
                let mut expect = SchubertClassVector::zero();
                for ((l1, l2), c) in schur_expand(prod) {
                    if l1 <= 2 {
                        let f = YoungDiagram22::new(l1 as u8, l2 as u8).unwrap().index();
                        expect.0[f] = rat(c);
                    }
                }
                assert_eq!(cup_index(i, j), expect, "σ{i}·σ{j}");
            }
        }
    }
}
