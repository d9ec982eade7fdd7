use dubrovin_core::dubrovin::{dubrovin_matrix, truncate_matrix, BulkPoint, QuantumClassVector, QuantumRing};
use dubrovin_core::gw::{build_potential, solve_wdvv, Potential};
use dubrovin_core::matrix::SeriesMatrix;
use dubrovin_core::series::{rat, QSeries, Rational};
use dubrovin_core::spectral::{char_poly, CharPoly};

fn potential(d: u32) -> Potential {
    build_potential(&solve_wdvv(d).unwrap())
}

#[test]
fn associativity_for_all_216_triples() {
    let p = potential(1);
    let ring = QuantumRing::new(&p, 2).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let ij = ring.basis_product(i, j);
            for k in 0..6 {
                let left = ring.product(&ij, &QuantumClassVector::basis(k)).truncate(2);
                let right = ring.product(&QuantumClassVector::basis(i), &ring.basis_product(j, k)).truncate(2);
                assert_eq!(left, right, "({i},{j},{k})");
            }
        }
    }
}

#[test]
fn associativity_mod_q3_with_degree_two() {
    let p = potential(2);
    let ring = QuantumRing::new(&p, 3).unwrap();
    for (i, j, k) in [(2, 3, 4), (5, 5, 1), (2, 2, 3), (4, 4, 5)] {
        let left = ring.product(&ring.basis_product(i, j), &QuantumClassVector::basis(k)).truncate(3);
        let right = ring.product(&QuantumClassVector::basis(i), &ring.basis_product(j, k)).truncate(3);
        assert_eq!(left, right, "({i},{j},{k})");
    }
}

#[test]
fn classical_part_is_nilpotent() {
    let p = potential(1);
    let m = dubrovin_matrix(&BulkPoint::symbolic(), &p, Some(1)).unwrap();
    let mut power = SeriesMatrix::identity(6);
    for _ in 0..6 {
        power = power.mul(&m.matrix);
    }
    assert!(power.is_zero());
    let cp = char_poly(&m);
    assert!(cp.coeff(6).is_one());
    assert!((0..6).all(|k| cp.coeff(k).is_zero()));
}

#[test]
fn trace_and_determinant_coefficients() {
    let p = potential(1);
    let m = dubrovin_matrix(&BulkPoint::fully_symbolic(), &p, Some(2)).unwrap();
    let cp = char_poly(&m);
    assert_eq!(cp.coeff(5), -&m.matrix.trace());
    assert_eq!(cp.coeff(0), m.matrix.det());
    assert_eq!(cp.degree(), 6);
}

fn binomial(n: usize, k: usize) -> Rational {
    (0..k).fold(rat(1), |acc, i| acc * rat((n - i) as i64) / rat((i + 1) as i64))
}

/// Coefficients of `p(λ − s)`.
fn shifted(p: &CharPoly, s: &QSeries) -> Vec<QSeries> {
    let n = p.degree();
    (0..=n)
        .map(|m| {
            let mut acc = QSeries::zero();
            for k in m..=n {
                let term = (&p.coeff(k) * &(-s).pow((k - m) as u32)).scale(&binomial(k, m));
                acc += &term;
            }
            acc
        })
        .collect()
}

#[test]
fn t0_translates_the_spectrum() {
    let p = potential(1);
    let full = dubrovin_matrix(&BulkPoint::fully_symbolic(), &p, Some(2)).unwrap();
    let reduced = dubrovin_matrix(&BulkPoint::symbolic(), &p, Some(2)).unwrap();
    let t0 = QSeries::var(0);
    assert_eq!(full.matrix, reduced.matrix.add(&SeriesMatrix::identity(6).scale(&t0)));
    let expect = shifted(&char_poly(&reduced), &t0);
    let got = char_poly(&full);
    for (k, e) in expect.iter().enumerate() {
        assert_eq!(&got.coeff(k), e, "c{k}");
    }
}

#[test]
fn truncation_is_compatible_across_energies() {
    let p = potential(2);
    let m3 = dubrovin_matrix(&BulkPoint::symbolic(), &p, Some(3)).unwrap();
    for alpha in 0..3 {
        let direct = dubrovin_matrix(&BulkPoint::symbolic(), &p, Some(alpha)).unwrap();
        assert_eq!(truncate_matrix(&m3, alpha).matrix, direct.matrix, "alpha {alpha}");
    }
    let series = dubrovin_matrix(&BulkPoint::symbolic(), &p, None).unwrap();
    assert_eq!(series.matrix.truncate(2), m3.matrix.truncate(2));
}

#[test]
fn alpha_zero_is_the_zero_matrix() {
    let p = potential(1);
    let m = dubrovin_matrix(&BulkPoint::symbolic(), &p, Some(0)).unwrap();
    assert!(m.matrix.is_zero());
}
