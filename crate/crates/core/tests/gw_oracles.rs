use std::collections::BTreeSet;

use dubrovin_core::gw::{
    all_nonnegative_integers, build_potential, solve_degree, solve_wdvv, wdvv_equations, wdvv_residual, GWKey,
    WdvvError,
};
use dubrovin_core::series::{rat, Rational};

#[test]
fn degree_one_numbers_from_the_seed_alone() {
    let table = solve_wdvv(1).unwrap();
    let expect = [
        ([5, 0, 0, 0], 0),
        ([4, 1, 0, 0], 0),
        ([3, 2, 0, 0], 1),
        ([3, 0, 1, 0], 0),
        ([2, 1, 1, 0], 1),
        ([2, 0, 0, 1], 0),
        ([1, 1, 0, 1], 1),
        ([1, 0, 2, 0], 1),
        ([0, 0, 1, 1], 1),
    ];
    for (n, v) in expect {
        assert_eq!(table.value(n), Some(&rat(v)), "N{n:?}");
        let [a, b, c, d] = n;
        assert_eq!(table.value([b, a, c, d]), Some(&rat(v)), "swapped N{n:?}");
    }
    assert_eq!(table.degree_entries(1).count(), 16);
}

#[test]
fn degree_one_residual_vanishes_mod_q2() {
    let p = build_potential(&solve_wdvv(1).unwrap());
    assert!(wdvv_residual(&p, 2).is_empty());
}

#[test]
fn degree_two_residual_vanishes_mod_q3() {
    let table = solve_wdvv(2).unwrap();
    assert!(all_nonnegative_integers(&table));
    assert!(table.is_swap_symmetric());
    assert_eq!(table.value([9, 0, 0, 0]), Some(&rat(2)));
    assert_eq!(table.value([0, 0, 0, 3]), Some(&rat(1)));
    assert_eq!(table.value([5, 4, 0, 0]), Some(&rat(42)));
    let p = build_potential(&table);
    let bad = wdvv_residual(&p, 3);
    assert!(bad.is_empty(), "{} nonzero residuals, first {:?}", bad.len(), bad.first());
}

#[test]
fn every_degree_two_equation_holds() {
    let table = solve_wdvv(2).unwrap();
    let eqs = wdvv_equations(2, &table.up_to(1));
    assert!(!eqs.is_empty());
    let failing = eqs
        .iter()
        .filter(|e| {
            let lhs: Rational = e.coeffs.iter().map(|(k, c)| c * table.get(k).unwrap()).sum();
            lhs != e.rhs
        })
        .count();
    assert_eq!(failing, 0);
}

/// Values read off from single equations in which they are the only
/// unknown. Two such equations from quadruples with different index sets
/// must agree with each other and with the full solve.
#[test]
fn isolated_unknowns_agree_across_quadruples() {
    let table = solve_wdvv(2).unwrap();
    let eqs = wdvv_equations(2, &table.up_to(1));
    let target = GWKey::new([0, 0, 0, 3], 2).unwrap();
    let mut sources = BTreeSet::new();
    for e in &eqs {
        if e.coeffs.len() == 1 && e.coeffs.contains_key(&target) {
            let value = &e.rhs / &e.coeffs[&target];
            assert_eq!(value, rat(1), "quadruple {:?}", e.quadruple);
            let mut q = e.quadruple;
            q.sort();
            sources.insert(q);
        }
    }
    assert!(sources.contains(&[1, 4, 5, 5]));
    assert!(sources.contains(&[2, 2, 5, 5]));

    let mut isolated = 0;
    for e in eqs.iter().filter(|e| e.coeffs.len() == 1) {
        let (k, c) = e.coeffs.iter().next().unwrap();
        assert_eq!(&(&e.rhs / c), table.get(k).unwrap(), "{k} from {:?}", e.quadruple);
        isolated += 1;
    }
    assert!(isolated > 16);
}

#[test]
fn top_number_is_not_fixed_by_its_own_degree() {
    let lower = solve_wdvv(1).unwrap().up_to(0);
    match solve_degree(1, &lower) {
        Err(WdvvError::Underdetermined { degree: 1, free }) => {
            assert_eq!(free, vec![GWKey::new([5, 0, 0, 0], 1).unwrap()]);
        }
        other => panic!("expected one free number, got {other:?}"),
    }
}
