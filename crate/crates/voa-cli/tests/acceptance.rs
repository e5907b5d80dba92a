//! Acceptance suite: the engine's exit criteria, one test per criterion.
//! Every check is exact — rational arithmetic with zero tolerance. Each
//! test prints one pass line (visible with `--nocapture`); a failure keeps
//! the criterion number in the assertion message.

use voa_cli::selftest::{
    check_products_bookkeeping, check_quasi_commutativity, check_skew_symmetry, increasing_lists,
    random_vpoly, FieldSet, Rng,
};
use voa_core::arith::{frac, RatZero};
use voa_core::classical::{det_analog, eval_classical, pfaffian, sergeev_minimal};
use voa_core::corrections::{
    build_relation, build_relation_with, express_in_span, extract_decoupling, raise_decoupling,
    verify_appendix, NormalOrdering,
};
use voa_core::freefield::{circle, derive_n};
use voa_core::remainder::RemainderCalc;
use voa_core::wbasis::{mw_matrix, omega_expansion, pplus_lambda, Family};

fn pass(n: usize, what: &str) {
    println!("criterion {n:>2} PASS: {what}");
}

/// Appendix regression: the embedded weight-16 relation realizes to zero
/// and its remainder is exactly 109/56000.
#[test]
fn criterion_01_appendix_regression() {
    let report = verify_appendix();
    assert!(report.kernel_ok, "criterion 1: nonzero residual");
    assert_eq!(
        report.remainder,
        frac(109, 56000),
        "criterion 1: wrong remainder"
    );
    pass(1, "weight-16 relation in kernel with remainder 109/56000");
}

/// Closed-vs-recursive remainder equivalence for n in {1,2,3}, entries <= 9.
#[test]
fn criterion_02_closed_vs_recursive() {
    let mut calc = RemainderCalc::new();
    let mut total = 0usize;
    let mut balanced = 0usize;
    for n in 1..=3usize {
        for list in increasing_lists(2 * n + 2, 9) {
            let rec = calc.sym_recursive(n, &list);
            let clo = calc.sym_closed(n, &list);
            assert_eq!(rec, clo, "criterion 2: mismatch at n={n}, I={list:?}");
            total += 1;
            if !clo.is_zero() {
                balanced += 1;
            }
        }
    }
    assert!(balanced > 200, "criterion 2: too few nonzero cases");
    pass(
        2,
        &format!("closed = recursive on {total} index lists ({balanced} nonzero)"),
    );
}

/// Symplectic rank-1 end to end: weight-8 relation, remainder 1/6,
/// decoupling of w^7, raised decoupling of w^9.
#[test]
fn criterion_03_sp1_end_to_end() {
    let fam = Family::sp(1);
    let rel = build_relation(fam, &pfaffian(&[0, 1, 2, 3], 1)).unwrap();
    assert_eq!(rel.weight, 8, "criterion 3: wrong weight");
    assert!(rel.kernel_ok, "criterion 3: realization nonzero");
    assert_eq!(rel.remainder, Some(frac(1, 6)), "criterion 3: remainder");
    let d7 = extract_decoupling(&rel).unwrap();
    assert_eq!(d7.m, 7);
    assert!(d7.verify(), "criterion 3: w^7 decoupling failed");
    assert!(
        d7.expression.iter().all(|(_, w)| w.iter().all(|&(g, _)| g <= 5)),
        "criterion 3: w^7 decoupling uses generators above w^5"
    );
    let d9 = raise_decoupling(&d7, std::slice::from_ref(&d7)).unwrap();
    assert_eq!(d9.m, 9);
    assert!(d9.verify(), "criterion 3: w^9 decoupling failed");
    pass(3, "sp(1): weight-8 relation, remainder 1/6, w^7 and w^9 decouplings");
}

/// Orthogonal ranks 1 and 2 end to end, with the rank-1 decoupling chain
/// through weight 8.
#[test]
fn criterion_04_o1_o2_end_to_end() {
    let mut calc = RemainderCalc::new();
    let rel1 = build_relation(Family::o(1), &det_analog(&[0, 0], &[1, 1], 1)).unwrap();
    assert_eq!(rel1.weight, 4, "criterion 4: wrong weight at rank 1");
    assert!(rel1.kernel_ok, "criterion 4: rank-1 realization nonzero");
    assert_eq!(rel1.remainder, Some(frac(7, 3)), "criterion 4: remainder");

    let rel2 = build_relation(Family::o(2), &det_analog(&[0, 0, 0], &[1, 1, 1], 2)).unwrap();
    assert_eq!(rel2.weight, 6, "criterion 4: wrong weight at rank 2");
    assert!(rel2.kernel_ok, "criterion 4: rank-2 realization nonzero");
    let oracle = calc.orth_recursive(2, &[0, 0, 0], &[1, 1, 1]);
    assert_eq!(rel2.remainder, Some(oracle), "criterion 4: rank-2 remainder");

    // rank-1 chain: w^3, w^5, w^7 all in terms of w^1
    let d3 = extract_decoupling(&rel1).unwrap();
    let d5 = raise_decoupling(&d3, std::slice::from_ref(&d3)).unwrap();
    let d7 = raise_decoupling(&d5, &[d3.clone(), d5.clone()]).unwrap();
    for d in [&d3, &d5, &d7] {
        assert!(d.verify(), "criterion 4: w^{} decoupling failed", d.m);
        assert!(
            d.expression.iter().all(|(_, w)| w.iter().all(|&(g, _)| g == 1)),
            "criterion 4: decoupling of w^{} leaves the w^1 subalgebra",
            d.m
        );
    }
    pass(4, "o(1)/o(2) relations with oracle remainders; o(1) chain through weight 8");
}

/// Remainder uniqueness: two normal orderings agree on every relation of
/// weight <= 12 in the rank-1 symplectic and orthogonal families.
#[test]
fn criterion_05_remainder_uniqueness() {
    let mut cases = 0usize;
    for list in increasing_lists(4, 9) {
        let weight: i64 = 2 + list.iter().sum::<i64>();
        if weight % 2 != 0 || weight > 12 {
            continue;
        }
        let idx: Vec<u16> = list.iter().map(|&v| v as u16).collect();
        let p = pfaffian(&idx, 1);
        let a = build_relation_with(Family::sp(1), &p, NormalOrdering::Ascending).unwrap();
        let b = build_relation_with(Family::sp(1), &p, NormalOrdering::Descending).unwrap();
        assert!(a.kernel_ok && b.kernel_ok, "criterion 5: kernel at {list:?}");
        assert_eq!(a.remainder, b.remainder, "criterion 5: sp(1) at {list:?}");
        cases += 1;
    }
    for i0 in 0..=4u16 {
        for i1 in i0..=4 {
            for j0 in 0..=4u16 {
                for j1 in j0..=4 {
                    let weight = 2 + (i0 + i1 + j0 + j1) as i64;
                    if weight % 2 != 0 || weight > 12 {
                        continue;
                    }
                    let d = det_analog(&[i0, i1], &[j0, j1], 1);
                    if d.is_zero() {
                        continue;
                    }
                    let a =
                        build_relation_with(Family::o(1), &d, NormalOrdering::Ascending).unwrap();
                    let b =
                        build_relation_with(Family::o(1), &d, NormalOrdering::Descending).unwrap();
                    assert!(a.kernel_ok && b.kernel_ok);
                    assert_eq!(
                        a.remainder, b.remainder,
                        "criterion 5: o(1) at ({i0},{i1}),({j0},{j1})"
                    );
                    cases += 1;
                }
            }
        }
    }
    assert!(cases > 20, "criterion 5: too few cases");
    pass(5, &format!("remainders independent of normal ordering ({cases} relations)"));
}

/// Symmetry suite: block-swap sign rule, unbalanced vanishing, Pfaffian
/// alternation, determinant-analogue plus-symmetry.
#[test]
fn criterion_06_symmetry_suite() {
    let mut calc = RemainderCalc::new();
    // block swap scales by (-1)^{n+1}
    for (n, list) in [
        (1usize, vec![0i64, 1, 2, 3]),
        (1, vec![0, 3, 2, 5]),
        (2, vec![0, 1, 2, 3, 4, 5]),
        (2, vec![0, 1, 2, 5, 6, 7]),
        (3, vec![0, 1, 2, 3, 4, 5, 6, 7]),
    ] {
        let mut swapped = Vec::with_capacity(list.len());
        for pair in list.chunks(2) {
            swapped.push(pair[1]);
            swapped.push(pair[0]);
        }
        let a = calc.sym_recursive(n, &list);
        let b = calc.sym_recursive(n, &swapped);
        let expect = if (n + 1) % 2 == 0 { a.clone() } else { -a.clone() };
        assert_eq!(b, expect, "criterion 6: block swap at n={n}, I={list:?}");
        assert!(!a.is_zero(), "criterion 6: test case degenerate");
    }
    // unbalanced lists vanish (even weight, uneven parity counts)
    for (n, list) in [
        (2usize, vec![0i64, 2, 4, 6, 8, 1]),
        (2, vec![0, 1, 3, 5, 7, 9]),
        (3, vec![0, 2, 4, 6, 8, 10, 1, 3]),
    ] {
        assert_eq!(
            calc.sym_recursive(n, &list),
            frac(0, 1),
            "criterion 6: unbalanced {list:?} did not vanish"
        );
    }
    // Pfaffian alternation
    let base = pfaffian(&[0, 1, 2, 3, 4, 5], 2);
    assert_eq!(
        pfaffian(&[0, 1, 2, 3, 5, 4], 2),
        base.scale(&frac(-1, 1)),
        "criterion 6: Pfaffian alternation"
    );
    // determinant-analogue plus-symmetry
    let d = det_analog(&[0, 1, 2], &[1, 2, 3], 2);
    assert_eq!(det_analog(&[1, 0, 2], &[1, 2, 3], 2), d);
    assert_eq!(det_analog(&[0, 1, 2], &[3, 2, 1], 2), d);
    pass(6, "sign rules: block swap, unbalanced vanishing, alternation, plus-symmetry");
}

/// Constant-term identity at n = 2: the large-index limit equals
/// n/(n + sum I) times the lower remainder.
#[test]
fn criterion_07_constant_term_map() {
    let mut calc = RemainderCalc::new();
    for front in [[0i64, 1, 2, 3], [0, 1, 4, 5]] {
        let lim = calc.limit_remainder(2, &front);
        let total: i64 = front.iter().sum();
        let expect = calc.sym_recursive(1, &front) * frac(2, 2 + total);
        assert_eq!(lim, expect, "criterion 7: at {front:?}");
        assert!(!lim.is_zero());
    }
    pass(7, "large-index limits match the lower remainders at n = 2");
}

/// Mode matrices: nonzero determinant and positive consecutive minors for
/// m, w <= 6.
#[test]
fn criterion_08_mode_matrices() {
    for m in 0..=6usize {
        for w in 1..=6i64 {
            let mat = mw_matrix(m, w);
            assert!(
                !mat.determinant().is_zero(),
                "criterion 8: singular at m={m}, w={w}"
            );
            for i in 0..m {
                for j in 0..m {
                    let det = mat.get(i, j) * mat.get(i + 1, j + 1)
                        - mat.get(i, j + 1) * mat.get(i + 1, j);
                    assert!(
                        det > frac(0, 1),
                        "criterion 8: non-positive minor at m={m}, w={w}, ({i},{j})"
                    );
                }
            }
        }
    }
    pass(8, "mode matrices invertible with positive consecutive minors (m, w <= 6)");
}

/// Classical kernel suite: every relation generator evaluates to exactly
/// zero in its invariant ring.
#[test]
fn criterion_09_classical_kernels() {
    let mut cases = 0usize;
    // Pfaffians, n <= 2, indices <= 5
    for list in increasing_lists(4, 5) {
        let idx: Vec<u16> = list.iter().map(|&v| v as u16).collect();
        assert!(
            eval_classical(&pfaffian(&idx, 1), Family::sp(1), 5).is_zero(),
            "criterion 9: Pfaffian at {list:?}"
        );
        cases += 1;
    }
    for list in increasing_lists(6, 5) {
        let idx: Vec<u16> = list.iter().map(|&v| v as u16).collect();
        assert!(
            eval_classical(&pfaffian(&idx, 2), Family::sp(2), 5).is_zero(),
            "criterion 9: rank-2 Pfaffian at {list:?}"
        );
        cases += 1;
    }
    // determinant analogues, n <= 3, indices <= 4
    for n in 1..=3usize {
        let lists = weakly_increasing_lists(n + 1, 4);
        for i_list in &lists {
            for j_list in &lists {
                let d = det_analog(i_list, j_list, n);
                if d.is_zero() {
                    continue; // trivial by repetition
                }
                assert!(
                    eval_classical(&d, Family::o(n as u16), 4).is_zero(),
                    "criterion 9: determinant analogue at n={n}, I={i_list:?}, J={j_list:?}"
                );
                cases += 1;
            }
        }
    }
    assert!(
        eval_classical(&sergeev_minimal(), Family::osp(1), 3).is_zero(),
        "criterion 9: minimal orthosymplectic relation"
    );
    cases += 1;
    pass(9, &format!("classical kernel membership ({cases} relations)"));
}

fn weakly_increasing_lists(len: usize, max: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(len);
    fn rec(start: u16, len: usize, max: u16, acc: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if acc.len() == len {
            out.push(acc.clone());
            return;
        }
        for v in start..=max {
            acc.push(v);
            rec(v, len, max, acc, out);
            acc.pop();
        }
    }
    rec(0, len, max, &mut acc, &mut out);
    out
}

/// Engine identity suite on randomized elements of weight <= 5 per family:
/// skew-symmetry, quasi-commutativity, locality, weight additivity, and
/// filtration bounds.
#[test]
fn criterion_10_engine_identities() {
    let mut rng = Rng::new(0xacce97ed);
    for fields in [FieldSet::BetaGamma, FieldSet::Fermion, FieldSet::Mixed] {
        for i in 0..500 {
            let a = random_vpoly(&mut rng, fields, 10);
            let b = random_vpoly(&mut rng, fields, 10);
            assert!(
                check_skew_symmetry(&a, &b, 0..4),
                "criterion 10: skew symmetry ({fields:?}, case {i})"
            );
            assert!(
                check_quasi_commutativity(&a, &b),
                "criterion 10: quasi-commutativity ({fields:?}, case {i})"
            );
            assert!(
                check_products_bookkeeping(&a, &b),
                "criterion 10: locality/weight/filtration ({fields:?}, case {i})"
            );
        }
    }
    pass(10, "skew symmetry, quasi-commutativity, locality, weight and degree bounds (1500 random pairs)");
}

/// Raising-operator membership and the generation of everything by W^3,
/// verified in realization.
#[test]
fn criterion_11_raising_and_weak_generation() {
    // The raising-operator property: W^3 o_1 W^{2m+1} equals a *nonzero*
    // multiple of W^{2m+3} modulo span{d^{2k} W^{2m+3-2k} : 1 <= k <= m+1},
    // for m >= 1. The multiple is predicted by the weight-2 mode action:
    //   c_m = lambda_{0,3,2,0} * e + lambda_{0,3,2,2m+1},
    // where e is the W^{2m+3}-coefficient of Om_{2,2m+1}; the membership is
    // checked against that prediction (c_m = 2m + 4).
    let fam = Family::sp(1);
    for m in 1..=4u16 {
        let e = omega_expansion(2, 2 * m + 1)
            .get(&(0, 2 * m + 3))
            .cloned()
            .unwrap_or_else(|| frac(0, 1));
        let c_m = pplus_lambda(0, 3, 2, 0) * e + pplus_lambda(0, 3, 2, (2 * m + 1) as i64);
        assert_eq!(c_m, frac(2 * m as i64 + 4, 1), "criterion 11: mode action at m={m}");
        let w3 = fam.w_ff(3);
        let wm = fam.w_ff(2 * m + 1);
        let target = circle(&w3, 1, &wm).sub(&fam.w_ff(2 * m + 3).scale(&c_m));
        let basis: Vec<_> = (1..=m + 1)
            .map(|k| derive_n(&fam.w_ff(2 * m + 3 - 2 * k), 2 * k as u32))
            .collect();
        assert!(
            express_in_span(&target, &basis).is_some(),
            "criterion 11: raising operator at m={m}"
        );
        // without removing the W^{2m+3} component the membership must fail
        assert!(
            express_in_span(&circle(&w3, 1, &wm), &basis).is_none(),
            "criterion 11: raising coefficient unexpectedly zero at m={m}"
        );
    }
    // W^1 = (1/360) W^3 o_5 W^3 in every family
    for fam in [Family::sp(1), Family::o(1), Family::o(2), Family::osp(1)] {
        let w1 = fam.w_ff(1);
        let w3 = fam.w_ff(3);
        assert_eq!(
            circle(&w3, 5, &w3).scale(&frac(1, 360)),
            w1,
            "criterion 11: W^1 from W^3 failed in {fam}"
        );
    }
    // the family-independent generator expansions hold in realization
    for fam in [
        Family::sp(1),
        Family::sp(2),
        Family::o(1),
        Family::o(2),
        Family::osp(1),
        Family::osp(2),
    ] {
        for m in 2..=7u16 {
            for a in 0..=(m - 1) / 2 {
                let b = m - a;
                if a == b {
                    continue;
                }
                let lhs = fam.omega_ff(a, b);
                let mut rhs = voa_core::freefield::VPoly::zero();
                for (&(k, g), c) in &omega_expansion(a, b) {
                    rhs.add_scaled(&derive_n(&fam.omega_ff(0, g), k), c);
                }
                assert_eq!(lhs, rhs, "criterion 11: expansion of Om_{{{a},{b}}} in {fam}");
            }
        }
    }
    pass(11, "raising operator memberships and generator expansions in realization");
}
