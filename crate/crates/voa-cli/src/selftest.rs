//! Self-test battery: a CLI-facing sweep of the engine's defining
//! identities, printed as a pass/fail table. The heavyweight acceptance
//! checks live in the test suite; this battery covers the same ground at
//! reduced ranges so it finishes in seconds.

use voa_core::arith::{frac, rat, Rational};
use voa_core::classical::{det_analog, eval_classical, pfaffian, sergeev_minimal};
use voa_core::corrections::{
    build_relation, build_relation_with, extract_decoupling, raise_decoupling, verify_appendix,
    NormalOrdering,
};
use voa_core::freefield::{circle, derive_n, wick, FieldKind, GenSym, VPoly};
use voa_core::remainder::RemainderCalc;
use voa_core::wbasis::{mw_matrix, Family};

fn factorial_recip(k: u64) -> Rational {
    Rational::new(1.into(), voa_core::arith::factorial(k))
}

/// Deterministic 64-bit generator (splitmix64), good enough for fuzzing
/// exact identities.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Which generators a random element may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSet {
    /// beta/gamma, one color.
    BetaGamma,
    /// one fermion.
    Fermion,
    /// beta/gamma plus one fermion.
    Mixed,
}

impl FieldSet {
    fn gens(&self) -> &'static [(FieldKind, u16)] {
        match self {
            FieldSet::BetaGamma => &[(FieldKind::Beta, 1), (FieldKind::Gamma, 1)],
            FieldSet::Fermion => &[(FieldKind::Phi, 1)],
            FieldSet::Mixed => &[(FieldKind::Beta, 1), (FieldKind::Gamma, 1), (FieldKind::Phi, 1)],
        }
    }
}

/// A random parity-homogeneous element with doubled weight at most
/// `max_wt2`. Terms, factors and derivative depths are all small; the
/// element is nonzero.
pub fn random_vpoly(rng: &mut Rng, fields: FieldSet, max_wt2: i64) -> VPoly {
    let want_odd = fields != FieldSet::BetaGamma && rng.below(2) == 0;
    loop {
        let mut out = VPoly::zero();
        let terms = 1 + rng.below(3);
        for _ in 0..terms {
            let mut factors = Vec::new();
            let nf = 1 + rng.below(3) as usize;
            for _ in 0..nf {
                let (kind, color) = fields.gens()[rng.below(fields.gens().len() as u64) as usize];
                let deriv = rng.below(3) as u16;
                factors.push(GenSym {
                    kind,
                    color,
                    deriv,
                });
            }
            let wt2: i64 = factors.iter().map(|g| g.weight2()).sum();
            if wt2 > max_wt2 {
                continue;
            }
            let odd = factors.iter().filter(|g| g.is_odd()).count() % 2 == 1;
            if odd != want_odd {
                continue;
            }
            let coeff = frac(rng.below(7) as i64 - 3, 1 + rng.below(3) as i64);
            out = out.add(&VPoly::from_factors(&factors, coeff));
        }
        if !out.is_zero() {
            return out;
        }
    }
}

/// A random nonzero generator-layer element in the canonical word basis.
pub fn random_wpoly(rng: &mut Rng) -> voa_core::WPoly {
    use voa_core::wbasis::WPoly;
    loop {
        let mut out = WPoly::zero();
        for _ in 0..=rng.below(3) {
            let mut pairs = Vec::new();
            for _ in 0..1 + rng.below(3) {
                let a = rng.below(5) as u16;
                let b = a + 1 + rng.below(5) as u16;
                pairs.push((a, b));
            }
            let coeff = frac(rng.below(9) as i64 - 4, 1 + rng.below(4) as i64);
            out = out.add(&WPoly::from_pairs(&pairs, coeff));
        }
        if !out.is_zero() {
            return out;
        }
    }
}

/// Checks skew-symmetry of all products of `a` and `b`:
/// `a o_n b = (-1)^{|a||b|} sum_k (-1)^{n+k+1} d^k (b o_{n+k} a) / k!`.
pub fn check_skew_symmetry(a: &VPoly, b: &VPoly, n_range: core::ops::Range<i64>) -> bool {
    let koszul = a.parity().unwrap_or(false) && b.parity().unwrap_or(false);
    for n in n_range {
        let lhs = circle(a, n, b);
        let mut rhs = VPoly::zero();
        for k in 0..=24 {
            let t = circle(b, n + k, a);
            if t.is_zero() {
                if k > 12 {
                    break;
                }
                continue;
            }
            let sgn = if (n + k + 1).rem_euclid(2) == 0 { 1 } else { -1 };
            let mut c = rat(sgn) * factorial_recip(k as u64);
            if koszul {
                c = -c;
            }
            rhs.add_scaled(&derive_n(&t, k as u32), &c);
        }
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Checks quasi-commutativity:
/// `:ab: - (-1)^{|a||b|} :ba: = sum_k (-1)^k d^{k+1}(a o_k b)/(k+1)!`.
pub fn check_quasi_commutativity(a: &VPoly, b: &VPoly) -> bool {
    let koszul = a.parity().unwrap_or(false) && b.parity().unwrap_or(false);
    let lhs = if koszul {
        wick(a, b).add(&wick(b, a))
    } else {
        wick(a, b).sub(&wick(b, a))
    };
    let mut rhs = VPoly::zero();
    for k in 0..=24 {
        let t = circle(a, k, b);
        if t.is_zero() {
            if k > 12 {
                break;
            }
            continue;
        }
        let sgn = if k % 2 == 0 { 1 } else { -1 };
        let c = rat(sgn) * factorial_recip((k + 1) as u64);
        rhs.add_scaled(&derive_n(&t, (k + 1) as u32), &c);
    }
    lhs == rhs
}

/// Checks locality and the weight/filtration bookkeeping of all products.
pub fn check_products_bookkeeping(a: &VPoly, b: &VPoly) -> bool {
    let (Some(wa), Some(wb)) = (a.weight2(), b.weight2()) else {
        return true;
    };
    let bound = (wa + wb) / 2; // a o_n b = 0 for n >= bound by locality
    if !circle(a, bound, b).is_zero() || !circle(a, bound + 1, b).is_zero() {
        return false;
    }
    let (da, db) = (a.max_degree(), b.max_degree());
    for n in -2..bound {
        let p = circle(a, n, b);
        if p.is_zero() {
            continue;
        }
        match p.weight2() {
            Some(w) if w == wa + wb - 2 * (n + 1) => {}
            _ => return false,
        }
        let cap = if n < 0 { da + db } else { (da + db).saturating_sub(2) };
        if p.max_degree() > cap {
            return false;
        }
    }
    true
}

/// One row of the battery.
pub struct Check {
    pub name: &'static str,
    pub run: fn() -> Result<(), String>,
}

fn fail(msg: impl Into<String>) -> Result<(), String> {
    Err(msg.into())
}

fn check_field_identities() -> Result<(), String> {
    let mut rng = Rng::new(0x5eed);
    for fields in [FieldSet::BetaGamma, FieldSet::Fermion, FieldSet::Mixed] {
        for i in 0..40 {
            let a = random_vpoly(&mut rng, fields, 10);
            let b = random_vpoly(&mut rng, fields, 10);
            if !check_skew_symmetry(&a, &b, 0..4) {
                return fail(format!("skew symmetry failed ({fields:?}, case {i})"));
            }
            if !check_quasi_commutativity(&a, &b) {
                return fail(format!("quasi-commutativity failed ({fields:?}, case {i})"));
            }
            if !check_products_bookkeeping(&a, &b) {
                return fail(format!("locality/weight failed ({fields:?}, case {i})"));
            }
        }
    }
    Ok(())
}

fn check_lincomb() -> Result<(), String> {
    use voa_core::freefield::derive_n as ffd;
    use voa_core::wbasis::omega_expansion;
    for fam in [Family::sp(1), Family::o(2), Family::osp(1)] {
        for m in 2..=8u16 {
            for a in 0..=(m - 1) / 2 {
                let b = m - a;
                if a == b {
                    continue;
                }
                let lhs = fam.omega_ff(a, b);
                let mut rhs = VPoly::zero();
                for (&(k, g), c) in &omega_expansion(a, b) {
                    rhs.add_scaled(&ffd(&fam.omega_ff(0, g), k), c);
                }
                if lhs != rhs {
                    return fail(format!("generator expansion failed for Om_{{{a},{b}}} in {fam}"));
                }
            }
        }
    }
    Ok(())
}

fn check_mw_matrices() -> Result<(), String> {
    for m in 0..=4usize {
        for w in 1..=4i64 {
            let mat = mw_matrix(m, w);
            if mat.determinant() == rat(0) {
                return fail(format!("singular mode matrix at m={m}, w={w}"));
            }
            for i in 0..m {
                for j in 0..m {
                    let det = mat.get(i, j) * mat.get(i + 1, j + 1)
                        - mat.get(i, j + 1) * mat.get(i + 1, j);
                    if det <= rat(0) {
                        return fail(format!("non-positive minor at m={m}, w={w}, ({i},{j})"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_remainder_formulas() -> Result<(), String> {
    let mut calc = RemainderCalc::new();
    let mut cases = 0;
    for list in increasing_lists(6, 7) {
        let rec = calc.sym_recursive(2, &list);
        let clo = calc.sym_closed(2, &list);
        if rec != clo {
            return fail(format!("closed vs recursive mismatch at {list:?}"));
        }
        cases += 1;
    }
    if cases < 5 {
        return fail("too few remainder cases enumerated");
    }
    // the block-swap symmetry at n = 2
    let a = calc.sym_recursive(2, &[0, 1, 2, 3, 4, 5]);
    let b = calc.sym_recursive(2, &[1, 0, 3, 2, 5, 4]);
    if a != -b {
        return fail("block-swap symmetry failed");
    }
    Ok(())
}

fn check_classical_kernels() -> Result<(), String> {
    for idx in increasing_lists(4, 5) {
        let idx16: Vec<u16> = idx.iter().map(|&v| v as u16).collect();
        let p = pfaffian(&idx16, 1);
        if !eval_classical(&p, Family::sp(1), 5).is_zero() {
            return fail(format!("rank-1 Pfaffian not in kernel at {idx:?}"));
        }
    }
    if !eval_classical(&det_analog(&[0, 1], &[1, 2], 1), Family::o(1), 2).is_zero() {
        return fail("rank-1 determinant analogue not in kernel");
    }
    if !eval_classical(&sergeev_minimal(), Family::osp(1), 3).is_zero() {
        return fail("minimal orthosymplectic relation not in kernel");
    }
    if eval_classical(&pfaffian(&[0, 1, 2, 3], 1), Family::sp(2), 3).is_zero() {
        return fail("rank-1 Pfaffian should survive at rank 2");
    }
    Ok(())
}

fn check_sp1_end_to_end() -> Result<(), String> {
    let fam = Family::sp(1);
    let rel = build_relation(fam, &pfaffian(&[0, 1, 2, 3], 1)).map_err(|e| format!("{e:?}"))?;
    if !rel.kernel_ok || rel.weight != 8 {
        return fail("minimal symplectic relation malformed");
    }
    if rel.remainder != Some(frac(1, 6)) {
        return fail(format!("remainder {:?}, expected 1/6", rel.remainder));
    }
    let d7 = extract_decoupling(&rel).map_err(|e| format!("{e:?}"))?;
    if !d7.verify() {
        return fail("w^7 decoupling failed verification");
    }
    let d9 = raise_decoupling(&d7, std::slice::from_ref(&d7)).map_err(|e| format!("{e:?}"))?;
    if !d9.verify() {
        return fail("w^9 decoupling failed verification");
    }
    Ok(())
}

fn check_o_end_to_end() -> Result<(), String> {
    let mut calc = RemainderCalc::new();
    let rel1 = build_relation(Family::o(1), &det_analog(&[0, 0], &[1, 1], 1))
        .map_err(|e| format!("{e:?}"))?;
    if rel1.remainder != Some(frac(7, 3)) || !rel1.kernel_ok {
        return fail("rank-1 orthogonal relation malformed");
    }
    let rel2 = build_relation(Family::o(2), &det_analog(&[0, 0, 0], &[1, 1, 1], 2))
        .map_err(|e| format!("{e:?}"))?;
    let oracle = calc.orth_recursive(2, &[0, 0, 0], &[1, 1, 1]);
    if rel2.remainder != Some(oracle) || !rel2.kernel_ok {
        return fail("rank-2 orthogonal relation malformed");
    }
    let d3 = extract_decoupling(&rel1).map_err(|e| format!("{e:?}"))?;
    let d5 = raise_decoupling(&d3, std::slice::from_ref(&d3)).map_err(|e| format!("{e:?}"))?;
    let d7 = raise_decoupling(&d5, &[d3.clone(), d5.clone()]).map_err(|e| format!("{e:?}"))?;
    if !(d3.verify() && d5.verify() && d7.verify()) {
        return fail("orthogonal decoupling chain failed verification");
    }
    Ok(())
}

fn check_ordering_independence() -> Result<(), String> {
    let fam = Family::sp(1);
    for idx in [[0u16, 1, 2, 5], [0, 1, 3, 4]] {
        let p = pfaffian(&idx, 1);
        let a = build_relation_with(fam, &p, NormalOrdering::Ascending)
            .map_err(|e| format!("{e:?}"))?;
        let b = build_relation_with(fam, &p, NormalOrdering::Descending)
            .map_err(|e| format!("{e:?}"))?;
        if a.remainder != b.remainder {
            return fail(format!("ordering-dependent remainder at {idx:?}"));
        }
    }
    Ok(())
}

fn check_appendix() -> Result<(), String> {
    let report = verify_appendix();
    if !report.kernel_ok {
        return fail("appendix relation not in the kernel");
    }
    if report.remainder != frac(109, 56000) {
        return fail(format!("appendix remainder {}", report.remainder));
    }
    Ok(())
}

fn check_parser_roundtrip() -> Result<(), String> {
    use crate::parse::{parse_vpoly, parse_wpoly};
    let mut rng = Rng::new(42);
    for _ in 0..50 {
        let p = random_vpoly(&mut rng, FieldSet::Mixed, 10);
        let printed = p.to_string();
        let back = parse_vpoly(&printed).map_err(|e| e.to_string())?;
        if back != p {
            return fail(format!("round-trip failed for {printed}"));
        }
    }
    let w = parse_wpoly("Om0,3[0] + 1/6 * :Om0,1[0] Om1,2[0]:").map_err(|e| e.to_string())?;
    let back = parse_wpoly(&w.to_string()).map_err(|e| e.to_string())?;
    if back != w {
        return fail("generator-layer round-trip failed");
    }
    for _ in 0..50 {
        let p = random_wpoly(&mut rng);
        let printed = p.to_string();
        let back = parse_wpoly(&printed).map_err(|e| e.to_string())?;
        if back != p {
            return fail(format!("generator round-trip failed for {printed}"));
        }
    }
    Ok(())
}

/// All strictly increasing `len`-lists with entries `0..=max`.
pub fn increasing_lists(len: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(len);
    fn rec(start: i64, len: usize, max: i64, acc: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if acc.len() == len {
            out.push(acc.clone());
            return;
        }
        for v in start..=max {
            acc.push(v);
            rec(v + 1, len, max, acc, out);
            acc.pop();
        }
    }
    rec(0, len, max, &mut acc, &mut out);
    out
}

/// The battery, in execution order.
pub fn checks() -> Vec<Check> {
    vec![
        Check {
            name: "free-field identities (randomized)",
            run: check_field_identities,
        },
        Check {
            name: "generator expansions match realizations",
            run: check_lincomb,
        },
        Check {
            name: "mode matrices invertible with positive minors",
            run: check_mw_matrices,
        },
        Check {
            name: "remainders: closed formula vs recursion",
            run: check_remainder_formulas,
        },
        Check {
            name: "classical kernel membership",
            run: check_classical_kernels,
        },
        Check {
            name: "symplectic rank 1 end to end",
            run: check_sp1_end_to_end,
        },
        Check {
            name: "orthogonal ranks 1-2 end to end",
            run: check_o_end_to_end,
        },
        Check {
            name: "remainder independent of normal ordering",
            run: check_ordering_independence,
        },
        Check {
            name: "weight-16 regression relation",
            run: check_appendix,
        },
        Check {
            name: "printer/parser round-trip",
            run: check_parser_roundtrip,
        },
    ]
}

/// Runs the battery across `threads` workers; returns the failures.
pub fn run_all(threads: usize) -> Vec<(String, Result<(), String>)> {
    let checks = checks();
    let threads = threads.max(1).min(checks.len());
    let results: Vec<(String, Result<(), String>)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in checks.chunks(checks.len().div_ceil(threads)) {
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .map(|c| (c.name.to_string(), (c.run)()))
                    .collect::<Vec<_>>()
            }));
        }
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("selftest worker panicked"))
            .collect()
    });
    let mut ordered = results;
    let order: Vec<String> = checks_order();
    ordered.sort_by_key(|(name, _)| order.iter().position(|n| n == name).unwrap_or(usize::MAX));
    ordered
}

fn checks_order() -> Vec<String> {
    checks().iter().map(|c| c.name.to_string()).collect()
}
