//! Quantum corrections: normal ordering of classical relations, the
//! correction loop that pushes them into the kernel of the realization,
//! remainder and decoupling extraction, and the weight-16 regression
//! fixture.
//!
//! A degree-(n+1) classical relation in the `Q_{a,b}` maps to zero in the
//! invariant ring, but its normal ordering (replace `Q_{a,b}` by `Om_{a,b}`,
//! products by right-nested Wick products) realizes to something nonzero of
//! strictly lower filtration degree. The correction loop repeatedly lifts
//! the top-degree residue back to a formal word polynomial and subtracts it,
//! terminating in an element whose realization vanishes identically. The
//! coefficient of `W^{m}` in the degree-1 part of the result (in the
//! family-neutral identification `W^m = Om_{0,m}`) is the remainder; when
//! it is nonzero the relation can be solved for the top generator, giving a
//! decoupling relation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::arith::{Rational, SparseSolver};
use crate::classical::{eval_classical, QPoly};
use crate::freefield::{derive_n as ff_derive_n, wick, NOMono, VPoly};
use crate::wbasis::{omega_expansion, Family, OmPair, Realizer, WPoly, Word};

mod fixture;

pub use fixture::{appendix_fixture, AppendixFixture};

/// Errors from the correction machinery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorrectionError {
    /// The classical input does not vanish in the invariant ring.
    NotARelation,
    /// The classical input mixes weights.
    NotHomogeneous,
    /// A residual component is not in the span of word realizations.
    NotLiftable { degree: usize },
    /// The loop failed to lower the top degree (engine bug guard).
    DegreeNotDecreasing,
    /// A residual had odd top degree (engine bug guard).
    OddTopDegree,
    /// Remainder is zero, so no decoupling exists at this weight.
    ZeroRemainder,
    /// raise_decoupling was called without the prerequisite chain.
    MissingPrerequisite { m: u16 },
    /// The decoupling target could not be expressed in lower generators.
    NotDecoupled,
}

/// Exactly expresses `target` as a rational combination of `basis`
/// elements, or returns `None` if it is not in their span.
pub fn express_in_span(target: &VPoly, basis: &[VPoly]) -> Option<Vec<Rational>> {
    let mut rows: BTreeMap<&NOMono, Vec<(usize, Rational)>> = BTreeMap::new();
    for (ci, col) in basis.iter().enumerate() {
        for (m, c) in col.terms() {
            rows.entry(m).or_default().push((ci, c.clone()));
        }
    }
    for (m, _) in target.terms() {
        rows.entry(m).or_default();
    }
    let mut solver = SparseSolver::new(basis.len());
    for (m, row) in rows {
        if !solver.push_row(row, target.coeff(m)) {
            return None;
        }
    }
    Some(solver.solve().particular)
}

/// All normalized pairs with conformal weight exactly `w` (`a + b = w - 1`,
/// `a < b`).
pub fn om_pairs_of_weight(w: i64) -> Vec<OmPair> {
    let mut out = Vec::new();
    if w < 2 {
        return out;
    }
    let s = w - 1;
    let mut a = 0i64;
    while 2 * a < s {
        out.push(OmPair {
            a: a as u16,
            b: (s - a) as u16,
        });
        a += 1;
    }
    out
}

/// All sorted words with `degree` factors and total weight `weight`.
pub fn om_words(degree: usize, weight: i64) -> Vec<Word> {
    let mut pairs = Vec::new();
    for w in 2..=(weight - 2 * (degree as i64 - 1)) {
        pairs.extend(om_pairs_of_weight(w));
    }
    pairs.sort();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    enumerate_words(&pairs, 0, degree, weight, &mut acc, &mut out);
    out
}

fn enumerate_words(
    pairs: &[OmPair],
    start: usize,
    remaining: usize,
    weight_left: i64,
    acc: &mut Word,
    out: &mut Vec<Word>,
) {
    if remaining == 0 {
        if weight_left == 0 {
            out.push(acc.clone());
        }
        return;
    }
    for idx in start..pairs.len() {
        let p = pairs[idx];
        let w = p.weight();
        // the remaining factors need weight >= 2 each
        if w > weight_left - 2 * (remaining as i64 - 1) {
            continue;
        }
        acc.push(p);
        enumerate_words(pairs, idx, remaining - 1, weight_left - w, acc, out);
        acc.pop();
    }
}

/// Factor ordering used when normal ordering a classical polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalOrdering {
    /// Factors sorted ascending (the canonical choice).
    Ascending,
    /// Factors sorted descending; used to exercise independence of the
    /// remainder from the choice of normal ordering.
    Descending,
}

/// A term of a relation: coefficient times an *ordered* word (the Wick
/// product is taken right-nested in the written order; canonical words are
/// sorted ascending).
pub type RelTerm = (Rational, Vec<OmPair>);

/// Normal ordering of a classical polynomial: each monomial
/// `Q_{a1,b1} ... Q_{ak,bk}` becomes the iterated Wick word of the
/// `Om_{ai,bi}` with factors arranged by `ordering`.
pub fn normal_order(p: &QPoly, ordering: NormalOrdering) -> Vec<RelTerm> {
    let mut out = Vec::new();
    for (mono, c) in p.terms() {
        let mut word: Vec<OmPair> = mono.clone();
        if ordering == NormalOrdering::Descending {
            word.reverse();
        }
        out.push((c.clone(), word));
    }
    out
}

/// A quantum-corrected relation: an element of the kernel of the
/// realization whose top-degree part is the normal ordering of a classical
/// relation.
#[derive(Clone, Debug)]
pub struct RelationResult {
    pub family: Family,
    pub weight: i64,
    /// All terms, top degree first; lower-degree corrections use canonical
    /// (sorted) words.
    pub terms: Vec<RelTerm>,
    /// `pr_m` of the degree-1 part in the family-neutral identification
    /// `W^m = Om_{0,m}`, defined when the weight is even.
    pub remainder: Option<Rational>,
    /// Whether the realization of `terms` is exactly zero.
    pub kernel_ok: bool,
}

impl RelationResult {
    /// Terms grouped by word length.
    pub fn by_degree(&self) -> BTreeMap<usize, Vec<RelTerm>> {
        let mut out: BTreeMap<usize, Vec<RelTerm>> = BTreeMap::new();
        for t in &self.terms {
            out.entry(t.1.len()).or_default().push(t.clone());
        }
        out
    }

    /// The degree-1 part as a formal element.
    pub fn degree1(&self) -> WPoly {
        let mut out = WPoly::zero();
        for (c, word) in &self.terms {
            if word.len() == 1 {
                out.add_term(word.clone(), c.clone());
            }
        }
        out
    }
}

/// The remainder of a term list: the `W^{m}` coefficient of the degree-1
/// part in the family-neutral basis (`W^m = Om_{0,m}`), `m = weight - 1`
/// odd.
fn degree1_remainder(terms: &[RelTerm], weight: i64) -> Option<Rational> {
    if weight % 2 != 0 {
        return None;
    }
    let m = (weight - 1) as u16;
    let mut acc = Rational::zero();
    for (c, word) in terms {
        if let [p] = word.as_slice() {
            debug_assert_eq!(p.weight(), weight);
            if let Some(v) = omega_expansion(p.a, p.b).get(&(0, m)) {
                acc += v * c;
            }
        }
    }
    Some(acc)
}

/// Lifts the degree-`degree2` component of an invariant element `e` to a
/// formal word polynomial whose realization matches it at that degree.
pub fn lift(e: &VPoly, family: Family, degree2: usize) -> Result<WPoly, CorrectionError> {
    let mut rz = Realizer::new(family);
    lift_with(e, &mut rz, degree2)
}

fn lift_with(e: &VPoly, rz: &mut Realizer, degree2: usize) -> Result<WPoly, CorrectionError> {
    if e.is_zero() {
        return Ok(WPoly::zero());
    }
    if !degree2.is_multiple_of(2) {
        return Err(CorrectionError::OddTopDegree);
    }
    let weight2 = e.weight2().ok_or(CorrectionError::NotHomogeneous)?;
    debug_assert_eq!(weight2 % 2, 0, "invariant elements have integer weight");
    let weight = weight2 / 2;
    let j = degree2 / 2;
    let words = om_words(j, weight);
    let cols: Vec<VPoly> = words
        .iter()
        .map(|w| rz.word(w).degree_component(degree2))
        .collect();
    let target = e.degree_component(degree2);
    let x = express_in_span(&target, &cols)
        .ok_or(CorrectionError::NotLiftable { degree: degree2 })?;
    let mut out = WPoly::zero();
    for (xi, w) in x.into_iter().zip(words) {
        out.add_term(w, xi);
    }
    Ok(out)
}

/// Runs the correction loop on a classical relation: normal-orders it,
/// then repeatedly lifts and subtracts the top-degree residue of the
/// realization until the realization vanishes.
pub fn build_relation(family: Family, classical: &QPoly) -> Result<RelationResult, CorrectionError> {
    build_relation_with(family, classical, NormalOrdering::Ascending)
}

/// [`build_relation`] with an explicit normal-ordering strategy for the
/// classical top part.
pub fn build_relation_with(
    family: Family,
    classical: &QPoly,
    ordering: NormalOrdering,
) -> Result<RelationResult, CorrectionError> {
    if !eval_classical(classical, family, classical.max_index()).is_zero() {
        return Err(CorrectionError::NotARelation);
    }
    let mut weights = classical
        .terms()
        .map(|(m, _)| m.iter().map(OmPair::weight).sum::<i64>());
    let weight = weights.next().ok_or(CorrectionError::NotHomogeneous)?;
    if !weights.all(|w| w == weight) {
        return Err(CorrectionError::NotHomogeneous);
    }

    let mut rz = Realizer::new(family);
    let mut terms = normal_order(classical, ordering);
    let mut residual = VPoly::zero();
    for (c, word) in &terms {
        residual.add_scaled(&rz.word(word), c);
    }
    let mut prev_top = usize::MAX;
    while !residual.is_zero() {
        let top = residual.max_degree();
        if !top.is_multiple_of(2) {
            return Err(CorrectionError::OddTopDegree);
        }
        if top >= prev_top {
            return Err(CorrectionError::DegreeNotDecreasing);
        }
        prev_top = top;
        let correction = lift_with(&residual, &mut rz, top)?;
        for (word, c) in correction.terms() {
            residual.add_scaled(&rz.word(word), &-c.clone());
            terms.push((-c.clone(), word.clone()));
        }
    }

    // independent kernel check over the final term list
    let mut check = VPoly::zero();
    for (c, word) in &terms {
        check.add_scaled(&rz.word(word), c);
    }
    let kernel_ok = check.is_zero();
    let remainder = degree1_remainder(&terms, weight);
    Ok(RelationResult {
        family,
        weight,
        terms,
        remainder,
        kernel_ok,
    })
}

/// A factor `d^k w^m` of a decoupling word.
pub type WFactor = (u16, u32);

/// A decoupling relation `w^m = Q(w^1, ..., w^{m-2})`: the right side is a
/// normally ordered polynomial in the strong generators below `m`, given as
/// ordered words in factors `d^k w^{m'}`.
#[derive(Clone, Debug)]
pub struct Decoupling {
    pub family: Family,
    /// Index of the decoupled generator.
    pub m: u16,
    /// Words of the right side; factors are realized with the family sign.
    pub expression: Vec<(Rational, Vec<WFactor>)>,
}

/// Realizes one decoupling word (right-nested, in the written order).
pub fn realize_w_word(family: Family, word: &[WFactor]) -> VPoly {
    let mut out = VPoly::one();
    for &(m, k) in word.iter().rev() {
        let factor = ff_derive_n(&family.w_ff(m), k);
        out = wick(&factor, &out);
    }
    out
}

impl Decoupling {
    /// Free-field image of the right side.
    pub fn rhs_ff(&self) -> VPoly {
        let mut out = VPoly::zero();
        for (c, word) in &self.expression {
            out.add_scaled(&realize_w_word(self.family, word), c);
        }
        out
    }

    /// Checks the defining identity `w^m = rhs` in the realization.
    pub fn verify(&self) -> bool {
        self.rhs_ff() == self.family.w_ff(self.m)
    }
}

/// Converts an `Om`-word relation term into `d^k w^m` words by expanding
/// every factor in the free `W` basis (slot order preserved; the family
/// sign of each substituted generator is folded into the coefficient).
fn om_word_to_w_words(family: Family, c: &Rational, word: &[OmPair]) -> Vec<(Rational, Vec<WFactor>)> {
    let mut acc: Vec<(Rational, Vec<WFactor>)> = vec![(c.clone(), Vec::new())];
    for p in word {
        let expansion = omega_expansion(p.a, p.b);
        let mut next = Vec::with_capacity(acc.len() * expansion.len());
        for (prefix_c, prefix) in &acc {
            for (&(k, m), v) in &expansion {
                let mut w = prefix.clone();
                w.push((m, k));
                // w^m = w_sign * Om_{0,m}, so Om_{0,m} realizes as
                // w_sign * w^m; fold the sign per factor.
                next.push((prefix_c * v * family.w_sign(), w));
            }
        }
        acc = next;
    }
    acc
}

/// Extracts the decoupling relation from a minimal-weight relation with
/// nonzero remainder: divides by the `W^m` coefficient and moves everything
/// but `w^m` to the right side.
pub fn extract_decoupling(r: &RelationResult) -> Result<Decoupling, CorrectionError> {
    let remainder = r.remainder.clone().filter(|v| !v.is_zero());
    let remainder = remainder.ok_or(CorrectionError::ZeroRemainder)?;
    let m = (r.weight - 1) as u16;
    // In neutral coordinates the remainder is the coefficient lambda_0 of
    // Om_{0,m}; w^m - w_sign * REL / lambda_0 then has no w^m component.
    let lambda0 = remainder;
    let mut words: BTreeMap<Vec<WFactor>, Rational> = BTreeMap::new();
    // start from w^m = w_sign * Om_{0,m}
    words.insert(vec![(m, 0)], Rational::one());
    for (c, word) in &r.terms {
        let scaled = -(c / &lambda0) * r.family.w_sign();
        for (wc, wword) in om_word_to_w_words(r.family, &scaled, word) {
            let e = words.entry(wword).or_insert_with(Rational::zero);
            *e += wc;
        }
    }
    words.retain(|_, v| !v.is_zero());
    // the w^m term must cancel exactly; everything left uses lower generators
    if words.keys().any(|w| w.iter().any(|&(g, _)| g >= m)) {
        return Err(CorrectionError::NotDecoupled);
    }
    let d = Decoupling {
        family: r.family,
        m,
        expression: words.into_iter().map(|(w, c)| (c, w)).collect(),
    };
    if !d.verify() {
        return Err(CorrectionError::NotDecoupled);
    }
    Ok(d)
}

/// All nonempty standard words over generators `w^{m}` with `m <= cap` (odd)
/// and total weight `weight`: factors `(m, k)` of weight `m + 1 + k`, sorted
/// by (m, k).
pub fn w_words(cap: u16, weight: i64) -> Vec<Vec<WFactor>> {
    let mut factors = Vec::new();
    let mut m = 1u16;
    while (m as i64) < weight && m <= cap {
        let mut k = 0u32;
        while (m as i64) + 1 + (k as i64) <= weight {
            factors.push((m, k));
            k += 1;
        }
        m += 2;
    }
    factors.sort();
    let mut out = Vec::new();
    let mut acc = Vec::new();
    enumerate_w_words(&factors, 0, weight, &mut acc, &mut out);
    out
}

fn enumerate_w_words(
    factors: &[WFactor],
    start: usize,
    weight_left: i64,
    acc: &mut Vec<WFactor>,
    out: &mut Vec<Vec<WFactor>>,
) {
    if weight_left == 0 {
        if !acc.is_empty() {
            out.push(acc.clone());
        }
        return;
    }
    for idx in start..factors.len() {
        let (m, k) = factors[idx];
        let w = m as i64 + 1 + k as i64;
        if w > weight_left {
            continue;
        }
        acc.push((m, k));
        enumerate_w_words(factors, idx, weight_left - w, acc, out);
        acc.pop();
    }
}

/// Produces the decoupling for the next generator `prev.m + 2`, given the
/// chain of decouplings from the family's minimal one up to `prev`.
///
/// The right side is found by expressing the free-field image of
/// `w^{prev.m + 2}` exactly in the span of normally ordered words over the
/// strong generators; the prerequisite chain guarantees the system is
/// solvable.
pub fn raise_decoupling(
    prev: &Decoupling,
    available: &[Decoupling],
) -> Result<Decoupling, CorrectionError> {
    let family = prev.family;
    let base = family.decoupled_gen();
    let mut need = base;
    while need <= prev.m {
        if !available
            .iter()
            .any(|d| d.family == family && d.m == need)
        {
            return Err(CorrectionError::MissingPrerequisite { m: need });
        }
        need += 2;
    }
    let m_next = prev.m + 2;
    let cap = base - 2;
    let weight = m_next as i64 + 1;
    let words = w_words(cap, weight);
    let cols: Vec<VPoly> = words
        .iter()
        .map(|w| realize_w_word(family, w))
        .collect();
    let target = family.w_ff(m_next);
    let x = express_in_span(&target, &cols).ok_or(CorrectionError::NotDecoupled)?;
    let expression: Vec<(Rational, Vec<WFactor>)> = x
        .into_iter()
        .zip(words)
        .filter(|(c, _)| !c.is_zero())
        .collect();
    let d = Decoupling {
        family,
        m: m_next,
        expression,
    };
    debug_assert!(d.verify());
    Ok(d)
}

/// Report of the appendix regression: realizes the hard-coded weight-16
/// relation in the rank-1 orthosymplectic family and extracts its
/// remainder.
#[derive(Clone, Debug)]
pub struct AppendixReport {
    /// Whether the realization of the full relation is exactly zero.
    pub kernel_ok: bool,
    /// `pr_15` of the degree-1 part.
    pub remainder: Rational,
    /// The residual of the realization (zero when `kernel_ok`).
    pub residual: VPoly,
    /// Number of terms realized per word length, for progress reporting.
    pub terms_by_degree: BTreeMap<usize, usize>,
}

/// Verifies the embedded weight-16 relation: builds the four graded
/// components from the fixture tables, realizes their sum in the rank-1
/// orthosymplectic family, and extracts the remainder.
pub fn verify_appendix() -> AppendixReport {
    verify_appendix_with_progress(|_, _| {})
}

/// [`verify_appendix`] with a per-component progress callback
/// `(degree, terms)`.
pub fn verify_appendix_with_progress(mut progress: impl FnMut(usize, usize)) -> AppendixReport {
    let fixture = appendix_fixture();
    let family = Family::osp(1);
    let mut rz = Realizer::new(family);
    let mut residual = VPoly::zero();
    let mut terms_by_degree = BTreeMap::new();
    for (degree, terms) in fixture.components() {
        terms_by_degree.insert(degree, terms.len());
        for (c, word) in &terms {
            residual.add_scaled(&rz.word(word), c);
        }
        progress(degree, terms.len());
    }
    let remainder = degree1_remainder(&fixture.degree1_terms(), 16).expect("weight 16 is even");
    AppendixReport {
        kernel_ok: residual.is_zero(),
        remainder,
        residual,
        terms_by_degree,
    }
}
