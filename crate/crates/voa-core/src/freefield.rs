//! Canonical normally ordered monomials over free fields and all circle
//! products.
//!
//! The fields are the even pairs `beta^i`, `gamma^i` of the rank-n
//! beta-gamma system and the odd fermions `phi^i`, with nonzero
//! generator-generator OPEs
//!
//! ```text
//!   beta^i(z) gamma^j(w) ~  delta_ij (z-w)^-1
//!   gamma^i(z) beta^j(w) ~ -delta_ij (z-w)^-1
//!   phi^i(z)  phi^j(w)  ~  delta_ij (z-w)^-1
//! ```
//!
//! A monomial is a multiset of derivative symbols `d^k beta^i` etc., kept in
//! a fixed total order; for free fields the right-nested iterated Wick
//! product of generators is graded-symmetric, so the sorted multiset is a
//! canonical basis element. All generators have conformal weight `k + 1/2`;
//! weights are stored doubled to stay integral.
//!
//! Products are computed from three ingredients:
//! - generator-generator contractions (pure scalars, from the table above),
//! - a single generator acting by `o_n` (n >= 0) on a monomial distributes
//!   over single contractions with Koszul signs,
//! - a composite left factor is unwound with the identity
//!   `(:ab:) o_n c = sum_j 1/j! :(d^j a)(b o_{n+j} c):
//!                 + (-1)^{|a||b|} sum_j b o_{n-1-j} (a o_j c)`
//!   and its `n = -1` (quasi-associativity) counterpart.
//!
//! Negative products are derivative-weighted Wick products:
//! `a o_{-m-1} b = :(d^m a) b: / m!`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::arith::{factorial, Rational};

/// Which free field a generator symbol belongs to.
///
/// The declaration order fixes the canonical monomial order: all betas, then
/// all gammas, then all phis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FieldKind {
    Beta,
    Gamma,
    Phi,
}

/// A derivative of a free-field generator: `d^deriv kind^color`.
///
/// Colors are 1-based. `phi` is odd, `beta`/`gamma` are even. The derived
/// `Ord` is the canonical total order (kind, color, deriv).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GenSym {
    pub kind: FieldKind,
    pub color: u16,
    pub deriv: u16,
}

impl GenSym {
    pub fn beta(color: u16, deriv: u16) -> Self {
        GenSym {
            kind: FieldKind::Beta,
            color,
            deriv,
        }
    }

    pub fn gamma(color: u16, deriv: u16) -> Self {
        GenSym {
            kind: FieldKind::Gamma,
            color,
            deriv,
        }
    }

    pub fn phi(color: u16, deriv: u16) -> Self {
        GenSym {
            kind: FieldKind::Phi,
            color,
            deriv,
        }
    }

    /// True for odd (fermionic) symbols.
    pub fn is_odd(&self) -> bool {
        self.kind == FieldKind::Phi
    }

    /// Doubled conformal weight `2k + 1`.
    pub fn weight2(&self) -> i64 {
        2 * self.deriv as i64 + 1
    }

    fn derived(&self) -> GenSym {
        GenSym {
            deriv: self.deriv + 1,
            ..*self
        }
    }
}

/// Scalar contraction `g o_n h` of two generator symbols.
///
/// Nonzero only for matching colors, pole order `n = k + l + 1` where `k, l`
/// are the derivative orders, and a contracting kind pair; the value is then
/// `(-1)^k (k+l)!` times the sign of the pair.
fn contraction(g: &GenSym, h: &GenSym, n: i64) -> Option<Rational> {
    if g.color != h.color {
        return None;
    }
    let pair_sign: i64 = match (g.kind, h.kind) {
        (FieldKind::Beta, FieldKind::Gamma) => 1,
        (FieldKind::Gamma, FieldKind::Beta) => -1,
        (FieldKind::Phi, FieldKind::Phi) => 1,
        _ => return None,
    };
    let total = g.deriv as i64 + h.deriv as i64;
    if n != total {
        return None;
    }
    let mut v = Rational::from_integer(factorial(total as u64) * pair_sign);
    if g.deriv % 2 == 1 {
        v = -v;
    }
    Some(v)
}

/// A canonical normally ordered monomial: a sorted multiset of generator
/// symbols, read as the right-nested iterated Wick product of its factors.
/// The empty monomial is the vacuum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct NOMono {
    factors: Vec<GenSym>,
}

impl NOMono {
    pub fn vacuum() -> Self {
        NOMono {
            factors: Vec::new(),
        }
    }

    pub fn factors(&self) -> &[GenSym] {
        &self.factors
    }

    pub fn is_vacuum(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of generator factors (the filtration degree).
    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    /// Doubled conformal weight.
    pub fn weight2(&self) -> i64 {
        self.factors.iter().map(GenSym::weight2).sum()
    }

    /// True when the monomial has an odd number of fermionic factors.
    pub fn is_odd(&self) -> bool {
        self.factors.iter().filter(|g| g.is_odd()).count() % 2 == 1
    }
}

/// Inserts `g` into the sorted factor list, returning the Koszul sign and the
/// new monomial, or `None` if an odd generator is repeated.
fn insert_gen(g: GenSym, m: &NOMono) -> Option<(i32, NOMono)> {
    let fs = &m.factors;
    if g.is_odd() && fs.contains(&g) {
        return None;
    }
    let pos = fs.partition_point(|h| *h <= g);
    let sign = if g.is_odd() {
        let odd_before = fs[..pos].iter().filter(|h| h.is_odd()).count();
        if odd_before % 2 == 1 {
            -1
        } else {
            1
        }
    } else {
        1
    };
    let mut factors = Vec::with_capacity(fs.len() + 1);
    factors.extend_from_slice(&fs[..pos]);
    factors.push(g);
    factors.extend_from_slice(&fs[pos..]);
    Some((sign, NOMono { factors }))
}

/// Sparse free-field element: a finite rational combination of canonical
/// normally ordered monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VPoly {
    terms: BTreeMap<NOMono, Rational>,
}

impl VPoly {
    pub fn zero() -> Self {
        VPoly::default()
    }

    /// The vacuum vector (multiplicative unit for the Wick product).
    pub fn one() -> Self {
        VPoly::from_mono(NOMono::vacuum(), Rational::one())
    }

    pub fn from_mono(m: NOMono, c: Rational) -> Self {
        let mut p = VPoly::zero();
        p.add_term(m, c);
        p
    }

    /// Single generator symbol as an element.
    pub fn gen(g: GenSym) -> Self {
        VPoly::from_mono(
            NOMono {
                factors: alloc::vec![g],
            },
            Rational::one(),
        )
    }

    /// Builds `c * :g_1 ... g_k:` from factors in any order, sorting with the
    /// Koszul sign; a repeated odd factor gives zero.
    pub fn from_factors(factors: &[GenSym], c: Rational) -> Self {
        let mut m = NOMono::vacuum();
        let mut sign = 1i32;
        for g in factors.iter().rev() {
            match insert_gen(*g, &m) {
                Some((s, next)) => {
                    sign *= s;
                    m = next;
                }
                None => return VPoly::zero(),
            }
        }
        VPoly::from_mono(m, if sign < 0 { -c } else { c })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NOMono, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &NOMono) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Adds `c * m`, dropping the entry if the total cancels to zero.
    pub fn add_term(&mut self, m: NOMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &VPoly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn add(&self, other: &VPoly) -> VPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &VPoly) -> VPoly {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn neg(&self) -> VPoly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> VPoly {
        let mut out = VPoly::zero();
        out.add_scaled(self, c);
        out
    }

    /// Largest factor count among the terms (0 for the zero element).
    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(NOMono::degree).max().unwrap_or(0)
    }

    /// Sum of the terms with exactly `d` factors.
    pub fn degree_component(&self, d: usize) -> VPoly {
        let mut out = VPoly::zero();
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// Doubled conformal weight, when the element is weight-homogeneous.
    pub fn weight2(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(NOMono::weight2);
        let w = it.next()?;
        it.all(|v| v == w).then_some(w)
    }

    /// Parity, when the element is parity-homogeneous
    /// (`false` = even, `true` = odd).
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(NOMono::is_odd);
        let p = it.next()?;
        it.all(|v| v == p).then_some(p)
    }
}

/// Largest `n` for which `a o_n b` can be nonzero on weight grounds.
fn max_pole2(a_w2: i64, b_w2: i64) -> i64 {
    (a_w2 + b_w2) / 2 - 1
}

/// The derivative `d a` (Leibniz over factors).
pub fn derive(a: &VPoly) -> VPoly {
    let mut out = VPoly::zero();
    for (m, c) in &a.terms {
        for i in 0..m.factors.len() {
            let mut rest = m.factors.clone();
            let g = rest.remove(i).derived();
            // The derived factor moves right from slot i; it only crosses
            // factors after i, so cancel insert_gen's count of odd factors
            // in the untouched prefix.
            let prefix_fix = g.is_odd()
                && rest[..i].iter().filter(|h| h.is_odd()).count() % 2 == 1;
            if let Some((sign, nm)) = insert_gen(g, &NOMono { factors: rest }) {
                let sign = if prefix_fix { -sign } else { sign };
                let v = if sign < 0 { -c.clone() } else { c.clone() };
                out.add_term(nm, v);
            }
        }
    }
    out
}

/// `d^k a`.
pub fn derive_n(a: &VPoly, k: u32) -> VPoly {
    let mut out = a.clone();
    for _ in 0..k {
        out = derive(&out);
    }
    out
}

/// The Wick product `:a b:` (the `o_{-1}` circle product).
pub fn wick(a: &VPoly, b: &VPoly) -> VPoly {
    let mut out = VPoly::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            out.add_scaled(&wick_mono(ma, mb), &(ca * cb));
        }
    }
    out
}

/// The circle product `a o_n b` for any `n`.
pub fn circle(a: &VPoly, n: i64, b: &VPoly) -> VPoly {
    if n < 0 {
        let m = (-n - 1) as u64;
        let scaled = derive_n(a, m as u32);
        return wick(&scaled, b).scale(&Rational::from_integer(factorial(m)).recip());
    }
    let mut out = VPoly::zero();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            out.add_scaled(&circle_mono(ma, n, mb), &(ca * cb));
        }
    }
    out
}

/// All non-negative products of `a` and `b`, keyed by the circle index `n`
/// (the coefficient of the order-(n+1) pole). Finitely supported by locality.
pub type OpeTable = BTreeMap<i64, VPoly>;

/// Computes the full positive-pole OPE of `a` with `b`.
pub fn ope_all(a: &VPoly, b: &VPoly) -> OpeTable {
    let mut out = OpeTable::new();
    let (Some(wa), Some(wb)) = (
        a.terms.keys().map(NOMono::weight2).max(),
        b.terms.keys().map(NOMono::weight2).max(),
    ) else {
        return out;
    };
    for n in 0..=max_pole2(wa, wb).max(-1) {
        let p = circle(a, n, b);
        if !p.is_zero() {
            out.insert(n, p);
        }
    }
    out
}

fn wick_mono(a: &NOMono, b: &NOMono) -> VPoly {
    if a.is_vacuum() {
        return VPoly::from_mono(b.clone(), Rational::one());
    }
    if a.degree() == 1 {
        return match insert_gen(a.factors[0], b) {
            Some((sign, m)) => VPoly::from_mono(m, Rational::from_integer(sign.into())),
            None => VPoly::zero(),
        };
    }
    // a = :g rest:. Quasi-associativity:
    // :(:g A:) b: = :g (:A b:): + sum_{k>=0} 1/(k+1)! *
    //     ( :(d^{k+1} g)(A o_k b): + (-1)^{|g||A|} :(d^{k+1} A)(g o_k b): )
    let g = a.factors[0];
    let rest = NOMono {
        factors: a.factors[1..].to_vec(),
    };
    let koszul = g.is_odd() && rest.is_odd();

    let inner = wick_mono(&rest, b);
    let mut out = VPoly::zero();
    for (m, c) in &inner.terms {
        if let Some((sign, nm)) = insert_gen(g, m) {
            let v = if sign < 0 { -c.clone() } else { c.clone() };
            out.add_term(nm, v);
        }
    }

    let bound = max_pole2(rest.weight2(), b.weight2()).max(max_pole2(g.weight2(), b.weight2()));
    for k in 0..=bound.max(-1) {
        let inv = Rational::from_integer(factorial((k + 1) as u64)).recip();
        let t1 = circle_mono(&rest, k, b);
        if !t1.is_zero() {
            let dg = VPoly::gen(GenSym {
                deriv: g.deriv + (k as u16) + 1,
                ..g
            });
            out.add_scaled(&wick(&dg, &t1), &inv);
        }
        let t2 = circle_gen(&g, k, b);
        if !t2.is_zero() {
            let da = derive_n(
                &VPoly::from_mono(rest.clone(), Rational::one()),
                (k + 1) as u32,
            );
            let inv2 = if koszul { -inv.clone() } else { inv.clone() };
            out.add_scaled(&wick(&da, &t2), &inv2);
        }
    }
    out
}

/// `g o_n b` for a single generator and `n >= 0`: the sum of single
/// contractions with Koszul signs.
fn circle_gen(g: &GenSym, n: i64, b: &NOMono) -> VPoly {
    let mut out = VPoly::zero();
    let mut sign = 1i32;
    for (i, h) in b.factors.iter().enumerate() {
        if let Some(c) = contraction(g, h, n) {
            let mut factors = b.factors.clone();
            factors.remove(i);
            let v = Rational::from_integer(sign.into()) * c;
            out.add_term(NOMono { factors }, v);
        }
        if g.is_odd() && h.is_odd() {
            sign = -sign;
        }
    }
    out
}

fn circle_mono(a: &NOMono, n: i64, b: &NOMono) -> VPoly {
    if n < 0 {
        let m = (-n - 1) as u64;
        let da = derive_n(&VPoly::from_mono(a.clone(), Rational::one()), m as u32);
        let vb = VPoly::from_mono(b.clone(), Rational::one());
        return wick(&da, &vb).scale(&Rational::from_integer(factorial(m)).recip());
    }
    if a.is_vacuum() {
        return VPoly::zero();
    }
    if a.degree() == 1 {
        return circle_gen(&a.factors[0], n, b);
    }
    // a = :g rest:, n >= 0:
    // (:g A:) o_n b = sum_j 1/j! :(d^j g)(A o_{n+j} b):
    //              + (-1)^{|g||A|} sum_j A o_{n-1-j} (g o_j b)
    let g = a.factors[0];
    let rest = NOMono {
        factors: a.factors[1..].to_vec(),
    };
    let koszul = g.is_odd() && rest.is_odd();
    let rest_vp = VPoly::from_mono(rest.clone(), Rational::one());

    let mut out = VPoly::zero();
    let bound1 = max_pole2(rest.weight2(), b.weight2());
    let mut j = 0i64;
    while n + j <= bound1 {
        let t = circle_mono(&rest, n + j, b);
        if !t.is_zero() {
            let dg = VPoly::gen(GenSym {
                deriv: g.deriv + j as u16,
                ..g
            });
            let inv = Rational::from_integer(factorial(j as u64)).recip();
            out.add_scaled(&wick(&dg, &t), &inv);
        }
        j += 1;
    }
    let bound2 = max_pole2(g.weight2(), b.weight2());
    for j in 0..=bound2.max(-1) {
        let t = circle_gen(&g, j, b);
        if !t.is_zero() {
            let term = circle(&rest_vp, n - 1 - j, &t);
            let c = if koszul {
                -Rational::one()
            } else {
                Rational::one()
            };
            out.add_scaled(&term, &c);
        }
    }
    out
}

impl fmt::Display for GenSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Beta => write!(f, "b{}[{}]", self.color, self.deriv),
            FieldKind::Gamma => write!(f, "g{}[{}]", self.color, self.deriv),
            FieldKind::Phi if self.color == 1 => write!(f, "f[{}]", self.deriv),
            FieldKind::Phi => write!(f, "f{}[{}]", self.color, self.deriv),
        }
    }
}

impl fmt::Display for NOMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_vacuum() {
            return write!(f, "1");
        }
        write!(f, ":")?;
        for (i, g) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ":")
    }
}

impl fmt::Display for VPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff = format_coeff(&mag);
            if m.is_vacuum() {
                write!(f, "{mag}")?;
            } else if let Some(cs) = coeff {
                write!(f, "{cs} * {m}")?;
            } else {
                write!(f, "{m}")?;
            }
        }
        Ok(())
    }
}

/// `None` when the coefficient is 1 and can be omitted before a monomial.
fn format_coeff(c: &Rational) -> Option<String> {
    use alloc::string::ToString;
    if c.is_one() {
        None
    } else {
        Some(c.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{frac, rat};

    fn beta(d: u16) -> VPoly {
        VPoly::gen(GenSym::beta(1, d))
    }
    fn gamma(d: u16) -> VPoly {
        VPoly::gen(GenSym::gamma(1, d))
    }
    fn phi(d: u16) -> VPoly {
        VPoly::gen(GenSym::phi(1, d))
    }

    /// Conformal vector of S(1): (1/2)(:b dg: - :db g:).
    fn sp1_l() -> VPoly {
        let t1 = VPoly::from_factors(&[GenSym::beta(1, 0), GenSym::gamma(1, 1)], frac(1, 2));
        let t2 = VPoly::from_factors(&[GenSym::beta(1, 1), GenSym::gamma(1, 0)], frac(-1, 2));
        t1.add(&t2)
    }

    #[test]
    fn generator_opes() {
        assert_eq!(circle(&beta(0), 0, &gamma(0)), VPoly::one());
        assert_eq!(circle(&gamma(0), 0, &beta(0)), VPoly::one().neg());
        assert_eq!(circle(&phi(0), 0, &phi(0)), VPoly::one());
        assert!(circle(&beta(0), 0, &beta(0)).is_zero());
        assert!(circle(&gamma(0), 1, &beta(0)).is_zero());
        // d^k beta o_{k+l} d^l gamma = (-1)^k (k+l)!
        assert_eq!(
            circle(&beta(2), 3, &gamma(1)),
            VPoly::one().scale(&rat(6)) // (-1)^2 * 3!
        );
        assert_eq!(circle(&beta(1), 2, &gamma(1)), VPoly::one().scale(&rat(-2)));
    }

    #[test]
    fn unit_laws() {
        let a = wick(&beta(0), &gamma(3));
        assert_eq!(wick(&VPoly::one(), &a), a);
        assert_eq!(wick(&a, &VPoly::one()), a);
        // a o_{-2} 1 = da
        assert_eq!(circle(&a, -2, &VPoly::one()), derive(&a));
    }

    #[test]
    fn derive_leibniz() {
        let m = VPoly::from_factors(&[GenSym::beta(1, 0), GenSym::gamma(1, 0)], rat(1));
        let expect = VPoly::from_factors(&[GenSym::beta(1, 1), GenSym::gamma(1, 0)], rat(1)).add(
            &VPoly::from_factors(&[GenSym::beta(1, 0), GenSym::gamma(1, 1)], rat(1)),
        );
        assert_eq!(derive(&m), expect);
        assert!(derive(&VPoly::one()).is_zero());
    }

    #[test]
    fn odd_squares_vanish() {
        assert!(VPoly::from_factors(&[GenSym::phi(1, 0), GenSym::phi(1, 0)], rat(1)).is_zero());
        // reordering odd factors flips the sign
        let ab = VPoly::from_factors(&[GenSym::phi(1, 0), GenSym::phi(1, 1)], rat(1));
        let ba = VPoly::from_factors(&[GenSym::phi(1, 1), GenSym::phi(1, 0)], rat(1));
        assert_eq!(ab, ba.neg());
    }

    #[test]
    fn central_charge_sp1() {
        // L o_3 L = c/2 with c = -1 for S(1)
        let l = sp1_l();
        assert_eq!(circle(&l, 3, &l), VPoly::one().scale(&frac(-1, 2)));
        assert!(circle(&l, 4, &l).is_zero());
        assert!(circle(&l, 5, &l).is_zero());
    }

    #[test]
    fn central_charge_f1() {
        // L = -(1/2):f df: has c = 1/2
        let l = VPoly::from_factors(&[GenSym::phi(1, 0), GenSym::phi(1, 1)], frac(-1, 2));
        assert_eq!(circle(&l, 3, &l), VPoly::one().scale(&frac(1, 4)));
    }

    #[test]
    fn virasoro_primaries() {
        let l = sp1_l();
        // beta is primary of weight 1/2: L o_0 b = db, L o_1 b = (1/2) b
        assert_eq!(circle(&l, 0, &beta(0)), beta(1));
        assert_eq!(circle(&l, 1, &beta(0)), beta(0).scale(&frac(1, 2)));
        assert!(circle(&l, 2, &beta(0)).is_zero());
        assert_eq!(circle(&l, 1, &gamma(0)), gamma(0).scale(&frac(1, 2)));
        // L o_1 L = 2L, L o_0 L = dL
        assert_eq!(circle(&l, 1, &l), l.scale(&rat(2)));
        assert_eq!(circle(&l, 0, &l), derive(&l));
    }

    #[test]
    fn quasi_commutativity() {
        // :ab: - (-1)^{|a||b|} :ba: = sum_{k>=0} (-1)^k d^{k+1}(a o_k b)/(k+1)!
        let cases = [
            (gamma(0), beta(0)),
            (beta(1), gamma(0)),
            (wick(&beta(0), &beta(0)), gamma(1)),
            (phi(0), phi(1)),
            (phi(2), wick(&phi(0), &phi(1))),
        ];
        for (a, b) in cases {
            let sign = a.parity().unwrap() && b.parity().unwrap();
            let lhs = if sign {
                wick(&a, &b).add(&wick(&b, &a))
            } else {
                wick(&a, &b).sub(&wick(&b, &a))
            };
            let mut rhs = VPoly::zero();
            let bound = max_pole2(a.weight2().unwrap(), b.weight2().unwrap());
            for k in 0..=bound.max(-1) {
                let c = rat(if k % 2 == 0 { 1 } else { -1 })
                    * Rational::from_integer(factorial((k + 1) as u64)).recip();
                rhs.add_scaled(&derive_n(&circle(&a, k, &b), (k + 1) as u32), &c);
            }
            assert_eq!(lhs, rhs, "quasi-commutativity failed");
        }
    }

    #[test]
    fn skew_symmetry_spot() {
        // a o_n b = (-1)^{|a||b|} sum_k (-1)^{n+k+1} d^k (b o_{n+k} a) / k!
        let a = wick(&beta(0), &gamma(1));
        let b = wick(&beta(1), &gamma(0));
        for n in 0..=3 {
            let lhs = circle(&a, n, &b);
            let mut rhs = VPoly::zero();
            for k in 0..=6 {
                let t = circle(&b, n + k, &a);
                if t.is_zero() {
                    continue;
                }
                let sgn = if (n + k + 1) % 2 == 0 { 1 } else { -1 };
                let c = rat(sgn) * Rational::from_integer(factorial(k as u64)).recip();
                rhs.add_scaled(&derive_n(&t, k as u32), &c);
            }
            assert_eq!(lhs, rhs, "skew symmetry failed at n={n}");
        }
    }

    #[test]
    fn ope_table_locality() {
        assert!(ope_all(&beta(0), &beta(0)).is_empty());
        // disjoint colors never interact
        let a = wick(&beta(0), &gamma(0));
        let b = VPoly::gen(GenSym::beta(2, 0));
        assert!(ope_all(&a, &b).is_empty());
        let table = ope_all(&sp1_l(), &beta(0));
        assert_eq!(table.keys().copied().collect::<Vec<_>>(), alloc::vec![0, 1]);
    }

    #[test]
    fn weight_additivity() {
        let a = wick(&beta(0), &gamma(1));
        let b = wick(&beta(1), &gamma(0));
        for n in -3..=2 {
            let p = circle(&a, n, &b);
            if let Some(w) = p.weight2() {
                assert_eq!(w, a.weight2().unwrap() + b.weight2().unwrap() - 2 * (n + 1));
            }
        }
    }

    #[test]
    fn display_roundtrip_shape() {
        use alloc::string::ToString;
        let p = VPoly::from_factors(&[GenSym::beta(1, 0), GenSym::gamma(1, 1)], frac(1, 2));
        assert_eq!(p.to_string(), "1/2 * :b1[0] g1[1]:");
    }
}
