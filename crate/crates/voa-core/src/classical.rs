//! Classical invariant-theory layer: commutative polynomials in the
//! antisymmetric indeterminates `Q_{a,b}`, the relation generators
//! (Pfaffians, determinant analogues, and the minimal orthosymplectic
//! relation), and a brute-force truncated (super)symmetric-algebra oracle
//! for kernel membership.
//!
//! The invariant rings in question are generated by quadratics `q_{a,b}`
//! with `q_{a,b} = -q_{b,a}`:
//!
//! ```text
//!   Sp:  q_{a,b} = (1/2) sum_i (x_{i,a} y_{i,b} - x_{i,b} y_{i,a})   (x, y even)
//!   O:   q_{a,b} = (1/2) sum_i  x_{i,a} x_{i,b}                      (x odd)
//!   Osp: q_{a,b} = (1/2) sum_i (x_{i,a} y_{i,b} - x_{i,b} y_{i,a})
//!                - (1/2) z_a z_b                                     (z odd)
//! ```
//!
//! [`eval_classical`] substitutes these images inside a polynomial ring
//! truncated at a finite derivative depth, which suffices because every
//! identity tested involves finitely many indices.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::arith::{frac, rat, Rational};
use crate::wbasis::{Family, FamilyKind, OmPair};

/// Commutative monomial in the `Q_{a,b}`: a sorted multiset of normalized
/// index pairs.
pub type QMono = Vec<OmPair>;

/// Sparse commutative polynomial in the indeterminates `Q_{a,b}`.
///
/// `Q_{a,a} = 0` and `Q_{b,a} = -Q_{a,b}` are applied at construction.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QPoly {
    terms: BTreeMap<QMono, Rational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        let mut p = QPoly::zero();
        p.add_term(Vec::new(), Rational::one());
        p
    }

    /// The indeterminate `Q_{a,b}` (normalized; zero when `a == b`).
    pub fn q(a: u16, b: u16) -> Self {
        let mut p = QPoly::zero();
        if let Some((sign, pair)) = OmPair::new(a, b) {
            p.add_term(vec![pair], rat(sign as i64));
        }
        p
    }

    /// Builds `c * Q_{a1,b1} ... Q_{ak,bk}` from pairs in any order.
    pub fn from_pairs(pairs: &[(u16, u16)], c: Rational) -> Self {
        let mut mono = Vec::with_capacity(pairs.len());
        let mut sign = 1i64;
        for &(a, b) in pairs {
            match OmPair::new(a, b) {
                Some((s, p)) => {
                    sign *= s as i64;
                    mono.push(p);
                }
                None => return QPoly::zero(),
            }
        }
        mono.sort();
        let mut p = QPoly::zero();
        p.add_term(mono, c * rat(sign));
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMono, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &QMono) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree (largest monomial length).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: QMono, c: Rational) {
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

    pub fn add_scaled(&mut self, other: &QPoly, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::one());
        out
    }

    pub fn sub(&self, other: &QPoly) -> QPoly {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    pub fn scale(&self, c: &Rational) -> QPoly {
        let mut out = QPoly::zero();
        out.add_scaled(self, c);
        out
    }

    /// Commutative product.
    pub fn mul(&self, other: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                m.sort();
                out.add_term(m, ca * cb);
            }
        }
        out
    }

    /// Largest index appearing in any pair (for choosing a truncation).
    pub fn max_index(&self) -> u16 {
        self.terms
            .keys()
            .flat_map(|m| m.iter().map(|p| p.b))
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for QPoly {
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
            if m.is_empty() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag} * ")?;
            }
            for p in m {
                write!(f, "Q({},{})", p.a, p.b)?;
            }
        }
        Ok(())
    }
}

/// The degree-(n+1) Pfaffian `p_I` on `2n + 2` pairwise distinct indices,
/// built by the expansion along the first slot:
///
/// ```text
///   p_I = sum_{r=1}^{2n+1} (-1)^{r+1} Q_{i_0,i_r} p_{I_r}
/// ```
///
/// with `I_r` obtained by deleting slots 0 and r, and base case
/// `p_{(i0,i1,i2,i3)} = Q_{i0,i1}Q_{i2,i3} - Q_{i0,i2}Q_{i1,i3} + Q_{i0,i3}Q_{i1,i2}`.
///
/// Panics if `indices` has a repeated entry or the wrong length.
pub fn pfaffian(indices: &[u16], n: usize) -> QPoly {
    assert_eq!(indices.len(), 2 * n + 2, "pfaffian needs 2n+2 indices");
    for (i, a) in indices.iter().enumerate() {
        assert!(
            !indices[i + 1..].contains(a),
            "pfaffian indices must be pairwise distinct"
        );
    }
    pfaffian_rec(indices)
}

fn pfaffian_rec(indices: &[u16]) -> QPoly {
    if indices.len() == 2 {
        return QPoly::q(indices[0], indices[1]);
    }
    let mut out = QPoly::zero();
    for r in 1..indices.len() {
        let head = QPoly::q(indices[0], indices[r]);
        let rest: Vec<u16> = indices[1..]
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != r - 1)
            .map(|(_, &v)| v)
            .collect();
        let sub = pfaffian_rec(&rest);
        let term = head.mul(&sub);
        if r % 2 == 1 {
            out.add_scaled(&term, &Rational::one());
        } else {
            out.add_scaled(&term, &-Rational::one());
        }
    }
    out
}

/// The degree-(n+1) determinant analogue `d_{I,J}` on weakly increasing
/// lists of length `n + 1`, built with all plus signs:
///
/// ```text
///   d_{I,J} = sum_{r=0}^{n} Q_{i_r,j_0} d_{I_r,J'}
/// ```
///
/// with base case `d = Q_{i0,j0}Q_{i1,j1} + Q_{i1,j0}Q_{i0,j1}`. The result
/// is the zero polynomial when an index repeats more than `n + 1` times
/// across `I` and `J`.
pub fn det_analog(i_list: &[u16], j_list: &[u16], n: usize) -> QPoly {
    assert_eq!(i_list.len(), n + 1, "det_analog needs n+1 row indices");
    assert_eq!(j_list.len(), n + 1, "det_analog needs n+1 column indices");
    det_rec(i_list, j_list)
}

fn det_rec(i_list: &[u16], j_list: &[u16]) -> QPoly {
    if i_list.len() == 1 {
        return QPoly::q(i_list[0], j_list[0]);
    }
    let mut out = QPoly::zero();
    for r in 0..i_list.len() {
        let head = QPoly::q(i_list[r], j_list[0]);
        let rest_i: Vec<u16> = i_list
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != r)
            .map(|(_, &v)| v)
            .collect();
        let sub = det_rec(&rest_i, &j_list[1..]);
        out.add_scaled(&head.mul(&sub), &Rational::one());
    }
    out
}

/// The minimal orthosymplectic relation (rank 1): degree 4, weight 16.
pub fn sergeev_minimal() -> QPoly {
    let mut out = QPoly::zero();
    let terms: [(&[(u16, u16)], i64); 6] = [
        (&[(0, 1), (0, 1), (2, 3), (2, 3)], 1),
        (&[(0, 2), (0, 2), (1, 3), (1, 3)], 1),
        (&[(0, 3), (0, 3), (1, 2), (1, 2)], 1),
        (&[(0, 2), (0, 3), (1, 2), (1, 3)], -2),
        (&[(0, 1), (0, 3), (1, 2), (2, 3)], 2),
        (&[(0, 1), (0, 2), (1, 3), (2, 3)], -2),
    ];
    for (pairs, c) in terms {
        out.add_scaled(&QPoly::from_pairs(pairs, rat(1)), &rat(c));
    }
    out
}

/// A variable of the truncated classical algebra.
///
/// `X`/`Y` are the even symplectic coordinates (odd for the orthogonal
/// family, where only `X` occurs); `Z` is the odd orthosymplectic
/// coordinate. Encoded as (class, color, depth) with the derived order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClassicalVar {
    X(u16, u16),
    Y(u16, u16),
    Z(u16),
}

/// Monomial of the truncated (super)symmetric algebra: even variables with
/// exponents, odd variables as a strictly sorted list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct SMono {
    pub even: Vec<(ClassicalVar, u32)>,
    pub odd: Vec<ClassicalVar>,
}

/// Element of the truncated (super)symmetric algebra.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SPoly {
    terms: BTreeMap<SMono, Rational>,
}

impl SPoly {
    pub fn zero() -> Self {
        SPoly::default()
    }

    pub fn one() -> Self {
        let mut p = SPoly::zero();
        p.add_term(SMono::default(), Rational::one());
        p
    }

    /// A single variable, routed to the even or odd part by `odd`.
    pub fn var(v: ClassicalVar, odd: bool) -> Self {
        let mut p = SPoly::zero();
        if odd {
            p.add_term(
                SMono {
                    even: Vec::new(),
                    odd: vec![v],
                },
                Rational::one(),
            );
        } else {
            p.add_term(
                SMono {
                    even: vec![(v, 1)],
                    odd: Vec::new(),
                },
                Rational::one(),
            );
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: SMono, c: Rational) {
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

    pub fn add_scaled(&mut self, other: &SPoly, c: &Rational) {
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    /// Supercommutative product: even exponents merge, odd lists merge with
    /// the sign of the interleaving permutation; a repeated odd variable
    /// kills the term.
    pub fn mul(&self, other: &SPoly) -> SPoly {
        let mut out = SPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = mul_mono(ma, mb) {
                    let c = ca * cb * rat(sign);
                    out.add_term(m, c);
                }
            }
        }
        out
    }
}

fn mul_mono(a: &SMono, b: &SMono) -> Option<(i64, SMono)> {
    // merge odd lists, counting inversions
    let mut odd = Vec::with_capacity(a.odd.len() + b.odd.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut inversions = 0usize;
    while i < a.odd.len() || j < b.odd.len() {
        match (a.odd.get(i), b.odd.get(j)) {
            (Some(x), Some(y)) if x == y => return None,
            (Some(x), Some(y)) if x < y => {
                odd.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                odd.push(*y);
                inversions += a.odd.len() - i;
                j += 1;
            }
            (Some(x), None) => {
                odd.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                odd.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    // merge even exponent lists
    let mut even: BTreeMap<ClassicalVar, u32> = a.even.iter().cloned().collect();
    for (v, e) in &b.even {
        *even.entry(*v).or_insert(0) += e;
    }
    let sign = if inversions % 2 == 1 { -1 } else { 1 };
    Some((
        sign,
        SMono {
            even: even.into_iter().collect(),
            odd,
        },
    ))
}

/// Image of `q_{a,b}` in the truncated classical algebra of `family`.
pub fn q_image(family: Family, a: u16, b: u16) -> SPoly {
    let mut out = SPoly::zero();
    let half = frac(1, 2);
    match family.kind {
        FamilyKind::Sp | FamilyKind::Osp => {
            for i in 1..=family.n {
                let t1 = SPoly::var(ClassicalVar::X(i, a), false)
                    .mul(&SPoly::var(ClassicalVar::Y(i, b), false));
                let t2 = SPoly::var(ClassicalVar::X(i, b), false)
                    .mul(&SPoly::var(ClassicalVar::Y(i, a), false));
                out.add_scaled(&t1, &half);
                out.add_scaled(&t2, &-half.clone());
            }
            if family.kind == FamilyKind::Osp {
                let zz =
                    SPoly::var(ClassicalVar::Z(a), true).mul(&SPoly::var(ClassicalVar::Z(b), true));
                out.add_scaled(&zz, &-half);
            }
        }
        FamilyKind::O => {
            for i in 1..=family.n {
                let xx = SPoly::var(ClassicalVar::X(i, a), true)
                    .mul(&SPoly::var(ClassicalVar::X(i, b), true));
                out.add_scaled(&xx, &half);
            }
        }
    }
    out
}

/// Evaluates a `Q`-polynomial in the truncated classical algebra by
/// substituting `q_{a,b}` for every pair. `k_max` must bound every index
/// appearing in `p` (it only documents the truncation; indices themselves
/// drive the variables used).
pub fn eval_classical(p: &QPoly, family: Family, k_max: u16) -> SPoly {
    assert!(p.max_index() <= k_max, "index exceeds truncation bound");
    let mut cache: BTreeMap<OmPair, SPoly> = BTreeMap::new();
    let mut out = SPoly::zero();
    for (mono, c) in &p.terms {
        let mut acc = SPoly::one();
        for pair in mono {
            let img = cache
                .entry(*pair)
                .or_insert_with(|| q_image(family, pair.a, pair.b));
            acc = acc.mul(img);
        }
        out.add_scaled(&acc, c);
    }
    out
}
