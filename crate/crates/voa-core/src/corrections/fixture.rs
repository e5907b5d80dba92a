//! The embedded weight-16 relation of the rank-1 orthosymplectic family,
//! as explicit coefficient tables.
//!
//! The relation is the sum of four graded components of word lengths 4, 3,
//! 2, 1. Words are *ordered* (right-nested Wick products as written); they
//! are not re-sorted, since reordering factors changes the element by
//! lower-degree terms. The degree-1 component is a single `Om_{0,15}` term
//! plus a second derivative of a combination of weight-14 generators.

#![allow(clippy::type_complexity)]

use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::arith::{frac, Rational};
use crate::wbasis::{derive_n, OmPair, WPoly};

use super::RelTerm;

/// Degree-4 component: the normal ordering of the minimal classical
/// relation.
const P8: &[(i64, i64, [(u16, u16); 4])] = &[
    (1, 1, [(0, 1), (0, 1), (2, 3), (2, 3)]),
    (1, 1, [(0, 2), (0, 2), (1, 3), (1, 3)]),
    (1, 1, [(0, 3), (0, 3), (1, 2), (1, 2)]),
    (-2, 1, [(0, 2), (0, 3), (1, 2), (1, 3)]),
    (2, 1, [(0, 1), (0, 3), (1, 2), (2, 3)]),
    (-2, 1, [(0, 1), (0, 2), (1, 3), (2, 3)]),
];

/// Degree-3 component.
const P6: &[(i64, i64, [(u16, u16); 3])] = &[
    (-13, 84, [(0, 1), (0, 1), (2, 9)]),
    (11, 60, [(0, 1), (0, 1), (3, 8)]),
    (-2, 35, [(0, 1), (0, 2), (2, 8)]),
    (1, 12, [(0, 1), (0, 2), (3, 7)]),
    (11, 30, [(0, 1), (0, 3), (2, 7)]),
    (-9, 20, [(0, 1), (0, 3), (3, 6)]),
    (-11, 28, [(0, 1), (1, 2), (2, 7)]),
    (1, 2, [(0, 1), (1, 2), (3, 6)]),
    (1, 12, [(0, 1), (1, 3), (2, 6)]),
    (-2, 15, [(0, 1), (1, 3), (3, 5)]),
    (-5, 12, [(0, 1), (2, 3), (1, 6)]),
    (-1, 5, [(0, 1), (2, 3), (2, 5)]),
    (11, 12, [(0, 1), (2, 3), (3, 4)]),
    (1, 35, [(0, 2), (0, 2), (1, 8)]),
    (-1, 15, [(0, 2), (0, 2), (3, 6)]),
    (-11, 30, [(0, 2), (0, 3), (1, 7)]),
    (7, 12, [(0, 2), (0, 3), (3, 5)]),
    (11, 28, [(0, 2), (1, 2), (1, 7)]),
    (-7, 10, [(0, 2), (1, 2), (3, 5)]),
    (1, 3, [(0, 2), (1, 3), (1, 6)]),
    (-1, 4, [(0, 2), (1, 3), (2, 5)]),
    (-1, 12, [(0, 2), (1, 3), (3, 4)]),
    (9, 20, [(0, 2), (2, 3), (1, 5)]),
    (9, 40, [(0, 3), (0, 3), (1, 6)]),
    (-7, 24, [(0, 3), (0, 3), (2, 5)]),
    (-11, 12, [(0, 3), (1, 2), (1, 6)]),
    (19, 20, [(0, 3), (1, 2), (2, 5)]),
    (1, 3, [(0, 3), (1, 2), (3, 4)]),
    (-11, 56, [(1, 2), (1, 2), (0, 7)]),
    (5, 8, [(1, 2), (1, 2), (3, 4)]),
    (2, 15, [(0, 3), (1, 3), (1, 5)]),
    (-1, 4, [(0, 3), (1, 3), (2, 4)]),
    (1, 12, [(1, 2), (1, 3), (0, 6)]),
    (-7, 12, [(0, 3), (1, 4), (2, 3)]),
    (5, 12, [(0, 3), (2, 3), (2, 3)]),
    (-9, 20, [(1, 2), (0, 5), (2, 3)]),
    (-3, 4, [(1, 2), (2, 3), (2, 3)]),
    (7, 12, [(0, 4), (1, 3), (2, 3)]),
    (-1, 15, [(1, 3), (1, 3), (0, 5)]),
    (1, 3, [(1, 3), (1, 3), (2, 3)]),
];

/// Degree-2 component.
const P4: &[(i64, i64, [(u16, u16); 2])] = &[
    (19, 432, [(0, 1), (1, 12)]),
    (-113, 6720, [(0, 1), (2, 11)]),
    (-569, 8640, [(0, 1), (3, 10)]),
    (143, 1008, [(0, 1), (4, 9)]),
    (-23, 700, [(0, 1), (5, 8)]),
    (-559, 2016, [(0, 1), (6, 7)]),
    (-151, 20160, [(0, 2), (1, 11)]),
    (-1, 252, [(0, 2), (2, 10)]),
    (-55, 576, [(0, 2), (3, 9)]),
    (1, 420, [(0, 2), (4, 8)]),
    (851, 2400, [(0, 2), (5, 7)]),
    (-713, 6720, [(0, 3), (1, 10)]),
    (-751, 20160, [(0, 3), (2, 9)]),
    (163, 672, [(0, 3), (3, 8)]),
    (-73, 1440, [(0, 3), (4, 7)]),
    (-49, 100, [(0, 3), (5, 6)]),
    (-163, 4032, [(1, 2), (0, 11)]),
    (17, 336, [(1, 2), (1, 10)]),
    (1639, 10080, [(1, 2), (2, 9)]),
    (-227, 2240, [(1, 2), (3, 8)]),
    (-55, 168, [(1, 2), (4, 7)]),
    (7, 32, [(1, 2), (5, 6)]),
    (1, 60, [(0, 4), (2, 8)]),
    (-7, 288, [(0, 4), (3, 7)]),
    (467, 60480, [(1, 3), (0, 10)]),
    (-13, 756, [(1, 3), (1, 9)]),
    (31, 2240, [(1, 3), (2, 8)]),
    (47, 1260, [(1, 3), (3, 7)]),
    (-1, 32, [(1, 3), (4, 6)]),
    (-1, 525, [(0, 5), (1, 8)]),
    (-33, 400, [(0, 5), (2, 7)]),
    (761, 7200, [(0, 5), (3, 6)]),
    (11, 96, [(1, 4), (2, 7)]),
    (-7, 48, [(1, 4), (3, 6)]),
    (-27, 448, [(2, 3), (0, 9)]),
    (131, 2240, [(2, 3), (1, 8)]),
    (-31, 84, [(2, 3), (2, 7)]),
    (37, 72, [(2, 3), (3, 6)]),
    (-89, 480, [(2, 3), (4, 5)]),
    (11, 720, [(0, 6), (1, 7)]),
    (-7, 288, [(0, 6), (3, 5)]),
    (-11, 420, [(1, 5), (1, 7)]),
    (-3, 160, [(1, 5), (2, 6)]),
    (23, 300, [(1, 5), (3, 5)]),
    (11, 224, [(2, 4), (1, 7)]),
    (-7, 80, [(2, 4), (3, 5)]),
    (-99, 2240, [(0, 7), (1, 6)]),
    (11, 192, [(0, 7), (2, 5)]),
    (31, 288, [(1, 6), (1, 6)]),
    (-109, 480, [(1, 6), (2, 5)]),
    (35, 576, [(1, 6), (3, 4)]),
    (151, 800, [(2, 5), (2, 5)]),
    (-87, 320, [(2, 5), (3, 4)]),
    (37, 288, [(3, 4), (3, 4)]),
];

/// Leading degree-1 term.
const P2_TOP: (i64, i64, (u16, u16)) = (109, 56000, (0, 15));

/// Degree-1 terms under an overall second derivative.
const P2_D2: &[(i64, i64, (u16, u16))] = &[
    (36613, 26208000, (0, 13)),
    (63901699, 6054048000, (1, 12)),
    (-293340107, 12108096000, (2, 11)),
    (27769129, 1345344000, (3, 10)),
    (-33135533, 403603200, (4, 9)),
    (286002151, 1210809600, (5, 8)),
    (-195930023, 605404800, (6, 7)),
];

/// Accessor for the embedded relation tables.
pub struct AppendixFixture;

/// The embedded weight-16 relation.
pub fn appendix_fixture() -> AppendixFixture {
    AppendixFixture
}

impl AppendixFixture {
    /// Graded components as `(word length, terms)`, longest first.
    pub fn components(&self) -> Vec<(usize, Vec<RelTerm>)> {
        vec![
            (4, table_terms(P8)),
            (3, table_terms(P6)),
            (2, table_terms(P4)),
            (1, self.degree1_terms()),
        ]
    }

    /// The degree-1 component with the second derivative expanded into
    /// canonical generators.
    pub fn degree1_terms(&self) -> Vec<RelTerm> {
        let (n, d, (a, b)) = P2_TOP;
        let mut p = WPoly::omgen(a, b, 0).scale(&frac(n, d));
        let mut under = WPoly::zero();
        for &(n, d, (a, b)) in P2_D2 {
            under.add_scaled(&WPoly::omgen(a, b, 0), &frac(n, d));
        }
        p.add_scaled(&derive_n(&under, 2), &Rational::one());
        p.terms()
            .map(|(w, c)| (c.clone(), w.clone()))
            .collect()
    }

    /// Every term of the full relation, ordered words as printed.
    pub fn all_terms(&self) -> Vec<RelTerm> {
        self.components()
            .into_iter()
            .flat_map(|(_, t)| t)
            .collect()
    }
}

fn table_terms<const K: usize>(table: &[(i64, i64, [(u16, u16); K])]) -> Vec<RelTerm> {
    table
        .iter()
        .map(|&(n, d, pairs)| {
            let word: Vec<OmPair> = pairs
                .iter()
                .map(|&(a, b)| {
                    let (sign, p) = OmPair::new(a, b).expect("a < b in fixture");
                    debug_assert_eq!(sign, 1);
                    p
                })
                .collect();
            (frac(n, d), word)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wbasis::word_weight;

    #[test]
    fn fixture_shape() {
        let f = appendix_fixture();
        let comps = f.components();
        assert_eq!(comps[0].1.len(), 6);
        assert_eq!(comps[1].1.len(), 40);
        assert_eq!(comps[2].1.len(), 54);
        // every word is weight-16 homogeneous
        for (len, terms) in comps {
            for (_, w) in &terms {
                assert_eq!(w.len(), len);
                assert_eq!(word_weight(w), 16);
            }
        }
    }

    #[test]
    fn spot_coefficients() {
        // degree-3 table: :Om_{0,1} Om_{0,1} Om_{2,9}: carries -13/84
        let f = appendix_fixture();
        let comps = f.components();
        let p6 = &comps[1].1;
        let target: Vec<OmPair> = [(0, 1), (0, 1), (2, 9)]
            .iter()
            .map(|&(a, b)| OmPair { a, b })
            .collect();
        let c = p6
            .iter()
            .find(|(_, w)| *w == target)
            .map(|(c, _)| c.clone())
            .unwrap();
        assert_eq!(c, frac(-13, 84));
        // degree-1: the d^2 block contributes 36613/26208000 on Om_{0,13}
        assert_eq!(P2_D2[0], (36613, 26208000, (0, 13)));
    }
}
