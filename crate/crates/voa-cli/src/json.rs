//! JSON mirrors of the engine's values. Rationals serialize as `p/q`
//! strings (or `p` when the denominator is 1); term lists follow the
//! engine's canonical ordering, so output is stable across runs.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use voa_core::arith::Rational;
use voa_core::corrections::{Decoupling, RelTerm, RelationResult};
use voa_core::freefield::{FieldKind, OpeTable, VPoly};
use voa_core::wbasis::{Family, FamilyKind, OmPair, WPoly};

/// One monomial of a free-field element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VTermDoc {
    pub coeff: String,
    pub factors: Vec<FieldFactorDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldFactorDoc {
    pub kind: String,
    pub color: u16,
    pub deriv: u16,
}

/// One word of a generator-layer element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WTermDoc {
    pub coeff: String,
    pub factors: Vec<PairDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairDoc {
    pub a: u16,
    pub b: u16,
}

/// Serialized quantum-corrected relation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationDoc {
    pub family: String,
    pub n: u16,
    /// Index data: one list for the symplectic/orthosymplectic families,
    /// two (rows, columns) for the orthogonal one.
    pub indices: Vec<Vec<u64>>,
    pub weight: i64,
    pub by_degree: BTreeMap<usize, Vec<WTermDoc>>,
    pub remainder: Option<String>,
    pub kernel_ok: bool,
}

/// Serialized decoupling relation `w^m = expression`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecouplingDoc {
    pub family: String,
    pub n: u16,
    pub m: u16,
    pub expression: Vec<DecouplingTermDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecouplingTermDoc {
    pub coeff: String,
    pub factors: Vec<WFactorDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WFactorDoc {
    pub m: u16,
    pub deriv: u32,
}

pub fn family_name(f: Family) -> String {
    let kind = match f.kind {
        FamilyKind::Sp => "sp",
        FamilyKind::O => "o",
        FamilyKind::Osp => "osp",
    };
    format!("{kind}({})", f.n)
}

pub fn vpoly_doc(p: &VPoly) -> Vec<VTermDoc> {
    p.terms()
        .map(|(m, c)| VTermDoc {
            coeff: c.to_string(),
            factors: m
                .factors()
                .iter()
                .map(|g| FieldFactorDoc {
                    kind: match g.kind {
                        FieldKind::Beta => "beta".into(),
                        FieldKind::Gamma => "gamma".into(),
                        FieldKind::Phi => "phi".into(),
                    },
                    color: g.color,
                    deriv: g.deriv,
                })
                .collect(),
        })
        .collect()
}

pub fn wpoly_doc(p: &WPoly) -> Vec<WTermDoc> {
    p.terms()
        .map(|(w, c)| WTermDoc {
            coeff: c.to_string(),
            factors: w.iter().map(|p| PairDoc { a: p.a, b: p.b }).collect(),
        })
        .collect()
}

pub fn ope_doc(t: &OpeTable) -> BTreeMap<i64, Vec<VTermDoc>> {
    t.iter().map(|(n, p)| (*n, vpoly_doc(p))).collect()
}

fn terms_doc(terms: &[RelTerm]) -> Vec<WTermDoc> {
    terms
        .iter()
        .map(|(c, w)| WTermDoc {
            coeff: c.to_string(),
            factors: w.iter().map(|p| PairDoc { a: p.a, b: p.b }).collect(),
        })
        .collect()
}

pub fn relation_doc(r: &RelationResult, indices: Vec<Vec<u64>>) -> RelationDoc {
    RelationDoc {
        family: family_name(r.family),
        n: r.family.n,
        indices,
        weight: r.weight,
        by_degree: r
            .by_degree()
            .into_iter()
            .map(|(d, t)| (d, terms_doc(&t)))
            .collect(),
        remainder: r.remainder.as_ref().map(|c| c.to_string()),
        kernel_ok: r.kernel_ok,
    }
}

/// Rebuilds the in-memory relation from its JSON document.
pub fn relation_from_doc(doc: &RelationDoc) -> Result<RelationResult, String> {
    let family = parse_family(&doc.family)?;
    let mut terms = Vec::new();
    for list in doc.by_degree.values() {
        for t in list {
            let c = Rational::from_str(&t.coeff).map_err(|e| format!("bad coeff: {e}"))?;
            let word: Vec<OmPair> = t
                .factors
                .iter()
                .map(|p| {
                    OmPair::new(p.a, p.b)
                        .filter(|(s, _)| *s == 1)
                        .map(|(_, p)| p)
                        .ok_or_else(|| format!("bad pair ({}, {})", p.a, p.b))
                })
                .collect::<Result<_, _>>()?;
            terms.push((c, word));
        }
    }
    let remainder = doc
        .remainder
        .as_ref()
        .map(|s| Rational::from_str(s).map_err(|e| format!("bad remainder: {e}")))
        .transpose()?;
    Ok(RelationResult {
        family,
        weight: doc.weight,
        terms,
        remainder,
        kernel_ok: doc.kernel_ok,
    })
}

pub fn decoupling_doc(d: &Decoupling) -> DecouplingDoc {
    DecouplingDoc {
        family: family_name(d.family),
        n: d.family.n,
        m: d.m,
        expression: d
            .expression
            .iter()
            .map(|(c, w)| DecouplingTermDoc {
                coeff: c.to_string(),
                factors: w.iter().map(|&(m, k)| WFactorDoc { m, deriv: k }).collect(),
            })
            .collect(),
    }
}

/// Parses `sp(2)`, `o(1)`, `osp(1)` or the bare kind names used by flags.
pub fn parse_family(s: &str) -> Result<Family, String> {
    let (kind, n) = match s.find('(') {
        Some(i) => {
            let n = s[i + 1..]
                .trim_end_matches(')')
                .parse::<u16>()
                .map_err(|_| format!("bad family rank in {s:?}"))?;
            (&s[..i], n)
        }
        None => (s, 1),
    };
    match kind {
        "sp" => Ok(Family::sp(n)),
        "o" => Ok(Family::o(n)),
        "osp" => Ok(Family::osp(n)),
        _ => Err(format!("unknown family {s:?} (expected sp, o, or osp)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use voa_core::classical::pfaffian;
    use voa_core::corrections::build_relation;

    #[test]
    fn relation_roundtrip() {
        let fam = Family::sp(1);
        let rel = build_relation(fam, &pfaffian(&[0, 1, 2, 3], 1)).unwrap();
        let doc = relation_doc(&rel, vec![vec![0, 1, 2, 3]]);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let parsed: RelationDoc = serde_json::from_str(&text).unwrap();
        let back = relation_from_doc(&parsed).unwrap();
        assert_eq!(back.weight, rel.weight);
        assert_eq!(back.remainder, rel.remainder);
        // same multiset of terms
        let mut a: Vec<String> = rel.terms.iter().map(|t| format!("{t:?}")).collect();
        let mut b: Vec<String> = back.terms.iter().map(|t| format!("{t:?}")).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn family_names() {
        assert_eq!(parse_family("sp(2)").unwrap(), Family::sp(2));
        assert_eq!(parse_family("o(1)").unwrap(), Family::o(1));
        assert_eq!(parse_family("osp").unwrap(), Family::osp(1));
        assert!(parse_family("su(5)").is_err());
        assert_eq!(family_name(Family::o(2)), "o(2)");
    }

    #[test]
    fn json_output_is_stable() {
        let fam = Family::o(1);
        let rel = build_relation(fam, &voa_core::classical::det_analog(&[0, 0], &[1, 1], 1))
            .unwrap();
        let doc1 = serde_json::to_string(&relation_doc(&rel, vec![vec![0, 0], vec![1, 1]])).unwrap();
        let rel2 = build_relation(fam, &voa_core::classical::det_analog(&[0, 0], &[1, 1], 1))
            .unwrap();
        let doc2 = serde_json::to_string(&relation_doc(&rel2, vec![vec![0, 0], vec![1, 1]])).unwrap();
        assert_eq!(doc1, doc2);
    }
}
