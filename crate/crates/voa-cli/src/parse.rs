//! Parser for the expression grammar shared by the free-field and
//! generator layers.
//!
//! An expression is a `+`/`-` separated list of terms; each term is an
//! optional rational coefficient, an optional `*`, and either a single
//! generator token or a normally ordered word `:tok tok ...:`. Tokens:
//!
//! ```text
//!   b<i>[k]      d^k beta^i
//!   g<i>[k]      d^k gamma^i
//!   f[k], f<i>[k]  d^k phi (color 1 when omitted)
//!   W<m>[k]      d^k W^m          (generator layer)
//!   Om<a>,<b>[k] d^k Om_{a,b}     (generator layer)
//! ```
//!
//! Field tokens parse to a [`VPoly`], generator tokens to a [`WPoly`];
//! mixing the two layers in one expression is an error. Words in the
//! generator layer are read as canonical (sorted) basis words, so factor
//! order inside `:...:` carries no information there; in the field layer
//! reordering only changes the Koszul sign, which is applied.

use std::fmt;

use voa_core::arith::Rational;
use voa_core::freefield::{GenSym, VPoly};
use voa_core::wbasis::WPoly;

/// A parsed expression from either layer.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// Free-field element.
    V(VPoly),
    /// Generator-layer element.
    W(WPoly),
    /// A bare scalar (no generator tokens); coerces into either layer.
    Scalar(Rational),
}

/// Syntax error with byte position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parses an expression of either layer.
pub fn parse_expr(input: &str) -> Result<Expr, ParseError> {
    Parser::new(input).parse()
}

/// Parses a free-field expression (scalars become vacuum multiples).
pub fn parse_vpoly(input: &str) -> Result<VPoly, ParseError> {
    match parse_expr(input)? {
        Expr::V(p) => Ok(p),
        Expr::Scalar(c) => Ok(VPoly::one().scale(&c)),
        Expr::W(_) => Err(ParseError {
            pos: 0,
            message: "expected a free-field expression, found generator tokens".into(),
        }),
    }
}

/// Parses a generator-layer expression (scalars become vacuum multiples).
pub fn parse_wpoly(input: &str) -> Result<WPoly, ParseError> {
    match parse_expr(input)? {
        Expr::W(p) => Ok(p),
        Expr::Scalar(c) => {
            let mut p = WPoly::zero();
            p.add_term(Vec::new(), c);
            Ok(p)
        }
        Expr::V(_) => Err(ParseError {
            pos: 0,
            message: "expected a generator expression, found field tokens".into(),
        }),
    }
}

#[derive(Clone, Debug)]
enum Token {
    Field(GenSym),
    WGen { m: u16, k: u32 },
    OmGen { a: u16, b: u16, k: u32 },
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

enum Layer {
    Unknown,
    V(VPoly),
    W(WPoly),
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input: input.as_bytes(),
            pos: 0,
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn parse(&mut self) -> Result<Expr, ParseError> {
        let mut layer = Layer::Unknown;
        let mut scalar_acc = Rational::new(0.into(), 1.into());
        let mut saw_scalar = false;
        let mut first = true;
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
            let sign = match self.peek() {
                Some(b'+') => {
                    self.bump();
                    1
                }
                Some(b'-') => {
                    self.bump();
                    -1
                }
                _ if first => 1,
                _ => return self.error("expected '+' or '-' between terms"),
            };
            first = false;
            self.skip_ws();
            let term = self.parse_term()?;
            let sgn = Rational::new(sign.into(), 1.into());
            match term {
                Term::Scalar(c) => {
                    scalar_acc += c * &sgn;
                    saw_scalar = true;
                }
                Term::V(p) => {
                    let p = p.scale(&sgn);
                    layer = match layer {
                        Layer::Unknown => Layer::V(p),
                        Layer::V(acc) => Layer::V(acc.add(&p)),
                        Layer::W(_) => {
                            return self.error("cannot mix field and generator tokens")
                        }
                    };
                }
                Term::W(p) => {
                    let p = p.scale(&sgn);
                    layer = match layer {
                        Layer::Unknown => Layer::W(p),
                        Layer::W(acc) => Layer::W(acc.add(&p)),
                        Layer::V(_) => {
                            return self.error("cannot mix field and generator tokens")
                        }
                    };
                }
            }
        }
        if first {
            return self.error("empty expression");
        }
        Ok(match layer {
            Layer::Unknown => Expr::Scalar(scalar_acc),
            Layer::V(p) => {
                let mut p = p;
                if saw_scalar {
                    p = p.add(&VPoly::one().scale(&scalar_acc));
                }
                Expr::V(p)
            }
            Layer::W(p) => {
                let mut p = p;
                if saw_scalar {
                    let mut s = WPoly::zero();
                    s.add_term(Vec::new(), scalar_acc);
                    p = p.add(&s);
                }
                Expr::W(p)
            }
        })
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let coeff = if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let c = self.parse_rational()?;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.bump();
                self.skip_ws();
            }
            Some(c)
        } else {
            None
        };
        match self.peek() {
            Some(b':') => {
                self.bump();
                let mut tokens = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(b':') => {
                            self.bump();
                            break;
                        }
                        Some(_) => tokens.push(self.parse_token()?),
                        None => return self.error("unterminated ':...:' word"),
                    }
                }
                self.word_term(coeff, tokens)
            }
            Some(c) if c == b'b' || c == b'g' || c == b'f' || c == b'W' || c == b'O' => {
                let tok = self.parse_token()?;
                self.word_term(coeff, vec![tok])
            }
            _ => match coeff {
                Some(c) => Ok(Term::Scalar(c)),
                None => self.error("expected a coefficient, token, or ':...:' word"),
            },
        }
    }

    fn word_term(&mut self, coeff: Option<Rational>, tokens: Vec<Token>) -> Result<Term, ParseError> {
        let one = Rational::new(1.into(), 1.into());
        let c = coeff.unwrap_or_else(|| one.clone());
        if tokens.is_empty() {
            return Ok(Term::Scalar(c));
        }
        let field = matches!(tokens[0], Token::Field(_));
        if field {
            let mut factors = Vec::with_capacity(tokens.len());
            for t in tokens {
                match t {
                    Token::Field(g) => factors.push(g),
                    _ => return self.error("cannot mix field and generator tokens in a word"),
                }
            }
            Ok(Term::V(VPoly::from_factors(&factors, c)))
        } else {
            // canonical multiset semantics: the word is the product of the
            // factors' canonical expansions
            let mut acc = WPoly::zero();
            acc.add_term(Vec::new(), one);
            for t in tokens {
                let factor = match t {
                    Token::WGen { m, k } => WPoly::wgen(m, k),
                    Token::OmGen { a, b, k } => WPoly::omgen(a, b, k),
                    Token::Field(_) => {
                        return self.error("cannot mix field and generator tokens in a word")
                    }
                };
                acc = word_product(&acc, &factor);
            }
            Ok(Term::W(acc.scale(&c)))
        }
    }

    fn parse_token(&mut self) -> Result<Token, ParseError> {
        match self.peek() {
            Some(b'b') | Some(b'g') | Some(b'f') => {
                let kind = self.bump().unwrap();
                let color = if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.parse_u64()? as u16
                } else if kind == b'f' {
                    1
                } else {
                    return self.error("field token needs a color index");
                };
                let k = self.parse_bracket_index()?;
                let g = match kind {
                    b'b' => GenSym::beta(color, k as u16),
                    b'g' => GenSym::gamma(color, k as u16),
                    _ => GenSym::phi(color, k as u16),
                };
                Ok(Token::Field(g))
            }
            Some(b'W') => {
                self.bump();
                let m = self.parse_u64()? as u16;
                if m.is_multiple_of(2) {
                    return self.error("W generators have odd index");
                }
                let k = self.parse_bracket_index()?;
                Ok(Token::WGen { m, k })
            }
            Some(b'O') => {
                self.bump();
                if self.bump() != Some(b'm') {
                    return self.error("unknown token (expected 'Om')");
                }
                let a = self.parse_u64()? as u16;
                if self.bump() != Some(b',') {
                    return self.error("expected ',' in Om token");
                }
                let b = self.parse_u64()? as u16;
                let k = self.parse_bracket_index()?;
                Ok(Token::OmGen { a, b, k })
            }
            _ => self.error("unknown token"),
        }
    }

    fn parse_bracket_index(&mut self) -> Result<u32, ParseError> {
        if self.bump() != Some(b'[') {
            return self.error("expected '[' after generator name");
        }
        let k = self.parse_u64()? as u32;
        if self.bump() != Some(b']') {
            return self.error("expected ']'");
        }
        Ok(k)
    }

    fn parse_u64(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        core::str::from_utf8(&self.input[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.error("number out of range"))
    }

    fn parse_rational(&mut self) -> Result<Rational, ParseError> {
        let num = self.parse_u64()? as i64;
        if self.peek() == Some(b'/') {
            self.bump();
            let den = self.parse_u64()? as i64;
            if den == 0 {
                return self.error("zero denominator");
            }
            Ok(Rational::new(num.into(), den.into()))
        } else {
            Ok(Rational::new(num.into(), 1.into()))
        }
    }
}

enum Term {
    Scalar(Rational),
    V(VPoly),
    W(WPoly),
}

/// Formal product of generator-layer elements in the canonical word basis
/// (multiset union of factors). This is basis bookkeeping for the parser,
/// not a vertex-algebra operation.
fn word_product(a: &WPoly, b: &WPoly) -> WPoly {
    let mut out = WPoly::zero();
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            w.sort();
            out.add_term(w, ca * cb);
        }
    }
    out
}
