//! Exact multivariate polynomials over the rationals in a declared set of
//! named parameters.
//!
//! The parameter universe is fixed up front per session ([`ParamSet`]);
//! referring to an undeclared name is an error rather than an implicit
//! extension, so typos in configuration files are caught early. Stored terms
//! never carry a zero coefficient, which makes equality structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::bigint::BigInt;
use num::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// Exact rational scalar used throughout the crate.
pub type Rat = num::rational::BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The ordered universe of parameter names for one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSet {
    names: Vec<String>,
}

impl ParamSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<ParamSet> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = names.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), names.len(), "duplicate parameter names");
        Arc::new(ParamSet { names })
    }

    /// Universe with no parameters (purely rational coefficients).
    pub fn empty() -> Arc<ParamSet> {
        Arc::new(ParamSet { names: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exact polynomial: a map from exponent vectors to nonzero rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    params: Arc<ParamSet>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero(params: &Arc<ParamSet>) -> Poly {
        Poly { params: params.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(params: &Arc<ParamSet>, c: Rat) -> Poly {
        let mut p = Poly::zero(params);
        if !c.is_zero() {
            p.terms.insert(vec![0; params.len()], c);
        }
        p
    }

    pub fn one(params: &Arc<ParamSet>) -> Poly {
        Poly::constant(params, Rat::one())
    }

    pub fn int(params: &Arc<ParamSet>, n: i64) -> Poly {
        Poly::constant(params, rat(n))
    }

    /// The polynomial consisting of a single declared parameter.
    pub fn param(params: &Arc<ParamSet>, name: &str) -> Result<Poly> {
        let idx = params.index_of(name).ok_or_else(|| Error::UnknownParam(name.to_string()))?;
        let mut exps = vec![0u32; params.len()];
        exps[idx] = 1;
        let mut p = Poly::zero(params);
        p.terms.insert(exps, Rat::one());
        Ok(p)
    }

    pub fn params(&self) -> &Arc<ParamSet> {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Constant term, if the polynomial is a constant; `None` otherwise.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (exps, c) = self.terms.iter().next().unwrap();
            if exps.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    fn assert_compat(&self, other: &Poly) {
        assert!(self.params == other.params, "parameter universes differ");
    }

    fn insert_term(&mut self, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.params);
        }
        let mut out = Poly::zero(&self.params);
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(&self.params);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Total degree of the highest term (zero polynomial reports 0).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Deterministic JSON expression tree.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| {
                serde_json::json!({
                    "coef": c.to_string(),
                    "exps": e,
                })
            })
            .collect();
        serde_json::json!({
            "poly": {
                "params": self.params.names(),
                "terms": terms,
            }
        })
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.assert_compat(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.assert_compat(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let mut out = Poly::zero(&self.params);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_compat(rhs);
        let mut out = Poly::zero(&self.params);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.insert_term(exps, ca * cb);
            }
        }
        out
    }
}

fn fmt_monomial(names: &[String], exps: &[u32]) -> String {
    let mut parts = Vec::new();
    for (name, &e) in names.iter().zip(exps) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

fn fmt_rat(c: &Rat) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Canonical rendering: monomials in descending lexicographic exponent
    /// order, explicit `*` between factors, rationals as `p/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms.iter().rev() {
            let mono = fmt_monomial(self.params.names(), exps);
            let mag = fmt_rat(&c.abs());
            let lead = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {lead} ")?;
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(Tok::End);
        }
        let c = self.src[self.pos];
        self.pos += 1;
        match c {
            b'+' => Ok(Tok::Plus),
            b'-' => Ok(Tok::Minus),
            b'*' => Ok(Tok::Star),
            b'^' => Ok(Tok::Caret),
            b'(' => Ok(Tok::LParen),
            b')' => Ok(Tok::RParen),
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let numer: BigInt = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .map_err(|_| Error::Parse("bad integer".into()))?;
                // Optional /denominator written without spaces.
                if self.pos < self.src.len() && self.src[self.pos] == b'/' {
                    let save = self.pos;
                    self.pos += 1;
                    let dstart = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == dstart {
                        self.pos = save;
                        return Ok(Tok::Num(Rat::from_integer(numer)));
                    }
                    let denom: BigInt = std::str::from_utf8(&self.src[dstart..self.pos])
                        .unwrap()
                        .parse()
                        .map_err(|_| Error::Parse("bad denominator".into()))?;
                    if denom.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    return Ok(Tok::Num(Rat::new(numer, denom)));
                }
                Ok(Tok::Num(Rat::from_integer(numer)))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos - 1;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Ok(Tok::Ident(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string()))
            }
            other => Err(Error::Parse(format!("unexpected character `{}`", other as char))),
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: Tok,
    params: Arc<ParamSet>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, params: &Arc<ParamSet>) -> Result<Self> {
        let mut lexer = Lexer::new(src);
        let look = lexer.next_tok()?;
        Ok(Parser { lexer, look, params: params.clone() })
    }

    fn bump(&mut self) -> Result<Tok> {
        let next = self.lexer.next_tok()?;
        Ok(std::mem::replace(&mut self.look, next))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            match self.look {
                Tok::Plus => {
                    self.bump()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.look == Tok::Star {
            self.bump()?;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.look == Tok::Caret {
            self.bump()?;
            match self.bump()? {
                Tok::Num(c) if c.is_integer() && !c.is_negative() => {
                    let e: u32 = c
                        .numer()
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected nonnegative integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.bump()? {
            Tok::Num(c) => Ok(Poly::constant(&self.params, c)),
            Tok::Ident(name) => Poly::param(&self.params, &name),
            Tok::Minus => Ok(-&self.factor()?),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump()? {
                    Tok::RParen => Ok(inner),
                    _ => Err(Error::Parse("expected `)`".into())),
                }
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse a polynomial expression over the declared universe.
///
/// Grammar: `+ - * ^` with parentheses, integer or `p/q` literals, and
/// declared parameter names. Unknown names are rejected.
pub fn parse_poly(src: &str, params: &Arc<ParamSet>) -> Result<Poly> {
    let mut p = Parser::new(src, params)?;
    let out = p.expr()?;
    if p.look != Tok::End {
        return Err(Error::Parse(format!("trailing input near {:?}", p.look)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abcd() -> Arc<ParamSet> {
        ParamSet::new(&["a", "b", "c", "d"])
    }

    #[test]
    fn additive_inverse_cancels() {
        let ps = abcd();
        let ab = &Poly::param(&ps, "a").unwrap() * &Poly::param(&ps, "b").unwrap();
        assert!((&ab + &-&ab).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let ps = abcd();
        let a = Poly::param(&ps, "a").unwrap();
        let b = Poly::param(&ps, "b").unwrap();
        let lhs = &(&a + &b) * &(&a - &b);
        let rhs = &(&a * &a) - &(&b * &b);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn f_at_rational_point() {
        // f = a*c - b^2 evaluated by substitution a=1, b=2, c=3 gives -1.
        let ps = ParamSet::empty();
        let a = Poly::int(&ps, 1);
        let b = Poly::int(&ps, 2);
        let c = Poly::int(&ps, 3);
        let f = &(&a * &c) - &(&b * &b);
        assert_eq!(f.as_constant(), Some(rat(-1)));
    }

    #[test]
    fn unknown_param_rejected() {
        let ps = abcd();
        assert!(matches!(Poly::param(&ps, "t"), Err(Error::UnknownParam(_))));
        assert!(parse_poly("a + t", &ps).is_err());
    }

    #[test]
    fn parser_roundtrip_display() {
        let ps = abcd();
        let p = parse_poly("2*a*b^2 - 1/3 + c*(a - d)", &ps).unwrap();
        let again = parse_poly(&p.to_string(), &ps).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        // Hand-rolled LCG randomness keeps this oracle self-contained.
        let ps = abcd();
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        let rand_poly = |next: &mut dyn FnMut() -> u64| {
            let mut p = Poly::zero(&ps);
            for _ in 0..3 {
                let exps: Vec<u32> = (0..4).map(|_| (next() % 3) as u32).collect();
                let num = (next() % 7) as i64 - 3;
                let den = (next() % 3) as i64 + 1;
                p = &p + &{
                    let mut q = Poly::zero(&ps);
                    q.insert_term(exps, ratio(num, den));
                    q
                };
            }
            p
        };
        for _ in 0..120 {
            let p = rand_poly(&mut next);
            let q = rand_poly(&mut next);
            let r = rand_poly(&mut next);
            assert_eq!(&p + &q, &q + &p);
            assert_eq!(&p * &q, &q * &p);
            assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        }
    }
}
