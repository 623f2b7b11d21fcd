//! Exterior algebra of constant-coefficient forms on an m-dimensional frame.
//!
//! A [`Form`] is a map from strictly increasing index subsets of `{1..m}`
//! (stored as bitmasks) to nonzero [`Poly`] coefficients. The basis covector
//! for frame index `k` renders as `dx{k+1}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use crate::poly::{parse_poly, ParamSet, Poly, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    m: usize,
    params: Arc<ParamSet>,
    terms: BTreeMap<u32, Poly>,
}

/// Sign of `dx^A ∧ dx^B` for disjoint masks: parity of index crossings.
fn wedge_sign(a: u32, b: u32) -> i64 {
    let mut crossings = 0u32;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        crossings += (b & ((1u32 << i) - 1)).count_ones();
        rest &= rest - 1;
    }
    if crossings % 2 == 0 {
        1
    } else {
        -1
    }
}

impl Form {
    pub fn zero(m: usize, params: &Arc<ParamSet>) -> Form {
        Form { m, params: params.clone(), terms: BTreeMap::new() }
    }

    pub fn from_poly(m: usize, p: Poly) -> Form {
        let params = p.params().clone();
        let mut f = Form::zero(m, &params);
        if !p.is_zero() {
            f.terms.insert(0, p);
        }
        f
    }

    pub fn one(m: usize, params: &Arc<ParamSet>) -> Form {
        Form::from_poly(m, Poly::one(params))
    }

    pub fn constant(m: usize, params: &Arc<ParamSet>, c: Rat) -> Form {
        Form::from_poly(m, Poly::constant(params, c))
    }

    /// The basis covector `dx{k+1}` (0-based frame index).
    pub fn dx(m: usize, params: &Arc<ParamSet>, k: usize) -> Form {
        assert!(k < m, "covector index out of range");
        let mut f = Form::zero(m, &params.clone());
        f.terms.insert(1 << k, Poly::one(params));
        f
    }

    /// Basis monomial for an index mask with coefficient one.
    pub fn basis(m: usize, params: &Arc<ParamSet>, mask: u32) -> Form {
        assert!(mask < (1 << m));
        let mut f = Form::zero(m, params);
        f.terms.insert(mask, Poly::one(params));
        f
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn params(&self) -> &Arc<ParamSet> {
        &self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u32, &Poly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mask: u32) -> Poly {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Poly::zero(&self.params))
    }

    fn assert_compat(&self, other: &Form) {
        assert_eq!(self.m, other.m, "frame dimension mismatch");
        assert!(self.params == other.params, "parameter universes differ");
    }

    fn insert(&mut self, mask: u32, p: Poly) {
        if p.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mask) {
            Entry::Vacant(v) => {
                v.insert(p);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &p;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn wedge(&self, rhs: &Form) -> Form {
        self.assert_compat(rhs);
        let mut out = Form::zero(self.m, &self.params);
        for (&ma, pa) in &self.terms {
            for (&mb, pb) in &rhs.terms {
                if ma & mb != 0 {
                    continue;
                }
                let sign = wedge_sign(ma, mb);
                let mut coef = pa * pb;
                if sign < 0 {
                    coef = -&coef;
                }
                out.insert(ma | mb, coef);
            }
        }
        out
    }

    pub fn scale(&self, p: &Poly) -> Form {
        let mut out = Form::zero(self.m, &self.params);
        for (&mask, c) in &self.terms {
            out.insert(mask, c * p);
        }
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> Form {
        self.scale(&Poly::constant(&self.params, c.clone()))
    }

    /// Interior product with the frame vector of index `k`.
    pub fn contract(&self, k: usize) -> Form {
        assert!(k < self.m);
        let bit = 1u32 << k;
        let mut out = Form::zero(self.m, &self.params);
        for (&mask, c) in &self.terms {
            if mask & bit == 0 {
                continue;
            }
            let below = (mask & (bit - 1)).count_ones();
            let coef = if below % 2 == 0 { c.clone() } else { -c };
            out.insert(mask & !bit, coef);
        }
        out
    }

    /// Splits into homogeneous pieces, lowest degree first.
    pub fn degree_split(&self) -> Vec<Form> {
        let mut by_degree: BTreeMap<u32, Form> = BTreeMap::new();
        for (&mask, c) in &self.terms {
            let d = mask.count_ones();
            by_degree
                .entry(d)
                .or_insert_with(|| Form::zero(self.m, &self.params))
                .insert(mask, c.clone());
        }
        by_degree.into_values().collect()
    }

    /// Even and odd parts under the Z2 grading.
    pub fn parity_split(&self) -> (Form, Form) {
        let mut even = Form::zero(self.m, &self.params);
        let mut odd = Form::zero(self.m, &self.params);
        for (&mask, c) in &self.terms {
            if mask.count_ones() % 2 == 0 {
                even.insert(mask, c.clone());
            } else {
                odd.insert(mask, c.clone());
            }
        }
        (even, odd)
    }

    /// Z-degree if homogeneous (zero form counts as any degree, reported 0).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg = None;
        for mask in self.terms.keys() {
            let d = mask.count_ones();
            match deg {
                None => deg = Some(d),
                Some(e) if e == d => {}
                _ => return None,
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Z2-parity if homogeneous.
    pub fn parity(&self) -> Option<u8> {
        let mut par = None;
        for mask in self.terms.keys() {
            let p = (mask.count_ones() % 2) as u8;
            match par {
                None => par = Some(p),
                Some(q) if q == p => {}
                _ => return None,
            }
        }
        Some(par.unwrap_or(0))
    }

    /// Constant rational value, if the form is a degree-0 constant.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(p) = self.terms.get(&0) {
                return p.as_constant();
            }
        }
        None
    }

    pub fn as_poly(&self) -> Option<Poly> {
        if self.terms.is_empty() {
            return Some(Poly::zero(&self.params));
        }
        if self.terms.len() == 1 {
            if let Some(p) = self.terms.get(&0) {
                return Some(p.clone());
            }
        }
        None
    }

    /// Rewrites the form in a new constant frame.
    ///
    /// `old_in_new[k]` expresses the old covector `dx^k` as rational
    /// coefficients over the new covectors.
    pub fn change_frame(&self, old_in_new: &[Vec<Rat>]) -> Form {
        assert_eq!(old_in_new.len(), self.m);
        let mut out = Form::zero(self.m, &self.params);
        for (&mask, c) in &self.terms {
            let mut acc = Form::from_poly(self.m, c.clone());
            for k in 0..self.m {
                if mask & (1 << k) == 0 {
                    continue;
                }
                let mut cov = Form::zero(self.m, &self.params);
                for (j, coef) in old_in_new[k].iter().enumerate() {
                    if !coef.is_zero() {
                        cov = &cov + &Form::dx(self.m, &self.params, j).scale_rat(coef);
                    }
                }
                acc = acc.wedge(&cov);
            }
            out = &out + &acc;
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .sorted_masks()
            .into_iter()
            .map(|mask| {
                serde_json::json!({
                    "indices": mask_indices(mask),
                    "coef": self.terms[&mask].to_json(),
                })
            })
            .collect();
        serde_json::json!({ "form": { "dim": self.m, "terms": terms } })
    }

    fn sorted_masks(&self) -> Vec<u32> {
        let mut masks: Vec<u32> = self.terms.keys().copied().collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
    }
}

fn mask_indices(mask: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros();
        out.push(i + 1);
        rest &= rest - 1;
    }
    out
}

fn mask_label(mask: u32) -> String {
    mask_indices(mask).iter().map(|i| format!("dx{i}")).collect::<Vec<_>>().join("^")
}

impl fmt::Display for Form {
    /// Canonical rendering: terms sorted by (degree, index subset).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for mask in self.sorted_masks() {
            let coef = &self.terms[&mask];
            let cs = coef.to_string();
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "{cs}")?;
            } else if cs == "1" {
                write!(f, "{}", mask_label(mask))?;
            } else if cs.contains(' ') {
                write!(f, "({cs})*{}", mask_label(mask))?;
            } else {
                write!(f, "{cs}*{}", mask_label(mask))?;
            }
        }
        Ok(())
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.assert_compat(rhs);
        let mut out = self.clone();
        for (&mask, c) in &rhs.terms {
            out.insert(mask, c.clone());
        }
        out
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.assert_compat(rhs);
        let mut out = self.clone();
        for (&mask, c) in &rhs.terms {
            out.insert(mask, -c);
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        let mut out = Form::zero(self.m, &self.params);
        for (&mask, c) in &self.terms {
            out.terms.insert(mask, -c);
        }
        out
    }
}

/// Parse a form expression: polynomials extended with `dx{k}` covectors and
/// the wedge written as `^` between covectors (e.g. `2*a*dx1^dx2 + c*dx3`).
///
/// Internally `dx1^dx2` is tokenized through the polynomial grammar by
/// treating each `dx{k}` atom as a wedge factor.
pub fn parse_form(src: &str, m: usize, params: &Arc<ParamSet>) -> Result<Form> {
    // Grammar mirror of the poly parser with covector atoms.
    struct P<'a> {
        toks: Vec<String>,
        pos: usize,
        m: usize,
        params: &'a Arc<ParamSet>,
    }
    fn tokenize(src: &str) -> Result<Vec<String>> {
        let mut toks = Vec::new();
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
            } else if b"+-*^()".contains(&c) {
                toks.push((c as char).to_string());
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'/') {
                    i += 1;
                }
                toks.push(src[start..i].to_string());
            } else if c.is_ascii_alphabetic() || c == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(src[start..i].to_string());
            } else {
                return Err(Error::Parse(format!("unexpected character `{}`", c as char)));
            }
        }
        Ok(toks)
    }
    impl<'a> P<'a> {
        fn peek(&self) -> Option<&str> {
            self.toks.get(self.pos).map(|s| s.as_str())
        }
        fn bump(&mut self) -> Option<String> {
            let t = self.toks.get(self.pos).cloned();
            self.pos += 1;
            t
        }
        fn expr(&mut self) -> Result<Form> {
            let mut acc = self.term()?;
            loop {
                match self.peek() {
                    Some("+") => {
                        self.bump();
                        acc = &acc + &self.term()?;
                    }
                    Some("-") => {
                        self.bump();
                        acc = &acc - &self.term()?;
                    }
                    _ => return Ok(acc),
                }
            }
        }
        fn term(&mut self) -> Result<Form> {
            let mut acc = self.factor()?;
            loop {
                match self.peek() {
                    Some("*") | Some("^") => {
                        self.bump();
                        acc = acc.wedge(&self.factor()?);
                    }
                    _ => return Ok(acc),
                }
            }
        }
        fn factor(&mut self) -> Result<Form> {
            match self.bump() {
                Some(tok) if tok == "-" => Ok(-&self.factor()?),
                Some(tok) if tok == "(" => {
                    let inner = self.expr()?;
                    match self.bump() {
                        Some(t) if t == ")" => Ok(inner),
                        _ => Err(Error::Parse("expected `)`".into())),
                    }
                }
                Some(tok) => {
                    if let Some(rest) = tok.strip_prefix("dx") {
                        if let Ok(k) = rest.parse::<usize>() {
                            if k == 0 || k > self.m {
                                return Err(Error::Parse(format!("covector dx{k} out of range")));
                            }
                            return Ok(Form::dx(self.m, self.params, k - 1));
                        }
                    }
                    let p = parse_poly(&tok, self.params)?;
                    Ok(Form::from_poly(self.m, p))
                }
                None => Err(Error::Parse("unexpected end of input".into())),
            }
        }
    }
    let mut p = P { toks: tokenize(src)?, pos: 0, m, params };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse("trailing input".into()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Vector-valued forms
// ---------------------------------------------------------------------------

/// A vector-valued form `Σ_k ω^k ⊗ ∂_k`: one [`Form`] per frame index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VForm(pub Vec<Form>);

impl VForm {
    pub fn zero(m: usize, params: &Arc<ParamSet>) -> VForm {
        VForm(vec![Form::zero(m, params); m])
    }

    /// The plain frame vector `∂_k`.
    pub fn basis_vector(m: usize, params: &Arc<ParamSet>, k: usize) -> VForm {
        let mut v = VForm::zero(m, params);
        v.0[k] = Form::one(m, params);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Form::is_zero)
    }

    pub fn add(&self, rhs: &VForm) -> VForm {
        VForm(self.0.iter().zip(&rhs.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, rhs: &VForm) -> VForm {
        VForm(self.0.iter().zip(&rhs.0).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self) -> VForm {
        VForm(self.0.iter().map(|x| -x).collect())
    }

    /// Left wedge by a form on every component.
    pub fn lmul(&self, w: &Form) -> VForm {
        VForm(self.0.iter().map(|x| w.wedge(x)).collect())
    }

    pub fn scale(&self, p: &Poly) -> VForm {
        VForm(self.0.iter().map(|x| x.scale(p)).collect())
    }

    /// Contraction of the form legs with frame vector `k`.
    pub fn contract(&self, k: usize) -> VForm {
        VForm(self.0.iter().map(|x| x.contract(k)).collect())
    }

    /// All components homogeneous of equal Z-degree?
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut deg: Option<u32> = None;
        for f in &self.0 {
            if f.is_zero() {
                continue;
            }
            match (deg, f.homogeneous_degree()) {
                (_, None) => return None,
                (None, Some(d)) => deg = Some(d),
                (Some(e), Some(d)) if d == e => {}
                _ => return None,
            }
        }
        Some(deg.unwrap_or(0))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "vform": self.0.iter().map(Form::to_json).collect::<Vec<_>>() })
    }
}

impl fmt::Display for VForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, comp) in self.0.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({comp})⊗∂{}", k + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn ps() -> Arc<ParamSet> {
        ParamSet::new(&["a", "b", "c"])
    }

    #[test]
    fn anticommutativity() {
        let ps = ps();
        let dx1 = Form::dx(4, &ps, 0);
        let dx2 = Form::dx(4, &ps, 1);
        assert_eq!(dx1.wedge(&dx2), -&dx2.wedge(&dx1));
    }

    #[test]
    fn nilpotency() {
        let ps = ps();
        let dx1 = Form::dx(4, &ps, 0);
        assert!(dx1.wedge(&dx1).is_zero());
    }

    #[test]
    fn scaled_wedge_collapses_repeated_covector() {
        // (a dx1) ∧ (b dx2 + c dx1) = ab dx1∧dx2
        let ps = ps();
        let a = Poly::param(&ps, "a").unwrap();
        let b = Poly::param(&ps, "b").unwrap();
        let c = Poly::param(&ps, "c").unwrap();
        let u = Form::dx(2, &ps, 0).scale(&a);
        let v = &Form::dx(2, &ps, 1).scale(&b) + &Form::dx(2, &ps, 0).scale(&c);
        let expect = Form::basis(2, &ps, 0b11).scale(&(&a * &b));
        assert_eq!(u.wedge(&v), expect);
    }

    #[test]
    fn degree_split_left_inverse_of_sum() {
        let ps = ps();
        let a = Poly::param(&ps, "a").unwrap();
        let b = Poly::param(&ps, "b").unwrap();
        let u = &(&Form::from_poly(3, a) + &Form::basis(3, &ps, 0b011).scale(&b))
            + &Form::dx(3, &ps, 2);
        let parts = u.degree_split();
        assert_eq!(parts.len(), 3);
        let mut sum = Form::zero(3, &ps);
        for p in &parts {
            assert!(p.homogeneous_degree().is_some());
            sum = &sum + p;
        }
        assert_eq!(sum, u);
        assert!(Form::zero(3, &ps).degree_split().is_empty());
        let single = &Form::dx(3, &ps, 0) + &Form::dx(3, &ps, 1);
        assert_eq!(single.degree_split().len(), 1);
    }

    #[test]
    fn contraction_basics() {
        let ps = ps();
        let u = Form::basis(3, &ps, 0b011); // dx1^dx2
        assert_eq!(u.contract(0), Form::dx(3, &ps, 1));
        assert_eq!(u.contract(1), -&Form::dx(3, &ps, 0));
        assert!(u.contract(2).is_zero());
    }

    #[test]
    #[should_panic(expected = "frame dimension mismatch")]
    fn wedge_dimension_mismatch_panics() {
        let ps = ps();
        let _ = Form::dx(2, &ps, 0).wedge(&Form::dx(3, &ps, 0));
    }

    #[test]
    fn parse_and_render() {
        let ps = ps();
        let f = parse_form("2*a*dx1^dx2 + c*dx3 - 1/2", 3, &ps).unwrap();
        let again = parse_form(&f.to_string().replace("(", "(").replace(")", ")"), 3, &ps).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn change_frame_identity() {
        let ps = ps();
        let f = parse_form("a*dx1^dx2 + b*dx2", 2, &ps).unwrap();
        let id = vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]];
        assert_eq!(f.change_frame(&id), f);
    }
}
