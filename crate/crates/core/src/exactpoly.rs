//! Sparse multivariate polynomials with arbitrary-precision rational
//! coefficients.
//!
//! Terms are kept sorted by graded reverse lexicographic order, leading term
//! first, which makes equality structural; display and the text grammar use
//! descending lexicographic order instead, so printed polynomials read the
//! way they are usually written (`x2^3*x3^2 + ... - 4*x2*y3^2`).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("invalid variable name `{0}`: want a lowercase letter then lowercase letters or digits")]
    BadVarName(String),
    #[error("duplicate variable name `{0}`")]
    DuplicateVar(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("polynomials belong to different variable tables")]
    TableMismatch,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

fn valid_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {
            chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit())
        }
        _ => false,
    }
}

/// Ordered list of distinct variable names shared by a family of polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new<I, S>(names: I) -> Result<Arc<VarTable>, PolyError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if !valid_var_name(name) {
                return Err(PolyError::BadVarName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(PolyError::DuplicateVar(name.clone()));
            }
        }
        Ok(Arc::new(VarTable { names }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Exponent vector aligned with a `VarTable`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Monomial {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, index: usize) -> Monomial {
        let mut m = Monomial::one(nvars);
        m.exps[index] = 1;
        m
    }

    pub fn from_exps(exps: Vec<u32>) -> Monomial {
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, index: usize) -> u32 {
        self.exps[index]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect();
        Monomial { exps }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// Quotient `self / other`; callers check `other.divides(self)` first.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect();
        Monomial { exps }
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| *a.max(b))
            .collect();
        Monomial { exps }
    }
}

fn lex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

fn grevlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            match y.cmp(x) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        Ordering::Equal
    })
}

/// Admissible term orders.
///
/// `Block { eliminated }` compares the first `eliminated` exponents by
/// grevlex and ties on the remaining block, so any monomial touching an
/// eliminated variable outranks every monomial that avoids them all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    Grevlex,
    Block { eliminated: usize },
}

impl MonomialOrder {
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Lex => lex_cmp(a.exps(), b.exps()),
            MonomialOrder::Grevlex => grevlex_cmp(a.exps(), b.exps()),
            MonomialOrder::Block { eliminated } => {
                grevlex_cmp(&a.exps()[..eliminated], &b.exps()[..eliminated])
                    .then_with(|| grevlex_cmp(&a.exps()[eliminated..], &b.exps()[eliminated..]))
            }
        }
    }
}

/// Sparse polynomial: distinct monomials with nonzero rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: Arc<VarTable>,
    terms: Vec<(Monomial, Rat)>,
}

impl Polynomial {
    pub fn zero(vars: &Arc<VarTable>) -> Polynomial {
        Polynomial { vars: Arc::clone(vars), terms: Vec::new() }
    }

    pub fn one(vars: &Arc<VarTable>) -> Polynomial {
        Polynomial::constant(vars, Rat::one())
    }

    pub fn constant(vars: &Arc<VarTable>, c: Rat) -> Polynomial {
        let nvars = vars.len();
        Polynomial::from_terms(vars, vec![(Monomial::one(nvars), c)])
    }

    pub fn from_int(vars: &Arc<VarTable>, c: i64) -> Polynomial {
        Polynomial::constant(vars, Rat::from_integer(BigInt::from(c)))
    }

    pub fn var(vars: &Arc<VarTable>, name: &str) -> Result<Polynomial, PolyError> {
        let index = vars.index(name).ok_or_else(|| PolyError::UnknownVar(name.into()))?;
        let m = Monomial::var(vars.len(), index);
        Ok(Polynomial { vars: Arc::clone(vars), terms: vec![(m, Rat::one())] })
    }

    /// Normalizing constructor: merges duplicate monomials, drops zero
    /// coefficients, sorts grevlex-descending.
    pub fn from_terms(vars: &Arc<VarTable>, mut raw: Vec<(Monomial, Rat)>) -> Polynomial {
        raw.sort_by(|a, b| grevlex_cmp(b.0.exps(), a.0.exps()));
        let mut terms: Vec<(Monomial, Rat)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match terms.last_mut() {
                Some((last, acc)) if *last == m => *acc += c,
                _ => {
                    if terms.last().is_some_and(|(_, acc)| acc.is_zero()) {
                        terms.pop();
                    }
                    terms.push((m, c));
                }
            }
        }
        if terms.last().is_some_and(|(_, acc)| acc.is_zero()) {
            terms.pop();
        }
        Polynomial { vars: Arc::clone(vars), terms }
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&Rat> {
        self.terms.iter().find(|(t, _)| t == m).map(|(_, c)| c)
    }

    /// Maximal term under `order`; `None` for the zero polynomial.
    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Rat)> {
        match order {
            // storage order is grevlex-descending, so the leader is term 0
            MonomialOrder::Grevlex => self.terms.first().map(|(m, c)| (m, c)),
            _ => self
                .terms
                .iter()
                .max_by(|a, b| order.cmp(&a.0, &b.0))
                .map(|(m, c)| (m, c)),
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_table(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_table(other)?;
        Ok(self - other)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.same_table(other)?;
        Ok(self * other)
    }

    fn same_table(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(PolyError::TableMismatch)
        }
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        let terms = self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect();
        Polynomial { vars: Arc::clone(&self.vars), terms }
    }

    /// `self * c * m`, used by division and S-polynomial steps.
    pub fn mul_term(&self, m: &Monomial, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(t, k)| (t.mul(m), k * c))
            .collect();
        // multiplying every monomial by a fixed one preserves grevlex order
        Polynomial { vars: Arc::clone(&self.vars), terms }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.vars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Divides by the leading coefficient under `order`; zero stays zero.
    pub fn monic(&self, order: MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    pub fn differentiate(&self, var: usize) -> Polynomial {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[var] = e - 1;
            terms.push((Monomial::from_exps(exps), c * Rat::from_integer(BigInt::from(e))));
        }
        Polynomial::from_terms(&self.vars, terms)
    }

    /// Exact evaluation at a full point, one value per table variable.
    pub fn evaluate(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.vars.len(), "point length must match table");
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= rat_pow(&point[i], e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Float evaluation, for Newton iterations and residual checks.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.vars.len());
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn parse(vars: &Arc<VarTable>, input: &str) -> Result<Polynomial, PolyError> {
        Parser { vars, bytes: input.as_bytes(), pos: 0 }.parse()
    }
}

fn rat_pow(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert!(self.vars == rhs.vars, "polynomials from different variable tables");
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        Polynomial::from_terms(&self.vars, terms)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert!(self.vars == rhs.vars, "polynomials from different variable tables");
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().map(|(m, c)| (m.clone(), -c)));
        Polynomial::from_terms(&self.vars, terms)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Polynomial { vars: Arc::clone(&self.vars), terms }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert!(self.vars == rhs.vars, "polynomials from different variable tables");
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                terms.push((ma.mul(mb), ca * cb));
            }
        }
        Polynomial::from_terms(&self.vars, terms)
    }
}

// --- display: descending lex, matching the parse grammar ---

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<&(Monomial, Rat)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| lex_cmp(b.0.exps(), a.0.exps()));
        for (i, (m, c)) in ordered.iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write_term_magnitude(f, self.vars(), m, c)?;
        }
        Ok(())
    }
}

fn write_term_magnitude(
    f: &mut fmt::Formatter<'_>,
    vars: &VarTable,
    m: &Monomial,
    c: &Rat,
) -> fmt::Result {
    let mag = c.abs();
    if m.is_one() {
        return write_rat(f, &mag);
    }
    let mut sep = false;
    if !mag.is_one() {
        write_rat(f, &mag)?;
        sep = true;
    }
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if sep {
            write!(f, "*")?;
        }
        sep = true;
        write!(f, "{}", vars.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_rat(f: &mut fmt::Formatter<'_>, r: &Rat) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

// --- parser for the term grammar ---
//
//   poly   := term (('+'|'-') term)*
//   term   := coeff ('*' factor)* | factor ('*' factor)*
//   factor := var ('^' uint)?
//   coeff  := int ('/' uint)?
//
// Whitespace is insignificant; a single leading sign is accepted.

struct Parser<'a> {
    vars: &'a Arc<VarTable>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn parse(mut self) -> Result<Polynomial, PolyError> {
        let mut terms = Vec::new();
        self.skip_ws();
        let mut negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let (m, c) = self.term()?;
            terms.push((m, if negate { -c } else { c }));
            self.skip_ws();
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                Some(c) => {
                    return Err(self.err(format!("expected '+' or '-', found `{}`", c as char)))
                }
            }
        }
        Ok(Polynomial::from_terms(self.vars, terms))
    }

    fn term(&mut self) -> Result<(Monomial, Rat), PolyError> {
        self.skip_ws();
        let mut m = Monomial::one(self.vars.len());
        let c = match self.peek() {
            Some(c) if c.is_ascii_digit() => self.coeff()?,
            Some(c) if c.is_ascii_lowercase() => {
                self.factor_into(&mut m)?;
                Rat::one()
            }
            Some(c) => return Err(self.err(format!("expected a term, found `{}`", c as char))),
            None => return Err(self.err("expected a term, found end of input".into())),
        };
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                self.skip_ws();
                self.factor_into(&mut m)?;
            } else {
                break;
            }
        }
        Ok((m, c))
    }

    fn factor_into(&mut self, m: &mut Monomial) -> Result<(), PolyError> {
        let name = self.var_name()?;
        let index = self
            .vars
            .index(&name)
            .ok_or(PolyError::UnknownVar(name))?;
        let mut exp = 1u32;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            exp = self.uint()?.try_into().map_err(|_| self.err("exponent too large".into()))?;
        }
        let mut exps = m.exps().to_vec();
        exps[index] += exp;
        *m = Monomial::from_exps(exps);
        Ok(())
    }

    fn var_name(&mut self) -> Result<String, PolyError> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return Err(self.err("expected a variable".into())),
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_lowercase() || c.is_ascii_digit() {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn coeff(&mut self) -> Result<Rat, PolyError> {
        let numer = self.int()?;
        self.skip_ws();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let denom = self.int()?;
            if denom.is_zero() {
                return Err(self.err("zero denominator".into()));
            }
            Ok(Rat::new(numer, denom))
        } else {
            Ok(Rat::from_integer(numer))
        }
    }

    fn int(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits".into()));
        }
        Ok(BigInt::parse_bytes(&self.bytes[start..self.pos], 10).expect("digits"))
    }

    fn uint(&mut self) -> Result<u64, PolyError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits".into()));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("number too large".into()))
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, msg: String) -> PolyError {
        PolyError::Syntax { pos: self.pos, msg }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn xyz() -> Arc<VarTable> {
        VarTable::new(["x", "y", "z"]).unwrap()
    }

    fn flat_vars() -> Arc<VarTable> {
        VarTable::new(["x2", "x3", "y3"]).unwrap()
    }

    const EQ1: &str = "x2^3*x3^2 + x2^3*y3^2 - 2*x2^2*x3^3 - 2*x2^2*x3*y3^2 + x2*x3^4 \
                       + 2*x2*x3^2*y3^2 + x2*y3^4 - 4*x2*y3^2";

    fn rat(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parse_two_term_example() {
        let vars = flat_vars();
        let p = Polynomial::parse(&vars, "x2*y3^2 - 4*y3^2").unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(
            p.coeff(&Monomial::from_exps(vec![1, 0, 2])),
            Some(&rat(1, 1))
        );
        assert_eq!(
            p.coeff(&Monomial::from_exps(vec![0, 0, 2])),
            Some(&rat(-4, 1))
        );
    }

    #[test]
    fn parse_flatness_polynomial() {
        let p = Polynomial::parse(&flat_vars(), EQ1).unwrap();
        assert_eq!(p.num_terms(), 8);
        assert_eq!(p.total_degree(), Some(5));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let vars = flat_vars();
        let a = Polynomial::parse(&vars, "x2*y3^2-4*y3^2").unwrap();
        let b = Polynomial::parse(&vars, "  x2 * y3 ^ 2   -   4 * y3 ^ 2 ").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn display_round_trips() {
        let vars = flat_vars();
        for src in [
            EQ1,
            "x2*y3^2 - 4*y3^2",
            "0",
            "-3",
            "1/2*x2 - 2/3",
            "x2^2*x3*y3 + 7",
        ] {
            let p = Polynomial::parse(&vars, src).unwrap();
            let q = Polynomial::parse(&vars, &p.to_string()).unwrap();
            assert_eq!(p, q, "round trip failed for `{src}` -> `{p}`");
        }
    }

    #[test]
    fn display_uses_descending_lex() {
        let vars = xyz();
        let p = Polynomial::parse(&vars, "y^2 + x").unwrap();
        assert_eq!(p.to_string(), "x + y^2");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let vars = xyz();
        for bad in [
            "x +", "2**x", "x^", "^2", "x^y", "1/0", "w", "X", "x_2", "", "x 2", "2 3", "x*",
            "*x", "x ^ -1",
        ] {
            assert!(
                Polynomial::parse(&vars, bad).is_err(),
                "`{bad}` should not parse"
            );
        }
    }

    #[test]
    fn product_of_conjugates() {
        let vars = xyz();
        let a = Polynomial::parse(&vars, "x - y").unwrap();
        let b = Polynomial::parse(&vars, "x + y").unwrap();
        let expect = Polynomial::parse(&vars, "x^2 - y^2").unwrap();
        assert_eq!(&a * &b, expect);
    }

    #[test]
    fn square_of_flatness_core_has_six_terms() {
        let vars = flat_vars();
        let base = Polynomial::parse(&vars, "x3^2 - x2*x3 + y3^2").unwrap();
        let sq = base.pow(2);
        let expect = Polynomial::parse(
            &vars,
            "x2^2*x3^2 - 2*x2*x3^3 - 2*x2*x3*y3^2 + x3^4 + 2*x3^2*y3^2 + y3^4",
        )
        .unwrap();
        assert_eq!(sq.num_terms(), 6);
        assert_eq!(sq, expect);
    }

    #[test]
    fn lex_leading_term_of_flatness_polynomial() {
        let p = Polynomial::parse(&flat_vars(), EQ1).unwrap();
        let (m, c) = p.leading_term(MonomialOrder::Lex).unwrap();
        assert_eq!(m.exps(), &[3, 2, 0]);
        assert_eq!(c, &rat(1, 1));
    }

    #[test]
    fn grevlex_prefers_higher_degree() {
        let vars = xyz();
        let p = Polynomial::parse(&vars, "x + y^2").unwrap();
        let (m, _) = p.leading_term(MonomialOrder::Grevlex).unwrap();
        assert_eq!(m.exps(), &[0, 2, 0]);
        let (m, _) = p.leading_term(MonomialOrder::Lex).unwrap();
        assert_eq!(m.exps(), &[1, 0, 0]);
    }

    #[test]
    fn block_order_separates_eliminated_variables() {
        let order = MonomialOrder::Block { eliminated: 1 };
        // any power of x dominates anything x-free
        let x = Monomial::from_exps(vec![1, 0, 0]);
        let y9 = Monomial::from_exps(vec![0, 9, 0]);
        assert_eq!(order.cmp(&x, &y9), Ordering::Greater);
        // ties inside the kept block fall back to grevlex
        let y2 = Monomial::from_exps(vec![0, 2, 0]);
        let z = Monomial::from_exps(vec![0, 0, 1]);
        assert_eq!(order.cmp(&y2, &z), Ordering::Greater);
    }

    #[test]
    fn derivative_of_flatness_polynomial_in_y3() {
        let p = Polynomial::parse(&flat_vars(), EQ1).unwrap();
        let d = p.differentiate(2);
        let expect = Polynomial::parse(
            &flat_vars(),
            "2*x2^3*y3 - 4*x2^2*x3*y3 + 4*x2*x3^2*y3 + 4*x2*y3^3 - 8*x2*y3",
        )
        .unwrap();
        assert_eq!(d.num_terms(), 5);
        assert_eq!(d, expect);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let vars = xyz();
        let p = Polynomial::parse(&vars, "7/3").unwrap();
        assert!(p.differentiate(0).is_zero());
    }

    #[test]
    fn evaluate_flatness_polynomial() {
        let p = Polynomial::parse(&flat_vars(), EQ1).unwrap();
        let v = p.evaluate(&[rat(2, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(v, rat(2, 1));
    }

    #[test]
    fn eval_f64_matches_exact_on_rational_points() {
        let p = Polynomial::parse(&flat_vars(), EQ1).unwrap();
        let exact = p.evaluate(&[rat(1, 2), rat(3, 4), rat(-5, 8)]);
        let float = p.eval_f64(&[0.5, 0.75, -0.625]);
        assert!((exact.to_f64().unwrap() - float).abs() < 1e-12);
    }

    #[test]
    fn table_mismatch_is_an_error() {
        let a = Polynomial::parse(&xyz(), "x").unwrap();
        let b = Polynomial::parse(&flat_vars(), "x2").unwrap();
        assert_eq!(a.checked_add(&b), Err(PolyError::TableMismatch));
    }

    #[test]
    fn var_table_rejects_bad_names() {
        assert!(VarTable::new(["2x"]).is_err());
        assert!(VarTable::new(["X"]).is_err());
        assert!(VarTable::new(["x_1"]).is_err());
        assert!(VarTable::new(["x", "x"]).is_err());
        assert!(VarTable::new([""]).is_err());
    }

    #[test]
    fn leading_term_of_zero_is_none() {
        let z = Polynomial::zero(&xyz());
        assert!(z.leading_term(MonomialOrder::Lex).is_none());
        assert_eq!(z.total_degree(), None);
        assert_eq!(z.to_string(), "0");
    }

    // --- property tests ---

    fn six_vars() -> Arc<VarTable> {
        VarTable::new(["a", "b", "c", "d", "e", "f"]).unwrap()
    }

    prop_compose! {
        fn arb_poly()(raw in prop::collection::vec(
            (prop::collection::vec(0u32..4, 6), -9i64..=9),
            0..8,
        )) -> Polynomial {
            let vars = six_vars();
            let terms = raw
                .into_iter()
                .map(|(e, c)| (Monomial::from_exps(e), Rat::from_integer(BigInt::from(c))))
                .collect();
            Polynomial::from_terms(&vars, terms)
        }
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a + &(-&a)).is_zero());
            prop_assert_eq!(&a * &Polynomial::one(a.vars()), a.clone());
        }

        #[test]
        fn grevlex_leader_has_max_degree(a in arb_poly()) {
            if let Some((m, _)) = a.leading_term(MonomialOrder::Grevlex) {
                prop_assert_eq!(Some(m.degree()), a.total_degree());
            }
        }

        #[test]
        fn differentiation_is_linear_and_leibniz(a in arb_poly(), b in arb_poly()) {
            for v in 0..6 {
                let sum_rule = (&a + &b).differentiate(v);
                prop_assert_eq!(&sum_rule, &(&a.differentiate(v) + &b.differentiate(v)));
                let product_rule = (&a * &b).differentiate(v);
                let expect = &(&a.differentiate(v) * &b) + &(&a * &b.differentiate(v));
                prop_assert_eq!(product_rule, expect);
            }
        }

        #[test]
        fn parse_format_round_trip(a in arb_poly()) {
            let q = Polynomial::parse(a.vars(), &a.to_string()).unwrap();
            prop_assert_eq!(a, q);
        }
    }
}
