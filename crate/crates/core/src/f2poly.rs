//! Sparse polynomials in `Z/2[w2, w3]`.
//!
//! A polynomial is a finite set of monomials `(p, q)` standing for
//! `w2^p * w3^q`; a monomial is present iff its coefficient is 1. Addition is
//! symmetric difference and multiplication collects all pairwise exponent sums,
//! cancelling products that occur an even number of times.
//!
//! Monomials are ordered lexicographically: `(p, q) > (r, s)` iff `p > r`, or
//! `p == r` and `q > s`. Terms are stored strictly descending, so the leading
//! term is always the first entry.
//!
//! Arithmetic through the operator traits panics on exponent overflow; the
//! `checked_*` methods report it as [`PolyError::ExponentOverflow`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("no leading term: polynomial is zero")]
    NoLeadingTerm,
    #[error("not reducible: no monomial is divisible by {0}")]
    NotReducible(Monomial),
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("terms are not in strictly descending lex order")]
    NotCanonical,
}

/// The monomial `w2^p * w3^q`.
///
/// The derived ordering compares `p` first and then `q`, which is exactly the
/// lexicographic order used throughout the crate.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(from = "(u32, u32)", into = "(u32, u32)")]
pub struct Monomial {
    pub p: u32,
    pub q: u32,
}

impl From<(u32, u32)> for Monomial {
    fn from((p, q): (u32, u32)) -> Self {
        Monomial { p, q }
    }
}

impl From<Monomial> for (u32, u32) {
    fn from(m: Monomial) -> Self {
        (m.p, m.q)
    }
}

impl Monomial {
    pub const ONE: Monomial = Monomial { p: 0, q: 0 };

    pub const fn new(p: u32, q: u32) -> Self {
        Monomial { p, q }
    }

    /// Cohomological degree `2p + 3q`.
    pub fn degree(self) -> u64 {
        2 * u64::from(self.p) + 3 * u64::from(self.q)
    }

    /// Number of factors `p + q`.
    pub fn length(self) -> u64 {
        u64::from(self.p) + u64::from(self.q)
    }

    pub fn checked_mul(self, other: Monomial) -> Result<Monomial, PolyError> {
        Ok(Monomial {
            p: self.p.checked_add(other.p).ok_or(PolyError::ExponentOverflow)?,
            q: self.q.checked_add(other.q).ok_or(PolyError::ExponentOverflow)?,
        })
    }

    /// True when `self` divides `other` (componentwise `<=`).
    pub fn divides(self, other: Monomial) -> bool {
        self.p <= other.p && self.q <= other.q
    }

    /// `other / self`, if `self` divides `other`.
    pub fn quotient_of(self, other: Monomial) -> Option<Monomial> {
        self.divides(other).then(|| Monomial {
            p: other.p - self.p,
            q: other.q - self.q,
        })
    }

    pub fn lcm(self, other: Monomial) -> Monomial {
        Monomial {
            p: self.p.max(other.p),
            q: self.q.max(other.q),
        }
    }

    /// True when the two monomials share no variable.
    pub fn is_coprime(self, other: Monomial) -> bool {
        self.p.min(other.p) == 0 && self.q.min(other.q) == 0
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        self.checked_mul(rhs)
            .unwrap_or_else(|_| panic!("exponent overflow in {self} * {rhs}"))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn factor(f: &mut fmt::Formatter<'_>, var: &str, e: u32) -> fmt::Result {
            if e == 1 {
                write!(f, "{var}")
            } else {
                write!(f, "{var}^{e}")
            }
        }
        match (self.p, self.q) {
            (0, 0) => write!(f, "1"),
            (p, 0) => factor(f, "w2", p),
            (0, q) => factor(f, "w3", q),
            (p, q) => {
                factor(f, "w2", p)?;
                write!(f, "*")?;
                factor(f, "w3", q)
            }
        }
    }
}

/// Lex comparison of two monomials.
pub fn mono_cmp(a: Monomial, b: Monomial) -> Ordering {
    a.cmp(&b)
}

pub fn lcm_mono(a: Monomial, b: Monomial) -> Monomial {
    a.lcm(b)
}

/// A polynomial over GF(2), stored as a strictly descending list of monomials.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Monomial>", into = "Vec<Monomial>")]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl TryFrom<Vec<Monomial>> for Polynomial {
    type Error = PolyError;

    /// Accepts only canonical (strictly descending) term lists.
    fn try_from(terms: Vec<Monomial>) -> Result<Self, PolyError> {
        if terms.windows(2).all(|w| w[0] > w[1]) {
            Ok(Polynomial { terms })
        } else {
            Err(PolyError::NotCanonical)
        }
    }
}

impl From<Polynomial> for Vec<Monomial> {
    fn from(f: Polynomial) -> Self {
        f.terms
    }
}

impl From<Monomial> for Polynomial {
    fn from(m: Monomial) -> Self {
        Polynomial { terms: vec![m] }
    }
}

impl FromIterator<Monomial> for Polynomial {
    /// Sums the given monomials; repeated monomials cancel in pairs.
    fn from_iter<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut terms: Vec<Monomial> = iter.into_iter().collect();
        Polynomial::from_unsorted(&mut terms)
    }
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Monomial::ONE.into()
    }

    pub fn monomial(p: u32, q: u32) -> Self {
        Monomial::new(p, q).into()
    }

    /// Builds a polynomial from `(p, q)` pairs, cancelling duplicates in pairs.
    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        pairs.iter().map(|&pq| Monomial::from(pq)).collect()
    }

    fn from_unsorted(terms: &mut Vec<Monomial>) -> Self {
        terms.sort_unstable_by(|a, b| b.cmp(a));
        let mut out = Vec::with_capacity(terms.len());
        let mut i = 0;
        while i < terms.len() {
            let mut j = i + 1;
            while j < terms.len() && terms[j] == terms[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(terms[i]);
            }
            i = j;
        }
        Polynomial { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in strictly descending lex order.
    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn contains(&self, m: Monomial) -> bool {
        self.terms.binary_search_by(|t| m.cmp(t)).is_ok()
    }

    /// Lex-greatest term; `O(1)`.
    pub fn lt(&self) -> Option<Monomial> {
        self.terms.first().copied()
    }

    pub fn leading_term(&self) -> Result<Monomial, PolyError> {
        self.lt().ok_or(PolyError::NoLeadingTerm)
    }

    /// Largest cohomological degree of any term, `None` for zero.
    pub fn max_degree(&self) -> Option<u64> {
        self.terms.iter().map(|m| m.degree()).max()
    }

    /// The common degree of all terms, if the polynomial is nonzero and
    /// homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        let d = self.lt()?.degree();
        self.terms.iter().all(|m| m.degree() == d).then_some(d)
    }

    /// Nonzero homogeneous components, ascending by degree.
    pub fn homogeneous_components(&self) -> Vec<(u64, Polynomial)> {
        let mut by_degree: std::collections::BTreeMap<u64, Vec<Monomial>> = Default::default();
        for &m in &self.terms {
            by_degree.entry(m.degree()).or_default().push(m);
        }
        by_degree
            .into_iter()
            .map(|(d, terms)| (d, Polynomial { terms }))
            .collect()
    }

    /// Drops every term of degree above `cap`.
    pub fn truncate_degree(&self, cap: u64) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().copied().filter(|m| m.degree() <= cap).collect(),
        }
    }

    pub fn checked_mul_monomial(&self, m: Monomial) -> Result<Polynomial, PolyError> {
        // multiplication by a monomial preserves lex order
        let terms = self
            .terms
            .iter()
            .map(|&t| t.checked_mul(m))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Polynomial { terms })
    }

    pub fn mul_monomial(&self, m: Monomial) -> Polynomial {
        self.checked_mul_monomial(m)
            .unwrap_or_else(|_| panic!("exponent overflow multiplying by {m}"))
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.checked_mul_capped(other, None)
    }

    /// Product with every term of degree above `cap` discarded.
    pub fn checked_mul_capped(
        &self,
        other: &Polynomial,
        cap: Option<u64>,
    ) -> Result<Polynomial, PolyError> {
        let mut products = Vec::with_capacity(self.len() * other.len());
        for &a in &self.terms {
            for &b in &other.terms {
                let m = a.checked_mul(b)?;
                if cap.is_none_or(|c| m.degree() <= c) {
                    products.push(m);
                }
            }
        }
        Ok(Polynomial::from_unsorted(&mut products))
    }

    /// `self^e` by square-and-multiply, optionally truncated at degree `cap`
    /// after every step.
    pub fn checked_pow(&self, mut e: u64, cap: Option<u64>) -> Result<Polynomial, PolyError> {
        let mut base = match cap {
            Some(c) => self.truncate_degree(c),
            None => self.clone(),
        };
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul_capped(&base, cap)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul_capped(&base, cap)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u64) -> Polynomial {
        self.checked_pow(e, None)
            .unwrap_or_else(|_| panic!("exponent overflow raising to power {e}"))
    }

    /// Adds `m` in place (toggles its presence).
    pub fn toggle(&mut self, m: Monomial) {
        match self.terms.binary_search_by(|t| m.cmp(t)) {
            Ok(idx) => {
                self.terms.remove(idx);
            }
            Err(idx) => self.terms.insert(idx, m),
        }
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    /// Symmetric difference of the term sets, by a linear merge.
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let (a, b) = (&self.terms, &rhs.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Greater => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Polynomial { terms: out }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        *self = &*self + rhs;
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs)
            .unwrap_or_else(|_| panic!("exponent overflow in polynomial product"))
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

pub fn add(f: &Polynomial, g: &Polynomial) -> Polynomial {
    f + g
}

pub fn mul(f: &Polynomial, g: &Polynomial) -> Polynomial {
    f * g
}

pub fn leading_term(f: &Polynomial) -> Result<Monomial, PolyError> {
    f.leading_term()
}

/// `(L/LT(F))·F + (L/LT(G))·G` with `L = lcm(LT(F), LT(G))`.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    let (lf, lg) = (f.leading_term()?, g.leading_term()?);
    let l = lf.lcm(lg);
    let a = f.checked_mul_monomial(lf.quotient_of(l).expect("lt divides lcm"))?;
    let b = g.checked_mul_monomial(lg.quotient_of(l).expect("lt divides lcm"))?;
    Ok(&a + &b)
}

/// Eliminates the lex-greatest monomial of `f` divisible by `LT(g)`.
///
/// Returns the new polynomial together with the quotient monomial used.
pub fn reduce_once_with_quotient(
    f: &Polynomial,
    g: &Polynomial,
) -> Result<(Polynomial, Monomial), PolyError> {
    let lg = g.leading_term()?;
    let t = f
        .terms
        .iter()
        .copied()
        .find(|&t| lg.divides(t))
        .ok_or(PolyError::NotReducible(lg))?;
    let quotient = lg.quotient_of(t).expect("checked divisibility");
    Ok((f + &g.checked_mul_monomial(quotient)?, quotient))
}

pub fn reduce_once(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    reduce_once_with_quotient(f, g).map(|(r, _)| r)
}

/// Full division remainder of `f` by `basis`.
///
/// Always reduces the lex-greatest reducible monomial, using the first basis
/// element (in list order) whose leading term divides it. Zero entries of
/// `basis` are ignored.
pub fn normal_form(f: &Polynomial, basis: &[Polynomial]) -> Polynomial {
    let divisors: Vec<(Monomial, &Polynomial)> =
        basis.iter().filter_map(|g| g.lt().map(|lt| (lt, g))).collect();
    if divisors.is_empty() {
        return f.clone();
    }
    // Reducing t only introduces terms below t, so terms that were found
    // irreducible stay final and come out in descending order.
    let mut work: BTreeSet<Monomial> = f.terms.iter().copied().collect();
    let mut remainder = Vec::new();
    while let Some(t) = work.pop_last() {
        match divisors.iter().find(|(lt, _)| lt.divides(t)) {
            Some(&(lt, g)) => {
                let quotient = lt.quotient_of(t).expect("checked divisibility");
                for &u in &g.terms[1..] {
                    let m = u * quotient;
                    if !work.remove(&m) {
                        work.insert(m);
                    }
                }
            }
            None => remainder.push(t),
        }
    }
    Polynomial { terms: remainder }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, m) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

pub fn format_poly(f: &Polynomial) -> String {
    f.to_string()
}

/// Parses the text form, e.g. `"w2^3 + w3^2"`, `"w2*w3^2 + 1"` or `"0"`.
///
/// Whitespace around `+` and `*` is optional. Repeated terms cancel.
pub fn parse_poly(text: &str) -> Result<Polynomial, PolyError> {
    Parser { src: text.as_bytes(), pos: 0 }.polynomial()
}

impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected exponent");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        digits.parse().or_else(|_| {
            self.pos = start;
            self.err("exponent out of range")
        })
    }

    fn polynomial(mut self) -> Result<Polynomial, PolyError> {
        self.skip_ws();
        if self.pos == self.src.len() {
            return self.err("empty input");
        }
        let mut terms = Vec::new();
        let mut zero_seen = false;
        loop {
            match self.term()? {
                Some(m) => terms.push(m),
                None => zero_seen = true,
            }
            if !self.eat(b'+') {
                break;
            }
        }
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("unexpected trailing input");
        }
        if zero_seen && !terms.is_empty() {
            // "0" only stands alone
            return Err(PolyError::Syntax { pos: 0, msg: "\"0\" mixed with other terms".into() });
        }
        Ok(Polynomial::from_unsorted(&mut terms))
    }

    /// A product of factors; `None` for the literal `0`.
    fn term(&mut self) -> Result<Option<Monomial>, PolyError> {
        let mut m = Monomial::ONE;
        loop {
            self.skip_ws();
            let rest = &self.src[self.pos..];
            if rest.starts_with(b"w2") || rest.starts_with(b"w3") {
                let var = rest[1];
                self.pos += 2;
                let e = if self.eat(b'^') { self.number()? } else { 1 };
                let factor = if var == b'2' { Monomial::new(e, 0) } else { Monomial::new(0, e) };
                m = match m.checked_mul(factor) {
                    Ok(m) => m,
                    Err(_) => return self.err("exponent out of range"),
                };
            } else if rest.starts_with(b"1") {
                self.pos += 1;
            } else if rest.starts_with(b"0") {
                self.pos += 1;
                return Ok(None);
            } else {
                return self.err("expected \"w2\", \"w3\", \"1\" or \"0\"");
            }
            if !self.eat(b'*') {
                return Ok(Some(m));
            }
        }
    }
}
