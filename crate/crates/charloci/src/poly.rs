//! Sparse multivariate polynomials over Q with lex/grevlex orders.
//!
//! Terms are kept as a list sorted in strictly descending monomial order,
//! with no zero coefficients stored.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub type Q = BigRational;
/// Exponent vector; length always equals the ring's variable count.
pub type Exp = Vec<u32>;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Elimination order for the first `k` variables: total degree in the
    /// first block decides first, ties broken by grevlex on everything.
    Elim(usize),
}

impl MonomialOrder {
    pub fn cmp_exp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match self {
            MonomialOrder::Lex => a.cmp(b),
            MonomialOrder::GrevLex => grevlex(a, b),
            MonomialOrder::Elim(k) => {
                let da: u64 = a[..*k].iter().map(|&e| e as u64).sum();
                let db: u64 = b[..*k].iter().map(|&e| e as u64).sum();
                da.cmp(&db).then_with(|| grevlex(a, b))
            }
        }
    }
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {
            for i in (0..a.len()).rev() {
                match a[i].cmp(&b[i]) {
                    Ordering::Equal => continue,
                    // smaller exponent in the last differing position wins
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                }
            }
            Ordering::Equal
        }
        other => other,
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub vars: Vec<String>,
    pub order: MonomialOrder,
}

impl PolyRing {
    pub fn new(vars: Vec<String>, order: MonomialOrder) -> Result<Arc<Self>> {
        if vars.is_empty() {
            return Err(Error::InvalidInput("ring needs at least one variable".into()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(Error::InvalidInput(format!("duplicate variable {v}")));
            }
        }
        Ok(Arc::new(PolyRing { vars, order }))
    }

    /// Ring x1..xn with the given order.
    pub fn standard(n: usize, order: MonomialOrder) -> Arc<Self> {
        PolyRing::new((1..=n).map(|i| format!("x{i}")).collect(), order).unwrap()
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Same ring up to the monomial order tag.
    pub fn same_vars(&self, other: &PolyRing) -> bool {
        self.vars == other.vars
    }
}

pub fn exp_mul(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn exp_div(a: &[u32], b: &[u32]) -> Option<Exp> {
    if a.iter().zip(b).all(|(x, y)| x >= y) {
        Some(a.iter().zip(b).map(|(x, y)| x - y).collect())
    } else {
        None
    }
}

pub fn exp_lcm(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

pub fn exp_deg(a: &[u32]) -> u64 {
    a.iter().map(|&e| e as u64).sum()
}

#[derive(Debug, Clone)]
pub struct Poly {
    pub ring: Arc<PolyRing>,
    /// Sorted strictly descending in the ring's order; no zero coefficients.
    pub terms: Vec<(Exp, Q)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.ring.same_vars(&other.ring) && self.terms == other.terms
    }
}
impl Eq for Poly {}

impl Poly {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Poly { ring: ring.clone(), terms: vec![] }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Q) -> Self {
        if c.is_zero() {
            return Poly::zero(ring);
        }
        Poly { ring: ring.clone(), terms: vec![(vec![0; ring.n()], c)] }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Poly::constant(ring, Q::one())
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        let mut e = vec![0u32; ring.n()];
        e[i] = 1;
        Poly { ring: ring.clone(), terms: vec![(e, Q::one())] }
    }

    pub fn monomial(ring: &Arc<PolyRing>, exp: Exp, c: Q) -> Self {
        assert_eq!(exp.len(), ring.n());
        if c.is_zero() {
            return Poly::zero(ring);
        }
        Poly { ring: ring.clone(), terms: vec![(exp, c)] }
    }

    /// Normalizes an arbitrary term list: merge duplicates, drop zeros, sort.
    pub fn from_terms(ring: &Arc<PolyRing>, mut terms: Vec<(Exp, Q)>) -> Self {
        terms.sort_by(|a, b| ring.order.cmp_exp(&b.0, &a.0));
        let mut out: Vec<(Exp, Q)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == e {
                    last.1 += c;
                    continue;
                }
            }
            out.push((e, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Poly { ring: ring.clone(), terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.len() <= 1 && self.terms.iter().all(|(e, _)| exp_deg(e) == 0)
    }

    /// Nonzero constant, i.e. a unit of the polynomial ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && exp_deg(&self.terms[0].0) == 0
    }

    pub fn leading(&self) -> Option<(&Exp, &Q)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(e, _)| exp_deg(e)).max()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert!(self.ring.same_vars(&other.ring));
        let ord = &self.ring.order;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match ord.cmp_exp(&self.terms[i].0, &other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Poly { ring: self.ring.clone(), terms: out }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul_q(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul_term(&self, exp: &[u32], c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, k)| (exp_mul(e, exp), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert!(self.ring.same_vars(&other.ring));
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ring);
        }
        let mut acc = Poly::zero(&self.ring);
        for (e, c) in &self.terms {
            acc = acc.add(&other.mul_term(e, c));
        }
        acc
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Makes the leading coefficient 1.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.mul_q(&inv)
            }
        }
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.ring.n());
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    v *= &point[i];
                }
            }
            total += v;
        }
        total
    }

    /// Substitutes x_i -> c_i * x_i.
    pub fn scale_vars(&self, scales: &[Q]) -> Poly {
        assert_eq!(scales.len(), self.ring.n());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut k = c.clone();
                for (i, &ei) in e.iter().enumerate() {
                    for _ in 0..ei {
                        k *= &scales[i];
                    }
                }
                (e.clone(), k)
            })
            .collect();
        Poly { ring: self.ring.clone(), terms }
    }

    /// Reinterprets the polynomial in `target`, sending variable `i` of the
    /// source ring to variable `map[i]` of the target.
    pub fn map_vars(&self, target: &Arc<PolyRing>, map: &[usize]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0u32; target.n()];
                for (i, &ei) in e.iter().enumerate() {
                    ne[map[i]] += ei;
                }
                (ne, c.clone())
            })
            .collect();
        Poly::from_terms(target, terms)
    }

    /// Exact division; `None` when `f` does not divide `self`.
    pub fn divide_exact(&self, f: &Poly) -> Option<Poly> {
        let (flt, flc) = f.leading()?;
        let mut rem = self.clone();
        let mut quo = Poly::zero(&self.ring);
        while let Some((rlt, rlc)) = rem.leading() {
            let q_exp = exp_div(rlt, flt)?;
            let q_c = rlc / flc;
            let t = Poly::monomial(&self.ring, q_exp, q_c);
            rem = rem.sub(&t.mul(f));
            quo = quo.add(&t);
        }
        Some(quo)
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn fmt_q(c: &Q) -> String {
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_mono(ring: &PolyRing, e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, &k)| {
            if k == 1 {
                ring.vars[i].clone()
            } else {
                format!("{}^{}", ring.vars[i], k)
            }
        })
        .collect();
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let mono = fmt_mono(&self.ring, e);
            let abs = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if mono.is_empty() {
                write!(f, "{}", fmt_q(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", fmt_q(&abs), mono)?;
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
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(&b) = self.src.get(self.pos) {
            if b == b'\n' {
                self.line += 1;
                self.col = 1;
                self.pos += 1;
            } else if b.is_ascii_whitespace() {
                self.col += 1;
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
            self.col += 1;
        }
        b
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
            self.col += 1;
        }
        if start == self.pos {
            return Err(self.err("expected number"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphabetic() || *b == b'_') {
            return Err(self.err("expected identifier"));
        }
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_') {
            self.pos += 1;
            self.col += 1;
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }
}

impl Poly {
    /// Parses the text grammar shared by all file formats: terms joined by
    /// `+`/`-`; a term is `coef*mono`, `mono`, or `coef`; `coef` is `p` or
    /// `p/q`; `mono` is e.g. `x1^3*x2`. Round-trips exactly with `Display`.
    pub fn parse(ring: &Arc<PolyRing>, src: &str) -> Result<Poly> {
        let mut lx = Lexer::new(src);
        let mut acc = Poly::zero(ring);
        let mut first = true;
        loop {
            let mut sign = Q::one();
            match lx.peek() {
                None if first => break,
                None => return Err(lx.err("expected term")),
                Some(b'+') => {
                    lx.bump();
                }
                Some(b'-') => {
                    sign = -Q::one();
                    lx.bump();
                }
                Some(_) if first => {}
                Some(b) => return Err(lx.err(format!("expected + or -, found {:?}", b as char))),
            }
            first = false;
            let term = Poly::parse_term(ring, &mut lx)?;
            acc = acc.add(&term.mul_q(&sign));
            if lx.peek().is_none() {
                break;
            }
        }
        Ok(acc)
    }

    fn parse_term(ring: &Arc<PolyRing>, lx: &mut Lexer<'_>) -> Result<Poly> {
        let mut acc = Poly::one(ring);
        loop {
            match lx.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let numer = lx.number()?;
                    let denom = if lx.peek() == Some(b'/') {
                        lx.bump();
                        let d = lx.number()?;
                        if d.is_zero() {
                            return Err(lx.err("zero denominator"));
                        }
                        d
                    } else {
                        BigInt::one()
                    };
                    acc = acc.mul_q(&Q::new(numer, denom));
                }
                Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                    let name = lx.ident()?;
                    let i = ring
                        .var_index(&name)
                        .ok_or_else(|| lx.err(format!("unknown variable {name}")))?;
                    let exp = if lx.peek() == Some(b'^') {
                        lx.bump();
                        let e = lx.number()?;
                        u32::try_from(e).map_err(|_| lx.err("exponent out of range"))?
                    } else {
                        1
                    };
                    let mut ev = vec![0u32; ring.n()];
                    ev[i] = exp;
                    acc = acc.mul(&Poly::monomial(ring, ev, Q::one()));
                }
                _ => return Err(lx.err("expected coefficient or variable")),
            }
            if lx.peek() == Some(b'*') {
                lx.bump();
            } else {
                break;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring2() -> Arc<PolyRing> {
        PolyRing::new(vec!["x".into(), "y".into()], MonomialOrder::Lex).unwrap()
    }

    #[test]
    fn grevlex_total_and_multiplicative_on_samples() {
        let ord = MonomialOrder::GrevLex;
        let monos: Vec<Vec<u32>> = vec![
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![2, 0, 1],
            vec![1, 1, 1],
            vec![0, 3, 0],
            vec![2, 2, 2],
        ];
        for a in &monos {
            for b in &monos {
                // totality / antisymmetry
                assert_eq!(ord.cmp_exp(a, b), ord.cmp_exp(b, a).reverse());
                for c in &monos {
                    // multiplicativity
                    assert_eq!(
                        ord.cmp_exp(a, b),
                        ord.cmp_exp(&exp_mul(a, c), &exp_mul(b, c))
                    );
                }
            }
        }
        // 1 is the least monomial
        for a in &monos {
            if exp_deg(a) > 0 {
                assert_eq!(ord.cmp_exp(a, &vec![0, 0, 0]), Ordering::Greater);
            }
        }
    }

    #[test]
    fn arithmetic_basics() {
        let r = ring2();
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        let p = x.sub(&Poly::one(&r)).mul(&y.sub(&Poly::one(&r)));
        // (x-1)(y-1) = xy - x - y + 1
        assert_eq!(p.terms.len(), 4);
        assert_eq!(p.eval(&[q_int(1), q_int(5)]), q_int(0));
        assert_eq!(p.eval(&[q_int(3), q_int(2)]), q_int(2));
    }

    #[test]
    fn parse_print_round_trip() {
        let r = ring2();
        for src in [
            "x^2*y - 3/2*x + 7",
            "0",
            "-x + y",
            "1/3",
            "x*y",
            "-5/2*x^3 + x^2*y^2 - 1",
        ] {
            let p = Poly::parse(&r, src).unwrap();
            let printed = p.to_string();
            let q = Poly::parse(&r, &printed).unwrap();
            assert_eq!(p, q, "round trip failed for {src}: printed {printed}");
            // printing is canonical
            assert_eq!(printed, q.to_string());
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        let r = ring2();
        assert!(Poly::parse(&r, "x +").is_err());
        assert!(Poly::parse(&r, "z").is_err());
        assert!(Poly::parse(&r, "1/0").is_err());
    }

    #[test]
    fn exact_division() {
        let r = ring2();
        let p = Poly::parse(&r, "x^2 - y^2").unwrap();
        let f = Poly::parse(&r, "x - y").unwrap();
        let q = p.divide_exact(&f).unwrap();
        assert_eq!(q, Poly::parse(&r, "x + y").unwrap());
        assert!(Poly::parse(&r, "x^2 - y").unwrap().divide_exact(&f).is_none());
    }
}
