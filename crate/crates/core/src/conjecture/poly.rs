//! Sparse multivariate polynomials with exact rational coefficients, and
//! systems of polynomial equalities and inequalities with plain-text and
//! SMT-LIB emission.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent vector, one entry per declared variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// Graded lexicographic: higher total degree first, ties broken by the
/// exponent of the earliest variable.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` variables; terms iterate in graded lexicographic
/// order and never carry zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial(vec![0; nvars]), c);
        p
    }

    pub fn int(nvars: usize, c: i64) -> Self {
        Polynomial::constant(nvars, rat(c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial(e), BigRational::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
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

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest total degree in the variables selected by `vars`.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        self.terms.keys().map(|m| vars.iter().map(|&i| m.0[i]).sum()).max().unwrap_or(0)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Polynomial::int(self.nvars, 1), |acc, _| &acc * self)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = Polynomial::zero(self.nvars);
        for (m, k) in &self.terms {
            p.add_term(m.clone(), k * c);
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let coeff = c.to_f64().unwrap_or(f64::NAN);
                m.0.iter().zip(x).fold(coeff, |acc, (&e, &v)| acc * v.powi(e as i32))
            })
            .sum()
    }

    /// Exact value at the rational points represented by `x`, rounded once.
    ///
    /// Every finite `f64` is `m · 2^e` with integer `m`, so each term is an
    /// integer times a power of two and the sum is formed in integers over
    /// the common denominator of the coefficients.
    pub fn eval_exact(&self, x: &[f64]) -> Result<f64> {
        let mut mantissas = Vec::with_capacity(x.len());
        let mut exps = Vec::with_capacity(x.len());
        for &v in x {
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            let (m, e, sign) = num_traits::Float::integer_decode(v);
            mantissas.push(BigInt::from(m) * i64::from(sign));
            exps.push(i64::from(e));
        }
        let max_deg: Vec<u32> = (0..self.nvars).map(|i| self.degree_in(&[i])).collect();
        let powers: Vec<Vec<BigInt>> = mantissas
            .iter()
            .zip(&max_deg)
            .map(|(m, &d)| {
                let mut p = vec![BigInt::one()];
                for k in 1..=d as usize {
                    let next = &p[k - 1] * m;
                    p.push(next);
                }
                p
            })
            .collect();
        let lcm = self.terms.values().fold(BigInt::one(), |l, c| num_integer::Integer::lcm(&l, c.denom()));
        let scaled: Vec<(BigInt, i64)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut t = c.numer() * (&lcm / c.denom());
                let mut e = 0i64;
                for (i, &k) in m.0.iter().enumerate() {
                    if k > 0 {
                        t *= &powers[i][k as usize];
                        e += i64::from(k) * exps[i];
                    }
                }
                (t, e)
            })
            .collect();
        let Some(emin) = scaled.iter().map(|s| s.1).min() else {
            return Ok(0.0);
        };
        let total: BigInt = scaled.into_iter().map(|(t, e)| t << ((e - emin) as usize)).sum();
        let (num, den) = if emin >= 0 { (total << emin as usize, lcm) } else { (total, lcm << (-emin) as usize) };
        Ok(BigRational::new(num, den).to_f64().unwrap_or(f64::NAN))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self + &(-o)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&rat(-1))
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let e = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                p.add_term(Monomial(e), ca * cb);
            }
        }
        p
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, o: Polynomial) -> Polynomial {
                (&self).$f(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `p = 0`
    Eq,
    /// `p > 0`
    Gt,
    /// `p >= 0`
    Ge,
}

impl Relation {
    fn plain(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub poly: Polynomial,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialSystem {
    pub variables: Vec<String>,
    pub equalities: Vec<Polynomial>,
    /// Each inequality reads `poly > 0` or `poly >= 0`.
    pub inequalities: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Plain,
    Smtlib,
}

impl PolynomialSystem {
    pub fn equality_degrees(&self) -> Vec<u32> {
        self.equalities.iter().map(Polynomial::degree).collect()
    }

    pub fn inequality_degrees(&self) -> Vec<u32> {
        self.inequalities.iter().map(|c| c.poly.degree()).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn constraints(&self) -> impl Iterator<Item = Constraint> + '_ {
        self.equalities
            .iter()
            .map(|p| Constraint { poly: p.clone(), relation: Relation::Eq })
            .chain(self.inequalities.iter().cloned())
    }
}

fn coeff_text(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn monomial_plain(m: &Monomial, vars: &[String]) -> Vec<String> {
    m.0.iter()
        .zip(vars)
        .filter(|(e, _)| **e > 0)
        .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect()
}

/// Expanded form such as `3*h^2*ta - 1/2*tb + 7`.
pub fn poly_plain(p: &Polynomial, vars: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors = monomial_plain(m, vars);
        if factors.is_empty() || !a.is_one() {
            factors.insert(0, coeff_text(&a));
        }
        out.push_str(&factors.join("*"));
    }
    out
}

fn smt_number(c: &BigRational) -> String {
    let a = c.abs();
    let body = if a.is_integer() { a.numer().to_string() } else { format!("(/ {} {})", a.numer(), a.denom()) };
    if c.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn poly_smt(p: &Polynomial, vars: &[String]) -> String {
    let terms: Vec<String> = p
        .terms()
        .map(|(m, c)| {
            let mut factors: Vec<String> = Vec::new();
            if !c.is_one() || m.degree() == 0 {
                factors.push(smt_number(c));
            }
            for (&e, v) in m.0.iter().zip(vars) {
                factors.extend(std::iter::repeat(v.clone()).take(e as usize));
            }
            if factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                format!("(* {})", factors.join(" "))
            }
        })
        .collect();
    match terms.len() {
        0 => "0".into(),
        1 => terms[0].clone(),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

pub fn emit_system(sys: &PolynomialSystem, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Plain => {
            writeln!(out, "variables: {}", sys.variables.join(" ")).expect("string write");
            for c in sys.constraints() {
                writeln!(out, "{} {} 0", poly_plain(&c.poly, &sys.variables), c.relation.plain())
                    .expect("string write");
            }
        }
        Format::Smtlib => {
            out.push_str("(set-logic QF_NRA)\n");
            for v in &sys.variables {
                writeln!(out, "(declare-const {v} Real)").expect("string write");
            }
            for c in sys.constraints() {
                let op = c.relation.plain();
                writeln!(out, "; {} {op} 0", poly_plain(&c.poly, &sys.variables)).expect("string write");
                writeln!(out, "(assert ({op} {} 0))", poly_smt(&c.poly, &sys.variables)).expect("string write");
            }
            out.push_str("(check-sat)\n(exit)\n");
        }
    }
    out
}

fn parse_term(text: &str, vars: &[String]) -> Result<(Monomial, BigRational)> {
    let mut coeff = BigRational::one();
    let mut e = vec![0u32; vars.len()];
    for factor in text.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{text}`")));
        }
        if factor.starts_with(|c: char| c.is_ascii_digit()) {
            let (n, d) = factor.split_once('/').unwrap_or((factor, "1"));
            let parse = |s: &str| s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad number `{factor}`")));
            coeff *= BigRational::new(parse(n)?, parse(d)?);
        } else {
            let (name, pow) = factor.split_once('^').unwrap_or((factor, "1"));
            let i = vars
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
            e[i] += pow.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?;
        }
    }
    Ok((Monomial(e), coeff))
}

/// Parses an expanded polynomial as written by [`poly_plain`].
pub fn parse_poly(text: &str, vars: &[String]) -> Result<Polynomial> {
    let mut p = Polynomial::zero(vars.len());
    let text = text.trim();
    let (mut sign, mut rest) = match text.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, text),
    };
    loop {
        let cut = [rest.find(" + "), rest.find(" - ")].into_iter().flatten().min();
        let (term, next) = match cut {
            Some(i) => (&rest[..i], Some((&rest[i + 1..i + 2], &rest[i + 3..]))),
            None => (rest, None),
        };
        let (m, c) = parse_term(term, vars)?;
        p.add_term(m, c * rat(sign));
        match next {
            Some((op, r)) => {
                sign = if op == "-" { -1 } else { 1 };
                rest = r;
            }
            None => break,
        }
    }
    Ok(p)
}

/// Inverse of [`emit_system`] with [`Format::Plain`].
pub fn parse_system(text: &str) -> Result<PolynomialSystem> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let vars: Vec<String> = header
        .strip_prefix("variables:")
        .ok_or_else(|| Error::Parse("missing variables header".into()))?
        .split_whitespace()
        .map(String::from)
        .collect();
    let mut sys = PolynomialSystem { variables: vars.clone(), equalities: vec![], inequalities: vec![] };
    for line in lines {
        let (lhs, relation) = if let Some(l) = line.strip_suffix(" >= 0") {
            (l, Relation::Ge)
        } else if let Some(l) = line.strip_suffix(" > 0") {
            (l, Relation::Gt)
        } else if let Some(l) = line.strip_suffix(" = 0") {
            (l, Relation::Eq)
        } else {
            return Err(Error::Parse(format!("no relation in `{line}`")));
        };
        let poly = parse_poly(lhs, &vars)?;
        match relation {
            Relation::Eq => sys.equalities.push(poly),
            _ => sys.inequalities.push(Constraint { poly, relation }),
        }
    }
    Ok(sys)
}
