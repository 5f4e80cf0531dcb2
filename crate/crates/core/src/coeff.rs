//! Exact coefficient rings.
//!
//! Every structure in the engine is generic over a [`Ring`]. Linear algebra
//! that needs division is generic over [`Field`]. The concrete rings are the
//! rationals [`Q`], prime fields [`Fp`], univariate polynomials [`Poly`] over a
//! field, jets [`Trunc`] (polynomials modulo `h^N`) and rational functions
//! [`RatFunc`]. Values are always stored in canonical form, so `==` is
//! structural equality of ring elements.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("cannot parse scalar {text:?} for ring {ring}: {reason}")]
    Parse {
        text: String,
        ring: String,
        reason: String,
    },
    #[error("denominator {0} is not invertible modulo {1}")]
    NotInvertible(String, u64),
    #[error("ring mismatch: expected {expected}, found {found}")]
    RingMismatch { expected: String, found: String },
    #[error("unsupported ring descriptor {0:?}")]
    Unsupported(String),
}

/// Commutative ring with exact, canonical elements.
pub trait Ring: Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_int(n: i64) -> Self;
    fn is_unit(&self) -> bool;
    fn characteristic() -> u64;
    fn descriptor() -> RingDescriptor;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, CoeffError>;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

/// A ring in which every nonzero element is invertible.
pub trait Field: Ring {
    /// Inverse of a nonzero element. Panics on zero.
    fn inv(&self) -> Self;

    fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }
}

/// Runtime description of a coefficient ring, used by the document format and
/// the command line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingDescriptor {
    Rationals,
    PrimeField(u64),
    Poly { var: String, base: Box<RingDescriptor> },
    TruncatedPoly { var: String, order: usize, base: Box<RingDescriptor> },
    FractionField(Box<RingDescriptor>),
}

impl RingDescriptor {
    pub fn is_field(&self) -> bool {
        matches!(
            self,
            RingDescriptor::Rationals | RingDescriptor::PrimeField(_) | RingDescriptor::FractionField(_)
        )
    }

    /// Parses `rationals`, `prime_field(p)`, `poly(h, base)`,
    /// `truncated_poly(h, N, base)` and `fraction_field(poly(h, base))`.
    pub fn parse(text: &str) -> Result<Self, CoeffError> {
        let t = text.trim();
        let bad = |reason: &str| CoeffError::Parse {
            text: text.to_string(),
            ring: "descriptor".into(),
            reason: reason.into(),
        };
        if t == "rationals" || t == "Q" {
            return Ok(RingDescriptor::Rationals);
        }
        let open = t.find('(').ok_or_else(|| bad("expected `name(args)`"))?;
        if !t.ends_with(')') {
            return Err(bad("missing closing parenthesis"));
        }
        let name = &t[..open];
        let args = split_top_level(&t[open + 1..t.len() - 1]);
        match (name, args.as_slice()) {
            ("prime_field", [p]) => {
                let p: u64 = p.trim().parse().map_err(|_| bad("prime is not an integer"))?;
                if !is_prime(p) {
                    return Err(bad("modulus is not prime"));
                }
                Ok(RingDescriptor::PrimeField(p))
            }
            ("poly", [var, base]) => {
                let base = RingDescriptor::parse(base)?;
                if !matches!(base, RingDescriptor::Rationals | RingDescriptor::PrimeField(_)) {
                    return Err(bad("polynomial rings wrap rationals or a prime field only"));
                }
                Ok(RingDescriptor::Poly { var: var.trim().to_string(), base: Box::new(base) })
            }
            ("truncated_poly", [var, order, base]) => {
                let order: usize = order.trim().parse().map_err(|_| bad("order is not an integer"))?;
                if order == 0 {
                    return Err(bad("order must be at least 1"));
                }
                let base = RingDescriptor::parse(base)?;
                if !matches!(base, RingDescriptor::Rationals | RingDescriptor::PrimeField(_)) {
                    return Err(bad("truncated polynomial rings wrap rationals or a prime field only"));
                }
                Ok(RingDescriptor::TruncatedPoly { var: var.trim().to_string(), order, base: Box::new(base) })
            }
            ("fraction_field", [inner]) => {
                let inner = RingDescriptor::parse(inner)?;
                if !matches!(inner, RingDescriptor::Poly { .. }) {
                    return Err(bad("fraction fields are taken of polynomial rings"));
                }
                Ok(RingDescriptor::FractionField(Box::new(inner)))
            }
            _ => Err(bad("unknown ring constructor")),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Rationals => write!(f, "rationals"),
            RingDescriptor::PrimeField(p) => write!(f, "prime_field({p})"),
            RingDescriptor::Poly { var, base } => write!(f, "poly({var}, {base})"),
            RingDescriptor::TruncatedPoly { var, order, base } => {
                write!(f, "truncated_poly({var}, {order}, {base})")
            }
            RingDescriptor::FractionField(inner) => write!(f, "fraction_field({inner})"),
        }
    }
}

pub const fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn parse_err<T>(v: &Value, ring: RingDescriptor, reason: &str) -> Result<T, CoeffError> {
    Err(CoeffError::Parse { text: v.to_string(), ring: ring.to_string(), reason: reason.to_string() })
}

// ---------------------------------------------------------------------------
// Rationals

/// Rational numbers with arbitrary precision.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Q(pub BigRational);

impl Q {
    pub fn new(num: i64, den: i64) -> Self {
        Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn parse(text: &str) -> Result<Self, CoeffError> {
        let err = |reason: &str| CoeffError::Parse {
            text: text.to_string(),
            ring: "rationals".into(),
            reason: reason.into(),
        };
        let t = text.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err("bad numerator"))?;
        let d: BigInt = d.parse().map_err(|_| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        Ok(Q(BigRational::new(n, d)))
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Q(BigRational::zero())
    }
    fn one() -> Self {
        Q(BigRational::one())
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        Q(&self.0 + &other.0)
    }
    fn neg(&self) -> Self {
        Q(-&self.0)
    }
    fn mul(&self, other: &Self) -> Self {
        Q(&self.0 * &other.0)
    }
    fn sub(&self, other: &Self) -> Self {
        Q(&self.0 - &other.0)
    }
    fn from_int(n: i64) -> Self {
        Q(BigRational::from_integer(BigInt::from(n)))
    }
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }
    fn characteristic() -> u64 {
        0
    }
    fn descriptor() -> RingDescriptor {
        RingDescriptor::Rationals
    }
    fn to_json(&self) -> Value {
        Value::String(format!("{}/{}", self.0.numer(), self.0.denom()))
    }
    fn from_json(v: &Value) -> Result<Self, CoeffError> {
        match v {
            Value::String(s) => Q::parse(s),
            Value::Number(n) if n.is_i64() => Ok(Q::from_int(n.as_i64().unwrap())),
            _ => parse_err(v, RingDescriptor::Rationals, "expected \"num/den\""),
        }
    }
}

impl Field for Q {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Q(self.0.recip())
    }
}

// ---------------------------------------------------------------------------
// Prime fields

/// The prime field `Z/P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp<const P: u64>(u64);

impl<const P: u64> Fp<P> {
    const PRIME: () = assert!(is_prime(P), "Fp modulus must be prime");

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::PRIME;
        Fp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.0, P)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Ring for Fp<P> {
    fn zero() -> Self {
        Fp::new(0)
    }
    fn one() -> Self {
        Fp::new(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        Fp(((self.0 as u128 + other.0 as u128) % P as u128) as u64)
    }
    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn mul(&self, other: &Self) -> Self {
        Fp(((self.0 as u128 * other.0 as u128) % P as u128) as u64)
    }
    fn from_int(n: i64) -> Self {
        Fp::new(n)
    }
    fn is_unit(&self) -> bool {
        self.0 != 0
    }
    fn characteristic() -> u64 {
        P
    }
    fn descriptor() -> RingDescriptor {
        RingDescriptor::PrimeField(P)
    }
    fn to_json(&self) -> Value {
        Value::String(format!("{} mod {}", self.0, P))
    }
    fn from_json(v: &Value) -> Result<Self, CoeffError> {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() => return Ok(Fp::new(n.as_i64().unwrap())),
            _ => return parse_err(v, Self::descriptor(), "expected \"k mod p\""),
        };
        let (k, p) = match s.split_once("mod") {
            Some((k, p)) => (k.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        if let Some(p) = p {
            if p.parse::<u64>().ok() != Some(P) {
                return Err(CoeffError::RingMismatch {
                    expected: Self::descriptor().to_string(),
                    found: format!("prime_field({p})"),
                });
            }
        }
        let k: BigInt = k.parse().map_err(|_| CoeffError::Parse {
            text: s.clone(),
            ring: Self::descriptor().to_string(),
            reason: "bad residue".into(),
        })?;
        let r = k.mod_floor(&BigInt::from(P)).to_u64().unwrap();
        Ok(Fp(r))
    }
}

impl<const P: u64> Field for Fp<P> {
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero");
        // Fermat
        let mut result = Self::one();
        let mut base = *self;
        let mut e = P - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }
}

// ---------------------------------------------------------------------------
// Polynomials

/// Univariate polynomial `c0 + c1 h + ...` over a field, trailing zeros stripped.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `h`.
    pub fn var() -> Self {
        Self::monomial(F::one(), 1)
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&F> {
        self.coeffs.last()
    }

    /// Exponent of the largest power of `h` dividing `self`; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, a: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).add(c);
        }
        acc
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv()),
        }
    }

    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("polynomial division by zero");
        let lead_inv = divisor.leading().unwrap().inv();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![F::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = rem[k + d].mul(&lead_inv);
            if !c.is_zero() {
                for (i, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + i] = rem[k + i].sub(&c.mul(dc));
                }
            }
            quot[k] = c;
        }
        rem.truncate(d);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient; panics when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn write_poly<F: Ring>(f: &mut fmt::Formatter<'_>, coeffs: &[F]) -> fmt::Result {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| match k {
            0 => format!("{c}"),
            1 if c.is_one() => "h".to_string(),
            1 => format!("({c})h"),
            _ if c.is_one() => format!("h^{k}"),
            _ => format!("({c})h^{k}"),
        })
        .collect();
    if terms.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", terms.join(" + "))
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs)
    }
}

fn coeffs_from_json<F: Ring>(v: &Value, ring: RingDescriptor) -> Result<Vec<F>, CoeffError> {
    match v {
        Value::Array(items) => items.iter().map(F::from_json).collect(),
        _ => parse_err(v, ring, "expected coefficient list [c0,c1,...]"),
    }
}

impl<F: Field> Ring for Poly<F> {
    fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect())
    }
    fn neg(&self) -> Self {
        Poly { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::from_coeffs(out)
    }
    fn from_int(n: i64) -> Self {
        Self::constant(F::from_int(n))
    }
    fn is_unit(&self) -> bool {
        self.degree() == Some(0)
    }
    fn characteristic() -> u64 {
        F::characteristic()
    }
    fn descriptor() -> RingDescriptor {
        RingDescriptor::Poly { var: "h".into(), base: Box::new(F::descriptor()) }
    }
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| c.to_json()).collect())
    }
    fn from_json(v: &Value) -> Result<Self, CoeffError> {
        match v {
            Value::Array(_) => Ok(Self::from_coeffs(coeffs_from_json(v, Self::descriptor())?)),
            other => Ok(Self::constant(F::from_json(other)?)),
        }
    }
}

// ---------------------------------------------------------------------------
// Truncated polynomials

/// Polynomials modulo `h^N`: order-`N` jets, the desk model of `R[h]/h^N`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Trunc<F, const N: usize> {
    coeffs: Vec<F>,
}

impl<F: Field, const N: usize> Trunc<F, N> {
    pub fn from_coeffs(mut coeffs: Vec<F>) -> Self {
        assert!(N >= 1, "truncation order must be at least 1");
        coeffs.truncate(N);
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Trunc { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: F, k: usize) -> Self {
        if k >= N {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Inverse of a unit (nonzero constant term), via the geometric series.
    pub fn inv_unit(&self) -> Option<Self> {
        let c0 = self.coeff(0);
        if c0.is_zero() {
            return None;
        }
        let c0_inv = c0.inv();
        let mut out = vec![F::zero(); N];
        out[0] = c0_inv.clone();
        for k in 1..N {
            let mut acc = F::zero();
            for i in 1..=k {
                acc = acc.add(&self.coeff(i).mul(&out[k - i]));
            }
            out[k] = acc.mul(&c0_inv).neg();
        }
        Some(Self::from_coeffs(out))
    }
}

impl<F: Field, const N: usize> fmt::Debug for Trunc<F, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod h^{}", self, N)
    }
}

impl<F: Field, const N: usize> fmt::Display for Trunc<F, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs)
    }
}

impl<F: Field, const N: usize> Ring for Trunc<F, N> {
    fn zero() -> Self {
        Trunc { coeffs: Vec::new() }
    }
    fn one() -> Self {
        Self::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..n).map(|k| self.coeff(k).add(&other.coeff(k))).collect())
    }
    fn neg(&self) -> Self {
        Trunc { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }
    fn mul(&self, other: &Self) -> Self {
        let mut out = vec![F::zero(); N];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < N {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Self::from_coeffs(out)
    }
    fn from_int(n: i64) -> Self {
        Self::constant(F::from_int(n))
    }
    fn is_unit(&self) -> bool {
        !self.coeff(0).is_zero()
    }
    fn characteristic() -> u64 {
        F::characteristic()
    }
    fn descriptor() -> RingDescriptor {
        RingDescriptor::TruncatedPoly { var: "h".into(), order: N, base: Box::new(F::descriptor()) }
    }
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| c.to_json()).collect())
    }
    fn from_json(v: &Value) -> Result<Self, CoeffError> {
        match v {
            Value::Array(_) => Ok(Self::from_coeffs(coeffs_from_json(v, Self::descriptor())?)),
            other => Ok(Self::constant(F::from_json(other)?)),
        }
    }
}

// ---------------------------------------------------------------------------
// Rational functions

/// Fraction field of `Poly<F>`: numerator and monic denominator, coprime.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> RatFunc<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc { num, den: Poly::one() };
        }
        let g = Poly::gcd(&num, &den);
        let mut num = num.exact_div(&g);
        let mut den = den.exact_div(&g);
        let lead = den.leading().unwrap().inv();
        num = num.scale(&lead);
        den = den.scale(&lead);
        RatFunc { num, den }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub fn numer(&self) -> &Poly<F> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<F> {
        &self.den
    }

    /// Some(p) when the denominator is 1.
    pub fn as_poly(&self) -> Option<Poly<F>> {
        self.den.is_one().then(|| self.num.clone())
    }
}

impl<F: Field> fmt::Debug for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl<F: Field> fmt::Display for RatFunc<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl<F: Field> Ring for RatFunc<F> {
    fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }
    fn one() -> Self {
        Self::from_poly(Poly::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone());
        }
        Self::new(self.num.mul(&other.den).add(&other.num.mul(&self.den)), self.den.mul(&other.den))
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }
    fn from_int(n: i64) -> Self {
        Self::from_poly(Poly::from_int(n))
    }
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }
    fn characteristic() -> u64 {
        F::characteristic()
    }
    fn descriptor() -> RingDescriptor {
        RingDescriptor::FractionField(Box::new(Poly::<F>::descriptor()))
    }
    fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("den".into(), self.den.to_json());
        m.insert("num".into(), self.num.to_json());
        Value::Object(m)
    }
    fn from_json(v: &Value) -> Result<Self, CoeffError> {
        match v {
            Value::Object(m) => {
                let num = Poly::from_json(m.get("num").unwrap_or(&Value::Array(vec![])))?;
                let den = match m.get("den") {
                    Some(d) => Poly::from_json(d)?,
                    None => Poly::one(),
                };
                if den.is_zero() {
                    return parse_err(v, Self::descriptor(), "zero denominator");
                }
                Ok(Self::new(num, den))
            }
            other => Ok(Self::from_poly(Poly::from_json(other)?)),
        }
    }
}

impl<F: Field> Field for RatFunc<F> {
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::new(self.den.clone(), self.num.clone())
    }
}

// ---------------------------------------------------------------------------
// Ring morphisms and base change

/// A ring homomorphism `S -> T`, used to base-change structure constants.
pub trait RingMap<S: Ring, T: Ring> {
    fn apply(&self, s: &S) -> Result<T, CoeffError>;
}

/// Identity morphism.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl<R: Ring> RingMap<R, R> for Identity {
    fn apply(&self, s: &R) -> Result<R, CoeffError> {
        Ok(s.clone())
    }
}

/// Evaluation `h -> a`.
#[derive(Debug, Clone)]
pub struct EvalAt<F>(pub F);

impl<F: Field> RingMap<Poly<F>, F> for EvalAt<F> {
    fn apply(&self, s: &Poly<F>) -> Result<F, CoeffError> {
        Ok(s.eval(&self.0))
    }
}

/// Quotient `R[h] -> R[h]/h^N`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Truncate;

impl<F: Field, const N: usize> RingMap<Poly<F>, Trunc<F, N>> for Truncate {
    fn apply(&self, s: &Poly<F>) -> Result<Trunc<F, N>, CoeffError> {
        Ok(Trunc::from_coeffs(s.coeffs().to_vec()))
    }
}

/// Injection into the fraction field.
#[derive(Debug, Clone, Copy, Default)]
pub struct FractionEmbed;

impl<F: Field> RingMap<Poly<F>, RatFunc<F>> for FractionEmbed {
    fn apply(&self, s: &Poly<F>) -> Result<RatFunc<F>, CoeffError> {
        Ok(RatFunc::from_poly(s.clone()))
    }
}

/// Constants `F -> F[h]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantEmbed;

impl<F: Field> RingMap<F, Poly<F>> for ConstantEmbed {
    fn apply(&self, s: &F) -> Result<Poly<F>, CoeffError> {
        Ok(Poly::constant(s.clone()))
    }
}

impl<F: Field> RingMap<F, RatFunc<F>> for ConstantEmbed {
    fn apply(&self, s: &F) -> Result<RatFunc<F>, CoeffError> {
        Ok(RatFunc::from_poly(Poly::constant(s.clone())))
    }
}

/// Reduction of rationals with denominators prime to `P`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReduceModP;

impl<const P: u64> RingMap<Q, Fp<P>> for ReduceModP {
    fn apply(&self, s: &Q) -> Result<Fp<P>, CoeffError> {
        let modulus = BigInt::from(P);
        let den = s.denom().mod_floor(&modulus);
        if den.is_zero() {
            return Err(CoeffError::NotInvertible(s.denom().to_string(), P));
        }
        let num = s.numer().mod_floor(&modulus).to_u64().unwrap();
        let den = Fp::<P>(den.to_u64().unwrap());
        Ok(Fp::<P>(num).mul(&den.inv()))
    }
}

/// Applies a polynomial's coefficientwise base change `F -> G`.
#[derive(Debug, Clone)]
pub struct Coefficientwise<M>(pub M);

impl<F: Field, G: Field, M: RingMap<F, G>> RingMap<Poly<F>, Poly<G>> for Coefficientwise<M> {
    fn apply(&self, s: &Poly<F>) -> Result<Poly<G>, CoeffError> {
        Ok(Poly::from_coeffs(s.coeffs().iter().map(|c| self.0.apply(c)).collect::<Result<_, _>>()?))
    }
}

pub fn eval_at<F: Field>(s: &Poly<F>, a: &F) -> F {
    s.eval(a)
}

pub fn embed_fraction<F: Field>(s: &Poly<F>) -> RatFunc<F> {
    RatFunc::from_poly(s.clone())
}

pub fn base_change_scalar<S: Ring, T: Ring, M: RingMap<S, T>>(s: &S, map: &M) -> Result<T, CoeffError> {
    map.apply(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    type F5 = Fp<5>;

    fn qp(c: &[i64]) -> Poly<Q> {
        Poly::from_coeffs(c.iter().map(|&x| Q::from_int(x)).collect())
    }

    #[test]
    fn eval_examples() {
        let p = qp(&[1, 0, 1]);
        assert_eq!(eval_at(&p, &Q::zero()), Q::one());
        assert_eq!(eval_at(&p, &Q::one()), Q::from_int(2));
        // 3h - 2 at 4 over F5: 12 - 2 = 10 = 0
        let p5 = Poly::from_coeffs(vec![F5::new(-2), F5::new(3)]);
        assert_eq!(eval_at(&p5, &F5::new(4)), F5::zero());
        assert_eq!((3 * 4 - 2) % 5, 0);
    }

    #[test]
    fn fraction_embedding_reduces() {
        let h = Poly::<Q>::var();
        assert_eq!(embed_fraction(&h).numer(), &h);
        assert!(embed_fraction(&Poly::<Q>::zero()).is_zero());
        assert_eq!(embed_fraction(&Poly::<Q>::zero()).denom(), &Poly::one());
        let r = RatFunc::new(qp(&[-1, 0, 1]), qp(&[-1, 1]));
        assert_eq!(r.numer(), &qp(&[1, 1]));
        assert_eq!(r.denom(), &Poly::one());
    }

    #[test]
    fn base_change_examples() {
        let h3 = Poly::<Q>::monomial(Q::one(), 3);
        let t: Trunc<Q, 2> = base_change_scalar(&h3, &Truncate).unwrap();
        assert!(t.is_zero());
        let half: Fp<5> = base_change_scalar(&Q::new(1, 2), &ReduceModP).unwrap();
        assert_eq!(half, Fp::new(3));
        assert_eq!((2 * 3) % 5, 1);
        let third: Result<Fp<3>, _> = base_change_scalar(&Q::new(1, 3), &ReduceModP);
        assert!(matches!(third, Err(CoeffError::NotInvertible(..))));
        let h = Poly::<Q>::var();
        assert_eq!(base_change_scalar(&h, &Identity).unwrap(), h);
    }

    #[test]
    fn descriptor_round_trip() {
        for text in [
            "rationals",
            "prime_field(7)",
            "poly(h, rationals)",
            "truncated_poly(h, 4, prime_field(5))",
            "fraction_field(poly(h, rationals))",
        ] {
            let d = RingDescriptor::parse(text).unwrap();
            assert_eq!(d.to_string(), text);
        }
        assert!(RingDescriptor::parse("prime_field(8)").is_err());
        assert!(RingDescriptor::parse("poly(h, poly(t, rationals))").is_err());
        assert!(RingDescriptor::parse("truncated_poly(h, 0, rationals)").is_err());
    }

    #[test]
    fn scalar_json_forms() {
        assert_eq!(Q::new(-3, 6).to_json(), Value::String("-1/2".into()));
        assert_eq!(F5::new(7).to_json(), Value::String("2 mod 5".into()));
        assert_eq!(qp(&[1, 2]).to_json(), serde_json::json!(["1/1", "2/1"]));
        assert!(F5::from_json(&Value::String("2 mod 7".into())).is_err());
        let r = RatFunc::new(qp(&[1]), qp(&[0, 2]));
        assert_eq!(RatFunc::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn trunc_inverse() {
        let u: Trunc<Q, 4> = Trunc::from_coeffs(vec![Q::from_int(2), Q::from_int(1), Q::from_int(-3)]);
        let v = u.inv_unit().unwrap();
        assert_eq!(u.mul(&v), Trunc::one());
        assert!(Trunc::<Q, 4>::monomial(Q::one(), 1).inv_unit().is_none());
    }

    #[test]
    fn poly_gcd_and_division() {
        let a = qp(&[-1, 0, 1]);
        let b = qp(&[1, 1]);
        assert_eq!(Poly::gcd(&a, &b), b);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, qp(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(qp(&[0, 0, 3]).valuation(), Some(2));
    }
}
