//! Exact coefficient arithmetic in ℚ[v^±1], where v is a fixed square root of q.
//!
//! Every constant appearing in the verified identities is a Laurent polynomial
//! in v with rational coefficients; half-integer powers of q are integer powers
//! of v. The API exposes
//! - [`Rational`]: arbitrary-precision rationals (always reduced, positive
//!   denominator),
//! - [`LaurentScalar`]: sparse Laurent polynomials in v,
//! - [`LaurentScalar::qpow`] for q^e with 2e ∈ ℤ,
//! - [`exact_divide`] with a `NotDivisible` error when the quotient does not
//!   exist in the ring, and
//! - [`LaurentScalar::specialize`] for evaluation at v := c (the q → 1 limit
//!   is `specialize(1)`).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, reduced, with positive denominator.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for small integers as rationals.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sparse Laurent polynomial in v over ℚ. The zero polynomial is the empty table.
///
/// Invariant: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentScalar {
    terms: BTreeMap<i64, Rational>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::vpow_scaled(0, rat_int(1))
    }

    /// The distinguished unit v.
    pub fn v() -> Self {
        Self::vpow(1)
    }

    /// The distinguished unit q = v².
    pub fn q() -> Self {
        Self::vpow(2)
    }

    /// c·v^k (the zero polynomial when c = 0).
    pub fn vpow_scaled(k: i64, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Self { terms }
    }

    /// v^k.
    pub fn vpow(k: i64) -> Self {
        Self::vpow_scaled(k, rat_int(1))
    }

    /// q^e for a half-integer exponent e, i.e. v^{2e}. Panics unless 2e ∈ ℤ.
    pub fn qpow(e: &Rational) -> Self {
        let doubled = e * rat_int(2);
        assert!(doubled.is_integer(), "qpow exponent must be a half-integer");
        let k: i64 = i64::try_from(&doubled.to_integer()).expect("qpow exponent out of range");
        Self::vpow(k)
    }

    /// q^k for an integer exponent.
    pub fn qpow_int(k: i64) -> Self {
        Self::vpow(2 * k)
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::vpow_scaled(0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// A unit of ℚ[v^±1] is a single nonzero term c·v^k.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    /// Inverse of a unit; `None` when the value is not a single term.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_unit() {
            return None;
        }
        let (k, c) = self.terms.iter().next().expect("unit has one term");
        Some(Self::vpow_scaled(-k, c.recip()))
    }

    pub fn min_deg(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_deg(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, k: i64) -> Rational {
        self.terms.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    fn insert_add(&mut self, k: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, a)| (*k, a * c)).collect(),
        }
    }

    /// Integer power; negative exponents require a unit (panics otherwise).
    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        let base = if e < 0 {
            self.inverse().expect("negative power of a non-unit scalar")
        } else {
            self.clone()
        };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Evaluate at v := c for nonzero rational c; panics when c = 0.
    pub fn specialize(&self, c: &Rational) -> Rational {
        assert!(!c.is_zero(), "cannot specialize at v = 0");
        let mut acc = Rational::zero();
        for (k, a) in &self.terms {
            acc += a * rational_pow(c, *k);
        }
        acc
    }

    /// Render with q preferred: even v-exponents print as powers of q,
    /// odd ones as powers of v. This is the CLI-facing text form.
    pub fn render_q(&self) -> String {
        self.render(true)
    }

    /// Render purely in powers of v.
    pub fn render_v(&self) -> String {
        self.render(false)
    }

    fn render(&self, prefer_q: bool) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        // Descending degree reads like handwritten algebra.
        for (idx, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term_string(&mag, *k, prefer_q));
        }
        out
    }
}

/// `|c|·v^k` with the sign already consumed by the caller.
fn term_string(mag: &Rational, k: i64, prefer_q: bool) -> String {
    let (sym, e) = if prefer_q && k % 2 == 0 { ("q", k / 2) } else { ("v", k) };
    if e == 0 {
        return format!("{mag}");
    }
    let power = if e == 1 { sym.to_string() } else { format!("{sym}^{e}") };
    if mag.is_one() {
        power
    } else {
        format!("{mag}*{power}")
    }
}

fn rational_pow(c: &Rational, e: i64) -> Rational {
    if e == 0 {
        return Rational::one();
    }
    let base = if e < 0 { c.recip() } else { c.clone() };
    let mut acc = Rational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// Exact division in ℚ[v^±1]: returns h with f = g·h, or `NotDivisible`.
///
/// Long division on leading terms. If g divides f then the lowest quotient
/// degree is min(f) − min(g) (lowest terms multiply without cancellation in a
/// domain), so the loop aborts as soon as a candidate term would fall below
/// that bound.
pub fn exact_divide(f: &LaurentScalar, g: &LaurentScalar) -> Result<LaurentScalar> {
    if g.is_zero() {
        return Err(Error::NotDivisible("division by zero scalar".into()));
    }
    if f.is_zero() {
        return Ok(LaurentScalar::zero());
    }
    let g_max = g.max_deg().expect("nonzero");
    let g_lead = g.coeff(g_max);
    let low_bound = f.min_deg().expect("nonzero") - g.min_deg().expect("nonzero");
    let mut quotient = LaurentScalar::zero();
    let mut rem = f.clone();
    while !rem.is_zero() {
        let r_max = rem.max_deg().expect("nonzero");
        let k = r_max - g_max;
        if k < low_bound {
            return Err(Error::NotDivisible(format!(
                "{} is not divisible by {}",
                f.render_v(),
                g.render_v()
            )));
        }
        let t = LaurentScalar::vpow_scaled(k, rem.coeff(r_max) / &g_lead);
        rem = &rem - &(&t * g);
        quotient = &quotient + &t;
    }
    Ok(quotient)
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert_add(*k, -c.clone());
        }
        out
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.insert_add(ka + kb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        LaurentScalar {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_v())
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_v())
    }
}

// JSON form: ascending list of [v-exponent, "coefficient"] pairs, so q^2 - 1
// serializes as [[0,"-1"],[4,"1"]]. Exact and order-stable.
impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (k, c) in &self.terms {
            seq.serialize_element(&(*k, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = LaurentScalar;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a list of [v-exponent, rational-string] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut out = LaurentScalar::zero();
                while let Some((k, c)) = seq.next_element::<(i64, String)>()? {
                    let c: Rational = c
                        .parse()
                        .map_err(|e| serde::de::Error::custom(format!("bad rational {c:?}: {e}")))?;
                    out.insert_add(k, c);
                }
                Ok(out)
            }
        }
        deserializer.deserialize_seq(V)
    }
}
