//! Quantum torus arithmetic: Laurent monomials whose generators q-commute
//! according to an integer skew-symmetric matrix.
//!
//! Elements are kept as ordered monomials (coefficients attach to the
//! ascending-index word x_1^{a_1}···x_m^{a_m}, exponents in ℤ), multiplied by
//!
//! ```text
//! x^a · x^b = q^{s(a,b)} x^{a+b},    s(a,b) = Σ_{i>j} a_i b_j λ_ij.
//! ```
//!
//! [`normalized_monomial`] supplies the symmetrized scalar correction used by
//! exchange relations, [`left_divide`]/[`right_divide`] perform exact
//! one-sided division, and the module hosts the torus-level identity checks:
//! the rational embedding of the linear preset through v_i =
//! z_{i-1}^{-1}(z_i + z_{i-2}) and the one-variable splitting identity.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pbw::coeff_mono_string;
use crate::report::Report;
use crate::scalar::{exact_divide, LaurentScalar};

/// Integer skew-symmetric matrix λ_ij fixing the commutation
/// x_i x_j = q^{λ_ij} x_j x_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMatrix {
    m: usize,
    entries: Vec<Vec<i64>>,
}

impl SkewMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let m = entries.len();
        if entries.iter().any(|row| row.len() != m) {
            return Err(Error::Invalid("skew matrix must be square".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if entries[i][j] != -entries[j][i] {
                    return Err(Error::Invalid(format!(
                        "skew symmetry fails at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { m, entries })
    }

    /// Build from the strict upper triangle (0-based i < j).
    pub fn from_upper(m: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        let mut entries = vec![vec![0i64; m]; m];
        for i in 0..m {
            for j in (i + 1)..m {
                let v = f(i, j);
                entries[i][j] = v;
                entries[j][i] = -v;
            }
        }
        Self { m, entries }
    }

    pub fn zero(m: usize) -> Self {
        Self { m, entries: vec![vec![0; m]; m] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }

    /// The bilinear form Σ a_i λ_ij b_j.
    pub fn form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                acc += ai * self.entries[i][j] * bj;
            }
        }
        acc
    }

    /// The straightening exponent s(a,b) = Σ_{i>j} a_i b_j λ_ij.
    fn straighten(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate().take(i) {
                acc += ai * bj * self.entries[i][j];
            }
        }
        acc
    }
}

impl Serialize for SkewMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SkewMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<Vec<i64>>::deserialize(deserializer)?;
        SkewMatrix::new(entries).map_err(serde::de::Error::custom)
    }
}

/// Laurent polynomial over the quantum torus: ℤ^m exponent vectors with
/// scalar coefficients, no zero coefficients stored.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    m: usize,
    terms: BTreeMap<Vec<i64>, LaurentScalar>,
}

#[derive(Serialize, Deserialize)]
struct TorusElementRepr {
    m: usize,
    terms: Vec<(Vec<i64>, LaurentScalar)>,
}

impl Serialize for TorusElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TorusElementRepr {
            m: self.m,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.clone())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = TorusElementRepr::deserialize(deserializer)?;
        let mut out = TorusElement::zero(repr.m);
        for (e, c) in repr.terms {
            if e.len() != repr.m {
                return Err(serde::de::Error::custom(format!(
                    "exponent vector of length {} in a rank-{} element",
                    e.len(),
                    repr.m
                )));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }
}

impl TorusElement {
    pub fn zero(m: usize) -> Self {
        Self { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: LaurentScalar) -> Self {
        let mut out = Self::zero(m);
        out.add_term(vec![0; m], c);
        out
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, LaurentScalar::one())
    }

    /// x_idx for a 0-based coordinate.
    pub fn generator(m: usize, idx: usize) -> Self {
        assert!(idx < m, "generator index {idx} out of 0..{m}");
        let mut e = vec![0; m];
        e[idx] = 1;
        Self::monomial(e, LaurentScalar::one())
    }

    pub fn monomial(exponents: Vec<i64>, c: LaurentScalar) -> Self {
        let mut out = Self::zero(exponents.len());
        out.add_term(exponents, c);
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[i64]) -> LaurentScalar {
        self.terms.get(exponents).cloned().unwrap_or_else(LaurentScalar::zero)
    }

    pub fn scale(&self, c: &LaurentScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.m);
        }
        Self {
            m: self.m,
            terms: self.terms.iter().map(|(a, b)| (a.clone(), b * c)).collect(),
        }
    }

    /// True when the element is c·x^a for a single exponent vector.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn add_term(&mut self, e: Vec<i64>, c: LaurentScalar) {
        debug_assert_eq!(e.len(), self.m);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let sum = slot.get() + &c;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    /// Lexicographically largest exponent vector.
    fn leading(&self) -> Option<(&Vec<i64>, &LaurentScalar)> {
        self.terms.iter().next_back()
    }

    /// Render with a generator letter and an index offset: coordinate c
    /// prints as `{letter}{c + base}`.
    pub fn render_with(&self, letter: &str, base: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (a, c)) in self.terms.iter().rev().enumerate() {
            let mono = laurent_monomial_string(a, letter, base);
            let (neg, body) = coeff_mono_string(c, &mono);
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

fn laurent_monomial_string(a: &[i64], letter: &str, base: usize) -> String {
    let mut parts = Vec::new();
    for (i, &e) in a.iter().enumerate() {
        if e == 1 {
            parts.push(format!("{letter}{}", i + base));
        } else if e != 0 {
            parts.push(format!("{letter}{}^{e}", i + base));
        }
    }
    parts.join("*")
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        assert_eq!(self.m, rhs.m, "dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        assert_eq!(self.m, rhs.m, "dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.neg());
        }
        out
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        TorusElement {
            m: self.m,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect(),
        }
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with("x", 1))
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with("x", 1))
    }
}

/// Bilinear product with x^a · x^b = q^{s(a,b)} x^{a+b}.
pub fn torus_mul(lambda: &SkewMatrix, f: &TorusElement, g: &TorusElement) -> TorusElement {
    assert_eq!(lambda.m, f.m, "dimension mismatch");
    assert_eq!(lambda.m, g.m, "dimension mismatch");
    let mut out = TorusElement::zero(f.m);
    for (a, ca) in &f.terms {
        for (b, cb) in &g.terms {
            let s = lambda.straighten(a, b);
            let e: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            out.add_term(e, &(ca * cb) * &LaurentScalar::qpow_int(s));
        }
    }
    out
}

/// Product of a sequence of elements, left to right.
pub fn torus_product(lambda: &SkewMatrix, factors: &[&TorusElement]) -> TorusElement {
    let mut acc = TorusElement::one(lambda.m);
    for f in factors {
        acc = torus_mul(lambda, &acc, f);
    }
    acc
}

/// The normalized monomial X^a = q^{(1/2)·Σ_{i<j} a_i a_j λ_ji} · x^a.
///
/// The exponent sum is an integer, so the correction is the v-power v^Σ.
/// Satisfies X^a · X^b = q^{Λ(a,b)/2} X^{a+b}.
pub fn normalized_monomial(lambda: &SkewMatrix, a: &[i64]) -> TorusElement {
    assert_eq!(lambda.m, a.len(), "dimension mismatch");
    let mut sum = 0;
    for i in 0..a.len() {
        if a[i] == 0 {
            continue;
        }
        for j in (i + 1)..a.len() {
            sum += a[i] * a[j] * lambda.entries[j][i];
        }
    }
    TorusElement::monomial(a.to_vec(), LaurentScalar::vpow(sum))
}

/// Exponent box that must contain the support of any exact quotient: the
/// extreme slices of f = h·g (or g·h) in each coordinate come from extreme
/// slices of h and g, so per coordinate c the quotient support lies in
/// [min_c f − min_c g, max_c f − max_c g].
fn quotient_box(f: &TorusElement, g: &TorusElement) -> Option<(Vec<i64>, Vec<i64>)> {
    let m = f.m;
    let mut lo = vec![i64::MAX; m];
    let mut hi = vec![i64::MIN; m];
    for c in 0..m {
        let (mut fmin, mut fmax) = (i64::MAX, i64::MIN);
        for a in f.terms.keys() {
            fmin = fmin.min(a[c]);
            fmax = fmax.max(a[c]);
        }
        let (mut gmin, mut gmax) = (i64::MAX, i64::MIN);
        for b in g.terms.keys() {
            gmin = gmin.min(b[c]);
            gmax = gmax.max(b[c]);
        }
        lo[c] = fmin - gmin;
        hi[c] = fmax - gmax;
        if lo[c] > hi[c] {
            return None;
        }
    }
    Some((lo, hi))
}

enum Side {
    Left,
    Right,
}

fn divide(lambda: &SkewMatrix, f: &TorusElement, g: &TorusElement, side: Side) -> Result<TorusElement> {
    assert_eq!(lambda.m, f.m, "dimension mismatch");
    assert_eq!(lambda.m, g.m, "dimension mismatch");
    if g.is_zero() {
        return Err(Error::NotDivisible("division by zero".into()));
    }
    if f.is_zero() {
        return Ok(TorusElement::zero(f.m));
    }
    let (lo, hi) = quotient_box(f, g).ok_or_else(|| {
        Error::NotDivisible("quotient support box is empty".into())
    })?;
    let (gstar, glead) = g.leading().expect("nonzero");
    let gstar = gstar.clone();
    let glead = glead.clone();
    let mut quotient = TorusElement::zero(f.m);
    let mut rem = f.clone();
    while !rem.is_zero() {
        let (top, ctop) = rem.leading().expect("nonzero");
        let cand: Vec<i64> = top.iter().zip(&gstar).map(|(x, y)| x - y).collect();
        if cand.iter().zip(&lo).any(|(c, l)| c < l) || cand.iter().zip(&hi).any(|(c, h)| c > h) {
            return Err(Error::NotDivisible(
                "leading terms cannot be matched within the quotient box".into(),
            ));
        }
        let twist = match side {
            Side::Right => lambda.straighten(&cand, &gstar),
            Side::Left => lambda.straighten(&gstar, &cand),
        };
        let denom = &glead * &LaurentScalar::qpow_int(twist);
        let c = exact_divide(ctop, &denom)?;
        let term = TorusElement::monomial(cand, c);
        let product = match side {
            Side::Right => torus_mul(lambda, &term, g),
            Side::Left => torus_mul(lambda, g, &term),
        };
        rem = &rem - &product;
        quotient = &quotient + &term;
    }
    Ok(quotient)
}

/// Exact right division: the h with h·g = f, or `NotDivisible`.
pub fn right_divide(lambda: &SkewMatrix, f: &TorusElement, g: &TorusElement) -> Result<TorusElement> {
    divide(lambda, f, g, Side::Right)
}

/// Exact left division: the h with g·h = f, or `NotDivisible`.
pub fn left_divide(lambda: &SkewMatrix, f: &TorusElement, g: &TorusElement) -> Result<TorusElement> {
    divide(lambda, f, g, Side::Left)
}

/// The pairwise-twist matrix of the z tower: λ_ij = 1 for odd i < even j
/// (1-based z indices), 0 otherwise.
pub fn z_tower_skew(n: usize) -> SkewMatrix {
    SkewMatrix::from_upper(n, |i, j| {
        let (zi, zj) = (i + 1, j + 1);
        i64::from(zi % 2 == 1 && zj % 2 == 0)
    })
}

/// The rational generators v_i = z_{i-1}^{-1}(z_i + z_{i-2}) of the torus on
/// the z tower; v_1 = z_1. Coordinate k holds z_{k+1}.
pub fn v_generators(n: usize) -> Vec<TorusElement> {
    let lambda = z_tower_skew(n);
    let zgen = |k: usize| TorusElement::generator(n, k - 1);
    let zinv = |k: usize| {
        let mut e = vec![0; n];
        e[k - 1] = -1;
        TorusElement::monomial(e, LaurentScalar::one())
    };
    let mut vs = Vec::with_capacity(n);
    for i in 1..=n {
        let v = if i == 1 {
            zgen(1)
        } else {
            let tail = if i == 2 { TorusElement::one(n) } else { zgen(i - 2) };
            torus_mul(&lambda, &zinv(i - 1), &(&zgen(i) + &tail))
        };
        vs.push(v);
    }
    vs
}

/// Verify that the v_i satisfy the full linear-preset relation set inside
/// the torus on the z tower, plus the displayed twist table for the
/// one-step ratios w_i = z_{i-1}^{-1} z_i.
pub fn check_v_embedding(n: usize) -> Result<Report> {
    if n < 2 {
        return Err(Error::Invalid("embedding check needs n >= 2".into()));
    }
    let lambda = z_tower_skew(n);
    let vs = v_generators(n);
    let q = LaurentScalar::q();
    let qinv = q.inverse().expect("unit");
    let one_minus_q = &LaurentScalar::one() - &q;
    let mut report = Report::new(format!("v-embedding/n={n}"));

    for i in 0..(n - 1) {
        let ab = torus_mul(&lambda, &vs[i], &vs[i + 1]);
        let ba = torus_mul(&lambda, &vs[i + 1], &vs[i]);
        let lhs = &ab - &ba.scale(&q);
        let rhs = TorusElement::constant(n, one_minus_q.clone());
        report.check(
            format!("v-adjacent/i={}", i + 1),
            "adjacent quantized Weyl relation",
            lhs == rhs,
            || format!("v{}v{} - q v{}v{} = {}", i + 1, i + 2, i + 2, i + 1, lhs.render_with("z", 1)),
        );
    }

    for i in 0..n {
        for j in (i + 2)..n {
            let ab = torus_mul(&lambda, &vs[i], &vs[j]);
            let ba = torus_mul(&lambda, &vs[j], &vs[i]);
            let twist = if (j - i) % 2 == 1 { &q } else { &qinv };
            report.check(
                format!("v-distant/i={}/j={}", i + 1, j + 1),
                "distant parity twist",
                ab == ba.scale(twist),
                || format!("v{}v{} twist mismatch: {}", i + 1, j + 1, ab.render_with("z", 1)),
            );
        }
    }

    // One-step ratios w_i = z_{i-1}^{-1} z_i: for i < j the product w_j w_i
    // picks up q when j - i is even and q^{-1} when odd.
    let mut ws = Vec::with_capacity(n);
    for i in 1..=n {
        let w = if i == 1 {
            TorusElement::generator(n, 0)
        } else {
            let mut e = vec![0; n];
            e[i - 2] = -1;
            e[i - 1] = 1;
            // No straightening: the two coordinates multiply in order.
            TorusElement::monomial(e, LaurentScalar::one())
        };
        ws.push(w);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let ji = torus_mul(&lambda, &ws[j], &ws[i]);
            let ij = torus_mul(&lambda, &ws[i], &ws[j]);
            let twist = if (j - i) % 2 == 0 { &q } else { &qinv };
            report.check(
                format!("w-twist/i={}/j={}", i + 1, j + 1),
                "ratio twist table",
                ji == ij.scale(twist),
                || format!("w{}w{} twist mismatch: {}", j + 1, i + 1, ji.render_with("z", 1)),
            );
        }
    }
    Ok(report)
}

/// In the one-variable quantum Laurent ring on t = z_{n-2}, check that
/// u = q^{(n-3)/2} t^{-1} + λ + q t satisfies u − α(u) = (1−q)(q^{(n-3)/2}
/// t^{-1} − t) where α scales t by q^{-1}. The right side is the element the
/// splitting localizes at; λ drops out of the difference.
pub fn check_splitting(n: usize, lambda_c: &LaurentScalar) -> Result<bool> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid(format!("splitting check needs odd n >= 3, got {n}")));
    }
    let k = ((n - 3) / 2) as i64;
    let qk = LaurentScalar::qpow_int(k);
    let q = LaurentScalar::q();
    let tinv = TorusElement::monomial(vec![-1], qk.clone());
    let t = TorusElement::monomial(vec![1], q.clone());
    let u = &(&tinv + &TorusElement::constant(1, lambda_c.clone())) + &t;

    // α: t ↦ q^{-1} t, so a term c·t^k maps to c·q^{-k}·t^k.
    let mut alpha_u = TorusElement::zero(1);
    for (e, c) in u.terms() {
        alpha_u = &alpha_u + &TorusElement::monomial(e.clone(), c * &LaurentScalar::qpow_int(-e[0]));
    }

    let diff = &u - &alpha_u;
    let one_minus_q = &LaurentScalar::one() - &q;
    let v = (&TorusElement::monomial(vec![-1], qk) - &TorusElement::monomial(vec![1], LaurentScalar::one()))
        .scale(&one_minus_q);
    Ok(diff == v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ls_int(n: i64) -> LaurentScalar {
        LaurentScalar::from_int(n)
    }

    fn random_element(rng: &mut ChaCha8Rng, m: usize, terms: usize) -> TorusElement {
        let mut out = TorusElement::zero(m);
        for _ in 0..terms {
            let e: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
            let c = LaurentScalar::vpow_scaled(rng.gen_range(-2..=2), rat(rng.gen_range(-4..=4), 1));
            out = &out + &TorusElement::monomial(e, c);
        }
        out
    }

    fn random_skew(rng: &mut ChaCha8Rng, m: usize) -> SkewMatrix {
        SkewMatrix::from_upper(m, |_, _| rng.gen_range(-2..=2))
    }

    #[test]
    fn skew_matrix_validation() {
        assert!(SkewMatrix::new(vec![vec![0, 1], vec![-1, 0]]).is_ok());
        assert!(SkewMatrix::new(vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(SkewMatrix::new(vec![vec![1]]).is_err());
    }

    #[test]
    fn single_swap_twist() {
        let lambda = SkewMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let x1 = TorusElement::generator(2, 0);
        let x2 = TorusElement::generator(2, 1);
        let got = torus_mul(&lambda, &x2, &x1);
        let expect = TorusElement::monomial(vec![1, 1], LaurentScalar::qpow_int(-1));
        assert_eq!(got, expect);
        assert_eq!(torus_mul(&lambda, &x1, &x2), TorusElement::monomial(vec![1, 1], LaurentScalar::one()));
    }

    #[test]
    fn monomials_are_units() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let lambda = random_skew(&mut rng, 4);
        let a: Vec<i64> = vec![2, -1, 0, 3];
        let neg_a: Vec<i64> = a.iter().map(|x| -x).collect();
        let xa = TorusElement::monomial(a.clone(), LaurentScalar::one());
        let xna = TorusElement::monomial(neg_a.clone(), LaurentScalar::one());
        // Both orders pick up the same twist s(a,-a) = s(-a,a).
        let s = lambda.straighten(&a, &neg_a);
        assert_eq!(s, lambda.straighten(&neg_a, &a));
        let twist = TorusElement::constant(4, LaurentScalar::qpow_int(s));
        assert_eq!(torus_mul(&lambda, &xa, &xna), twist);
        assert_eq!(torus_mul(&lambda, &xna, &xa), twist);
        // The two-sided inverse corrects by q^{-s}.
        let inv = TorusElement::monomial(neg_a, LaurentScalar::qpow_int(-s));
        assert_eq!(torus_mul(&lambda, &xa, &inv), TorusElement::one(4));
        assert_eq!(torus_mul(&lambda, &inv, &xa), TorusElement::one(4));
    }

    #[test]
    fn associative_and_unital_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let m = rng.gen_range(1..=6);
            let lambda = random_skew(&mut rng, m);
            let f = random_element(&mut rng, m, 3);
            let g = random_element(&mut rng, m, 3);
            let h = random_element(&mut rng, m, 2);
            let fg_h = torus_mul(&lambda, &torus_mul(&lambda, &f, &g), &h);
            let f_gh = torus_mul(&lambda, &f, &torus_mul(&lambda, &g, &h));
            assert_eq!(fg_h, f_gh);
            assert_eq!(torus_mul(&lambda, &f, &TorusElement::one(m)), f);
            assert_eq!(torus_mul(&lambda, &TorusElement::one(m), &f), f);
        }
    }

    /// Λ for the cyclic quiver on vertices 0..n: zero when i+j is even,
    /// +1 above the diagonal when i+j is odd.
    fn parity_skew(size: usize) -> SkewMatrix {
        SkewMatrix::from_upper(size, |i, j| i64::from((i + j) % 2 == 1))
    }

    #[test]
    fn normalized_monomial_examples() {
        let lambda = parity_skew(6);
        for k in 0..6 {
            let mut e = vec![0; 6];
            e[k] = 1;
            assert_eq!(normalized_monomial(&lambda, &e), TorusElement::generator(6, k));
        }

        // a = -e_0 + e_1 + e_n on the cyclic quiver torus: X^a = q·x^a.
        let n = 5;
        let mut a = vec![0i64; n + 1];
        a[0] = -1;
        a[1] = 1;
        a[n] = 1;
        let got = normalized_monomial(&lambda, &a);
        assert_eq!(got, TorusElement::monomial(a.clone(), LaurentScalar::q()));
        // Same value as the descending product q·(w_0^{-1}·w_1·w_n).
        let w0inv = TorusElement::monomial(
            {
                let mut e = vec![0; n + 1];
                e[0] = -1;
                e
            },
            LaurentScalar::one(),
        );
        let w1 = TorusElement::generator(n + 1, 1);
        let wn = TorusElement::generator(n + 1, n);
        let prod = torus_product(&lambda, &[&w0inv, &w1, &wn]).scale(&LaurentScalar::q());
        assert_eq!(got, prod);

        // a = -e_i + e_{i-1}: X^a = q^{-1/2}·(w_i^{-1}·w_{i-1}).
        let i = 3;
        let mut a = vec![0i64; 6];
        a[i] = -1;
        a[i - 1] = 1;
        let got = normalized_monomial(&lambda, &a);
        let wiinv = TorusElement::monomial(
            {
                let mut e = vec![0; 6];
                e[i] = -1;
                e
            },
            LaurentScalar::one(),
        );
        let wim1 = TorusElement::generator(6, i - 1);
        let prod = torus_mul(&lambda, &wiinv, &wim1).scale(&LaurentScalar::vpow(-1));
        assert_eq!(got, prod);
    }

    #[test]
    fn normalized_monomials_multiply_by_the_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let m = rng.gen_range(1..=6);
            let lambda = random_skew(&mut rng, m);
            let a: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
            let b: Vec<i64> = (0..m).map(|_| rng.gen_range(-3..=3)).collect();
            let prod = torus_mul(&lambda, &normalized_monomial(&lambda, &a), &normalized_monomial(&lambda, &b));
            let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let expect = normalized_monomial(&lambda, &sum).scale(&LaurentScalar::vpow(lambda.form(&a, &b)));
            assert_eq!(prod, expect);
        }
    }

    #[test]
    fn division_undoes_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let m = rng.gen_range(1..=4);
            let lambda = random_skew(&mut rng, m);
            let mut h = random_element(&mut rng, m, 3);
            let mut g = random_element(&mut rng, m, 2);
            if h.is_zero() {
                h = TorusElement::one(m);
            }
            if g.is_zero() {
                g = TorusElement::generator(m, 0);
            }
            let f_right = torus_mul(&lambda, &h, &g);
            assert_eq!(right_divide(&lambda, &f_right, &g).unwrap(), h);
            let f_left = torus_mul(&lambda, &g, &h);
            assert_eq!(left_divide(&lambda, &f_left, &g).unwrap(), h);
        }
    }

    #[test]
    fn division_failures_are_reported() {
        let lambda = SkewMatrix::zero(1);
        let x = TorusElement::generator(1, 0);
        let xp1 = &x + &TorusElement::one(1);
        assert!(matches!(right_divide(&lambda, &x, &xp1), Err(Error::NotDivisible(_))));
        let x2p1 = &torus_mul(&lambda, &x, &x) + &TorusElement::one(1);
        assert!(matches!(right_divide(&lambda, &x2p1, &xp1), Err(Error::NotDivisible(_))));
        // Monomials always divide in a Laurent ring.
        let q = right_divide(&lambda, &xp1, &x).unwrap();
        assert_eq!(torus_mul(&lambda, &q, &x), xp1);
    }

    #[test]
    fn v_embedding_reports_pass() {
        for n in 2..=4 {
            let report = check_v_embedding(n).unwrap();
            assert!(report.passed(), "failures: {:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn ratio_twists_at_small_rank() {
        // w_2 w_1 = q^{-1} w_1 w_2 (gap 1, odd), w_3 w_1 = q w_1 w_3 (gap 2, even).
        let lambda = z_tower_skew(3);
        let w1 = TorusElement::generator(3, 0);
        let w2 = TorusElement::monomial(vec![-1, 1, 0], LaurentScalar::one());
        let w3 = TorusElement::monomial(vec![0, -1, 1], LaurentScalar::one());
        assert_eq!(
            torus_mul(&lambda, &w2, &w1),
            torus_mul(&lambda, &w1, &w2).scale(&LaurentScalar::qpow_int(-1))
        );
        assert_eq!(
            torus_mul(&lambda, &w3, &w1),
            torus_mul(&lambda, &w1, &w3).scale(&LaurentScalar::q())
        );
    }

    #[test]
    fn v_embedding_respects_products() {
        use crate::pbw::{multiply, preset_linear, NCPoly};
        let n = 4;
        let p = preset_linear(n).unwrap();
        let lambda = z_tower_skew(n);
        let vs = v_generators(n);
        let embed = |f: &NCPoly| -> TorusElement {
            let mut out = TorusElement::zero(n);
            for (a, c) in f.terms() {
                let mut acc = TorusElement::constant(n, c.clone());
                for (k, &e) in a.iter().enumerate() {
                    for _ in 0..e {
                        acc = torus_mul(&lambda, &acc, &vs[k]);
                    }
                }
                out = &out + &acc;
            }
            out
        };
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let a: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            let b: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
            let fa = NCPoly::monomial(a, LaurentScalar::one());
            let fb = NCPoly::monomial(b, LaurentScalar::one());
            let product = multiply(&p, &fa, &fb).unwrap();
            assert_eq!(torus_mul(&lambda, &embed(&fa), &embed(&fb)), embed(&product));
        }
    }

    #[test]
    fn splitting_examples() {
        assert!(check_splitting(3, &LaurentScalar::zero()).unwrap());
        assert!(check_splitting(5, &LaurentScalar::one()).unwrap());
        assert!(check_splitting(7, &ls_int(-2)).unwrap());
        assert!(check_splitting(4, &LaurentScalar::zero()).is_err());
    }

    #[test]
    fn torus_serde_round_trip() {
        let f = &TorusElement::monomial(vec![-2, 3], LaurentScalar::v())
            + &TorusElement::one(2);
        let json = serde_json::to_string(&f).unwrap();
        let back: TorusElement = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        let m = parity_skew(4);
        let json = serde_json::to_string(&m).unwrap();
        let back: SkewMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
