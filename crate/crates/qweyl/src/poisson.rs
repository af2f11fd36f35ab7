//! Commutative Poisson layer for the q→1 limits: generator bracket tables
//! extended as biderivations, Jacobi verification on generator triples,
//! semiclassical limits of the quantized presets, the log-canonical integer
//! kernel criterion, principal-ideal membership through the tower
//! parametrization, and the verification suite tying the classical families
//! to their quantum counterparts.
//!
//! Polynomials live in `CPoly`, a commutative (Laurent) polynomial with exact
//! rational coefficients. A bracket is specified on generator pairs only; the
//! Leibniz rule forces its values everywhere else, so [`bracket`] expands
//! through partial derivatives and [`jacobi_check`] only needs the generator
//! triples.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pbw::{self, NCPoly, Presentation};
use crate::qtorus::SkewMatrix;
use crate::report::Report;
use crate::scalar::{rat_int, LaurentScalar, Rational};

/// Coefficient domain of a bracket table: plain polynomials, or Laurent
/// polynomials when the algebra inverts its generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Polynomial,
    Laurent,
}

/// Commutative polynomial over ℚ with ℤ^m exponent vectors. Negative
/// exponents are legal; operations that require honest polynomials assert
/// [`CPoly::is_polynomial`]. No zero coefficients are stored.
#[derive(Clone, PartialEq, Eq)]
pub struct CPoly {
    m: usize,
    terms: BTreeMap<Vec<i64>, Rational>,
}

impl CPoly {
    pub fn zero(m: usize) -> Self {
        CPoly { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: Rational) -> Self {
        let mut p = CPoly::zero(m);
        p.add_term(vec![0; m], c);
        p
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, Rational::one())
    }

    /// x_{idx+1} as an element of the m-variable ring (idx is 0-based).
    pub fn generator(m: usize, idx: usize) -> Self {
        assert!(idx < m, "generator index out of range");
        let mut e = vec![0; m];
        e[idx] = 1;
        let mut p = CPoly::zero(m);
        p.add_term(e, Rational::one());
        p
    }

    pub fn monomial(exponents: Vec<i64>, c: Rational) -> Self {
        let mut p = CPoly::zero(exponents.len());
        p.add_term(exponents, c);
        p
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[i64]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    /// True when every exponent is nonnegative.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|a| a.iter().all(|&e| e >= 0))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return CPoly::zero(self.m);
        }
        CPoly {
            m: self.m,
            terms: self.terms.iter().map(|(a, x)| (a.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = CPoly::one(self.m);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative in the coordinate `idx` (0-based); exact on Laurent
    /// monomials as well, d/dx x^a = a x^{a-1}.
    pub fn partial(&self, idx: usize) -> Self {
        assert!(idx < self.m, "derivative index out of range");
        let mut out = CPoly::zero(self.m);
        for (a, c) in &self.terms {
            if a[idx] == 0 {
                continue;
            }
            let mut e = a.clone();
            e[idx] -= 1;
            out.add_term(e, c * &rat_int(a[idx]));
        }
        out
    }

    /// Substitute x_{t+1} := images[t]. Requires polynomial exponents; the
    /// images may be Laurent and must share one generator count.
    pub fn compose(&self, images: &[CPoly]) -> CPoly {
        assert_eq!(images.len(), self.m, "image count mismatch");
        let mm = images.first().map_or(0, CPoly::m);
        assert!(images.iter().all(|p| p.m() == mm), "images disagree on rank");
        let mut out = CPoly::zero(mm);
        for (a, c) in &self.terms {
            let mut term = CPoly::constant(mm, c.clone());
            for (t, &e) in a.iter().enumerate() {
                assert!(e >= 0, "composition needs polynomial exponents");
                if e > 0 {
                    term = &term * &images[t].pow(e as u32);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// The cyclic generator rotation x_i ↦ x_{i+k}, indices mod m. Every use
    /// on the linear family keeps the top slots empty, so there the rotation
    /// agrees with the plain index shift.
    pub fn rotated(&self, k: usize) -> CPoly {
        let mut out = CPoly::zero(self.m);
        for (a, c) in &self.terms {
            let mut e = vec![0; self.m];
            for (i, &exp) in a.iter().enumerate() {
                e[(i + k) % self.m] = exp;
            }
            out.add_term(e, c.clone());
        }
        out
    }

    fn add_term(&mut self, e: Vec<i64>, c: Rational) {
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
    fn leading(&self) -> Option<(&Vec<i64>, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Componentwise extremes of the support, None when zero.
    fn support_box(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        let (mut lo, mut hi) = (first.clone(), first);
        for a in it {
            for (c, &e) in a.iter().enumerate() {
                lo[c] = lo[c].min(e);
                hi[c] = hi[c].max(e);
            }
        }
        Some((lo, hi))
    }

    /// Render with a generator letter and an index offset: coordinate c
    /// prints as `{letter}{c + base}`.
    pub fn render_with(&self, letter: &str, base: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (a, c)) in self.terms.iter().rev().enumerate() {
            let mut parts = Vec::new();
            for (i, &e) in a.iter().enumerate() {
                if e == 1 {
                    parts.push(format!("{letter}{}", i + base));
                } else if e != 0 {
                    parts.push(format!("{letter}{}^{e}", i + base));
                }
            }
            let mono = parts.join("*");
            let neg = c.is_negative();
            let mag = if neg { -c } else { c.clone() };
            let body = if mono.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                mono
            } else {
                format!("{mag}*{mono}")
            };
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

impl Add for &CPoly {
    type Output = CPoly;
    fn add(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.m, rhs.m, "dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl Sub for &CPoly {
    type Output = CPoly;
    fn sub(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.m, rhs.m, "dimension mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c);
        }
        out
    }
}

impl Neg for &CPoly {
    type Output = CPoly;
    fn neg(self) -> CPoly {
        CPoly {
            m: self.m,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }
}

impl Mul for &CPoly {
    type Output = CPoly;
    fn mul(self, rhs: &CPoly) -> CPoly {
        assert_eq!(self.m, rhs.m, "dimension mismatch");
        let mut out = CPoly::zero(self.m);
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with("x", 1))
    }
}

impl fmt::Debug for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with("x", 1))
    }
}

// JSON form mirrors the scalar encoding: rank plus [exponent-vector,
// "rational"] pairs in ascending key order.
#[derive(Serialize, Deserialize)]
struct CPolyRepr {
    m: usize,
    terms: Vec<(Vec<i64>, String)>,
}

impl Serialize for CPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = CPolyRepr {
            m: self.m,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.to_string())).collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CPolyRepr::deserialize(deserializer)?;
        let mut out = CPoly::zero(repr.m);
        for (a, c) in repr.terms {
            if a.len() != repr.m {
                return Err(serde::de::Error::custom(format!(
                    "exponent vector {a:?} does not match rank {}",
                    repr.m
                )));
            }
            let c: Rational = c
                .parse()
                .map_err(|e| serde::de::Error::custom(format!("bad rational {c:?}: {e}")))?;
            out.add_term(a, c);
        }
        Ok(out)
    }
}

/// Exact division in the commutative Laurent ring. Fails with
/// [`Error::NotDivisible`] when no exact quotient exists.
pub fn exact_divide(f: &CPoly, g: &CPoly) -> Result<CPoly> {
    assert_eq!(f.m, g.m, "dimension mismatch");
    if g.is_zero() {
        return Err(Error::NotDivisible("division by zero".into()));
    }
    if f.is_zero() {
        return Ok(CPoly::zero(f.m));
    }
    // Componentwise degrees are additive in a domain, so any true quotient
    // has its support inside this box; the box also bounds the loop.
    let (flo, fhi) = f.support_box().expect("nonzero");
    let (glo, ghi) = g.support_box().expect("nonzero");
    let lo: Vec<i64> = flo.iter().zip(&glo).map(|(a, b)| a - b).collect();
    let hi: Vec<i64> = fhi.iter().zip(&ghi).map(|(a, b)| a - b).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return Err(Error::NotDivisible(format!("empty quotient box for {f} / {g}")));
    }
    let (ge, gc) = {
        let (e, c) = g.leading().expect("nonzero");
        (e.clone(), c.clone())
    };
    let mut rem = f.clone();
    let mut quot = CPoly::zero(f.m);
    // The lex-max term of a product is the product of lex-max terms, so the
    // quotient term eliminating rem's leading term is forced; remainders stay
    // in a fixed finite support, so strict lex descent terminates.
    while let Some((re, rc)) = rem.leading() {
        let e: Vec<i64> = re.iter().zip(&ge).map(|(a, b)| a - b).collect();
        if e.iter().zip(lo.iter().zip(&hi)).any(|(c, (l, h))| c < l || c > h) {
            return Err(Error::NotDivisible(format!(
                "leading term of {rem} is not reachable from {g}"
            )));
        }
        let c = rc / &gc;
        let t = CPoly::monomial(e, c);
        rem = &rem - &(&t * g);
        quot = &quot + &t;
    }
    Ok(quot)
}

/// Poisson bracket data on generator pairs; values on everything else follow
/// from the Leibniz rule. Only pairs i < j are stored, the mirror is implied
/// by antisymmetry, and absent pairs commute.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable {
    m: usize,
    ambient: Ambient,
    entries: BTreeMap<(usize, usize), CPoly>,
}

impl BracketTable {
    pub fn new(m: usize, ambient: Ambient) -> Self {
        BracketTable { m, ambient, entries: BTreeMap::new() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Install {x_{i+1}, x_{j+1}} := p for 0-based i < j.
    pub fn set(&mut self, i: usize, j: usize, p: CPoly) -> Result<()> {
        if i >= j || j >= self.m {
            return Err(Error::Invalid(format!(
                "bracket pair ({i}, {j}) is not an ordered pair below {}",
                self.m
            )));
        }
        if p.m() != self.m {
            return Err(Error::Invalid(format!(
                "entry rank {} does not match table rank {}",
                p.m(),
                self.m
            )));
        }
        if self.ambient == Ambient::Polynomial && !p.is_polynomial() {
            return Err(Error::Invalid(
                "Laurent exponents need a Laurent ambient".into(),
            ));
        }
        if p.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), p);
        }
        Ok(())
    }

    /// {x_{i+1}, x_{j+1}} for any 0-based pair, antisymmetry included.
    pub fn entry(&self, i: usize, j: usize) -> CPoly {
        assert!(i < self.m && j < self.m, "generator index out of range");
        if i < j {
            self.entries.get(&(i, j)).cloned().unwrap_or_else(|| CPoly::zero(self.m))
        } else if i > j {
            self.entries.get(&(j, i)).map(|p| -p).unwrap_or_else(|| CPoly::zero(self.m))
        } else {
            CPoly::zero(self.m)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BracketEntryRepr {
    i: usize,
    j: usize,
    poly: CPoly,
}

#[derive(Serialize, Deserialize)]
struct BracketTableRepr {
    m: usize,
    ambient: Ambient,
    entries: Vec<BracketEntryRepr>,
}

impl Serialize for BracketTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = BracketTableRepr {
            m: self.m,
            ambient: self.ambient,
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), p)| BracketEntryRepr { i, j, poly: p.clone() })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BracketTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = BracketTableRepr::deserialize(deserializer)?;
        let mut out = BracketTable::new(repr.m, repr.ambient);
        for e in repr.entries {
            out.set(e.i, e.j, e.poly).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

/// The unique biderivation extending the table: {f, g} expands through the
/// chain rule as Σ_{i<j} (∂_i f ∂_j g − ∂_j f ∂_i g) {x_i, x_j}.
pub fn bracket(t: &BracketTable, f: &CPoly, g: &CPoly) -> Result<CPoly> {
    if f.m() != t.m || g.m() != t.m {
        return Err(Error::Invalid(format!(
            "bracket dimension mismatch: table rank {}, arguments of rank {} and {}",
            t.m,
            f.m(),
            g.m()
        )));
    }
    if t.ambient == Ambient::Polynomial && (!f.is_polynomial() || !g.is_polynomial()) {
        return Err(Error::Invalid("Laurent exponents need a Laurent ambient".into()));
    }
    let df: Vec<CPoly> = (0..t.m).map(|i| f.partial(i)).collect();
    let dg: Vec<CPoly> = (0..t.m).map(|i| g.partial(i)).collect();
    let mut acc = CPoly::zero(t.m);
    for (&(i, j), entry) in &t.entries {
        let skew = &(&df[i] * &dg[j]) - &(&df[j] * &dg[i]);
        if skew.is_zero() {
            continue;
        }
        acc = &acc + &(&skew * entry);
    }
    Ok(acc)
}

/// Evaluate the Jacobi cyclic sum on every generator triple. The bracket is
/// built as a biderivation, so the Jacobiator is a derivation in each slot
/// and vanishing on generators settles the whole algebra.
pub fn jacobi_check(t: &BracketTable) -> Report {
    let mut report = Report::new("jacobi");
    let gens: Vec<CPoly> = (0..t.m).map(|i| CPoly::generator(t.m, i)).collect();
    let br = |a: &CPoly, b: &CPoly| bracket(t, a, b).expect("generator ranks agree");
    for i in 0..t.m {
        for j in i + 1..t.m {
            for k in j + 1..t.m {
                let cyc = &(&br(&br(&gens[i], &gens[j]), &gens[k])
                    + &br(&br(&gens[j], &gens[k]), &gens[i]))
                    + &br(&br(&gens[k], &gens[i]), &gens[j]);
                report.check(
                    format!("triple/i={i}/j={j}/k={k}"),
                    "generator triple Jacobi identity",
                    cyc.is_zero(),
                    || format!("cyclic sum = {cyc}"),
                );
            }
        }
    }
    report
}

/// Divide every coefficient of the commutator by q - 1 and specialize at
/// v = 1, turning a quantum commutator into its classical bracket value.
pub fn divided_at_one(f: &NCPoly) -> Result<CPoly> {
    let qm1 = &LaurentScalar::q() - &LaurentScalar::one();
    let one = Rational::one();
    let mut out = CPoly::zero(f.n());
    for (a, c) in f.terms() {
        let quot = crate::scalar::exact_divide(c, &qm1)?;
        let at1 = quot.specialize(&one);
        if !at1.is_zero() {
            out.add_term(a.iter().map(|&e| e as i64).collect(), at1);
        }
    }
    Ok(out)
}

/// The bracket table {x_i, x_j} := ((x_i x_j - x_j x_i)/(q - 1))|_{q=1}
/// attached to a presentation that becomes commutative at q = 1.
pub fn semiclassical_limit(p: &Presentation) -> Result<BracketTable> {
    let n = p.n();
    let one = Rational::one();
    for i in 1..=n {
        for j in i + 1..=n {
            let q1 = p.q(i, j).specialize(&one);
            let r1 = p.r(i, j).specialize(&one);
            if !q1.is_one() || !r1.is_zero() {
                return Err(Error::NotCommutativeAtOne(format!(
                    "relation x{i}x{j}: q specializes to {q1}, r to {r1}"
                )));
            }
        }
    }
    let mut table = BracketTable::new(n, Ambient::Polynomial);
    for i in 1..=n {
        for j in i + 1..=n {
            let c = pbw::commutator(p, &NCPoly::generator(n, i), &NCPoly::generator(n, j))?;
            table.set(i - 1, j - 1, divided_at_one(&c)?)?;
        }
    }
    Ok(table)
}

/// Basis of the integer row kernel {a : aΛ = 0}, computed by unimodular row
/// elimination; the basis spans the full kernel lattice, and an empty answer
/// certifies Poisson simplicity of the log-canonical Laurent algebra.
pub fn lambda_kernel(lam: &SkewMatrix) -> Vec<Vec<i64>> {
    let m = lam.m();
    let mut a: Vec<Vec<BigInt>> = lam
        .rows()
        .iter()
        .map(|r| r.iter().map(|&e| BigInt::from(e)).collect())
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..m)
        .map(|i| (0..m).map(|j| BigInt::from(i64::from(i == j))).collect())
        .collect();
    let mut pivot = 0usize;
    for col in 0..m {
        if pivot == m {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for r in pivot..m {
                if !a[r][col].is_zero()
                    && best.is_none_or(|b| a[r][col].magnitude() < a[b][col].magnitude())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            a.swap(pivot, b);
            u.swap(pivot, b);
            let mut cleared = true;
            for r in pivot + 1..m {
                if a[r][col].is_zero() {
                    continue;
                }
                let q = &a[r][col] / &a[pivot][col];
                if !q.is_zero() {
                    for c in 0..m {
                        let d = &q * &a[pivot][c];
                        a[r][c] -= d;
                        let d = &q * &u[pivot][c];
                        u[r][c] -= d;
                    }
                }
                if !a[r][col].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                break;
            }
        }
        if !a[pivot][col].is_zero() {
            pivot += 1;
        }
    }
    let mut basis: Vec<Vec<i64>> = u[pivot..]
        .iter()
        .map(|row| {
            let mut v: Vec<i64> = row
                .iter()
                .map(|e| e.to_i64().expect("kernel entry fits i64"))
                .collect();
            if v.iter().find(|&&e| e != 0).is_some_and(|&e| e < 0) {
                for e in &mut v {
                    *e = -*e;
                }
            }
            v
        })
        .collect();
    basis.sort();
    basis
}

/// The tower z_{-1} = 0, z_0 = 1, z_i = z_{i-1} x_i - z_{i-2} in m variables.
pub fn z_poly(m: usize, i: i64) -> CPoly {
    assert!((-1..=m as i64).contains(&i), "tower index out of range");
    if i < 0 {
        return CPoly::zero(m);
    }
    let mut prev = CPoly::zero(m);
    let mut cur = CPoly::one(m);
    for k in 1..=i {
        let next = &(&cur * &CPoly::generator(m, k as usize - 1)) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Ω = z_{n-1} x_n - z_{n-2} - θ(z_{n-2}) for the cyclic family on odd n,
/// where θ rotates generator indices by one.
pub fn omega_poly(n: usize) -> CPoly {
    assert!(n >= 3 && n % 2 == 1, "central element needs odd n >= 3");
    let zn1 = z_poly(n, n as i64 - 1);
    let zn2 = z_poly(n, n as i64 - 2);
    &(&(&zn1 * &CPoly::generator(n, n - 1)) - &zn2) - &zn2.rotated(1)
}

/// Membership in the principal ideal (z_k - λ) of the polynomial ring,
/// 1-based k >= 1. A principal ideal reduces membership to exact division;
/// the Laurent quotient is unique in a domain, so f lies in the polynomial
/// ideal exactly when the quotient exists and has no negative exponents
/// (which matters when z_k - λ is reducible, as for k = 2, λ = -1).
pub fn principal_membership(f: &CPoly, k: usize, lambda: &Rational) -> bool {
    let m = f.m();
    assert!(k >= 1 && k <= m, "divisor index out of range");
    assert!(f.is_polynomial(), "membership lives in the polynomial ring");
    if f.is_zero() {
        return true;
    }
    let g = &z_poly(m, k as i64) - &CPoly::constant(m, lambda.clone());
    match exact_divide(f, &g) {
        Ok(h) => h.is_polynomial(),
        Err(_) => false,
    }
}

/// Bracket table of the linear family: adjacent pairs satisfy
/// {x_i, x_{i+1}} = x_i x_{i+1} - 1 and distant pairs twist by gap parity.
pub fn preset_fl(n: usize) -> Result<BracketTable> {
    if n < 1 {
        return Err(Error::Invalid("linear bracket preset needs n >= 1".into()));
    }
    let mut t = BracketTable::new(n, Ambient::Polynomial);
    for i in 0..n {
        for j in i + 1..n {
            let prod = &CPoly::generator(n, i) * &CPoly::generator(n, j);
            let entry = if j == i + 1 {
                &prod - &CPoly::one(n)
            } else if (j - i) % 2 == 1 {
                prod
            } else {
                -&prod
            };
            t.set(i, j, entry)?;
        }
    }
    Ok(t)
}

/// Bracket table of the cyclic family on odd n: the linear table plus the
/// wrap relation {x_n, x_1} = x_n x_1 - 1 on the closing pair.
pub fn preset_fc(n: usize) -> Result<BracketTable> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid("cyclic bracket preset needs odd n >= 3".into()));
    }
    let mut t = preset_fl(n)?;
    let prod = &CPoly::generator(n, 0) * &CPoly::generator(n, n - 1);
    t.set(0, n - 1, &CPoly::one(n) - &prod)?;
    Ok(t)
}

/// Bracket table on the n+2 polynomial generators W_0..W_{n+1} attached to
/// the periodic quiver: odd gaps are log-canonical, even gaps commute, and
/// the extreme pair contributes {W_0, W_{n+1}} = 2 W_1 W_n.
pub fn preset_d(n: usize) -> Result<BracketTable> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid("periodic bracket preset needs odd n >= 3".into()));
    }
    let m = n + 2;
    let mut t = BracketTable::new(m, Ambient::Polynomial);
    for i in 0..m {
        for j in i + 1..m {
            if i == 0 && j == n + 1 {
                let p = (&CPoly::generator(m, 1) * &CPoly::generator(m, n)).scale(&rat_int(2));
                t.set(i, j, p)?;
            } else if (j - i) % 2 == 1 {
                t.set(i, j, &CPoly::generator(m, i) * &CPoly::generator(m, j))?;
            }
        }
    }
    Ok(t)
}

/// Log-canonical bracket on the Laurent generators w_0..w_n: {w_i, w_j} =
/// w_i w_j exactly when the gap is odd. Its integer kernel is trivial, which
/// is the Poisson simplicity used by the periodic-family checks.
pub fn preset_r(n: usize) -> Result<BracketTable> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid("periodic Laurent preset needs odd n >= 3".into()));
    }
    let m = n + 1;
    let mut t = BracketTable::new(m, Ambient::Laurent);
    for i in 0..m {
        for j in i + 1..m {
            if (j - i) % 2 == 1 {
                t.set(i, j, &CPoly::generator(m, i) * &CPoly::generator(m, j))?;
            }
        }
    }
    Ok(t)
}

/// Images of the cyclic generators under the exceptional substitution: the
/// top two generators collapse onto λ z_{n-3} and its shift, everything
/// below stays fixed. Composing with the quotient by (z_{n-2} - λ) gives the
/// exceptional Poisson morphism checked by the suite.
fn tau_images(n: usize, lambda: &Rational) -> Vec<CPoly> {
    let mut imgs: Vec<CPoly> = (0..n - 2).map(|i| CPoly::generator(n, i)).collect();
    let base = z_poly(n, n as i64 - 3);
    imgs.push(base.scale(lambda));
    imgs.push(base.rotated(1).scale(lambda));
    imgs
}

/// The Laurent w-family of the periodic quiver at q = 1: slots 0..n are the
/// generators, the window extends both ways through the exchange recurrences.
fn periodic_w_family(n: usize, lo: i64, hi: i64) -> Result<BTreeMap<i64, CPoly>> {
    let m = n + 1;
    let nn = n as i64;
    assert!(lo <= 0 && nn <= hi, "window must cover the initial cluster");
    let one = CPoly::one(m);
    let mut ws = BTreeMap::new();
    for i in 0..=nn {
        ws.insert(i, CPoly::generator(m, i as usize));
    }
    for i in nn + 1..=hi {
        let num = &one + &(&ws[&(i - nn)] * &ws[&(i - 1)]);
        ws.insert(i, exact_divide(&num, &ws[&(i - nn - 1)])?);
    }
    for i in (lo..0).rev() {
        let num = &one + &(&ws[&(i + nn)] * &ws[&(i + 1)]);
        ws.insert(i, exact_divide(&num, &ws[&(i + nn + 1)])?);
    }
    Ok(ws)
}

/// Run every classical identity at rank n. Odd n >= 3 runs the full suite
/// and repeats the linear-family block at rank n-1 so both parities of the
/// principal-ideal lemma are exercised; even n runs the linear block only.
pub fn suite_poisson(n: usize) -> Result<Report> {
    if n < 2 {
        return Err(Error::Invalid("poisson suite needs n >= 2".into()));
    }
    let mut report = Report::new(format!("poisson/n={n}"));
    linear_checks(&mut report, n)?;
    if n % 2 == 1 {
        linear_checks(&mut report, n - 1)?;
        cyclic_checks(&mut report, n)?;
        periodic_checks(&mut report, n)?;
    }
    Ok(report)
}

fn linear_checks(report: &mut Report, m: usize) -> Result<()> {
    let t = preset_fl(m)?;
    let zs: Vec<CPoly> = (-1..=m as i64).map(|i| z_poly(m, i)).collect();
    let z = |i: i64| -> &CPoly { &zs[(i + 1) as usize] };
    let xg = |i: usize| CPoly::generator(m, i - 1);

    for i in 1..=m as i64 {
        let want = &(&xg(1) * &z(i - 1).rotated(1)) - &z(i - 2).rotated(2);
        report.check(
            format!("zrec/m={m}/i={i}"),
            "tower recursion under the index shift",
            z(i) == &want,
            || format!("z{i} = {}, shifted form = {}", z(i), want),
        );
    }

    for i in 1..=m {
        let sign = rat_int(if i % 2 == 1 { 1 } else { -1 });
        for j in 0..=m as i64 {
            let got = bracket(&t, &xg(i), z(j))?;
            let want = if j + 1 < i as i64 {
                if j % 2 == 1 {
                    (&xg(i) * z(j)).scale(&sign)
                } else {
                    CPoly::zero(m)
                }
            } else if j + 1 == i as i64 {
                if i % 2 == 0 {
                    z(j - 1) - &(z(j) * &xg(i))
                } else {
                    z(j - 1).clone()
                }
            } else if j % 2 == 1 {
                CPoly::zero(m)
            } else {
                (&xg(i) * z(j)).scale(&sign)
            };
            report.check(
                format!("xz/m={m}/i={i}/j={j}"),
                "generator against the tower",
                got == want,
                || format!("{{x{i}, z{j}}} = {got}, expected {want}"),
            );
        }
    }

    for i in 0..=m as i64 {
        for j in i + 1..=m as i64 {
            let got = bracket(&t, z(i), z(j))?;
            let want = if i % 2 == 1 && j % 2 == 0 { z(i) * z(j) } else { CPoly::zero(m) };
            report.check(
                format!("zz/m={m}/i={i}/j={j}"),
                "tower pairs are log-canonical",
                got == want,
                || format!("{{z{i}, z{j}}} = {got}, expected {want}"),
            );
        }
    }

    // Principal ideals at the top of the tower: odd rank makes z_m central,
    // even rank keeps (z_m) and (z_m, z_{m-1} - λ) Poisson stable.
    if m % 2 == 1 {
        for i in 1..=m {
            let b = bracket(&t, &xg(i), z(m as i64))?;
            report.check(
                format!("prelim-central/m={m}/i={i}"),
                "top tower element is Poisson central",
                b.is_zero(),
                || format!("{{x{i}, z{m}}} = {b}"),
            );
            report.check(
                format!("prelim-member/m={m}/i={i}"),
                "bracket lands in the principal ideal",
                principal_membership(&b, m, &Rational::one()),
                || format!("{{x{i}, z{m}}} = {b} escapes (z{m} - 1)"),
            );
        }
    } else {
        for i in 1..=m {
            let top = bracket(&t, &xg(i), z(m as i64))?;
            let sign = rat_int(if i % 2 == 1 { 1 } else { -1 });
            let want = (&xg(i) * z(m as i64)).scale(&sign);
            report.check(
                format!("prelim-top/m={m}/i={i}"),
                "top tower bracket is a tower multiple",
                top == want,
                || format!("{{x{i}, z{m}}} = {top}, expected {want}"),
            );
            let sub = bracket(&t, &xg(i), z(m as i64 - 1))?;
            let want = if i == m { -z(m as i64) } else { CPoly::zero(m) };
            report.check(
                format!("prelim-sub/m={m}/i={i}"),
                "subprincipal bracket stays in the top ideal",
                sub == want,
                || format!("{{x{i}, z{}}} = {sub}, expected {want}", m - 1),
            );
        }
    }
    Ok(())
}

fn cyclic_checks(report: &mut Report, n: usize) -> Result<()> {
    let t = preset_fc(n)?;
    let nn = n as i64;
    let zs: Vec<CPoly> = (-1..=nn).map(|i| z_poly(n, i)).collect();
    let z = |i: i64| -> &CPoly { &zs[(i + 1) as usize] };
    let xg = |i: usize| CPoly::generator(n, i - 1);
    let om = omega_poly(n);

    for j in 1..=nn - 2 {
        let got = bracket(&t, &xg(n), z(j))?;
        let shifted = z(j - 1).rotated(1);
        let want = if j % 2 == 1 { &(z(j) * &xg(n)) - &shifted } else { -&shifted };
        report.check(
            format!("cz/j={j}"),
            "wrap generator against the tower",
            got == want,
            || format!("{{x{n}, z{j}}} = {got}, expected {want}"),
        );
    }

    let got = bracket(&t, &xg(n), z(nn - 1))?;
    let want = &z(nn - 2).clone() - &z(nn - 2).rotated(1);
    report.check(
        "cz-top",
        "wrap generator against the top tower element",
        got == want,
        || format!("{{x{n}, z{}}} = {got}, expected {want}", n - 1),
    );

    report.check(
        "omega-shift",
        "central element is shift invariant",
        om.rotated(1) == om,
        || format!("rotated: {}, original: {om}", om.rotated(1)),
    );
    for i in 1..=n {
        let b = bracket(&t, &xg(i), &om)?;
        report.check(
            format!("comega-central/i={i}"),
            "central element Poisson commutes",
            b.is_zero(),
            || format!("{{x{i}, omega}} = {b}"),
        );
    }

    // Brackets against the shifted subtop tower element.
    let tt = z(nn - 3).rotated(1);
    let got = bracket(&t, &xg(1), &tt)?;
    let want_shift = -&z(nn - 4).rotated(2);
    let want_affine = &z(nn - 2).clone() - &(&xg(1) * &tt);
    report.check(
        "theta-top-shift",
        "first generator against the shifted subtop, shift form",
        got == want_shift,
        || format!("got {got}, expected {want_shift}"),
    );
    report.check(
        "theta-top-affine",
        "first generator against the shifted subtop, affine form",
        got == want_affine,
        || format!("got {got}, expected {want_affine}"),
    );
    for i in 2..=n - 2 {
        let got = bracket(&t, &xg(i), &tt)?;
        let sign = rat_int(if i % 2 == 0 { 1 } else { -1 });
        let want = (&xg(i) * &tt).scale(&sign);
        report.check(
            format!("theta-x/i={i}"),
            "interior generator twists the shifted subtop",
            got == want,
            || format!("got {got}, expected {want}"),
        );
    }
    for i in 0..=nn - 3 {
        let got = bracket(&t, z(i), &tt)?;
        let reach = z(nn - i - 3).rotated(i as usize + 1);
        let want = if i % 2 == 1 { -&reach } else { &(z(i) * &tt) - &reach };
        report.check(
            format!("theta-z/i={i}"),
            "tower element against the shifted subtop",
            got == want,
            || format!("got {got}, expected {want}"),
        );
    }
    let got = bracket(&t, z(nn - 3), &tt)?;
    let want = &(z(nn - 3) * &tt) - &CPoly::one(n);
    report.check(
        "theta-diag",
        "subtop against its own shift",
        got == want,
        || format!("got {got}, expected {want}"),
    );

    // The exceptional substitution is a Poisson morphism into the quotient
    // by (z_{n-2} - λ) exactly for λ = ±1, and the listed elements fall into
    // its kernel.
    let tl = preset_fl(n)?;
    for lam_i in [1i64, -1] {
        let lam = rat_int(lam_i);
        let imgs = tau_images(n, &lam);
        for i in 1..=n {
            for j in i + 1..=n {
                let lhs = t.entry(i - 1, j - 1).compose(&imgs);
                let rhs = bracket(&tl, &imgs[i - 1], &imgs[j - 1])?;
                let defect = &lhs - &rhs;
                report.check(
                    format!("exc-hom/lambda={lam_i}/i={i}/j={j}"),
                    "exceptional substitution is Poisson modulo the divisor",
                    principal_membership(&defect, n - 2, &lam),
                    || format!("defect {defect} escapes (z{} - {lam_i})", n - 2),
                );
            }
        }
        let members = [
            (format!("z{}", n - 1), z(nn - 1).compose(&imgs)),
            (
                format!("theta-z{}", n - 2),
                &z(nn - 2).rotated(1).compose(&imgs) - &CPoly::constant(n, lam.clone()),
            ),
            (
                "omega".to_string(),
                &om.compose(&imgs) + &CPoly::constant(n, rat_int(2 * lam_i)),
            ),
        ];
        for (name, f) in members {
            report.check(
                format!("exc-member/lambda={lam_i}/{name}"),
                "kernel element lies in the principal ideal",
                principal_membership(&f, n - 2, &lam),
                || format!("{f} escapes (z{} - {lam_i})", n - 2),
            );
        }
    }
    Ok(())
}

fn periodic_checks(report: &mut Report, n: usize) -> Result<()> {
    let nn = n as i64;
    let m = n + 1;
    let tr = preset_r(n)?;
    let two = rat_int(2);

    let wlo = -nn;
    let whi = 2 * nn + 2;
    let ws = periodic_w_family(n, wlo, whi)?;
    let w = |i: i64| -> &CPoly { &ws[&i] };
    let xlo = -1i64;
    let xhi = 2 * nn + 1;
    let xs: BTreeMap<i64, CPoly> = (xlo..=xhi)
        .map(|i| Ok((i, exact_divide(&(w(i - 1) + w(i + 1)), w(i))?)))
        .collect::<Result<_>>()?;
    let x = |i: i64| -> &CPoly { &xs[&i] };

    for i in xlo..xhi {
        let got = bracket(&tr, x(i), x(i + 1))?;
        let want = &(x(i) * x(i + 1)).scale(&two) - &CPoly::constant(m, two.clone());
        report.check(
            format!("px-adjacent/i={i}"),
            "adjacent pair bracket",
            got == want,
            || format!("got {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
        );
    }

    for i in xlo..=xhi {
        for j in i + 2..=xhi {
            let folded = (j - i).rem_euclid(nn);
            let got = bracket(&tr, x(i), x(j))?;
            let prod = x(i) * x(j);
            let (want, tag) = match folded {
                0 => (CPoly::zero(m), "period-folded equal pair"),
                1 => (
                    &prod.scale(&two) - &CPoly::constant(m, two.clone()),
                    "period-folded adjacent pair",
                ),
                f if f == nn - 1 => (
                    &CPoly::constant(m, two.clone()) - &prod.scale(&two),
                    "period-folded reverse adjacent pair",
                ),
                f if f % 2 == 0 => (prod.scale(&rat_int(-2)), "even-gap pair twist"),
                _ => (prod.scale(&two), "odd-gap pair twist"),
            };
            report.check(
                format!("px-gap/i={i}/j={j}"),
                tag,
                got == want,
                || format!("got {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
            );
        }
    }

    for i in xlo..=nn + 1 {
        report.check(
            format!("px-periodic/i={i}"),
            "x family has period n",
            x(i) == x(i + nn),
            || format!("x{i} = {}, x{} = {}", x(i).render_with("w", 0), i + nn, x(i + nn).render_with("w", 0)),
        );
    }

    for i in xlo..=xhi {
        let got = w(i) * x(i);
        let want = w(i - 1) + w(i + 1);
        report.check(
            format!("pw-exchange/i={i}"),
            "exchange identity",
            got == want,
            || format!("w{i}*x{i} = {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
        );
    }

    for i in 0..=nn {
        let got = bracket(&tr, x(i), w(i))?;
        let difference = w(i - 1) - w(i + 1);
        let affine_up = &(x(i) * w(i)) - &w(i + 1).scale(&two);
        let affine_down = &w(i - 1).scale(&two) - &(x(i) * w(i));
        report.check(
            format!("pxw-diag/i={i}"),
            "diagonal pair in all three forms",
            got == difference && got == affine_up && got == affine_down,
            || format!("got {}, expected {}", got.render_with("w", 0), difference.render_with("w", 0)),
        );
    }

    for i in 1..=n {
        for j in 0..=n {
            if j == i || (i == n && j == 0) {
                continue;
            }
            let sign = if (i < j && (i + j) % 2 == 0) || (i > j && (i + j) % 2 == 1) {
                rat_int(1)
            } else {
                rat_int(-1)
            };
            let got = bracket(&tr, x(i as i64), w(j as i64))?;
            let want = (x(i as i64) * w(j as i64)).scale(&sign);
            report.check(
                format!("pxw-twist/i={i}/j={j}"),
                "cross pair is log-canonical",
                got == want,
                || format!("got {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
            );
        }
    }

    let got = bracket(&tr, x(nn), w(0))?;
    let want = &(x(nn) * w(0)) - &w(1).scale(&two);
    report.check(
        "pxw-wrap",
        "closing cross pair picks up the affine term",
        got == want,
        || format!("got {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
    );

    for i in wlo..=whi {
        for j in i + 1..=(i + nn).min(whi) {
            let got = bracket(&tr, w(i), w(j))?;
            let want = if (i + j).rem_euclid(2) == 1 { w(i) * w(j) } else { CPoly::zero(m) };
            report.check(
                format!("pww-pair/i={i}/j={j}"),
                "w pairs within one period",
                got == want,
                || format!("got {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
            );
        }
    }

    let got = bracket(&tr, w(0), w(nn + 1))?;
    let want = (w(1) * w(nn)).scale(&two);
    report.check(
        "pww-wrap",
        "period-plus-one pair",
        got == want,
        || format!("got {}, expected {}", got.render_with("w", 0), want.render_with("w", 0)),
    );

    // Polynomial model on W_0..W_{n+1}: Jacobi on triples, the central
    // element, and the explicit cancellation of its two graded pieces.
    let td = preset_d(n)?;
    report.absorb("jacobi-D", jacobi_check(&td));
    let md = n + 2;
    let wg = |i: usize| CPoly::generator(md, i);
    let delta = &(&(&wg(0) * &wg(n + 1)) - &(&wg(1) * &wg(n))) - &CPoly::one(md);
    for i in 0..=n + 1 {
        let b = bracket(&td, &wg(i), &delta)?;
        report.check(
            format!("central/i={i}"),
            "determinant-like element is Poisson central",
            b.is_zero(),
            || format!("{{W{i}, delta}} = {}", b.render_with("W", 0)),
        );
    }
    let part1 = bracket(&td, &wg(n + 1), &(&wg(0) * &wg(n + 1)))?;
    let part2 = bracket(&td, &wg(n + 1), &(&wg(1) * &wg(n)))?;
    let prod = (&(&wg(1) * &wg(n)) * &wg(n + 1)).scale(&rat_int(-2));
    report.check(
        "central-chi",
        "the two graded pieces of the central bracket cancel",
        part1 == prod && part2 == prod && (&part1 - &part2).is_zero(),
        || {
            format!(
                "pieces {} and {}",
                part1.render_with("W", 0),
                part2.render_with("W", 0)
            )
        },
    );

    // The cyclic polynomial table is exactly half the Laurent-family bracket
    // on the x generators.
    let tc = preset_fc(n)?;
    let imgs: Vec<CPoly> = (1..=nn).map(|i| x(i).clone()).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            let lhs = bracket(&tr, x(i as i64), x(j as i64))?;
            let rhs = tc.entry(i - 1, j - 1).compose(&imgs).scale(&two);
            report.check(
                format!("half-scale/i={i}/j={j}"),
                "cyclic table is half the periodic-family bracket",
                lhs == rhs,
                || format!("family {}, doubled table {}", lhs.render_with("w", 0), rhs.render_with("w", 0)),
            );
        }
    }
    Ok(())
}
