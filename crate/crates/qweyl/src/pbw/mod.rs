//! Rewriting kernel for quadratic algebras presented by
//!
//! ```text
//! x_i x_j = q_ij x_j x_i + r_ij        (i < j, r_ij a scalar)
//! ```
//!
//! with normal forms taken in the standard monomials x_1^{a_1}···x_n^{a_n}.
//! Provides the presentation type with its PBW condition test and a
//! brute-force diamond oracle, the linear and cyclic presets, normal-form
//! arithmetic, the distinguished elements z_i and Ω, homomorphism checking
//! with the named shift/sign/scaling/reversal maps, classification up to
//! relabeling and rescaling, and the structure identity suite.
//!
//! Generator indices are 1-based in the public API (x_1, …, x_n); exponent
//! vectors store x_1's exponent at position 0.

mod classify;
mod oracle;
mod suite;

pub use classify::{apply_change, classify, ClassificationResult, Shape};
pub use oracle::{diamond_oracle, reduce_word};
pub use suite::suite_structure;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::LaurentScalar;

/// Which preset family a computation runs in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Linear,
    Cyclic,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Linear => "L",
            Family::Cyclic => "C",
        })
    }
}

/// A quadratic presentation x_i x_j = q_ij x_j x_i + r_ij on n generators.
///
/// Tables are stored densely with q_ii = 1 and r_ii = 0. The construction
/// invariants q_ji = q_ij^{-1} and r_ji = −q_ij^{-1} r_ij are enforced, and
/// the PBW condition is evaluated once and cached.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    n: usize,
    q: Vec<Vec<LaurentScalar>>,
    r: Vec<Vec<LaurentScalar>>,
    pbw: bool,
}

impl Presentation {
    /// Build from full n×n tables, validating every invariant.
    pub fn from_tables(
        n: usize,
        q: Vec<Vec<LaurentScalar>>,
        r: Vec<Vec<LaurentScalar>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("presentation needs at least one generator".into()));
        }
        if q.len() != n || r.len() != n || q.iter().any(|row| row.len() != n) || r.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid(format!("tables must be {n}x{n}")));
        }
        let one = LaurentScalar::one();
        for i in 0..n {
            if q[i][i] != one || !r[i][i].is_zero() {
                return Err(Error::Invalid(format!(
                    "diagonal must have q_{{{0}{0}}} = 1 and r_{{{0}{0}}} = 0",
                    i + 1
                )));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let qij = &q[i][j];
                if !qij.is_unit() {
                    return Err(Error::Invalid(format!(
                        "q_{{{}{}}} = {} is not a unit",
                        i + 1,
                        j + 1,
                        qij.render_v()
                    )));
                }
                let qji = qij.inverse().expect("unit");
                if q[j][i] != qji {
                    return Err(Error::Invalid(format!(
                        "q_{{{}{}}} must equal q_{{{}{}}}^-1",
                        j + 1,
                        i + 1,
                        i + 1,
                        j + 1
                    )));
                }
                if r[j][i] != (&qji * &r[i][j]).neg() {
                    return Err(Error::Invalid(format!(
                        "r_{{{}{}}} must equal -q_{{{}{}}}^-1 r_{{{}{}}}",
                        j + 1,
                        i + 1,
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let pbw = pbw_condition(n, &q, &r);
        Ok(Self { n, q, r, pbw })
    }

    /// Build from the upper triangle: `f(i, j)` returns (q_ij, r_ij) for
    /// 1-based i < j; the lower triangle is filled from the invariants.
    pub fn from_upper(
        n: usize,
        mut f: impl FnMut(usize, usize) -> (LaurentScalar, LaurentScalar),
    ) -> Result<Self> {
        let mut q = vec![vec![LaurentScalar::one(); n]; n];
        let mut r = vec![vec![LaurentScalar::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let (qij, rij) = f(i + 1, j + 1);
                let qji = qij
                    .inverse()
                    .ok_or_else(|| Error::Invalid(format!("q_{{{}{}}} is not a unit", i + 1, j + 1)))?;
                r[j][i] = (&qji * &rij).neg();
                q[j][i] = qji;
                q[i][j] = qij;
                r[i][j] = rij;
            }
        }
        Self::from_tables(n, q, r)
    }

    /// Copy of this presentation with the (i, j) relation replaced (1-based,
    /// i ≠ j); the mirrored entries and the cached PBW flag are recomputed.
    pub fn with_entry(&self, i: usize, j: usize, qij: LaurentScalar, rij: LaurentScalar) -> Result<Self> {
        assert!(i != j && (1..=self.n).contains(&i) && (1..=self.n).contains(&j));
        let (i, j, qij, rij) = if i < j {
            (i - 1, j - 1, qij, rij)
        } else {
            let qji = qij
                .inverse()
                .ok_or_else(|| Error::Invalid("q entry is not a unit".into()))?;
            let rji = (&qji * &rij).neg();
            (j - 1, i - 1, qji, rji)
        };
        let mut q = self.q.clone();
        let mut r = self.r.clone();
        let qji = qij
            .inverse()
            .ok_or_else(|| Error::Invalid("q entry is not a unit".into()))?;
        r[j][i] = (&qji * &rij).neg();
        q[j][i] = qji;
        q[i][j] = qij;
        r[i][j] = rij;
        Self::from_tables(self.n, q, r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// q_ij for 1-based i, j.
    pub fn q(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.q[i - 1][j - 1]
    }

    /// r_ij for 1-based i, j.
    pub fn r(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.r[i - 1][j - 1]
    }

    pub(crate) fn q0(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.q[i][j]
    }

    pub(crate) fn r0(&self, i: usize, j: usize) -> &LaurentScalar {
        &self.r[i][j]
    }

    /// Cached result of [`pbw_check`].
    pub fn is_pbw(&self) -> bool {
        self.pbw
    }

    pub fn graph(&self) -> GeneratorGraph {
        GeneratorGraph::from_presentation(self)
    }

    /// Right-multiply f by the generator with 0-based index i, in normal form.
    ///
    /// Each standard monomial x^a absorbs x_i by crossing the blocks
    /// x_j^{a_j} with j > i from the right. A full crossing of block j costs
    /// q_ji^{a_j}; alternatively the moving generator is consumed at block j
    /// via x_j^m x_i = q_ji^m x_i x_j^m + r_ji [m]_{q_ji} x_j^{m-1}, which
    /// ends the traversal.
    fn rmul_gen0(&self, f: &NCPoly, i: usize) -> NCPoly {
        let mut out = NCPoly::zero(self.n);
        for (a, c) in &f.terms {
            let mut suffix = LaurentScalar::one();
            for j in ((i + 1)..self.n).rev() {
                if a[j] == 0 {
                    continue;
                }
                let rji = &self.r[j][i];
                if !rji.is_zero() {
                    let coeff = &(&(c * &suffix) * rji) * &q_integer(a[j], &self.q[j][i]);
                    let mut e = a.clone();
                    e[j] -= 1;
                    out.add_term(e, coeff);
                }
                suffix = &suffix * &self.q[j][i].pow(i64::from(a[j]));
            }
            let mut e = a.clone();
            e[i] += 1;
            out.add_term(e, c * &suffix);
        }
        out
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation(n={}, pbw={})", self.n, self.pbw)
    }
}

impl Serialize for Presentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            n: usize,
            q: &'a Vec<Vec<LaurentScalar>>,
            r: &'a Vec<Vec<LaurentScalar>>,
        }
        Raw { n: self.n, q: &self.q, r: &self.r }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            q: Vec<Vec<LaurentScalar>>,
            r: Vec<Vec<LaurentScalar>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Presentation::from_tables(raw.n, raw.q, raw.r).map_err(serde::de::Error::custom)
    }
}

/// [m]_t = 1 + t + … + t^{m-1}.
fn q_integer(m: u32, t: &LaurentScalar) -> LaurentScalar {
    let mut acc = LaurentScalar::zero();
    let mut tp = LaurentScalar::one();
    for _ in 0..m {
        acc = &acc + &tp;
        tp = &tp * t;
    }
    acc
}

fn pbw_condition(n: usize, q: &[Vec<LaurentScalar>], r: &[Vec<LaurentScalar>]) -> bool {
    for i in 0..n {
        for j in (i + 1)..n {
            if r[i][j].is_zero() {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if q[i][k] != q[k][j] {
                    return false;
                }
            }
        }
    }
    true
}

/// True iff every nonzero r_ij forces q_ik = q_kj for all k outside {i, j}.
/// This is the exact condition under which the adjacent-swap rewriting
/// system has canonical normal forms (see [`diamond_oracle`]).
pub fn pbw_check(p: &Presentation) -> bool {
    p.pbw
}

/// The linear preset with an arbitrary unit parameter t:
/// adjacent relations x_i x_{i+1} = t x_{i+1} x_i + (1 − t), and
/// x_i x_j = t^{±1} x_j x_i (sign by the parity of j − i) otherwise.
pub fn linear_with_parameter(n: usize, t: &LaurentScalar) -> Result<Presentation> {
    if !t.is_unit() {
        return Err(Error::Invalid("preset parameter must be a unit".into()));
    }
    let one = LaurentScalar::one();
    Presentation::from_upper(n, |i, j| {
        let qij = if (j - i) % 2 == 1 { t.clone() } else { t.inverse().expect("unit") };
        let rij = if j == i + 1 { &one - t } else { LaurentScalar::zero() };
        (qij, rij)
    })
}

/// The cyclic preset on odd n: the linear relations plus the wrap-around
/// x_n x_1 = t x_1 x_n + (1 − t).
pub fn cyclic_with_parameter(n: usize, t: &LaurentScalar) -> Result<Presentation> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid(format!("cyclic preset needs odd n >= 3, got {n}")));
    }
    let linear = linear_with_parameter(n, t)?;
    // Wrap pair stored at (1, n): q_1n = t^{-1} already matches the linear
    // parity entry; only r changes, with r_1n = -t^{-1}(1 - t).
    let tinv = t.inverse().expect("unit");
    let one = LaurentScalar::one();
    linear.with_entry(1, n, tinv.clone(), (&tinv * &(&one - t)).neg())
}

/// L_n^q with the distinguished parameter q = v².
pub fn preset_linear(n: usize) -> Result<Presentation> {
    linear_with_parameter(n, &LaurentScalar::q())
}

/// C_n^q with the distinguished parameter q = v².
pub fn preset_cyclic(n: usize) -> Result<Presentation> {
    cyclic_with_parameter(n, &LaurentScalar::q())
}

pub fn preset_family(family: Family, n: usize) -> Result<Presentation> {
    match family {
        Family::Linear => preset_linear(n),
        Family::Cyclic => preset_cyclic(n),
    }
}

/// Polynomial in the standard monomials of a fixed generator count.
///
/// Invariant: no stored coefficient is zero; all exponent vectors have
/// length n.
#[derive(Clone, PartialEq, Eq)]
pub struct NCPoly {
    n: usize,
    terms: BTreeMap<Vec<u32>, LaurentScalar>,
}

impl NCPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: LaurentScalar) -> Self {
        let mut out = Self::zero(n);
        out.add_term(vec![0; n], c);
        out
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, LaurentScalar::one())
    }

    /// x_i (1-based i).
    pub fn generator(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "generator index {i} out of 1..={n}");
        let mut e = vec![0; n];
        e[i - 1] = 1;
        let mut out = Self::zero(n);
        out.add_term(e, LaurentScalar::one());
        out
    }

    pub fn monomial(exponents: Vec<u32>, c: LaurentScalar) -> Self {
        let mut out = Self::zero(exponents.len());
        out.add_term(exponents, c);
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &LaurentScalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> LaurentScalar {
        self.terms.get(exponents).cloned().unwrap_or_else(LaurentScalar::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &LaurentScalar) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(a, b)| (a.clone(), b * c)).collect(),
        }
    }

    fn add_term(&mut self, e: Vec<u32>, c: LaurentScalar) {
        debug_assert_eq!(e.len(), self.n);
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
}

impl Add for &NCPoly {
    type Output = NCPoly;
    fn add(self, rhs: &NCPoly) -> NCPoly {
        assert_eq!(self.n, rhs.n, "generator count mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl Sub for &NCPoly {
    type Output = NCPoly;
    fn sub(self, rhs: &NCPoly) -> NCPoly {
        assert_eq!(self.n, rhs.n, "generator count mismatch");
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.neg());
        }
        out
    }
}

impl Neg for &NCPoly {
    type Output = NCPoly;
    fn neg(self) -> NCPoly {
        NCPoly {
            n: self.n,
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c.neg())).collect(),
        }
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (a, c)) in self.terms.iter().rev().enumerate() {
            let mono = monomial_string(a, "x");
            let (neg, body) = coeff_mono_string(c, &mono);
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            f.write_str(&body)?;
        }
        Ok(())
    }
}

impl fmt::Debug for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// "x1^2*x3" for the exponent vector [2,0,1]; empty string for a constant.
pub(crate) fn monomial_string(a: &[u32], letter: &str) -> String {
    let mut parts = Vec::new();
    for (i, &e) in a.iter().enumerate() {
        if e == 1 {
            parts.push(format!("{letter}{}", i + 1));
        } else if e > 1 {
            parts.push(format!("{letter}{}^{e}", i + 1));
        }
    }
    parts.join("*")
}

/// Combine a scalar coefficient with a monomial body; returns
/// (leading sign pulled out, rendered magnitude). Multi-term coefficients are
/// parenthesized so the output re-parses unambiguously.
pub(crate) fn coeff_mono_string(c: &LaurentScalar, mono: &str) -> (bool, String) {
    if c.is_unit() {
        let rendered = c.render_q();
        let (neg, mag) = match rendered.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, rendered),
        };
        if mono.is_empty() {
            (neg, mag)
        } else if mag == "1" {
            (neg, mono.to_string())
        } else {
            (neg, format!("{mag}*{mono}"))
        }
    } else if mono.is_empty() {
        (false, format!("({})", c.render_q()))
    } else {
        (false, format!("({})*{mono}", c.render_q()))
    }
}

/// Normal form of fg. Signals `NonPBW` when the presentation fails the PBW
/// condition (normal forms would depend on reduction order).
pub fn multiply(p: &Presentation, f: &NCPoly, g: &NCPoly) -> Result<NCPoly> {
    assert_eq!(p.n, f.n, "generator count mismatch");
    assert_eq!(p.n, g.n, "generator count mismatch");
    if !p.pbw {
        return Err(Error::NonPBW(
            "presentation fails the PBW condition; products are order-dependent".into(),
        ));
    }
    let mut out = NCPoly::zero(p.n);
    for (b, cb) in &g.terms {
        let mut acc = f.scale(cb);
        for i in 0..p.n {
            for _ in 0..b[i] {
                acc = p.rmul_gen0(&acc, i);
            }
        }
        out = &out + &acc;
    }
    Ok(out)
}

/// f^k by repeated multiplication.
pub fn power(p: &Presentation, f: &NCPoly, k: u32) -> Result<NCPoly> {
    let mut acc = NCPoly::one(p.n);
    for _ in 0..k {
        acc = multiply(p, &acc, f)?;
    }
    Ok(acc)
}

/// fg − gf.
pub fn commutator(p: &Presentation, f: &NCPoly, g: &NCPoly) -> Result<NCPoly> {
    Ok(&multiply(p, f, g)? - &multiply(p, g, f)?)
}

/// fg − t·gf.
pub fn q_commutator(p: &Presentation, f: &NCPoly, g: &NCPoly, t: &LaurentScalar) -> Result<NCPoly> {
    Ok(&multiply(p, f, g)? - &multiply(p, g, f)?.scale(t))
}

/// The tower z_{-1} = 0, z_0 = 1, z_i = z_{i-1} x_i − z_{i-2}, in normal form.
pub fn z_element(p: &Presentation, i: usize) -> Result<NCPoly> {
    if i > p.n {
        return Err(Error::Invalid(format!("z_{i} needs at least {i} generators, have {}", p.n)));
    }
    let mut prev = NCPoly::zero(p.n); // z_{-1}
    let mut cur = NCPoly::one(p.n); // z_0
    for k in 1..=i {
        let next = &multiply(p, &cur, &NCPoly::generator(p.n, k))? - &prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Substitute x_k ↦ x_{k+by}; the support must stay within the generator
/// range. Standard monomials stay standard, so no renormalization is needed.
pub fn shift_generators(f: &NCPoly, by: usize) -> Result<NCPoly> {
    let mut out = NCPoly::zero(f.n);
    for (a, c) in &f.terms {
        let mut e = vec![0; f.n];
        for (k, &exp) in a.iter().enumerate() {
            if exp > 0 {
                if k + by >= f.n {
                    return Err(Error::Invalid(format!(
                        "shift by {by} pushes x{} out of range",
                        k + 1
                    )));
                }
                e[k + by] = exp;
            }
        }
        out.add_term(e, c.clone());
    }
    Ok(out)
}

/// Ω = z_{n-1} x_n − z_{n-2} − q·shift(z_{n-2}), normalized in the cyclic
/// preset on odd n. Central there, and invariant under the index shift.
pub fn omega(n: usize) -> Result<NCPoly> {
    let p = preset_cyclic(n)?;
    let zn1 = z_element(&p, n - 1)?;
    let zn2 = z_element(&p, n - 2)?;
    let shifted = shift_generators(&zn2, 1)?;
    let head = multiply(&p, &zn1, &NCPoly::generator(n, n))?;
    Ok(&(&head - &zn2) - &shifted.scale(&LaurentScalar::q()))
}

/// The graph on generators with an edge {i, j} exactly when r_ij ≠ 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorGraph {
    n: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl GeneratorGraph {
    pub fn from_presentation(p: &Presentation) -> Self {
        let mut adj = vec![BTreeSet::new(); p.n];
        for i in 0..p.n {
            for j in (i + 1)..p.n {
                if !p.r[i][j].is_zero() {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Self { n: p.n, adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree of the 1-based vertex i.
    pub fn degree(&self, i: usize) -> usize {
        self.adj[i - 1].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Sorted 1-based edge pairs (i, j) with i < j.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for &j in &self.adj[i] {
                if i < j {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub(crate) fn neighbors0(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i]
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_path(&self) -> bool {
        self.n >= 1
            && self.is_connected()
            && self.edge_count() == self.n - 1
            && self.max_degree() <= 2
    }

    pub fn is_cycle(&self) -> bool {
        self.n >= 3 && self.is_connected() && self.adj.iter().all(|s| s.len() == 2)
    }
}

/// True when the off-diagonal q table is {t, t^{-1}} for a single unit t,
/// which is returned in canonical orientation (positive v-degree, or the
/// numerator-heavy constant). Requires a connected generator graph.
pub fn single_parameter(p: &Presentation) -> Result<LaurentScalar> {
    if !p.graph().is_connected() {
        return Err(Error::NotConnected);
    }
    let mut first: Option<LaurentScalar> = None;
    for i in 0..p.n {
        for j in 0..p.n {
            if i == j {
                continue;
            }
            let val = &p.q[i][j];
            match &first {
                None => first = Some(val.clone()),
                Some(t) => {
                    if val != t && Some(val) != t.inverse().as_ref() {
                        return Err(Error::NotSingleParameter(format!(
                            "q_{{{}{}}} = {} is outside {{t, t^-1}} for t = {}",
                            i + 1,
                            j + 1,
                            val.render_v(),
                            t.render_v()
                        )));
                    }
                }
            }
        }
    }
    match first {
        Some(t) => Ok(classify::canonical_parameter(&t)),
        None => Err(Error::NotSingleParameter("no off-diagonal parameters present".into())),
    }
}

/// A generator-image specification between two presentations.
#[derive(Clone, Debug, PartialEq)]
pub struct HomSpec {
    pub source: Presentation,
    pub target: Presentation,
    pub images: Vec<NCPoly>,
}

impl HomSpec {
    pub fn new(source: Presentation, target: Presentation, images: Vec<NCPoly>) -> Result<Self> {
        if images.len() != source.n {
            return Err(Error::Invalid(format!(
                "expected {} generator images, got {}",
                source.n,
                images.len()
            )));
        }
        if images.iter().any(|f| f.n != target.n) {
            return Err(Error::Invalid("image polynomials must live in the target".into()));
        }
        Ok(Self { source, target, images })
    }
}

/// Substitute generator images into f and normalize in the target.
pub fn apply_hom(h: &HomSpec, f: &NCPoly) -> Result<NCPoly> {
    assert_eq!(f.n, h.source.n, "generator count mismatch");
    let mut out = NCPoly::zero(h.target.n);
    for (a, c) in &f.terms {
        let mut acc = NCPoly::constant(h.target.n, c.clone());
        for (k, &e) in a.iter().enumerate() {
            for _ in 0..e {
                acc = multiply(&h.target, &acc, &h.images[k])?;
            }
        }
        out = &out + &acc;
    }
    Ok(out)
}

/// True iff substituting the images into every source relation
/// x_i x_j − q_ij x_j x_i − r_ij yields zero in the target.
pub fn check_hom(h: &HomSpec) -> Result<bool> {
    for i in 0..h.source.n {
        for j in (i + 1)..h.source.n {
            let fi = &h.images[i];
            let fj = &h.images[j];
            let lhs = multiply(&h.target, fi, fj)?;
            let rhs = multiply(&h.target, fj, fi)?.scale(&h.source.q[i][j]);
            let residue = &(&lhs - &rhs) - &NCPoly::constant(h.target.n, h.source.r[i][j].clone());
            if !residue.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// outer ∘ inner: apply inner first, then push its images through outer.
pub fn compose_homs(outer: &HomSpec, inner: &HomSpec) -> Result<HomSpec> {
    if inner.target != outer.source {
        return Err(Error::Invalid("composition needs inner.target = outer.source".into()));
    }
    let images = inner
        .images
        .iter()
        .map(|f| apply_hom(outer, f))
        .collect::<Result<Vec<_>>>()?;
    HomSpec::new(inner.source.clone(), outer.target.clone(), images)
}

/// The cyclic index shift x_i ↦ x_{i+1 (mod n)} on the cyclic preset.
pub fn hom_theta(n: usize) -> Result<HomSpec> {
    let p = preset_cyclic(n)?;
    let images = (1..=n)
        .map(|i| NCPoly::generator(n, if i == n { 1 } else { i + 1 }))
        .collect();
    HomSpec::new(p.clone(), p, images)
}

/// The sign flip x_i ↦ −x_i on the cyclic preset.
pub fn hom_iota(n: usize) -> Result<HomSpec> {
    let p = preset_cyclic(n)?;
    let images = (1..=n)
        .map(|i| NCPoly::generator(n, i).scale(&LaurentScalar::from_int(-1)))
        .collect();
    HomSpec::new(p.clone(), p, images)
}

/// The scaling x_i ↦ ν^{(-1)^i} x_i on the linear preset, for a unit ν.
pub fn hom_iota_nu(n: usize, nu: &LaurentScalar) -> Result<HomSpec> {
    let p = preset_linear(n)?;
    let nu_inv = nu
        .inverse()
        .ok_or_else(|| Error::Invalid("scaling parameter must be a unit".into()))?;
    let images = (1..=n)
        .map(|i| NCPoly::generator(n, i).scale(if i % 2 == 1 { &nu_inv } else { nu }))
        .collect();
    HomSpec::new(p.clone(), p, images)
}

/// The reversal x_i ↦ x_{n-i+1}, landing in the preset with parameter q^{-1}.
pub fn hom_reversal(family: Family, n: usize) -> Result<HomSpec> {
    let qinv = LaurentScalar::q().inverse().expect("unit");
    let (source, target) = match family {
        Family::Linear => (preset_linear(n)?, linear_with_parameter(n, &qinv)?),
        Family::Cyclic => (preset_cyclic(n)?, cyclic_with_parameter(n, &qinv)?),
    };
    let images = (1..=n).map(|i| NCPoly::generator(n, n - i + 1)).collect();
    HomSpec::new(source, target, images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q() -> LaurentScalar {
        LaurentScalar::q()
    }

    fn one() -> LaurentScalar {
        LaurentScalar::one()
    }

    fn x(n: usize, i: usize) -> NCPoly {
        NCPoly::generator(n, i)
    }

    fn mul(p: &Presentation, f: &NCPoly, g: &NCPoly) -> NCPoly {
        multiply(p, f, g).unwrap()
    }

    #[test]
    fn linear_preset_tables() {
        let p = preset_linear(3).unwrap();
        assert_eq!(p.q(1, 2), &q());
        assert_eq!(p.r(1, 2), &(&one() - &q()));
        assert_eq!(p.q(1, 3), &q().inverse().unwrap());
        assert!(p.r(1, 3).is_zero());
        assert_eq!(p.q(2, 1), &q().inverse().unwrap());
        assert!(p.is_pbw());
    }

    #[test]
    fn cyclic_preset_tables() {
        let p = preset_cyclic(3).unwrap();
        // x_3 x_1 = q x_1 x_3 + 1 - q
        assert_eq!(p.q(3, 1), &q());
        assert_eq!(p.r(3, 1), &(&one() - &q()));
        assert_eq!(p.q(2, 3), &q());
        assert!(matches!(preset_cyclic(4), Err(Error::Invalid(_))));
        assert!(preset_cyclic(5).unwrap().is_pbw());
    }

    #[test]
    fn linear_graph_is_a_path() {
        let g = preset_linear(5).unwrap().graph();
        assert!(g.is_path());
        assert_eq!(g.edges(), vec![(1, 2), (2, 3), (3, 4), (4, 5)]);
        let g = preset_cyclic(5).unwrap().graph();
        assert!(g.is_cycle());
        assert_eq!(g.edge_count(), 5);
    }

    #[test]
    fn multiply_examples() {
        let p2 = preset_linear(2).unwrap();
        // x_2 x_1 = q^{-1} x_1 x_2 + 1 - q^{-1}
        let got = mul(&p2, &x(2, 2), &x(2, 1));
        let qinv = q().inverse().unwrap();
        let expect = &NCPoly::monomial(vec![1, 1], qinv.clone())
            + &NCPoly::constant(2, &one() - &qinv);
        assert_eq!(got, expect);

        let p3 = preset_linear(3).unwrap();
        let got = mul(&p3, &x(3, 3), &x(3, 1));
        assert_eq!(got, NCPoly::monomial(vec![1, 0, 1], q()));

        let a = mul(&p3, &mul(&p3, &x(3, 3), &x(3, 2)), &x(3, 1));
        let b = mul(&p3, &x(3, 3), &mul(&p3, &x(3, 2), &x(3, 1)));
        assert_eq!(a, b);
    }

    #[test]
    fn powers_of_a_generator_straighten() {
        let p = preset_linear(2).unwrap();
        // x_2^2 x_1 = q^{-2} x_1 x_2^2 + (1 - q^{-1})(1 + q^{-1}) x_2
        let x2sq = mul(&p, &x(2, 2), &x(2, 2));
        let got = mul(&p, &x2sq, &x(2, 1));
        let qinv = q().inverse().unwrap();
        let expect = &NCPoly::monomial(vec![1, 2], &qinv * &qinv)
            + &NCPoly::monomial(vec![0, 1], &(&one() - &qinv) * &(&one() + &qinv));
        assert_eq!(got, expect);
    }

    #[test]
    fn pbw_check_examples() {
        assert!(pbw_check(&preset_linear(5).unwrap()));
        assert!(pbw_check(&preset_cyclic(5).unwrap()));
        let broken = preset_linear(3)
            .unwrap()
            .with_entry(1, 3, q(), LaurentScalar::zero())
            .unwrap();
        assert!(!pbw_check(&broken));
        assert!(multiply(&broken, &x(3, 1), &x(3, 2)).is_err());
    }

    #[test]
    fn single_parameter_examples() {
        assert_eq!(single_parameter(&preset_linear(4).unwrap()).unwrap(), q());
        assert_eq!(single_parameter(&preset_cyclic(5).unwrap()).unwrap(), q());
        // Orientation: a presentation built on q^{-1} still reports q.
        let rev = linear_with_parameter(3, &q().inverse().unwrap()).unwrap();
        assert_eq!(single_parameter(&rev).unwrap(), q());

        // Two disconnected blocks with parameters q and q^3.
        let two_block = Presentation::from_upper(4, |i, j| match (i, j) {
            (1, 2) => (q(), &one() - &q()),
            (3, 4) => (q().pow(3), &one() - &q().pow(3)),
            _ => (one(), LaurentScalar::zero()),
        })
        .unwrap();
        assert!(matches!(single_parameter(&two_block), Err(Error::NotConnected)));
    }

    #[test]
    fn z_tower_examples() {
        let p = preset_linear(3).unwrap();
        assert_eq!(z_element(&p, 0).unwrap(), NCPoly::one(3));
        assert_eq!(z_element(&p, 1).unwrap(), x(3, 1));
        let z2 = &NCPoly::monomial(vec![1, 1, 0], one()) - &NCPoly::one(3);
        assert_eq!(z_element(&p, 2).unwrap(), z2);
        let z3 = &(&NCPoly::monomial(vec![1, 1, 1], one()) - &x(3, 1)) - &x(3, 3);
        assert_eq!(z_element(&p, 3).unwrap(), z3);
        assert!(z_element(&p, 4).is_err());
    }

    #[test]
    fn omega_at_three_is_central_and_shift_invariant() {
        let om = omega(3).unwrap();
        // (x_1 x_2 - 1) x_3 - x_1 - q x_2, already in normal form.
        let expect = &(&(&NCPoly::monomial(vec![1, 1, 1], one()) - &x(3, 3)) - &x(3, 1))
            - &x(3, 2).scale(&q());
        assert_eq!(om, expect);

        let p = preset_cyclic(3).unwrap();
        for i in 1..=3 {
            assert!(commutator(&p, &om, &x(3, i)).unwrap().is_zero());
        }
        let theta = hom_theta(3).unwrap();
        assert_eq!(apply_hom(&theta, &om).unwrap(), om);
    }

    #[test]
    fn q_bracket_examples() {
        let p = preset_cyclic(5).unwrap();
        let got = q_commutator(&p, &x(5, 1), &x(5, 2), &q()).unwrap();
        assert_eq!(got, NCPoly::constant(5, &one() - &q()));

        // [x_2, x_1]_q = (q^{-1} - q) x_1 x_2 + 1 - q^{-1}
        let got = q_commutator(&p, &x(5, 2), &x(5, 1), &q()).unwrap();
        let qinv = q().inverse().unwrap();
        let expect = &NCPoly::monomial(vec![1, 1, 0, 0, 0], &qinv - &q())
            + &NCPoly::constant(5, &one() - &qinv);
        assert_eq!(got, expect);

        let f = z_element(&p, 3).unwrap();
        assert!(commutator(&p, &f, &f).unwrap().is_zero());
    }

    #[test]
    fn named_homs_preserve_relations() {
        assert!(check_hom(&hom_theta(5).unwrap()).unwrap());
        assert!(check_hom(&hom_iota(5).unwrap()).unwrap());
        assert!(check_hom(&hom_iota_nu(4, &LaurentScalar::v()).unwrap()).unwrap());
        assert!(check_hom(&hom_reversal(Family::Linear, 4).unwrap()).unwrap());
        assert!(check_hom(&hom_reversal(Family::Cyclic, 3).unwrap()).unwrap());

        // A wrong sign in one image must be caught.
        let p = preset_linear(2).unwrap();
        let bad = HomSpec::new(
            p.clone(),
            p,
            vec![x(2, 1).scale(&LaurentScalar::from_int(-1)), x(2, 2)],
        )
        .unwrap();
        assert!(!check_hom(&bad).unwrap());
    }

    #[test]
    fn shift_respects_bounds() {
        let p = preset_linear(4).unwrap();
        let z2 = z_element(&p, 2).unwrap();
        let shifted = shift_generators(&z2, 2).unwrap();
        let expect = &NCPoly::monomial(vec![0, 0, 1, 1], one()) - &NCPoly::one(4);
        assert_eq!(shifted, expect);
        assert!(shift_generators(&z2, 3).is_err());
    }

    #[test]
    fn presentation_json_round_trip() {
        let p = preset_cyclic(3).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        let back: Presentation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(back.is_pbw());

        // Tampering with one entry breaks the mirror invariant.
        let mut doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        doc["r"][0][1] = serde_json::json!([[0, "5"]]);
        assert!(serde_json::from_value::<Presentation>(doc).is_err());
    }

    #[test]
    fn rendering_round_trips_visually() {
        let p = preset_linear(2).unwrap();
        let f = mul(&p, &x(2, 2), &x(2, 1));
        assert_eq!(f.to_string(), "q^-1*x1*x2 + (1 - q^-1)");
        assert_eq!(NCPoly::zero(2).to_string(), "0");
        let g = &NCPoly::monomial(vec![2, 1], one()) - &NCPoly::one(2);
        assert_eq!(g.to_string(), "x1^2*x2 - 1");
        let h = NCPoly::monomial(vec![0, 1], LaurentScalar::from_rational(rat(-3, 2)));
        assert_eq!(h.to_string(), "-3/2*x2");
    }
}
