//! Quantum seed mutation: exchange matrices, compatible pairs (B, Λ),
//! the normalized exchange relation for new cluster variables, the cyclic
//! and type-A presets, and the structure suite tying the mutated variables
//! to the w/x families generated by the two-term recurrences.
//!
//! Seeds live inside a fixed ambient quantum torus; mutation rewrites the
//! variable at one vertex as X'_k = X^{a⁺} + X^{a⁻} where the exchange
//! monomials are normalized products of the current variables and the
//! division by the outgoing variable is exact (Laurent phenomenon).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qtorus::{
    left_divide, right_divide, torus_mul, z_tower_skew, SkewMatrix, TorusElement,
};
use crate::report::Report;
use crate::scalar::LaurentScalar;

/// Skew-symmetric integer exchange matrix (simply-laced quivers only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeMatrix {
    m: usize,
    entries: Vec<Vec<i64>>,
}

impl ExchangeMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self> {
        let m = entries.len();
        if entries.iter().any(|row| row.len() != m) {
            return Err(Error::Invalid("exchange matrix must be square".into()));
        }
        for i in 0..m {
            for j in 0..m {
                if entries[i][j] != -entries[j][i] {
                    return Err(Error::Invalid(format!(
                        "exchange matrix not skew-symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { m, entries })
    }

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

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.entries
    }
}

impl Serialize for ExchangeMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExchangeMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<Vec<i64>>::deserialize(deserializer)?;
        ExchangeMatrix::new(entries).map_err(serde::de::Error::custom)
    }
}

/// A compatible quantum seed: exchange matrix B, quasi-commutation matrix Λ
/// for the current variables, the variables themselves as elements of a
/// fixed ambient torus, and the compatibility scalar d with Bᵀ·Λ = d·I.
///
/// `ambient` is the skew matrix of the torus the variables live in; it never
/// mutates, while `lambda` tracks the quasi-commutation of the current
/// cluster and is rewritten at each mutation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantumSeed {
    #[serde(rename = "B")]
    pub b: ExchangeMatrix,
    #[serde(rename = "Lambda")]
    pub lambda: SkewMatrix,
    #[serde(skip)]
    pub ambient: SkewMatrix,
    pub vars: Vec<TorusElement>,
    pub d: i64,
}

impl QuantumSeed {
    pub fn new(
        b: ExchangeMatrix,
        lambda: SkewMatrix,
        ambient: SkewMatrix,
        vars: Vec<TorusElement>,
        d: i64,
    ) -> Result<Self> {
        let seed = Self { b, lambda, ambient, vars, d };
        if seed.b.size() != seed.lambda.m() || seed.vars.len() != seed.b.size() {
            return Err(Error::Invalid("seed dimensions disagree".into()));
        }
        if d <= 0 {
            return Err(Error::Invalid("compatibility scalar must be positive".into()));
        }
        if !seed.compatibility_holds() {
            return Err(Error::IncompatibleSeed(format!(
                "B^T Lambda != {d} I",
                d = seed.d
            )));
        }
        Ok(seed)
    }

    pub fn size(&self) -> usize {
        self.b.size()
    }

    /// Bᵀ·Λ = d·I.
    pub fn compatibility_holds(&self) -> bool {
        let m = self.size();
        for k in 0..m {
            for j in 0..m {
                let mut acc = 0;
                for i in 0..m {
                    acc += self.b.get(i, k) * self.lambda.get(i, j);
                }
                let expect = if k == j { self.d } else { 0 };
                if acc != expect {
                    return false;
                }
            }
        }
        true
    }

    /// V_i V_j = q^{λ_ij} V_j V_i for all pairs, products taken in the
    /// ambient torus.
    pub fn quasi_commutation_holds(&self) -> bool {
        let m = self.size();
        for i in 0..m {
            for j in (i + 1)..m {
                let ij = torus_mul(&self.ambient, &self.vars[i], &self.vars[j]);
                let ji = torus_mul(&self.ambient, &self.vars[j], &self.vars[i]);
                if ij != ji.scale(&LaurentScalar::qpow_int(self.lambda.get(i, j))) {
                    return false;
                }
            }
        }
        true
    }
}

/// The two exchange monomial exponent vectors at a vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationStep {
    pub k: usize,
    pub a_plus: Vec<i64>,
    pub a_minus: Vec<i64>,
}

/// Exponent vectors a± = −e_k + Σ_i [±b_ik]_+ e_i of the exchange relation.
pub fn exchange_step(seed: &QuantumSeed, k: usize) -> MutationStep {
    let m = seed.size();
    let mut a_plus = vec![0i64; m];
    let mut a_minus = vec![0i64; m];
    for i in 0..m {
        if i == k {
            continue;
        }
        let b = seed.b.get(i, k);
        a_plus[i] = b.max(0);
        a_minus[i] = (-b).max(0);
    }
    a_plus[k] = -1;
    a_minus[k] = -1;
    MutationStep { k, a_plus, a_minus }
}

/// Matrix mutation at vertex k:
/// b'_ij = −b_ij if k ∈ {i,j}, else b_ij + [b_ik]_+[b_kj]_+ − [−b_ik]_+[−b_kj]_+.
pub fn mutate_matrix(b: &ExchangeMatrix, k: usize) -> ExchangeMatrix {
    let m = b.size();
    assert!(k < m, "vertex {k} out of range");
    let pos = |t: i64| t.max(0);
    let mut entries = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..m {
            entries[i][j] = if i == k || j == k {
                -b.get(i, j)
            } else {
                b.get(i, j) + pos(b.get(i, k)) * pos(b.get(k, j))
                    - pos(-b.get(i, k)) * pos(-b.get(k, j))
            };
        }
    }
    ExchangeMatrix { m, entries }
}

/// One exchange monomial X^a over the current frame: the normalized ordered
/// product of the current variables with exponents a (a_k = −1), returned as
/// the numerator X^a·V_k so callers can divide once.
///
/// X^a = t·q^{−σ}·(Π_{i<k} V_i^{a_i})(Π_{i>k} V_i^{a_i})·V_k^{-1} with
/// t = v^{Σ_{i<j} a_i a_j λ_ji} and σ = Σ_{j>k} λ_kj a_j, both over the
/// seed's current Λ.
fn exchange_numerator(seed: &QuantumSeed, a: &[i64], k: usize) -> TorusElement {
    let m = seed.size();
    let mut t_exp = 0;
    for i in 0..m {
        if a[i] == 0 {
            continue;
        }
        for j in (i + 1)..m {
            t_exp += a[i] * a[j] * seed.lambda.get(j, i);
        }
    }
    let mut sigma = 0;
    for j in (k + 1)..m {
        sigma += seed.lambda.get(k, j) * a[j];
    }
    let mut prod = TorusElement::one(seed.ambient.m());
    for i in 0..m {
        if i == k {
            continue;
        }
        for _ in 0..a[i] {
            prod = torus_mul(&seed.ambient, &prod, &seed.vars[i]);
        }
    }
    let scalar = &LaurentScalar::vpow(t_exp) * &LaurentScalar::qpow_int(-sigma);
    prod.scale(&scalar)
}

/// Seed mutation at vertex k: new variable X'_k = X^{a⁺} + X^{a⁻}, B
/// mutated, Λ rewritten from the exchange monomials. Errors with
/// `IncompatibleSeed` when the two monomials disagree on the new
/// quasi-commutation row, which happens exactly when Bᵀ·Λ has a nonzero
/// off-diagonal entry in row k.
pub fn mutate_seed(seed: &QuantumSeed, k: usize) -> Result<QuantumSeed> {
    let m = seed.size();
    if k >= m {
        return Err(Error::Invalid(format!("vertex {k} out of range 0..{m}")));
    }
    let step = exchange_step(seed, k);
    let (a_plus, a_minus) = (step.a_plus, step.a_minus);

    // Well-definedness of the new row before committing anything.
    let mut new_row = vec![0i64; m];
    for j in 0..m {
        if j == k {
            continue;
        }
        let mut ej = vec![0i64; m];
        ej[j] = 1;
        let plus = seed.lambda.form(&a_plus, &ej);
        let minus = seed.lambda.form(&a_minus, &ej);
        if plus != minus {
            return Err(Error::IncompatibleSeed(format!(
                "exchange monomials disagree on quasi-commutation with vertex {j}: {plus} vs {minus}"
            )));
        }
        new_row[j] = plus;
    }

    let numerator = &exchange_numerator(seed, &a_plus, k) + &exchange_numerator(seed, &a_minus, k);
    let new_var = right_divide(&seed.ambient, &numerator, &seed.vars[k])?;

    let mut lam = seed.lambda.rows().to_vec();
    for j in 0..m {
        if j == k {
            continue;
        }
        lam[k][j] = new_row[j];
        lam[j][k] = -new_row[j];
    }
    lam[k][k] = 0;
    let lambda = SkewMatrix::new(lam)?;
    let mut vars = seed.vars.clone();
    vars[k] = new_var;
    Ok(QuantumSeed {
        b: mutate_matrix(&seed.b, k),
        lambda,
        ambient: seed.ambient.clone(),
        vars,
        d: seed.d,
    })
}

/// Λ for the cyclic quiver torus on m coordinates: λ_ij = 1 when i < j and
/// i + j is odd, 0 when i + j is even.
pub fn parity_skew(m: usize) -> SkewMatrix {
    SkewMatrix::from_upper(m, |i, j| i64::from((i + j) % 2 == 1))
}

/// The (n+1)-vertex cyclic seed on vertices 0..n: path arrows i → i+1 plus
/// the wrap arrow 0 → n, parity Λ, d = 2, variables the torus generators
/// w_0..w_n.
pub fn preset_p(n: usize) -> Result<QuantumSeed> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid(format!("cyclic seed needs odd n >= 3, got {n}")));
    }
    let m = n + 1;
    let b = ExchangeMatrix::from_upper(m, |i, j| {
        if j == i + 1 || (i == 0 && j == n) {
            1
        } else {
            0
        }
    });
    let lambda = parity_skew(m);
    let vars = (0..m).map(|i| TorusElement::generator(m, i)).collect();
    QuantumSeed::new(b, lambda.clone(), lambda, vars, 2)
}

/// The type-A path seed on n−1 vertices with the z-tower quasi-commutation
/// matrix, d = 1, and scaled generators y_i = q^{(1−i)/4} z_i for odd i and
/// y_i = q^{−i/4} z_i for even i (integral v-powers since the parities
/// match).
pub fn preset_dynkin_a(n: usize) -> Result<QuantumSeed> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid(format!("type-A seed needs odd n >= 3, got {n}")));
    }
    let m = n - 1;
    let b = ExchangeMatrix::from_upper(m, |i, j| i64::from(j == i + 1));
    let lambda = z_tower_skew(m);
    let mut vars = Vec::with_capacity(m);
    for i in 1..=m {
        let vexp = if i % 2 == 1 {
            (1 - i as i64) / 2
        } else {
            -(i as i64) / 2
        };
        vars.push(TorusElement::generator(m, i - 1).scale(&LaurentScalar::vpow(vexp)));
    }
    QuantumSeed::new(b, lambda.clone(), lambda, vars, 1)
}

/// The doubly infinite w family on the window [lo, hi]: w_0..w_n are the
/// torus generators, w_i = w_{i−n−1}^{-1}(1 + q w_{i−n} w_{i−1}) going up
/// and w_i = w_{i+n+1}^{-1}(1 + q^{-1} w_{i+1} w_{i+n}) going down, each
/// inverse realized by exact left division. Entry j of the result is
/// w_{lo+j}.
pub fn generate_w(n: usize, lo: i64, hi: i64) -> Result<Vec<TorusElement>> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid(format!("w family needs odd n >= 3, got {n}")));
    }
    if lo > 0 || hi < n as i64 {
        return Err(Error::Invalid("window must contain [0, n]".into()));
    }
    let m = n + 1;
    let lam = parity_skew(m);
    let q = LaurentScalar::q();
    let qinv = LaurentScalar::qpow_int(-1);
    let size = (hi - lo + 1) as usize;
    let mut ws: Vec<Option<TorusElement>> = vec![None; size];
    let idx = |i: i64| (i - lo) as usize;
    for i in 0..=n as i64 {
        ws[idx(i)] = Some(TorusElement::generator(m, i as usize));
    }
    for i in (n as i64 + 1)..=hi {
        let prev = ws[idx(i - 1)].as_ref().expect("filled").clone();
        let back_n = ws[idx(i - n as i64)].as_ref().expect("filled").clone();
        let anchor = ws[idx(i - n as i64 - 1)].as_ref().expect("filled").clone();
        let f = &TorusElement::one(m) + &torus_mul(&lam, &back_n, &prev).scale(&q);
        ws[idx(i)] = Some(left_divide(&lam, &f, &anchor)?);
    }
    for i in (lo..0).rev() {
        let next = ws[idx(i + 1)].as_ref().expect("filled").clone();
        let fwd_n = ws[idx(i + n as i64)].as_ref().expect("filled").clone();
        let anchor = ws[idx(i + n as i64 + 1)].as_ref().expect("filled").clone();
        let f = &TorusElement::one(m) + &torus_mul(&lam, &next, &fwd_n).scale(&qinv);
        ws[idx(i)] = Some(left_divide(&lam, &f, &anchor)?);
    }
    Ok(ws.into_iter().map(|w| w.expect("window filled")).collect())
}

/// True when mutating the cyclic seed's exchange matrix at the source equals
/// the matrix of the quiver relabeled by the rotation sending the source to
/// vertex 1: rotated[i][j] = b[(i+n) mod (n+1)][(j+n) mod (n+1)].
pub fn rotation_check(n: usize) -> Result<bool> {
    let seed = preset_p(n)?;
    let mutated = mutate_matrix(&seed.b, 0);
    let m = n + 1;
    let rot = ExchangeMatrix::from_upper(m, |i, j| seed.b.get((i + n) % m, (j + n) % m));
    Ok(mutated == rot)
}

/// x_i = w_i^{-1}(q^{-1/2} w_{i−1} + q^{1/2} w_{i+1}) by exact left division.
fn x_from_w(lam: &SkewMatrix, wm1: &TorusElement, w: &TorusElement, wp1: &TorusElement) -> Result<TorusElement> {
    let f = &wm1.scale(&LaurentScalar::vpow(-1)) + &wp1.scale(&LaurentScalar::vpow(1));
    left_divide(lam, &f, w)
}

/// The full torus-level verification suite at odd n: the x family relations,
/// the two-sided w/x product identities and their commutator forms, the
/// twist table between the two families (with the wrap pair checked against
/// its corrected affine relation), periodicity, the exchange pair
/// identities, the generated-family quasi-commutation, the three-term
/// recursion sign resolution, and the mutated variables of both presets.
pub fn suite_cluster(n: usize) -> Result<Report> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Invalid(format!("cluster suite needs odd n >= 3, got {n}")));
    }
    let mut report = Report::new(format!("cluster/n={n}"));
    let m = n + 1;
    let lam = parity_skew(m);
    let q = LaurentScalar::q();
    let qinv = LaurentScalar::qpow_int(-1);
    let q2 = LaurentScalar::qpow_int(2);
    let qm2 = LaurentScalar::qpow_int(-2);
    let ni = n as i64;

    let w_lo = -ni;
    let w_hi = 2 * ni + 2;
    let ws = generate_w(n, w_lo, w_hi)?;
    let wat = |i: i64| -> &TorusElement { &ws[(i - w_lo) as usize] };

    let x_lo = -1i64;
    let x_hi = 2 * ni + 1;
    let mut xs = Vec::new();
    for i in x_lo..=x_hi {
        xs.push(x_from_w(&lam, wat(i - 1), wat(i), wat(i + 1))?);
    }
    let xat = |i: i64| -> &TorusElement { &xs[(i - x_lo) as usize] };

    let mul = |a: &TorusElement, b: &TorusElement| torus_mul(&lam, a, b);
    let constant = |c: &LaurentScalar| TorusElement::constant(m, c.clone());
    let one_minus_q2 = &LaurentScalar::one() - &q2;

    // x_i x_{i+1} − q² x_{i+1} x_i = 1 − q² across the window; i = n is the
    // wrap instance once periodicity identifies x_{n+1} with x_1.
    for i in x_lo..(x_hi - 1) {
        let lhs = &mul(xat(i), xat(i + 1)) - &mul(xat(i + 1), xat(i)).scale(&q2);
        report.check(
            format!("x-adjacent/i={i}"),
            "adjacent x relation",
            lhs == constant(&one_minus_q2),
            || format!("x{i}x{} - q^2 x{}x{i} = {}", i + 1, i + 1, lhs.render_with("w", 0)),
        );
    }
    let wrap = &mul(xat(ni), xat(1)) - &mul(xat(1), xat(ni)).scale(&q2);
    report.check(
        "x-wrap",
        "wrap x relation",
        wrap == constant(&one_minus_q2),
        || format!("x{n}x1 - q^2 x1x{n} = {}", wrap.render_with("w", 0)),
    );

    // Distant pairs: q^{-2} twist for even folded gaps, q^{2} for odd.
    // The gap parity is taken after reduction mod n: raw-gap parity is not
    // well defined on the periodic family (a period shift flips it while
    // fixing the elements), and reduction keeps the rule consistent with
    // reading the pair in the other cyclic direction since n is odd. Pairs
    // folding onto the same generator, an adjacent pair, or the wrap pair
    // carry the affine relations checked above and are excluded.
    for i in x_lo..=x_hi {
        for j in (i + 2)..=x_hi {
            let folded = (j - i).rem_euclid(ni);
            if folded <= 1 || folded == ni - 1 {
                continue;
            }
            let ij = mul(xat(i), xat(j));
            let ji = mul(xat(j), xat(i));
            let (twist, tag) = if folded % 2 == 0 {
                (&qm2, "even-gap x twist")
            } else {
                (&q2, "odd-gap x twist")
            };
            report.check(
                format!("x-gap/i={i}/j={j}"),
                tag,
                ij == ji.scale(twist),
                || format!("x{i}x{j} twist mismatch: {}", ij.render_with("w", 0)),
            );
        }
    }

    // Periodicity x_{n+i} = x_i.
    for i in -1..=(ni + 1) {
        report.check(
            format!("x-periodic/i={i}"),
            "period-n identification",
            xat(ni + i) == xat(i),
            || format!("x{} = {}", ni + i, xat(ni + i).render_with("w", 0)),
        );
    }

    // Two-sided products of w_i and x_i and the derived commutator forms.
    for i in x_lo..=x_hi {
        let left = mul(wat(i), xat(i));
        let left_expect = &wat(i - 1).scale(&LaurentScalar::vpow(-1)) + &wat(i + 1).scale(&LaurentScalar::vpow(1));
        report.check(
            format!("wx-left/i={i}"),
            "left product two-term form",
            left == left_expect,
            || format!("w{i}x{i} = {}", left.render_with("w", 0)),
        );
        let right = mul(xat(i), wat(i));
        let right_expect = &wat(i - 1).scale(&LaurentScalar::vpow(1)) + &wat(i + 1).scale(&LaurentScalar::vpow(-1));
        report.check(
            format!("wx-right/i={i}"),
            "right product two-term form",
            right == right_expect,
            || format!("x{i}w{i} = {}", right.render_with("w", 0)),
        );
        // x_i w_i − q w_i x_i = q^{1/2}(q^{-1} − q) w_{i+1}
        let upper = &right - &left.scale(&q);
        let upper_expect = wat(i + 1).scale(&(&LaurentScalar::vpow(1) * &(&qinv - &q)));
        report.check(
            format!("wx-upper/i={i}"),
            "q-commutator collapses to the upper neighbour",
            upper == upper_expect,
            || format!("x{i}w{i} - q w{i}x{i} = {}", upper.render_with("w", 0)),
        );
        // x_i w_i − q^{-1} w_i x_i = q^{1/2}(1 − q^{-2}) w_{i−1}
        let lower = &right - &left.scale(&qinv);
        let lower_expect = wat(i - 1).scale(&(&LaurentScalar::vpow(1) * &(&LaurentScalar::one() - &qm2)));
        report.check(
            format!("wx-lower/i={i}"),
            "inverse q-commutator collapses to the lower neighbour",
            lower == lower_expect,
            || format!("x{i}w{i} - q^-1 w{i}x{i} = {}", lower.render_with("w", 0)),
        );
    }

    // Twist table between the generator range of both families, wrap pair
    // excluded: x_i w_j = q w_j x_i when (i<j, i+j even) or (i>j, i+j odd),
    // q^{-1} w_j x_i otherwise.
    for i in 1..=ni {
        for j in 0..=ni {
            if i == j || (i == ni && j == 0) {
                continue;
            }
            let xw = mul(xat(i), wat(j));
            let wx = mul(wat(j), xat(i));
            let plus = (i < j && (i + j) % 2 == 0) || (i > j && (i + j) % 2 == 1);
            let twist = if plus { &q } else { &qinv };
            report.check(
                format!("xw-twist/i={i}/j={j}"),
                "cross-family twist table",
                xw == wx.scale(twist),
                || format!("x{i}w{j} twist mismatch: {}", xw.render_with("w", 0)),
            );
        }
    }
    // The excluded wrap pair picks up an affine correction:
    // x_n w_0 = q w_0 x_n + q^{-1/2}(1 − q²) w_1.
    let xnw0 = mul(xat(ni), wat(0));
    let xnw0_expect = &mul(wat(0), xat(ni)).scale(&q)
        + &wat(1).scale(&(&LaurentScalar::vpow(-1) * &one_minus_q2));
    report.check(
        "xw-wrap",
        "wrap pair affine relation",
        xnw0 == xnw0_expect,
        || format!("x{n}w0 = {}", xnw0.render_with("w", 0)),
    );
    // x_1 w_1 = q^{-1} w_1 x_1 + q^{1/2}(1 − q^{-2}) w_0 (the corrected
    // scalar; subsumes the displayed generator relation).
    let x1w1 = &mul(xat(1), wat(1)) - &mul(wat(1), xat(1)).scale(&qinv);
    let x1w1_expect = wat(0).scale(&(&LaurentScalar::vpow(1) * &(&LaurentScalar::one() - &qm2)));
    report.check(
        "xw-first",
        "first-generator affine relation",
        x1w1 == x1w1_expect,
        || format!("x1w1 - q^-1 w1x1 = {}", x1w1.render_with("w", 0)),
    );

    // Pairwise quasi-commutation of the generated family: for i < j <= i+n,
    // w_i w_j = q w_j w_i when i+j is odd, and the pair commutes when even.
    for i in w_lo..=w_hi {
        for j in (i + 1)..=(i + ni).min(w_hi) {
            let ij = mul(wat(i), wat(j));
            let ji = mul(wat(j), wat(i));
            let odd = (i + j).rem_euclid(2) == 1;
            let ok = if odd { ij == ji.scale(&q) } else { ij == ji };
            report.check(
                format!("w-pairwise/i={i}/j={j}"),
                "generated family quasi-commutation",
                ok,
                || format!("w{i}w{j} = {}", ij.render_with("w", 0)),
            );
        }
    }

    // Exchange pair: w_0 w_{n+1} = 1 + q w_1 w_n, w_{n+1} w_0 = 1 + q^{-1}
    // w_1 w_n, and the commutator (q − q^{-1}) w_1 w_n.
    let w1wn = mul(wat(1), wat(ni));
    let fwd = mul(wat(0), wat(ni + 1));
    let fwd_expect = &TorusElement::one(m) + &w1wn.scale(&q);
    report.check(
        "exchange/forward",
        "exchange product forward",
        fwd == fwd_expect,
        || format!("w0w{} = {}", n + 1, fwd.render_with("w", 0)),
    );
    let bwd = mul(wat(ni + 1), wat(0));
    let bwd_expect = &TorusElement::one(m) + &w1wn.scale(&qinv);
    report.check(
        "exchange/backward",
        "exchange product backward",
        bwd == bwd_expect,
        || format!("w{}w0 = {}", n + 1, bwd.render_with("w", 0)),
    );
    let comm = &fwd - &bwd;
    let comm_expect = w1wn.scale(&(&q - &qinv));
    report.check(
        "exchange/commutator",
        "exchange pair commutator",
        comm == comm_expect,
        || format!("[w0, w{}] = {}", n + 1, comm.render_with("w", 0)),
    );

    // w_{−1} = q^{1/2}(w_0 x_n − q^{1/2} w_1).
    let wm1_expect = (&mul(wat(0), xat(ni)) - &wat(1).scale(&LaurentScalar::vpow(1)))
        .scale(&LaurentScalar::vpow(1));
    report.check(
        "w-backstep",
        "backward step through the x family",
        *wat(-1) == wm1_expect,
        || format!("w-1 = {}", wat(-1).render_with("w", 0)),
    );

    // Three-term recursion sign: w_j = q^{-1/2} w_{j−1} x_{j−1} ± q^{-1}
    // w_{j−2}. Both candidates are computed; exactly one (the minus branch)
    // reproduces the generated family.
    for j in 2..=(ni + 1) {
        let base = mul(wat(j - 1), xat(j - 1)).scale(&LaurentScalar::vpow(-1));
        let tail = wat(j - 2).scale(&qinv);
        let minus_holds = (&base - &tail) == *wat(j);
        let plus_holds = (&base + &tail) == *wat(j);
        report.check(
            format!("w-recursion/j={j}"),
            "three-term recursion resolves to the minus branch",
            minus_holds && !plus_holds,
            || {
                format!(
                    "minus branch {}, plus branch {}",
                    if minus_holds { "holds" } else { "fails" },
                    if plus_holds { "holds" } else { "fails" }
                )
            },
        );
    }

    // Seed-level checks for the cyclic preset: compatibility, variable
    // quasi-commutation, and every one-step mutation against the generated
    // families (vertex 0 gives w_{n+1}, interior vertices give x_k, the
    // sink gives w_{−1}).
    let pseed = preset_p(n)?;
    report.check(
        "seed/compat-cyclic",
        "compatibility of the cyclic preset",
        pseed.compatibility_holds() && pseed.quasi_commutation_holds(),
        || "B^T Lambda != 2I or variables do not quasi-commute".to_string(),
    );
    for k in 0..=n {
        let mutated = mutate_seed(&pseed, k)?;
        let expect = if k == 0 {
            wat(ni + 1).clone()
        } else if k == n {
            wat(-1).clone()
        } else {
            xat(k as i64).clone()
        };
        report.check(
            format!("cyclic-mutation/k={k}"),
            "one-step mutation matches the generated family",
            mutated.vars[k] == expect,
            || format!("vertex {k} new variable = {}", mutated.vars[k].render_with("w", 0)),
        );
        report.check(
            format!("cyclic-mutation-compat/k={k}"),
            "mutated seed stays compatible",
            mutated.compatibility_holds(),
            || format!("B^T Lambda != 2I after mutating at {k}"),
        );
    }

    // Type-A preset: compatibility and the one-step mutations
    // z_k^{-1}(z_{k−1} + z_{k+1}) with z_0 = 1 and the rank-n slot replaced
    // by the constant v^{(n−1)}... the last vertex yields
    // z_{n−1}^{-1}(z_{n−2} + q^{(n−1)/4}).
    let aseed = preset_dynkin_a(n)?;
    let ma = n - 1;
    let alam = z_tower_skew(ma);
    report.check(
        "seed/compat-path",
        "compatibility of the path preset",
        aseed.compatibility_holds() && aseed.quasi_commutation_holds(),
        || "B^T Lambda != I or variables do not quasi-commute".to_string(),
    );
    for k in 1..=ma {
        let mutated = mutate_seed(&aseed, k - 1)?;
        let zk_inv = TorusElement::monomial(
            {
                let mut e = vec![0i64; ma];
                e[k - 1] = -1;
                e
            },
            LaurentScalar::one(),
        );
        let low = if k == 1 {
            TorusElement::one(ma)
        } else {
            TorusElement::generator(ma, k - 2)
        };
        let high = if k == ma {
            TorusElement::constant(ma, LaurentScalar::vpow((ni - 1) / 2))
        } else {
            TorusElement::generator(ma, k)
        };
        let expect = torus_mul(&alam, &zk_inv, &(&low + &high));
        report.check(
            format!("path-mutation/k={k}"),
            "one-step mutation matches the ratio form",
            mutated.vars[k - 1] == expect,
            || format!("vertex {k} new variable = {}", mutated.vars[k - 1].render_with("z", 1)),
        );
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cyclic_preset_tables() {
        let seed = preset_p(5).unwrap();
        assert_eq!(seed.b.rows()[0], vec![0, 1, 0, 0, 0, 1]);
        assert_eq!(seed.lambda.get(0, 3), 1);
        assert_eq!(seed.lambda.get(0, 2), 0);
        assert_eq!(seed.d, 2);
        assert!(seed.compatibility_holds());
        assert!(seed.quasi_commutation_holds());
        assert!(preset_p(4).is_err());
    }

    #[test]
    fn path_preset_tables() {
        let seed = preset_dynkin_a(3).unwrap();
        assert_eq!(seed.lambda.rows(), &[vec![0, 1], vec![-1, 0]]);
        assert_eq!(seed.d, 1);
        assert!(seed.compatibility_holds());
        // y_1 = z_1, y_2 = q^{-1/2} z_2.
        assert_eq!(seed.vars[0], TorusElement::generator(2, 0));
        assert_eq!(
            seed.vars[1],
            TorusElement::generator(2, 1).scale(&LaurentScalar::vpow(-1))
        );
        let big = preset_dynkin_a(7).unwrap();
        assert!(big.compatibility_holds());
        assert!(big.quasi_commutation_holds());
    }

    #[test]
    fn matrix_mutation_reverses_an_arrow() {
        let b = ExchangeMatrix::new(vec![vec![0, 1], vec![-1, 0]]).unwrap();
        let at1 = mutate_matrix(&b, 1);
        assert_eq!(at1.rows(), &[vec![0, -1], vec![1, 0]]);
    }

    #[test]
    fn matrix_mutation_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let b = ExchangeMatrix::from_upper(4, |_, _| rng.gen_range(-2..=2));
            for k in 0..4 {
                assert_eq!(mutate_matrix(&mutate_matrix(&b, k), k), b);
            }
        }
    }

    #[test]
    fn source_mutation_rotates_the_cycle() {
        for n in [3, 5, 7] {
            assert!(rotation_check(n).unwrap(), "rotation fails at n={n}");
        }
    }

    #[test]
    fn exchange_monomials_have_the_right_support() {
        let seed = preset_p(5).unwrap();
        let step = exchange_step(&seed, 0);
        assert_eq!(step.a_plus, vec![-1, 0, 0, 0, 0, 0]);
        assert_eq!(step.a_minus, vec![-1, 1, 0, 0, 0, 1]);
    }

    #[test]
    fn source_mutation_gives_the_exchange_variable() {
        let n = 5;
        let seed = preset_p(n).unwrap();
        let lam = parity_skew(n + 1);
        let mutated = mutate_seed(&seed, 0).unwrap();
        let w0_inv = TorusElement::monomial(vec![-1, 0, 0, 0, 0, 0], LaurentScalar::one());
        let w1w5 = torus_mul(&lam, &TorusElement::generator(6, 1), &TorusElement::generator(6, 5));
        let expect = torus_mul(
            &lam,
            &w0_inv,
            &(&TorusElement::one(6) + &w1w5.scale(&LaurentScalar::q())),
        );
        assert_eq!(mutated.vars[0], expect);
        assert!(mutated.compatibility_holds());
        assert!(mutated.quasi_commutation_holds());
    }

    #[test]
    fn interior_mutation_gives_the_two_term_ratio() {
        let n = 5;
        let seed = preset_p(n).unwrap();
        let lam = parity_skew(n + 1);
        let k = 2;
        let mutated = mutate_seed(&seed, k).unwrap();
        let wk_inv = TorusElement::monomial(
            {
                let mut e = vec![0i64; 6];
                e[k] = -1;
                e
            },
            LaurentScalar::one(),
        );
        let blend = &TorusElement::generator(6, k - 1).scale(&LaurentScalar::vpow(-1))
            + &TorusElement::generator(6, k + 1).scale(&LaurentScalar::vpow(1));
        let expect = torus_mul(&lam, &wk_inv, &blend);
        assert_eq!(mutated.vars[k], expect);
    }

    #[test]
    fn seed_mutation_is_an_involution() {
        for seed in [preset_p(5).unwrap(), preset_dynkin_a(5).unwrap()] {
            for k in 0..seed.size() {
                let twice = mutate_seed(&mutate_seed(&seed, k).unwrap(), k).unwrap();
                assert_eq!(twice, seed, "mutating twice at {k} does not restore the seed");
            }
        }
    }

    #[test]
    fn incompatible_seed_is_rejected() {
        // Path quiver with a quasi-commutation matrix whose B^T Lambda has
        // off-diagonal garbage in row 1: mutation there must refuse.
        let b = ExchangeMatrix::from_upper(3, |i, j| i64::from(j == i + 1));
        // All-ones upper triangle: the extra λ_{02} = 1 breaks row 1 of
        // B^T Lambda off the diagonal.
        let lambda = SkewMatrix::from_upper(3, |_, _| 1);
        let vars = (0..3).map(|i| TorusElement::generator(3, i)).collect();
        let seed = QuantumSeed {
            b,
            lambda: lambda.clone(),
            ambient: lambda,
            vars,
            d: 1,
        };
        assert!(matches!(mutate_seed(&seed, 1), Err(Error::IncompatibleSeed(_))));
    }

    #[test]
    fn generated_family_satisfies_the_recurrences() {
        let n = 5;
        let lam = parity_skew(n + 1);
        let lo = -2i64;
        let hi = 2 * n as i64 + 2;
        let ws = generate_w(n, lo, hi).unwrap();
        let wat = |i: i64| -> &TorusElement { &ws[(i - lo) as usize] };
        let q = LaurentScalar::q();
        let w6_expect = torus_mul(
            &lam,
            &TorusElement::monomial(vec![-1, 0, 0, 0, 0, 0], LaurentScalar::one()),
            &(&TorusElement::one(6) + &torus_mul(&lam, wat(1), wat(5)).scale(&q)),
        );
        assert_eq!(*wat(6), w6_expect);
        let wm1_expect = torus_mul(
            &lam,
            &TorusElement::monomial(vec![0, 0, 0, 0, 0, -1], LaurentScalar::one()),
            &(&TorusElement::one(6)
                + &torus_mul(&lam, wat(0), wat(4)).scale(&LaurentScalar::qpow_int(-1))),
        );
        assert_eq!(*wat(-1), wm1_expect);
        // Sample quasi-commutation: w_2 w_5 = q w_5 w_2 (odd sum), w_1 w_5
        // commutes (even sum).
        assert_eq!(
            torus_mul(&lam, wat(2), wat(5)),
            torus_mul(&lam, wat(5), wat(2)).scale(&q)
        );
        assert_eq!(torus_mul(&lam, wat(1), wat(5)), torus_mul(&lam, wat(5), wat(1)));
    }

    #[test]
    fn suite_passes_at_small_ranks() {
        for n in [3, 5] {
            let report = suite_cluster(n).unwrap();
            assert!(
                report.passed(),
                "failures at n={n}: {:?}",
                report.failures().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn periodicity_spot_check() {
        let n = 5;
        let lam = parity_skew(n + 1);
        let lo = -(n as i64);
        let ws = generate_w(n, lo, 2 * n as i64 + 2).unwrap();
        let wat = |i: i64| -> &TorusElement { &ws[(i - lo) as usize] };
        let x3 = x_from_w(&lam, wat(2), wat(3), wat(4)).unwrap();
        let x8 = x_from_w(&lam, wat(7), wat(8), wat(9)).unwrap();
        assert_eq!(x8, x3);
    }

    #[test]
    fn seed_serialization_shape() {
        let seed = preset_dynkin_a(3).unwrap();
        let json = serde_json::to_value(&seed).unwrap();
        let obj = json.as_object().unwrap();
        assert!(obj.contains_key("B"));
        assert!(obj.contains_key("Lambda"));
        assert!(obj.contains_key("d"));
        assert!(obj.contains_key("vars"));
        assert!(!obj.contains_key("ambient"));
    }

    #[test]
    fn compatibility_preserved_on_short_walks() {
        let seed = preset_p(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let mut current = seed.clone();
            for _ in 0..3 {
                let k = rng.gen_range(0..current.size());
                current = mutate_seed(&current, k).unwrap();
                assert!(current.compatibility_holds());
            }
        }
    }
}
