//! Classification of connected single-parameter presentations up to
//! relabeling and rescaling of generators.
//!
//! A connected PBW presentation whose parameters all lie in {q, q^{-1}} with
//! q ≠ ±1 has a generator graph that is a path or an odd cycle. Walking that
//! graph in the orientation whose adjacent parameter is the canonical q gives
//! a relabeling, and a chain of rescalings μ_k normalizes every adjacent
//! r-value to 1 − q. For cycles the wrap-around edge then carries a residual
//! unit λ; when λ^{-1} has a square root ρ in ℚ[v^±1] the alternating fold
//! μ_k ↦ μ_k ρ^{(-1)^{k-1}} absorbs it, otherwise λ is reported as the
//! obstruction (the ambient coefficient ring is deliberately not extended).

use std::ops::Neg;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{cyclic_with_parameter, linear_with_parameter, single_parameter, Presentation};
use crate::error::{Error, Result};
use crate::scalar::{exact_divide, LaurentScalar, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Shape {
    Linear,
    Cyclic,
}

/// A change of generators y_k = μ_k x_{σ(k)} carrying a presentation onto the
/// linear or cyclic preset with the reported parameter.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationResult {
    pub shape: Shape,
    /// σ as a list: position k holds the 1-based original generator index.
    pub order: Vec<usize>,
    /// The units μ_k, aligned with `order`.
    pub rescale: Vec<LaurentScalar>,
    /// Canonical parameter q of the matched preset.
    pub parameter: LaurentScalar,
    /// Set when the wrap-around edge needs a square root that does not exist
    /// in ℚ[v^±1]; the transformed wrap r-value is then λ·(1 − q).
    #[serde(rename = "cyclicObstruction", skip_serializing_if = "Option::is_none")]
    pub cyclic_obstruction: Option<LaurentScalar>,
}

/// Orient a unit toward positive v-degree; constants prefer the
/// numerator-heavy representative. Deterministic tie-break for t vs t^{-1}.
pub(crate) fn canonical_parameter(t: &LaurentScalar) -> LaurentScalar {
    let deg = t.min_deg().expect("unit is nonzero");
    if deg > 0 {
        return t.clone();
    }
    if deg < 0 {
        return t.inverse().expect("unit");
    }
    let c = t.coeff(0);
    if c.numer().abs() >= c.denom().abs() {
        t.clone()
    } else {
        t.inverse().expect("unit")
    }
}

/// Square root of a unit c·v^k in ℚ[v^±1]: needs k even and c a square of a
/// rational. Returns the positive root.
fn sqrt_unit(u: &LaurentScalar) -> Option<LaurentScalar> {
    let k = u.min_deg()?;
    if k % 2 != 0 {
        return None;
    }
    let c = u.coeff(k);
    if c.is_negative() || c.is_zero() {
        return None;
    }
    let ns = c.numer().sqrt();
    let ds = c.denom().sqrt();
    if &(&ns * &ns) != c.numer() || &(&ds * &ds) != c.denom() {
        return None;
    }
    Some(LaurentScalar::vpow_scaled(k / 2, Rational::new(ns, ds)))
}

/// Apply a change of generators y_k = μ_k x_{σ(k)} to a presentation:
/// q'_kl = q_{σ(k)σ(l)} and r'_kl = μ_k μ_l r_{σ(k)σ(l)}. `order` lists
/// 1-based original indices; `rescale` must consist of units.
pub fn apply_change(p: &Presentation, order: &[usize], rescale: &[LaurentScalar]) -> Result<Presentation> {
    let n = p.n();
    if order.len() != n || rescale.len() != n {
        return Err(Error::Invalid("order and rescale must have one entry per generator".into()));
    }
    let mut seen = vec![false; n];
    for &o in order {
        if !(1..=n).contains(&o) || seen[o - 1] {
            return Err(Error::Invalid("order must be a permutation of 1..=n".into()));
        }
        seen[o - 1] = true;
    }
    if rescale.iter().any(|m| !m.is_unit()) {
        return Err(Error::Invalid("rescale entries must be units".into()));
    }
    Presentation::from_upper(n, |k, l| {
        let (i, j) = (order[k - 1], order[l - 1]);
        let q = p.q(i, j).clone();
        let r = &(&rescale[k - 1] * &rescale[l - 1]) * p.r(i, j);
        (q, r)
    })
}

/// Walk a path graph from one endpoint to the other (0-based vertices).
fn walk_path(p: &Presentation, start: usize) -> Vec<usize> {
    let g = p.graph();
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = g.neighbors0(cur).iter().copied().find(|&w| w != prev);
        match next {
            Some(w) => {
                order.push(w);
                prev = cur;
                cur = w;
            }
            None => return order,
        }
    }
}

/// Walk a cycle starting at `start`, stepping first to `second`.
fn walk_cycle(p: &Presentation, start: usize, second: usize) -> Vec<usize> {
    let g = p.graph();
    let mut order = vec![start, second];
    let (mut prev, mut cur) = (start, second);
    while order.len() < p.n() {
        let next = *g
            .neighbors0(cur)
            .iter()
            .find(|&&w| w != prev)
            .expect("cycle vertex has two neighbors");
        order.push(next);
        prev = cur;
        cur = next;
    }
    order
}

pub fn classify(p: &Presentation) -> Result<ClassificationResult> {
    let qhat = single_parameter(p)?;
    if qhat == LaurentScalar::one() || qhat == LaurentScalar::from_int(-1) {
        return Err(Error::Invalid("classification requires a parameter distinct from ±1".into()));
    }
    let n = p.n();
    let g = p.graph();
    if g.max_degree() > 2 {
        return Err(Error::DegreeExceeded);
    }
    // Connected with max degree 2: a path (n-1 edges) or a single cycle.
    let shape = if g.edge_count() == n { Shape::Cyclic } else { Shape::Linear };

    let order0 = match shape {
        Shape::Linear => {
            let endpoints: Vec<usize> = (0..n).filter(|&v| g.neighbors0(v).len() <= 1).collect();
            let forward = walk_path(p, endpoints[0]);
            if n == 1 || p.q0(forward[0], forward[1]) == &qhat {
                forward
            } else {
                walk_path(p, *endpoints.last().expect("path has two endpoints"))
            }
        }
        Shape::Cyclic => {
            if n % 2 == 0 {
                return Err(Error::Invalid(
                    "an even cycle cannot be carried onto the cyclic preset".into(),
                ));
            }
            let nbrs: Vec<usize> = g.neighbors0(0).iter().copied().collect();
            let second = if p.q0(0, nbrs[0]) == &qhat { nbrs[0] } else { nbrs[1] };
            walk_cycle(p, 0, second)
        }
    };

    // Chain of rescalings: force every adjacent r to 1 - q.
    let target_r = &LaurentScalar::one() - &qhat;
    let mut mu = vec![LaurentScalar::one()];
    for k in 0..n.saturating_sub(1) {
        let r_edge = p.r0(order0[k], order0[k + 1]);
        let denom = &mu[k] * r_edge;
        let next = exact_divide(&target_r, &denom).map_err(|_| {
            Error::RelationMismatch(format!(
                "adjacent relation r_{{{}{}}} = {} cannot be rescaled to {}",
                order0[k] + 1,
                order0[k + 1] + 1,
                r_edge.render_v(),
                target_r.render_v()
            ))
        })?;
        if !next.is_unit() {
            return Err(Error::RelationMismatch(format!(
                "rescaling for position {} is not a unit",
                k + 2
            )));
        }
        mu.push(next);
    }

    let mut obstruction = None;
    if shape == Shape::Cyclic {
        let wrap = &(&mu[n - 1] * &mu[0]) * p.r0(order0[n - 1], order0[0]);
        let lambda = exact_divide(&wrap, &target_r).map_err(|_| {
            Error::RelationMismatch("wrap-around relation is not a unit multiple of 1 - q".into())
        })?;
        if !lambda.is_unit() {
            return Err(Error::RelationMismatch("wrap-around residue is not a unit".into()));
        }
        if lambda != LaurentScalar::one() {
            match lambda.inverse().and_then(|li| sqrt_unit(&li)) {
                Some(rho) => {
                    let rho_inv = rho.inverse().expect("unit");
                    for (k, m) in mu.iter_mut().enumerate() {
                        *m = &*m * if k % 2 == 0 { &rho } else { &rho_inv };
                    }
                }
                None => obstruction = Some(lambda),
            }
        }
    }

    let order: Vec<usize> = order0.iter().map(|&v| v + 1).collect();
    let transformed = apply_change(p, &order, &mu)?;
    let expected = match shape {
        Shape::Linear => linear_with_parameter(n, &qhat)?,
        Shape::Cyclic => cyclic_with_parameter(n, &qhat)?,
    };
    verify_tables(&transformed, &expected, obstruction.as_ref(), &target_r)?;

    Ok(ClassificationResult {
        shape,
        order,
        rescale: mu,
        parameter: qhat,
        cyclic_obstruction: obstruction,
    })
}

/// Transformed tables must reproduce the preset exactly; with a pending
/// square root the wrap r-entry carries the factor λ instead.
fn verify_tables(
    got: &Presentation,
    expected: &Presentation,
    obstruction: Option<&LaurentScalar>,
    target_r: &LaurentScalar,
) -> Result<()> {
    let n = got.n();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            if got.q(i, j) != expected.q(i, j) {
                return Err(Error::RelationMismatch(format!(
                    "q_{{{i}{j}}}: got {}, preset has {}",
                    got.q(i, j).render_v(),
                    expected.q(i, j).render_v()
                )));
            }
            let is_wrap = (i, j) == (1, n) || (i, j) == (n, 1);
            if let (true, Some(lambda)) = (is_wrap, obstruction) {
                let scaled = if i < j {
                    // r_1n entry mirrors r_n1 = λ(1-q) through -q_n1^{-1}.
                    (&(&got.q(j, i).inverse().expect("unit") * lambda) * target_r).neg()
                } else {
                    lambda * target_r
                };
                if got.r(i, j) != &scaled {
                    return Err(Error::RelationMismatch(
                        "wrap-around entry does not match the reported obstruction".into(),
                    ));
                }
            } else if got.r(i, j) != expected.r(i, j) {
                return Err(Error::RelationMismatch(format!(
                    "r_{{{i}{j}}}: got {}, preset has {}",
                    got.r(i, j).render_v(),
                    expected.r(i, j).render_v()
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{preset_cyclic, preset_linear};
    use super::*;
    use crate::scalar::rat;

    fn q() -> LaurentScalar {
        LaurentScalar::q()
    }

    fn unit(k: i64, num: i64, den: i64) -> LaurentScalar {
        LaurentScalar::vpow_scaled(k, rat(num, den))
    }

    #[test]
    fn canonical_parameter_rules() {
        assert_eq!(canonical_parameter(&q()), q());
        assert_eq!(canonical_parameter(&q().inverse().unwrap()), q());
        assert_eq!(canonical_parameter(&unit(0, 1, 3)), unit(0, 3, 1));
        assert_eq!(canonical_parameter(&unit(0, -5, 2)), unit(0, -5, 2));
    }

    #[test]
    fn sqrt_unit_cases() {
        assert_eq!(sqrt_unit(&unit(4, 9, 4)), Some(unit(2, 3, 2)));
        assert_eq!(sqrt_unit(&unit(3, 1, 1)), None);
        assert_eq!(sqrt_unit(&unit(2, 2, 1)), None);
        assert_eq!(sqrt_unit(&unit(0, -4, 1)), None);
    }

    #[test]
    fn reordered_linear_presentation_classifies() {
        let p = preset_linear(3).unwrap();
        // Present the generators in the order (x_2, x_1, x_3).
        let scrambled = apply_change(&p, &[2, 1, 3], &vec![LaurentScalar::one(); 3]).unwrap();
        let res = classify(&scrambled).unwrap();
        assert_eq!(res.shape, Shape::Linear);
        assert_eq!(res.parameter, q());
        let recovered = apply_change(&scrambled, &res.order, &res.rescale).unwrap();
        assert_eq!(recovered, p);
    }

    #[test]
    fn cyclic_preset_is_already_canonical() {
        let p = preset_cyclic(3).unwrap();
        let res = classify(&p).unwrap();
        assert_eq!(res.shape, Shape::Cyclic);
        assert_eq!(res.order, vec![1, 2, 3]);
        assert!(res.rescale.iter().all(|m| m == &LaurentScalar::one()));
        assert!(res.cyclic_obstruction.is_none());
    }

    #[test]
    fn rescaled_generator_is_recovered() {
        let p = preset_linear(3).unwrap();
        // x_1 replaced by 2 x_1 scales r_12 by 2.
        let scaled = apply_change(
            &p,
            &[1, 2, 3],
            &[LaurentScalar::from_int(2), LaurentScalar::one(), LaurentScalar::one()],
        )
        .unwrap();
        let res = classify(&scaled).unwrap();
        assert_eq!(res.shape, Shape::Linear);
        assert_eq!(res.rescale[1], unit(0, 1, 2));
        let recovered = apply_change(&scaled, &res.order, &res.rescale).unwrap();
        assert_eq!(recovered, p);
    }

    #[test]
    fn inverse_parameter_input_is_reversed_onto_the_preset() {
        let p = linear_with_parameter(4, &q().inverse().unwrap()).unwrap();
        let res = classify(&p).unwrap();
        assert_eq!(res.parameter, q());
        let recovered = apply_change(&p, &res.order, &res.rescale).unwrap();
        assert_eq!(recovered, preset_linear(4).unwrap());
    }

    #[test]
    fn cyclic_rescale_folds_the_square_root() {
        let p = preset_cyclic(5).unwrap();
        let units = vec![unit(1, 3, 1), unit(-2, 1, 2), unit(0, 7, 1), unit(2, 1, 1), unit(3, 2, 5)];
        let scrambled = apply_change(&p, &[4, 5, 1, 2, 3], &units).unwrap();
        let res = classify(&scrambled).unwrap();
        assert_eq!(res.shape, Shape::Cyclic);
        assert!(res.cyclic_obstruction.is_none(), "unit rescales always leave a square residue");
        let recovered = apply_change(&scrambled, &res.order, &res.rescale).unwrap();
        assert_eq!(recovered, p);
    }

    #[test]
    fn odd_wrap_scaling_reports_an_obstruction() {
        let p = preset_cyclic(3).unwrap();
        let one = LaurentScalar::one();
        let v = LaurentScalar::v();
        // Scale the wrap relation alone by v: no unit square can absorb it.
        let tweaked = p
            .with_entry(3, 1, q(), &v * &(&one - &q()))
            .unwrap();
        let res = classify(&tweaked).unwrap();
        assert_eq!(res.cyclic_obstruction, Some(v));

        // Scaling by v^2 is absorbable: ρ = v^{-1}.
        let tweaked = p
            .with_entry(3, 1, q(), &q() * &(&one - &q()))
            .unwrap();
        let res = classify(&tweaked).unwrap();
        assert!(res.cyclic_obstruction.is_none());
        let recovered = apply_change(&tweaked, &res.order, &res.rescale).unwrap();
        assert_eq!(recovered, p);
    }

    #[test]
    fn error_paths() {
        // Disconnected.
        let two_block = Presentation::from_upper(4, |i, j| match (i, j) {
            (1, 2) | (3, 4) => (q(), &LaurentScalar::one() - &q()),
            _ => (LaurentScalar::one(), LaurentScalar::zero()),
        })
        .unwrap();
        assert!(matches!(classify(&two_block), Err(Error::NotConnected)));

        // Parameter 1 is excluded.
        let commutative = Presentation::from_upper(2, |_, _| (LaurentScalar::one(), LaurentScalar::one()))
            .unwrap();
        assert!(matches!(classify(&commutative), Err(Error::Invalid(_))));

        // A star graph has a degree-3 vertex.
        let star = Presentation::from_upper(4, |i, _j| {
            if i == 1 {
                (q(), &LaurentScalar::one() - &q())
            } else {
                (q(), LaurentScalar::zero())
            }
        })
        .unwrap();
        assert!(matches!(classify(&star), Err(Error::DegreeExceeded)));
    }
}
