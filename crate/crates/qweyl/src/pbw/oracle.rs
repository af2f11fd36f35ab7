//! Brute-force confluence oracle, independent of the block multiplication.
//!
//! Words in the free algebra are rewritten one adjacent descent at a time:
//! an out-of-order pair x_j x_i (j > i) becomes q_ji x_i x_j + r_ji. The
//! leftmost descent is always resolved first, which makes the procedure a
//! deterministic function. [`diamond_oracle`] reduces every overlap word
//! x_w x_v x_u (u < v < w) starting from each of its two association orders
//! and reports whether all results agree; this decides PBW-ness without
//! relying on the closed-form condition.

use std::collections::BTreeMap;

use super::{NCPoly, Presentation};
use crate::scalar::LaurentScalar;

/// Sum of scalar multiples of free words over 0-based generator letters.
type FreePoly = BTreeMap<Vec<usize>, LaurentScalar>;

fn add_to(poly: &mut FreePoly, word: Vec<usize>, c: LaurentScalar) {
    if c.is_zero() {
        return;
    }
    match poly.entry(word) {
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

fn first_descent(word: &[usize]) -> Option<usize> {
    (0..word.len().saturating_sub(1)).find(|&p| word[p] > word[p + 1])
}

/// One rewriting step at position p: …x_j x_i… ↦ q_ji·(…x_i x_j…) + r_ji·(……).
fn step(p: &Presentation, word: &[usize], at: usize) -> Vec<(Vec<usize>, LaurentScalar)> {
    let (j, i) = (word[at], word[at + 1]);
    debug_assert!(j > i);
    let mut swapped = word.to_vec();
    swapped.swap(at, at + 1);
    let mut dropped = word.to_vec();
    dropped.drain(at..at + 2);
    vec![(swapped, p.q0(j, i).clone()), (dropped, p.r0(j, i).clone())]
}

/// Fully reduce, always resolving the leftmost descent of each word first.
fn normalize(p: &Presentation, start: FreePoly) -> FreePoly {
    let mut done: FreePoly = BTreeMap::new();
    let mut work: Vec<(Vec<usize>, LaurentScalar)> = start.into_iter().collect();
    while let Some((word, c)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        match first_descent(&word) {
            None => add_to(&mut done, word, c),
            Some(at) => {
                for (w, factor) in step(p, &word, at) {
                    work.push((w, &c * &factor));
                }
            }
        }
    }
    done.retain(|_, c| !c.is_zero());
    done
}

fn to_ncpoly(n: usize, poly: &FreePoly) -> NCPoly {
    let mut out = NCPoly::zero(n);
    for (word, c) in poly {
        let mut e = vec![0u32; n];
        for &letter in word {
            e[letter] += 1;
        }
        out = &out + &NCPoly::monomial(e, c.clone());
    }
    out
}

/// Normal form of a product of generators given as 1-based letters, computed
/// by free-word rewriting alone. Useful as an independent cross-check of the
/// block multiplication; only meaningful on PBW presentations.
pub fn reduce_word(p: &Presentation, letters: &[usize]) -> NCPoly {
    let word: Vec<usize> = letters.iter().map(|&l| l - 1).collect();
    let mut start = BTreeMap::new();
    start.insert(word, LaurentScalar::one());
    to_ncpoly(p.n(), &normalize(p, start))
}

/// Reduce x_w x_v x_u after resolving one chosen pair first, then leftmost.
fn reduce_triple(p: &Presentation, word: &[usize; 3], left_pair_first: bool) -> FreePoly {
    let at = if left_pair_first { 0 } else { 1 };
    let mut seeded: FreePoly = BTreeMap::new();
    for (w, c) in step(p, word, at) {
        add_to(&mut seeded, w, c);
    }
    normalize(p, seeded)
}

/// True iff every overlap x_w x_v x_u (u < v < w) reduces to the same normal
/// form from both association orders. Vacuously true below three generators.
pub fn diamond_oracle(p: &Presentation) -> bool {
    let n = p.n();
    for u in 0..n {
        for v in (u + 1)..n {
            for w in (v + 1)..n {
                let word = [w, v, u];
                if reduce_triple(p, &word, true) != reduce_triple(p, &word, false) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::super::{multiply, pbw_check, preset_cyclic, preset_linear, NCPoly, Presentation};
    use super::*;
    use crate::scalar::LaurentScalar;

    #[test]
    fn oracle_agrees_on_presets() {
        assert!(diamond_oracle(&preset_linear(2).unwrap()));
        assert!(diamond_oracle(&preset_linear(4).unwrap()));
        assert!(diamond_oracle(&preset_cyclic(3).unwrap()));
        assert!(diamond_oracle(&preset_cyclic(5).unwrap()));
    }

    #[test]
    fn oracle_rejects_a_broken_table() {
        let broken = preset_linear(3)
            .unwrap()
            .with_entry(1, 3, LaurentScalar::q(), LaurentScalar::zero())
            .unwrap();
        assert!(!pbw_check(&broken));
        assert!(!diamond_oracle(&broken));
    }

    #[test]
    fn word_reduction_matches_block_multiplication() {
        let p = preset_cyclic(3).unwrap();
        let via_words = reduce_word(&p, &[3, 2, 3, 1]);
        let x = |i| NCPoly::generator(3, i);
        let step1 = multiply(&p, &x(3), &x(2)).unwrap();
        let step2 = multiply(&p, &step1, &x(3)).unwrap();
        let via_blocks = multiply(&p, &step2, &x(1)).unwrap();
        assert_eq!(via_words, via_blocks);
    }

    #[test]
    fn triple_products_associate_and_match_words_on_small_monomials() {
        // Every triple (m1, m2, m3) of standard monomials with
        // deg m1 + deg m2 + deg m3 <= 4, in both presets at n = 5.
        for p in [preset_linear(5).unwrap(), preset_cyclic(5).unwrap()] {
            let monos = monomials_up_to(5, 4);
            for m1 in &monos {
                for m2 in &monos {
                    for m3 in &monos {
                        let d: u32 = [m1, m2, m3].iter().map(|m| m.iter().sum::<u32>()).sum();
                        if d > 4 {
                            continue;
                        }
                        check_triple(&p, m1, m2, m3);
                    }
                }
            }
        }
    }

    fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    let used: u32 = prefix.iter().sum();
                    (0..=(d - used)).map(move |e| {
                        let mut next = prefix.clone();
                        next.push(e);
                        next
                    })
                })
                .collect();
        }
        out
    }

    fn check_triple(p: &Presentation, m1: &[u32], m2: &[u32], m3: &[u32]) {
        let f = NCPoly::monomial(m1.to_vec(), LaurentScalar::one());
        let g = NCPoly::monomial(m2.to_vec(), LaurentScalar::one());
        let h = NCPoly::monomial(m3.to_vec(), LaurentScalar::one());
        let left = multiply(p, &multiply(p, &f, &g).unwrap(), &h).unwrap();
        let right = multiply(p, &f, &multiply(p, &g, &h).unwrap()).unwrap();
        assert_eq!(left, right, "associativity at {m1:?} {m2:?} {m3:?}");

        let mut letters = Vec::new();
        for m in [m1, m2, m3] {
            for (i, &e) in m.iter().enumerate() {
                letters.extend(std::iter::repeat_n(i + 1, e as usize));
            }
        }
        assert_eq!(left, reduce_word(p, &letters), "free words at {m1:?} {m2:?} {m3:?}");
    }
}
