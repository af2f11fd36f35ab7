//! End-to-end acceptance checks, one test per criterion. Each test prints a
//! single pass line with its elapsed time; wall-clock budgets are asserted
//! where the criterion carries one. All arithmetic is exact, so every
//! comparison is strict equality with zero tolerance.

use std::time::{Duration, Instant};

use qweyl::cluster::{self, mutate_seed, parity_skew, rotation_check, suite_cluster, QuantumSeed};
use qweyl::pbw::{
    self, apply_change, classify, diamond_oracle, pbw_check, preset_cyclic, preset_family,
    preset_linear, suite_structure, Family, NCPoly, Presentation, Shape,
};
use qweyl::poisson::{
    self, divided_at_one, lambda_kernel, preset_fc, preset_fl, semiclassical_limit, suite_poisson,
    CPoly,
};
use qweyl::qtorus::{check_splitting, check_v_embedding, z_tower_skew, SkewMatrix};
use qweyl::report::Report;
use qweyl::scalar::{rat, rat_int, LaurentScalar, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn done(criterion: &str, started: Instant) {
    println!("criterion {criterion}: PASS in {:?}", started.elapsed());
}

fn assert_suite_passes(rep: &Report) {
    let failures: Vec<String> = rep
        .failures()
        .map(|c| format!("{} ({}): {}", c.id, c.tag, c.witness.as_deref().unwrap_or("")))
        .collect();
    assert!(failures.is_empty(), "{} failed checks in {}:\n{}", failures.len(), rep.suite, failures.join("\n"));
}

fn unit(rng: &mut ChaCha8Rng) -> LaurentScalar {
    let k = rng.gen_range(-3..=3i64);
    let num = loop {
        let n = rng.gen_range(-4..=4i64);
        if n != 0 {
            break n;
        }
    };
    let den = rng.gen_range(1..=3i64);
    LaurentScalar::vpow_scaled(k, rat(num, den))
}

#[test]
fn criterion_01_pbw_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let qpool = [
        LaurentScalar::q(),
        LaurentScalar::qpow_int(-1),
        LaurentScalar::qpow_int(2),
        LaurentScalar::one(),
        LaurentScalar::vpow(1),
        LaurentScalar::vpow_scaled(0, rat_int(-1)),
    ];
    let rpool = [
        LaurentScalar::zero(),
        LaurentScalar::zero(),
        LaurentScalar::one(),
        &LaurentScalar::one() - &LaurentScalar::q(),
        LaurentScalar::vpow_scaled(-1, rat(2, 3)),
    ];
    // seed the sample with one presentation of each outcome so the
    // comparison below is never vacuous
    let mut cases: Vec<Presentation> = vec![
        preset_linear(3).unwrap(),
        preset_linear(3)
            .unwrap()
            .with_entry(1, 3, LaurentScalar::q(), LaurentScalar::zero())
            .unwrap(),
    ];
    while cases.len() < 202 {
        let p = Presentation::from_upper(3, |_, _| {
            (
                qpool[rng.gen_range(0..qpool.len())].clone(),
                rpool[rng.gen_range(0..rpool.len())].clone(),
            )
        })
        .expect("unit q entries always build");
        cases.push(p);
    }
    let mut seen = [0usize; 2];
    for p in &cases {
        let fast = pbw_check(p);
        let slow = diamond_oracle(p);
        assert_eq!(fast, slow, "criterion and oracle disagree on {p:?}");
        seen[usize::from(fast)] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "sample must exercise both outcomes, got {seen:?}");
    assert!(t.elapsed() < Duration::from_secs(5), "budget exceeded: {:?}", t.elapsed());
    done("01 pbw-equivalence", t);
}

#[test]
fn criterion_02_structure_suite_linear() {
    let t = Instant::now();
    for n in 2..=7 {
        assert_suite_passes(&suite_structure(Family::Linear, n).unwrap());
    }
    assert!(t.elapsed() < Duration::from_secs(10), "budget exceeded: {:?}", t.elapsed());
    done("02 structure-linear", t);
}

#[test]
fn criterion_03_structure_suite_cyclic() {
    let t = Instant::now();
    for n in [3, 5, 7] {
        assert_suite_passes(&suite_structure(Family::Cyclic, n).unwrap());
    }
    assert!(t.elapsed() < Duration::from_secs(10), "budget exceeded: {:?}", t.elapsed());
    done("03 structure-cyclic", t);
}

#[test]
fn criterion_04_classification_recovers_scrambles() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let linear_ranks = [2, 3, 4, 5, 6, 7];
    let cyclic_ranks = [3, 5, 7];
    for case in 0..50 {
        let cyclic = case % 2 == 1;
        let (preset, n) = if cyclic {
            let n = cyclic_ranks[(case / 2) % cyclic_ranks.len()];
            (preset_cyclic(n).unwrap(), n)
        } else {
            let n = linear_ranks[(case / 2) % linear_ranks.len()];
            (preset_linear(n).unwrap(), n)
        };
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let rescale: Vec<LaurentScalar> = (0..n).map(|_| unit(&mut rng)).collect();
        let scrambled = apply_change(&preset, &order, &rescale).unwrap();
        let res = classify(&scrambled).unwrap();
        if cyclic {
            assert_eq!(res.shape, Shape::Cyclic, "case {case}");
            assert!(res.cyclic_obstruction.is_none(), "unit rescales leave square residues");
        } else {
            assert_eq!(res.shape, Shape::Linear, "case {case}");
        }
        let recovered = apply_change(&scrambled, &res.order, &res.rescale).unwrap();
        assert_eq!(recovered, preset, "case {case}: change of variables must restore the preset");
    }
    done("04 classification", t);
}

#[test]
fn criterion_05_embedding_and_splitting() {
    let t = Instant::now();
    for n in 2..=7 {
        assert_suite_passes(&check_v_embedding(n).unwrap());
    }
    for n in [3, 5, 7] {
        for lam in [0i64, 1, -2] {
            let lam = LaurentScalar::from_rational(rat_int(lam));
            assert!(check_splitting(n, &lam).unwrap(), "splitting at n={n}");
        }
    }
    done("05 embedding-splitting", t);
}

#[test]
fn criterion_06_cluster_suite() {
    let t = Instant::now();
    for n in [3, 5] {
        assert_suite_passes(&suite_cluster(n).unwrap());
    }
    let t7 = Instant::now();
    assert_suite_passes(&suite_cluster(7).unwrap());
    assert!(t7.elapsed() < Duration::from_secs(30), "budget exceeded: {:?}", t7.elapsed());
    done("06 cluster-suite", t);
}

fn involutive_walks(seed: &QuantumSeed, depth: usize) {
    if depth == 0 {
        return;
    }
    for k in 0..seed.size() {
        let next = mutate_seed(seed, k).unwrap();
        assert!(next.compatibility_holds(), "B^T Lambda = dI broken at vertex {k}");
        let back = mutate_seed(&next, k).unwrap();
        assert_eq!(&back, seed, "double mutation at vertex {k} is not the identity");
        involutive_walks(&next, depth - 1);
    }
}

#[test]
fn criterion_07_compatibility_and_involutivity() {
    let t = Instant::now();
    for seed in [cluster::preset_p(5).unwrap(), cluster::preset_dynkin_a(5).unwrap()] {
        assert!(seed.compatibility_holds());
        involutive_walks(&seed, 4);
    }
    done("07 compatibility-involutivity", t);
}

#[test]
fn criterion_08_rotation_periodicity() {
    let t = Instant::now();
    for n in [3, 5, 7] {
        assert!(rotation_check(n).unwrap(), "rotation fails at n={n}");
    }
    done("08 rotation", t);
}

#[test]
fn criterion_09_poisson_suite() {
    let t = Instant::now();
    for n in [3, 5, 7] {
        assert_suite_passes(&suite_poisson(n).unwrap());
    }
    assert!(t.elapsed() < Duration::from_secs(20), "budget exceeded: {:?}", t.elapsed());
    done("09 poisson-suite", t);
}

#[test]
fn criterion_10_semiclassical_coherence() {
    let t = Instant::now();
    for n in [3, 5] {
        let linear = semiclassical_limit(&preset_linear(n).unwrap()).unwrap();
        assert_eq!(linear, preset_fl(n).unwrap(), "linear table at n={n}");
        let cyclic = semiclassical_limit(&preset_cyclic(n).unwrap()).unwrap();
        assert_eq!(cyclic, preset_fc(n).unwrap(), "cyclic table at n={n}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    for case in 0..50 {
        let n = if case % 2 == 0 { 3 } else { 5 };
        let family = if case % 4 < 2 { Family::Linear } else { Family::Cyclic };
        let p = preset_family(family, n).unwrap();
        let table = match family {
            Family::Linear => preset_fl(n).unwrap(),
            Family::Cyclic => preset_fc(n).unwrap(),
        };
        let ea: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let eb: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let fq = NCPoly::monomial(ea.clone(), LaurentScalar::one());
        let gq = NCPoly::monomial(eb.clone(), LaurentScalar::one());
        let quantum = divided_at_one(&pbw::commutator(&p, &fq, &gq).unwrap()).unwrap();
        let fc = CPoly::monomial(ea.iter().map(|&e| i64::from(e)).collect(), rat_int(1));
        let gc = CPoly::monomial(eb.iter().map(|&e| i64::from(e)).collect(), rat_int(1));
        let classical = poisson::bracket(&table, &fc, &gc).unwrap();
        assert_eq!(quantum, classical, "case {case}: divided commutator vs bracket");
    }
    done("10 semiclassical", t);
}

/// Rank over the rationals by Gaussian elimination; the independent oracle
/// for kernel dimensions.
fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat_int(x)).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != rat_int(0)) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in 0..m.len() {
            if r != rank && m[r][col] != rat_int(0) {
                let factor = &m[r][col] / &m[rank][col];
                for c in col..cols {
                    let sub = &m[rank][c] * &factor;
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn kernel_against_oracle(lam: &SkewMatrix) -> Vec<Vec<i64>> {
    let basis = lambda_kernel(lam);
    let m = lam.m();
    let nullity = m - rational_rank(lam.rows());
    assert_eq!(basis.len(), nullity, "kernel dimension disagrees with the rational oracle");
    for v in &basis {
        for col in 0..m {
            let dot: i64 = (0..m).map(|row| v[row] * lam.rows()[row][col]).sum();
            assert_eq!(dot, 0, "kernel vector {v:?} does not annihilate the matrix");
        }
    }
    basis
}

#[test]
fn criterion_11_simplicity_kernels() {
    let t = Instant::now();
    for n in [2, 4, 6] {
        assert!(kernel_against_oracle(&z_tower_skew(n)).is_empty(), "even n={n}");
    }
    for n in [3, 5, 7] {
        assert!(kernel_against_oracle(&parity_skew(n + 1)).is_empty(), "parity matrix at n={n}");
        let basis = kernel_against_oracle(&z_tower_skew(n));
        let mut e_n = vec![0i64; n];
        e_n[n - 1] = 1;
        assert_eq!(basis, vec![e_n], "odd n={n} kernel is spanned by the last coordinate");
    }
    done("11 simplicity-kernels", t);
}
