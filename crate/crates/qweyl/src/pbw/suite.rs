//! Identity suite for the linear and cyclic presets: straightening rules for
//! the z tower, normality of z_n, pairwise z twists, the shifted recursion,
//! the wrap-around rules and the central element in the cyclic case, and the
//! named automorphism families.

use super::{
    apply_hom, check_hom, commutator, compose_homs, hom_iota, hom_iota_nu, hom_reversal,
    hom_theta, multiply, omega, preset_family, shift_generators, z_element, Family, NCPoly,
    Presentation,
};
use crate::error::{Error, Result};
use crate::report::Report;
use crate::scalar::{rat, LaurentScalar};

/// zs holds z_{-1}, z_0, …; index by the z subscript (from -1).
fn zat(zs: &[NCPoly], k: isize) -> &NCPoly {
    &zs[usize::try_from(k + 1).expect("z index >= -1")]
}

/// Run every structural identity for the given preset family at rank n
/// (n ≥ 2 for the linear family, odd n ≥ 3 for the cyclic one).
pub fn suite_structure(family: Family, n: usize) -> Result<Report> {
    if family == Family::Linear && n < 2 {
        return Err(Error::Invalid("linear structure suite needs n >= 2".into()));
    }
    let p = preset_family(family, n)?;
    let mut report = Report::new(format!("structure/{family}{n}"));

    // The z tower z_{-1}..z_m; in the cyclic preset the tower stops one short
    // of the wrap-around generator, where the linear straightening rules
    // still apply verbatim.
    let m = match family {
        Family::Linear => n,
        Family::Cyclic => n - 1,
    };
    let mut zs = vec![NCPoly::zero(n)];
    for k in 0..=m {
        zs.push(z_element(&p, k)?);
    }

    let q = LaurentScalar::q();
    let qinv = q.inverse().expect("unit");
    let one = LaurentScalar::one();
    let x = |i: usize| NCPoly::generator(n, i);
    // q^{(-1)^{i-1}}: q for odd i, q^{-1} for even i.
    let q_alt = |i: usize| if i % 2 == 1 { q.clone() } else { qinv.clone() };

    for i in 1..=m {
        for j in 0..=m {
            let zj = zat(&zs, j as isize);
            let lhs = multiply(&p, &x(i), zj)?;
            let zjxi = multiply(&p, zj, &x(i))?;
            let rhs = if j + 1 < i {
                if j % 2 == 1 { zjxi.scale(&q_alt(i)) } else { zjxi }
            } else if j + 1 == i {
                let zi2 = zat(&zs, i as isize - 2);
                if i % 2 == 1 {
                    &zjxi + &zi2.scale(&(&q - &one))
                } else {
                    &zjxi.scale(&qinv) + &zi2.scale(&(&one - &qinv))
                }
            } else if j % 2 == 1 {
                zjxi
            } else {
                zjxi.scale(&q_alt(i))
            };
            report.check(
                format!("zx-straighten/i={i}/j={j}"),
                "z straightening cases",
                lhs == rhs,
                || format!("x{i}·z{j} = {lhs}, expected {rhs}"),
            );
        }
    }

    for i in 1..=m {
        let zi1 = zat(&zs, i as isize - 1);
        let lhs = multiply(&p, &x(i), zi1)?;
        let zx = multiply(&p, zi1, &x(i))?;
        let zi = zat(&zs, i as isize);
        let rhs = if i % 2 == 1 {
            &zx.scale(&q) + &zi.scale(&(&one - &q))
        } else {
            &zx + &zi.scale(&(&qinv - &one))
        };
        report.check(
            format!("zx-adjacent/i={i}"),
            "adjacent z recursion",
            lhs == rhs,
            || format!("x{i}·z{} = {lhs}, expected {rhs}", i - 1),
        );
    }

    if family == Family::Linear {
        let zn = zat(&zs, n as isize);
        for i in 1..=n {
            let lhs = multiply(&p, zn, &x(i))?;
            let rho = if n % 2 == 1 {
                one.clone()
            } else if i % 2 == 0 {
                q.clone()
            } else {
                qinv.clone()
            };
            let rhs = multiply(&p, &x(i), zn)?.scale(&rho);
            report.check(
                format!("zn-normal/i={i}"),
                "top z normality",
                lhs == rhs,
                || format!("z{n}·x{i} = {lhs}, expected {rhs}"),
            );
        }
    }

    for i in 0..m {
        for j in (i + 1)..=m {
            let zi = zat(&zs, i as isize);
            let zj = zat(&zs, j as isize);
            let lhs = multiply(&p, zi, zj)?;
            let mut rhs = multiply(&p, zj, zi)?;
            if i % 2 == 1 && j % 2 == 0 {
                rhs = rhs.scale(&q);
            }
            report.check(
                format!("z-pairwise/i={i}/j={j}"),
                "pairwise z twist",
                lhs == rhs,
                || format!("z{i}·z{j} = {lhs}, expected {rhs}"),
            );
        }
    }

    for i in 1..=m {
        let head = multiply(&p, &x(1), &shift_generators(zat(&zs, i as isize - 1), 1)?)?;
        let tail = shift_generators(zat(&zs, i as isize - 2), 2)?;
        let rhs = &head - &tail;
        let zi = zat(&zs, i as isize);
        report.check(
            format!("z-shift/i={i}"),
            "shifted z recursion",
            zi == &rhs,
            || format!("z{i} = {zi}, shifted recursion gives {rhs}"),
        );
    }

    match family {
        Family::Cyclic => cyclic_extras(&mut report, &p, n, &zs)?,
        Family::Linear => linear_homs(&mut report, n)?,
    }
    Ok(report)
}

fn cyclic_extras(report: &mut Report, p: &Presentation, n: usize, zs: &[NCPoly]) -> Result<()> {
    let q = LaurentScalar::q();
    let one = LaurentScalar::one();
    let one_minus_q = &one - &q;
    let xn = NCPoly::generator(n, n);

    for j in 1..=(n - 2) {
        let zj = zat(zs, j as isize);
        let lhs = multiply(p, &xn, zj)?;
        let zxn = multiply(p, zj, &xn)?;
        let shifted = shift_generators(zat(zs, j as isize - 1), 1)?;
        let rhs = if j % 2 == 1 {
            &zxn.scale(&q) + &shifted.scale(&one_minus_q)
        } else {
            &zxn + &shifted.scale(&one_minus_q)
        };
        report.check(
            format!("wrap-straighten/j={j}"),
            "wrap generator straightening",
            lhs == rhs,
            || format!("x{n}·z{j} = {lhs}, expected {rhs}"),
        );
    }

    {
        let zn1 = zat(zs, n as isize - 1);
        let zn2 = zat(zs, n as isize - 2);
        let lhs = multiply(p, &xn, zn1)?;
        let zxn = multiply(p, zn1, &xn)?;
        let diff = &shift_generators(zn2, 1)? - zn2;
        let rhs = &zxn + &diff.scale(&one_minus_q);
        report.check(
            "wrap-adjacent",
            "wrap generator straightening",
            lhs == rhs,
            || format!("x{n}·z{} = {lhs}, expected {rhs}", n - 1),
        );
    }

    let om = omega(n)?;
    let theta = hom_theta(n)?;
    let shifted_omega = apply_hom(&theta, &om)?;
    report.check(
        "omega-shift-invariant",
        "central element shift invariance",
        shifted_omega == om,
        || format!("shift sends Omega to {shifted_omega}, expected {om}"),
    );
    for i in 1..=n {
        let c = commutator(p, &om, &NCPoly::generator(n, i))?;
        report.check(
            format!("omega-central/i={i}"),
            "central element commutes",
            c.is_zero(),
            || format!("[Omega, x{i}] = {c}"),
        );
    }

    for i in 1..=(n - 1) {
        let a = multiply(p, zat(zs, i as isize), &shift_generators(zat(zs, i as isize - 2), 1)?)?;
        let b = multiply(p, zat(zs, i as isize - 1), &shift_generators(zat(zs, i as isize - 1), 1)?)?;
        let (lhs, expo) = if i % 2 == 1 {
            (&a.scale(&q) - &b, (i as i64 - 1) / 2)
        } else {
            (&a - &b, (i as i64 - 2) / 2)
        };
        let rhs = NCPoly::constant(n, LaurentScalar::qpow_int(expo).scale(&rat(-1, 1)));
        report.check(
            format!("telescope/i={i}"),
            "telescoped product constant",
            lhs == rhs,
            || format!("telescoped product at {i} = {lhs}, expected {rhs}"),
        );
    }

    let iota = hom_iota(n)?;
    let reversal = hom_reversal(Family::Cyclic, n)?;
    report.check("hom/shift", "relation preservation", check_hom(&theta)?, || {
        "index shift does not preserve relations".into()
    });
    report.check("hom/sign", "relation preservation", check_hom(&iota)?, || {
        "sign flip does not preserve relations".into()
    });
    report.check("hom/reversal", "relation preservation", check_hom(&reversal)?, || {
        "reversal does not preserve relations".into()
    });

    // Orders on generators: the shift has order n; with the sign flip the
    // composite has order exactly 2n.
    let mut shift_ok = true;
    let mut sign_shift_ok = true;
    let mut strict_ok = true;
    for i in 1..=n {
        let g = NCPoly::generator(n, i);
        let mut v = g.clone();
        for _ in 0..n {
            v = apply_hom(&theta, &v)?;
        }
        shift_ok &= v == g;

        let mut w = g.clone();
        for _ in 0..(2 * n) {
            w = apply_hom(&iota, &apply_hom(&theta, &w)?)?;
        }
        sign_shift_ok &= w == g;

        let mut u = g.clone();
        for _ in 0..n {
            u = apply_hom(&iota, &apply_hom(&theta, &u)?)?;
        }
        strict_ok &= u == g.scale(&LaurentScalar::from_int(-1));
    }
    report.check("order/shift", "automorphism order", shift_ok, || {
        format!("shift^{n} is not the identity on generators")
    });
    report.check("order/sign-shift", "automorphism order", sign_shift_ok, || {
        format!("(sign∘shift)^{} is not the identity on generators", 2 * n)
    });
    report.check("order/sign-shift-strict", "automorphism order", strict_ok, || {
        format!("(sign∘shift)^{n} should negate every generator")
    });
    Ok(())
}

fn linear_homs(report: &mut Report, n: usize) -> Result<()> {
    let v = LaurentScalar::v();
    let iota_v = hom_iota_nu(n, &v)?;
    let reversal = hom_reversal(Family::Linear, n)?;
    report.check("hom/scaling", "relation preservation", check_hom(&iota_v)?, || {
        "alternating scaling does not preserve relations".into()
    });
    report.check("hom/reversal", "relation preservation", check_hom(&reversal)?, || {
        "reversal does not preserve relations".into()
    });

    // Composition law: the alternating scalings form a group,
    // ι_ν ∘ ι_μ = ι_{νμ}.
    let nu = v.clone();
    let mu = v.pow(3);
    let lhs = compose_homs(&hom_iota_nu(n, &nu)?, &hom_iota_nu(n, &mu)?)?;
    let rhs = hom_iota_nu(n, &(&nu * &mu))?;
    report.check(
        "hom/scaling-compose",
        "scaling composition law",
        lhs.images == rhs.images,
        || "composed scalings disagree with the product scaling".into(),
    );
    Ok(())
}
