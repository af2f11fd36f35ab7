//! Expression language and command-line front end.
//!
//! The expression grammar covers sums, differences, products, powers, signed
//! rationals, the deformation scalars q and v (q is sugar for v^2), the
//! generators x1.., w0.., the tower shorthands z0.., and the named elements
//! Omega and Delta. Juxtaposition is not multiplication; every product is
//! spelled with `*`. Precedence is `^` above unary minus above `*` above
//! binary `+`/`-`. Parse errors carry the byte offset of the offending token.
//!
//! Evaluation is context specific: [`eval_pbw`] lands in normal-form
//! noncommutative polynomials over a presentation, [`eval_torus`] in a
//! quantum torus over a skew form, and [`eval_poisson`] in commutative
//! polynomials. The [`run`] entry point wires the subcommands `nf`,
//! `mutate`, `bracket`, `suite`, and `classify`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{Signed, ToPrimitive};

use crate::cluster;
use crate::error::{Error, Result};
use crate::pbw::{self, Family, NCPoly, Presentation};
use crate::poisson::{self, CPoly};
use crate::qtorus::{SkewMatrix, TorusElement};
use crate::report::Report;
use crate::scalar::{LaurentScalar, Rational};

/// Which algebra an expression is destined for; gates the identifier
/// alphabet and the exponent rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Context {
    Pbw,
    Torus,
    Poisson,
}

/// Distinguished elements addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Named {
    Omega,
    Delta,
}

/// Abstract syntax; atoms remember their byte offset for diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(Rational),
    Q { offset: usize },
    V { offset: usize },
    Gen { letter: char, index: usize, offset: usize },
    Named { which: Named, offset: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow { base: Box<Expr>, exp: Rational, offset: usize },
}

fn perr(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rational),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn name(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(r) => format!("`{r}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }

    /// Could this token begin a primary expression? Used to phrase the
    /// missing-operator diagnostic.
    fn starts_primary(&self) -> bool {
        matches!(self, Tok::Ident(_) | Tok::Number(_) | Tok::LParen)
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match c {
            '+' => toks.push((Tok::Plus, start)),
            '-' => toks.push((Tok::Minus, start)),
            '*' => toks.push((Tok::Star, start)),
            '^' => toks.push((Tok::Caret, start)),
            '(' => toks.push((Tok::LParen, start)),
            ')' => toks.push((Tok::RParen, start)),
            _ if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ if c.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let numer: num_bigint::BigInt =
                    src[start..i].parse().expect("digit run parses");
                let denom = if i < bytes.len() && bytes[i] == b'/' {
                    let dstart = i + 1;
                    let mut j = dstart;
                    while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        j += 1;
                    }
                    if j == dstart {
                        return Err(perr(i, "expected digits after `/`"));
                    }
                    i = j;
                    let d: num_bigint::BigInt = src[dstart..j].parse().expect("digit run");
                    if d == num_bigint::BigInt::from(0) {
                        return Err(perr(dstart, "zero denominator in rational literal"));
                    }
                    d
                } else {
                    num_bigint::BigInt::from(1)
                };
                toks.push((Tok::Number(Rational::new(numer, denom)), start));
                continue;
            }
            _ => return Err(perr(start, format!("unexpected character `{c}`"))),
        }
        i += 1;
    }
    Ok(toks)
}

struct ExprParser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    context: Context,
}

impl ExprParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, o)| o)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    e = Expr::Add(Box::new(e), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    e = Expr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.bump();
            e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        self.bump();
        let (exp, exp_offset) = self.exponent()?;
        self.validate_exponent(&base, &exp, exp_offset)?;
        Ok(Expr::Pow { base: Box::new(base), exp, offset: exp_offset })
    }

    fn exponent(&mut self) -> Result<(Rational, usize)> {
        let off = self.offset();
        match self.peek() {
            Some(Tok::Number(_)) => {
                let (Tok::Number(r), o) = self.bump() else { unreachable!() };
                Ok((r, o))
            }
            Some(Tok::Minus) => {
                self.bump();
                match self.peek() {
                    Some(Tok::Number(_)) => {
                        let (Tok::Number(r), _) = self.bump() else { unreachable!() };
                        Ok((-r, off))
                    }
                    _ => Err(perr(self.offset(), "expected a number after `^-`")),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let neg = if matches!(self.peek(), Some(Tok::Minus)) {
                    self.bump();
                    true
                } else {
                    false
                };
                let r = match self.peek() {
                    Some(Tok::Number(_)) => {
                        let (Tok::Number(r), _) = self.bump() else { unreachable!() };
                        r
                    }
                    _ => {
                        return Err(perr(
                            self.offset(),
                            "exponents must be rational literals",
                        ))
                    }
                };
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                    }
                    _ => return Err(perr(self.offset(), "expected `)` after the exponent")),
                }
                Ok((if neg { -r } else { r }, off))
            }
            _ => Err(perr(off, "expected an exponent after `^`")),
        }
    }

    fn validate_exponent(&self, base: &Expr, exp: &Rational, off: usize) -> Result<()> {
        let integral = exp.is_integer();
        let half_integral = integral || (exp * &Rational::from_integer(2.into())).is_integer();
        match base {
            Expr::Q { .. } => {
                if !half_integral {
                    return Err(perr(off, "exponents on q must be integers or half-integers"));
                }
            }
            Expr::V { .. } => {
                if !integral {
                    return Err(perr(off, "exponents on v must be integers"));
                }
            }
            Expr::Gen { letter, index, .. } => {
                if !integral {
                    return Err(perr(
                        off,
                        format!("fractional powers of the generator {letter}{index} are not defined"),
                    ));
                }
                if self.context == Context::Pbw && exp.is_negative() {
                    return Err(perr(
                        off,
                        "negative generator exponents are not allowed in a pbw expression",
                    ));
                }
            }
            _ => {
                if !integral {
                    return Err(perr(off, "fractional powers are only available on q"));
                }
                if exp.is_negative() {
                    return Err(perr(
                        off,
                        "only single generators (and q, v) may carry a negative exponent",
                    ));
                }
            }
        }
        Ok(())
    }

    fn primary(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.peek() {
            Some(Tok::Number(_)) => {
                let (Tok::Number(r), _) = self.bump() else { unreachable!() };
                Ok(Expr::Number(r))
            }
            Some(Tok::Ident(_)) => {
                let (Tok::Ident(s), o) = self.bump() else { unreachable!() };
                self.classify_ident(&s, o)
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        Ok(e)
                    }
                    Some(t) if t.starts_primary() => Err(perr(
                        self.offset(),
                        format!(
                            "missing operator before {}; juxtaposition is not multiplication",
                            t.name()
                        ),
                    )),
                    Some(t) => Err(perr(self.offset(), format!("expected `)`, found {}", t.name()))),
                    None => Err(perr(self.end, "expected `)` before the end of input")),
                }
            }
            Some(t) => Err(perr(off, format!("expected an expression, found {}", t.name()))),
            None => Err(perr(self.end, "expected an expression")),
        }
    }

    fn classify_ident(&self, s: &str, off: usize) -> Result<Expr> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (alpha, digits) = s.split_at(split);
        let available = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(perr(
                    off,
                    format!("{what} is not available in a {} expression", self.context_name()),
                ))
            }
        };
        match (alpha, digits.is_empty()) {
            ("q", true) => {
                available(self.context != Context::Poisson, "q")?;
                Ok(Expr::Q { offset: off })
            }
            ("v", true) => {
                available(self.context != Context::Poisson, "v")?;
                Ok(Expr::V { offset: off })
            }
            ("Omega", true) => {
                available(self.context != Context::Torus, "Omega")?;
                Ok(Expr::Named { which: Named::Omega, offset: off })
            }
            ("Delta", true) => {
                available(self.context == Context::Poisson, "Delta")?;
                Ok(Expr::Named { which: Named::Delta, offset: off })
            }
            ("x" | "w" | "z", false) => {
                let letter = alpha.chars().next().expect("nonempty");
                let allowed = match self.context {
                    Context::Pbw => matches!(letter, 'x' | 'z'),
                    Context::Torus => letter == 'w',
                    Context::Poisson => true,
                };
                available(allowed, &format!("the generator family `{alpha}`"))?;
                let index: usize = digits
                    .parse()
                    .map_err(|_| perr(off, format!("generator index `{digits}` is out of range")))?;
                Ok(Expr::Gen { letter, index, offset: off })
            }
            _ => Err(perr(off, format!("unknown identifier `{s}`"))),
        }
    }

    fn context_name(&self) -> &'static str {
        match self.context {
            Context::Pbw => "pbw",
            Context::Torus => "torus",
            Context::Poisson => "poisson",
        }
    }
}

/// Parse an expression for the given context. Errors carry byte offsets.
pub fn parse(src: &str, context: Context) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = ExprParser { toks, pos: 0, end: src.len(), context };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        let msg = if t.starts_primary() {
            format!(
                "missing operator before {}; juxtaposition is not multiplication",
                t.name()
            )
        } else if *t == Tok::RParen {
            "unmatched `)`".to_string()
        } else {
            format!("unexpected {}", t.name())
        };
        return Err(perr(p.offset(), msg));
    }
    Ok(e)
}

fn exp_to_i64(exp: &Rational, off: usize) -> Result<i64> {
    if !exp.is_integer() {
        return Err(perr(off, "expected an integer exponent"));
    }
    exp.to_integer()
        .to_i64()
        .ok_or_else(|| perr(off, "exponent is too large"))
}

fn exp_to_u32(exp: &Rational, off: usize) -> Result<u32> {
    let k = exp_to_i64(exp, off)?;
    u32::try_from(k).map_err(|_| perr(off, "exponent must be a small nonnegative integer"))
}

/// Evaluate in the normal-form algebra of a presentation. The tower
/// shorthands z0..zn are available for every family; Omega only for the
/// cyclic one.
pub fn eval_pbw(e: &Expr, p: &Presentation, family: Family) -> Result<NCPoly> {
    let n = p.n();
    match e {
        Expr::Number(r) => Ok(NCPoly::constant(n, LaurentScalar::from_rational(r.clone()))),
        Expr::Q { .. } => Ok(NCPoly::constant(n, LaurentScalar::q())),
        Expr::V { .. } => Ok(NCPoly::constant(n, LaurentScalar::v())),
        Expr::Gen { letter: 'x', index, offset } => {
            if *index >= 1 && *index <= n {
                Ok(NCPoly::generator(n, *index))
            } else {
                Err(perr(*offset, format!("generator x{index} is out of range for n={n}")))
            }
        }
        Expr::Gen { letter: 'z', index, offset } => {
            if *index <= n {
                pbw::z_element(p, *index)
            } else {
                Err(perr(*offset, format!("tower element z{index} is out of range for n={n}")))
            }
        }
        Expr::Gen { letter, index, offset } => Err(perr(
            *offset,
            format!("generator {letter}{index} is not available in a pbw expression"),
        )),
        Expr::Named { which: Named::Omega, offset } => {
            if family == Family::Cyclic {
                pbw::omega(n)
            } else {
                Err(perr(*offset, "Omega is only defined for the cyclic family"))
            }
        }
        Expr::Named { which: Named::Delta, offset } => {
            Err(perr(*offset, "Delta is not available in a pbw expression"))
        }
        Expr::Neg(inner) => Ok(-&eval_pbw(inner, p, family)?),
        Expr::Add(a, b) => Ok(&eval_pbw(a, p, family)? + &eval_pbw(b, p, family)?),
        Expr::Sub(a, b) => Ok(&eval_pbw(a, p, family)? - &eval_pbw(b, p, family)?),
        Expr::Mul(a, b) => pbw::multiply(p, &eval_pbw(a, p, family)?, &eval_pbw(b, p, family)?),
        Expr::Pow { base, exp, offset } => match base.as_ref() {
            Expr::Q { .. } => Ok(NCPoly::constant(n, LaurentScalar::qpow(exp))),
            Expr::V { .. } => Ok(NCPoly::constant(
                n,
                LaurentScalar::vpow(exp_to_i64(exp, *offset)?),
            )),
            _ => {
                let b = eval_pbw(base, p, family)?;
                pbw::power(p, &b, exp_to_u32(exp, *offset)?)
            }
        },
    }
}

fn torus_power(lam: &SkewMatrix, f: &TorusElement, k: u32) -> TorusElement {
    let mut acc = TorusElement::one(lam.m());
    for _ in 0..k {
        acc = crate::qtorus::torus_mul(lam, &acc, f);
    }
    acc
}

/// Evaluate in the quantum torus over the skew form; generators are w0..,
/// 0-indexed, and may carry negative exponents.
pub fn eval_torus(e: &Expr, lam: &SkewMatrix) -> Result<TorusElement> {
    let m = lam.m();
    match e {
        Expr::Number(r) => Ok(TorusElement::constant(m, LaurentScalar::from_rational(r.clone()))),
        Expr::Q { .. } => Ok(TorusElement::constant(m, LaurentScalar::q())),
        Expr::V { .. } => Ok(TorusElement::constant(m, LaurentScalar::v())),
        Expr::Gen { letter: 'w', index, offset } => {
            if *index < m {
                Ok(TorusElement::generator(m, *index))
            } else {
                Err(perr(*offset, format!("generator w{index} is out of range for rank {m}")))
            }
        }
        Expr::Gen { letter, index, offset } => Err(perr(
            *offset,
            format!("generator {letter}{index} is not available in a torus expression"),
        )),
        Expr::Named { offset, .. } => {
            Err(perr(*offset, "named elements are not available in a torus expression"))
        }
        Expr::Neg(inner) => Ok(-&eval_torus(inner, lam)?),
        Expr::Add(a, b) => Ok(&eval_torus(a, lam)? + &eval_torus(b, lam)?),
        Expr::Sub(a, b) => Ok(&eval_torus(a, lam)? - &eval_torus(b, lam)?),
        Expr::Mul(a, b) => Ok(crate::qtorus::torus_mul(
            lam,
            &eval_torus(a, lam)?,
            &eval_torus(b, lam)?,
        )),
        Expr::Pow { base, exp, offset } => match base.as_ref() {
            Expr::Q { .. } => Ok(TorusElement::constant(m, LaurentScalar::qpow(exp))),
            Expr::V { .. } => Ok(TorusElement::constant(
                m,
                LaurentScalar::vpow(exp_to_i64(exp, *offset)?),
            )),
            Expr::Gen { letter: 'w', index, offset: goff } => {
                if *index >= m {
                    return Err(perr(
                        *goff,
                        format!("generator w{index} is out of range for rank {m}"),
                    ));
                }
                let mut a = vec![0i64; m];
                a[*index] = exp_to_i64(exp, *offset)?;
                Ok(TorusElement::monomial(a, LaurentScalar::one()))
            }
            _ => {
                let b = eval_torus(base, lam)?;
                Ok(torus_power(lam, &b, exp_to_u32(exp, *offset)?))
            }
        },
    }
}

/// Which commutative generator set a poisson expression addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoissonVars {
    /// x1..xn, 1-indexed, with the tower z0..zn and (odd n) Omega.
    X { n: usize },
    /// w0..w{n+1}, 0-indexed, with Delta.
    W { n: usize },
}

impl PoissonVars {
    fn rank(self) -> usize {
        match self {
            PoissonVars::X { n } => n,
            PoissonVars::W { n } => n + 2,
        }
    }
}

/// Evaluate in the commutative (Laurent) polynomial ring.
pub fn eval_poisson(e: &Expr, vars: PoissonVars) -> Result<CPoly> {
    let m = vars.rank();
    match e {
        Expr::Number(r) => Ok(CPoly::constant(m, r.clone())),
        Expr::Q { offset } | Expr::V { offset } => {
            Err(perr(*offset, "q and v are not available in a poisson expression"))
        }
        Expr::Gen { letter, index, offset } => match (vars, letter) {
            (PoissonVars::X { n }, 'x') => {
                if *index >= 1 && *index <= n {
                    Ok(CPoly::generator(m, index - 1))
                } else {
                    Err(perr(*offset, format!("generator x{index} is out of range for n={n}")))
                }
            }
            (PoissonVars::X { n }, 'z') => {
                if *index <= n {
                    Ok(poisson::z_poly(m, *index as i64))
                } else {
                    Err(perr(*offset, format!("tower element z{index} is out of range for n={n}")))
                }
            }
            (PoissonVars::W { n }, 'w') => {
                if *index <= n + 1 {
                    Ok(CPoly::generator(m, *index))
                } else {
                    Err(perr(
                        *offset,
                        format!("generator w{index} is out of range; this preset has w0..w{}", n + 1),
                    ))
                }
            }
            _ => Err(perr(
                *offset,
                format!("generator {letter}{index} does not belong to this preset"),
            )),
        },
        Expr::Named { which: Named::Omega, offset } => match vars {
            PoissonVars::X { n } if n % 2 == 1 && n >= 3 => Ok(poisson::omega_poly(n)),
            _ => Err(perr(*offset, "Omega is only defined for the cyclic preset at odd n")),
        },
        Expr::Named { which: Named::Delta, offset } => match vars {
            PoissonVars::W { n } => {
                let wg = |i: usize| CPoly::generator(m, i);
                Ok(&(&(&wg(0) * &wg(n + 1)) - &(&wg(1) * &wg(n))) - &CPoly::one(m))
            }
            PoissonVars::X { .. } => {
                Err(perr(*offset, "Delta is only defined for the periodic preset"))
            }
        },
        Expr::Neg(inner) => Ok(-&eval_poisson(inner, vars)?),
        Expr::Add(a, b) => Ok(&eval_poisson(a, vars)? + &eval_poisson(b, vars)?),
        Expr::Sub(a, b) => Ok(&eval_poisson(a, vars)? - &eval_poisson(b, vars)?),
        Expr::Mul(a, b) => Ok(&eval_poisson(a, vars)? * &eval_poisson(b, vars)?),
        Expr::Pow { base, exp, offset } => {
            if let Expr::Gen { .. } = base.as_ref() {
                let g = eval_poisson(base, vars)?;
                let k = exp_to_i64(exp, *offset)?;
                let (a, c) = g.terms().next().expect("generator is a monomial");
                let e: Vec<i64> = a.iter().map(|&x| x * k).collect();
                let _ = c;
                Ok(CPoly::monomial(e, Rational::from_integer(1.into())))
            } else {
                let b = eval_poisson(base, vars)?;
                Ok(b.pow(exp_to_u32(exp, *offset)?))
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "qweyl",
    about = "Quantized Weyl-type algebras: normal forms, cluster mutation, Poisson brackets, identity suites",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    #[value(name = "L", alias = "l")]
    L,
    #[value(name = "C", alias = "c")]
    C,
}

impl FamilyArg {
    fn family(self) -> Family {
        match self {
            FamilyArg::L => Family::Linear,
            FamilyArg::C => Family::Cyclic,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum QuiverArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "P", alias = "p")]
    P,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    #[value(name = "FL", alias = "fl")]
    Fl,
    #[value(name = "FC", alias = "fc")]
    Fc,
    #[value(name = "D", alias = "d")]
    D,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Structure,
    Cluster,
    Poisson,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the PBW normal form of an expression in a preset family.
    Nf {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        expr: String,
    },
    /// Mutate a preset quantum seed at one or more vertices and print it.
    Mutate {
        #[arg(long, value_enum)]
        quiver: QuiverArg,
        #[arg(long)]
        n: usize,
        /// Vertex indices, comma separated; applied left to right.
        #[arg(long)]
        at: String,
        #[arg(long)]
        json: bool,
    },
    /// Compute the Poisson bracket of two expressions in a preset table.
    Bracket {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long)]
        n: usize,
        f: String,
        g: String,
    },
    /// Run an identity suite and report pass/fail per check.
    Suite {
        #[arg(long, value_enum)]
        name: SuiteArg,
        #[arg(long)]
        n: usize,
        /// Restrict the structure suite to one family (default: both applicable).
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        #[arg(long)]
        json: bool,
    },
    /// Classify a presentation file up to relabeling and rescaling.
    Classify {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Debug)]
struct CmdOutput {
    code: i32,
    stdout: String,
}

fn ok(stdout: String) -> std::result::Result<CmdOutput, String> {
    Ok(CmdOutput { code: 0, stdout })
}

/// Render an error against its source line, with a caret under the offending
/// byte for parse errors.
fn render_error(src: &str, e: &Error) -> String {
    if let Error::Parse { offset, message } = e {
        let col = (*offset).min(src.len());
        format!("error: {message}\n  {src}\n  {}^", " ".repeat(col))
    } else {
        format!("error: {e}")
    }
}

fn plain(e: Error) -> String {
    format!("error: {e}")
}

fn cmd_nf(family: FamilyArg, n: usize, src: &str) -> std::result::Result<CmdOutput, String> {
    let fam = family.family();
    let p = pbw::preset_family(fam, n).map_err(plain)?;
    let ast = parse(src, Context::Pbw).map_err(|e| render_error(src, &e))?;
    let nf = eval_pbw(&ast, &p, fam).map_err(|e| render_error(src, &e))?;
    ok(format!("{nf}\n"))
}

fn fmt_rows(out: &mut String, label: &str, rows: &[Vec<i64>]) {
    for (i, row) in rows.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "  {label}[{i}] = [{}]", cells.join(", "));
    }
}

fn cmd_mutate(
    quiver: QuiverArg,
    n: usize,
    at: &str,
    json: bool,
) -> std::result::Result<CmdOutput, String> {
    let (mut seed, letter, base) = match quiver {
        QuiverArg::A => (cluster::preset_dynkin_a(n).map_err(plain)?, "x", 1),
        QuiverArg::P => (cluster::preset_p(n).map_err(plain)?, "w", 0),
    };
    let mut ks = Vec::new();
    for part in at.split(',') {
        let k: usize = part
            .trim()
            .parse()
            .map_err(|_| format!("error: invalid vertex index `{}`", part.trim()))?;
        if k >= seed.size() {
            return Err(format!(
                "error: vertex {k} is out of range; the seed has vertices 0..{}",
                seed.size() - 1
            ));
        }
        ks.push(k);
    }
    for &k in &ks {
        seed = cluster::mutate_seed(&seed, k).map_err(plain)?;
    }
    if json {
        let text = serde_json::to_string_pretty(&seed).map_err(|e| format!("error: {e}"))?;
        return ok(format!("{text}\n"));
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "seed after mutation at [{}]:",
        ks.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
    );
    for (i, var) in seed.vars.iter().enumerate() {
        let _ = writeln!(out, "  var[{i}] = {}", var.render_with(letter, base));
    }
    fmt_rows(&mut out, "B", seed.b.rows());
    fmt_rows(&mut out, "Lambda", seed.lambda.rows());
    let _ = writeln!(out, "  d = {}", seed.d);
    ok(out)
}

fn cmd_bracket(
    preset: PresetArg,
    n: usize,
    f_src: &str,
    g_src: &str,
) -> std::result::Result<CmdOutput, String> {
    let (table, vars, letter, base) = match preset {
        PresetArg::Fl => (poisson::preset_fl(n).map_err(plain)?, PoissonVars::X { n }, "x", 1),
        PresetArg::Fc => (poisson::preset_fc(n).map_err(plain)?, PoissonVars::X { n }, "x", 1),
        PresetArg::D => (poisson::preset_d(n).map_err(plain)?, PoissonVars::W { n }, "w", 0),
    };
    let fe = parse(f_src, Context::Poisson).map_err(|e| render_error(f_src, &e))?;
    let f = eval_poisson(&fe, vars).map_err(|e| render_error(f_src, &e))?;
    let ge = parse(g_src, Context::Poisson).map_err(|e| render_error(g_src, &e))?;
    let g = eval_poisson(&ge, vars).map_err(|e| render_error(g_src, &e))?;
    let b = poisson::bracket(&table, &f, &g).map_err(plain)?;
    ok(format!("{}\n", b.render_with(letter, base)))
}

fn gather_suites(
    name: SuiteArg,
    n: usize,
    family: Option<FamilyArg>,
) -> std::result::Result<Vec<Report>, String> {
    let mut reports = Vec::new();
    let cyclic_applicable = n % 2 == 1 && n >= 3;
    match name {
        SuiteArg::Structure => match family {
            Some(f) => reports.push(pbw::suite_structure(f.family(), n).map_err(plain)?),
            None => {
                reports.push(pbw::suite_structure(Family::Linear, n).map_err(plain)?);
                if cyclic_applicable {
                    reports.push(pbw::suite_structure(Family::Cyclic, n).map_err(plain)?);
                }
            }
        },
        SuiteArg::Cluster => reports.push(cluster::suite_cluster(n).map_err(plain)?),
        SuiteArg::Poisson => reports.push(poisson::suite_poisson(n).map_err(plain)?),
        SuiteArg::All => {
            reports.push(pbw::suite_structure(Family::Linear, n).map_err(plain)?);
            if cyclic_applicable {
                reports.push(pbw::suite_structure(Family::Cyclic, n).map_err(plain)?);
                reports.push(cluster::suite_cluster(n).map_err(plain)?);
            }
            reports.push(poisson::suite_poisson(n).map_err(plain)?);
        }
    }
    Ok(reports)
}

fn cmd_suite(
    name: SuiteArg,
    n: usize,
    family: Option<FamilyArg>,
    json: bool,
) -> std::result::Result<CmdOutput, String> {
    let reports = gather_suites(name, n, family)?;
    let all_passed = reports.iter().all(Report::passed);
    let code = i32::from(!all_passed);
    if json {
        let text = serde_json::to_string_pretty(&reports).map_err(|e| format!("error: {e}"))?;
        return Ok(CmdOutput { code, stdout: format!("{text}\n") });
    }
    let mut out = String::new();
    for rep in &reports {
        let failed = rep.failures().count();
        let total = rep.checks.len();
        let _ = writeln!(out, "{}: {}/{} checks passed", rep.suite, total - failed, total);
        for c in rep.failures() {
            let _ = writeln!(
                out,
                "  FAIL {} ({}): {}",
                c.id,
                c.tag,
                c.witness.as_deref().unwrap_or("no witness")
            );
        }
    }
    Ok(CmdOutput { code, stdout: out })
}

fn cmd_classify(file: &PathBuf) -> std::result::Result<CmdOutput, String> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("error: cannot read {}: {e}", file.display()))?;
    let p: Presentation = serde_json::from_str(&text)
        .map_err(|e| format!("error: {} is not a valid presentation: {e}", file.display()))?;
    let result = pbw::classify(&p).map_err(plain)?;
    let rendered = serde_json::to_string_pretty(&result).map_err(|e| format!("error: {e}"))?;
    ok(format!("{rendered}\n"))
}

fn execute(cli: Cli) -> std::result::Result<CmdOutput, String> {
    match cli.cmd {
        Cmd::Nf { family, n, expr } => cmd_nf(family, n, &expr),
        Cmd::Mutate { quiver, n, at, json } => cmd_mutate(quiver, n, &at, json),
        Cmd::Bracket { preset, n, f, g } => cmd_bracket(preset, n, &f, &g),
        Cmd::Suite { name, n, family, json } => cmd_suite(name, n, family, json),
        Cmd::Classify { file } => cmd_classify(&file),
    }
}

/// Run the command line; returns the process exit code. Failed checks exit
/// 1, operational errors (parse, io, invalid arguments) exit 2.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(msg) => {
            eprintln!("{msg}");
            2
        }
    }
}
