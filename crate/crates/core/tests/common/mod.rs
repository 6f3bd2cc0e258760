#![allow(dead_code)]

use e4frame::curvespec::{parse_curve, BinOp, Constant, CurveSpec, Expr, Func, Interval};
use e4frame::frame::{Flavor, FrameSample, Vec4};
use e4frame::jet::Rational;
use e4frame::pipeline::Analysis;
use e4frame::ptframe::{synthesize_curve, KProfile};
use astro_float::{BigFloat, Consts, RoundingMode};
use rand::Rng;

/// Straight f64 evaluation with the library's domain rules.
pub fn plain_eval(e: &Expr, s: f64) -> Option<f64> {
    let v = match e {
        Expr::Num(c) => *c,
        Expr::Param => s,
        Expr::Const(Constant::Pi) => std::f64::consts::PI,
        Expr::Const(Constant::E) => std::f64::consts::E,
        Expr::Neg(a) => -plain_eval(a, s)?,
        Expr::Binary(op, a, b) => {
            let (a, b) = (plain_eval(a, s)?, plain_eval(b, s)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div if b == 0.0 => return None,
                BinOp::Div => a / b,
            }
        }
        Expr::Pow(a, r) => {
            let x = plain_eval(a, s)?;
            if r.den == 1 {
                if r.num < 0 && x == 0.0 {
                    return None;
                }
                x.powi(r.num as i32)
            } else {
                if x <= 0.0 {
                    return None;
                }
                x.powf(r.num as f64 / r.den as f64)
            }
        }
        Expr::Call(f, a) => {
            let x = plain_eval(a, s)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan if x.cos().abs() < 1e-12 => return None,
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log if x <= 0.0 => return None,
                Func::Log => x.ln(),
                Func::Sqrt if x <= 0.0 => return None,
                Func::Sqrt => x.sqrt(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
            }
        }
    };
    v.is_finite().then_some(v)
}

/// Every subexpression stays below `bound` in size and below `slope` in
/// difference quotient on a grid of spacing `dt` over [lo, hi].
pub fn resolved_on(e: &Expr, lo: f64, hi: f64, dt: f64, bound: f64, slope: f64) -> bool {
    let n = ((hi - lo) / dt).round() as usize;
    let mut prev: Option<f64> = None;
    for i in 0..=n {
        let Some(v) = plain_eval(e, lo + dt * i as f64) else { return false };
        if v.abs() >= bound || prev.is_some_and(|p| (v - p).abs() > slope * dt) {
            return false;
        }
        prev = Some(v);
    }
    // arguments that must stay clear of a singular or branch point
    let guarded: Option<(&Expr, fn(f64) -> f64)> = match e {
        Expr::Pow(a, r) if r.den != 1 => Some((a, |v| v)),
        Expr::Pow(a, r) if r.num < 0 => Some((a, f64::abs)),
        Expr::Binary(BinOp::Div, _, b) => Some((b, f64::abs)),
        Expr::Call(Func::Sqrt | Func::Log, a) => Some((a, |v| v)),
        Expr::Call(Func::Tan, a) => Some((a, |v| v.cos().abs())),
        _ => None,
    };
    if let Some((a, margin)) = guarded {
        let n = ((hi - lo) / dt).round() as usize;
        if (0..=n).any(|i| plain_eval(a, lo + dt * i as f64).is_none_or(|v| margin(v) < 0.05)) {
            return false;
        }
    }
    match e {
        Expr::Num(_) | Expr::Param | Expr::Const(_) => true,
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => resolved_on(a, lo, hi, dt, bound, slope),
        Expr::Binary(_, a, b) => resolved_on(a, lo, hi, dt, bound, slope) && resolved_on(b, lo, hi, dt, bound, slope),
    }
}

const PREC: usize = 256;
const RM: RoundingMode = RoundingMode::None;

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

/// Evaluation in 256-bit floating point, same domain rules as [`plain_eval`].
fn wide_eval(e: &Expr, s: &BigFloat, cc: &mut Consts) -> Option<BigFloat> {
    let v = match e {
        Expr::Num(c) => big(*c),
        Expr::Param => s.clone(),
        Expr::Const(c) => big(c.value()),
        Expr::Neg(a) => wide_eval(a, s, cc)?.neg(),
        Expr::Binary(op, a, b) => {
            let (a, b) = (wide_eval(a, s, cc)?, wide_eval(b, s, cc)?);
            match op {
                BinOp::Add => a.add(&b, PREC, RM),
                BinOp::Sub => a.sub(&b, PREC, RM),
                BinOp::Mul => a.mul(&b, PREC, RM),
                BinOp::Div if b.is_zero() => return None,
                BinOp::Div => a.div(&b, PREC, RM),
            }
        }
        Expr::Pow(a, r) => {
            let x = wide_eval(a, s, cc)?;
            if r.den == 1 {
                if r.num < 0 && x.is_zero() {
                    return None;
                }
                let m = x.powi(r.num.unsigned_abs() as usize, PREC, RM);
                if r.num < 0 { big(1.0).div(&m, PREC, RM) } else { m }
            } else {
                if !x.is_positive() || x.is_zero() {
                    return None;
                }
                let p = big(r.num as f64).div(&big(r.den as f64), PREC, RM);
                x.pow(&p, PREC, RM, cc)
            }
        }
        Expr::Call(f, a) => {
            let x = wide_eval(a, s, cc)?;
            match f {
                Func::Sin => x.sin(PREC, RM, cc),
                Func::Cos => x.cos(PREC, RM, cc),
                Func::Tan => x.tan(PREC, RM, cc),
                Func::Exp => x.exp(PREC, RM, cc),
                Func::Log | Func::Sqrt if !x.is_positive() || x.is_zero() => return None,
                Func::Log => x.ln(PREC, RM, cc),
                Func::Sqrt => x.sqrt(PREC, RM),
                Func::Sinh => x.sinh(PREC, RM, cc),
                Func::Cosh => x.cosh(PREC, RM, cc),
            }
        }
    };
    (!v.is_nan() && !v.is_inf()).then_some(v)
}

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap()
}

/// Central difference of order `k` (1..=4) with step `h`; error is even in h.
fn central(f: &mut dyn FnMut(&BigFloat) -> Option<BigFloat>, x: f64, h: f64, k: usize) -> Option<BigFloat> {
    let (weights, denom): (&[(f64, f64)], f64) = match k {
        1 => (&[(1.0, 1.0), (-1.0, -1.0)], 2.0 * h),
        2 => (&[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)], h * h),
        3 => (&[(2.0, 1.0), (1.0, -2.0), (-1.0, 2.0), (-2.0, -1.0)], 2.0 * h.powi(3)),
        4 => (&[(2.0, 1.0), (1.0, -4.0), (0.0, 6.0), (-1.0, -4.0), (-2.0, 1.0)], h.powi(4)),
        _ => unreachable!(),
    };
    let mut acc = big(0.0);
    for &(m, w) in weights {
        let t = big(x).add(&big(m * h), PREC, RM);
        acc = acc.add(&f(&t)?.mul(&big(w), PREC, RM), PREC, RM);
    }
    Some(acc.div(&big(denom), PREC, RM))
}

/// Richardson tableau over central differences, base step `h0`, `levels` halvings.
fn richardson(f: &mut dyn FnMut(&BigFloat) -> Option<BigFloat>, x: f64, k: usize, h0: f64, levels: usize) -> Option<f64> {
    let mut prev: Vec<BigFloat> = Vec::new();
    for i in 0..=levels {
        let mut row = vec![central(f, x, h0 / 2f64.powi(i as i32), k)?];
        for m in 1..=i {
            let diff = row[m - 1].sub(&prev[m - 1], PREC, RM);
            let step = diff.div(&big(4f64.powi(m as i32) - 1.0), PREC, RM);
            row.push(row[m - 1].add(&step, PREC, RM));
        }
        prev = row;
    }
    prev.last().map(to_f64)
}

/// Derivatives 1..=4 of `e` at `x` by finite differences in extended precision.
pub fn fd_derivatives(e: &Expr, x: f64) -> Option<[f64; 4]> {
    let mut cc = Consts::new().unwrap();
    let mut f = |t: &BigFloat| wide_eval(e, t, &mut cc);
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = richardson(&mut f, x, k + 1, FD_STEP, 4)?;
    }
    Some(out)
}

/// Base step of the finite-difference oracle; stencils reach 2·FD_STEP.
pub const FD_STEP: f64 = 0.05;

fn random_leaf<R: Rng>(rng: &mut R) -> Expr {
    match rng.gen_range(0..6) {
        0 | 1 | 2 => Expr::Param,
        3 => Expr::Const(if rng.gen() { Constant::Pi } else { Constant::E }),
        _ => Expr::Num(rng.gen_range(1..40) as f64 / 8.0),
    }
}

/// Random expression tree in s of the given depth.
pub fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 {
        return random_leaf(rng);
    }
    match rng.gen_range(0..10) {
        0..=3 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][rng.gen_range(0..4)];
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
        4..=6 => Expr::call(Func::ALL[rng.gen_range(0..8)], random_expr(rng, depth - 1)),
        7 => {
            let (num, den) = [(2, 1), (3, 1), (-1, 1), (-2, 1), (1, 2), (3, 2), (-1, 3), (5, 4)][rng.gen_range(0..8)];
            Expr::Pow(Box::new(random_expr(rng, depth - 1)), Rational::new(num, den).unwrap())
        }
        8 => Expr::Neg(Box::new(random_expr(rng, depth - 1))),
        _ => random_leaf(rng),
    }
}

/// Expression and point where the expression is smooth enough for a
/// finite-difference check: across the oracle's stencil every intermediate value is
/// defined, moderate in size and slowly varying relative to the stencil, and
/// poles and branch points stay out of reach.
pub fn random_checkable<R: Rng>(rng: &mut R) -> (Expr, f64) {
    loop {
        let depth = rng.gen_range(1..=4);
        let e = random_expr(rng, depth);
        let x = rng.gen_range(-1.0..1.0);
        if resolved_on(&e, x - 2.0 * FD_STEP, x + 2.0 * FD_STEP, 1e-3, 1e3, 20.0) {
            return (e, x);
        }
    }
}

/// Σ a sin(m s) + b cos(m s), m = 1..3, per coordinate, on [0, 2].
pub fn random_trig_curve<R: Rng>(rng: &mut R) -> CurveSpec {
    let coords: Vec<String> = (0..4)
        .map(|_| {
            (1..=3)
                .map(|m| {
                    let a: f64 = rng.gen_range(-1.0..1.0);
                    let b: f64 = rng.gen_range(-1.0..1.0);
                    format!("({a:.6})*sin({m}*s) + ({b:.6})*cos({m}*s)")
                })
                .collect::<Vec<_>>()
                .join(" + ")
        })
        .collect();
    parse_curve(&coords.join(", "), Interval::new(0.0, 2.0).unwrap()).unwrap()
}

/// Curve built from a k-profile on [0, len], identity start frame.
pub fn synthesized(profile: &str, len: f64, step: f64, origin: impl Fn(&FrameSample) -> Vec4) -> Analysis {
    let n = (len / step).round() as usize + 1;
    let prof = KProfile::parse(profile, Interval::new(0.0, len).unwrap()).unwrap();
    let frame0 = FrameSample::identity(0.0, Flavor::ParallelTransport);
    let (samp, frames) = synthesize_curve(&prof, &frame0, origin(&frame0), step, n).unwrap();
    Analysis::from_transported(samp, frames).unwrap()
}

/// k₂ + k₃ = 2, started at −½(M₂ + M₃) so that α ⟂ M₁.
pub fn rectifying_curve() -> Analysis {
    synthesized("0.3, 1+sin(s), 1-sin(s)", 5.0, 1e-3, |f| -(f.vectors[2] + f.vectors[3]) * 0.5)
}

/// k₁ + k₃ = 2, started at −½(M₁ + M₃) so that α ⟂ M₂.
pub fn osculating_curve() -> Analysis {
    synthesized("1+0.5*sin(s), 0.3, 1-0.5*sin(s)", 5.0, 1e-3, |f| -(f.vectors[1] + f.vectors[3]) * 0.5)
}

/// a·k + 1 = 0 with a = (−1/2, 1/2, −1): k = −a/|a|² + sin(s)(1, 1, 0) + cos(2s)/2 (1, −1, −1).
pub fn spherical_curve() -> Analysis {
    synthesized(
        "1/3+sin(s)+0.5*cos(2*s), -1/3+sin(s)-0.5*cos(2*s), 2/3-0.5*cos(2*s)",
        5.0,
        1e-3,
        |_| Vec4::new(0.3, -0.2, 0.1, 0.7),
    )
}
