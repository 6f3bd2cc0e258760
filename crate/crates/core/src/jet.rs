//! Truncated derivative arithmetic through order four.
//!
//! A [`Jet`] stores the value of a quantity together with its first four
//! derivatives with respect to the curve parameter (raw derivatives, not
//! Taylor coefficients). Products follow the Leibniz rule and elementary
//! functions are lifted through the Faà di Bruno formula, so every composite
//! expression carries exact derivatives up to rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::Vector4;

use crate::error::{Error, FuncTag, Result};

/// Number of stored entries: value plus four derivatives.
pub const JET_LEN: usize = 5;

const BINOM: [[f64; JET_LEN]; JET_LEN] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub d: [f64; JET_LEN],
}

impl Jet {
    pub const fn new(d: [f64; JET_LEN]) -> Self {
        Jet { d }
    }

    pub const fn constant(c: f64) -> Self {
        Jet {
            d: [c, 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// The independent variable evaluated at `s0`.
    pub const fn variable(s0: f64) -> Self {
        Jet {
            d: [s0, 1.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn value(&self) -> f64 {
        self.d[0]
    }

    pub fn is_finite(&self) -> bool {
        self.d.iter().all(|x| x.is_finite())
    }

    /// Jet of the derivative. The top entry is unknown and set to zero, so
    /// only orders 0..3 of the result are meaningful.
    pub fn derivative(&self) -> Jet {
        Jet {
            d: [self.d[1], self.d[2], self.d[3], self.d[4], 0.0],
        }
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet {
            d: self.d.map(|x| x * k),
        }
    }

    pub fn apply(&self, f: UnaryFn) -> Result<Jet> {
        jet_apply(f, *self)
    }
}

impl Default for Jet {
    fn default() -> Self {
        Jet::constant(0.0)
    }
}

/// Leibniz product through order four.
pub fn jet_mul(a: Jet, b: Jet) -> Jet {
    let mut out = [0.0; JET_LEN];
    for (n, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=n {
            acc += BINOM[n][i] * a.d[i] * b.d[n - i];
        }
        *slot = acc;
    }
    Jet { d: out }
}

/// Quotient through order four, solved order by order from `a = q·b`.
pub fn jet_div(a: Jet, b: Jet) -> Result<Jet> {
    let r = UnaryFn::Recip.derivs(b.d[0])?[0];
    let mut q = [0.0; JET_LEN];
    for n in 0..JET_LEN {
        let mut acc = a.d[n];
        for i in 1..=n {
            acc -= BINOM[n][i] * b.d[i] * q[n - i];
        }
        q[n] = acc * r;
    }
    Ok(Jet { d: q })
}

/// Exponent of a power node. Always stored in lowest terms with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Some(Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryFn {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Neg,
    Recip,
    Pow(Rational),
}

impl UnaryFn {
    pub fn tag(self) -> FuncTag {
        match self {
            UnaryFn::Sin => FuncTag::Sin,
            UnaryFn::Cos => FuncTag::Cos,
            UnaryFn::Tan => FuncTag::Tan,
            UnaryFn::Exp => FuncTag::Exp,
            UnaryFn::Log => FuncTag::Log,
            UnaryFn::Sqrt => FuncTag::Sqrt,
            UnaryFn::Sinh => FuncTag::Sinh,
            UnaryFn::Cosh => FuncTag::Cosh,
            UnaryFn::Neg => FuncTag::Neg,
            UnaryFn::Recip => FuncTag::Recip,
            UnaryFn::Pow(_) => FuncTag::Pow,
        }
    }

    /// Value and first four derivatives of the function at `x`.
    fn derivs(self, x: f64) -> Result<[f64; JET_LEN]> {
        let domain = || Error::Domain {
            func: self.tag(),
            value: x,
        };
        if !x.is_finite() {
            return Err(domain());
        }
        let out = match self {
            UnaryFn::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c, s]
            }
            UnaryFn::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s, c]
            }
            UnaryFn::Tan => {
                if x.cos().abs() < 1e-12 {
                    return Err(domain());
                }
                let t = x.tan();
                let u = 1.0 + t * t;
                [
                    t,
                    u,
                    2.0 * t * u,
                    2.0 * u * u + 4.0 * t * t * u,
                    16.0 * t * u * u + 8.0 * t * t * t * u,
                ]
            }
            UnaryFn::Exp => {
                let e = x.exp();
                [e; JET_LEN]
            }
            UnaryFn::Log => {
                if x <= 0.0 {
                    return Err(domain());
                }
                let r = 1.0 / x;
                [x.ln(), r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]
            }
            UnaryFn::Sqrt => {
                if x <= 0.0 {
                    return Err(domain());
                }
                power_derivs(x, 0.5)
            }
            UnaryFn::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c, s]
            }
            UnaryFn::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s, c]
            }
            UnaryFn::Neg => [-x, -1.0, 0.0, 0.0, 0.0],
            UnaryFn::Recip => {
                if x == 0.0 {
                    return Err(domain());
                }
                let r = 1.0 / x;
                let r2 = r * r;
                [r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2, 24.0 * r2 * r2 * r]
            }
            UnaryFn::Pow(p) => {
                if p.is_integer() {
                    if p.num < 0 && x == 0.0 {
                        return Err(domain());
                    }
                    integer_power_derivs(x, p.num)
                } else {
                    if x <= 0.0 {
                        return Err(domain());
                    }
                    power_derivs(x, p.to_f64())
                }
            }
        };
        Ok(out)
    }
}

fn power_derivs(x: f64, p: f64) -> [f64; JET_LEN] {
    let mut out = [0.0; JET_LEN];
    let mut coeff = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = coeff * x.powf(p - k as f64);
        coeff *= p - k as f64;
    }
    out
}

fn integer_power_derivs(x: f64, p: i64) -> [f64; JET_LEN] {
    let mut out = [0.0; JET_LEN];
    let mut coeff = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if coeff == 0.0 {
            break;
        }
        *slot = coeff * x.powi((p - k as i64) as i32);
        coeff *= (p - k as i64) as f64;
    }
    out
}

/// Chain rule through order four: derivatives of `f(a(s))`.
pub fn jet_apply(f: UnaryFn, a: Jet) -> Result<Jet> {
    let fd = f.derivs(a.d[0])?;
    let [_, a1, a2, a3, a4] = a.d;
    let a1s = a1 * a1;
    Ok(Jet {
        d: [
            fd[0],
            fd[1] * a1,
            fd[2] * a1s + fd[1] * a2,
            fd[3] * a1s * a1 + 3.0 * fd[2] * a1 * a2 + fd[1] * a3,
            fd[4] * a1s * a1s
                + 6.0 * fd[3] * a1s * a2
                + fd[2] * (3.0 * a2 * a2 + 4.0 * a1 * a3)
                + fd[1] * a4,
        ],
    })
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut d = self.d;
        for (x, y) in d.iter_mut().zip(rhs.d) {
            *x += y;
        }
        Jet { d }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut d = self.d;
        for (x, y) in d.iter_mut().zip(rhs.d) {
            *x -= y;
        }
        Jet { d }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        jet_mul(self, rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Div for Jet {
    type Output = Result<Jet>;
    fn div(self, rhs: Jet) -> Result<Jet> {
        jet_div(self, rhs)
    }
}

/// A point of E⁴ together with its parameter derivatives, one jet per coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JetVec4 {
    pub components: [Jet; 4],
}

impl JetVec4 {
    pub fn new(components: [Jet; 4]) -> Self {
        JetVec4 { components }
    }

    /// The `n`-th derivative of the point as a plain vector.
    pub fn derivative(&self, n: usize) -> Vector4<f64> {
        Vector4::from_fn(|i, _| self.components[i].d[n])
    }

    pub fn from_derivatives(derivs: [Vector4<f64>; JET_LEN]) -> Self {
        let components = std::array::from_fn(|i| Jet {
            d: std::array::from_fn(|n| derivs[n][i]),
        });
        JetVec4 { components }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(Jet::is_finite)
    }

    /// Inner product ⟨v, w⟩ lifted to jets.
    pub fn dot(&self, other: &JetVec4) -> Jet {
        self.components
            .iter()
            .zip(&other.components)
            .fold(Jet::constant(0.0), |acc, (a, b)| acc + jet_mul(*a, *b))
    }

    /// Componentwise derivative; see [`Jet::derivative`] for the lost top order.
    pub fn derivative_jet(&self) -> JetVec4 {
        JetVec4 {
            components: self.components.map(|c| c.derivative()),
        }
    }

    pub fn scale_by(&self, k: Jet) -> JetVec4 {
        JetVec4 {
            components: self.components.map(|c| jet_mul(c, k)),
        }
    }
}

/// Euclidean norm as a jet. Fails when the vector vanishes at the evaluation point.
pub fn jet_vec_norm(v: &JetVec4) -> Result<Jet> {
    let sq = v.dot(v);
    if sq.d[0] <= 0.0 {
        return Err(Error::Domain {
            func: FuncTag::Sqrt,
            value: sq.d[0],
        });
    }
    jet_apply(UnaryFn::Sqrt, sq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Jet, b: [f64; 5], tol: f64) {
        for (x, y) in a.d.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{:?} vs {:?}", a.d, b);
        }
    }

    #[test]
    fn square_of_parameter() {
        let s = Jet::variable(2.0);
        close(&jet_mul(s, s), [4.0, 4.0, 2.0, 0.0, 0.0], 0.0);
    }

    #[test]
    fn unit_is_identity() {
        let a = Jet::new([1.5, -2.0, 0.25, 3.0, -7.0]);
        assert_eq!(jet_mul(a, Jet::constant(1.0)), a);
    }

    #[test]
    fn sin_times_cos() {
        // d^n/ds^n of sin(2s)/2 at 0 is 2^(n-1) sin(n pi/2)
        let oracle: [f64; 5] = std::array::from_fn(|n| {
            if n == 0 {
                0.0
            } else {
                2f64.powi(n as i32 - 1) * (n as f64 * std::f64::consts::FRAC_PI_2).sin()
            }
        });
        let p = jet_mul(
            Jet::new([0.0, 1.0, 0.0, -1.0, 0.0]),
            Jet::new([1.0, 0.0, -1.0, 0.0, 1.0]),
        );
        close(&p, oracle, 1e-14);
        close(&p, [0.0, 1.0, 0.0, -4.0, 0.0], 1e-15);
    }

    #[test]
    fn quotient_near_zero() {
        let s = Jet::variable(-1e-4);
        close(&jet_div(s, s).unwrap(), [1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        let q = jet_div(Jet::constant(1.0), Jet::variable(2.0)).unwrap();
        close(&q, [0.5, -0.25, 0.25, -0.375, 0.75], 1e-15);
        assert!(jet_div(s, Jet::constant(0.0)).is_err());
    }

    #[test]
    fn sin_of_parameter() {
        let r = jet_apply(UnaryFn::Sin, Jet::variable(0.0)).unwrap();
        close(&r, [0.0, 1.0, 0.0, -1.0, 0.0], 0.0);
    }

    #[test]
    fn sin_of_double_parameter() {
        let r = jet_apply(UnaryFn::Sin, Jet::new([0.0, 2.0, 0.0, 0.0, 0.0])).unwrap();
        close(&r, [0.0, 2.0, 0.0, -8.0, 0.0], 1e-15);
    }

    #[test]
    fn sqrt_of_square() {
        let r = jet_apply(UnaryFn::Sqrt, Jet::new([4.0, 4.0, 2.0, 0.0, 0.0])).unwrap();
        close(&r, [2.0, 1.0, 0.0, 0.0, 0.0], 1e-15);
    }

    #[test]
    fn tan_against_sin_over_cos() {
        let a = Jet::new([0.3, 1.2, -0.4, 0.7, 0.1]);
        let t = jet_apply(UnaryFn::Tan, a).unwrap();
        let q = (jet_apply(UnaryFn::Sin, a).unwrap() / jet_apply(UnaryFn::Cos, a).unwrap()).unwrap();
        close(&t, q.d, 1e-12);
    }

    #[test]
    fn rational_power_matches_sqrt() {
        let a = Jet::new([2.5, 1.0, 0.3, -0.2, 0.05]);
        let p = jet_apply(UnaryFn::Pow(Rational::new(1, 2).unwrap()), a).unwrap();
        let q = jet_apply(UnaryFn::Sqrt, a).unwrap();
        close(&p, q.d, 1e-13);
    }

    #[test]
    fn integer_power_at_zero() {
        let p = jet_apply(UnaryFn::Pow(Rational::integer(2)), Jet::variable(0.0)).unwrap();
        close(&p, [0.0, 0.0, 2.0, 0.0, 0.0], 0.0);
        let cube = jet_apply(UnaryFn::Pow(Rational::integer(3)), Jet::variable(-1.0)).unwrap();
        close(&cube, [-1.0, 3.0, -6.0, 6.0, 0.0], 1e-15);
    }

    #[test]
    fn domain_errors() {
        for (f, x) in [
            (UnaryFn::Log, 0.0),
            (UnaryFn::Sqrt, -1.0),
            (UnaryFn::Recip, 0.0),
            (UnaryFn::Pow(Rational::new(1, 3).unwrap()), -2.0),
            (UnaryFn::Pow(Rational::integer(-1)), 0.0),
        ] {
            match jet_apply(f, Jet::constant(x)) {
                Err(Error::Domain { func, value }) => {
                    assert_eq!(func, f.tag());
                    assert_eq!(value, x);
                }
                other => panic!("expected domain error, got {other:?}"),
            }
        }
    }

    #[test]
    fn norm_of_constant_axis() {
        let v = JetVec4::new([
            Jet::constant(1.0),
            Jet::constant(0.0),
            Jet::constant(0.0),
            Jet::constant(0.0),
        ]);
        close(&jet_vec_norm(&v).unwrap(), [1.0, 0.0, 0.0, 0.0, 0.0], 0.0);
        assert!(jet_vec_norm(&JetVec4::default()).is_err());
    }

    #[test]
    fn rational_normalizes() {
        assert_eq!(Rational::new(2, -4).unwrap(), Rational { num: -1, den: 2 });
        assert!(Rational::new(1, 0).is_none());
    }
}
