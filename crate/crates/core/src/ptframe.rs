//! Parallel transport frame {T, M₁, M₂, M₃}.
//!
//! The normals are relatively parallel: Mᵢ′ = −kᵢ T with kᵢ = ⟨T′, Mᵢ⟩.
//! Two propagators are provided, classical RK4 with per-step
//! re-orthonormalization and the discrete double-reflection scheme, plus the
//! inverse problem of building a curve from prescribed k₁, k₂, k₃.

use serde::Serialize;

use crate::curvespec::{parse_expr_list, Expr, Interval, PROBE_POINTS};
use crate::error::{Error, Result};
use crate::frame::{complete_basis, reorthonormalize_all, reorthonormalize_normals, Flavor, FrameSample, Vec4};
use crate::frenet::FrenetPoint;
use crate::jet::JetVec4;
use crate::sampling::CurveSampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rk4,
    DoubleReflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtCurvatures {
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl PtCurvatures {
    pub fn as_array(&self) -> [f64; 3] {
        [self.k1, self.k2, self.k3]
    }

    pub fn norm(&self) -> f64 {
        (self.k1 * self.k1 + self.k2 * self.k2 + self.k3 * self.k3).sqrt()
    }
}

/// Prescribed k₁(s), k₂(s), k₃(s).
#[derive(Debug, Clone, PartialEq)]
pub struct KProfile {
    pub exprs: [Expr; 3],
    pub domain: Interval,
}

impl KProfile {
    pub fn new(exprs: [Expr; 3], domain: Interval) -> Result<Self> {
        for t in domain.grid(PROBE_POINTS) {
            for (coord, e) in exprs.iter().enumerate() {
                match e.eval_jet(t) {
                    Ok(j) if j.is_finite() => {}
                    _ => return Err(Error::DomainProbe { coord, t }),
                }
            }
        }
        Ok(KProfile { exprs, domain })
    }

    /// Parse `"k1, k2, k3"`.
    pub fn parse(text: &str, domain: Interval) -> Result<Self> {
        let list = parse_expr_list(text)?;
        let count = list.len();
        let exprs: [Expr; 3] = list.try_into().map_err(|_| Error::Arity {
            offset: text.len(),
            message: format!("a k-profile needs 3 expressions, found {count}"),
        })?;
        KProfile::new(exprs, domain)
    }

    fn check(&self, s: f64) -> Result<()> {
        let slack = 1e-9 * self.domain.max.abs().max(1.0);
        if s < self.domain.min - slack || s > self.domain.max + slack {
            return Err(Error::ProfileDomain {
                s,
                min: self.domain.min,
                max: self.domain.max,
            });
        }
        Ok(())
    }

    pub fn values(&self, s: f64) -> Result<[f64; 3]> {
        self.check(s)?;
        let mut out = [0.0; 3];
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            *o = e.eval(s)?;
        }
        Ok(out)
    }

    /// k and its first two derivatives, `[k, k', k'']` per component.
    fn jets(&self, s: f64) -> Result<[[f64; 3]; 3]> {
        self.check(s)?;
        let mut out = [[0.0; 3]; 3];
        for (o, e) in out.iter_mut().zip(&self.exprs) {
            let j = e.eval_jet(s)?;
            *o = [j.d[0], j.d[1], j.d[2]];
        }
        Ok(out)
    }
}

/// Starting frame at tangent `t0`.
///
/// With a Frenet hint the normals are copied from it, so all Euler angles
/// start at zero. Otherwise `t0` is completed over the standard basis.
pub fn init_pt_frame(s: f64, t0: Vec4, hint: Option<&FrameSample>) -> Result<FrameSample> {
    let norm = t0.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit { norm });
    }
    let vectors = match hint {
        Some(h) => {
            let deviation = (h.tangent() - t0).amax();
            if deviation > 1e-9 {
                return Err(Error::HintMismatch { deviation });
            }
            [t0, h.vectors[1], h.vectors[2], h.vectors[3]]
        }
        None => complete_basis(&[t0]),
    };
    Ok(FrameSample::new(s, vectors, Flavor::ParallelTransport))
}

/// Default start for a sampled curve: the Frenet frame at the first sample
/// when it exists, T and N completed over the standard basis when only κ is
/// defined there, and a plain completion of T otherwise.
pub fn initial_frame(samp: &CurveSampling, first: &FrenetPoint) -> Result<FrameSample> {
    let t0 = samp.tangent(0).normalize();
    let s0 = samp.arclens[0];
    match (&first.frame, first.normal) {
        (Some(f), _) => init_pt_frame(s0, t0, Some(f)),
        (None, Some(n)) => {
            let hint = FrameSample::new(s0, complete_basis(&[t0, n]), Flavor::Frenet);
            init_pt_frame(s0, t0, Some(&hint))
        }
        (None, None) => init_pt_frame(s0, t0, None),
    }
}

type Normals = [Vec4; 3];

/// Mᵢ′ = −⟨α″, Mᵢ⟩ T
fn transport_rhs(m: &Normals, t: &Vec4, accel: &Vec4) -> Normals {
    m.map(|mi| -t * accel.dot(&mi))
}

fn axpy(m: &Normals, k: &Normals, h: f64) -> Normals {
    std::array::from_fn(|i| m[i] + k[i] * h)
}

/// Midpoint value of the quintic Hermite interpolant through (f, f′, f″) at both ends.
pub(crate) fn hermite_mid(f0: [Vec4; 3], f1: [Vec4; 3], h: f64) -> Vec4 {
    (f0[0] + f1[0]) * 0.5 + (f0[1] - f1[1]) * (5.0 * h / 32.0) + (f0[2] + f1[2]) * (h * h / 64.0)
}

fn rk4_step(samp: &CurveSampling, j: usize, m: &Normals, h: f64) -> Normals {
    let d = |k: usize, n: usize| samp.s_derivative(k, n);
    let (t0, a0) = (d(j, 1), d(j, 2));
    let (t1, a1) = (d(j + 1, 1), d(j + 1, 2));
    let tm = hermite_mid([t0, a0, d(j, 3)], [t1, a1, d(j + 1, 3)], h);
    let am = hermite_mid([a0, d(j, 3), d(j, 4)], [a1, d(j + 1, 3), d(j + 1, 4)], h);

    let k1 = transport_rhs(m, &t0, &a0);
    let k2 = transport_rhs(&axpy(m, &k1, h / 2.0), &tm, &am);
    let k3 = transport_rhs(&axpy(m, &k2, h / 2.0), &tm, &am);
    let k4 = transport_rhs(&axpy(m, &k3, h), &t1, &a1);
    std::array::from_fn(|i| m[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0))
}

fn reflect(u: &Vec4, normal: &Vec4, normal_sq: f64) -> Vec4 {
    u - normal * (2.0 * normal.dot(u) / normal_sq)
}

fn double_reflection_step(samp: &CurveSampling, j: usize, m: &Normals) -> Result<Normals> {
    let v1 = samp.position(j + 1) - samp.position(j);
    let c1 = v1.norm_squared();
    if c1 == 0.0 {
        return Err(Error::ZeroStep {
            s: samp.arclens[j],
        });
    }
    let t_l = reflect(&samp.tangent(j), &v1, c1);
    let m_l = m.map(|mi| reflect(&mi, &v1, c1));
    let v2 = samp.tangent(j + 1) - t_l;
    let c2 = v2.norm_squared();
    if c2 < 1e-300 {
        return Ok(m_l);
    }
    Ok(m_l.map(|mi| reflect(&mi, &v2, c2)))
}

/// Transport `frame0` along the whole sampling. Tangent rows are taken from
/// the sampling; only the normals are integrated and re-orthonormalized.
pub fn propagate_pt(
    samp: &CurveSampling,
    frame0: &FrameSample,
    method: Method,
) -> Result<Vec<FrameSample>> {
    if !samp.has_arclength_jets() {
        return Err(Error::MismatchedSeries("sampling lacks arclength jets".into()));
    }
    let deviation = (frame0.tangent() - samp.tangent(0)).amax();
    if deviation > 1e-8 {
        return Err(Error::HintMismatch { deviation });
    }
    let mut out = Vec::with_capacity(samp.len());
    let mut m = frame0.normals();
    reorthonormalize_normals(&samp.tangent(0), &mut m);
    out.push(FrameSample::new(
        samp.arclens[0],
        [samp.tangent(0), m[0], m[1], m[2]],
        Flavor::ParallelTransport,
    ));
    for j in 0..samp.len() - 1 {
        let h = samp.arclens[j + 1] - samp.arclens[j];
        if h <= 0.0 {
            return Err(Error::ZeroStep {
                s: samp.arclens[j],
            });
        }
        m = match method {
            Method::Rk4 => rk4_step(samp, j, &m, h),
            Method::DoubleReflection => double_reflection_step(samp, j, &m)?,
        };
        let t = samp.tangent(j + 1);
        reorthonormalize_normals(&t, &mut m);
        out.push(FrameSample::new(
            samp.arclens[j + 1],
            [t, m[0], m[1], m[2]],
            Flavor::ParallelTransport,
        ));
    }
    Ok(out)
}

/// kᵢ = ⟨α″, Mᵢ⟩ at every sample.
pub fn pt_curvatures(samp: &CurveSampling, frames: &[FrameSample]) -> Result<Vec<PtCurvatures>> {
    if frames.len() != samp.len() || !samp.has_arclength_jets() {
        return Err(Error::MismatchedSeries(format!(
            "{} frames for {} samples",
            frames.len(),
            samp.len()
        )));
    }
    frames
        .iter()
        .enumerate()
        .map(|(j, f)| {
            if f.s != samp.arclens[j] {
                return Err(Error::MismatchedSeries(format!(
                    "frame at s = {} paired with sample at s = {}",
                    f.s, samp.arclens[j]
                )));
            }
            let a = samp.s_derivative(j, 2);
            Ok(PtCurvatures {
                s: f.s,
                k1: a.dot(&f.vectors[1]),
                k2: a.dot(&f.vectors[2]),
                k3: a.dot(&f.vectors[3]),
            })
        })
        .collect()
}

/// Position, T, M₁, M₂, M₃.
type SynthState = [Vec4; 5];

fn synth_rhs(y: &SynthState, k: [f64; 3]) -> SynthState {
    let [_, t, m1, m2, m3] = *y;
    [
        t,
        m1 * k[0] + m2 * k[1] + m3 * k[2],
        -t * k[0],
        -t * k[1],
        -t * k[2],
    ]
}

fn synth_axpy(y: &SynthState, k: &SynthState, h: f64) -> SynthState {
    std::array::from_fn(|i| y[i] + k[i] * h)
}

/// Integrate α′ = T, T′ = Σ kᵢMᵢ, Mᵢ′ = −kᵢT from `frame0` at `origin`,
/// starting at the lower end of the profile's domain.
///
/// Returns a unit-speed sampling (t = s) whose jets are assembled from the
/// frame and the profile's derivatives, together with the integrated frames.
pub fn synthesize_curve(
    profile: &KProfile,
    frame0: &FrameSample,
    origin: Vec4,
    step: f64,
    n: usize,
) -> Result<(CurveSampling, Vec<FrameSample>)> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
    }
    if frame0.orthonormality_defect() > 1e-9 {
        return Err(Error::NotUnit {
            norm: frame0.orthonormality_defect() + 1.0,
        });
    }
    let s0 = profile.domain.min;
    let mut y: SynthState = [
        origin,
        frame0.vectors[0],
        frame0.vectors[1],
        frame0.vectors[2],
        frame0.vectors[3],
    ];
    let mut params = Vec::with_capacity(n);
    let mut jets = Vec::with_capacity(n);
    let mut frames = Vec::with_capacity(n);
    for j in 0..n {
        let s = s0 + step * j as f64;
        if j > 0 {
            let prev = s0 + step * (j - 1) as f64;
            let k_a = profile.values(prev)?;
            let k_m = profile.values(prev + step / 2.0)?;
            let k_b = profile.values(s)?;
            let r1 = synth_rhs(&y, k_a);
            let r2 = synth_rhs(&synth_axpy(&y, &r1, step / 2.0), k_m);
            let r3 = synth_rhs(&synth_axpy(&y, &r2, step / 2.0), k_m);
            let r4 = synth_rhs(&synth_axpy(&y, &r3, step), k_b);
            y = std::array::from_fn(|i| {
                y[i] + (r1[i] + r2[i] * 2.0 + r3[i] * 2.0 + r4[i]) * (step / 6.0)
            });
            let mut fr = [y[1], y[2], y[3], y[4]];
            reorthonormalize_all(&mut fr);
            y[1..].copy_from_slice(&fr);
        }
        let kj = profile.jets(s)?;
        let [pos, t, m1, m2, m3] = y;
        let ms = [m1, m2, m3];
        let comb = |w: [f64; 3]| ms[0] * w[0] + ms[1] * w[1] + ms[2] * w[2];
        let k: [f64; 3] = std::array::from_fn(|i| kj[i][0]);
        let dk: [f64; 3] = std::array::from_fn(|i| kj[i][1]);
        let ddk: [f64; 3] = std::array::from_fn(|i| kj[i][2]);
        let ksq: f64 = k.iter().map(|x| x * x).sum();
        let kdk: f64 = k.iter().zip(&dk).map(|(a, b)| a * b).sum();
        let d2 = comb(k);
        let d3 = comb(dk) - t * ksq;
        let d4 = comb(std::array::from_fn(|i| ddk[i] - ksq * k[i])) - t * (3.0 * kdk);
        params.push(s);
        jets.push(JetVec4::from_derivatives([pos, t, d2, d3, d4]));
        frames.push(FrameSample::new(
            s - s0,
            [t, m1, m2, m3],
            Flavor::ParallelTransport,
        ));
    }
    let arclens: Vec<f64> = params.iter().map(|s| s - s0).collect();
    let samp = CurveSampling {
        speeds: vec![1.0; n],
        s_jets: jets.clone(),
        params,
        jets,
        arclens,
    };
    Ok((samp, frames))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvespec::builtin_curve;
    use crate::frenet::{frenet_series, gram_schmidt_frame};
    use crate::sampling::sample_arclength;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn hermite_midpoint_exact_for_quintics() {
        let h = 0.7;
        for p in 0..=5 {
            let f = |x: f64, d: usize| -> f64 {
                let mut c = 1.0;
                for k in 0..d {
                    c *= (p - k as i32) as f64;
                }
                if d as i32 > p { 0.0 } else { c * x.powi(p - d as i32) }
            };
            let v = |x: f64| [0, 1, 2].map(|d| Vec4::repeat(f(x, d)));
            let mid = hermite_mid(v(0.0), v(h), h);
            assert!((mid[0] - (h / 2.0).powi(p)).abs() < 1e-15, "degree {p}");
        }
    }

    #[test]
    fn init_without_hint() {
        let f = init_pt_frame(0.0, Vec4::x(), None).unwrap();
        assert_eq!(f.vectors, [Vec4::x(), Vec4::y(), Vec4::z(), Vec4::w()]);
        let t = Vec4::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0);
        let f = init_pt_frame(0.0, t, None).unwrap();
        assert_eq!(f.vectors[1], Vec4::y());
        assert!((f.vectors[2] - Vec4::new(FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2, 0.0)).amax() < 1e-15);
        assert_eq!(f.vectors[3].abs(), Vec4::w());
        assert!((f.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn init_with_hint() {
        let samp = sample_arclength(&builtin_curve("example2").unwrap(), 9).unwrap();
        let hint = gram_schmidt_frame(0.0, &samp.s_jets[0]).unwrap();
        let f = init_pt_frame(0.0, hint.tangent(), Some(&hint)).unwrap();
        let n = Vec4::new(0.0, -1.0 / 3f64.sqrt(), 0.0, -(2f64 / 3.0).sqrt());
        assert!((f.vectors[1] - n).amax() < 1e-14);
        assert_eq!(f.flavor, Flavor::ParallelTransport);
    }

    #[test]
    fn init_errors() {
        assert!(matches!(
            init_pt_frame(0.0, Vec4::new(2.0, 0.0, 0.0, 0.0), None),
            Err(Error::NotUnit { .. })
        ));
        let hint = FrameSample::identity(0.0, Flavor::Frenet);
        assert!(matches!(
            init_pt_frame(0.0, Vec4::y(), Some(&hint)),
            Err(Error::HintMismatch { .. })
        ));
    }

    fn run(name: &str, n: usize, method: Method) -> (CurveSampling, Vec<FrameSample>) {
        let samp = sample_arclength(&builtin_curve(name).unwrap(), n).unwrap();
        let f0 = initial_frame(&samp, &frenet_series(&samp)[0]).unwrap();
        let frames = propagate_pt(&samp, &f0, method).unwrap();
        (samp, frames)
    }

    #[test]
    fn line_frame_constant() {
        for method in [Method::Rk4, Method::DoubleReflection] {
            let (samp, frames) = run("line", 9, method);
            assert!(frames.iter().all(|f| f.vectors == frames[0].vectors));
            let k = pt_curvatures(&samp, &frames).unwrap();
            assert!(k.iter().all(|k| k.as_array() == [0.0; 3]));
        }
    }

    #[test]
    fn circle_m1_follows_normal() {
        for method in [Method::Rk4, Method::DoubleReflection] {
            let (samp, frames) = run("circle", 257, method);
            let k = pt_curvatures(&samp, &frames).unwrap();
            for (j, f) in frames.iter().enumerate() {
                let n = samp.s_derivative(j, 2);
                assert!((f.vectors[1] - n).amax() < 1e-8, "{method:?} j={j}");
                assert!((f.vectors[2] - frames[0].vectors[2]).amax() < 1e-12);
                assert!((f.vectors[3] - frames[0].vectors[3]).amax() < 1e-12);
                assert!((k[j].k1 - 1.0).abs() < 1e-8 && k[j].k2.abs() < 1e-8 && k[j].k3.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn example1_through_degenerate_point() {
        for method in [Method::Rk4, Method::DoubleReflection] {
            let (_, frames) = run("example1", 201, method);
            for f in &frames {
                assert!(f.orthonormality_defect() <= 1e-8);
                assert!((f.determinant() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn example2_kappa_identity() {
        let (samp, frames) = run("example2", 257, Method::Rk4);
        for k in pt_curvatures(&samp, &frames).unwrap() {
            assert!((k.norm().powi(2) - 0.75).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_step_rejected() {
        let (mut samp, frames) = run("line", 9, Method::Rk4);
        samp.arclens[3] = samp.arclens[2];
        assert!(matches!(
            propagate_pt(&samp, &frames[0], Method::Rk4),
            Err(Error::ZeroStep { .. })
        ));
    }

    #[test]
    fn mismatched_curvature_series() {
        let (samp, frames) = run("line", 9, Method::Rk4);
        assert!(pt_curvatures(&samp, &frames[..5]).is_err());
    }

    #[test]
    fn synthesize_straight_line() {
        let p = KProfile::parse("0, 0, 0", Interval::new(0.0, 1.0).unwrap()).unwrap();
        let f0 = FrameSample::identity(0.0, Flavor::ParallelTransport);
        let (samp, _) = synthesize_curve(&p, &f0, Vec4::zeros(), 0.1, 11).unwrap();
        for j in 0..11 {
            assert!((samp.position(j) - Vec4::x() * (0.1 * j as f64)).amax() < 1e-14);
        }
    }

    #[test]
    fn synthesize_closes_circle() {
        let n = 6284;
        let step = 2.0 * PI / (n - 1) as f64;
        let p = KProfile::parse("1, 0, 0", Interval::new(0.0, 2.0 * PI).unwrap()).unwrap();
        let f0 = FrameSample::identity(0.0, Flavor::ParallelTransport);
        let origin = Vec4::new(0.0, -1.0, 0.0, 0.0);
        let (samp, frames) = synthesize_curve(&p, &f0, origin, step, n).unwrap();
        assert!((samp.position(n - 1) - origin).norm() < 1e-6);
        for (j, f) in frames.iter().enumerate() {
            assert!((samp.position(j).norm() - 1.0).abs() < 1e-9);
            assert!(f.orthonormality_defect() < 1e-9);
        }
    }

    #[test]
    fn synthesize_leaves_profile_domain() {
        let p = KProfile::parse("1, 0, 0", Interval::new(0.0, 1.0).unwrap()).unwrap();
        let f0 = FrameSample::identity(0.0, Flavor::ParallelTransport);
        assert!(matches!(
            synthesize_curve(&p, &f0, Vec4::zeros(), 0.1, 20),
            Err(Error::ProfileDomain { .. })
        ));
    }
}
