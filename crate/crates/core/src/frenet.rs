//! Frenet frame {T, N, B₁, B₂} and curvatures κ, τ, σ from arclength derivatives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{cross4, Flavor, FrameSample, Vec4};
use crate::jet::JetVec4;
use crate::sampling::CurveSampling;

/// Gram–Schmidt residuals below this mean the frame does not exist.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Frenet data at one sample, kept even when the construction stops early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetPoint {
    pub s: f64,
    pub tangent: Vec4,
    pub normal: Option<Vec4>,
    pub frame: Option<FrameSample>,
    /// Gram–Schmidt level (1, 2 or 3) whose residual vanished, if any.
    pub degenerate_level: Option<u8>,
    /// Residual norms at levels 1, 2, 3 (zero past the failing level).
    pub residuals: [f64; 3],
}

impl FrenetPoint {
    pub fn is_full(&self) -> bool {
        self.frame.is_some()
    }
}

/// κ is always defined; τ and σ are `None` where the construction broke down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrenetCurvatures {
    pub s: f64,
    pub kappa: f64,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
}

pub fn frenet_point(s: f64, derivs: &JetVec4) -> FrenetPoint {
    let d1 = derivs.derivative(1);
    let d2 = derivs.derivative(2);
    let d3 = derivs.derivative(3);
    let mut out = FrenetPoint {
        s,
        tangent: d1,
        normal: None,
        frame: None,
        degenerate_level: None,
        residuals: [0.0; 3],
    };

    let r1 = d1.norm();
    out.residuals[0] = r1;
    if r1 < DEGENERACY_TOL {
        out.degenerate_level = Some(1);
        return out;
    }
    let t = d1 / r1;
    out.tangent = t;

    let u2 = d2 - t * t.dot(&d2);
    let r2 = u2.norm();
    out.residuals[1] = r2;
    if r2 < DEGENERACY_TOL {
        out.degenerate_level = Some(2);
        return out;
    }
    let n = u2 / r2;
    out.normal = Some(n);

    let u3 = d3 - t * t.dot(&d3) - n * n.dot(&d3);
    let r3 = u3.norm();
    out.residuals[2] = r3;
    if r3 < DEGENERACY_TOL {
        out.degenerate_level = Some(3);
        return out;
    }
    let b1 = u3 / r3;
    let b2 = cross4(&t, &n, &b1).normalize();
    out.frame = Some(FrameSample::new(s, [t, n, b1, b2], Flavor::Frenet));
    out
}

/// Frenet frame from dα/ds … d⁴α/ds⁴, or the level at which it fails to exist.
pub fn gram_schmidt_frame(s: f64, derivs: &JetVec4) -> Result<FrameSample> {
    let p = frenet_point(s, derivs);
    match (p.frame, p.degenerate_level) {
        (Some(f), _) => Ok(f),
        (None, Some(level)) => Err(Error::DegenerateFrame {
            level,
            residual: p.residuals[level as usize - 1],
            s,
        }),
        (None, None) => unreachable!("frenet_point always reports a level when it stops"),
    }
}

pub fn frenet_series(samp: &CurveSampling) -> Vec<FrenetPoint> {
    samp.arclens
        .iter()
        .zip(&samp.s_jets)
        .map(|(&s, d)| frenet_point(s, d))
        .collect()
}

/// κ = ‖α″‖, τ = ⟨N′, B₁⟩, σ = ⟨B₁′, B₂⟩ from the Gram–Schmidt magnitudes.
pub fn frenet_apparatus(
    points: &[FrenetPoint],
    samp: &CurveSampling,
) -> Result<Vec<FrenetCurvatures>> {
    if points.len() != samp.s_jets.len() {
        return Err(Error::MismatchedSeries(format!(
            "{} frames for {} samples",
            points.len(),
            samp.s_jets.len()
        )));
    }
    points
        .iter()
        .zip(samp.s_jets.iter().zip(&samp.arclens))
        .map(|(p, (d, &s))| {
            if p.s != s {
                return Err(Error::MismatchedSeries(format!(
                    "frame at s = {} paired with sample at s = {s}",
                    p.s
                )));
            }
            let kappa = d.derivative(2).norm();
            let (tau, sigma) = match p.degenerate_level {
                Some(1) | Some(2) => (None, None),
                Some(_) => (Some(0.0), None),
                None => {
                    let r3 = p.residuals[2];
                    let b2 = p.frame.expect("full frame").vectors[3];
                    (Some(r3 / kappa), Some(d.derivative(4).dot(&b2) / r3))
                }
            };
            Ok(FrenetCurvatures {
                s,
                kappa,
                tau,
                sigma,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvespec::builtin_curve;
    use crate::sampling::sample_arclength;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn axes_give_identity() {
        let d = JetVec4::from_derivatives([
            Vec4::zeros(),
            Vec4::x(),
            Vec4::y(),
            Vec4::z(),
            Vec4::w(),
        ]);
        let f = gram_schmidt_frame(0.0, &d).unwrap();
        assert_eq!(f.vectors, [Vec4::x(), Vec4::y(), Vec4::z(), Vec4::w()]);
        assert_eq!(f.flavor, Flavor::Frenet);
    }

    #[test]
    fn example1_degenerates_at_zero() {
        let samp = sample_arclength(&builtin_curve("example1").unwrap(), 201).unwrap();
        match gram_schmidt_frame(samp.arclens[100], &samp.s_jets[100]) {
            Err(Error::DegenerateFrame { level, residual, .. }) => {
                assert_eq!(level, 2);
                assert!(residual < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example2_frame_at_origin() {
        let samp = sample_arclength(&builtin_curve("example2").unwrap(), 17).unwrap();
        let f = gram_schmidt_frame(0.0, &samp.s_jets[0]).unwrap();
        let t = Vec4::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0);
        let n = Vec4::new(0.0, -1.0 / 3f64.sqrt(), 0.0, -(2f64 / 3.0).sqrt());
        assert!((f.vectors[0] - t).amax() < 1e-14);
        assert!((f.vectors[1] - n).amax() < 1e-14);
        assert!((f.determinant() - 1.0).abs() < 1e-12);
        assert!(f.orthonormality_defect() < 1e-14);
    }

    fn curvatures(name: &str, n: usize) -> Vec<FrenetCurvatures> {
        let samp = sample_arclength(&builtin_curve(name).unwrap(), n).unwrap();
        frenet_apparatus(&frenet_series(&samp), &samp).unwrap()
    }

    #[test]
    fn circle_curvatures() {
        for c in curvatures("circle", 65) {
            assert!((c.kappa - 1.0).abs() < 1e-12);
            assert_eq!(c.tau, Some(0.0));
            assert_eq!(c.sigma, None);
        }
    }

    #[test]
    fn helix_curvatures() {
        for c in curvatures("helix3", 65) {
            assert!((c.kappa - 0.5).abs() < 1e-12);
            assert!((c.tau.unwrap() - 0.5).abs() < 1e-12);
            assert!(c.sigma.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn example2_kappa() {
        for c in curvatures("example2", 129) {
            assert!((c.kappa - 3f64.sqrt() / 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn mismatched_lengths() {
        let samp = sample_arclength(&builtin_curve("line").unwrap(), 9).unwrap();
        let pts = frenet_series(&samp);
        assert!(matches!(
            frenet_apparatus(&pts[1..], &samp),
            Err(Error::MismatchedSeries(_))
        ));
        let mut shifted = pts.clone();
        shifted[3].s += 1.0;
        assert!(frenet_apparatus(&shifted, &samp).is_err());
    }

    #[test]
    fn line_masks_everything() {
        for c in curvatures("line", 9) {
            assert_eq!(c.kappa, 0.0);
            assert_eq!((c.tau, c.sigma), (None, None));
        }
    }
}
