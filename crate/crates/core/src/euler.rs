//! Rotation between the Frenet normals (N, B₁, B₂) and the parallel
//! transport normals (M₁, M₂, M₃), its Euler angles, and residuals of the
//! curvature and angle relations that tie the two frames together.
//!
//! Convention: `R = R_z(ψ) · R_y(θ) · R_x(φ)` with `R[i][j] = ⟨Fᵢ, Mⱼ⟩`,
//! rows indexed by N, B₁, B₂. The bottom row is (−sin θ, sin φ cos θ, cos φ cos θ)
//! and the top row gives kⱼ = κ R[0][j].

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::FrameSample;
use crate::frenet::FrenetCurvatures;
use crate::ptframe::PtCurvatures;

pub const GIMBAL_TOL: f64 = 1e-6;
/// Denominators below this make a residual not applicable.
pub const DENOM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub gimbal: bool,
}

/// `R_z(ψ) R_y(θ) R_x(φ)`.
pub fn rotation_from_angles(theta: f64, phi: f64, psi: f64) -> Matrix3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    let (sp, cp) = psi.sin_cos();
    Matrix3::new(
        ct * cp,
        -cf * sp + sf * st * cp,
        sf * sp + cf * st * cp,
        ct * sp,
        cf * cp + sf * st * sp,
        -sf * cp + cf * st * sp,
        -st,
        sf * ct,
        cf * ct,
    )
}

impl EulerAngles {
    pub fn matrix(&self) -> Matrix3<f64> {
        rotation_from_angles(self.theta, self.phi, self.psi)
    }
}

/// `R[i][j] = ⟨frenet normal i, pt normal j⟩`.
pub fn frame_rotation_matrix(frenet: &FrameSample, pt: &FrameSample) -> Result<Matrix3<f64>> {
    let dot = frenet.tangent().dot(&pt.tangent());
    if dot <= 1.0 - 1e-8 {
        return Err(Error::TangentMismatch { dot, s: pt.s });
    }
    Ok(Matrix3::from_fn(|i, j| {
        frenet.vectors[i + 1].dot(&pt.vectors[j + 1])
    }))
}

/// Map into (−π, π].
fn principal(angle: f64) -> f64 {
    if angle <= -std::f64::consts::PI {
        angle + 2.0 * std::f64::consts::PI
    } else {
        angle
    }
}

pub fn extract_euler_angles(r: &Matrix3<f64>) -> Result<EulerAngles> {
    let defect = (r.transpose() * r - Matrix3::identity()).amax();
    if !(defect <= 1e-6) {
        return Err(Error::NotRotation(format!("RᵀR deviates from I by {defect:e}")));
    }
    let det = r.determinant();
    if det <= 0.0 {
        return Err(Error::NotRotation(format!("determinant {det}")));
    }
    let cos_theta = r[(0, 0)].hypot(r[(1, 0)]);
    let theta = (-r[(2, 0)]).atan2(cos_theta);
    if cos_theta < GIMBAL_TOL {
        // only φ ∓ ψ is determined; put all of it in ψ
        let psi = (-r[(0, 1)]).atan2(r[(1, 1)]);
        return Ok(EulerAngles {
            theta,
            phi: 0.0,
            psi: principal(psi),
            gimbal: true,
        });
    }
    Ok(EulerAngles {
        theta,
        phi: principal(r[(2, 1)].atan2(r[(2, 2)])),
        psi: principal(r[(1, 0)].atan2(r[(0, 0)])),
        gimbal: false,
    })
}

/// `kᵢ − κ R[0][i]` for the reconstructed rotation.
pub fn curvature_relation_residuals(kappa: f64, angles: &EulerAngles, k: &PtCurvatures) -> [f64; 3] {
    let (st, ct) = angles.theta.sin_cos();
    let (sf, cf) = angles.phi.sin_cos();
    let (sp, cp) = angles.psi.sin_cos();
    [
        k.k1 - kappa * ct * cp,
        k.k2 - kappa * (sf * st * cp - cf * sp),
        k.k3 - kappa * (cf * st * cp + sf * sp),
    ]
}

/// Per-sample diagnostics. `None` marks a residual that does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct RelationResiduals {
    pub s: f64,
    pub r_k1: Option<f64>,
    pub r_k2: Option<f64>,
    pub r_k3: Option<f64>,
    pub r_theta: Option<f64>,
    pub r_tau: Option<f64>,
    pub r_sigma: Option<f64>,
    pub r_constraint: Option<f64>,
}

/// Add multiples of 2π so that consecutive defined values never jump by more than π.
pub fn unwrap_angles(values: &[Option<f64>]) -> Vec<Option<f64>> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(values.len());
    let mut prev: Option<f64> = None;
    for v in values {
        let u = match (v, prev) {
            (Some(x), Some(p)) => Some(x + two_pi * ((p - x) / two_pi).round()),
            (Some(x), None) => Some(*x),
            (None, _) => None,
        };
        if u.is_some() {
            prev = u;
        } else {
            prev = None;
        }
        out.push(u);
    }
    out
}

/// Three-point derivative on a nonuniform grid; needs both neighbours.
fn central_diff(s: &[f64], f: &[Option<f64>], j: usize) -> Option<f64> {
    if j == 0 || j + 1 >= s.len() {
        return None;
    }
    let (fm, f0, fp) = (f[j - 1]?, f[j]?, f[j + 1]?);
    let hm = s[j] - s[j - 1];
    let hp = s[j + 1] - s[j];
    Some((hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / (hm * hp * (hm + hp)))
}

fn applicable(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Residuals of θ′ = σ/√(κ²+τ²), τ = −ψ′ + φ′ sin θ, σ = θ′/sin ψ and
/// φ′ cos θ + θ′ cot ψ = 0, using central differences of the unwrapped angles.
/// Report-only; nothing here is asserted by the pipeline.
pub fn angle_ode_residuals(
    angles: &[Option<EulerAngles>],
    frenet: &[FrenetCurvatures],
) -> Result<Vec<RelationResiduals>> {
    if angles.len() != frenet.len() {
        return Err(Error::MismatchedSeries(format!(
            "{} angle samples for {} curvature samples",
            angles.len(),
            frenet.len()
        )));
    }
    let s: Vec<f64> = frenet.iter().map(|c| c.s).collect();
    let usable: Vec<Option<EulerAngles>> = angles
        .iter()
        .map(|a| a.filter(|a| !a.gimbal))
        .collect();
    let theta: Vec<Option<f64>> = usable.iter().map(|a| a.map(|a| a.theta)).collect();
    let phi = unwrap_angles(&usable.iter().map(|a| a.map(|a| a.phi)).collect::<Vec<_>>());
    let psi = unwrap_angles(&usable.iter().map(|a| a.map(|a| a.psi)).collect::<Vec<_>>());

    let mut out = Vec::with_capacity(s.len());
    for (j, c) in frenet.iter().enumerate() {
        let mut r = RelationResiduals {
            s: c.s,
            ..Default::default()
        };
        if let Some(a) = usable[j] {
            let d_theta = central_diff(&s, &theta, j);
            let d_phi = central_diff(&s, &phi, j);
            let d_psi = central_diff(&s, &psi, j);
            let (st, ct) = a.theta.sin_cos();
            let sin_psi = a.psi.sin();

            if let (Some(dt), Some(sigma), Some(tau)) = (d_theta, c.sigma, c.tau) {
                let root = c.kappa.hypot(tau);
                if root >= DENOM_TOL {
                    r.r_theta = applicable(dt - sigma / root);
                }
            }
            if let (Some(tau), Some(dp), Some(df)) = (c.tau, d_psi, d_phi) {
                r.r_tau = applicable(tau - (-dp + df * st));
            }
            if sin_psi.abs() >= DENOM_TOL {
                if let (Some(sigma), Some(dt)) = (c.sigma, d_theta) {
                    r.r_sigma = applicable(sigma - dt / sin_psi);
                }
                if let (Some(df), Some(dt)) = (d_phi, d_theta) {
                    r.r_constraint = applicable(df * ct + dt * a.psi.cos() / sin_psi);
                }
            }
        }
        out.push(r);
    }
    Ok(out)
}
