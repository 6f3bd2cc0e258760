//! Spherical, normal, rectifying and osculating tests.
//!
//! A curve with parallel transport curvatures k₁, k₂, k₃ lies on a sphere
//! exactly when a k₁ + b k₂ + c k₃ + 1 = 0 for constants a, b, c; it is
//! rectifying when c₂k₂ + c₃k₃ + 1 = 0 and osculating when λ₂k₁ + λ₃k₃ + 1 = 0.
//! Each relation is fitted by least squares and judged on its residual; a
//! direct sphere fit and constant-vector checks back the verdicts up.

use nalgebra::{DMatrix, DVector, Vector4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{FrameSample, Vec4};
use crate::ptframe::PtCurvatures;
use crate::sampling::CurveSampling;

pub const MIN_FIT_SAMPLES: usize = 8;
pub const SINGULAR_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationMode {
    /// a k₁ + b k₂ + c k₃ + 1 = 0
    Spherical,
    /// c₂ k₂ + c₃ k₃ + 1 = 0
    Rectifying,
    /// λ₂ k₁ + λ₃ k₃ + 1 = 0
    Osculating,
}

impl RelationMode {
    pub const ALL: [RelationMode; 3] = [
        RelationMode::Spherical,
        RelationMode::Rectifying,
        RelationMode::Osculating,
    ];

    /// Which of k₁, k₂, k₃ enter the relation.
    pub fn columns(self) -> &'static [usize] {
        match self {
            RelationMode::Spherical => &[0, 1, 2],
            RelationMode::Rectifying => &[1, 2],
            RelationMode::Osculating => &[0, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRelationFit {
    pub mode: RelationMode,
    pub coefficients: Vec<f64>,
    pub rms_residual: f64,
    pub rank_deficient: bool,
    pub plane_distance: Option<f64>,
}

impl LinearRelationFit {
    /// Relation value Σ coeff·k + 1 at one sample.
    pub fn residual_at(&self, k: &PtCurvatures) -> f64 {
        let ks = k.as_array();
        self.mode
            .columns()
            .iter()
            .zip(&self.coefficients)
            .map(|(&c, a)| a * ks[c])
            .sum::<f64>()
            + 1.0
    }
}

/// One-sided Jacobi SVD of a small square matrix: returns `(W, V)` with
/// `R V = W`, the columns of W mutually orthogonal and V orthogonal. The
/// singular values are the column norms of W.
fn jacobi_svd(r: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = r.ncols();
    let mut w = r;
    let mut v = DMatrix::<f64>::identity(m, m);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..m {
            for q in p + 1..m {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut w, &mut v] {
                    for i in 0..mat.nrows() {
                        let (a, b) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = c * a - sn * b;
                        mat[(i, q)] = sn * a + c * b;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

/// Minimal-norm least squares solution of `a x = b` discarding singular
/// values below `SINGULAR_CUTOFF` times the largest. Returns the solution and
/// the numerical rank.
fn truncated_lstsq(a: DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, usize) {
    let qr = a.qr();
    let rhs = qr.q().transpose() * b;
    let (w, v) = jacobi_svd(qr.r());
    let sigma: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let cutoff = SINGULAR_CUTOFF * sigma.iter().copied().fold(0.0, f64::max);
    let mut x = DVector::zeros(v.nrows());
    let mut rank = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if s > cutoff {
            rank += 1;
            x += v.column(i) * (w.column(i).dot(&rhs) / (s * s));
        }
    }
    (x, rank)
}

pub fn fit_linear_relation(k: &[PtCurvatures], mode: RelationMode) -> Result<LinearRelationFit> {
    if k.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            got: k.len(),
            need: MIN_FIT_SAMPLES,
        });
    }
    let cols = mode.columns();
    let a = DMatrix::from_fn(k.len(), cols.len(), |r, c| k[r].as_array()[cols[c]]);
    let b = DVector::from_element(k.len(), -1.0);
    let (x, rank) = truncated_lstsq(a, &b);
    let mut fit = LinearRelationFit {
        mode,
        coefficients: x.iter().copied().collect(),
        rms_residual: 0.0,
        rank_deficient: rank < cols.len(),
        plane_distance: None,
    };
    let sq: f64 = k.iter().map(|kj| fit.residual_at(kj).powi(2)).sum();
    fit.rms_residual = (sq / k.len() as f64).sqrt();
    let norm_sq: f64 = fit.coefficients.iter().map(|c| c * c).sum();
    if norm_sq > 0.0 {
        fit.plane_distance = Some(1.0 / norm_sq.sqrt());
    }
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereFit {
    pub center: [f64; 4],
    pub radius: f64,
    pub rms_residual: f64,
}

impl SphereFit {
    pub fn center_vec(&self) -> Vec4 {
        Vector4::from(self.center)
    }
}

/// Least squares on ‖αⱼ‖² = 2⟨αⱼ, P⟩ + q with r² = q + ‖P‖².
///
/// Points confined to a lower dimensional flat still get the minimal-norm
/// center; fewer than three independent directions (a line) is rejected.
pub fn fit_sphere_direct(samp: &CurveSampling) -> Result<SphereFit> {
    let n = samp.len();
    if n < 6 {
        return Err(Error::TooFewSamples { got: n, need: 6 });
    }
    let pts: Vec<Vec4> = (0..n).map(|j| samp.position(j)).collect();
    let a = DMatrix::from_fn(n, 5, |r, c| if c < 4 { 2.0 * pts[r][c] } else { 1.0 });
    let b = DVector::from_iterator(n, pts.iter().map(|p| p.norm_squared()));

    let (x, rank) = truncated_lstsq(a, &b);
    if rank < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "sample points span rank {rank} in the sphere design matrix"
        )));
    }
    let center = Vec4::new(x[0], x[1], x[2], x[3]);
    let r_sq = x[4] + center.norm_squared();
    if !(r_sq > 0.0) {
        return Err(Error::DegenerateGeometry(format!("fitted squared radius {r_sq}")));
    }
    let radius = r_sq.sqrt();
    let sq: f64 = pts.iter().map(|p| ((p - center).norm() - radius).powi(2)).sum();
    Ok(SphereFit {
        center: center.into(),
        radius,
        rms_residual: (sq / n as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relation verdicts: rms ≤ relation·(1 + RMS ‖k‖).
    pub relation: f64,
    /// Sphere fit verdict: rms ≤ sphere·r.
    pub sphere: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            relation: 1e-6,
            sphere: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationFits {
    pub spherical: LinearRelationFit,
    pub rectifying: LinearRelationFit,
    pub osculating: LinearRelationFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct AnchorDrifts {
    pub spherical: Option<f64>,
    pub rectifying: Option<f64>,
    pub osculating: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub spherical: bool,
    pub normal: bool,
    pub rectifying: bool,
    pub osculating: bool,
    pub fits: RelationFits,
    pub sphere: Option<SphereFit>,
    pub sphere_verdict: Option<bool>,
    /// ⟨α − P, Mᵢ⟩ at the first sample.
    pub sphere_anchors: Option<[f64; 3]>,
    pub anchor_constancy: Option<f64>,
    pub anchor_drifts: AnchorDrifts,
    pub radius_identity_gap: Option<f64>,
    pub rms_k: f64,
    pub samples: usize,
}

fn max_drift<I: Iterator<Item = f64>>(values: I) -> f64 {
    values.fold(0.0, f64::max)
}

/// Largest deviation of `X(s) = α − Σ coeffᵢ M_colᵢ` from its value at the first sample.
fn constant_vector_drift(
    samp: &CurveSampling,
    frames: &[FrameSample],
    fit: &LinearRelationFit,
) -> f64 {
    let x = |j: usize| {
        let mut v = samp.position(j);
        for (&c, a) in fit.mode.columns().iter().zip(&fit.coefficients) {
            v -= frames[j].vectors[c + 1] * *a;
        }
        v
    };
    let x0 = x(0);
    max_drift((0..samp.len()).map(|j| (x(j) - x0).norm()))
}

pub fn classify_curve(
    samp: &CurveSampling,
    frames: &[FrameSample],
    k: &[PtCurvatures],
    tol: &Tolerances,
) -> Result<ClassificationReport> {
    if frames.len() != samp.len() || k.len() != samp.len() {
        return Err(Error::MismatchedSeries(format!(
            "{} samples, {} frames, {} curvature rows",
            samp.len(),
            frames.len(),
            k.len()
        )));
    }
    if !(tol.relation > 0.0 && tol.sphere > 0.0) {
        return Err(Error::InvalidConfig("tolerances must be positive".into()));
    }
    let fits = RelationFits {
        spherical: fit_linear_relation(k, RelationMode::Spherical)?,
        rectifying: fit_linear_relation(k, RelationMode::Rectifying)?,
        osculating: fit_linear_relation(k, RelationMode::Osculating)?,
    };
    let rms_k = (k.iter().map(|c| c.norm().powi(2)).sum::<f64>() / k.len() as f64).sqrt();
    let bound = tol.relation * (1.0 + rms_k);
    let spherical = fits.spherical.rms_residual <= bound;
    let rectifying = fits.rectifying.rms_residual <= bound;
    let osculating = fits.osculating.rms_residual <= bound;

    let mut report = ClassificationReport {
        spherical,
        normal: spherical,
        rectifying,
        osculating,
        fits,
        sphere: None,
        sphere_verdict: None,
        sphere_anchors: None,
        anchor_constancy: None,
        anchor_drifts: AnchorDrifts::default(),
        radius_identity_gap: None,
        rms_k,
        samples: samp.len(),
    };

    if spherical || report.fits.spherical.rank_deficient {
        match fit_sphere_direct(samp) {
            Ok(sphere) => {
                let p = sphere.center_vec();
                let anchors = |j: usize| -> [f64; 3] {
                    let d = samp.position(j) - p;
                    std::array::from_fn(|i| d.dot(&frames[j].vectors[i + 1]))
                };
                let a0 = anchors(0);
                let drift = max_drift((0..samp.len()).flat_map(|j| {
                    let aj = anchors(j);
                    (0..3).map(move |i| (aj[i] - a0[i]).abs())
                }));
                let anchor_sq: f64 = a0.iter().map(|a| a * a).sum();
                report.sphere_verdict = Some(sphere.rms_residual <= tol.sphere * sphere.radius);
                report.sphere_anchors = Some(a0);
                report.anchor_drifts.spherical = Some(drift);
                report.radius_identity_gap = Some((sphere.radius.powi(2) - anchor_sq).abs());
                report.sphere = Some(sphere);
            }
            Err(Error::DegenerateGeometry(_)) => {}
            Err(e) => return Err(e),
        }
    }
    if rectifying {
        report.anchor_drifts.rectifying =
            Some(constant_vector_drift(samp, frames, &report.fits.rectifying));
    }
    if osculating {
        report.anchor_drifts.osculating =
            Some(constant_vector_drift(samp, frames, &report.fits.osculating));
    }
    let d = report.anchor_drifts;
    report.anchor_constancy = [d.spherical, d.rectifying, d.osculating]
        .into_iter()
        .flatten()
        .reduce(f64::max);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_k(k: [f64; 3], n: usize) -> Vec<PtCurvatures> {
        (0..n)
            .map(|j| PtCurvatures {
                s: j as f64,
                k1: k[0],
                k2: k[1],
                k3: k[2],
            })
            .collect()
    }

    #[test]
    fn constant_curvatures_minimal_norm() {
        let fit = fit_linear_relation(&constant_k([0.5; 3], 20), RelationMode::Spherical).unwrap();
        assert!(fit.rank_deficient);
        for c in &fit.coefficients {
            assert!((c + 2.0 / 3.0).abs() < 1e-12);
        }
        assert!(fit.rms_residual < 1e-14);
        let d = fit.plane_distance.unwrap();
        assert!((d - 1.0 / (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn zero_curvatures() {
        for mode in RelationMode::ALL {
            let fit = fit_linear_relation(&constant_k([0.0; 3], 9), mode).unwrap();
            assert_eq!(fit.rms_residual, 1.0);
            assert!(fit.coefficients.iter().all(|&c| c == 0.0));
            assert_eq!(fit.plane_distance, None);
            assert!(fit.rank_deficient);
        }
    }

    #[test]
    fn rectifying_relation_recovered() {
        let k: Vec<PtCurvatures> = (0..50)
            .map(|j| {
                let s = j as f64 * 0.1;
                PtCurvatures {
                    s,
                    k1: 0.3,
                    k2: 1.0 + s.sin(),
                    k3: 1.0 - s.sin(),
                }
            })
            .collect();
        let fit = fit_linear_relation(&k, RelationMode::Rectifying).unwrap();
        assert!(!fit.rank_deficient);
        assert!((fit.coefficients[0] + 0.5).abs() < 1e-12);
        assert!((fit.coefficients[1] + 0.5).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-14);
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(
            fit_linear_relation(&constant_k([1.0; 3], 7), RelationMode::Osculating),
            Err(Error::TooFewSamples { got: 7, need: 8 })
        ));
    }
}
