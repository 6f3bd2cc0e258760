//! End-to-end analysis of one curve: sampling, both frames, curvatures,
//! Euler angles and classification.

use crate::classify::{classify_curve, ClassificationReport, Tolerances};
use crate::curvespec::CurveSpec;
use crate::error::Result;
use crate::euler::{
    angle_ode_residuals, curvature_relation_residuals, extract_euler_angles,
    frame_rotation_matrix, EulerAngles, RelationResiduals,
};
use crate::frame::FrameSample;
use crate::frenet::{frenet_apparatus, frenet_series, FrenetCurvatures, FrenetPoint};
use crate::ptframe::{initial_frame, propagate_pt, pt_curvatures, Method, PtCurvatures};
use crate::sampling::{sample_arclength, to_arclength_jets, CurveSampling};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub sampling: CurveSampling,
    pub frenet_points: Vec<FrenetPoint>,
    pub frenet: Vec<FrenetCurvatures>,
    pub frames: Vec<FrameSample>,
    pub k: Vec<PtCurvatures>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerRow {
    pub s: f64,
    pub angles: Option<EulerAngles>,
    pub residuals: RelationResiduals,
}

impl Analysis {
    /// Analyse a sampling that may still lack arclength jets.
    pub fn from_sampling(samp: CurveSampling, method: Method) -> Result<Self> {
        let samp = if samp.has_arclength_jets() {
            samp
        } else {
            to_arclength_jets(samp)?
        };
        let frenet_points = frenet_series(&samp);
        let frame0 = initial_frame(&samp, &frenet_points[0])?;
        Self::with_initial_frame(samp, frenet_points, &frame0, method)
    }

    pub fn from_spec(spec: &CurveSpec, n: usize, method: Method) -> Result<Self> {
        Self::from_sampling(sample_arclength(spec, n)?, method)
    }

    /// Same as [`Analysis::from_sampling`] but starting from a caller-chosen frame.
    pub fn with_frame0(samp: CurveSampling, frame0: &FrameSample, method: Method) -> Result<Self> {
        let samp = if samp.has_arclength_jets() {
            samp
        } else {
            to_arclength_jets(samp)?
        };
        let frenet_points = frenet_series(&samp);
        Self::with_initial_frame(samp, frenet_points, frame0, method)
    }

    fn with_initial_frame(
        samp: CurveSampling,
        frenet_points: Vec<FrenetPoint>,
        frame0: &FrameSample,
        method: Method,
    ) -> Result<Self> {
        let frames = propagate_pt(&samp, frame0, method)?;
        let k = pt_curvatures(&samp, &frames)?;
        let frenet = frenet_apparatus(&frenet_points, &samp)?;
        Ok(Analysis {
            sampling: samp,
            frenet_points,
            frenet,
            frames,
            k,
        })
    }

    /// Analysis of a curve whose PT frames are already known (synthesized curves).
    pub fn from_transported(samp: CurveSampling, frames: Vec<FrameSample>) -> Result<Self> {
        let frenet_points = frenet_series(&samp);
        let k = pt_curvatures(&samp, &frames)?;
        let frenet = frenet_apparatus(&frenet_points, &samp)?;
        Ok(Analysis {
            sampling: samp,
            frenet_points,
            frenet,
            frames,
            k,
        })
    }

    /// Euler angles where the Frenet frame exists, with all relation residuals.
    pub fn euler_rows(&self) -> Result<Vec<EulerRow>> {
        let mut angles = Vec::with_capacity(self.frames.len());
        for (p, pt) in self.frenet_points.iter().zip(&self.frames) {
            angles.push(match &p.frame {
                Some(f) => Some(extract_euler_angles(&frame_rotation_matrix(f, pt)?)?),
                None => None,
            });
        }
        let mut residuals = angle_ode_residuals(&angles, &self.frenet)?;
        for (j, r) in residuals.iter_mut().enumerate() {
            if let Some(a) = &angles[j] {
                if !a.gimbal {
                    let [r1, r2, r3] = curvature_relation_residuals(self.frenet[j].kappa, a, &self.k[j]);
                    r.r_k1 = Some(r1);
                    r.r_k2 = Some(r2);
                    r.r_k3 = Some(r3);
                }
            }
        }
        Ok(angles
            .into_iter()
            .zip(residuals)
            .map(|(angles, residuals)| EulerRow {
                s: residuals.s,
                angles,
                residuals,
            })
            .collect())
    }

    pub fn classify(&self, tol: &Tolerances) -> Result<ClassificationReport> {
        classify_curve(&self.sampling, &self.frames, &self.k, tol)
    }
}
