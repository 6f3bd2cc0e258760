//! Parameter grids, arclength and conversion of t-derivatives to s-derivatives.

use crate::curvespec::{eval_curve_jet, CurveSpec};
use crate::error::{Error, Result};
use crate::frame::Vec4;
use crate::jet::{jet_apply, jet_vec_norm, Jet, JetVec4, UnaryFn};

pub const MIN_SAMPLES: usize = 9;
/// Speeds below this make the tangent direction meaningless.
pub const STATIONARY_SPEED: f64 = 1e-12;

/// A curve sampled on a strictly increasing parameter grid.
///
/// `jets` hold derivatives with respect to the sampling parameter t;
/// `s_jets` (empty until [`to_arclength_jets`] runs) hold derivatives with
/// respect to arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSampling {
    pub params: Vec<f64>,
    pub jets: Vec<JetVec4>,
    pub speeds: Vec<f64>,
    pub arclens: Vec<f64>,
    pub s_jets: Vec<JetVec4>,
}

impl CurveSampling {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn has_arclength_jets(&self) -> bool {
        self.s_jets.len() == self.params.len()
    }

    pub fn position(&self, j: usize) -> Vec4 {
        self.jets[j].derivative(0)
    }

    /// n-th arclength derivative at sample `j`; requires `s_jets`.
    pub fn s_derivative(&self, j: usize, n: usize) -> Vec4 {
        self.s_jets[j].derivative(n)
    }

    pub fn tangent(&self, j: usize) -> Vec4 {
        self.s_derivative(j, 1)
    }

    /// Build from precomputed t-jets. Interval lengths use the two-point
    /// quintic Hermite rule on the speed and its first two derivatives.
    pub fn from_jets(params: Vec<f64>, jets: Vec<JetVec4>) -> Result<Self> {
        if params.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                got: params.len(),
                need: MIN_SAMPLES,
            });
        }
        let speed_jets = params
            .iter()
            .zip(&jets)
            .map(|(&t, j)| speed_jet(t, j))
            .collect::<Result<Vec<_>>>()?;
        let speeds = speed_jets.iter().map(|v| v.d[0]).collect();
        let mut arclens = Vec::with_capacity(params.len());
        arclens.push(0.0);
        for k in 1..params.len() {
            let h = params[k] - params[k - 1];
            let (a, b) = (&speed_jets[k - 1].d, &speed_jets[k].d);
            let piece = h / 2.0 * (a[0] + b[0]) + h * h / 10.0 * (a[1] - b[1])
                + h * h * h / 120.0 * (a[2] + b[2]);
            arclens.push(arclens[k - 1] + piece);
        }
        Ok(CurveSampling {
            params,
            jets,
            speeds,
            arclens,
            s_jets: Vec::new(),
        })
    }
}

/// Jet of ‖α′(t)‖; entries 0..3 are exact.
fn speed_jet(t: f64, jet: &JetVec4) -> Result<Jet> {
    let v = jet_vec_norm(&jet.derivative_jet()).map_err(|_| Error::StationaryPoint { t, speed: 0.0 })?;
    if v.d[0] < STATIONARY_SPEED {
        return Err(Error::StationaryPoint { t, speed: v.d[0] });
    }
    Ok(v)
}

/// Uniform grid over the curve's domain. Arclength is accumulated with
/// Simpson's rule on each interval, evaluating the speed at its midpoint.
pub fn sample_curve(spec: &CurveSpec, n: usize) -> Result<CurveSampling> {
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n,
            need: MIN_SAMPLES,
        });
    }
    let params = spec.domain.grid(n);
    let jets = params
        .iter()
        .map(|&t| eval_curve_jet(spec, t))
        .collect::<Result<Vec<_>>>()?;
    let speeds = params
        .iter()
        .zip(&jets)
        .map(|(&t, j)| speed_jet(t, j).map(|v| v.d[0]))
        .collect::<Result<Vec<_>>>()?;

    let mut arclens = Vec::with_capacity(n);
    arclens.push(0.0);
    for k in 1..n {
        let (t0, t1) = (params[k - 1], params[k]);
        let mid = 0.5 * (t0 + t1);
        let vm = speed_jet(mid, &eval_curve_jet(spec, mid)?)?.d[0];
        let piece = (t1 - t0) / 6.0 * (speeds[k - 1] + 4.0 * vm + speeds[k]);
        arclens.push(arclens[k - 1] + piece);
    }
    Ok(CurveSampling {
        params,
        jets,
        speeds,
        arclens,
        s_jets: Vec::new(),
    })
}

/// Apply d/ds = (1/‖α′‖) d/dt repeatedly to get arclength derivatives
/// through order four.
pub fn to_arclength_jets(mut samp: CurveSampling) -> Result<CurveSampling> {
    let mut s_jets = Vec::with_capacity(samp.len());
    for (&t, jet) in samp.params.iter().zip(&samp.jets) {
        let inv_speed = jet_apply(UnaryFn::Recip, speed_jet(t, jet)?)?;
        let mut derivs = [jet.derivative(0), Vec4::zeros(), Vec4::zeros(), Vec4::zeros(), Vec4::zeros()];
        let mut current = *jet;
        for slot in derivs.iter_mut().skip(1) {
            current = current.derivative_jet().scale_by(inv_speed);
            *slot = current.derivative(0);
        }
        s_jets.push(JetVec4::from_derivatives(derivs));
    }
    samp.s_jets = s_jets;
    Ok(samp)
}

/// Sample and convert in one go.
pub fn sample_arclength(spec: &CurveSpec, n: usize) -> Result<CurveSampling> {
    to_arclength_jets(sample_curve(spec, n)?)
}
