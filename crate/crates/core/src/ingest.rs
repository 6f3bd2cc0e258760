//! Curves given as sampled points: `t,x1,x2,x3,x4` rows, `#` comments and
//! an optional header line. Derivatives through order four come from finite
//! difference weights on the (possibly nonuniform) parameter grid.

use std::path::Path;

use crate::error::{Error, Result};
use crate::frame::Vec4;
use crate::jet::JetVec4;
use crate::sampling::{CurveSampling, MIN_SAMPLES};

/// Points per finite-difference stencil. Interior stencils are centred; near
/// the ends they slide inwards and become one-sided.
pub const STENCIL: usize = 7;

/// Weights for derivatives 0..=`order` at `x0` from values at `xs`.
///
/// Row `k` of the result holds the weights of the k-th derivative.
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Parse sample-file text into parameters and points.
pub fn parse_samples(text: &str) -> Result<(Vec<f64>, Vec<Vec4>)> {
    let mut params = Vec::new();
    let mut points = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let first_is_text = fields[0].parse::<f64>().is_err();
        if !seen_content && first_is_text {
            seen_content = true;
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("header has {} columns, expected t,x1,x2,x3,x4", fields.len()),
                });
            }
            continue;
        }
        seen_content = true;
        if fields.len() != 5 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 5 columns, found {}", fields.len()),
            });
        }
        let mut row = [0.0; 5];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = match f.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("'{f}' is not a finite number"),
                    })
                }
            };
        }
        if let Some(&prev) = params.last() {
            if row[0] <= prev {
                return Err(Error::NonMonotoneParam {
                    line: line_no,
                    t: row[0],
                });
            }
        }
        params.push(row[0]);
        points.push(Vec4::new(row[1], row[2], row[3], row[4]));
    }
    if params.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: params.len(),
            need: MIN_SAMPLES,
        });
    }
    Ok((params, points))
}

/// Derivative jets at every sample from finite differences.
pub fn jets_from_points(params: &[f64], points: &[Vec4]) -> Vec<JetVec4> {
    let n = params.len();
    let width = STENCIL.min(n);
    (0..n)
        .map(|j| {
            let start = j.saturating_sub(width / 2).min(n - width);
            let xs = &params[start..start + width];
            let w = fd_weights(params[j], xs, 4);
            let mut derivs = [points[j], Vec4::zeros(), Vec4::zeros(), Vec4::zeros(), Vec4::zeros()];
            for (order, slot) in derivs.iter_mut().enumerate().skip(1) {
                *slot = w[order]
                    .iter()
                    .zip(&points[start..start + width])
                    .map(|(c, p)| p * *c)
                    .sum();
            }
            JetVec4::from_derivatives(derivs)
        })
        .collect()
}

/// Sampling from in-memory rows; errors name the 1-based row.
pub fn sampling_from_points(params: Vec<f64>, points: Vec<Vec4>) -> Result<CurveSampling> {
    if params.len() != points.len() {
        return Err(Error::MismatchedSeries(format!(
            "{} parameters for {} points",
            params.len(),
            points.len()
        )));
    }
    for (j, (t, p)) in params.iter().zip(&points).enumerate() {
        if !t.is_finite() || !p.iter().all(|x| x.is_finite()) {
            return Err(Error::Parse {
                line: j + 1,
                message: "row holds a non-finite value".into(),
            });
        }
        if j > 0 && *t <= params[j - 1] {
            return Err(Error::NonMonotoneParam { line: j + 1, t: *t });
        }
    }
    if params.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            got: params.len(),
            need: MIN_SAMPLES,
        });
    }
    let jets = jets_from_points(&params, &points);
    CurveSampling::from_jets(params, jets)
}

pub fn sampling_from_text(text: &str) -> Result<CurveSampling> {
    let (params, points) = parse_samples(text)?;
    let jets = jets_from_points(&params, &points);
    CurveSampling::from_jets(params, jets)
}

pub fn ingest_samples(path: &Path) -> Result<CurveSampling> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    sampling_from_text(&text)
}
