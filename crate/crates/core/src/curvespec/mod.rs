//! Analytic curve definitions: parsing, jet evaluation and the built-in catalog.

mod ast;
mod parse;

pub use ast::{BinOp, Constant, Expr, Func};
pub use parse::{parse_expr, parse_expr_list};

use crate::error::{Error, Result};
use crate::jet::{Jet, JetVec4};

/// Points used to check that every coordinate is finite across the domain.
pub const PROBE_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::InvalidConfig(format!(
                "invalid interval [{min}, {max}]"
            )));
        }
        Ok(Interval { min, max })
    }

    /// `n` uniformly spaced points including both ends.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let span = self.max - self.min;
        let last = (n - 1) as f64;
        (0..n)
            .map(|j| {
                if j + 1 == n {
                    self.max
                } else {
                    self.min + span * (j as f64) / last
                }
            })
            .collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// A curve α : [min, max] → E⁴ given by four coordinate expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub coords: [Expr; 4],
    pub label: String,
    pub domain: Interval,
}

impl CurveSpec {
    pub fn new(coords: [Expr; 4], label: impl Into<String>, domain: Interval) -> Result<Self> {
        let spec = CurveSpec {
            coords,
            label: label.into(),
            domain,
        };
        spec.probe()?;
        Ok(spec)
    }

    fn probe(&self) -> Result<()> {
        for t in self.domain.grid(PROBE_POINTS) {
            for (coord, e) in self.coords.iter().enumerate() {
                match e.eval_jet(t) {
                    Ok(j) if j.is_finite() => {}
                    _ => return Err(Error::DomainProbe { coord, t }),
                }
            }
        }
        Ok(())
    }

    pub fn with_domain(&self, domain: Interval) -> Result<Self> {
        CurveSpec::new(self.coords.clone(), self.label.clone(), domain)
    }

    /// Comma-separated source text that reparses to the same coordinates.
    pub fn to_text(&self) -> String {
        self.coords
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Parse `"x1, x2, x3, x4"` into a curve on `domain`.
pub fn parse_curve(text: &str, domain: Interval) -> Result<CurveSpec> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            expected: vec!["expression".into()],
        });
    }
    let exprs = parse_expr_list(text)?;
    let count = exprs.len();
    let coords: [Expr; 4] = exprs.try_into().map_err(|_| Error::Arity {
        offset: text.len(),
        message: format!("a curve needs 4 coordinate expressions, found {count}"),
    })?;
    CurveSpec::new(coords, text.trim(), domain)
}

/// α and its first four parameter derivatives at `s0`. `s0` is not checked
/// against the domain.
pub fn eval_curve_jet(spec: &CurveSpec, s0: f64) -> Result<JetVec4> {
    let s = Jet::variable(s0);
    let mut components = [Jet::default(); 4];
    for (slot, e) in components.iter_mut().zip(&spec.coords) {
        *slot = e.eval_with(&s)?;
    }
    Ok(JetVec4::new(components))
}

pub const BUILTIN_NAMES: [&str; 5] = ["example1", "example2", "circle", "line", "helix3"];

/// Catalog curves with their default parameter ranges.
pub fn builtin_curve(name: &str) -> Result<CurveSpec> {
    use std::f64::consts::PI;
    let (text, min, max) = match name {
        "example1" => ("sin(s), 2*s+1, 2*s-1, s", -1.0, 1.0),
        "example2" => (
            "sin(s/sqrt(2)), cos(s/sqrt(2)), sin(s)/sqrt(2), cos(s)/sqrt(2)",
            0.0,
            2.0 * PI,
        ),
        "circle" => ("cos(s), sin(s), 0, 0", 0.0, 2.0 * PI),
        "line" => ("s, 0, 0, 0", 0.0, 1.0),
        "helix3" => ("cos(s/sqrt(2)), sin(s/sqrt(2)), s/sqrt(2), 0", 0.0, 4.0 * PI),
        _ => {
            return Err(Error::UnknownCurve {
                name: name.to_string(),
                valid: BUILTIN_NAMES.to_vec(),
            })
        }
    };
    let mut spec = parse_curve(text, Interval::new(min, max)?)?;
    spec.label = name.to_string();
    Ok(spec)
}
