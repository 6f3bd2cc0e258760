use std::fmt;

use thiserror::Error;

/// Which elementary function rejected its argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuncTag {
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
    Pow,
}

impl FuncTag {
    pub fn name(self) -> &'static str {
        match self {
            FuncTag::Sin => "sin",
            FuncTag::Cos => "cos",
            FuncTag::Tan => "tan",
            FuncTag::Exp => "exp",
            FuncTag::Log => "log",
            FuncTag::Sqrt => "sqrt",
            FuncTag::Sinh => "sinh",
            FuncTag::Cosh => "cosh",
            FuncTag::Neg => "neg",
            FuncTag::Recip => "recip",
            FuncTag::Pow => "pow",
        }
    }
}

impl fmt::Display for FuncTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DomainError: {func} is undefined at {value}")]
    Domain { func: FuncTag, value: f64 },

    #[error("SyntaxError at byte {offset}: expected {}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
    },

    #[error("ArityError at byte {offset}: {message}")]
    Arity { offset: usize, message: String },

    #[error("DomainProbeError: coordinate {coord} is not finite at t = {t}")]
    DomainProbe { coord: usize, t: f64 },

    #[error("UnknownCurveError: unknown curve '{name}' (valid: {})", valid.join(", "))]
    UnknownCurve {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("StationaryPointError: speed {speed:e} below 1e-12 at t = {t}")]
    StationaryPoint { t: f64, speed: f64 },

    #[error("DegenerateFrameError: Gram-Schmidt level {level} residual {residual:e} at s = {s}")]
    DegenerateFrame { level: u8, residual: f64, s: f64 },

    #[error("MismatchedSeriesError: {0}")]
    MismatchedSeries(String),

    #[error("NotUnitError: vector norm {norm} differs from 1")]
    NotUnit { norm: f64 },

    #[error("HintMismatchError: hint tangent deviates from T0 by {deviation:e}")]
    HintMismatch { deviation: f64 },

    #[error("ZeroStepError: consecutive samples coincide at s = {s}")]
    ZeroStep { s: f64 },

    #[error("ProfileDomainError: s = {s} leaves the profile domain [{min}, {max}]")]
    ProfileDomain { s: f64, min: f64, max: f64 },

    #[error("TangentMismatchError: <T_frenet, T_pt> = {dot} at s = {s}")]
    TangentMismatch { dot: f64, s: f64 },

    #[error("NotRotationError: {0}")]
    NotRotation(String),

    #[error("TooFewSamplesError: {got} samples, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("DegenerateGeometryError: {0}")]
    DegenerateGeometry(String),

    #[error("ParseError at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("NonMonotoneParamError at line {line}: t = {t} does not increase")]
    NonMonotoneParam { line: usize, t: f64 },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("IoError: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short name of the variant as printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DomainError",
            Error::Syntax { .. } => "SyntaxError",
            Error::Arity { .. } => "ArityError",
            Error::DomainProbe { .. } => "DomainProbeError",
            Error::UnknownCurve { .. } => "UnknownCurveError",
            Error::StationaryPoint { .. } => "StationaryPointError",
            Error::DegenerateFrame { .. } => "DegenerateFrameError",
            Error::MismatchedSeries(_) => "MismatchedSeriesError",
            Error::NotUnit { .. } => "NotUnitError",
            Error::HintMismatch { .. } => "HintMismatchError",
            Error::ZeroStep { .. } => "ZeroStepError",
            Error::ProfileDomain { .. } => "ProfileDomainError",
            Error::TangentMismatch { .. } => "TangentMismatchError",
            Error::NotRotation(_) => "NotRotationError",
            Error::TooFewSamples { .. } => "TooFewSamplesError",
            Error::DegenerateGeometry(_) => "DegenerateGeometryError",
            Error::Parse { .. } => "ParseError",
            Error::NonMonotoneParam { .. } => "NonMonotoneParamError",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "IoError",
        }
    }

    /// Input problems are the caller's to fix; everything else is numerical.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::Arity { .. }
                | Error::DomainProbe { .. }
                | Error::UnknownCurve { .. }
                | Error::Parse { .. }
                | Error::NonMonotoneParam { .. }
                | Error::TooFewSamples { .. }
                | Error::InvalidConfig(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
