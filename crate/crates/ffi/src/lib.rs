//! C interface to `e4frame`.
//!
//! Curves and analyses live behind opaque handles created by `e4f_*`
//! constructors and released with the matching `*_free` function. Every
//! fallible call returns an [`E4fStatus`]; on failure a description of the
//! problem is available from [`e4f_last_error`] on the same thread.
//!
//! Handles may be moved between threads but must not be used from two
//! threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use e4frame::classify::Tolerances;
use e4frame::curvespec::{builtin_curve, parse_curve, CurveSpec, Interval};
use e4frame::frame::{FrameSample, Vec4};
use e4frame::ingest::sampling_from_points;
use e4frame::pipeline::{Analysis, EulerRow};
use e4frame::ptframe::Method;
use e4frame::sampling::CurveSampling;
use e4frame::Error;

/// Result of every fallible call. Values from `E4F_STATUS_DOMAIN` on mirror
/// the library's error kinds one to one.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E4fStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    IndexOutOfRange = 3,
    Panic = 4,
    Domain = 10,
    Syntax = 11,
    Arity = 12,
    DomainProbe = 13,
    UnknownCurve = 14,
    StationaryPoint = 15,
    DegenerateFrame = 16,
    MismatchedSeries = 17,
    NotUnit = 18,
    HintMismatch = 19,
    ZeroStep = 20,
    ProfileDomain = 21,
    TangentMismatch = 22,
    NotRotation = 23,
    TooFewSamples = 24,
    DegenerateGeometry = 25,
    Parse = 26,
    NonMonotoneParam = 27,
    InvalidConfig = 28,
    Io = 29,
}

impl From<&Error> for E4fStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } => E4fStatus::Domain,
            Error::Syntax { .. } => E4fStatus::Syntax,
            Error::Arity { .. } => E4fStatus::Arity,
            Error::DomainProbe { .. } => E4fStatus::DomainProbe,
            Error::UnknownCurve { .. } => E4fStatus::UnknownCurve,
            Error::StationaryPoint { .. } => E4fStatus::StationaryPoint,
            Error::DegenerateFrame { .. } => E4fStatus::DegenerateFrame,
            Error::MismatchedSeries(_) => E4fStatus::MismatchedSeries,
            Error::NotUnit { .. } => E4fStatus::NotUnit,
            Error::HintMismatch { .. } => E4fStatus::HintMismatch,
            Error::ZeroStep { .. } => E4fStatus::ZeroStep,
            Error::ProfileDomain { .. } => E4fStatus::ProfileDomain,
            Error::TangentMismatch { .. } => E4fStatus::TangentMismatch,
            Error::NotRotation(_) => E4fStatus::NotRotation,
            Error::TooFewSamples { .. } => E4fStatus::TooFewSamples,
            Error::DegenerateGeometry(_) => E4fStatus::DegenerateGeometry,
            Error::Parse { .. } => E4fStatus::Parse,
            Error::NonMonotoneParam { .. } => E4fStatus::NonMonotoneParam,
            Error::InvalidConfig(_) => E4fStatus::InvalidConfig,
            Error::Io(_) => E4fStatus::Io,
        }
    }
}

/// Parallel-transport integrator.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E4fMethod {
    Rk4 = 0,
    DoubleReflection = 1,
}

impl From<E4fMethod> for Method {
    fn from(m: E4fMethod) -> Self {
        match m {
            E4fMethod::Rk4 => Method::Rk4,
            E4fMethod::DoubleReflection => Method::DoubleReflection,
        }
    }
}

enum Source {
    Spec(CurveSpec),
    Sampled(CurveSampling),
}

/// A curve given by expressions or by sampled points.
pub struct E4fCurve(Source);

/// Frames, curvatures and Euler angles of one sampled curve.
pub struct E4fAnalysis {
    analysis: Analysis,
    euler: OnceLock<Result<Vec<EulerRow>, Error>>,
}

/// Orthonormal frame at one sample. Rows are T, M1, M2, M3 for a transported
/// frame and T, N, B1, B2 for a Frenet frame.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct E4fFrame {
    pub s: f64,
    pub vectors: [[f64; 4]; 4],
}

/// Curvatures at one sample. `tau` and `sigma` are NaN where the Frenet
/// construction stops early.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct E4fCurvatures {
    pub s: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub kappa: f64,
    pub tau: f64,
    pub sigma: f64,
}

/// Euler angles of the Frenet frame relative to the transported frame.
/// Angles are NaN where the Frenet frame does not exist.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct E4fEuler {
    pub s: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub gimbal: bool,
}

/// Verdicts and sphere data. Fields that were not computed are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct E4fClassification {
    pub spherical: bool,
    pub normal: bool,
    pub rectifying: bool,
    pub osculating: bool,
    pub sphere_center: [f64; 4],
    pub sphere_radius: f64,
    pub radius_identity_gap: f64,
    pub anchor_constancy: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|cell| *cell.borrow_mut() = text);
}

struct Failure(E4fStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(E4fStatus::from(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> E4fStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => E4fStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {what}"));
            E4fStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(E4fStatus::NullArgument, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(E4fStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Box `value` into `*out`; nothing is allocated when `out` is null.
unsafe fn give<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn sample_index(a: &E4fAnalysis, j: usize) -> Result<(), Failure> {
    let n = a.analysis.frames.len();
    if j >= n {
        return Err(Failure(
            E4fStatus::IndexOutOfRange,
            format!("sample {j} out of range for {n} samples"),
        ));
    }
    Ok(())
}

fn frame_out(f: &FrameSample) -> E4fFrame {
    E4fFrame {
        s: f.s,
        vectors: f.vectors.map(|v| [v[0], v[1], v[2], v[3]]),
    }
}

/// Message describing the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn e4f_last_error() -> *const c_char {
    LAST_ERROR.with(|cell| cell.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn e4f_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Curve from four comma-separated coordinate expressions in `s` on
/// `[t_min, t_max]`.
///
/// # Safety
/// `coords` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_curve_from_expr(
    coords: *const c_char,
    t_min: f64,
    t_max: f64,
    out: *mut *mut E4fCurve,
) -> E4fStatus {
    guard(|| {
        let coords = text(coords, "coords")?;
        let spec = parse_curve(coords, Interval::new(t_min, t_max)?)?;
        give(out, E4fCurve(Source::Spec(spec)))
    })
}

/// One of the catalog curves (example1, example2, circle, line, helix3) on
/// its default range.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_curve_from_builtin(name: *const c_char, out: *mut *mut E4fCurve) -> E4fStatus {
    guard(|| {
        let spec = builtin_curve(text(name, "name")?)?;
        give(out, E4fCurve(Source::Spec(spec)))
    })
}

/// Curve from `n` samples: parameters `t[0..n]` strictly increasing and
/// points `xyzw[0..4n]` stored row by row.
///
/// # Safety
/// `t` must point to `n` doubles, `xyzw` to `4 * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn e4f_curve_from_samples(
    t: *const f64,
    xyzw: *const f64,
    n: usize,
    out: *mut *mut E4fCurve,
) -> E4fStatus {
    guard(|| {
        if t.is_null() {
            return Err(null("t"));
        }
        if xyzw.is_null() {
            return Err(null("xyzw"));
        }
        let params = std::slice::from_raw_parts(t, n).to_vec();
        let points = std::slice::from_raw_parts(xyzw, 4 * n)
            .chunks_exact(4)
            .map(|c| Vec4::new(c[0], c[1], c[2], c[3]))
            .collect();
        let samp = sampling_from_points(params, points)?;
        give(out, E4fCurve(Source::Sampled(samp)))
    })
}

/// # Safety
/// `curve` must come from an `e4f_curve_from_*` call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn e4f_curve_free(curve: *mut E4fCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Sample `curve` and compute both frames and all curvatures. `samples` is
/// the grid size for expression curves and ignored for sampled curves.
///
/// # Safety
/// `curve` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analyze(
    curve: *const E4fCurve,
    samples: usize,
    method: E4fMethod,
    out: *mut *mut E4fAnalysis,
) -> E4fStatus {
    guard(|| {
        let analysis = match &deref(curve, "curve")?.0 {
            Source::Spec(spec) => Analysis::from_spec(spec, samples, method.into())?,
            Source::Sampled(samp) => Analysis::from_sampling(samp.clone(), method.into())?,
        };
        let handle = E4fAnalysis {
            analysis,
            euler: OnceLock::new(),
        };
        give(out, handle)
    })
}

/// # Safety
/// `analysis` must come from `e4f_analyze` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_free(analysis: *mut E4fAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `analysis` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_len(analysis: *const E4fAnalysis) -> usize {
    analysis.as_ref().map_or(0, |a| a.analysis.frames.len())
}

/// Parallel-transport frame at sample `j`.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_frame(analysis: *const E4fAnalysis, j: usize, out: *mut E4fFrame) -> E4fStatus {
    guard(|| {
        let a = deref(analysis, "analysis")?;
        sample_index(a, j)?;
        put(out, frame_out(&a.analysis.frames[j]), "out")
    })
}

/// Frenet frame at sample `j`; `E4F_STATUS_DEGENERATE_FRAME` where it does not exist.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_frenet_frame(
    analysis: *const E4fAnalysis,
    j: usize,
    out: *mut E4fFrame,
) -> E4fStatus {
    guard(|| {
        let a = deref(analysis, "analysis")?;
        sample_index(a, j)?;
        let p = &a.analysis.frenet_points[j];
        match (&p.frame, p.degenerate_level) {
            (Some(f), _) => put(out, frame_out(f), "out"),
            (None, level) => {
                let level = level.unwrap_or(1);
                Err(Error::DegenerateFrame {
                    level,
                    residual: p.residuals[level as usize - 1],
                    s: p.s,
                }
                .into())
            }
        }
    })
}

/// Curvatures at sample `j`.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_curvatures(
    analysis: *const E4fAnalysis,
    j: usize,
    out: *mut E4fCurvatures,
) -> E4fStatus {
    guard(|| {
        let a = deref(analysis, "analysis")?;
        sample_index(a, j)?;
        let (k, f) = (&a.analysis.k[j], &a.analysis.frenet[j]);
        let c = E4fCurvatures {
            s: k.s,
            k1: k.k1,
            k2: k.k2,
            k3: k.k3,
            kappa: f.kappa,
            tau: f.tau.unwrap_or(f64::NAN),
            sigma: f.sigma.unwrap_or(f64::NAN),
        };
        put(out, c, "out")
    })
}

/// Euler angles at sample `j`. The first call computes all samples.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_euler(analysis: *const E4fAnalysis, j: usize, out: *mut E4fEuler) -> E4fStatus {
    guard(|| {
        let a = deref(analysis, "analysis")?;
        sample_index(a, j)?;
        let rows = a.euler.get_or_init(|| a.analysis.euler_rows()).as_ref().map_err(|e| Failure::from(e.clone()))?;
        let row = &rows[j];
        let e = match row.angles {
            Some(ang) => E4fEuler {
                s: row.s,
                theta: ang.theta,
                phi: ang.phi,
                psi: ang.psi,
                gimbal: ang.gimbal,
            },
            None => E4fEuler {
                s: row.s,
                theta: f64::NAN,
                phi: f64::NAN,
                psi: f64::NAN,
                gimbal: false,
            },
        };
        put(out, e, "out")
    })
}

fn tolerances(tol: f64) -> Result<Tolerances, Failure> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")).into());
    }
    Ok(Tolerances {
        relation: tol,
        sphere: tol,
    })
}

/// Spherical, normal, rectifying and osculating verdicts at tolerance `tol`.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_classify(
    analysis: *const E4fAnalysis,
    tol: f64,
    out: *mut E4fClassification,
) -> E4fStatus {
    guard(|| {
        let a = deref(analysis, "analysis")?;
        let r = a.analysis.classify(&tolerances(tol)?)?;
        let c = E4fClassification {
            spherical: r.spherical,
            normal: r.normal,
            rectifying: r.rectifying,
            osculating: r.osculating,
            sphere_center: r.sphere.map_or([f64::NAN; 4], |s| s.center),
            sphere_radius: r.sphere.map_or(f64::NAN, |s| s.radius),
            radius_identity_gap: r.radius_identity_gap.unwrap_or(f64::NAN),
            anchor_constancy: r.anchor_constancy.unwrap_or(f64::NAN),
        };
        put(out, c, "out")
    })
}

/// Full classification report as a JSON document. Release it with
/// `e4f_string_free`.
///
/// # Safety
/// `analysis` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn e4f_analysis_report_json(
    analysis: *const E4fAnalysis,
    tol: f64,
    out: *mut *mut c_char,
) -> E4fStatus {
    guard(|| {
        let a = deref(analysis, "analysis")?;
        let r = a.analysis.classify(&tolerances(tol)?)?;
        let json = serde_json::to_string(&r).map_err(|e| Failure(E4fStatus::InvalidConfig, e.to_string()))?;
        let text = CString::new(json).expect("JSON has no interior NUL");
        put(out, text.into_raw(), "out")
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn e4f_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
