//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::Tolerances;
use crate::curvespec::{builtin_curve, parse_curve, parse_expr, parse_expr_list, Interval};
use crate::error::{Error, Result};
use crate::frame::{frame_angle, Flavor, FrameSample, Vec4};
use crate::ingest::ingest_samples;
use crate::pipeline::Analysis;
use crate::ptframe::{initial_frame, propagate_pt, synthesize_curve, KProfile, Method};
use crate::sampling::{sample_arclength, CurveSampling};

#[derive(Debug, Parser)]
#[command(name = "e4frame", version, about = "Frenet and parallel transport frames of curves in E4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parallel transport frame at every sample.
    Frames(RunArgs),
    /// k1, k2, k3 next to kappa, tau, sigma.
    Curvatures(RunArgs),
    /// Euler angles between the Frenet and parallel transport normals.
    Euler(RunArgs),
    /// Spherical / normal / rectifying / osculating report as JSON.
    Classify(RunArgs),
    /// Build a curve from prescribed k1, k2, k3.
    Synthesize(SynthArgs),
    /// RK4 against double reflection under step halving.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CurveSource {
    /// Four comma-separated coordinate expressions in s.
    #[arg(long)]
    pub expr: Option<String>,
    /// Catalog curve: example1, example2, circle, line, helix3.
    #[arg(long)]
    pub builtin: Option<String>,
    /// CSV file with t,x1,x2,x3,x4 rows.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Rk4,
    Dr,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Rk4 => Method::Rk4,
            MethodArg::Dr => Method::DoubleReflection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Parameter range `a:b`; ends may be constant expressions such as `2*pi`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "rk4")]
    pub method: MethodArg,
    /// Relative tolerance for the classification verdicts.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Three comma-separated expressions k1(s), k2(s), k3(s).
    #[arg(long)]
    pub profile: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0:1")]
    pub range: String,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    /// Starting point `x1,x2,x3,x4`.
    #[arg(long, allow_hyphen_values = true)]
    pub origin: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub source: CurveSource,
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Sample count of the coarsest run.
    #[arg(long, default_value_t = 65)]
    pub samples: usize,
    #[arg(long, default_value_t = 4)]
    pub halvings: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn constant(text: &str) -> Result<f64> {
    let text = text.trim();
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    let e = parse_expr(text)?;
    if e.uses_param() {
        return Err(Error::InvalidConfig(format!("'{text}' must not depend on s")));
    }
    e.eval(0.0)
}

pub fn parse_range(text: &str) -> Result<Interval> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| Error::InvalidConfig(format!("range '{text}' is not of the form a:b")))?;
    Interval::new(constant(a)?, constant(b)?)
}

fn parse_point(text: &str) -> Result<Vec4> {
    let vals = parse_expr_list(text)?
        .iter()
        .map(|e| {
            if e.uses_param() {
                Err(Error::InvalidConfig(format!("origin '{text}' must not depend on s")))
            } else {
                e.eval(0.0)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() != 4 {
        return Err(Error::InvalidConfig(format!("origin needs 4 coordinates, found {}", vals.len())));
    }
    Ok(Vec4::new(vals[0], vals[1], vals[2], vals[3]))
}

/// Sampling for the chosen source, without arclength jets for file input.
pub fn load_curve(source: &CurveSource, range: Option<&str>, samples: usize) -> Result<CurveSampling> {
    let range = range.map(parse_range).transpose()?;
    if let Some(path) = &source.input {
        if range.is_some() {
            return Err(Error::InvalidConfig("--range does not apply to --input".into()));
        }
        return ingest_samples(path);
    }
    let spec = match (&source.expr, &source.builtin) {
        (Some(text), None) => parse_curve(text, range.unwrap_or(Interval::new(0.0, 1.0)?))?,
        (None, Some(name)) => {
            let spec = builtin_curve(name)?;
            match range {
                Some(r) => spec.with_domain(r)?,
                None => spec,
            }
        }
        _ => return Err(Error::InvalidConfig("exactly one curve source is required".into())),
    };
    sample_arclength(&spec, samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Cell {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Cell {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

/// Rows with a fixed header, rendered as CSV or JSON from the same values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => format!("{:.16e}", v + 0.0),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Missing => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Num(v) => serde_json::Value::from(*v + 0.0),
                        Cell::Bool(b) => serde_json::Value::Bool(*b),
                        Cell::Missing => serde_json::Value::Null,
                    })
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({ "columns": self.header, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn frame_header(prefix: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    h.extend((1..=4).map(|i| format!("T{i}")));
    for m in 1..=3 {
        h.extend((1..=4).map(|i| format!("M{m}_{i}")));
    }
    h
}

fn frame_cells(f: &FrameSample) -> impl Iterator<Item = Cell> + '_ {
    f.vectors.iter().flat_map(|v| v.iter().map(|&x| Cell::Num(x)))
}

pub fn frames_table(a: &Analysis) -> Table {
    let mut t = Table::new(&frame_header(&["s"]));
    for f in &a.frames {
        let mut row = vec![Cell::Num(f.s)];
        row.extend(frame_cells(f));
        t.rows.push(row);
    }
    t
}

pub fn curvatures_table(a: &Analysis) -> Table {
    let mut t = Table::new(&["s", "k1", "k2", "k3", "kappa", "tau", "sigma"]);
    for (k, f) in a.k.iter().zip(&a.frenet) {
        t.rows.push(vec![
            k.s.into(),
            k.k1.into(),
            k.k2.into(),
            k.k3.into(),
            f.kappa.into(),
            f.tau.into(),
            f.sigma.into(),
        ]);
    }
    t
}

pub fn euler_table(a: &Analysis) -> Result<Table> {
    let mut t = Table::new(&[
        "s", "theta", "phi", "psi", "gimbal", "r_k1", "r_k2", "r_k3", "r_theta", "r_tau", "r_sigma",
        "r_constraint",
    ]);
    for row in a.euler_rows()? {
        let (theta, phi, psi, gimbal) = match row.angles {
            Some(e) => (e.theta.into(), e.phi.into(), e.psi.into(), Cell::Bool(e.gimbal)),
            None => (Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing),
        };
        let r = row.residuals;
        t.rows.push(vec![
            row.s.into(),
            theta,
            phi,
            psi,
            gimbal,
            r.r_k1.into(),
            r.r_k2.into(),
            r.r_k3.into(),
            r.r_theta.into(),
            r.r_tau.into(),
            r.r_sigma.into(),
            r.r_constraint.into(),
        ]);
    }
    Ok(t)
}

/// One row per refinement level: mean step, largest and final frame angle
/// between the two propagators, and the observed order of the final angle.
pub fn compare_table(
    source: &CurveSource,
    range: Option<&str>,
    samples: usize,
    halvings: usize,
) -> Result<Table> {
    if source.input.is_some() {
        return Err(Error::InvalidConfig("compare refines the sampling; use --expr or --builtin".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 samples, got {samples}")));
    }
    let mut t = Table::new(&["h", "max_angle", "terminal_angle", "order"]);
    let mut prev: Option<f64> = None;
    for level in 0..=halvings {
        let n = (samples - 1) * (1 << level) + 1;
        let samp = load_curve(source, range, n)?;
        let a = Analysis::from_sampling(samp, Method::Rk4)?;
        let frame0 = initial_frame(&a.sampling, &a.frenet_points[0])?;
        let dr = propagate_pt(&a.sampling, &frame0, Method::DoubleReflection)?;
        let max_angle = a
            .frames
            .iter()
            .zip(&dr)
            .map(|(x, y)| frame_angle(x, y))
            .fold(0.0, f64::max);
        let terminal = frame_angle(a.frames.last().expect("nonempty"), dr.last().expect("nonempty"));
        let h = a.sampling.arclens[a.sampling.len() - 1] / (a.sampling.len() - 1) as f64;
        let order = prev.map(|p| (p / terminal).log2());
        t.rows.push(vec![h.into(), max_angle.into(), terminal.into(), order.into()]);
        prev = Some(terminal);
    }
    Ok(t)
}

pub fn synthesize_table(args: &SynthArgs) -> Result<Table> {
    let domain = parse_range(&args.range)?;
    let profile = KProfile::parse(&args.profile, domain)?;
    if !(args.step > 0.0 && args.step.is_finite()) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {}", args.step)));
    }
    let origin = args.origin.as_deref().map(parse_point).transpose()?.unwrap_or_else(Vec4::zeros);
    let n = ((domain.max - domain.min) / args.step + 1e-9).floor() as usize + 1;
    if n < 2 {
        return Err(Error::InvalidConfig("step exceeds the profile range".into()));
    }
    let frame0 = FrameSample::identity(domain.min, Flavor::ParallelTransport);
    let (samp, frames) = synthesize_curve(&profile, &frame0, origin, args.step, n)?;
    let mut t = Table::new(&frame_header(&["s", "x1", "x2", "x3", "x4"]));
    for (j, f) in frames.iter().enumerate() {
        let mut row = vec![Cell::Num(samp.params[j])];
        row.extend(samp.position(j).iter().map(|&x| Cell::Num(x)));
        row.extend(frame_cells(f));
        t.rows.push(row);
    }
    Ok(t)
}

fn analysis(args: &RunArgs) -> Result<Analysis> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", args.tol)));
    }
    let samp = load_curve(&args.source, args.range.as_deref(), args.samples)?;
    Analysis::from_sampling(samp, args.method.into())
}

/// Run a parsed command and return the text to emit.
pub fn render(command: &Command) -> Result<String> {
    Ok(match command {
        Command::Frames(a) => frames_table(&analysis(a)?).render(a.output.format),
        Command::Curvatures(a) => curvatures_table(&analysis(a)?).render(a.output.format),
        Command::Euler(a) => euler_table(&analysis(a)?)?.render(a.output.format),
        Command::Classify(a) => {
            let tol = Tolerances {
                relation: a.tol,
                sphere: a.tol,
            };
            let report = analysis(a)?.classify(&tol)?;
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Command::Synthesize(a) => synthesize_table(a)?.render(a.output.format),
        Command::Compare(a) => {
            compare_table(&a.source, a.range.as_deref(), a.samples, a.halvings)?.render(a.output.format)
        }
    })
}

fn output_path(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Frames(a) | Command::Curvatures(a) | Command::Euler(a) | Command::Classify(a) => {
            a.output.out.as_ref()
        }
        Command::Synthesize(a) => a.output.out.as_ref(),
        Command::Compare(a) => a.output.out.as_ref(),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let text = render(&cli.command)?;
    match output_path(&cli.command) {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Exit status: 0 on success, 1 for input errors, 2 for numerical failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_input_error() {
        1
    } else {
        2
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let mut line = String::new();
            let _ = write!(line, "error: {e}");
            eprintln!("{}", line.replace('\n', " "));
            exit_code(&e)
        }
    }
}
