use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rhopath::algebraic::set_refinement_cap;
use rhopath::arith::{fmt_rational, parse_bipoly, rational_from_f64, BiPoly, ParsedPoly};
use rhopath::curve::{limit_interval, normalize_curve, rho_for_curve, BranchSummary, NormalizedCurve, RhoReport};
use rhopath::puiseux::{expand_with, newton_polygon, ExpandOptions};
use rhopath::sdo::{
    rho_from_trace, trace_path, verify_reparametrization, write_csv, RhoOptions, SdoInstance, TraceOptions, TraceResult,
    VerifyOptions, VerifyReport, DEFAULT_TOL,
};
use rhopath::Error;
use serde::Serialize;

const REFINE_ENV: &str = "RHOPATH_REFINE_CAP";

#[derive(Parser)]
#[command(name = "rhopath", version, about = "Puiseux branches of plane curves and analytic reparametrizations of SDO central paths")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PolyInput {
    /// Inline polynomial in mu (or X) and V (or Y, T)
    #[arg(long)]
    poly: Option<String>,
    /// File holding the polynomial
    #[arg(long)]
    file: Option<String>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1.0)]
    mu_start: f64,
    #[arg(long, default_value_t = 1e-8)]
    mu_end: f64,
    #[arg(long, default_value_t = 0.5)]
    ratio: f64,
    /// Newton tolerance on the scaled residual
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

impl GridArgs {
    fn options(&self) -> TraceOptions {
        TraceOptions { mu_start: self.mu_start, mu_end: self.mu_end, grid_ratio: self.ratio, tol: self.tol }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Lower Newton polygon with edge polynomials
    Polygon {
        #[command(flatten)]
        input: PolyInput,
    },
    /// Puiseux branches at mu = 0
    Expand {
        #[command(flatten)]
        input: PolyInput,
        /// Terms past the point where a branch separates
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Branches whose center matches a limit value, and their exponent
    RhoCurve {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, allow_hyphen_values = true)]
        limit: f64,
        /// Half-width of the limit interval
        #[arg(long, default_value_t = 0.0)]
        halfwidth: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Follow the central path on a geometric grid
    Trace {
        #[arg(long)]
        instance: String,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Exponent rho for every coordinate of the central path
    RhoSdo {
        #[arg(long)]
        instance: String,
        #[command(flatten)]
        grid: GridArgs,
        /// Instances with larger n use the order fit instead of elimination
        #[arg(long, default_value_t = 3)]
        max_elim_n: usize,
        /// Curve for one coordinate, as NAME=POLY (e.g. X12=...)
        #[arg(long = "curve")]
        curves: Vec<String>,
    },
    /// Finite-difference check of v(t^rho) near t = 0
    Verify {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        rho: u32,
        #[arg(long, default_value_t = 1e-4)]
        t_lo: f64,
        #[arg(long, default_value_t = 0.25)]
        t_hi: f64,
    },
}

enum Failure {
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = format!("{}: {e}", module_of(&e));
        if e.is_input_error() {
            Failure::Input(msg)
        } else {
            Failure::Compute(msg)
        }
    }
}

fn module_of(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } | Error::DivisionByZero => "arith",
        Error::TowerMismatch | Error::PrecisionExhausted { .. } => "algebraic",
        Error::NotSquareFree(_) | Error::IterationGuard { .. } | Error::Degenerate(_) => "puiseux",
        Error::Ambiguity(_) | Error::EmptyMatch { .. } => "curve",
        Error::Coordinate { source, .. } => module_of(source),
        Error::Io(_) => "cli",
        _ => "sdo",
    }
}

type Out = Result<String, Failure>;

fn read_poly(input: &PolyInput) -> Result<ParsedPoly, Failure> {
    let text = match (&input.poly, &input.file) {
        (Some(p), _) => p.clone(),
        (None, Some(f)) => std::fs::read_to_string(f).map_err(|e| Failure::Input(format!("cli: cannot read {f}: {e}")))?,
        (None, None) => return Err(Failure::Input("cli: one of --poly or --file is required".into())),
    };
    let text: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join(" ");
    Ok(parse_bipoly(text.trim())?)
}

fn read_instance(spec: &str) -> Result<SdoInstance, Failure> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("cli: cannot read {spec}: {e}")))?;
        return Ok(text.parse()?);
    }
    SdoInstance::builtin(spec).ok_or_else(|| {
        Failure::Input(format!("cli: no instance file '{spec}' and no built-in of that name (identity_<n>, elliptope, kl02_<n>)"))
    })
}

fn json<T: Serialize>(v: &T) -> Out {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Compute(format!("cli: {e}")))
}

fn no_csv(fmt: Format) -> Result<(), Failure> {
    if fmt == Format::Csv {
        return Err(Failure::Input("cli: csv output is only available for trace and verify".into()));
    }
    Ok(())
}

fn show(p: &BiPoly, parsed: &ParsedPoly) -> String {
    p.display_with(&parsed.mu_name, &parsed.v_name)
}

fn curve_header(s: &mut String, parsed: &ParsedPoly, curve: &NormalizedCurve) {
    let _ = writeln!(s, "curve: {}", show(&curve.original, parsed));
    if curve.normalized != curve.original {
        let _ = writeln!(s, "normalized: {}", show(&curve.normalized, parsed));
    }
    for t in &curve.transform_log {
        let _ = writeln!(s, "  {t}");
    }
}

fn branch_table(s: &mut String, branches: &[BranchSummary], mark: &[usize]) {
    for (i, b) in branches.iter().enumerate() {
        let m = if mark.contains(&i) { "*" } else { " " };
        let _ = writeln!(s, "{m} [{}] center={} q={} conjugates={} series={}", i + 1, b.center, b.q, b.conjugates, b.series);
    }
}

fn polygon(input: &PolyInput, fmt: Format) -> Out {
    no_csv(fmt)?;
    let parsed = read_poly(input)?;
    let segs = newton_polygon(&parsed.poly)?;
    if fmt == Format::Json {
        return json(&segs);
    }
    let mut s = String::new();
    for g in &segs {
        let _ = writeln!(
            s,
            "({}, {}) -> ({}, {})  gamma = {}  edge: {}",
            g.left.0,
            g.left.1,
            g.right.0,
            g.right.1,
            fmt_rational(&g.gamma),
            g.edge_polynomial.display_with("T")
        );
    }
    Ok(s)
}

#[derive(Serialize)]
struct ExpandOut<'a> {
    curve: &'a NormalizedCurve,
    branches: Vec<BranchSummary>,
}

fn expand_cmd(input: &PolyInput, terms: usize, fmt: Format) -> Out {
    no_csv(fmt)?;
    let parsed = read_poly(input)?;
    let curve = normalize_curve(&parsed.poly)?;
    let branches = expand_with(&curve.normalized, &ExpandOptions { max_extra_terms: terms, center_filter: None })?;
    let summaries: Vec<BranchSummary> = branches.iter().map(|b| BranchSummary::new(b, curve.theta, &parsed.mu_name)).collect();
    if fmt == Format::Json {
        return json(&ExpandOut { curve: &curve, branches: summaries });
    }
    let mut s = String::new();
    curve_header(&mut s, &parsed, &curve);
    let _ = writeln!(s, "branches: {}", branches.len());
    for b in &branches {
        let _ = writeln!(s, "  {} conjugates={}", b.render(&parsed.mu_name), b.conjugate_count);
    }
    Ok(s)
}

fn rho_curve(input: &PolyInput, limit: f64, halfwidth: f64, tol: f64, fmt: Format) -> Out {
    no_csv(fmt)?;
    let parsed = read_poly(input)?;
    let bad = |w: &str| Failure::Input(format!("cli: {w} must be a finite number"));
    let lim = limit_interval(limit, halfwidth).ok_or_else(|| bad("--limit"))?;
    if !(tol >= 0.0) {
        return Err(bad("--tol"));
    }
    let tol = rational_from_f64(tol).ok_or_else(|| bad("--tol"))?;
    let r = rho_for_curve(&parsed.poly, &lim, &tol)?;
    if fmt == Format::Json {
        return json(&r);
    }
    let mut s = String::new();
    curve_header(&mut s, &parsed, &r.curve);
    let _ = writeln!(s, "irreducible: {}", if r.irreducible { "yes" } else { "no" });
    let _ = writeln!(s, "branches (* = center matches {limit}):");
    branch_table(&mut s, &r.branches, &r.matched);
    let _ = writeln!(s, "rho_i = {}", r.rho_i);
    Ok(s)
}

fn trace_text(inst: &SdoInstance, tr: &TraceResult) -> String {
    let mut s = String::new();
    let last = tr.samples.last();
    let _ = writeln!(
        s,
        "samples: {}  last mu: {:e}  last residual: {:e}",
        tr.samples.len(),
        last.map_or(f64::NAN, |x| x.mu),
        last.map_or(f64::NAN, |x| x.residual)
    );
    let _ = writeln!(s, "{:<6} {:>24} {:>12} {:>8}", "coord", "limit", "width", "order");
    for k in 0..inst.dim() {
        let order = tr.order_estimates[k].as_ref().map_or("const".to_string(), |f| fmt_rational(&f.snapped));
        let _ = writeln!(s, "{:<6} {:>24.16e} {:>12.3e} {:>8}", inst.coordinate_name(k), tr.limit[k].value, tr.limit[k].width, order);
    }
    s
}

fn trace_cmd(instance: &str, grid: &GridArgs, fmt: Format) -> Out {
    let inst = read_instance(instance)?;
    let tr = trace_path(&inst, &grid.options())?;
    match fmt {
        Format::Json => json(&tr),
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&tr, &mut buf).map_err(|e| Failure::Compute(format!("cli: {e}")))?;
            Ok(String::from_utf8_lossy(&buf).into_owned())
        }
        Format::Text => Ok(trace_text(&inst, &tr)),
    }
}

fn rho_text(r: &RhoReport) -> String {
    let mut s = String::new();
    for c in &r.per_coordinate {
        let method = serde_json::to_value(c.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = write!(s, "{:<6} {:<9} rho_i = {}", c.name, method, c.rho_i);
        if let Some(f) = &c.fitted_exponent {
            let _ = write!(s, "  fit {f}");
        }
        if c.fit_consistent == Some(false) {
            let _ = write!(s, "  (fit disagrees)");
        }
        let _ = writeln!(s);
        for b in &c.branches {
            let _ = writeln!(s, "         center={} q={} series={}", b.center, b.q, b.series);
        }
    }
    let note = serde_json::to_value(r.optimality_note).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let _ = writeln!(s, "optimality: {note}");
    let _ = writeln!(s, "rho = {}", r.rho);
    s
}

fn rho_sdo(instance: &str, grid: &GridArgs, max_elim_n: usize, curves: &[String], fmt: Format) -> Out {
    no_csv(fmt)?;
    let inst = read_instance(instance)?;
    let mut opts = RhoOptions { trace: grid.options(), max_elim_n, ..Default::default() };
    for c in curves {
        let (name, poly) = c
            .split_once('=')
            .ok_or_else(|| Failure::Input(format!("cli: --curve expects NAME=POLY, got '{c}'")))?;
        let k = inst
            .coordinate_index(name.trim())
            .ok_or_else(|| Failure::Input(format!("cli: unknown coordinate '{}'", name.trim())))?;
        opts.curves.insert(k, parse_bipoly(poly)?.poly);
    }
    let tr = trace_path(&inst, &opts.trace)?;
    let r = rho_from_trace(&inst, &tr, &opts)?;
    if fmt == Format::Json {
        return json(&r);
    }
    Ok(rho_text(&r))
}

fn verify_text(r: &VerifyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rho = {}  window = [{:e}, {:e}]  levels = {}", r.rho, r.window.0, r.window.1, r.levels.len() - 1);
    let _ = writeln!(s, "{:<6} {:>12} {:>12} {:>8}  verdict", "coord", "max|d1|", "max|d2|", "growth");
    for c in &r.per_coordinate {
        let g = c.growth_exponent.map_or("-".to_string(), |g| format!("{g:.3}"));
        let v = if c.bounded { "bounded" } else { "unbounded" };
        let _ = writeln!(s, "{:<6} {:>12.4e} {:>12.4e} {:>8}  {v}", c.name, c.max_d1, c.max_d2, g);
    }
    let _ = writeln!(s, "verdict: {}", if r.bounded { "bounded" } else { "unbounded" });
    s
}

fn verify_cmd(instance: &str, rho: u32, t_lo: f64, t_hi: f64, fmt: Format) -> Out {
    let inst = read_instance(instance)?;
    let r = verify_reparametrization(&inst, rho, (t_lo, t_hi), &VerifyOptions::default())?;
    match fmt {
        Format::Json => json(&r),
        Format::Csv => {
            let names: Vec<String> = r.per_coordinate.iter().map(|c| c.name.clone()).collect();
            let mut s = format!("t,mu,{}\n", names.join(","));
            for p in &r.points {
                let vals: Vec<String> = p.values.iter().map(|v| format!("{v:e}")).collect();
                let _ = writeln!(s, "{:e},{:e},{}", p.t, p.mu, vals.join(","));
            }
            Ok(s)
        }
        Format::Text => Ok(verify_text(&r)),
    }
}

fn run(cli: &Cli) -> Out {
    if let Ok(v) = std::env::var(REFINE_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("cli: {REFINE_ENV} must be a positive integer, got '{v}'")))?;
        set_refinement_cap(n);
    }
    let f = cli.format;
    match &cli.cmd {
        Cmd::Polygon { input } => polygon(input, f),
        Cmd::Expand { input, terms } => expand_cmd(input, *terms, f),
        Cmd::RhoCurve { input, limit, halfwidth, tol } => rho_curve(input, *limit, *halfwidth, *tol, f),
        Cmd::Trace { instance, grid } => trace_cmd(instance, grid, f),
        Cmd::RhoSdo { instance, grid, max_elim_n, curves } => rho_sdo(instance, grid, *max_elim_n, curves, f),
        Cmd::Verify { instance, rho, t_lo, t_hi } => verify_cmd(instance, *rho, *t_lo, *t_hi, f),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut so = std::io::stdout().lock();
            if so.write_all(out.as_bytes()).and_then(|_| so.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
