//! Library side of the `latcount` binary, so commands can be driven in-process.

pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use latcount::bounds::{default_rho, skriganov_bound_homogeneous, skriganov_bound_inhomogeneous};
use latcount::boxcount::{count_points, volume, AlignedBox};
use latcount::dio::{
    application_box_count, application_lattice, check_assumptions, count_n, phi_from_cf, DioCountResult, IrrationalSpec,
    PhiBound, PhiKind,
};
use latcount::dual_compare::{example31_build, nu_profile_compare};
use latcount::linalg::{dual_basis, parse_matrix, LatticeBasis, MatrixN};
use latcount::nu::{geometric_grid, hermite_threshold, s_sum, weak_admissibility_probe, NuProfile};
use latcount::scalar::{precision_digits, set_precision_digits};
use latcount::prelude::*;

use config::{resolve, to_value, ConfigFile, Dec};
use report::{Body, Format, Report};

type S = BigFloat;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<latcount::Error> for CliError {
    fn from(e: latcount::Error) -> Self {
        CliError { code: if e.is_degeneracy() { 2 } else { 1 }, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "latcount", version, about = "Lattice point counting in aligned boxes and related Diophantine experiments")]
pub struct Cli {
    /// Working precision in significant decimal digits (at least 30).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Seed for randomized constructions.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file with the same keys; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Profile ν(Γ,ρ) on a geometric grid and flag zero-coordinate minimizers.
    Nu(NuFlags),
    /// Count lattice points in a closed aligned box.
    Count(BoxFlags),
    /// Evaluate the counting-error bound for a lattice and box.
    Bound(BoundFlags),
    /// Compare ν on a lattice and on its dual.
    DualCompare(DualCompareFlags),
    /// Build a lattice whose dual meets a coordinate hyperplane.
    Example31(Example31Flags),
    /// Count solutions of 0 ≤ p + qα − y ≤ ε, 1 ≤ q ≤ t.
    Dio(DioFlags),
    /// The same count over a list of t values.
    DioSweep(DioSweepFlags),
    /// Evaluate S(Γ,r).
    SSum(SSumFlags),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Nu(_) => "nu",
            Command::Count(_) => "count",
            Command::Bound(_) => "bound",
            Command::DualCompare(_) => "dual-compare",
            Command::Example31(_) => "example31",
            Command::Dio(_) => "dio",
            Command::DioSweep(_) => "dio-sweep",
            Command::SSum(_) => "s-sum",
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Args, Debug, Serialize, Default)]
pub struct LatticeFlags {
    /// Basis matrix as JSON rows (columns generate the lattice), or @file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    /// identity:N, app (uses --alpha) or example31:N (uses --seed).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// α for the app preset: surd:a,b,c,d or dec:<digits>.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Use the dual lattice.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub dual: bool,
}

#[derive(Serialize, Deserialize, Debug, Default, Clone)]
pub struct LatticeParams {
    #[serde(default)]
    pub matrix: Option<String>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub alpha: Option<String>,
    #[serde(default)]
    pub dual: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct NuFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeFlags,
    /// Largest probe radius.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<String>,
    /// Number of grid radii.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
struct NuParams {
    #[serde(flatten)]
    lattice: LatticeParams,
    #[serde(default = "rho_max_nu")]
    rho_max: Dec,
    #[serde(default = "grid_nu")]
    grid: usize,
}

fn rho_max_nu() -> Dec {
    Dec::new("100")
}
fn grid_nu() -> usize {
    50
}

#[derive(Args, Debug, Serialize)]
pub struct BoxFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeFlags,
    /// Side lengths, comma separated.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Lower corner, comma separated (default: origin).
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
}

#[derive(Serialize, Deserialize, Debug)]
struct BoxParams {
    #[serde(flatten)]
    lattice: LatticeParams,
    #[serde(default)]
    t: Option<String>,
    #[serde(default)]
    y: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub boxed: BoxFlags,
    /// Free parameter ρ (default max(vol^{2−2/n}, 1.01·γₙ^{1/2})).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    /// Homogeneous form: --t is a unit-volume box dilated by --dilation.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub homogeneous: bool,
    /// Dilation factor for --homogeneous
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilation: Option<String>,
}

#[derive(Serialize, Deserialize, Debug)]
struct BoundParams {
    #[serde(flatten)]
    boxed: BoxParams,
    #[serde(default)]
    rho: Option<Dec>,
    #[serde(default)]
    homogeneous: bool,
    #[serde(default)]
    dilation: Option<Dec>,
}

#[derive(Args, Debug, Serialize)]
pub struct DualCompareFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeFlags,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_min: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
struct DualCompareParams {
    #[serde(flatten)]
    lattice: LatticeParams,
    #[serde(default)]
    rho_min: Option<Dec>,
    #[serde(default = "rho_max_cmp")]
    rho_max: Dec,
    #[serde(default = "grid_cmp")]
    grid: usize,
}

fn rho_max_cmp() -> Dec {
    Dec::new("50")
}
fn grid_cmp() -> usize {
    20
}

#[derive(Args, Debug, Serialize)]
pub struct Example31Flags {
    /// Dimension (at least 3).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Largest probe radius for both lattices.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

#[derive(Serialize, Deserialize, Debug)]
struct Example31Params {
    #[serde(default = "three")]
    n: usize,
    #[serde(default = "rho_max_ex")]
    rho_max: Dec,
    #[serde(default = "grid_ex")]
    grid: usize,
}

fn three() -> usize {
    3
}
fn rho_max_ex() -> Dec {
    Dec::new("20")
}
fn grid_ex() -> usize {
    25
}

#[derive(Args, Debug, Serialize)]
pub struct DioFlags {
    /// Irrational α in (0,1): surd:a,b,c,d for (a+b√c)/d, or dec:<digits> (default: golden ratio)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Inhomogeneous shift y
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Window width ε, 0 < ε < √α
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    /// Upper limit t for q
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Largest q scanned for the φ constant
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<u64>,
}

#[derive(Serialize, Deserialize, Debug)]
struct DioParams {
    #[serde(default = "golden")]
    alpha: String,
    #[serde(default = "y_default")]
    y: Dec,
    #[serde(default = "eps_default")]
    eps: Dec,
    #[serde(default = "t_default")]
    t: Dec,
    #[serde(default = "q_max_default")]
    q_max: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct DioSweepFlags {
    /// Irrational α in (0,1): surd:a,b,c,d for (a+b√c)/d, or dec:<digits> (default: golden ratio)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Inhomogeneous shift y
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Window width ε, 0 < ε < √α
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    /// Comma-separated t values.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    /// Largest q scanned for the φ constant
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<u64>,
}

#[derive(Serialize, Deserialize, Debug)]
struct DioSweepParams {
    #[serde(default = "golden")]
    alpha: String,
    #[serde(default = "y_default")]
    y: Dec,
    #[serde(default = "eps_default")]
    eps: Dec,
    #[serde(default = "t_sweep_default")]
    t: String,
    #[serde(default = "q_max_default")]
    q_max: u64,
}

fn golden() -> String {
    IrrationalSpec::golden().to_string()
}
fn y_default() -> Dec {
    Dec::new("0.3")
}
fn eps_default() -> Dec {
    Dec::new("0.5")
}
fn t_default() -> Dec {
    Dec::new("1000")
}
fn t_sweep_default() -> String {
    "100,1000,10000,100000,1000000".into()
}
fn q_max_default() -> u64 {
    1_000_000
}

#[derive(Args, Debug, Serialize)]
pub struct SSumFlags {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeFlags,
    /// Radius of the exponent family.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
}

#[derive(Serialize, Deserialize, Debug)]
struct SSumParams {
    #[serde(flatten)]
    lattice: LatticeParams,
    #[serde(default = "r_default")]
    r: Dec,
}

fn r_default() -> Dec {
    Dec::new("2")
}

fn num(d: &Dec) -> CliResult<S> {
    Ok(S::parse_decimal(&d.0)?)
}

fn list(s: &str) -> CliResult<Vec<S>> {
    s.split(',').map(|x| Ok(S::parse_decimal(x)?)).collect()
}

fn text(x: &S) -> String {
    x.to_decimal_string()
}

fn rows_of(m: &MatrixN<S>) -> Value {
    Value::Array(m.rows().iter().map(|r| Value::Array(r.iter().map(|x| Value::String(text(x))).collect())).collect())
}

fn load_lattice(p: &LatticeParams, seed: u64) -> CliResult<LatticeBasis<S>> {
    let lattice = match (&p.matrix, &p.preset) {
        (Some(_), Some(_)) => return Err(CliError::input("give either --matrix or --preset, not both")),
        (None, None) => return Err(CliError::input("no lattice given: use --matrix or --preset")),
        (Some(m), None) => {
            let src = match m.strip_prefix('@') {
                Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {path}: {e}")))?,
                None => m.clone(),
            };
            LatticeBasis::new(parse_matrix(&src)?)?
        }
        (None, Some(preset)) => {
            let (name, arg) = preset.split_once(':').unwrap_or((preset.as_str(), ""));
            let dim = || arg.parse::<usize>().map_err(|_| CliError::input(format!("preset {preset:?} needs a dimension")));
            match name {
                "identity" => LatticeBasis::identity(dim()?),
                "app" => {
                    let spec = IrrationalSpec::parse(p.alpha.as_deref().unwrap_or(&golden()))?;
                    application_lattice(&spec.value::<S>()?)?
                }
                "example31" => example31_build::<S>(dim()?, seed)?.lattice,
                _ => return Err(CliError::input(format!("unknown preset {name:?}"))),
            }
        }
    };
    Ok(if p.dual { dual_basis(&lattice)? } else { lattice })
}

fn load_box(p: &BoxParams, n: usize) -> CliResult<AlignedBox<S>> {
    let t = list(p.t.as_deref().ok_or_else(|| CliError::input("box side lengths --t are required"))?)?;
    let y = match &p.y {
        Some(y) => list(y)?,
        None => vec![S::from_int(0); t.len()],
    };
    if t.len() != n || y.len() != n {
        return Err(latcount::Error::DimensionMismatch { expected: n, got: if t.len() != n { t.len() } else { y.len() } }.into());
    }
    Ok(AlignedBox::new(t, y)?)
}

struct Ctx {
    seed: u64,
    meta: Map<String, Value>,
}

impl Ctx {
    fn report(&self, command: &'static str, params: Value, body: Body, default_format: Format) -> Report {
        let mut meta = self.meta.clone();
        meta.insert("config".into(), params);
        Report { command, meta, summary: Map::new(), body, exit_code: 0, default_format }
    }
}

fn profile_rows(p: &NuProfile<S>) -> Body {
    let n = p.minimizers.first().map_or(0, |m| m.v.len());
    let mut headers = vec!["rho".to_string(), "nu".to_string()];
    headers.extend((1..=n).map(|i| format!("x{i}")));
    headers.push("zero_flag".into());
    let rows = (0..p.rho_grid.len())
        .map(|i| {
            let mut r = vec![text(&p.rho_grid[i]), text(&p.values[i])];
            r.extend(p.minimizers[i].v.iter().map(text));
            r.push(p.zero_flags[i].to_string());
            r
        })
        .collect();
    Body::Table { headers, rows }
}

fn cmd_nu(ctx: &Ctx, p: NuParams) -> CliResult<Report> {
    let l = load_lattice(&p.lattice, ctx.seed)?;
    let profile = weak_admissibility_probe(&l, &num(&p.rho_max)?, p.grid)?;
    let mut r = ctx.report("nu", to_value(&p), profile_rows(&profile), Format::Csv);
    r.summary.insert("flagged".into(), json!(profile.is_flagged()));
    r.summary.insert("first_flag".into(), profile.first_flag().map_or(Value::Null, |x| json!(text(x))));
    if profile.is_flagged() {
        r.exit_code = 2;
    }
    Ok(r)
}

fn cmd_count(ctx: &Ctx, p: BoxParams) -> CliResult<Report> {
    let l = load_lattice(&p.lattice, ctx.seed)?;
    let b = load_box(&p, l.dim())?;
    let c = count_points(&l, &b)?;
    let vol = volume(&b);
    let error = (S::from_int(c.count as i64) - vol.clone()).abs();
    let body = json!({
        "count": c.count,
        "volume": text(&vol),
        "error": text(&error),
        "boundary_points": c.boundary_total,
    });
    Ok(ctx.report("count", to_value(&p), Body::Record(body), Format::Json))
}

fn cmd_bound(ctx: &Ctx, p: BoundParams) -> CliResult<Report> {
    let l = load_lattice(&p.boxed.lattice, ctx.seed)?;
    let b = load_box(&p.boxed, l.dim())?;
    let body = if p.homogeneous {
        let t = num(p.dilation.as_ref().ok_or_else(|| CliError::input("--homogeneous needs --dilation"))?)?;
        let rho = match &p.rho {
            Some(r) => num(r)?,
            None => default_rho(&b.dilate(&t))?,
        };
        to_value(&skriganov_bound_homogeneous(&l, &b, &t, &rho)?)
    } else {
        let rho = match &p.rho {
            Some(r) => num(r)?,
            None => default_rho(&b)?,
        };
        to_value(&skriganov_bound_inhomogeneous(&l, &b, &rho)?)
    };
    Ok(ctx.report("bound", to_value(&p), Body::Record(body), Format::Json))
}

fn cmd_dual_compare(ctx: &Ctx, p: DualCompareParams) -> CliResult<Report> {
    let l = load_lattice(&p.lattice, ctx.seed)?;
    let start = match &p.rho_min {
        Some(r) => num(r)?,
        None => hermite_threshold::<S>(l.dim())? * S::ratio(101, 100),
    };
    let grid = geometric_grid(&start, &num(&p.rho_max)?, p.grid)?;
    let c = nu_profile_compare(&l, &grid)?;
    let headers = ["rho", "nu_primal", "nu_dual", "abs_diff"].map(String::from).to_vec();
    let rows = c.rows.iter().map(|r| vec![text(&r.rho), text(&r.nu_primal), text(&r.nu_dual), text(&r.abs_diff)]).collect();
    let mut r = ctx.report("dual-compare", to_value(&p), Body::Table { headers, rows }, Format::Csv);
    r.summary.insert("max_abs_discrepancy".into(), json!(text(&c.max_abs_discrepancy)));
    r.summary.insert("primal_flagged".into(), json!(c.primal_flagged));
    r.summary.insert("dual_flagged".into(), json!(c.dual_flagged));
    Ok(r)
}

fn cmd_example31(ctx: &Ctx, p: Example31Params) -> CliResult<Report> {
    let e = example31_build::<S>(p.n, ctx.seed)?;
    let rho_max = num(&p.rho_max)?;
    let (primal, dual) =
        rayon::join(|| weak_admissibility_probe(&e.lattice, &rho_max, p.grid), || weak_admissibility_probe(&e.dual, &rho_max, p.grid));
    let (primal, dual) = (primal?, dual?);
    let body = json!({
        "n": p.n,
        "attempts": e.attempts,
        "basis": rows_of(e.lattice.basis()),
        "dual_basis": rows_of(e.dual.basis()),
        "dual_corner": text(&e.dual_corner),
        "primal_flagged": primal.is_flagged(),
        "dual_flagged": dual.is_flagged(),
        "dual_first_flag": dual.first_flag().map(text),
    });
    Ok(ctx.report("example31", to_value(&p), Body::Record(body), Format::Json))
}

fn phi_json(phi: &PhiBound<S>) -> Value {
    let kind = match &phi.kind {
        PhiKind::Constant(c) => json!({"constant": text(c)}),
        PhiKind::Table(steps) => json!({"table": steps.iter().map(|(q, v)| json!([q.to_string(), text(v)])).collect::<Vec<_>>()}),
    };
    json!({
        "kind": kind,
        "max_q_checked": phi.max_q_checked.to_string(),
        "min_observed": text(&phi.min_observed),
        "argmin_q": phi.argmin_q.to_string(),
        "valid_up_to": phi.valid_up_to.map(|q| q.to_string()),
    })
}

struct DioRow {
    t: S,
    n: u64,
    box_count: u64,
    assembled: Option<DioCountResult<S>>,
}

fn dio_row(alpha: &S, y: &S, eps: &S, t: &S, phi: &PhiBound<S>) -> CliResult<DioRow> {
    check_assumptions(alpha, eps, t)?;
    let (n, box_count) = rayon::join(|| count_n(alpha, y, eps, t), || application_box_count(alpha, y, eps, t));
    let n = n?;
    // a tabulated φ cannot be evaluated past its certified range
    let assembled = match DioCountResult::assemble(n, eps, t, phi) {
        Ok(r) => Some(r),
        Err(latcount::Error::AssumptionViolated(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(DioRow { t: t.clone(), n, box_count: box_count?, assembled })
}

fn cmd_dio(ctx: &Ctx, p: DioParams) -> CliResult<Report> {
    let spec = IrrationalSpec::parse(&p.alpha)?;
    let alpha: S = spec.value()?;
    let phi = phi_from_cf::<S>(&spec, p.q_max as i128)?;
    let (eps, y, t) = (num(&p.eps)?, num(&p.y)?, num(&p.t)?);
    let row = dio_row(&alpha, &y, &eps, &t, &phi)?;
    let vol = eps * t;
    let a = row.assembled.as_ref();
    let body = json!({
        "N": row.n,
        "volume": text(&vol),
        "abs_error": text(&(S::from_int(row.n as i64) - vol.clone()).abs()),
        "E": a.map(|a| text(&a.e)),
        "E_prime": a.map(|a| text(&a.e_prime)),
        "bound": a.map(|a| text(&a.bound)),
        "box_count": row.box_count,
        "oracle_diff": (row.n as i64 - row.box_count as i64).abs(),
        "phi": phi_json(&phi),
    });
    Ok(ctx.report("dio", to_value(&p), Body::Record(body), Format::Json))
}

pub const SWEEP_HEADERS: [&str; 11] =
    ["t", "eps", "N", "vol", "abs_error", "ln_vol", "E", "E_prime", "bound", "box_count", "oracle_diff"];

fn cmd_dio_sweep(ctx: &Ctx, p: DioSweepParams) -> CliResult<Report> {
    let spec = IrrationalSpec::parse(&p.alpha)?;
    let alpha: S = spec.value()?;
    let (eps, y) = (num(&p.eps)?, num(&p.y)?);
    let mut ts = list(&p.t)?;
    ts.sort_by(latcount::scalar::cmp_real);
    for t in &ts {
        check_assumptions(&alpha, &eps, t)?;
    }
    let phi = phi_from_cf::<S>(&spec, p.q_max as i128)?;
    let results: Vec<CliResult<DioRow>> = ts.par_iter().map(|t| dio_row(&alpha, &y, &eps, t, &phi)).collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut worst_ratio = S::from_int(0);
    let mut worst_diff = 0i64;
    for r in results {
        let r = r?;
        let vol = eps.clone() * r.t.clone();
        let abs_error = (S::from_int(r.n as i64) - vol.clone()).abs();
        let ln_vol = vol.ln();
        worst_ratio = worst_ratio.max_of(abs_error.clone() / ln_vol.clone());
        let diff = (r.n as i64 - r.box_count as i64).abs();
        worst_diff = worst_diff.max(diff);
        let opt = |f: fn(&DioCountResult<S>) -> &S| r.assembled.as_ref().map(|a| text(f(a))).unwrap_or_default();
        rows.push(vec![
            text(&r.t),
            text(&eps),
            r.n.to_string(),
            text(&vol),
            text(&abs_error),
            text(&ln_vol),
            opt(|a| &a.e),
            opt(|a| &a.e_prime),
            opt(|a| &a.bound),
            r.box_count.to_string(),
            diff.to_string(),
        ]);
    }
    let headers = SWEEP_HEADERS.map(String::from).to_vec();
    let mut r = ctx.report("dio-sweep", to_value(&p), Body::Table { headers, rows }, Format::Csv);
    let phi_text = phi.constant_value().map(text).unwrap_or_else(|| "table".into());
    r.summary.insert("phi".into(), json!(phi_text));
    r.summary.insert("max_abs_error_over_ln_vol".into(), json!(text(&worst_ratio)));
    r.summary.insert("max_oracle_diff".into(), json!(worst_diff));
    Ok(r)
}

fn cmd_s_sum(ctx: &Ctx, p: SSumParams) -> CliResult<Report> {
    let l = load_lattice(&p.lattice, ctx.seed)?;
    let s = s_sum(&l, &num(&p.r)?)?;
    let body = json!({
        "value": text(&s.value),
        "members": s.members,
        "max_term": text(&s.max_term),
        "max_term_exponents": s.max_term_exponents,
    });
    Ok(ctx.report("s-sum", to_value(&p), Body::Record(body), Format::Json))
}

fn global<T: for<'de> Deserialize<'de>>(cfg: &ConfigFile, key: &str) -> CliResult<Option<T>> {
    cfg.globals
        .get(key)
        .map(|v| serde_json::from_value(v.clone()).map_err(|e| CliError::input(format!("config key {key}: {e}"))))
        .transpose()
}

/// Resolved global settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub precision: u32,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub workers: Option<usize>,
}

const KNOWN_GLOBALS: [&str; 5] = ["precision", "seed", "out", "format", "workers"];

fn settings(cli: &Cli, cfg: &ConfigFile) -> CliResult<Settings> {
    if let Some(bad) = cfg.globals.keys().find(|k| !KNOWN_GLOBALS.contains(&k.as_str())) {
        return Err(CliError::input(format!("unknown config key {bad:?}")));
    }
    Ok(Settings {
        precision: match cli.precision {
            Some(p) => p,
            None => global(cfg, "precision")?.unwrap_or(latcount::scalar::DEFAULT_PRECISION_DIGITS),
        },
        seed: match cli.seed {
            Some(s) => s,
            None => global(cfg, "seed")?.unwrap_or(1),
        },
        out: cli.out.clone().or(global(cfg, "out")?),
        format: cli.format.or(global(cfg, "format")?),
        workers: cli.workers.or(global(cfg, "workers")?),
    })
}

/// Runs a parsed command line and returns the report with its exit code.
pub fn run(cli: &Cli) -> CliResult<(Report, Settings)> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let st = settings(cli, &cfg)?;
    set_precision_digits(st.precision)?;
    let mut meta = Map::new();
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta.insert("precision".into(), json!(precision_digits()));
    meta.insert("seed".into(), json!(st.seed));
    let ctx = Ctx { seed: st.seed, meta };
    let name = cli.command.name();
    let table = cfg.table(name);
    let dispatch = || -> CliResult<Report> {
        match &cli.command {
            Command::Nu(f) => cmd_nu(&ctx, resolve(table, f)?),
            Command::Count(f) => cmd_count(&ctx, resolve(table, f)?),
            Command::Bound(f) => cmd_bound(&ctx, resolve(table, f)?),
            Command::DualCompare(f) => cmd_dual_compare(&ctx, resolve(table, f)?),
            Command::Example31(f) => cmd_example31(&ctx, resolve(table, f)?),
            Command::Dio(f) => cmd_dio(&ctx, resolve(table, f)?),
            Command::DioSweep(f) => cmd_dio_sweep(&ctx, resolve(table, f)?),
            Command::SSum(f) => cmd_s_sum(&ctx, resolve(table, f)?),
        }
    };
    let report = match st.workers {
        Some(0) => return Err(CliError::input("workers must be positive")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::input(format!("thread pool: {e}")))?
            .install(dispatch)?,
        None => dispatch()?,
    };
    Ok((report, st))
}

/// Parses `args`, runs the command and returns `(output text, exit code)`.
/// Errors are rendered as a single `error:` line.
pub fn run_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => return (e.to_string(), if e.use_stderr() { 1 } else { 0 }),
    };
    match run(&cli) {
        Ok((report, st)) => (report.render(st.format), report.exit_code),
        Err(e) => (format!("error: {e}\n"), e.code),
    }
}
