//! Command-line front end.
//!
//! Exit codes: 0 success, 2 invalid parameters or usage, 3 divergent or
//! undefined request, 4 verify failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::cdd_profiles::{
    case_models, flat_cdd_profile, flat_curve, flat_h_set_empty, gl_curve, gl_profile, CddError,
    DEFAULT_V_GRID,
};
use crate::comparison::{jac_cd_check, sturm_compare, ComparisonError, JacobianSample};
use crate::functionals::{
    cheeger_n, cosh_constant_c, fm_bound, nash_constant, poincare_bounds, sobolev_constants, stability_w1,
    ConcentrationCurve, FunctionalError,
};
use crate::model_density::{eval_j, named_density, support_roots, CDParams, Family, ModelError};
use crate::numerics::ExtReal;
use crate::profile1d::{
    brute_force_flat, brute_force_interval_profile, flat_profile, normalize, v_grid, ProfileCurve, ProfileError,
    ORACLE_GRID,
};

#[derive(Parser, Debug)]
#[command(name = "cddprof", version, about = "Isoperimetric profiles under CD(ρ,N) with diameter bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Model Jacobian J_{H,ρ,N} at a point or on a t-grid.
    Density(DensityArgs),
    /// Gromov–Lévy profile GL♭_{ρ,N,D}.
    Gl(Common),
    /// Flat profile I♭_{ρ,N,D}.
    Flat(Common),
    /// Explicit model families for (ρ,N,D).
    Models(Common),
    /// Cheeger constants of the profile.
    Cheeger(CheegerArgs),
    /// Concentration bound obtained from the profile.
    Concentration(ConcentrationArgs),
    /// Applicable Poincaré constant bounds.
    Poincare(PoincareArgs),
    /// Closed-form functional-inequality constants.
    Constants(ConstantsArgs),
    /// Jac-CD certification and Sturm domination of a sampled Jacobian.
    Sturm(SturmArgs),
    /// Flat profile against the grid oracles for a named density.
    Oracle(OracleArgs),
    /// Run the built-in invariant suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    #[arg(long = "N", allow_hyphen_values = true)]
    n: Option<f64>,
    #[arg(long = "D", allow_hyphen_values = true)]
    d: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    #[arg(long = "v-grid")]
    v_grid: Option<usize>,
    #[arg(long = "r-grid")]
    r_grid: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "H", allow_hyphen_values = true, default_value_t = 0.0)]
    h: f64,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long = "t-grid", default_value_t = 201)]
    t_grid: usize,
}

#[derive(Args, Debug)]
struct CheegerArgs {
    #[command(flatten)]
    common: Common,
    /// Profile curve in JSON form; computed from (ρ,N,D) when absent.
    #[arg(long)]
    input: Option<PathBuf>,
    /// The input satisfies CD(0,N): use 2^{(N−1)/N} I(1/2).
    #[arg(long)]
    certified: bool,
}

#[derive(Args, Debug)]
struct ConcentrationArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "r-max", default_value_t = 5.0)]
    r_max: f64,
}

#[derive(Args, Debug)]
struct PoincareArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "d-che-inf")]
    d_che_inf: Option<f64>,
}

#[derive(Args, Debug)]
struct ConstantsArgs {
    #[command(flatten)]
    common: Common,
    /// N-dimensional Cheeger constant.
    #[arg(long = "d-che")]
    d_che: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<f64>,
    #[arg(long)]
    w1: Option<f64>,
}

#[derive(Args, Debug)]
struct SturmArgs {
    #[command(flatten)]
    common: Common,
    /// CSV with columns t,J.
    #[arg(long)]
    input: PathBuf,
    #[arg(long = "H", allow_hyphen_values = true)]
    h: Option<f64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Named density as JSON, e.g. {"family":"cosh","k":1,"exponent":-2}.
    #[arg(long)]
    family: String,
    #[arg(long, allow_hyphen_values = true)]
    lo: f64,
    #[arg(long, allow_hyphen_values = true)]
    hi: f64,
    /// Oracle grid size.
    #[arg(long = "grid", default_value_t = ORACLE_GRID)]
    grid_n: usize,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Suite {
    All,
    Numerics,
    Profiles,
    Functionals,
    Comparison,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

fn undefined(msg: impl Into<String>) -> Failure {
    Failure { code: 3, msg: msg.into() }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Failure {
        match e {
            ModelError::OutsideDomain => undefined(e.to_string()),
            _ => usage(e.to_string()),
        }
    }
}

impl From<ProfileError> for Failure {
    fn from(e: ProfileError) -> Failure {
        match e {
            ProfileError::Model(m) => m.into(),
            ProfileError::BadInput(_) => usage(e.to_string()),
            _ => undefined(e.to_string()),
        }
    }
}

impl From<CddError> for Failure {
    fn from(e: CddError) -> Failure {
        match e {
            CddError::Profile(p) => p.into(),
            _ => undefined(e.to_string()),
        }
    }
}

impl From<FunctionalError> for Failure {
    fn from(e: FunctionalError) -> Failure {
        match e {
            FunctionalError::BadInput(_) | FunctionalError::BadExponents => usage(e.to_string()),
            FunctionalError::Profile(p) => p.into(),
            _ => undefined(e.to_string()),
        }
    }
}

impl From<ComparisonError> for Failure {
    fn from(e: ComparisonError) -> Failure {
        match e {
            ComparisonError::BadSample(_) => usage(e.to_string()),
            _ => undefined(e.to_string()),
        }
    }
}

/// Reads `key=value` lines; `#` starts a comment.
fn read_config(path: &PathBuf) -> Result<HashMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line without '=': {line}")))?;
        map.insert(k.trim().trim_start_matches("--").to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_cfg<T: std::str::FromStr>(map: &HashMap<String, String>, key: &str) -> Result<Option<T>, Failure> {
    match map.get(key) {
        None => Ok(None),
        Some(s) => s
            .parse::<T>()
            .map(Some)
            .map_err(|_| usage(format!("config {key}: cannot parse '{s}'"))),
    }
}

impl Common {
    /// Fills unset flags from the config file (flags take precedence).
    fn resolve(mut self) -> Result<Common, Failure> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let m = read_config(&path)?;
        self.rho = self.rho.or(parse_cfg(&m, "rho")?);
        self.n = self.n.or(parse_cfg(&m, "N")?);
        self.d = self.d.or(parse_cfg(&m, "D")?);
        self.v = self.v.or(parse_cfg(&m, "v")?);
        self.v_grid = self.v_grid.or(parse_cfg(&m, "v-grid")?);
        self.r_grid = self.r_grid.or(parse_cfg(&m, "r-grid")?);
        self.tol = self.tol.or(parse_cfg(&m, "tol")?);
        if self.format.is_none() {
            if let Some(s) = m.get("format") {
                self.format = Some(Format::from_str(s, true).map_err(|_| usage(format!("config format: {s}")))?);
            }
        }
        if self.out.is_none() {
            self.out = m.get("out").map(PathBuf::from);
        }
        Ok(self)
    }

    fn params(&self) -> Result<CDParams, Failure> {
        let rho = self.rho.ok_or_else(|| usage("missing --rho"))?;
        let n = self.n.ok_or_else(|| usage("missing --N"))?;
        let d = self.d.unwrap_or(f64::INFINITY);
        Ok(CDParams::new(rho, n, d)?)
    }

    fn grid(&self) -> Vec<f64> {
        v_grid(self.v_grid.unwrap_or(DEFAULT_V_GRID))
    }

    fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }
}

fn ext_str(x: ExtReal) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{}", x.value())
    }
}

/// Renders a curve as CSV, JSON or a single-polyline SVG plot.
pub fn emit_curve(c: &ProfileCurve, format: &str) -> Option<String> {
    match format {
        "csv" => Some(c.to_csv()),
        "json" => Some(format!("{}\n", serde_json::to_string_pretty(&c.to_json()).ok()?)),
        "svg" => Some(curve_svg(c)),
        _ => None,
    }
}

fn curve_svg(c: &ProfileCurve) -> String {
    let (w, h, m) = (640.0, 400.0, 48.0);
    let finite: Vec<(f64, f64)> = c
        .grid
        .iter()
        .zip(&c.values)
        .filter(|(_, x)| x.is_finite())
        .map(|(v, x)| (*v, x.value()))
        .collect();
    let omitted = c.grid.len() - finite.len();
    let ymax = finite.iter().map(|p| p.1).fold(0.0, f64::max);
    let ymax = if ymax > 0.0 { ymax } else { 1.0 };
    let sx = |v: f64| m + v * (w - 2.0 * m);
    let sy = |y: f64| h - m - y / ymax * (h - 2.0 * m);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(
        s,
        r#"<metadata>{{"method":"{}","points":{},"omitted_infinite":{omitted}}}</metadata>"#,
        c.method,
        c.grid.len()
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{:.2} {:.2} H{:.2} M{:.2} {:.2} V{:.2}" stroke="black" fill="none"/>"#,
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sx(0.0),
        sy(0.0),
        sy(ymax)
    );
    for i in 0..=4 {
        let v = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{v}</text>"#,
            sy(0.0) + 5.0,
            sy(0.0) + 18.0,
            x = sx(v),
            y = sy(0.0)
        );
        let yv = ymax * v;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{yv:.3}</text>"#,
            sx(0.0) - 5.0,
            sx(0.0),
            sx(0.0) - 8.0,
            sy(yv) + 4.0,
            y = sy(yv)
        );
    }
    let pts: Vec<String> = finite.iter().map(|&(v, y)| format!("{:.2},{:.2}", sx(v), sy(y))).collect();
    let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#, pts.join(" "));
    s.push_str("</svg>\n");
    s
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
        Format::Svg => "svg",
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn emit(&mut self, path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
            None => self
                .out
                .write_all(text.as_bytes())
                .map_err(|e| usage(format!("stdout: {e}"))),
        }
    }

    fn emit_json(&mut self, path: &Option<PathBuf>, v: &Value) -> Result<(), Failure> {
        let text = format!("{}\n", serde_json::to_string_pretty(v).expect("json"));
        self.emit(path, &text)
    }
}

fn check_v(v: f64) -> Result<f64, Failure> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(usage(format!("v = {v} outside [0, 1]")))
    }
}

fn cmd_profile(io: &mut Io, c: Common, flat: bool) -> Result<(), Failure> {
    let c = c.resolve()?;
    let p = c.params()?;
    if flat && flat_h_set_empty(&p) {
        return Err(undefined("infinite-mass"));
    }
    if let Some(v) = c.v {
        let v = check_v(v)?;
        let x = if flat { flat_cdd_profile(&p, v)? } else { gl_profile(&p, v)? };
        return io.emit(&c.out, &format!("{}\n", ext_str(x)));
    }
    let grid = c.grid();
    let curve = if flat { flat_curve(&p, &grid)? } else { gl_curve(&p, &grid)? };
    let text = emit_curve(&curve, format_name(c.format())).expect("known format");
    io.emit(&c.out, &text)
}

fn cmd_density(io: &mut Io, a: DensityArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let p = c.params()?;
    if let Some(t) = a.t {
        return io.emit(&c.out, &format!("{}\n", ext_str(eval_j(a.h, &p, t))));
    }
    let r = support_roots(a.h, &p);
    let lo = r.xi_minus.max(-5.0);
    let hi = r.xi_plus.min(5.0);
    let n = a.t_grid.max(2);
    let mut s = String::from("t,J\n");
    for i in 0..n {
        let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let _ = writeln!(s, "{t:.6},{}", ext_str(eval_j(a.h, &p, t)));
    }
    io.emit(&c.out, &s)
}

fn cmd_models(io: &mut Io, c: Common) -> Result<(), Failure> {
    let c = c.resolve()?;
    let p = c.params()?;
    let cases = case_models(&p)?;
    io.emit_json(&c.out, &serde_json::to_value(&cases).expect("json"))
}

fn load_or_compute_curve(c: &Common, input: &Option<PathBuf>) -> Result<ProfileCurve, Failure> {
    if let Some(path) = input {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        return Ok(ProfileCurve::from_json(&v)?);
    }
    let p = c.params()?;
    Ok(gl_curve(&p, &c.grid())?)
}

fn cmd_cheeger(io: &mut Io, a: CheegerArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let curve = load_or_compute_curve(&c, &a.input)?;
    let n = c
        .n
        .or_else(|| curve.params.map(|p| p.n.value()))
        .ok_or_else(|| usage("missing --N"))?;
    let r = cheeger_n(&curve, n, a.certified)?;
    io.emit_json(&c.out, &json!({ "report": r, "certified_cd0": a.certified }))
}

fn cmd_concentration(io: &mut Io, a: ConcentrationArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let curve = load_or_compute_curve(&c, &None)?;
    let n = c.r_grid.unwrap_or(101).max(2);
    let r: Vec<f64> = (0..n).map(|i| a.r_max * i as f64 / (n - 1) as f64).collect();
    let k = ConcentrationCurve::from_profile(&curve, &r)?;
    match c.format() {
        Format::Json => io.emit_json(&c.out, &serde_json::to_value(&k).expect("json")),
        _ => {
            let mut s = String::from("r,K\n");
            for (r, k) in k.r.iter().zip(&k.k) {
                let _ = writeln!(s, "{r:.6},{k:.12}");
            }
            io.emit(&c.out, &s)
        }
    }
}

fn cmd_poincare(io: &mut Io, a: PoincareArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let p = c.params()?;
    let b = poincare_bounds(&p, a.d_che_inf)?;
    io.emit_json(&c.out, &serde_json::to_value(b).expect("json"))
}

fn err_json<T: serde::Serialize, E: std::fmt::Display>(r: Result<T, E>) -> Value {
    match r {
        Ok(x) => serde_json::to_value(x).expect("json"),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn cmd_constants(io: &mut Io, a: ConstantsArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let n = c.n.ok_or_else(|| usage("missing --N"))?;
    let d = a.d_che;
    let mut out = json!({ "N": n, "d_che": d, "c_two_level": cosh_constant_c() });
    out["fm_bound"] = err_json(fm_bound(d, n));
    if let Some(w1) = a.w1 {
        out["stability_w1"] = err_json(stability_w1(d, n, w1));
    }
    if let Some(p) = a.p {
        out["nash"] = err_json(nash_constant(p, n, d));
        let q = a.q.unwrap_or_else(|| {
            let iq = 1.0 / p + 1.0 / n;
            if iq == 0.0 {
                f64::INFINITY
            } else {
                1.0 / iq
            }
        });
        out["sobolev"] = err_json(sobolev_constants(p, q, n, d));
    }
    io.emit_json(&c.out, &out)
}

fn cmd_sturm(io: &mut Io, a: SturmArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let p = c.params()?;
    let text = std::fs::read_to_string(&a.input).map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let s = JacobianSample::from_csv(&text, a.h)?;
    let min_residual = jac_cd_check(&s, &p)?;
    let r = sturm_compare(&s, &p, c.tol.unwrap_or(1e-9))?;
    io.emit_json(
        &c.out,
        &json!({ "H": s.h, "min_residual": min_residual, "dominated": r.dominated, "max_violation": r.max_violation }),
    )
}

fn cmd_oracle(io: &mut Io, a: OracleArgs) -> Result<(), Failure> {
    let c = a.common.resolve()?;
    let fam: Family = serde_json::from_str(&a.family).map_err(|e| usage(format!("--family: {e}")))?;
    let m = named_density(fam, a.lo, a.hi)?;
    let wd = normalize(&m, m.lo, m.hi)?;
    let v = check_v(c.v.ok_or_else(|| usage("missing --v"))?)?;
    let exact = flat_profile(&wd, v)?;
    let grid = brute_force_flat(&wd, a.grid_n, v)?;
    let interval = brute_force_interval_profile(&wd, a.grid_n, v)?;
    io.emit_json(
        &c.out,
        &json!({ "v": v, "flat": ext_str(exact), "oracle_flat": ext_str(grid), "oracle_interval": ext_str(interval) }),
    )
}

fn check(lines: &mut Vec<String>, name: &str, ok: bool) -> bool {
    lines.push(format!("{} {name}", if ok { "PASS" } else { "FAIL" }));
    ok
}

fn suite_numerics(lines: &mut Vec<String>) -> bool {
    use crate::numerics::{find_root, integrate, minimize_scalar, Bracket, EndKind, Interval, Quadrature};
    let q = Quadrature::default();
    let iv = Interval::new(0.0, std::f64::consts::PI)
        .lo_kind(EndKind::Algebraic(-0.5))
        .hi_kind(EndKind::Algebraic(-0.5));
    let a = integrate(|t: f64| t.sin().powf(-0.5), &iv, &q).map(|x| x.value());
    let mut ok = check(lines, "numerics/singular-integral", matches!(a, Ok(x) if (x - 5.244115108584239).abs() < 1e-8));
    let line = Interval::new(f64::NEG_INFINITY, f64::INFINITY)
        .lo_kind(EndKind::ExpTail(f64::NEG_INFINITY))
        .hi_kind(EndKind::ExpTail(f64::NEG_INFINITY));
    let g = integrate(|t: f64| (-t * t).exp(), &line, &q);
    ok &= check(
        lines,
        "numerics/gaussian-integral",
        matches!(g, Ok(x) if (x.value() - std::f64::consts::PI.sqrt()).abs() < 1e-9),
    );
    let r = Bracket::new(1.0, 2.0).and_then(|b| find_root(|x| x * x - 2.0, b, 1e-12));
    ok &= check(lines, "numerics/root", matches!(r, Ok(x) if (x - 2f64.sqrt()).abs() < 1e-11));
    let m = minimize_scalar(f64::cos, 0.0, 2.0 * std::f64::consts::PI, 8, 1e-10);
    ok &= check(lines, "numerics/minimize", matches!(m, Ok((x, y)) if (x - std::f64::consts::PI).abs() < 1e-6 && (y + 1.0).abs() < 1e-12));
    ok
}

fn suite_profiles(lines: &mut Vec<String>) -> bool {
    let inf = f64::INFINITY;
    let gauss = CDParams::new(1.0, inf, inf).expect("params");
    let g = gl_profile(&gauss, 0.5).map(|x| x.value());
    let mut ok = check(
        lines,
        "profiles/gaussian-half",
        matches!(g, Ok(x) if (x - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-6),
    );
    for (rho, n) in [(1.0, -2.0), (1.0, -0.5), (1.0, 3.0)] {
        let p = CDParams::new(rho, n, inf).expect("params");
        let mut good = true;
        for v in [0.1, 0.3, 0.5] {
            match (gl_profile(&p, v), flat_cdd_profile(&p, v), gl_profile(&p, 1.0 - v)) {
                (Ok(a), Ok(b), Ok(c)) => {
                    good &= a.value() <= b.value() + 1e-6 && (a.value() - c.value()).abs() < 1e-8;
                }
                _ => good = false,
            }
        }
        ok &= check(lines, &format!("profiles/order-and-symmetry rho={rho} N={n}"), good);
    }
    ok
}

fn suite_functionals(lines: &mut Vec<String>) -> bool {
    use crate::functionals::{cosh_model_cheeger_inf, lorentz_norm};
    let p = CDParams::new(1.0, -1.0, f64::INFINITY).expect("params");
    let mut ok = check(
        lines,
        "functionals/cosh-cheeger",
        matches!(cosh_model_cheeger_inf(&p), Ok(x) if (x - 0.5f64.sqrt()).abs() < 1e-9),
    );
    ok &= check(
        lines,
        "functionals/lorentz-indicator",
        matches!(lorentz_norm(&[(1.0, 0.3), (0.0, 0.7)], 2.0, 1.0), Ok(x) if (x - 0.3f64.sqrt()).abs() < 1e-12),
    );
    ok &= check(
        lines,
        "functionals/fm-bound",
        matches!(fm_bound(1.0, -2.0), Ok(x) if (x - 2.0 * 2f64.sqrt()).abs() < 1e-10),
    );
    ok &= check(
        lines,
        "functionals/stability",
        matches!(stability_w1(1.0, -2.0, 1.0), Ok(x) if (x - 0.04618).abs() < 1e-4),
    );
    ok
}

fn suite_comparison(lines: &mut Vec<String>) -> bool {
    use crate::comparison::{cauchy_schwarz_split, model_sample};
    let mut good = true;
    for i in 1..=20 {
        for j in 1..=20 {
            let (a, b) = (i as f64 * 0.37, -(j as f64) * 0.53);
            for (al, be) in [(a, -b), (a, b), (b, a)] {
                if let Ok(c) = cauchy_schwarz_split(al, be, 1.3 * i as f64 - 9.0, 7.0 - 0.7 * j as f64) {
                    if c.valid_range {
                        good &= c.lhs >= c.rhs - 1e-12 * c.lhs.abs().max(c.rhs.abs()).max(1.0);
                    }
                }
            }
        }
    }
    let mut ok = check(lines, "comparison/cauchy-schwarz-split", good);
    let mut eq = true;
    for (h, rho, n) in [(0.7, 1.0, -1.0), (-1.2, -0.5, 3.0), (0.3, 2.0, f64::INFINITY)] {
        let p = CDParams::new(rho, n, f64::INFINITY).expect("params");
        eq &= match model_sample(h, &p, 1001).and_then(|s| sturm_compare(&s, &p, 1e-12)) {
            Ok(r) => r.dominated,
            Err(_) => false,
        };
    }
    ok &= check(lines, "comparison/equality-case-domination", eq);
    ok
}

fn cmd_verify(io: &mut Io, a: VerifyArgs) -> Result<bool, Failure> {
    let mut lines = Vec::new();
    let all = a.suite == Suite::All;
    let mut ok = true;
    if all || a.suite == Suite::Numerics {
        ok &= suite_numerics(&mut lines);
    }
    if all || a.suite == Suite::Profiles {
        ok &= suite_profiles(&mut lines);
    }
    if all || a.suite == Suite::Functionals {
        ok &= suite_functionals(&mut lines);
    }
    if all || a.suite == Suite::Comparison {
        ok &= suite_comparison(&mut lines);
    }
    io.emit(&None, &(lines.join("\n") + "\n"))?;
    Ok(ok)
}

fn init_threads() {
    if let Some(n) = std::env::var("CDDPROF_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // Fails harmlessly if a pool already exists (repeated calls in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Runs the CLI on `args` (program name first), writing results to `out`
/// and diagnostics to `err`. Returns the exit code.
pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    init_threads();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let mut io = Io { out };
    let res = match cli.cmd {
        Cmd::Density(a) => cmd_density(&mut io, a),
        Cmd::Gl(c) => cmd_profile(&mut io, c, false),
        Cmd::Flat(c) => cmd_profile(&mut io, c, true),
        Cmd::Models(c) => cmd_models(&mut io, c),
        Cmd::Cheeger(a) => cmd_cheeger(&mut io, a),
        Cmd::Concentration(a) => cmd_concentration(&mut io, a),
        Cmd::Poincare(a) => cmd_poincare(&mut io, a),
        Cmd::Constants(a) => cmd_constants(&mut io, a),
        Cmd::Sturm(a) => cmd_sturm(&mut io, a),
        Cmd::Oracle(a) => cmd_oracle(&mut io, a),
        Cmd::Verify(a) => match cmd_verify(&mut io, a) {
            Ok(true) => Ok(()),
            Ok(false) => Err(Failure {
                code: 4,
                msg: "verify: some checks failed".into(),
            }),
            Err(e) => Err(e),
        },
    };
    match res {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "{}", f.msg);
            f.code
        }
    }
}

/// Runs the CLI with the process's stdout and stderr.
pub fn run(args: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("cddprof").chain(args.iter().copied()).map(String::from).collect();
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run_with(&argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn gaussian_value() {
        let (code, out, _) = call(&["gl", "--rho", "1", "--N", "inf", "--D", "inf", "--v", "0.5"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("0.398942"), "{out}");
    }

    #[test]
    fn divergent_flat() {
        let (code, _, err) = call(&["flat", "--rho", "0", "--N", "-1", "--D", "inf", "--v", "0.5"]);
        assert_eq!(code, 3);
        assert!(err.contains("infinite-mass"));
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["nonsense"]).0, 2);
        assert_eq!(call(&["gl", "--bogus", "1"]).0, 2);
        assert_eq!(call(&["gl", "--rho", "1", "--N", "-1", "--D", "-1", "--v", "0.5"]).0, 2);
        assert_eq!(call(&["gl", "--rho", "1", "--N", "-1", "--v", "1.5"]).0, 2);
        assert_eq!(call(&["gl", "--rho", "-1", "--N", "1", "--D", "2", "--v", "0.5"]).0, 3);
    }

    #[test]
    fn verify_all() {
        let (code, out, _) = call(&["verify", "--suite", "all"]);
        assert_eq!(code, 0, "{out}");
        assert!(!out.contains("FAIL"));
    }

    #[test]
    fn curve_formats() {
        let grid = vec![0.0, 1.0];
        let c = ProfileCurve::new(grid, vec![ExtReal::INFINITY, ExtReal::clamped(0.25)], None, "flat").unwrap();
        let csv = emit_curve(&c, "csv").unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.contains("0.000000,inf"));
        let svg = emit_curve(&c, "svg").unwrap();
        assert!(svg.contains("\"omitted_infinite\":1") && svg.contains("<polyline"));
        let json: Value = serde_json::from_str(&emit_curve(&c, "json").unwrap()).unwrap();
        assert_eq!(ProfileCurve::from_json(&json).unwrap(), c);
        assert!(emit_curve(&c, "png").is_none());
    }
}
