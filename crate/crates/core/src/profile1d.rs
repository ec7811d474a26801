//! Normalized one-dimensional measures, quantiles, the flat (half-line)
//! isoperimetric profile, transfer from isoperimetry to concentration, and
//! brute-force grid oracles for the flat and interval profiles.

use serde_json::{json, Value};
use thiserror::Error;

use crate::model_density::{CDParams, DensityFn, Dim, ModelDensity, ModelError};
use crate::numerics::{integrate_table, EndKind, ExtReal, Integral, MassTable, NumericsError, Quadrature};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("zero-mass")]
    ZeroMass,
    #[error("infinite-mass")]
    InfiniteMass,
    #[error("degenerate-profile")]
    DegenerateProfile,
    #[error("bad-input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, ProfileError>;

/// Mass resolution of [`WeightedDensity1D::quantile`].
pub const QUANTILE_TOL: f64 = 1e-12;
/// Default oracle grid size.
pub const ORACLE_GRID: usize = 20001;

#[derive(Debug, Clone)]
enum Cdf {
    Quad(MassTable),
    Trapezoid(Vec<f64>),
}

#[derive(Debug, Clone)]
enum Source {
    Model(ModelDensity, DensityFn),
    Tabulated { t: Vec<f64>, f: Vec<f64> },
}

/// A finite positive measure on an interval with its normalizing mass and
/// cumulative-mass machinery.
#[derive(Debug, Clone)]
pub struct WeightedDensity1D {
    source: Source,
    lo: f64,
    hi: f64,
    z: f64,
    cdf: Cdf,
}

/// Normalizes `f` restricted to `[lo, hi]`.
pub fn normalize(f: &ModelDensity, lo: f64, hi: f64) -> Result<WeightedDensity1D> {
    normalize_with(f, lo, hi, &Quadrature::default())
}

pub fn normalize_with(f: &ModelDensity, lo: f64, hi: f64, q: &Quadrature) -> Result<WeightedDensity1D> {
    let m = f.restricted(lo, hi);
    let (a, b) = m.domain();
    let iv = m.interval();
    let ev = m.evaluator();
    match integrate_table(|t| ev.eval(t), &iv, q)? {
        Integral::Divergent => Err(ProfileError::InfiniteMass),
        Integral::Finite(tab) => {
            let z = tab.total();
            if !(z > 0.0) {
                return Err(ProfileError::ZeroMass);
            }
            if !z.is_finite() {
                return Err(ProfileError::InfiniteMass);
            }
            Ok(WeightedDensity1D {
                source: Source::Model(m, ev),
                lo: a,
                hi: b,
                z,
                cdf: Cdf::Quad(tab),
            })
        }
    }
}

/// Builds a measure from a tabulated density (piecewise linear between
/// samples, trapezoidal mass).
pub fn normalize_tabulated(t: Vec<f64>, f: Vec<f64>) -> Result<WeightedDensity1D> {
    if t.len() < 2 || t.len() != f.len() {
        return Err(ProfileError::BadInput("need at least two (t, f) samples".into()));
    }
    if t.windows(2).any(|w| !(w[0] < w[1])) || t.iter().any(|x| !x.is_finite()) {
        return Err(ProfileError::BadInput("t must be finite and strictly increasing".into()));
    }
    if f.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(ProfileError::BadInput("density samples must be finite and nonnegative".into()));
    }
    let mut cum = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    cum.push(0.0);
    for i in 1..t.len() {
        acc += 0.5 * (f[i - 1] + f[i]) * (t[i] - t[i - 1]);
        cum.push(acc);
    }
    if acc <= 0.0 {
        return Err(ProfileError::ZeroMass);
    }
    let (lo, hi) = (t[0], t[t.len() - 1]);
    Ok(WeightedDensity1D {
        source: Source::Tabulated { t, f },
        lo,
        hi,
        z: acc,
        cdf: Cdf::Trapezoid(cum),
    })
}

impl WeightedDensity1D {
    /// Total mass `Z` before normalization.
    pub fn mass(&self) -> f64 {
        self.z
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn model(&self) -> Option<&ModelDensity> {
        match &self.source {
            Source::Model(m, _) => Some(m),
            Source::Tabulated { .. } => None,
        }
    }

    /// Unnormalized density at `t` (`0` at infinite ends).
    pub fn density(&self, t: f64) -> f64 {
        if t.is_infinite() {
            return 0.0;
        }
        match &self.source {
            Source::Model(m, ev) => {
                if t == self.lo || t == self.hi {
                    let iv = m.interval();
                    let kind = if t == self.lo { iv.lo_kind } else { iv.hi_kind };
                    match kind {
                        EndKind::Algebraic(k) if k < 0.0 => return f64::INFINITY,
                        EndKind::Algebraic(k) if k > 0.0 => return 0.0,
                        _ => {}
                    }
                }
                let v = ev.eval(t);
                if v.is_nan() {
                    0.0
                } else {
                    v
                }
            }
            Source::Tabulated { t: ts, f } => {
                if t < self.lo || t > self.hi {
                    return 0.0;
                }
                let i = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
                let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
                f[i - 1] + w * (f[i] - f[i - 1])
            }
        }
    }

    /// Normalized density `f(t)/Z`.
    pub fn normalized_density(&self, t: f64) -> ExtReal {
        ExtReal::clamped(self.density(t) / self.z)
    }

    /// Normalized mass of `(lo, t]`.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        let m = match (&self.cdf, &self.source) {
            (Cdf::Quad(tab), Source::Model(_, ev)) => tab.mass_below(&|s| ev.eval(s), t)?,
            (Cdf::Trapezoid(cum), Source::Tabulated { t: ts, f }) => {
                if t <= self.lo {
                    0.0
                } else if t >= self.hi {
                    self.z
                } else {
                    let i = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
                    let dt = t - ts[i - 1];
                    let slope = (f[i] - f[i - 1]) / (ts[i] - ts[i - 1]);
                    cum[i - 1] + f[i - 1] * dt + 0.5 * slope * dt * dt
                }
            }
            _ => unreachable!("cdf kind matches source"),
        };
        Ok((m / self.z).clamp(0.0, 1.0))
    }

    /// The point `t` with normalized cumulative mass `v`.
    pub fn quantile(&self, v: f64) -> Result<f64> {
        if v <= 0.0 {
            return Ok(self.lo);
        }
        if v >= 1.0 {
            return Ok(self.hi);
        }
        match (&self.cdf, &self.source) {
            (Cdf::Quad(tab), Source::Model(_, ev)) => {
                Ok(tab.inverse(&|s| ev.eval(s), v * self.z, QUANTILE_TOL * self.z)?)
            }
            (Cdf::Trapezoid(cum), Source::Tabulated { t: ts, f }) => {
                let m = v * self.z;
                let i = cum.partition_point(|&c| c <= m).clamp(1, cum.len() - 1);
                let r = m - cum[i - 1];
                let h = ts[i] - ts[i - 1];
                let a = 0.5 * (f[i] - f[i - 1]) / h;
                let b = f[i - 1];
                // a·x² + b·x = r on [0, h]
                let x = if a.abs() < 1e-300 || (a * r).abs() < 1e-14 * b * b {
                    if b > 0.0 {
                        r / b
                    } else {
                        0.0
                    }
                } else {
                    2.0 * r / (b + (b * b + 4.0 * a * r).max(0.0).sqrt())
                };
                Ok(ts[i - 1] + x.clamp(0.0, h))
            }
            _ => unreachable!("cdf kind matches source"),
        }
    }
}

/// Flat profile at `v`: the smaller boundary measure of the two half-lines
/// of normalized mass `v`.
pub fn flat_profile(wd: &WeightedDensity1D, v: f64) -> Result<ExtReal> {
    let v = v.clamp(0.0, 1.0);
    let left = wd.quantile(v)?;
    let right = wd.quantile(1.0 - v)?;
    Ok(wd.normalized_density(left).min(wd.normalized_density(right)))
}

/// Equispaced grid of `n ≥ 2` points on `[0, 1]`, endpoints included.
pub fn v_grid(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| if i + 1 == n { 1.0 } else { i as f64 / (n - 1) as f64 })
        .collect()
}

/// A sampled profile `v ↦ I(v)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub grid: Vec<f64>,
    pub values: Vec<ExtReal>,
    pub params: Option<CDParams>,
    pub method: String,
}

fn ext_to_json(x: ExtReal) -> Value {
    if x.is_infinite() {
        json!("inf")
    } else {
        json!(x.value())
    }
}

fn real_to_json(x: f64) -> Value {
    if x == f64::INFINITY {
        json!("inf")
    } else if x == f64::NEG_INFINITY {
        json!("-inf")
    } else {
        json!(x)
    }
}

fn json_to_real(v: &Value) -> Option<f64> {
    match v {
        Value::String(s) if s == "inf" => Some(f64::INFINITY),
        Value::String(s) if s == "-inf" => Some(f64::NEG_INFINITY),
        _ => v.as_f64(),
    }
}

impl ProfileCurve {
    pub fn new(grid: Vec<f64>, values: Vec<ExtReal>, params: Option<CDParams>, method: &str) -> Result<ProfileCurve> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(ProfileError::BadInput("grid/value length mismatch".into()));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ProfileError::BadInput("grid must be strictly increasing".into()));
        }
        if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
            return Err(ProfileError::BadInput("grid must contain 0 and 1".into()));
        }
        Ok(ProfileCurve {
            grid,
            values,
            params,
            method: method.to_string(),
        })
    }

    /// Linear interpolation of finite values; `+∞` propagates.
    pub fn interpolate(&self, v: f64) -> ExtReal {
        let g = &self.grid;
        let i = g.partition_point(|&x| x <= v).clamp(1, g.len() - 1);
        let (a, b) = (self.values[i - 1], self.values[i]);
        if g[i - 1] == v {
            return a;
        }
        if g[i] == v {
            return b;
        }
        if a.is_infinite() || b.is_infinite() {
            return ExtReal::INFINITY;
        }
        let w = (v - g[i - 1]) / (g[i] - g[i - 1]);
        ExtReal::clamped(a.value() + w * (b.value() - a.value()))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("v,value\n");
        for (v, x) in self.grid.iter().zip(&self.values) {
            if x.is_infinite() {
                s.push_str(&format!("{v:.6},inf\n"));
            } else {
                s.push_str(&format!("{v:.6},{:.12}\n", x.value()));
            }
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let params = match &self.params {
            Some(p) => json!({
                "rho": p.rho,
                "N": real_to_json(p.n.value()),
                "D": real_to_json(p.d),
            }),
            None => Value::Null,
        };
        let points: Vec<Value> = self
            .grid
            .iter()
            .zip(&self.values)
            .map(|(v, x)| json!({"v": v, "value": ext_to_json(*x)}))
            .collect();
        json!({"params": params, "method": self.method, "points": points})
    }

    pub fn from_json(v: &Value) -> Result<ProfileCurve> {
        let bad = || ProfileError::BadInput("malformed profile JSON".into());
        let pts = v.get("points").and_then(Value::as_array).ok_or_else(bad)?;
        let mut grid = Vec::with_capacity(pts.len());
        let mut values = Vec::with_capacity(pts.len());
        for p in pts {
            grid.push(p.get("v").and_then(Value::as_f64).ok_or_else(bad)?);
            let x = p.get("value").and_then(json_to_real).ok_or_else(bad)?;
            values.push(ExtReal::new(x).ok_or_else(bad)?);
        }
        let params = match v.get("params") {
            Some(Value::Object(o)) => {
                let get = |k: &str| o.get(k).and_then(json_to_real).ok_or_else(bad);
                let n = Dim::from_f64(get("N")?).ok_or_else(bad)?;
                Some(CDParams {
                    rho: get("rho")?,
                    n,
                    d: get("D")?,
                })
            }
            _ => None,
        };
        let method = v.get("method").and_then(Value::as_str).unwrap_or("").to_string();
        ProfileCurve::new(grid, values, params, &method)
    }
}

/// Upper bound on the concentration profile `K(r)` obtained by inverting
/// `K⁻¹(v) ≤ ∫_v^{1/2} ds/I(s)`, with `I` interpolated linearly between
/// grid points. Clamped to `[0, 1/2]`.
pub fn concentration_from_profile(c: &ProfileCurve, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Ok(0.5);
    }
    // Cells of (0, 1/2], walked downward from 1/2.
    let mut nodes: Vec<(f64, ExtReal)> = c
        .grid
        .iter()
        .zip(&c.values)
        .filter(|(v, _)| **v < 0.5)
        .map(|(v, x)| (*v, *x))
        .collect();
    nodes.push((0.5, c.interpolate(0.5)));
    for w in nodes.windows(2) {
        if w[0].0 > 0.0 && w[0].1.is_zero() && w[1].1.is_zero() {
            return Err(ProfileError::DegenerateProfile);
        }
    }
    let mut acc = 0.0;
    for w in nodes.windows(2).rev() {
        let ((s0, i0), (s1, i1)) = (w[0], w[1]);
        let h = s1 - s0;
        let cell = if i0.is_infinite() || i1.is_infinite() {
            0.5 * h * (i0.recip().value() + i1.recip().value())
        } else {
            let (a, b) = (i0.value(), i1.value());
            if a <= 0.0 {
                f64::INFINITY
            } else if (b - a).abs() <= 1e-14 * a {
                h / a
            } else {
                h * (b / a).ln() / (b - a)
            }
        };
        if acc + cell >= r {
            // Solve ∫_v^{s1} ds/I = r − acc inside the cell.
            let need = r - acc;
            let v = if i0.is_infinite() || i1.is_infinite() {
                let j1 = i1.recip().value();
                let j0 = i0.recip().value();
                // trapezoid in 1/I: linear reciprocal
                solve_linear_recip(s0, s1, j0, j1, need)
            } else {
                let (a, b) = (i0.value(), i1.value());
                let slope = (b - a) / h;
                if slope.abs() <= 1e-14 * a.max(b) {
                    s1 - need * b
                } else {
                    // I(s) = b + slope (s − s1); ∫_v^{s1} = ln(b/I(v))/slope
                    let iv = b * (-need * slope).exp();
                    s1 + (iv - b) / slope
                }
            };
            return Ok(v.clamp(0.0, 0.5));
        }
        acc += cell;
    }
    Ok(0.0)
}

fn solve_linear_recip(s0: f64, s1: f64, j0: f64, j1: f64, need: f64) -> f64 {
    // ∫_v^{s1} j(s) ds with j linear from j0 at s0 to j1 at s1.
    let h = s1 - s0;
    let slope = (j1 - j0) / h;
    // ∫_v^{s1} = j1·x − slope·x²/2, x = s1 − v
    if slope.abs() < 1e-300 {
        return if j1 > 0.0 { s1 - need / j1 } else { s0 };
    }
    let a = -0.5 * slope;
    let disc = j1 * j1 - 4.0 * a * (-need);
    let x = if disc < 0.0 { h } else { 2.0 * need / (j1 + disc.sqrt()) };
    s1 - x.clamp(0.0, h)
}

/// Sampled oracle data: positions, cumulative masses at the sample points
/// and normalized densities.
struct GridOracle {
    p: Vec<f64>,
    phi: Vec<f64>,
}

impl GridOracle {
    fn new(wd: &WeightedDensity1D, n: usize) -> Result<GridOracle> {
        let (lo, hi) = wd.interval();
        if !(lo.is_finite() && hi.is_finite()) || n < 3 {
            return Err(ProfileError::BadInput("grid oracle needs a bounded interval".into()));
        }
        let dt = (hi - lo) / n as f64;
        let f: Vec<f64> = (0..n).map(|i| wd.density(lo + (i as f64 + 0.5) * dt)).collect();
        if f.iter().any(|x| !x.is_finite()) {
            return Err(ProfileError::BadInput("density not finite on the oracle grid".into()));
        }
        let m: f64 = f.iter().sum::<f64>() * dt;
        if m <= 0.0 {
            return Err(ProfileError::ZeroMass);
        }
        let mut p = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &fi in &f {
            p.push((acc + 0.5 * fi * dt) / m);
            acc += fi * dt;
        }
        let phi = f.iter().map(|x| x / m).collect();
        Ok(GridOracle { p, phi })
    }

    // Boundary density at the fractional position where the cumulative mass
    // equals `target`; `None` if out of range.
    fn phi_at_mass(&self, target: f64, from: usize) -> Option<f64> {
        let n = self.p.len();
        if target < self.p[from] || target > self.p[n - 1] {
            return None;
        }
        let k = from + self.p[from..].partition_point(|&x| x < target);
        if k == 0 || self.p[k] == target {
            return Some(self.phi[k.min(n - 1)]);
        }
        let (a, b) = (self.p[k - 1], self.p[k]);
        let w = if b > a { (target - a) / (b - a) } else { 0.0 };
        Some(self.phi[k - 1] + w * (self.phi[k] - self.phi[k - 1]))
    }

    fn half_lines(&self, v: f64) -> f64 {
        let a = self.phi_at_mass(v, 0).unwrap_or(f64::INFINITY);
        let b = self.phi_at_mass(1.0 - v, 0).unwrap_or(f64::INFINITY);
        a.min(b)
    }

    fn intervals(&self, v: f64) -> f64 {
        let mut best = self.half_lines(v);
        for mass in [v, 1.0 - v] {
            if mass <= 0.0 || mass >= 1.0 {
                continue;
            }
            for j in 0..self.p.len() {
                match self.phi_at_mass(self.p[j] + mass, j) {
                    Some(end) => best = best.min(self.phi[j] + end),
                    None => break,
                }
            }
        }
        best
    }
}

/// Grid oracle for the flat profile: half-lines cut on an `n`-point
/// midpoint grid, boundary measured by the sampled density.
pub fn brute_force_flat(wd: &WeightedDensity1D, n: usize, v: f64) -> Result<ExtReal> {
    let g = GridOracle::new(wd, n)?;
    Ok(ExtReal::clamped(g.half_lines(v.clamp(0.0, 1.0))))
}

/// Grid oracle over half-lines, intervals and complements of intervals of
/// mass `v`, boundary measured by the density at the cut points.
pub fn brute_force_interval_profile(wd: &WeightedDensity1D, n: usize, v: f64) -> Result<ExtReal> {
    let g = GridOracle::new(wd, n)?;
    Ok(ExtReal::clamped(g.intervals(v.clamp(0.0, 1.0))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_density::{named_density, Family};

    fn uniform(lo: f64, hi: f64) -> WeightedDensity1D {
        normalize(&named_density(Family::Uniform, lo, hi).unwrap(), lo, hi).unwrap()
    }

    fn exp_decay(hi: f64) -> WeightedDensity1D {
        let f = named_density(Family::Exp { k: -1.0, exponent: 1.0 }, 0.0, hi).unwrap();
        normalize(&f, 0.0, hi).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert!((uniform(0.0, 2.0).mass() - 2.0).abs() < 1e-14);
        let c = named_density(Family::cosh(-1.0, -0.5), f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let wd = normalize(&c, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!((wd.mass() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let p = named_density(Family::Power { exponent: -2.0 }, 0.0, 1.0).unwrap();
        assert_eq!(normalize(&p, 0.0, 1.0).unwrap_err(), ProfileError::InfiniteMass);
    }

    #[test]
    fn quantile_examples() {
        assert!((uniform(0.0, 1.0).quantile(0.25).unwrap() - 0.25).abs() < 1e-12);
        let e = exp_decay(f64::INFINITY);
        assert!((e.quantile(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-11);
        let c = named_density(Family::cosh(-1.0, -0.5), f64::NEG_INFINITY, f64::INFINITY).unwrap();
        let wd = normalize(&c, f64::NEG_INFINITY, f64::INFINITY).unwrap();
        assert!(wd.quantile(0.5).unwrap().abs() < 1e-10);
    }

    #[test]
    fn flat_profile_examples() {
        let e = exp_decay(f64::INFINITY);
        assert!((flat_profile(&e, 0.3).unwrap().value() - 0.3).abs() < 1e-11);
        let u = uniform(0.0, 3.0);
        for v in [0.0, 0.1, 0.5, 0.9, 1.0] {
            assert!((flat_profile(&u, v).unwrap().value() - 1.0 / 3.0).abs() < 1e-12);
        }
        let s = named_density(Family::Sin { k: 1.0, exponent: -0.5 }, 0.0, std::f64::consts::PI).unwrap();
        let wd = normalize(&s, 0.0, std::f64::consts::PI).unwrap();
        assert!(flat_profile(&wd, 0.0).unwrap().is_infinite());
    }

    #[test]
    fn tabulated_measure() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let f = vec![1.0; t.len()];
        let wd = normalize_tabulated(t, f).unwrap();
        assert!((wd.mass() - 1.0).abs() < 1e-14);
        assert!((wd.quantile(0.37).unwrap() - 0.37).abs() < 1e-12);
        assert!((flat_profile(&wd, 0.2).unwrap().value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concentration_examples() {
        let g = v_grid(513);
        let ones = ProfileCurve::new(g.clone(), vec![ExtReal::ONE; 513], None, "t").unwrap();
        assert!((concentration_from_profile(&ones, 0.2).unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(concentration_from_profile(&ones, 0.0).unwrap(), 0.5);
        let vals = g.iter().map(|&v: &f64| ExtReal::clamped(v.min(1.0 - v))).collect();
        let lin = ProfileCurve::new(g, vals, None, "t").unwrap();
        for r in [0.3, 1.0, 2.5] {
            let k = concentration_from_profile(&lin, r).unwrap();
            assert!((k - 0.5 * (-r as f64).exp()).abs() < 1e-10, "{r} {k}");
        }
    }

    #[test]
    fn degenerate_profile() {
        let g = v_grid(5);
        let vals = vec![ExtReal::ZERO, ExtReal::ZERO, ExtReal::ZERO, ExtReal::ONE, ExtReal::ZERO];
        let c = ProfileCurve::new(g, vals, None, "t").unwrap();
        assert_eq!(concentration_from_profile(&c, 0.1), Err(ProfileError::DegenerateProfile));
    }

    #[test]
    fn oracle_examples() {
        let u = uniform(0.0, 1.0);
        assert!((brute_force_flat(&u, ORACLE_GRID, 0.4).unwrap().value() - 1.0).abs() < 1e-3);
        assert!((brute_force_interval_profile(&u, ORACLE_GRID, 0.3).unwrap().value() - 1.0).abs() < 1e-3);
        let e = exp_decay(40.0);
        assert!((brute_force_flat(&e, ORACLE_GRID, 0.3).unwrap().value() - 0.3).abs() < 1e-3);
        let g = named_density(
            Family::Jacobian { h: 0.0, rho: 1.0, n: Dim::Infinite },
            -10.0,
            10.0,
        )
        .unwrap();
        let wd = normalize(&g, -10.0, 10.0).unwrap();
        let x = brute_force_flat(&wd, ORACLE_GRID, 0.5).unwrap().value();
        assert!((x - 0.398_942_280_401_432_7).abs() < 1e-3);
    }

    #[test]
    fn csv_and_json() {
        let c = ProfileCurve::new(vec![0.0, 1.0], vec![ExtReal::INFINITY, ExtReal::ONE], None, "t").unwrap();
        let csv = c.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(csv.lines().nth(1).unwrap(), "0.000000,inf");
        let back = ProfileCurve::from_json(&c.to_json()).unwrap();
        assert_eq!(back.values, c.values);
    }
}
