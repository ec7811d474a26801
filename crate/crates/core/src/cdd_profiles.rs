//! The Gromov–Lévy profile `GL♭_{ρ,N,D}` and the flat profile
//! `I♭_{ρ,N,D}` of the CDD(ρ,N,D) condition, the equal-value `H` solver,
//! the explicit model families and the equality check between profiles.
//!
//! ```text
//! GL♭(v) = inf_{(a,b)∈Δ_D, H} max( v / ∫_{−a}^0 J_H , (1−v) / ∫_0^b J_H )
//! I♭(v)  = inf_{(a,b)∈Δ_D, H : J_H ∈ L¹} I♭(J_H, [−a,b])(v)
//! ```

use std::cell::Cell;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model_density::{named_density, trig_pair, CDParams, Dim, Family, ModelDensity};
use crate::numerics::{
    find_root_bracket, golden_section, integrate, minimize_scalar, Bracket, ExtReal, NumericsError,
    Quadrature, DEFAULT_STARTS,
};
use crate::profile1d::{flat_profile, normalize, ProfileCurve, ProfileError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CddError {
    #[error("pathological-case")]
    Pathological,
    #[error("no-crossing")]
    NoCrossing,
    #[error("no-case")]
    NoCase,
    #[error("equality-not-asserted")]
    EqualityNotAsserted,
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, CddError>;

/// Cap on `|H|` during bracket expansion.
pub const H_CAP: f64 = 1e12;
/// Points per sign in the `H` grid of the flat profile.
pub const H_GRID: usize = 65;
/// Relative tolerance on the split `a` (the value error is quadratic in it).
pub const SPLIT_TOL: f64 = 1e-6;
/// Default profile grid size.
pub const DEFAULT_V_GRID: usize = 513;

/// A split `(a, b)` of the diameter: `a + b = D`, or `(∞, ∞)` when `D = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterSplit {
    pub a: f64,
    pub b: f64,
}

impl DiameterSplit {
    pub fn infinite() -> DiameterSplit {
        DiameterSplit {
            a: f64::INFINITY,
            b: f64::INFINITY,
        }
    }

    pub fn new(a: f64, b: f64) -> DiameterSplit {
        DiameterSplit { a, b }
    }
}

/// `(∫_{−a}^0 J_H, ∫_0^b J_H)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfMasses {
    pub left: ExtReal,
    pub right: ExtReal,
}

fn jacobian_model(h: f64, p: &CDParams, lo: f64, hi: f64) -> ModelDensity {
    ModelDensity {
        family: Family::Jacobian { h, rho: p.rho, n: p.n },
        scale: 1.0,
        offset: 0.0,
        lo,
        hi,
    }
}

fn jacobian_mass(h: f64, p: &CDParams, lo: f64, hi: f64) -> Result<ExtReal> {
    if lo >= hi {
        return Ok(ExtReal::ZERO);
    }
    let m = jacobian_model(h, p, lo, hi);
    let ev = m.evaluator();
    Ok(integrate(|t| ev.eval(t), &m.interval(), &Quadrature::default())?)
}

/// Masses of `J_{H,ρ,N}` on `[−a, 0]` and `[0, b]`, with divergence decided
/// analytically.
pub fn half_masses(h: f64, p: &CDParams, split: DiameterSplit) -> Result<HalfMasses> {
    Ok(HalfMasses {
        left: jacobian_mass(h, p, -split.a, 0.0)?,
        right: jacobian_mass(h, p, 0.0, split.b)?,
    })
}

fn gl_value(v: f64, m: &HalfMasses) -> ExtReal {
    let l = ExtReal::clamped(v).div(m.left);
    let r = ExtReal::clamped(1.0 - v).div(m.right);
    l.max(r)
}

// Bounded monotone proxy for v·R − (1−v)·L; NaN when both masses diverge.
fn crossing_proxy(v: f64, m: &HalfMasses) -> f64 {
    match (m.left.is_infinite(), m.right.is_infinite()) {
        (true, true) => f64::NAN,
        (false, true) => 1.0,
        (true, false) => -1.0,
        (false, false) => {
            let (x, y) = (v * m.right.value(), (1.0 - v) * m.left.value());
            if x + y == 0.0 {
                0.0
            } else {
                (x - y) / (x + y)
            }
        }
    }
}

/// The `H₀` equalizing `v/∫_{−a}^0 J` and `(1−v)/∫_0^b J`. Returns `None`
/// when some `H` makes both half-masses infinite (the profile then
/// vanishes).
pub fn equal_value_h(p: &CDParams, split: DiameterSplit, v: f64) -> Result<Option<f64>> {
    let failed: Cell<Option<CddError>> = Cell::new(None);
    let both_inf = Cell::new(false);
    let psi = |h: f64| -> f64 {
        match half_masses(h, p, split) {
            Ok(m) => {
                let x = crossing_proxy(v, &m);
                if x.is_nan() {
                    both_inf.set(true);
                    0.0
                } else {
                    x
                }
            }
            Err(e) => {
                failed.set(Some(e));
                0.0
            }
        }
    };
    let check = |x: f64| -> Result<Option<f64>> {
        if let Some(e) = failed.take() {
            return Err(e);
        }
        Ok(if both_inf.get() { None } else { Some(x) })
    };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let (mut plo, mut phi) = (psi(lo), psi(hi));
    if check(0.0)?.is_none() {
        return Ok(None);
    }
    while phi < 0.0 {
        lo = hi;
        plo = phi;
        hi *= 2.0;
        if hi > H_CAP {
            return Err(CddError::NoCrossing);
        }
        phi = psi(hi);
        if check(0.0)?.is_none() {
            return Ok(None);
        }
    }
    while plo > 0.0 {
        hi = lo;
        lo *= 2.0;
        if lo < -H_CAP {
            return Err(CddError::NoCrossing);
        }
        plo = psi(lo);
        if check(0.0)?.is_none() {
            return Ok(None);
        }
    }
    let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
    let (x, _) = find_root_bracket(psi, Bracket::new(lo, hi)?, tol)?;
    check(x)
}

// Log-spaced magnitudes 1e−4 … 1e4, `n` of them.
fn magnitudes(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| 10f64.powf(-4.0 + 8.0 * j as f64 / (n - 1) as f64))
}

/// Candidate `H` values inside the open interval `(lo, hi)`: `H_GRID`
/// log-spaced points on each side of a center, accumulating at finite ends.
fn h_grid(lo: f64, hi: f64) -> Vec<f64> {
    let c = if lo < 0.0 && hi > 0.0 {
        0.0
    } else if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo + 1.0
    } else {
        hi - 1.0
    };
    let mut out = vec![c];
    for m in magnitudes(H_GRID) {
        let up = if hi.is_finite() { c + (hi - c) * m / (1.0 + m) } else { c + m };
        let down = if lo.is_finite() { c - (c - lo) * m / (1.0 + m) } else { c - m };
        if up < hi {
            out.push(up);
        }
        if down > lo {
            out.push(down);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Grid-then-golden minimization of `g` over candidate points.
fn grid_minimize<G: FnMut(f64) -> f64>(mut g: G, pts: &[f64]) -> (f64, f64) {
    let vals: Vec<f64> = pts.iter().map(|&h| g(h)).collect();
    let mut best = (pts[0], vals[0]);
    let mut bi = 0;
    for (i, (&h, &x)) in pts.iter().zip(&vals).enumerate() {
        if x < best.1 {
            best = (h, x);
            bi = i;
        }
    }
    if pts.len() >= 2 && best.1.is_finite() {
        let a = pts[bi.saturating_sub(1)];
        let b = pts[(bi + 1).min(pts.len() - 1)];
        if b > a {
            let tol = 1e-10 * a.abs().max(b.abs()).max(1e-3);
            let r = golden_section(&mut g, a, b, tol);
            if r.1 < best.1 {
                best = r;
            }
        }
    }
    best
}

/// Inner infimum over `H` of the GL expression for a fixed split.
fn gl_inner(p: &CDParams, split: DiameterSplit, v: f64) -> Result<ExtReal> {
    // The half-masses are monotone in H except for N ∈ (0, 1].
    let monotone = match p.n {
        Dim::Finite(n) => n <= 0.0 || n > 1.0,
        _ => true,
    };
    if monotone {
        match equal_value_h(p, split, v) {
            Ok(None) => return Ok(ExtReal::ZERO),
            Ok(Some(h0)) => return Ok(gl_value(v, &half_masses(h0, p, split)?)),
            Err(e) if is_intractable(&e) => {}
            Err(e) => return Err(e),
        }
    }
    let err: Cell<Option<CddError>> = Cell::new(None);
    let g = |h: f64| match half_masses(h, p, split) {
        Ok(m) => gl_value(v, &m).value(),
        Err(e) => {
            if !is_intractable(&e) {
                err.set(Some(e));
            }
            f64::INFINITY
        }
    };
    let (_, best) = grid_minimize(g, &h_grid(f64::NEG_INFINITY, f64::INFINITY));
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(ExtReal::clamped(best))
}

fn is_intractable(e: &CddError) -> bool {
    matches!(
        e,
        CddError::NoCrossing
            | CddError::Numerics(NumericsError::QuadratureFailed)
            | CddError::Profile(ProfileError::Numerics(NumericsError::QuadratureFailed))
    )
}

fn outer_inf<F: FnMut(f64) -> Result<ExtReal>>(d: f64, mut inner: F) -> Result<ExtReal> {
    // Splits whose inner problem is numerically intractable (extreme `a`)
    // count as +∞ as long as some split succeeds.
    let hard: Cell<Option<CddError>> = Cell::new(None);
    let soft: Cell<Option<CddError>> = Cell::new(None);
    let ok = Cell::new(false);
    let g = |a: f64| match inner(a) {
        Ok(x) => {
            ok.set(true);
            x.value()
        }
        Err(e) => {
            if is_intractable(&e) {
                soft.set(Some(e));
            } else {
                hard.set(Some(e));
            }
            f64::INFINITY
        }
    };
    let (_, best) = minimize_scalar(g, 0.0, d, DEFAULT_STARTS, SPLIT_TOL * d)?;
    if let Some(e) = hard.take() {
        return Err(e);
    }
    match soft.take() {
        Some(e) if !ok.get() => Err(e),
        _ => Ok(ExtReal::clamped(best)),
    }
}

/// `GL♭_{ρ,N,D}(v)`.
pub fn gl_profile(p: &CDParams, v: f64) -> Result<ExtReal> {
    if p.is_pathological() {
        return Err(CddError::Pathological);
    }
    if v <= 0.0 || v >= 1.0 {
        return Ok(ExtReal::ZERO);
    }
    if p.n == Dim::One {
        // J ≡ 1 when ρ = 0, J ≡ ∞ otherwise.
        return Ok(if p.rho == 0.0 && p.d.is_finite() {
            ExtReal::clamped(1.0 / p.d)
        } else {
            ExtReal::ZERO
        });
    }
    if p.d.is_infinite() {
        return gl_inner(p, DiameterSplit::infinite(), v);
    }
    outer_inf(p.d, |a| gl_inner(p, DiameterSplit::new(a, p.d - a), v))
}

/// Open interval of `H` for which `J_H` has finite mass on the split, or
/// `None` when empty. For `N ∈ (0,1)`, `D = ∞`, `ρ > 0` the two isolated
/// values `|β| = 1` are not excluded here.
pub fn finite_mass_h_range(p: &CDParams, split: DiameterSplit) -> Option<(f64, f64)> {
    let all = Some((f64::NEG_INFINITY, f64::INFINITY));
    let bounded = split.a.is_finite() && split.b.is_finite();
    match p.n {
        Dim::One => {
            if p.rho == 0.0 && bounded {
                all
            } else {
                None
            }
        }
        Dim::Infinite => {
            if bounded || p.rho > 0.0 {
                all
            } else {
                None
            }
        }
        Dim::Finite(n) => {
            let delta = p.rho / (n - 1.0);
            if n > 0.0 {
                if bounded {
                    return all;
                }
                let ok = if n > 1.0 { p.rho > 0.0 } else { p.rho != 0.0 };
                return if ok { all } else { None };
            }
            // N ≤ 0: no root may touch [−a, b].
            if !bounded {
                if p.rho > 0.0 {
                    let hm = (1.0 - n) * (-delta).sqrt();
                    return Some((-hm, hm));
                }
                return None;
            }
            if delta > 0.0 && split.a + split.b >= PI / delta.sqrt() {
                return None;
            }
            let ratio = |x: f64| -> f64 {
                if x <= 0.0 {
                    return f64::INFINITY;
                }
                let (s, c) = trig_pair(delta, x);
                c / s
            };
            let h_lo = -(1.0 - n) * ratio(split.a);
            let h_hi = (1.0 - n) * ratio(split.b);
            (h_lo < h_hi).then_some((h_lo, h_hi))
        }
    }
}

fn flat_of_jacobian(h: f64, p: &CDParams, split: DiameterSplit, v: f64) -> Result<ExtReal> {
    let m = jacobian_model(h, p, -split.a, split.b);
    match normalize(&m, -split.a, split.b).and_then(|wd| flat_profile(&wd, v)) {
        Ok(x) => Ok(x),
        Err(e) => match e {
            ProfileError::InfiniteMass
            | ProfileError::ZeroMass
            | ProfileError::Numerics(NumericsError::QuadratureFailed) => Ok(ExtReal::INFINITY),
            e => Err(e.into()),
        },
    }
}

fn flat_inner(p: &CDParams, split: DiameterSplit, v: f64) -> Result<Option<ExtReal>> {
    let Some((lo, hi)) = finite_mass_h_range(p, split) else {
        return Ok(None);
    };
    let err: Cell<Option<CddError>> = Cell::new(None);
    let g = |h: f64| match flat_of_jacobian(h, p, split, v) {
        Ok(x) => x.value(),
        Err(e) => {
            err.set(Some(e));
            f64::INFINITY
        }
    };
    let (_, best) = grid_minimize(g, &h_grid(lo, hi));
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(Some(ExtReal::clamped(best)))
}

/// True when no `H` gives `J_{H,ρ,N}` finite mass for any admissible split.
pub fn flat_h_set_empty(p: &CDParams) -> bool {
    if p.d.is_infinite() {
        finite_mass_h_range(p, DiameterSplit::infinite()).is_none()
    } else {
        finite_mass_h_range(p, DiameterSplit::new(0.5 * p.d, 0.5 * p.d)).is_none()
    }
}

/// `I♭_{ρ,N,D}(v)`; zero when no `H` gives finite mass.
pub fn flat_cdd_profile(p: &CDParams, v: f64) -> Result<ExtReal> {
    if p.is_pathological() {
        return Err(CddError::Pathological);
    }
    let v = v.clamp(0.0, 1.0);
    if p.d.is_infinite() {
        return Ok(flat_inner(p, DiameterSplit::infinite(), v)?.unwrap_or(ExtReal::ZERO));
    }
    if flat_h_set_empty(p) {
        return Ok(ExtReal::ZERO);
    }
    outer_inf(p.d, |a| {
        Ok(flat_inner(p, DiameterSplit::new(a, p.d - a), v)?.unwrap_or(ExtReal::INFINITY))
    })
}

fn sweep<F: Fn(f64) -> Result<ExtReal> + Sync>(grid: &[f64], f: F) -> Result<Vec<ExtReal>> {
    grid.par_iter().map(|&v| f(v)).collect()
}

/// `GL♭_{ρ,N,D}` on a grid (evaluated in parallel, order preserved).
pub fn gl_curve(p: &CDParams, grid: &[f64]) -> Result<ProfileCurve> {
    let vals = sweep(grid, |v| gl_profile(p, v))?;
    Ok(ProfileCurve::new(grid.to_vec(), vals, Some(*p), "gromov-levy")?)
}

/// `I♭_{ρ,N,D}` on a grid (evaluated in parallel, order preserved).
pub fn flat_curve(p: &CDParams, grid: &[f64]) -> Result<ProfileCurve> {
    let vals = sweep(grid, |v| flat_cdd_profile(p, v))?;
    Ok(ProfileCurve::new(grid.to_vec(), vals, Some(*p), "flat")?)
}

/// How a model family is placed: on the whole line, on a window
/// `[ξ, ξ+D]` with `ξ` in an open range, on a fixed domain, or as
/// `exp(H t)` on `[0, D]` with `H` in a range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "placement", rename_all = "snake_case")]
pub enum Placement {
    Line,
    Window { xi_lo: f64, xi_hi: f64 },
    Fixed { lo: f64, hi: f64 },
    ExpRate { h_lo: f64, h_hi: f64 },
}

/// One model family of the explicit description of `I♭_{ρ,N,D}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseFamily {
    pub case: &'static str,
    pub family: Family,
    pub placement: Placement,
}

impl CaseFamily {
    /// The density for parameter value `x` (shift `ξ` or rate `H`).
    pub fn instantiate(&self, x: f64, d: f64) -> Result<ModelDensity> {
        let m = match self.placement {
            Placement::Line => named_density(self.family, f64::NEG_INFINITY, f64::INFINITY),
            Placement::Window { .. } => named_density(self.family, x, x + d),
            Placement::Fixed { lo, hi } => named_density(self.family, lo, hi),
            Placement::ExpRate { .. } => named_density(Family::Exp { k: x, exponent: 1.0 }, 0.0, d),
        };
        m.map_err(|e| CddError::Profile(ProfileError::Model(e)))
    }

    fn range(&self) -> Option<(f64, f64)> {
        match self.placement {
            Placement::Window { xi_lo, xi_hi } => Some((xi_lo, xi_hi)),
            Placement::ExpRate { h_lo, h_hi } => Some((h_lo, h_hi)),
            _ => None,
        }
    }
}

/// The explicit model families of `I♭_{ρ,N,D}` for the parameter regimes
/// where they are known.
pub fn case_models(p: &CDParams) -> Result<Vec<CaseFamily>> {
    let inf = f64::INFINITY;
    let n = match p.n {
        Dim::Finite(n) => n,
        Dim::Infinite if p.rho == 0.0 && p.d.is_finite() => {
            return Ok(vec![CaseFamily {
                case: "exponential",
                family: Family::Exp { k: 1.0, exponent: 1.0 },
                placement: Placement::ExpRate { h_lo: 0.0, h_hi: inf },
            }]);
        }
        _ => return Err(CddError::NoCase),
    };
    let delta = p.rho / (n - 1.0);
    let d = p.d;
    if n < 1.0 && p.rho > 0.0 && d.is_infinite() {
        return Ok(vec![CaseFamily {
            case: "case-1",
            family: Family::cosh(n, delta),
            placement: Placement::Line,
        }]);
    }
    if n > 0.0 || d.is_infinite() {
        return Err(CddError::NoCase);
    }
    if p.rho > 0.0 {
        return Ok(vec![
            CaseFamily {
                case: "case-2",
                family: Family::sinh(n, delta),
                placement: Placement::Window { xi_lo: 0.0, xi_hi: inf },
            },
            CaseFamily {
                case: "case-2",
                family: Family::exp(n, delta),
                placement: Placement::Fixed { lo: 0.0, hi: d },
            },
            CaseFamily {
                case: "case-2",
                family: Family::cosh(n, delta),
                placement: Placement::Window { xi_lo: -inf, xi_hi: inf },
            },
        ]);
    }
    if p.rho == 0.0 {
        return Ok(vec![
            CaseFamily {
                case: "case-3",
                family: Family::power(n),
                placement: Placement::Window { xi_lo: 0.0, xi_hi: inf },
            },
            CaseFamily {
                case: "case-3",
                family: Family::Uniform,
                placement: Placement::Fixed { lo: 0.0, hi: d },
            },
        ]);
    }
    let end = PI / delta.sqrt();
    if d < end {
        return Ok(vec![CaseFamily {
            case: "case-4",
            family: Family::sin(n, delta),
            placement: Placement::Window { xi_lo: 0.0, xi_hi: end - d },
        }]);
    }
    Err(CddError::NoCase)
}

/// Minimum over the explicit model families of their flat profiles at `v`
/// (infimum over the family parameter by grid and golden refinement).
pub fn case_flat_profile(p: &CDParams, v: f64) -> Result<ExtReal> {
    let mut best = ExtReal::INFINITY;
    for fam in case_models(p)? {
        let eval = |x: f64| -> f64 {
            fam.instantiate(x, p.d)
                .ok()
                .and_then(|m| normalize(&m, m.lo, m.hi).ok())
                .and_then(|wd| flat_profile(&wd, v).ok())
                .map(|e| e.value())
                .unwrap_or(f64::INFINITY)
        };
        let value = match fam.range() {
            None => eval(0.0),
            Some((lo, hi)) => {
                let pts: Vec<f64> = h_grid(lo, hi);
                grid_minimize(eval, &pts).1
            }
        };
        best = best.min(ExtReal::clamped(value));
    }
    Ok(best)
}

/// Whether the two profiles are asserted to coincide: `D = ∞` or
/// `N ∈ (−∞,0] ∪ (1,∞]`.
pub fn equality_asserted(p: &CDParams) -> bool {
    p.d.is_infinite()
        || match p.n {
            Dim::Finite(n) => n <= 0.0 || n > 1.0,
            Dim::Infinite => true,
            Dim::One => false,
        }
}

/// Maximum relative deviation `|GL♭ − I♭| / max(GL♭, I♭)` over the grid
/// (`0/0 = 0`).
pub fn profile_equality_check(p: &CDParams, grid: &[f64]) -> Result<f64> {
    if !equality_asserted(p) {
        return Err(CddError::EqualityNotAsserted);
    }
    let devs: Result<Vec<f64>> = grid
        .par_iter()
        .map(|&v| {
            let g = gl_profile(p, v)?;
            let f = flat_cdd_profile(p, v)?;
            Ok(relative_gap(g, f))
        })
        .collect();
    Ok(devs?.into_iter().fold(0.0, f64::max))
}

/// `|x − y| / max(x, y)` with `0/0 = 0` and `∞/∞ = 0`.
pub fn relative_gap(x: ExtReal, y: ExtReal) -> f64 {
    if x == y {
        return 0.0;
    }
    if x.is_infinite() || y.is_infinite() {
        return 1.0;
    }
    let m = x.value().max(y.value());
    (x.value() - y.value()).abs() / m
}
