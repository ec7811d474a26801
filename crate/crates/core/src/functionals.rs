//! Constants derived from isoperimetric profiles: Cheeger constants,
//! concentration bounds, Lorentz quasi-norms, Sobolev/Nash constants,
//! Poincaré bounds, cosh-model estimates and the W₁ stability chain.

use serde::Serialize;
use thiserror::Error;

use crate::model_density::{named_density, CDParams, Dim, Family, ModelDensity};
use crate::numerics::{integrate, ExtReal, NumericsError, Quadrature};
use crate::profile1d::{concentration_from_profile, ProfileCurve, ProfileError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunctionalError {
    #[error("bad-exponents")]
    BadExponents,
    #[error("fm-divergent")]
    FmDivergent,
    #[error("bad-input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, FunctionalError>;

/// `cosh²(2)`.
fn cosh2_sq() -> f64 {
    2f64.cosh().powi(2)
}

/// The two-level concentration constant `c = 1/(2 cosh² 2)`.
pub fn cosh_constant_c() -> f64 {
    0.5 / cosh2_sq()
}

/// `(N−1)/N`, the exponent of `min(v, 1−v)` in the N-dimensional Cheeger
/// quotient (`1` for `N = ∞`, `0` for `N = 1`).
pub fn cheeger_exponent(n: Dim) -> Result<f64> {
    match n {
        Dim::Infinite => Ok(1.0),
        Dim::One => Ok(0.0),
        Dim::Finite(x) if x == 0.0 => Err(FunctionalError::BadInput("N = 0".into())),
        Dim::Finite(x) => Ok((x - 1.0) / x),
    }
}

fn dim(n: f64) -> Result<Dim> {
    Dim::from_f64(n).ok_or_else(|| FunctionalError::BadInput(format!("N = {n}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheegerReport {
    pub d_che_n: f64,
    pub d_che_inf: f64,
    pub argmin_v: f64,
}

/// N-dimensional and linear Cheeger constants of a sampled profile: the
/// infimum over interior grid points of `I(v)/min(v,1−v)^{(N−1)/N}`. With
/// `cd0_certified` the value `2^{(N−1)/N} I(1/2)` is returned instead.
pub fn cheeger_n(c: &ProfileCurve, n: f64, cd0_certified: bool) -> Result<CheegerReport> {
    let e = cheeger_exponent(dim(n)?)?;
    let mut best = (f64::INFINITY, 0.5);
    let mut lin = f64::INFINITY;
    for (&v, &x) in c.grid.iter().zip(&c.values) {
        if v <= 0.0 || v >= 1.0 {
            continue;
        }
        let m = v.min(1.0 - v);
        let q = x.div(ExtReal::clamped(m.powf(e))).value();
        if q < best.0 {
            best = (q, v);
        }
        lin = lin.min(x.div(ExtReal::clamped(m)).value());
    }
    if cd0_certified {
        best = (2f64.powf(e) * c.interpolate(0.5).value(), 0.5);
    }
    Ok(CheegerReport {
        d_che_n: best.0,
        d_che_inf: lin,
        argmin_v: best.1,
    })
}

/// Concentration estimate implied by an N-dimensional Cheeger inequality
/// with constant `d`: `((1/2)^{1/N} − r d/N)_+^N`, `(1/2) e^{−r d}` for
/// `N = ∞`.
pub fn poly_concentration(d: f64, n: f64, r: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(FunctionalError::BadInput(format!("d = {d}")));
    }
    let r = r.max(0.0);
    match dim(n)? {
        Dim::Infinite => Ok(0.5 * (-r * d).exp()),
        Dim::One => Ok((0.5 - r * d).max(0.0)),
        Dim::Finite(x) if (0.0..1.0).contains(&x) => Err(FunctionalError::BadInput(format!("N = {x}"))),
        Dim::Finite(x) => {
            let base = 0.5f64.powf(1.0 / x) - r * d / x;
            Ok(if base <= 0.0 { 0.0 } else { base.powf(x) })
        }
    }
}

/// Sampled concentration profile `r ↦ K(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationCurve {
    pub r: Vec<f64>,
    pub k: Vec<f64>,
}

impl ConcentrationCurve {
    pub fn new(r: Vec<f64>, k: Vec<f64>) -> Result<ConcentrationCurve> {
        let bad = |m: &str| Err(FunctionalError::BadInput(m.into()));
        if r.len() != k.len() || r.is_empty() {
            return bad("length mismatch");
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) || r[0] < 0.0 {
            return bad("r-grid must be nonnegative and increasing");
        }
        if k.iter().any(|x| !(0.0..=0.5).contains(x)) || k.windows(2).any(|w| w[1] > w[0] + 1e-12) {
            return bad("K must be non-increasing in [0, 1/2]");
        }
        if r[0] == 0.0 && (k[0] - 0.5).abs() > 1e-12 {
            return bad("K(0) must be 1/2");
        }
        Ok(ConcentrationCurve { r, k })
    }

    /// The profile-derived upper bound on `K` at each `r`.
    pub fn from_profile(c: &ProfileCurve, r: &[f64]) -> Result<ConcentrationCurve> {
        let k = r
            .iter()
            .map(|&x| concentration_from_profile(c, x))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ConcentrationCurve::new(r.to_vec(), k)
    }
}

/// `sup_{r>0} 2^{(N−1)/N} (1/2 − K(r))/r` over the grid.
pub fn concentration_to_cheeger(k: &ConcentrationCurve, n: f64) -> Result<f64> {
    let f = 2f64.powf(cheeger_exponent(dim(n)?)?);
    Ok(k.r
        .iter()
        .zip(&k.k)
        .filter(|(r, _)| **r > 0.0)
        .map(|(r, x)| f * (0.5 - x) / r)
        .fold(0.0, f64::max))
}

/// Lower bound `2^{(N−1)/N}/(8R)` on the N-dimensional Cheeger constant
/// from a ball of radius `R` carrying half of the mass.
pub fn ball_cheeger_bound(radius: f64, n: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(FunctionalError::BadInput(format!("R = {radius}")));
    }
    Ok(2f64.powf(cheeger_exponent(dim(n)?)?) / (8.0 * radius))
}

/// `‖f‖_{L^{α,r}(μ)}` of a step function given as `(value, probability)`
/// pairs; `r = ∞` selects the weak (sup) form.
pub fn lorentz_norm(steps: &[(f64, f64)], alpha: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(r > 0.0) {
        return Err(FunctionalError::BadInput("alpha and r must be positive".into()));
    }
    if steps.iter().any(|&(x, w)| !x.is_finite() || !(w >= 0.0)) {
        return Err(FunctionalError::BadInput("bad step".into()));
    }
    let mut levels: Vec<(f64, f64)> = steps
        .iter()
        .map(|&(x, w)| (x.abs(), w))
        .filter(|&(x, w)| x > 0.0 && w > 0.0)
        .collect();
    levels.sort_by(|a, b| b.0.total_cmp(&a.0));
    // (u_j, μ{|f| ≥ u_j}) with u_j decreasing.
    let mut tail = Vec::new();
    let mut mass = 0.0;
    let mut i = 0;
    while i < levels.len() {
        let u = levels[i].0;
        while i < levels.len() && levels[i].0 == u {
            mass += levels[i].1;
            i += 1;
        }
        tail.push((u, mass));
    }
    if r.is_infinite() {
        return Ok(tail.iter().map(|&(u, m)| u * m.powf(1.0 / alpha)).fold(0.0, f64::max));
    }
    let mut sum = 0.0;
    for (j, &(u, m)) in tail.iter().enumerate() {
        let below = tail.get(j + 1).map_or(0.0, |x| x.0);
        sum += m.powf(r / alpha) * (u.powf(r) - below.powf(r));
    }
    Ok(sum.powf(1.0 / r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevConstants {
    /// Upper bound on `C_{p,q}`.
    pub c_pq: f64,
    /// `d · 2^{1/N}`, the constant of the weak Gagliardo inequality.
    pub gagliardo: f64,
}

fn inv(q: f64) -> f64 {
    if q.is_infinite() {
        0.0
    } else {
        1.0 / q
    }
}

/// Weak Sobolev constants for `N < 0` from an N-dimensional Cheeger
/// constant `d`, on the segment `N/(N−1) ≤ p ≤ −N`, `1/q = 1/p + 1/N`.
pub fn sobolev_constants(p: f64, q: f64, n: f64, d: f64) -> Result<SobolevConstants> {
    if !(n < 0.0) || !(d > 0.0) {
        return Err(FunctionalError::BadInput("need N < 0 and d > 0".into()));
    }
    let on_segment = p >= n / (n - 1.0) - 1e-12 && p <= -n + 1e-12;
    if !on_segment || (inv(q) - (1.0 / p + 1.0 / n)).abs() > 1e-12 {
        return Err(FunctionalError::BadExponents);
    }
    let tail = if q.is_infinite() { 1.0 } else { (q / p).powf(1.0 / q) };
    Ok(SobolevConstants {
        c_pq: 2f64.powf(-1.0 / n) * p * tail / d,
        gagliardo: d * 2f64.powf(1.0 / n),
    })
}

/// Transfers a weak Sobolev constant between exponent pairs:
/// `2^{1+2/p₁} p₂ (1+p₂/N)^{−(1/p₂+1/N)} C₁`.
pub fn sobolev_transfer(p1: f64, q1: f64, c1: f64, p2: f64, q2: f64, n: f64) -> Result<f64> {
    let admissible = |p: f64, q: f64| p > 0.0 && inv(q) <= 1.0 / p + 1.0 / n + 1e-12;
    if !admissible(p1, q1) || !admissible(p2, q2) || !(1.0 + p2 / n > 0.0) {
        return Err(FunctionalError::BadExponents);
    }
    Ok(2f64.powf(1.0 + 2.0 / p1) * p2 * (1.0 + p2 / n).powf(-(1.0 / p2 + 1.0 / n)) * c1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashConstant {
    pub coefficient: f64,
    pub gradient_exponent: f64,
    pub sup_exponent: f64,
}

/// Nash-type inequality constants for `p ≥ 1`, `N < 0`.
pub fn nash_constant(p: f64, n: f64, d: f64) -> Result<NashConstant> {
    if !(p >= 1.0) || !(n < 0.0) || !(d > 0.0) {
        return Err(FunctionalError::BadInput("need p ≥ 1, N < 0, d > 0".into()));
    }
    let s = n - p;
    Ok(NashConstant {
        coefficient: d.powf(-n / s) * 2f64.powf(-1.0 / s) * p.powf(n / s),
        gradient_exponent: n / s,
        sup_exponent: -p / s,
    })
}

/// `∫₀^∞ cosh^{N−1}(t) dt` for `N < 1`.
pub fn cosh_integral(n: f64) -> Result<f64> {
    if !(n < 1.0) {
        return Err(FunctionalError::BadInput(format!("N = {n}")));
    }
    let m = named_density(Family::Cosh { k: 1.0, exponent: n - 1.0 }, 0.0, f64::INFINITY)
        .map_err(|e| FunctionalError::Profile(e.into()))?;
    Ok(integrate(|t| m.eval(t), &m.interval(), &Quadrature::default())?.value())
}

/// Applicable Poincaré constant bounds, each present only when its
/// hypothesis holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct PoincareBounds {
    /// `(N−1)/(ρN)`; `ρ > 0`, `N ∈ (−∞,0) ∪ (1,∞]`.
    pub lichnerowicz: Option<f64>,
    /// `4 (1−N)/ρ (∫₀^∞ cosh^{N−1})²`; `ρ > 0`, `N < 1`.
    pub positive_curvature: Option<f64>,
    /// `4 D²`; `D < ∞`.
    pub diameter: Option<f64>,
    /// `4 / d_che_inf²`; `d_che_inf > 0`.
    pub mazya_cheeger: Option<f64>,
}

pub fn poincare_bounds(p: &CDParams, d_che_inf: Option<f64>) -> Result<PoincareBounds> {
    let mut b = PoincareBounds::default();
    if p.rho > 0.0 {
        match p.n {
            Dim::Infinite => b.lichnerowicz = Some(1.0 / p.rho),
            Dim::Finite(n) if n < 0.0 || n > 1.0 => b.lichnerowicz = Some((n - 1.0) / (p.rho * n)),
            _ => {}
        }
        if let Dim::Finite(n) = p.n {
            if n < 1.0 {
                let i = cosh_integral(n)?;
                b.positive_curvature = Some(4.0 * (1.0 - n) / p.rho * i * i);
            }
        }
    }
    if p.d.is_finite() {
        b.diameter = Some(4.0 * p.d * p.d);
    }
    if let Some(d) = d_che_inf.filter(|d| *d > 0.0) {
        b.mazya_cheeger = Some(4.0 / (d * d));
    }
    Ok(b)
}

fn cosh_model_check(p: &CDParams) -> Result<(f64, f64)> {
    match p.n {
        Dim::Finite(n) if p.rho > 0.0 && n < 1.0 => Ok((n, (p.rho / (1.0 - n)).sqrt())),
        _ => Err(FunctionalError::BadInput("cosh model needs ρ > 0, N < 1".into())),
    }
}

/// The model density `cosh^{N−1}(√−δ t)` on the line (`ρ > 0`, `N < 1`).
pub fn cosh_model(p: &CDParams) -> Result<ModelDensity> {
    let (n, k) = cosh_model_check(p)?;
    named_density(Family::Cosh { k, exponent: n - 1.0 }, f64::NEG_INFINITY, f64::INFINITY)
        .map_err(|e| FunctionalError::Profile(e.into()))
}

/// Exact linear Cheeger constant `√(ρ/(1−N)) / ∫₀^∞ cosh^{N−1}` of the cosh
/// model.
pub fn cosh_model_cheeger_inf(p: &CDParams) -> Result<f64> {
    let (n, k) = cosh_model_check(p)?;
    Ok(k / cosh_integral(n)?)
}

/// Concentration profile of the cosh model:
/// `K₀(r) = ∫_{√−δ r}^∞ cosh^{N−1} / (2 ∫₀^∞ cosh^{N−1})`.
pub fn cosh_model_concentration(p: &CDParams, r: f64) -> Result<f64> {
    let (n, k) = cosh_model_check(p)?;
    if r <= 0.0 {
        return Ok(0.5);
    }
    let m = named_density(Family::Cosh { k: 1.0, exponent: n - 1.0 }, k * r, f64::INFINITY)
        .map_err(|e| FunctionalError::Profile(e.into()))?;
    let tail = integrate(|t| m.eval(t), &m.interval(), &Quadrature::default())?.value();
    Ok(tail / (2.0 * cosh_integral(n)?))
}

/// The two-level decay `exp(−c·min(ρ r², √(ρ(1−N)) r))`.
pub fn two_level_decay(p: &CDParams, r: f64) -> Result<f64> {
    let (n, _) = cosh_model_check(p)?;
    let e = (p.rho * r * r).min((p.rho * (1.0 - n)).sqrt() * r);
    Ok((-cosh_constant_c() * e).exp())
}

/// `C = max K₀(r) / two_level_decay(r)` over `r` in a coarse grid of
/// `[0, 20/√ρ]`, so that `K₀ ≤ C·exp(−c·min(ρ r², √(ρ(1−N)) r))` there.
pub fn two_level_constant(p: &CDParams) -> Result<f64> {
    cosh_model_check(p)?;
    let hi = 20.0 / p.rho.sqrt();
    let mut best: f64 = 0.0;
    for i in 0..=200 {
        let r = hi * i as f64 / 200.0;
        best = best.max(cosh_model_concentration(p, r)? / two_level_decay(p, r)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoshEstimates {
    pub lower: f64,
    pub cosh: f64,
    pub upper: f64,
    pub sandwich_holds: bool,
    /// Bracket for `∫₀^∞ cosh^{N−1}`.
    pub integral_lo: f64,
    pub integral_hi: f64,
}

/// `exp(min(t²/2,t)/cosh²2) ≤ cosh t ≤ exp(min(t²/2,t))` at `t`, and the
/// bracket `[max(√(π/2)/√(1−N), 1/(1−N)), √(π/2) cosh2/√(1−N) + cosh²2/(1−N)]`.
pub fn cosh_estimates(n: f64, t: f64) -> Result<CoshEstimates> {
    if !(n < 1.0) || !(t >= 0.0) {
        return Err(FunctionalError::BadInput("need N < 1, t ≥ 0".into()));
    }
    let m = (0.5 * t * t).min(t);
    let lower = (m / cosh2_sq()).exp();
    let upper = m.exp();
    let c = t.cosh();
    let s = (1.0 - n).sqrt();
    let a = (0.5 * std::f64::consts::PI).sqrt();
    Ok(CoshEstimates {
        lower,
        cosh: c,
        upper,
        sandwich_holds: lower <= c && c <= upper,
        integral_lo: (a / s).max(1.0 / (1.0 - n)),
        integral_hi: a * 2f64.cosh() / s + cosh2_sq() / (1.0 - n),
    })
}

/// `2 ∫₀^∞ poly_concentration(d, N, r) dr = N 2^{−1/N} / (d (N+1))`,
/// finite for `N < −1`.
pub fn fm_bound(d: f64, n: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(FunctionalError::BadInput(format!("d = {d}")));
    }
    if (-1.0..0.0).contains(&n) {
        return Err(FunctionalError::FmDivergent);
    }
    if !(n < -1.0) {
        return Err(FunctionalError::BadInput(format!("N = {n}")));
    }
    Ok(n * 2f64.powf(-1.0 / n) / (d * (n + 1.0)))
}

/// Lower bound `2^{(N−1)/N} / (16 (fm_bound(d₁,N) + w₁))` on the Cheeger
/// constant of a measure at W₁-distance `w₁`.
pub fn stability_w1(d1: f64, n: f64, w1: f64) -> Result<f64> {
    if !(w1 >= 0.0) {
        return Err(FunctionalError::BadInput(format!("w1 = {w1}")));
    }
    let fm = fm_bound(d1, n)?;
    Ok(2f64.powf((n - 1.0) / n) / (16.0 * (fm + w1)))
}
