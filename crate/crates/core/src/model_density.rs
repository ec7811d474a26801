//! Extremal Jacobian functions `J_{H,ρ,N}`, the named model families built
//! from them, their support roots and integrability, and the
//! one-dimensional CD(ρ,N) residual `−LogHess_{N−1} f − ρ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{EndKind, ExtReal, Interval};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("bad-params: {0}")]
    BadParams(String),
    #[error("bad-family-params: {0}")]
    BadFamilyParams(String),
    #[error("outside-domain")]
    OutsideDomain,
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Generalized dimension `N ∈ (−∞, ∞]`, with exact tags for `N = 1` and
/// `N = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dim {
    Finite(f64),
    One,
    Infinite,
}

impl Dim {
    /// Parses a real into a dimension; `1` and `+∞` become exact tags.
    pub fn from_f64(x: f64) -> Option<Dim> {
        if x.is_nan() || x == f64::NEG_INFINITY {
            None
        } else if x == f64::INFINITY {
            Some(Dim::Infinite)
        } else if x == 1.0 {
            Some(Dim::One)
        } else {
            Some(Dim::Finite(x))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Dim::Finite(x) => x,
            Dim::One => 1.0,
            Dim::Infinite => f64::INFINITY,
        }
    }

    /// `N − 1` for finite `N ≠ 1`.
    pub fn nm1(self) -> Option<f64> {
        match self {
            Dim::Finite(x) => Some(x - 1.0),
            _ => None,
        }
    }

    /// `1/(N−1)` with `1/∞ = 0` and `1/0 = +∞`.
    pub fn inv_nm1(self) -> f64 {
        match self {
            Dim::Finite(x) => 1.0 / (x - 1.0),
            Dim::One => f64::INFINITY,
            Dim::Infinite => 0.0,
        }
    }
}

/// Curvature-dimension-diameter parameters `(ρ, N, D)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CDParams {
    pub rho: f64,
    pub n: Dim,
    pub d: f64,
}

impl CDParams {
    pub fn new(rho: f64, n: f64, d: f64) -> Result<CDParams> {
        if !rho.is_finite() {
            return Err(ModelError::BadParams(format!("rho must be finite, got {rho}")));
        }
        let n = Dim::from_f64(n).ok_or_else(|| ModelError::BadParams(format!("N = {n}")))?;
        if d.is_nan() || d <= 0.0 {
            return Err(ModelError::BadParams(format!("D must lie in (0, inf], got {d}")));
        }
        Ok(CDParams { rho, n, d })
    }

    /// `δ = ρ/(N−1)`; zero for `N = ∞` and undefined for `N = 1`.
    pub fn delta(&self) -> Option<f64> {
        match self.n {
            Dim::Finite(x) => Some(self.rho / (x - 1.0)),
            Dim::Infinite => Some(0.0),
            Dim::One => None,
        }
    }

    /// The excluded case `N = 1, ρ < 0, D < ∞`.
    pub fn is_pathological(&self) -> bool {
        self.n == Dim::One && self.rho < 0.0 && self.d.is_finite()
    }
}

/// `(s_δ(t), c_δ(t))`.
pub fn trig_pair(delta: f64, t: f64) -> (f64, f64) {
    if delta > 0.0 {
        let k = delta.sqrt();
        ((k * t).sin() / k, (k * t).cos())
    } else if delta < 0.0 {
        let k = (-delta).sqrt();
        ((k * t).sinh() / k, (k * t).cosh())
    } else {
        (t, 1.0)
    }
}

/// First nonpositive and first positive roots of the Jacobian base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportRoots {
    pub xi_minus: f64,
    pub xi_plus: f64,
}

// Base g(t) = c_δ(t) + H/(N−1)·s_δ(t), normalized by k = √|δ| and
// β = H/((N−1)k).
#[derive(Debug, Clone, Copy, PartialEq)]
enum Base {
    Linear { h: f64 },
    Trig { k: f64, beta: f64 },
    Hyp { k: f64, beta: f64 },
}

impl Base {
    fn new(h_coef: f64, delta: f64) -> Base {
        if delta > 0.0 {
            let k = delta.sqrt();
            Base::Trig { k, beta: h_coef / k }
        } else if delta < 0.0 {
            let k = (-delta).sqrt();
            Base::Hyp { k, beta: h_coef / k }
        } else {
            Base::Linear { h: h_coef }
        }
    }

    fn roots(self) -> SupportRoots {
        let (xi_minus, xi_plus) = match self {
            Base::Linear { h } => {
                if h > 0.0 {
                    (-1.0 / h, f64::INFINITY)
                } else if h < 0.0 {
                    (f64::NEG_INFINITY, -1.0 / h)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
            Base::Trig { k, beta } => {
                let phi = beta.atan();
                ((phi - PI / 2.0) / k, (phi + PI / 2.0) / k)
            }
            Base::Hyp { k, beta } => {
                if beta > 1.0 {
                    (-(1.0 / beta).atanh() / k, f64::INFINITY)
                } else if beta < -1.0 {
                    (f64::NEG_INFINITY, (1.0 / -beta).atanh() / k)
                } else {
                    (f64::NEG_INFINITY, f64::INFINITY)
                }
            }
        };
        SupportRoots { xi_minus, xi_plus }
    }

    // ln g(t), −∞ where g ≤ 0.
    fn ln_g(self, t: f64) -> f64 {
        let ln_pos = |g: f64| if g > 0.0 { g.ln() } else { f64::NEG_INFINITY };
        match self {
            Base::Linear { h } => ln_pos(1.0 + h * t),
            Base::Trig { k, beta } => ln_pos((k * t).cos() + beta * (k * t).sin()),
            Base::Hyp { k, beta } => {
                let a = k * t;
                if a >= 0.0 && beta > -1.0 {
                    a + ln_pos(((1.0 + beta) + (1.0 - beta) * (-2.0 * a).exp()) / 2.0)
                } else if a < 0.0 && beta < 1.0 {
                    -a + ln_pos(((1.0 - beta) + (1.0 + beta) * (2.0 * a).exp()) / 2.0)
                } else {
                    ln_pos(((1.0 + beta) * a.exp() + (1.0 - beta) * (-a).exp()) / 2.0)
                }
            }
        }
    }

    // g'(t)/g(t).
    fn log_slope(self, t: f64) -> f64 {
        match self {
            Base::Linear { h } => h / (1.0 + h * t),
            Base::Trig { k, beta } => {
                let (s, c) = (k * t).sin_cos();
                k * (beta * c - s) / (c + beta * s)
            }
            Base::Hyp { k, beta } => {
                let th = (k * t).tanh();
                k * (th + beta) / (1.0 + beta * th)
            }
        }
    }

    // Exponential growth rate of g at ±∞ (only meaningful when that side is
    // unbounded): g ~ e^{rate·|t|}.
    fn log_rate(self, right: bool) -> Option<f64> {
        match self {
            Base::Hyp { k, beta } => {
                let lead = if right { 1.0 + beta } else { 1.0 - beta };
                Some(if lead > 0.0 { k } else { -k })
            }
            _ => None,
        }
    }
}

/// The Jacobian `J_{H,ρ,N}` in evaluable form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub h: f64,
    pub rho: f64,
    pub n: Dim,
    shape: Shape,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Gaussian,
    Constant(f64),
    Power { nm1: f64, base: Base, roots: SupportRoots },
}

impl Jacobian {
    pub fn new(h: f64, rho: f64, n: Dim) -> Jacobian {
        let shape = match n {
            Dim::Infinite => Shape::Gaussian,
            Dim::One => Shape::Constant(if rho == 0.0 { 1.0 } else { f64::INFINITY }),
            Dim::Finite(x) => {
                let nm1 = x - 1.0;
                let base = Base::new(h / nm1, rho / nm1);
                Shape::Power {
                    nm1,
                    base,
                    roots: base.roots(),
                }
            }
        };
        Jacobian { h, rho, n, shape }
    }

    pub fn from_params(h: f64, p: &CDParams) -> Jacobian {
        Jacobian::new(h, p.rho, p.n)
    }

    pub fn roots(&self) -> SupportRoots {
        match self.shape {
            Shape::Power { roots, .. } => roots,
            _ => SupportRoots {
                xi_minus: f64::NEG_INFINITY,
                xi_plus: f64::INFINITY,
            },
        }
    }

    /// `ln J(t)`, `−∞` outside the support.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match self.shape {
            Shape::Gaussian => self.h * t - 0.5 * self.rho * t * t,
            Shape::Constant(c) => c.ln(),
            Shape::Power { nm1, base, roots } => {
                if t < roots.xi_minus || t > roots.xi_plus {
                    return f64::NEG_INFINITY;
                }
                let lg = base.ln_g(t);
                if lg == f64::NEG_INFINITY || t == roots.xi_minus || t == roots.xi_plus {
                    if nm1 < 0.0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                } else {
                    nm1 * lg
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> ExtReal {
        ExtReal::clamped(self.ln_eval(t).exp())
    }

    /// `(ln J)'(t)` and `(ln J)''(t)` inside the support.
    fn log_derivs(&self, t: f64) -> (f64, f64) {
        match self.shape {
            Shape::Gaussian => (self.h - self.rho * t, -self.rho),
            Shape::Constant(_) => (0.0, 0.0),
            Shape::Power { nm1, base, .. } => {
                let q = base.log_slope(t);
                let delta = self.rho / nm1;
                (nm1 * q, nm1 * (-delta - q * q))
            }
        }
    }

    fn identically_infinite(&self) -> bool {
        matches!(self.shape, Shape::Constant(c) if c.is_infinite())
    }

    // Endpoint behaviour of J at a finite root or at ±∞.
    fn end_kind(&self, x: f64, right: bool) -> EndKind {
        if self.identically_infinite() {
            return if x.is_infinite() {
                EndKind::ExpTail(f64::INFINITY)
            } else {
                EndKind::Algebraic(f64::NEG_INFINITY)
            };
        }
        match self.shape {
            Shape::Gaussian => {
                if !x.is_infinite() {
                    EndKind::Regular
                } else if self.rho > 0.0 {
                    EndKind::ExpTail(f64::NEG_INFINITY)
                } else if self.rho < 0.0 {
                    EndKind::ExpTail(f64::INFINITY)
                } else {
                    EndKind::ExpTail(if right { self.h } else { -self.h })
                }
            }
            Shape::Constant(_) => {
                if x.is_infinite() {
                    EndKind::ExpTail(0.0)
                } else {
                    EndKind::Regular
                }
            }
            Shape::Power { nm1, base, roots } => {
                if x.is_infinite() {
                    match base {
                        Base::Linear { h } if h == 0.0 => EndKind::ExpTail(0.0),
                        Base::Linear { .. } => EndKind::PowerTail(nm1),
                        _ => EndKind::ExpTail(nm1 * base.log_rate(right).unwrap_or(0.0)),
                    }
                } else if x == roots.xi_minus || x == roots.xi_plus {
                    EndKind::Algebraic(nm1)
                } else {
                    EndKind::Regular
                }
            }
        }
    }

    fn hints(&self) -> (Option<f64>, f64) {
        match self.shape {
            Shape::Gaussian if self.rho > 0.0 => (Some(self.h / self.rho), 1.0 / self.rho.sqrt()),
            Shape::Power { base, .. } => match base {
                Base::Hyp { k, beta } if beta.abs() < 1.0 => (Some(-beta.atanh() / k), 1.0 / k),
                Base::Hyp { k, .. } | Base::Trig { k, .. } => (None, 1.0 / k),
                Base::Linear { h } if h != 0.0 => (None, 1.0 / h.abs()),
                _ => (None, 1.0),
            },
            _ => (None, 1.0),
        }
    }
}

/// `J_{H,ρ,N}(t)`.
pub fn eval_j(h: f64, p: &CDParams, t: f64) -> ExtReal {
    Jacobian::from_params(h, p).eval(t)
}

/// Support roots `(ξ₋, ξ₊)` of `J_{H,ρ,N}`; `(−∞, ∞)` for `N ∈ {1, ∞}`.
pub fn support_roots(h: f64, p: &CDParams) -> SupportRoots {
    Jacobian::from_params(h, p).roots()
}

/// Analytic integrability class of a density on an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrability {
    Finite,
    DivergentAtRoot,
    DivergentAtInfinity,
}

/// Integrability of `J_{H,ρ,N}` on `[lo, hi]` (clipped to its support).
pub fn integrability(h: f64, p: &CDParams, lo: f64, hi: f64) -> Integrability {
    let m = ModelDensity {
        family: Family::Jacobian {
            h,
            rho: p.rho,
            n: p.n,
        },
        scale: 1.0,
        offset: 0.0,
        lo,
        hi,
    };
    m.integrability()
}

/// Model family tag with parameters. Densities are evaluated at
/// `y = t + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    /// `J_{H,ρ,N}(y)`.
    Jacobian { h: f64, rho: f64, n: Dim },
    /// `cosh(k y)^exponent`.
    Cosh { k: f64, exponent: f64 },
    /// `sinh(k y)^exponent`, `y > 0`.
    Sinh { k: f64, exponent: f64 },
    /// `exp(k y)^exponent`.
    Exp { k: f64, exponent: f64 },
    /// `sin(k y)^exponent`, `0 < y < π/k`.
    Sin { k: f64, exponent: f64 },
    /// `y^exponent`, `y > 0`.
    Power { exponent: f64 },
    /// `1`.
    Uniform,
}

impl Family {
    /// `cosh(√−δ t)^{N−1}`.
    pub fn cosh(n: f64, delta: f64) -> Family {
        Family::Cosh {
            k: (-delta).sqrt(),
            exponent: n - 1.0,
        }
    }

    /// `sinh(√−δ t)^{N−1}`.
    pub fn sinh(n: f64, delta: f64) -> Family {
        Family::Sinh {
            k: (-delta).sqrt(),
            exponent: n - 1.0,
        }
    }

    /// `exp(√−δ t)^{N−1}`.
    pub fn exp(n: f64, delta: f64) -> Family {
        Family::Exp {
            k: (-delta).sqrt(),
            exponent: n - 1.0,
        }
    }

    /// `sin(√δ t)^{N−1}`.
    pub fn sin(n: f64, delta: f64) -> Family {
        Family::Sin {
            k: delta.sqrt(),
            exponent: n - 1.0,
        }
    }

    /// `t^{N−1}`.
    pub fn power(n: f64) -> Family {
        Family::Power { exponent: n - 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Jacobian { .. } => "jacobian",
            Family::Cosh { .. } => "cosh",
            Family::Sinh { .. } => "sinh",
            Family::Exp { .. } => "exp",
            Family::Sin { .. } => "sin",
            Family::Power { .. } => "power",
            Family::Uniform => "uniform",
        }
    }

    // Open positivity interval in y.
    fn positivity(&self) -> (f64, f64) {
        match *self {
            Family::Jacobian { h, rho, n } => {
                let r = Jacobian::new(h, rho, n).roots();
                (r.xi_minus, r.xi_plus)
            }
            Family::Sinh { .. } | Family::Power { .. } => (0.0, f64::INFINITY),
            Family::Sin { k, .. } => (0.0, PI / k),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// A symbolic density `scale · base(t + offset)` restricted to `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelDensity {
    pub family: Family,
    pub scale: f64,
    pub offset: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kernel {
    Jacobian(Jacobian),
    Named(Family),
}

/// A [`ModelDensity`] with its domain and Jacobian resolved once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityFn {
    kernel: Kernel,
    scale: f64,
    offset: f64,
    lo: f64,
    hi: f64,
}

impl DensityFn {
    fn base_ln(&self, y: f64) -> f64 {
        match self.kernel {
            Kernel::Jacobian(j) => j.ln_eval(y),
            Kernel::Named(f) => match f {
                Family::Cosh { k, exponent } => exponent * ln_cosh(k * y),
                Family::Sinh { k, exponent } => exponent * ln_sinh(k * y),
                Family::Exp { k, exponent } => exponent * k * y,
                Family::Sin { k, exponent } => pow_ln(exponent, (k * y).sin()),
                Family::Power { exponent } => pow_ln(exponent, y),
                Family::Uniform => 0.0,
                Family::Jacobian { h, rho, n } => Jacobian::new(h, rho, n).ln_eval(y),
            },
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.lo || t > self.hi || self.lo == self.hi {
            return 0.0;
        }
        self.scale * self.base_ln(t + self.offset).exp()
    }
}

/// Builds a named model density on `[lo, hi]`, validating parameters.
pub fn named_density(family: Family, lo: f64, hi: f64) -> Result<ModelDensity> {
    let bad = |m: String| Err(ModelError::BadFamilyParams(m));
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return bad(format!("empty domain [{lo}, {hi}]"));
    }
    let fin = |x: f64| x.is_finite();
    match family {
        Family::Cosh { k, exponent } | Family::Exp { k, exponent } => {
            if !(fin(k) && fin(exponent)) || (matches!(family, Family::Cosh { .. }) && k <= 0.0) {
                return bad(format!("{family:?}"));
            }
        }
        Family::Sinh { k, exponent } => {
            if !(fin(k) && k > 0.0 && fin(exponent)) || lo < 0.0 {
                return bad(format!("{family:?} on [{lo}, {hi}]"));
            }
        }
        Family::Sin { k, exponent } => {
            let end = PI / k;
            if !(fin(k) && k > 0.0 && fin(exponent))
                || lo < 0.0
                || hi > end * (1.0 + 1e-12)
            {
                return bad(format!("{family:?} on [{lo}, {hi}] exceeds (0, {end})"));
            }
        }
        Family::Power { exponent } => {
            if !fin(exponent) || lo < 0.0 {
                return bad(format!("{family:?} on [{lo}, {hi}]"));
            }
        }
        Family::Uniform => {}
        Family::Jacobian { h, rho, .. } => {
            if !(fin(h) && fin(rho)) {
                return bad(format!("{family:?}"));
            }
        }
    }
    let mut hi = hi;
    if let Family::Sin { k, .. } = family {
        hi = hi.min(PI / k);
    }
    Ok(ModelDensity {
        family,
        scale: 1.0,
        offset: 0.0,
        lo,
        hi,
    })
}

impl ModelDensity {
    /// Multiplies the density by a positive constant.
    pub fn scaled(mut self, c: f64) -> ModelDensity {
        self.scale *= c;
        self
    }

    /// Re-expresses the density in the variable `t = y − offset`, moving the
    /// domain accordingly.
    pub fn shifted(mut self, offset: f64) -> ModelDensity {
        self.offset += offset;
        self.lo -= offset;
        self.hi -= offset;
        self
    }

    /// Restricts the domain to `[lo, hi] ∩` current domain.
    pub fn restricted(mut self, lo: f64, hi: f64) -> ModelDensity {
        self.lo = self.lo.max(lo);
        self.hi = self.hi.min(hi);
        self
    }

    /// Effective domain: the declared domain intersected with the closure of
    /// the positivity interval.
    pub fn domain(&self) -> (f64, f64) {
        let (a, b) = self.family.positivity();
        let lo = self.lo.max(a - self.offset);
        let hi = self.hi.min(b - self.offset);
        (lo, hi.max(lo))
    }

    /// Precomputed evaluator; cheaper than repeated [`ModelDensity::eval`].
    pub fn evaluator(&self) -> DensityFn {
        let (lo, hi) = self.domain();
        let kernel = match self.family {
            Family::Jacobian { h, rho, n } => Kernel::Jacobian(Jacobian::new(h, rho, n)),
            f => Kernel::Named(f),
        };
        DensityFn {
            kernel,
            scale: self.scale,
            offset: self.offset,
            lo,
            hi,
        }
    }

    /// Density value at `t` (0 outside the domain, `+∞` at singular ends).
    pub fn eval(&self, t: f64) -> f64 {
        self.evaluator().eval(t)
    }

    fn end_kind(&self, x: f64, right: bool) -> EndKind {
        let y = x + self.offset;
        let (a, b) = self.family.positivity();
        let at_root = |r: f64| r.is_finite() && (y - r).abs() <= 1e-13 * r.abs().max(1.0);
        let algebraic = |e: f64| {
            if e == 0.0 {
                EndKind::Regular
            } else {
                EndKind::Algebraic(e)
            }
        };
        match self.family {
            Family::Jacobian { h, rho, n } => {
                let j = Jacobian::new(h, rho, n);
                if x.is_infinite() {
                    j.end_kind(x, right)
                } else if at_root(a) {
                    j.end_kind(j.roots().xi_minus, false)
                } else if at_root(b) {
                    j.end_kind(j.roots().xi_plus, true)
                } else {
                    j.end_kind(y, right)
                }
            }
            Family::Cosh { k, exponent } => {
                if x.is_infinite() {
                    EndKind::ExpTail(exponent * k)
                } else {
                    EndKind::Regular
                }
            }
            Family::Sinh { k, exponent } => {
                if x.is_infinite() {
                    EndKind::ExpTail(exponent * k)
                } else if at_root(0.0) {
                    algebraic(exponent)
                } else {
                    EndKind::Regular
                }
            }
            Family::Exp { k, exponent } => {
                if x.is_infinite() {
                    EndKind::ExpTail(if right { exponent * k } else { -exponent * k })
                } else {
                    EndKind::Regular
                }
            }
            Family::Sin { exponent, .. } => {
                if at_root(a) || at_root(b) {
                    algebraic(exponent)
                } else {
                    EndKind::Regular
                }
            }
            Family::Power { exponent } => {
                if x.is_infinite() {
                    EndKind::PowerTail(exponent)
                } else if at_root(0.0) {
                    algebraic(exponent)
                } else {
                    EndKind::Regular
                }
            }
            Family::Uniform => {
                if x.is_infinite() {
                    EndKind::ExpTail(0.0)
                } else {
                    EndKind::Regular
                }
            }
        }
    }

    /// Quadrature descriptor for the effective domain.
    pub fn interval(&self) -> Interval {
        let (lo, hi) = self.domain();
        let mut iv = Interval::new(lo, hi)
            .lo_kind(self.end_kind(lo, false))
            .hi_kind(self.end_kind(hi, true));
        let (center, scale) = match self.family {
            Family::Jacobian { h, rho, n } => Jacobian::new(h, rho, n).hints(),
            Family::Cosh { k, .. } => (Some(0.0), 1.0 / k),
            Family::Sinh { k, .. } | Family::Sin { k, .. } => (None, 1.0 / k),
            Family::Exp { k, exponent } if k * exponent != 0.0 => (None, 1.0 / (k * exponent).abs()),
            _ => (None, 1.0),
        };
        if let Some(c) = center {
            iv = iv.centered(c - self.offset);
        }
        if scale.is_finite() && scale > 0.0 {
            iv = iv.scaled(scale.clamp(1e-6, 1e6));
        }
        iv
    }

    /// Analytic integrability class over the effective domain.
    pub fn integrability(&self) -> Integrability {
        let iv = self.interval();
        if iv.lo == iv.hi {
            return Integrability::Finite;
        }
        let root_div = |k: EndKind| matches!(k, EndKind::Algebraic(e) if e <= -1.0);
        if root_div(iv.lo_kind) || root_div(iv.hi_kind) {
            Integrability::DivergentAtRoot
        } else if iv.diverges() {
            Integrability::DivergentAtInfinity
        } else {
            Integrability::Finite
        }
    }

    // (ln f)' and (ln f)'' in closed form at y.
    fn log_derivs(&self, y: f64) -> (f64, f64) {
        match self.family {
            Family::Jacobian { h, rho, n } => Jacobian::new(h, rho, n).log_derivs(y),
            Family::Cosh { k, exponent } => {
                let th = (k * y).tanh();
                (exponent * k * th, exponent * k * k * (1.0 - th * th))
            }
            Family::Sinh { k, exponent } => {
                let sh = (k * y).sinh();
                (exponent * k / (k * y).tanh(), -exponent * k * k / (sh * sh))
            }
            Family::Exp { k, exponent } => (exponent * k, 0.0),
            Family::Sin { k, exponent } => {
                let (s, c) = (k * y).sin_cos();
                (exponent * k * c / s, -exponent * k * k / (s * s))
            }
            Family::Power { exponent } => (exponent / y, -exponent / (y * y)),
            Family::Uniform => (0.0, 0.0),
        }
    }

    fn identically_infinite(&self) -> bool {
        matches!(self.family, Family::Jacobian { rho, n: Dim::One, .. } if rho != 0.0)
    }
}

fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (0.5 * (1.0 + (-2.0 * a).exp())).ln()
}

fn ln_sinh(x: f64) -> f64 {
    if x <= 0.0 {
        f64::NEG_INFINITY
    } else if x > 20.0 {
        x + (0.5 * (1.0 - (-2.0 * x).exp())).ln()
    } else {
        x.sinh().ln()
    }
}

fn pow_ln(e: f64, base: f64) -> f64 {
    if base > 0.0 {
        e * base.ln()
    } else if e < 0.0 {
        f64::INFINITY
    } else if e == 0.0 {
        0.0
    } else {
        f64::NEG_INFINITY
    }
}

fn loghess_residual(l1: f64, l2: f64, p: &CDParams) -> f64 {
    let inv = p.n.inv_nm1();
    let sq = if l1 == 0.0 { 0.0 } else { inv * l1 * l1 };
    -(l2 + sq) - p.rho
}

/// `−LogHess_{N−1} f(t) − ρ` for a model density, from closed-form
/// derivatives. Nonnegative on the domain iff `f` satisfies CD(ρ,N).
pub fn cd1d_residual(f: &ModelDensity, p: &CDParams, t: f64) -> Result<f64> {
    let (lo, hi) = f.domain();
    if !(t > lo && t < hi) || f.identically_infinite() {
        return Err(ModelError::OutsideDomain);
    }
    let (l1, l2) = f.log_derivs(t + f.offset);
    if !(l1.is_finite() && l2.is_finite()) {
        return Err(ModelError::OutsideDomain);
    }
    Ok(loghess_residual(l1, l2, p))
}

/// `−LogHess_{N−1} f(t) − ρ` for an arbitrary positive function, by central
/// differences of `ln f` with step `max(1e−5, 1e−5|t|)`.
pub fn cd1d_residual_fd<F: Fn(f64) -> f64>(f: F, p: &CDParams, t: f64) -> Result<f64> {
    let h = (1e-5 * t.abs()).max(1e-5);
    let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
    if !(fm > 0.0 && f0 > 0.0 && fp > 0.0) || !(fm.is_finite() && f0.is_finite() && fp.is_finite()) {
        return Err(ModelError::OutsideDomain);
    }
    let (lm, l0, lp) = (fm.ln(), f0.ln(), fp.ln());
    let l1 = (lp - lm) / (2.0 * h);
    let l2 = (lp - 2.0 * l0 + lm) / (h * h);
    Ok(loghess_residual(l1, l2, p))
}
