//! Numeric substrate: extended reals on `[0, +∞]`, adaptive Gauss–Kronrod
//! quadrature with analytic handling of endpoint singularities and infinite
//! tails, Brent root finding and multi-start golden-section minimization.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature-failed")]
    QuadratureFailed,
    #[error("bad-descriptor: {0}")]
    BadDescriptor(String),
    #[error("no-root-in-bracket")]
    NoRootInBracket,
    #[error("bad-interval")]
    BadInterval,
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Default relative tolerance for quadrature.
pub const DEFAULT_REL_TOL: f64 = 1e-10;
/// Default tolerance for root finding.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Default number of minimizer starts.
pub const DEFAULT_STARTS: usize = 8;

/// A value in `[0, +∞]` with `1/∞ = 0`, `1/0 = +∞` and `∞·0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a nonnegative value (`+∞` allowed). Returns `None` for negative
    /// or NaN input.
    pub fn new(x: f64) -> Option<ExtReal> {
        if x.is_nan() || x < 0.0 {
            None
        } else {
            Some(ExtReal(if x == 0.0 { 0.0 } else { x }))
        }
    }

    /// Like [`ExtReal::new`] but clamps tiny negative roundoff to zero.
    pub fn clamped(x: f64) -> ExtReal {
        if x.is_nan() {
            ExtReal::ZERO
        } else {
            ExtReal(x.max(0.0))
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    /// The value as an `f64` (`+∞` maps to `f64::INFINITY`).
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn finite(self) -> Option<f64> {
        self.0.is_finite().then_some(self.0)
    }

    pub fn recip(self) -> ExtReal {
        if self.0 == 0.0 {
            ExtReal::INFINITY
        } else if self.0.is_infinite() {
            ExtReal::ZERO
        } else {
            ExtReal(1.0 / self.0)
        }
    }

    pub fn mul(self, rhs: ExtReal) -> ExtReal {
        if self.0 == 0.0 || rhs.0 == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal(self.0 * rhs.0)
        }
    }

    pub fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }

    /// `self / rhs` computed as `self · (1/rhs)`.
    pub fn div(self, rhs: ExtReal) -> ExtReal {
        self.mul(rhs.recip())
    }

    pub fn min(self, rhs: ExtReal) -> ExtReal {
        if self <= rhs {
            self
        } else {
            rhs
        }
    }

    pub fn max(self, rhs: ExtReal) -> ExtReal {
        if self >= rhs {
            self
        } else {
            rhs
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 1e-250,
            max_subdivisions: 4000,
        }
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Quadrature::default()
        }
    }
}

/// Behaviour of the integrand at one end of the integration interval.
///
/// Finite ends take `Regular` or `Algebraic(κ)` (integrand `~ |t−end|^κ`);
/// infinite ends take `ExpTail(r)` (integrand `~ e^{r|t|}`, `r = -∞` for
/// super-exponential decay) or `PowerTail(p)` (integrand `~ |t|^p`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndKind {
    Regular,
    Algebraic(f64),
    ExpTail(f64),
    PowerTail(f64),
}

impl EndKind {
    fn diverges(self) -> bool {
        match self {
            EndKind::Regular => false,
            EndKind::Algebraic(k) => k <= -1.0,
            EndKind::ExpTail(r) => r >= 0.0,
            EndKind::PowerTail(p) => p >= -1.0,
        }
    }

    fn singular(self) -> Option<f64> {
        match self {
            EndKind::Algebraic(k) if k < 0.0 => Some(k),
            _ => None,
        }
    }
}

/// Integration domain with its endpoint descriptors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_kind: EndKind,
    pub hi_kind: EndKind,
    /// Where to split unbounded domains (typically the mode).
    pub center: Option<f64>,
    /// Length scale of the integrand, used for splitting and tail maps.
    pub scale: f64,
}

impl Interval {
    /// Finite interval with regular ends.
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval {
            lo,
            hi,
            lo_kind: EndKind::Regular,
            hi_kind: EndKind::Regular,
            center: None,
            scale: 1.0,
        }
    }

    pub fn lo_kind(mut self, k: EndKind) -> Interval {
        self.lo_kind = k;
        self
    }

    pub fn hi_kind(mut self, k: EndKind) -> Interval {
        self.hi_kind = k;
        self
    }

    pub fn centered(mut self, c: f64) -> Interval {
        self.center = Some(c);
        self
    }

    pub fn scaled(mut self, s: f64) -> Interval {
        self.scale = s;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.lo.is_nan() || self.hi.is_nan() || self.lo > self.hi {
            return Err(NumericsError::BadDescriptor(format!(
                "interval [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.lo == f64::INFINITY || self.hi == f64::NEG_INFINITY {
            return Err(NumericsError::BadDescriptor("empty unbounded interval".into()));
        }
        let check = |at: f64, k: EndKind, side: &str| -> Result<()> {
            let tail = matches!(k, EndKind::ExpTail(_) | EndKind::PowerTail(_));
            let bad_value = match k {
                EndKind::Algebraic(x) | EndKind::ExpTail(x) | EndKind::PowerTail(x) => {
                    x.is_nan()
                }
                EndKind::Regular => false,
            };
            if bad_value || (at.is_infinite() != tail) {
                Err(NumericsError::BadDescriptor(format!(
                    "{side} endpoint {at} with {k:?}"
                )))
            } else {
                Ok(())
            }
        };
        check(self.lo, self.lo_kind, "lower")?;
        check(self.hi, self.hi_kind, "upper")?;
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(NumericsError::BadDescriptor(format!("scale {}", self.scale)));
        }
        Ok(())
    }

    /// True when the descriptors force a divergent integral.
    pub fn diverges(&self) -> bool {
        self.lo < self.hi && (self.lo_kind.diverges() || self.hi_kind.diverges())
    }
}

// Change of variables t = t(u) for one piece of the domain, increasing in u.
#[derive(Debug, Clone, Copy)]
enum Map {
    Affine,
    // t = a + u^{1/e}, u ∈ [0, (c−a)^e]
    LeftAlg { a: f64, e: f64 },
    // t = b − (−u)^{1/e}, u ∈ [−(b−c)^e, 0]
    RightAlg { b: f64, e: f64 },
    // t = a − l·ln(−u), u ∈ [−1, 0)
    RightExp { a: f64, l: f64 },
    // t = b + l·ln(u), u ∈ (0, 1]
    LeftExp { b: f64, l: f64 },
    // t = a − l + l·(−u)^{−1/m}, u ∈ [−1, 0)
    RightPow { a: f64, l: f64, m: f64 },
    // t = b + l − l·u^{−1/m}, u ∈ (0, 1]
    LeftPow { b: f64, l: f64, m: f64 },
}

impl Map {
    fn t(&self, u: f64) -> f64 {
        match *self {
            Map::Affine => u,
            Map::LeftAlg { a, e } => a + u.powf(1.0 / e),
            Map::RightAlg { b, e } => b - (-u).powf(1.0 / e),
            Map::RightExp { a, l } => a - l * (-u).ln(),
            Map::LeftExp { b, l } => b + l * u.ln(),
            Map::RightPow { a, l, m } => a - l + l * (-u).powf(-1.0 / m),
            Map::LeftPow { b, l, m } => b + l - l * u.powf(-1.0 / m),
        }
    }

    fn dt(&self, u: f64) -> f64 {
        match *self {
            Map::Affine => 1.0,
            Map::LeftAlg { e, .. } => u.powf(1.0 / e - 1.0) / e,
            Map::RightAlg { e, .. } => (-u).powf(1.0 / e - 1.0) / e,
            Map::RightExp { l, .. } => l / (-u),
            Map::LeftExp { l, .. } => l / u,
            Map::RightPow { l, m, .. } => l / m * (-u).powf(-1.0 / m - 1.0),
            Map::LeftPow { l, m, .. } => l / m * u.powf(-1.0 / m - 1.0),
        }
    }

    fn u(&self, t: f64) -> f64 {
        match *self {
            Map::Affine => t,
            Map::LeftAlg { a, e } => (t - a).max(0.0).powf(e),
            Map::RightAlg { b, e } => -(b - t).max(0.0).powf(e),
            Map::RightExp { a, l } => -(-(t - a) / l).exp(),
            Map::LeftExp { b, l } => ((t - b) / l).exp(),
            Map::RightPow { a, l, m } => -((t - a + l) / l).powf(-m),
            Map::LeftPow { b, l, m } => ((b + l - t) / l).powf(-m),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    map: Map,
    u0: f64,
    u1: f64,
    t0: f64,
    t1: f64,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

// Gauss–Kronrod 7/15 rule on [a, b]; returns (kronrod, |kronrod − gauss|).
fn gk15<F: Fn(f64) -> f64>(h: &F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = h(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = r * XGK[j];
        let s = h(c - x) + h(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let (k, g) = (k * r, g * r);
    if !k.is_finite() || !g.is_finite() {
        return Err(NumericsError::QuadratureFailed);
    }
    Ok((k, (k - g).abs()))
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    piece: usize,
    u0: f64,
    u1: f64,
    value: f64,
    err: f64,
}

struct ByErr(Cell);

impl PartialEq for ByErr {
    fn eq(&self, other: &Self) -> bool {
        self.0.err == other.0.err
    }
}
impl Eq for ByErr {}
impl PartialOrd for ByErr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByErr {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.err.total_cmp(&other.0.err)
    }
}

fn tail_scale(kind: EndKind, at: f64, fallback: f64) -> f64 {
    match kind {
        EndKind::ExpTail(r) if r.is_finite() && r < 0.0 => (1.0 / -r).clamp(1e-6, 1e6),
        EndKind::PowerTail(_) => at.abs().max(fallback),
        _ => fallback,
    }
}

fn finite_piece(lo: f64, hi: f64, lk: EndKind, hk: EndKind) -> Vec<(Map, f64, f64)> {
    match (lk.singular(), hk.singular()) {
        (None, None) => vec![(Map::Affine, lo, hi)],
        (Some(k), None) => vec![(Map::LeftAlg { a: lo, e: 1.0 + k }, lo, hi)],
        (None, Some(k)) => vec![(Map::RightAlg { b: hi, e: 1.0 + k }, lo, hi)],
        (Some(k1), Some(k2)) => {
            let mid = 0.5 * (lo + hi);
            vec![
                (Map::LeftAlg { a: lo, e: 1.0 + k1 }, lo, mid),
                (Map::RightAlg { b: hi, e: 1.0 + k2 }, mid, hi),
            ]
        }
    }
}

fn right_tail(a: f64, kind: EndKind, scale: f64) -> (Map, f64, f64) {
    let l = tail_scale(kind, a, scale);
    match kind {
        EndKind::PowerTail(p) => (Map::RightPow { a, l, m: -p - 1.0 }, a, f64::INFINITY),
        _ => (Map::RightExp { a, l }, a, f64::INFINITY),
    }
}

fn left_tail(b: f64, kind: EndKind, scale: f64) -> (Map, f64, f64) {
    let l = tail_scale(kind, b, scale);
    match kind {
        EndKind::PowerTail(p) => (Map::LeftPow { b, l, m: -p - 1.0 }, f64::NEG_INFINITY, b),
        _ => (Map::LeftExp { b, l }, f64::NEG_INFINITY, b),
    }
}

fn build_pieces(iv: &Interval) -> Vec<Piece> {
    let s = iv.scale;
    let raw: Vec<(Map, f64, f64)> = match (iv.lo.is_finite(), iv.hi.is_finite()) {
        (true, true) => finite_piece(iv.lo, iv.hi, iv.lo_kind, iv.hi_kind),
        (true, false) => {
            let mut split = iv.lo + tail_scale(iv.hi_kind, iv.lo, s).min(1e3 * s);
            if let Some(c) = iv.center {
                if c > split {
                    split = c;
                }
            }
            let mut v = finite_piece(iv.lo, split, iv.lo_kind, EndKind::Regular);
            v.push(right_tail(split, iv.hi_kind, s));
            v
        }
        (false, true) => {
            let mut split = iv.hi - tail_scale(iv.lo_kind, iv.hi, s).min(1e3 * s);
            if let Some(c) = iv.center {
                if c < split {
                    split = c;
                }
            }
            let mut v = vec![left_tail(split, iv.lo_kind, s)];
            v.extend(finite_piece(split, iv.hi, EndKind::Regular, iv.hi_kind));
            v
        }
        (false, false) => {
            let c = iv.center.unwrap_or(0.0);
            let a = c - tail_scale(iv.lo_kind, c, s).min(1e3 * s);
            let b = c + tail_scale(iv.hi_kind, c, s).min(1e3 * s);
            vec![
                left_tail(a, iv.lo_kind, s),
                (Map::Affine, a, b),
                right_tail(b, iv.hi_kind, s),
            ]
        }
    };
    raw.into_iter()
        .map(|(map, t0, t1)| {
            let (u0, u1) = match map {
                Map::RightExp { .. } | Map::RightPow { .. } => (-1.0, 0.0),
                Map::LeftExp { .. } | Map::LeftPow { .. } => (0.0, 1.0),
                _ => (map.u(t0), map.u(t1)),
            };
            Piece {
                map,
                u0,
                u1,
                t0,
                t1,
            }
        })
        .collect()
}

/// Cumulative mass table produced by [`integrate_table`]; supports mass
/// below a point and its inverse.
#[derive(Debug, Clone)]
pub struct MassTable {
    pieces: Vec<Piece>,
    cells: Vec<Cell>,
    cum: Vec<f64>,
    total: f64,
    lo: f64,
    hi: f64,
}

/// Result of a tabulated integration.
#[derive(Debug, Clone)]
pub enum Integral {
    Finite(MassTable),
    Divergent,
}

impl Integral {
    pub fn value(&self) -> ExtReal {
        match self {
            Integral::Finite(t) => ExtReal::clamped(t.total),
            Integral::Divergent => ExtReal::INFINITY,
        }
    }
}

fn piece_integrand<'a, F: Fn(f64) -> f64>(f: &'a F, map: Map) -> impl Fn(f64) -> f64 + 'a {
    move |u: f64| {
        let d = map.dt(u);
        if d == 0.0 {
            return 0.0;
        }
        let v = f(map.t(u));
        if v == 0.0 {
            0.0
        } else {
            v * d
        }
    }
}

/// Integrates a nonnegative `f` over `iv`. Divergence is decided from the
/// endpoint descriptors alone; a finite answer is returned otherwise.
pub fn integrate<F: Fn(f64) -> f64>(f: F, iv: &Interval, q: &Quadrature) -> Result<ExtReal> {
    Ok(integrate_table(f, iv, q)?.value())
}

/// As [`integrate`], keeping the accepted subdivision for later use by
/// cumulative-mass and quantile queries.
pub fn integrate_table<F: Fn(f64) -> f64>(f: F, iv: &Interval, q: &Quadrature) -> Result<Integral> {
    iv.validate()?;
    if iv.diverges() {
        return Ok(Integral::Divergent);
    }
    let pieces = if iv.lo == iv.hi {
        Vec::new()
    } else {
        build_pieces(iv)
    };
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    const INITIAL: usize = 4;
    for (pi, p) in pieces.iter().enumerate() {
        let h = piece_integrand(&f, p.map);
        let w = (p.u1 - p.u0) / INITIAL as f64;
        for j in 0..INITIAL {
            let a = p.u0 + w * j as f64;
            let b = if j + 1 == INITIAL { p.u1 } else { a + w };
            let (value, err) = gk15(&h, a, b)?;
            total += value;
            total_err += err;
            heap.push(ByErr(Cell {
                piece: pi,
                u0: a,
                u1: b,
                value,
                err,
            }));
        }
    }
    let mut count = heap.len();
    while total_err > q.abs_tol.max(q.rel_tol * total.abs()) {
        if count >= q.max_subdivisions {
            return Err(NumericsError::QuadratureFailed);
        }
        let ByErr(c) = heap.pop().expect("nonempty heap");
        let h = piece_integrand(&f, pieces[c.piece].map);
        let mid = 0.5 * (c.u0 + c.u1);
        if mid <= c.u0 || mid >= c.u1 {
            return Err(NumericsError::QuadratureFailed);
        }
        let (v1, e1) = gk15(&h, c.u0, mid)?;
        let (v2, e2) = gk15(&h, mid, c.u1)?;
        total += v1 + v2 - c.value;
        total_err += e1 + e2 - c.err;
        heap.push(ByErr(Cell {
            piece: c.piece,
            u0: c.u0,
            u1: mid,
            value: v1,
            err: e1,
        }));
        heap.push(ByErr(Cell {
            piece: c.piece,
            u0: mid,
            u1: c.u1,
            value: v2,
            err: e2,
        }));
        count += 1;
    }
    let mut cells: Vec<Cell> = heap.into_iter().map(|b| b.0).collect();
    cells.sort_by(|x, y| x.piece.cmp(&y.piece).then(x.u0.total_cmp(&y.u0)));
    let mut cum = Vec::with_capacity(cells.len());
    let mut acc = 0.0;
    for c in &cells {
        cum.push(acc);
        acc += c.value;
    }
    Ok(Integral::Finite(MassTable {
        pieces,
        cells,
        cum,
        total: acc,
        lo: iv.lo,
        hi: iv.hi,
    }))
}

impl MassTable {
    pub fn total(&self) -> f64 {
        self.total
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        let pi = self.pieces.iter().position(|p| t <= p.t1)?;
        let p = &self.pieces[pi];
        let u = p.map.u(t).clamp(p.u0, p.u1);
        let first = self.cells.partition_point(|c| c.piece < pi);
        let end = self.cells.partition_point(|c| c.piece <= pi);
        let k = first + self.cells[first..end].partition_point(|c| c.u1 < u);
        Some((k.min(end - 1), u))
    }

    fn partial<F: Fn(f64) -> f64>(&self, f: &F, k: usize, u: f64) -> Result<f64> {
        let c = &self.cells[k];
        if u <= c.u0 {
            return Ok(0.0);
        }
        if u >= c.u1 {
            return Ok(c.value);
        }
        let h = piece_integrand(f, self.pieces[c.piece].map);
        Ok(gk15(&h, c.u0, u)?.0)
    }

    /// Mass of `(lo, t]`. `f` must be the integrand used to build the table.
    pub fn mass_below<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> Result<f64> {
        if self.cells.is_empty() || t <= self.lo {
            return Ok(0.0);
        }
        if t >= self.hi {
            return Ok(self.total);
        }
        match self.locate(t) {
            Some((k, u)) => Ok(self.cum[k] + self.partial(f, k, u)?),
            None => Ok(self.total),
        }
    }

    /// Smallest `t` with mass of `(lo, t]` equal to `m`, resolved to
    /// `mass_tol` in mass.
    pub fn inverse<F: Fn(f64) -> f64>(&self, f: &F, m: f64, mass_tol: f64) -> Result<f64> {
        if self.cells.is_empty() || m <= 0.0 {
            return Ok(self.lo);
        }
        if m >= self.total {
            return Ok(self.hi);
        }
        let k = self.cum.partition_point(|&c| c <= m).saturating_sub(1);
        let c = self.cells[k];
        let target = m - self.cum[k];
        let p = &self.pieces[c.piece];
        let g = |u: f64| -> f64 {
            match self.partial(f, k, u) {
                Ok(v) => v - target,
                Err(_) => f64::NAN,
            }
        };
        let (mut a, mut b) = (c.u0, c.u1);
        let (mut ga, mut gb) = (-target, c.value - target);
        // Safeguarded secant/bisection on the monotone partial mass.
        for it in 0..200 {
            if gb - ga <= mass_tol || b - a <= f64::EPSILON * a.abs().max(b.abs()) {
                break;
            }
            let mut x = a - ga * (b - a) / (gb - ga);
            if !(x > a && x < b) || it % 3 == 2 {
                x = 0.5 * (a + b);
            }
            let gx = g(x);
            if gx.is_nan() {
                return Err(NumericsError::QuadratureFailed);
            }
            if gx.abs() <= mass_tol {
                a = x;
                b = x;
                break;
            }
            if gx < 0.0 {
                a = x;
                ga = gx;
            } else {
                b = x;
                gb = gx;
            }
        }
        let u = if ga.abs() <= gb.abs() { a } else { b };
        Ok(p.map.t(u).clamp(p.t0, p.t1))
    }
}

/// A bracket `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Bracket> {
        if lo < hi && lo.is_finite() && hi.is_finite() {
            Ok(Bracket { lo, hi })
        } else {
            Err(NumericsError::BadInterval)
        }
    }
}

/// Brent's method. Returns a root of `g` in the bracket, resolved to a
/// bracket width of at most `tol`.
pub fn find_root<G: FnMut(f64) -> f64>(g: G, b: Bracket, tol: f64) -> Result<f64> {
    find_root_bracket(g, b, tol).map(|r| r.0)
}

/// As [`find_root`], also returning the final sign-change bracket.
pub fn find_root_bracket<G: FnMut(f64) -> f64>(
    mut g: G,
    br: Bracket,
    tol: f64,
) -> Result<(f64, Bracket)> {
    let (mut a, mut b) = (br.lo, br.hi);
    let (mut fa, mut fb) = (g(a), g(b));
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 || (fa.signum() == fb.signum() && fa != 0.0 && fb != 0.0) {
        return Err(NumericsError::NoRootInBracket);
    }
    if fa == 0.0 {
        return Ok((a, br));
    }
    if fb == 0.0 {
        return Ok((b, br));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            return Ok((b, Bracket { lo, hi: hi.max(lo) }));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = g(b);
        if fb.is_nan() {
            return Err(NumericsError::NoRootInBracket);
        }
    }
    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    Ok((b, Bracket { lo, hi }))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn nan_to_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Golden-section search on `[lo, hi]`, returning `(argmin, min)`.
pub fn golden_section<G: FnMut(f64) -> f64>(mut g: G, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = nan_to_inf(g(x1));
    let mut f2 = nan_to_inf(g(x2));
    while b - a > tol && b - a > 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = nan_to_inf(g(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = nan_to_inf(g(x2));
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Multi-start golden-section minimization on `[lo, hi]`: `starts`
/// equispaced samples (endpoints included), then a golden refinement around
/// every sampled local minimum. The result is never worse than any sample.
pub fn minimize_scalar<G: FnMut(f64) -> f64>(
    mut g: G,
    lo: f64,
    hi: f64,
    starts: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    if lo.is_nan() || hi.is_nan() || lo > hi || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::BadInterval);
    }
    if lo == hi {
        return Ok((lo, nan_to_inf(g(lo))));
    }
    let n = starts.max(2);
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| nan_to_inf(g(x))).collect();
    let mut best = (xs[0], fs[0]);
    for i in 0..n {
        if fs[i] < best.1 {
            best = (xs[i], fs[i]);
        }
    }
    for i in 0..n {
        let left_ok = i == 0 || fs[i] <= fs[i - 1];
        let right_ok = i + 1 == n || fs[i] <= fs[i + 1];
        if !(left_ok && right_ok) || fs[i].is_infinite() && best.1.is_finite() {
            continue;
        }
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(n - 1)];
        let (x, fx) = golden_section(&mut g, a, b, tol);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Quadrature {
        Quadrature::default()
    }

    #[test]
    fn ext_real_conventions() {
        assert_eq!(ExtReal::INFINITY.recip(), ExtReal::ZERO);
        assert_eq!(ExtReal::ZERO.recip(), ExtReal::INFINITY);
        assert_eq!(ExtReal::INFINITY.mul(ExtReal::ZERO), ExtReal::ZERO);
        assert_eq!(ExtReal::ZERO.mul(ExtReal::INFINITY), ExtReal::ZERO);
        assert!(ExtReal::INFINITY > ExtReal::new(1e300).unwrap());
        assert!(ExtReal::new(-1.0).is_none());
        assert_eq!(format!("{}", ExtReal::INFINITY), "inf");
    }

    #[test]
    fn integrate_constant() {
        let v = integrate(|_| 1.0, &Interval::new(0.0, 1.0), &q()).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrate_inverse_sqrt_singularity() {
        let iv = Interval::new(0.0, 1.0).lo_kind(EndKind::Algebraic(-0.5));
        let v = integrate(|t: f64| t.powf(-0.5), &iv, &q()).unwrap();
        assert!((v.value() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn integrate_nonintegrable_singularity_is_infinite() {
        let iv = Interval::new(0.0, 1.0).lo_kind(EndKind::Algebraic(-2.0));
        let v = integrate(|t: f64| t.powi(-2), &iv, &q()).unwrap();
        assert!(v.is_infinite());
    }

    #[test]
    fn integrate_tails() {
        let iv = Interval::new(0.0, f64::INFINITY).hi_kind(EndKind::ExpTail(-1.0));
        let v = integrate(|t: f64| (-t).exp(), &iv, &q()).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-12);
        let iv = Interval::new(f64::NEG_INFINITY, f64::INFINITY)
            .lo_kind(EndKind::ExpTail(f64::NEG_INFINITY))
            .hi_kind(EndKind::ExpTail(f64::NEG_INFINITY));
        let v = integrate(|t: f64| (-0.5 * t * t).exp(), &iv, &q()).unwrap();
        assert!((v.value() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        let iv = Interval::new(1.0, f64::INFINITY).hi_kind(EndKind::PowerTail(-3.0));
        let v = integrate(|t: f64| t.powi(-3), &iv, &q()).unwrap();
        assert!((v.value() - 0.5).abs() < 1e-12);
        let iv = Interval::new(1.0, f64::INFINITY).hi_kind(EndKind::PowerTail(-1.0));
        assert!(integrate(|t: f64| 1.0 / t, &iv, &q()).unwrap().is_infinite());
        // slow decay 1/(1+t)^{1.5}
        let iv = Interval::new(0.0, f64::INFINITY).hi_kind(EndKind::PowerTail(-1.5));
        let v = integrate(|t: f64| (1.0 + t).powf(-1.5), &iv, &q()).unwrap();
        assert!((v.value() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrate_two_singular_ends() {
        // ∫_0^π sin^{-1/2} = √(2π) Γ(1/4)/ (2 Γ(3/4)) ≈ 5.244115108584239
        let iv = Interval::new(0.0, std::f64::consts::PI)
            .lo_kind(EndKind::Algebraic(-0.5))
            .hi_kind(EndKind::Algebraic(-0.5));
        let v = integrate(|t: f64| t.sin().powf(-0.5), &iv, &q()).unwrap();
        assert!((v.value() - 5.244_115_108_584_239).abs() < 1e-9, "{}", v.value());
    }

    #[test]
    fn bad_descriptors() {
        let iv = Interval::new(0.0, f64::INFINITY);
        assert!(matches!(
            integrate(|_| 1.0, &iv, &q()),
            Err(NumericsError::BadDescriptor(_))
        ));
        let iv = Interval::new(0.0, 1.0).hi_kind(EndKind::ExpTail(-1.0));
        assert!(matches!(
            integrate(|_| 1.0, &iv, &q()),
            Err(NumericsError::BadDescriptor(_))
        ));
    }

    #[test]
    fn mass_table_inverse() {
        let f = |t: f64| (-t).exp();
        let iv = Interval::new(0.0, f64::INFINITY).hi_kind(EndKind::ExpTail(-1.0));
        let Integral::Finite(tab) = integrate_table(f, &iv, &q()).unwrap() else {
            panic!()
        };
        let x = tab.inverse(&f, 0.5, 1e-13).unwrap();
        assert!((x - std::f64::consts::LN_2).abs() < 1e-10);
        let m = tab.mass_below(&f, 1.0).unwrap();
        assert!((m - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn roots() {
        let r = find_root(|t| t - 0.5, Bracket::new(0.0, 1.0).unwrap(), 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        let r = find_root(|t: f64| t.exp() - 3.0, Bracket::new(0.0, 2.0).unwrap(), 1e-12).unwrap();
        assert!((r - 3f64.ln()).abs() < 1e-12);
        assert_eq!(
            find_root(|t| t * t + 1.0, Bracket::new(0.0, 1.0).unwrap(), 1e-12),
            Err(NumericsError::NoRootInBracket)
        );
    }

    #[test]
    fn minimize() {
        let (x, m) = minimize_scalar(|t| (t - 1.0) * (t - 1.0), 0.0, 2.0, 8, 1e-10).unwrap();
        assert!((x - 1.0).abs() < 1e-6 && m.abs() < 1e-12);
        let tp = 2.0 * std::f64::consts::PI;
        let (x, m) = minimize_scalar(f64::cos, 0.0, tp, 8, 1e-10).unwrap();
        assert!((x - std::f64::consts::PI).abs() < 1e-6 && (m + 1.0).abs() < 1e-12);
        let (_, m) = minimize_scalar(|_| 3.5, 0.0, 1.0, 8, 1e-10).unwrap();
        assert_eq!(m, 3.5);
        assert_eq!(
            minimize_scalar(|t| t, 1.0, 0.0, 8, 1e-10),
            Err(NumericsError::BadInterval)
        );
    }
}
