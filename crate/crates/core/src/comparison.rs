//! Checks for sampled Jacobian functions: the one-dimensional
//! differential inequality `−LogHess_{N−1} J ≥ ρ`, Sturm–Liouville
//! domination `J ≤ J_{H,ρ,N}`, and the split Cauchy–Schwarz inequality
//! `A²/α + B²/β ≥ (A+B)²/(α+β)`.

use serde::Serialize;
use thiserror::Error;

use crate::model_density::{eval_j, support_roots, CDParams, Dim};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComparisonError {
    #[error("outside-positivity-interval")]
    OutsidePositivity,
    #[error("not-cd-certified")]
    NotCdCertified,
    #[error("degenerate-split")]
    DegenerateSplit,
    #[error("bad-sample: {0}")]
    BadSample(String),
}

pub type Result<T> = std::result::Result<T, ComparisonError>;

/// Residual threshold below which a sample counts as CD-certified
/// (finite-difference error budget).
pub const CD_CERT_TOL: f64 = 1e-5;

/// A Jacobian sampled on an ordered grid containing `0`, with `J(0) = 1`
/// and `J'(0) = H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobianSample {
    pub t: Vec<f64>,
    pub j: Vec<f64>,
    pub h: f64,
}

impl JacobianSample {
    pub fn new(t: Vec<f64>, j: Vec<f64>, h: f64) -> Result<JacobianSample> {
        let bad = |m: String| Err(ComparisonError::BadSample(m));
        if t.len() != j.len() || t.len() < 3 {
            return bad("need at least three (t, J) pairs".into());
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("t must be strictly increasing".into());
        }
        let Some(i0) = t.iter().position(|&x| x == 0.0) else {
            return bad("t-grid must contain 0".into());
        };
        if (j[i0] - 1.0).abs() > 1e-9 {
            return bad(format!("J(0) = {} ≠ 1", j[i0]));
        }
        let span = t[t.len() - 1] - t[0];
        if t.windows(2).any(|w| w[1] - w[0] > 1e-2 * span * (1.0 + 1e-9)) {
            return bad("grid spacing exceeds 1e-2 of the span".into());
        }
        if !h.is_finite() {
            return bad("H must be finite".into());
        }
        Ok(JacobianSample { t, j, h })
    }

    /// Parses `t,J` CSV. Without `h`, `J'(0)` is estimated by a centered
    /// difference at `t = 0`.
    pub fn from_csv(text: &str, h: Option<f64>) -> Result<JacobianSample> {
        let mut t = Vec::new();
        let mut j = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (k == 0 && line.eq_ignore_ascii_case("t,j")) {
                continue;
            }
            let mut it = line.split(',').map(|s| s.trim().parse::<f64>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(a)), Some(Ok(b)), None) => {
                    t.push(a);
                    j.push(b);
                }
                _ => return Err(ComparisonError::BadSample(format!("line {}: {line}", k + 1))),
            }
        }
        let h = match h {
            Some(h) => h,
            None => {
                let i0 = t.iter().position(|&x| x == 0.0).unwrap_or(0);
                if i0 == 0 || i0 + 1 >= t.len() {
                    return Err(ComparisonError::BadSample("0 must be an interior grid point".into()));
                }
                (j[i0 + 1] - j[i0 - 1]) / (t[i0 + 1] - t[i0 - 1])
            }
        };
        JacobianSample::new(t, j, h)
    }

    /// Samples `f` on `n` equispaced points of `[lo, hi]` shifted so that `0`
    /// is a node.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, h: f64, lo: f64, hi: f64, n: usize) -> Result<JacobianSample> {
        if !(lo < 0.0 && hi > 0.0) || n < 3 {
            return Err(ComparisonError::BadSample("need lo < 0 < hi and n ≥ 3".into()));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let k = (-lo / step).round();
        let t: Vec<f64> = (0..n).map(|i| (i as f64 - k) * step).collect();
        let j = t.iter().map(|&x| f(x)).collect();
        JacobianSample::new(t, j, h)
    }
}

/// A sample of `J_{H,ρ,N}` itself on the symmetric window `[−w, w]`, `w` a
/// third of the distance to the nearer root, capped at `1`.
pub fn model_sample(h: f64, p: &CDParams, n: usize) -> Result<JacobianSample> {
    let r = support_roots(h, p);
    let w = ((-r.xi_minus).min(r.xi_plus) / 3.0).min(1.0);
    JacobianSample::from_fn(|t| eval_j(h, p, t).value(), h, -w, w, n)
}

/// `−LogHess_{N−1} J − ρ` at interior grid points, from differences of
/// `ln J`: five-point stencils on uniform grids, three-point otherwise.
pub fn jac_cd_residuals(s: &JacobianSample, p: &CDParams) -> Result<Vec<f64>> {
    let inv = match p.n {
        Dim::One => return Err(ComparisonError::BadSample("N = 1".into())),
        Dim::Infinite => 0.0,
        Dim::Finite(n) => 1.0 / (n - 1.0),
    };
    if s.j.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(ComparisonError::OutsidePositivity);
    }
    let l: Vec<f64> = s.j.iter().map(|x| x.ln()).collect();
    let t = &s.t;
    let n = t.len();
    let step = (t[n - 1] - t[0]) / (n - 1) as f64;
    let uniform = n >= 6 && t.windows(2).all(|w| ((w[1] - w[0]) / step - 1.0).abs() < 1e-9);
    let derivs = |i: usize| -> (f64, f64) {
        if uniform {
            let h = step;
            // Off-centre stencils on nodes i−1..i+4 next to the ends.
            let end = |w: [f64; 6]| {
                (
                    (-12.0 * w[0] - 65.0 * w[1] + 120.0 * w[2] - 60.0 * w[3] + 20.0 * w[4] - 3.0 * w[5]) / (60.0 * h),
                    (10.0 * w[0] - 15.0 * w[1] - 4.0 * w[2] + 14.0 * w[3] - 6.0 * w[4] + w[5]) / (12.0 * h * h),
                )
            };
            let (d1, d2) = if i == 1 {
                end([l[0], l[1], l[2], l[3], l[4], l[5]])
            } else if i == n - 2 {
                let (d1, d2) = end([l[n - 1], l[n - 2], l[n - 3], l[n - 4], l[n - 5], l[n - 6]]);
                (-d1, d2)
            } else {
                (
                    (l[i - 2] - 8.0 * l[i - 1] + 8.0 * l[i + 1] - l[i + 2]) / (12.0 * h),
                    (-l[i - 2] + 16.0 * l[i - 1] - 30.0 * l[i] + 16.0 * l[i + 1] - l[i + 2]) / (12.0 * h * h),
                )
            };
            return (d1, d2);
        }
        let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
        let d1 = (h0 * h0 * (l[i + 1] - l[i]) + h1 * h1 * (l[i] - l[i - 1])) / (h0 * h1 * (h0 + h1));
        let d2 = 2.0 * (h0 * (l[i + 1] - l[i]) - h1 * (l[i] - l[i - 1])) / (h0 * h1 * (h0 + h1));
        (d1, d2)
    };
    Ok((1..n - 1)
        .map(|i| {
            let (d1, d2) = derivs(i);
            -(d2 + d1 * d1 * inv) - p.rho
        })
        .collect())
}

/// Minimum residual over interior grid points; `≥ −tol` certifies the
/// sample.
pub fn jac_cd_check(s: &JacobianSample, p: &CDParams) -> Result<f64> {
    Ok(jac_cd_residuals(s, p)?.into_iter().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SturmReport {
    pub dominated: bool,
    pub max_violation: f64,
}

/// Checks `J(t) ≤ J_{H,ρ,N}(t) + tol` on the grid for a CD-certified sample.
pub fn sturm_compare(s: &JacobianSample, p: &CDParams, tol: f64) -> Result<SturmReport> {
    if jac_cd_check(s, p)? < -CD_CERT_TOL {
        return Err(ComparisonError::NotCdCertified);
    }
    let mut worst: f64 = 0.0;
    for (&t, &j) in s.t.iter().zip(&s.j) {
        let m = eval_j(s.h, p, t);
        if m.is_finite() {
            worst = worst.max(j - m.value() - tol);
        }
    }
    Ok(SturmReport {
        dominated: worst == 0.0,
        max_violation: worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CsSplit {
    pub lhs: f64,
    pub rhs: f64,
    pub valid_range: bool,
}

/// `A²/α + B²/β` and `(A+B)²/(α+β)`; the first dominates when
/// `α, β > 0` or when `α + β < 0` and `αβ < 0`.
pub fn cauchy_schwarz_split(alpha: f64, beta: f64, a: f64, b: f64) -> Result<CsSplit> {
    if alpha == 0.0 || beta == 0.0 {
        return Err(ComparisonError::BadSample("α and β must be nonzero".into()));
    }
    if alpha + beta == 0.0 {
        return Err(ComparisonError::DegenerateSplit);
    }
    Ok(CsSplit {
        lhs: a * a / alpha + b * b / beta,
        rhs: (a + b) * (a + b) / (alpha + beta),
        valid_range: (alpha > 0.0 && beta > 0.0) || (alpha + beta < 0.0 && alpha * beta < 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rho: f64, n: f64) -> CDParams {
        CDParams::new(rho, n, f64::INFINITY).unwrap()
    }

    #[test]
    fn jac_cd_examples() {
        let s = JacobianSample::from_fn(|t| (t / 2f64.sqrt()).cosh().powi(-2), 0.0, -2.0, 2.0, 2001).unwrap();
        let r = jac_cd_residuals(&s, &p(1.0, -1.0)).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-5));
        for (h, rho, n) in [(0.7, 1.0, -1.0), (-1.2, -0.5, 3.0), (0.3, 2.0, f64::INFINITY), (1.0, 0.0, -0.5)] {
            let s = model_sample(h, &p(rho, n), 2001).unwrap();
            let r = jac_cd_residuals(&s, &p(rho, n)).unwrap();
            assert!(r.iter().all(|x| x.abs() < 1e-5), "{h} {rho} {n}");
        }
        let s = JacobianSample::from_fn(|t| (1.0 + t).powi(-3) * (-t).exp(), -4.0, -0.5, 3.0, 2001).unwrap();
        assert!(jac_cd_check(&s, &p(0.0, -2.0)).unwrap() >= 1.0 / 3.0 - 1e-5);
        let bad = JacobianSample::from_fn(|t| if t < -0.5 { -1.0 } else { 1.0 }, 0.0, -1.0, 1.0, 201).unwrap();
        assert_eq!(jac_cd_check(&bad, &p(0.0, -2.0)), Err(ComparisonError::OutsidePositivity));
    }

    #[test]
    fn sturm_examples() {
        let q = p(1.0, -1.0);
        let s = model_sample(0.4, &q, 1001).unwrap();
        let r = sturm_compare(&s, &q, 1e-12).unwrap();
        assert!(r.dominated && r.max_violation == 0.0);
        let s = JacobianSample::from_fn(|t| (-t * t).exp(), 0.0, -2.0, 2.0, 1001).unwrap();
        assert!(sturm_compare(&s, &p(0.0, f64::INFINITY), 0.0).unwrap().dominated);
        let s = JacobianSample::from_fn(|t| (1.0 + t).powi(-3) * (-t).exp(), -4.0, -0.5, 3.0, 2001).unwrap();
        let r = sturm_compare(&s, &p(0.0, -2.0), 0.0).unwrap();
        assert!(r.dominated);
        for (&t, &j) in s.t.iter().zip(&s.j) {
            assert!(j <= (1.0 + 4.0 * t / 3.0).powi(-3) + 1e-15);
        }
        let s = JacobianSample::from_fn(|t| (t * t).exp(), 0.0, -1.0, 1.0, 1001).unwrap();
        assert_eq!(sturm_compare(&s, &p(0.0, f64::INFINITY), 0.0), Err(ComparisonError::NotCdCertified));
    }

    #[test]
    fn cs_examples() {
        assert_eq!(
            cauchy_schwarz_split(1.0, 1.0, 1.0, 1.0).unwrap(),
            CsSplit { lhs: 2.0, rhs: 2.0, valid_range: true }
        );
        let c = cauchy_schwarz_split(2.0, -5.0, 1.0, 2.0).unwrap();
        assert!(c.valid_range && c.lhs >= c.rhs);
        assert!((c.lhs + 0.3).abs() < 1e-15 && (c.rhs + 3.0).abs() < 1e-15);
        assert_eq!(cauchy_schwarz_split(1.0, -1.0, 1.0, 1.0), Err(ComparisonError::DegenerateSplit));
    }

    #[test]
    fn csv_reader() {
        let mut text = String::from("t,J\n");
        for i in -100..=100 {
            let t = i as f64 / 100.0;
            text += &format!("{t},{}\n", 1.0 + t);
        }
        let s = JacobianSample::from_csv(&text, None).unwrap();
        assert!((s.h - 1.0).abs() < 1e-12);
        assert!(JacobianSample::from_csv("t,J\n-0.01,0.99\n0,1\n0.01,1.01\n", None).is_err());
        assert!(JacobianSample::from_csv("t,J\n0,1\nx,2\n", Some(0.0)).is_err());
    }
}
