//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use cddprof::cdd_profiles::{equality_asserted, flat_cdd_profile, gl_profile, relative_gap};
use cddprof::comparison::{cauchy_schwarz_split, jac_cd_residuals, model_sample, sturm_compare, ComparisonError, JacobianSample};
use cddprof::functionals::{
    cheeger_n, concentration_to_cheeger, cosh_estimates, cosh_integral, cosh_model, cosh_model_concentration, fm_bound,
    lorentz_norm, nash_constant, poincare_bounds, poly_concentration, sobolev_constants, stability_w1, ConcentrationCurve,
};
use cddprof::model_density::{named_density, CDParams, Family};
use cddprof::profile1d::{
    brute_force_flat, brute_force_interval_profile, flat_profile, normalize, v_grid, ProfileCurve, WeightedDensity1D,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INF: f64 = f64::INFINITY;
const GRID: usize = 513;

// √(1/(1−N)) / ∫₀^∞ cosh^{N−1}, evaluated with 30-digit arithmetic.
const COSH_CHEEGER: [(f64, f64); 6] = [
    (-8.0, 0.776_069_817_743_337_3),
    (-4.0, 0.759_213_379_644_988_9),
    (-2.0, 0.735_105_193_895_722_7),
    (-1.0, 0.707_106_781_186_547_5),
    (-0.5, 0.681_469_962_577_387_3),
    (0.5, 0.539_352_601_188_379_4),
];

// (1 − tanh 1)/2
const K0_SQRT2: f64 = 0.119_202_922_022_117_56;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(rho: f64, n: f64, d: f64) -> CDParams {
    CDParams::new(rho, n, d).unwrap()
}

fn interior(n: usize) -> Vec<f64> {
    v_grid(n).into_iter().filter(|v| *v > 0.0 && *v < 1.0).collect()
}

fn flat_curve_of(wd: &WeightedDensity1D) -> ProfileCurve {
    let grid = v_grid(GRID);
    let values = grid.iter().map(|&v| flat_profile(wd, v).unwrap()).collect();
    ProfileCurve::new(grid, values, None, "flat").unwrap()
}

fn cosh_wd(rho: f64, n: f64) -> WeightedDensity1D {
    normalize(&cosh_model(&params(rho, n, INF)).unwrap(), -INF, INF).unwrap()
}

fn cosh_d_che_inf(n: f64) -> f64 {
    cheeger_n(&flat_curve_of(&cosh_wd(1.0, n)), n, false).unwrap().d_che_inf
}

fn normal_quantile(v: f64) -> f64 {
    let cdf = |x: f64| 0.5 * libm::erfc(-x / SQRT_2);
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c1_cosh_cheeger() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, want) in COSH_CHEEGER {
        worst = worst.max((cosh_d_che_inf(n) - want).abs());
    }
    let at_minus_one = (cosh_d_che_inf(-1.0) - 0.5f64.sqrt()).abs();
    outcome(
        worst <= 1e-6 && at_minus_one <= 1e-6,
        format!("max |d_che_inf - oracle| = {worst:.3e}, N=-1 vs 1/sqrt2: {at_minus_one:.3e} (tol 1e-6)"),
    )
}

fn c2_gaussian() -> Outcome {
    let p = params(1.0, INF, INF);
    let half = (gl_profile(&p, 0.5).unwrap().value() - 1.0 / (2.0 * PI).sqrt()).abs();
    let mut worst: f64 = 0.0;
    for v in interior(GRID) {
        let x = normal_quantile(v);
        let phi = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        worst = worst.max((gl_profile(&p, v).unwrap().value() - phi).abs());
    }
    outcome(
        half <= 1e-6 && worst <= 1e-4,
        format!("|GL(1/2) - 1/sqrt(2pi)| = {half:.3e} (tol 1e-6), max grid error {worst:.3e} (tol 1e-4)"),
    )
}

fn c3_order_and_equality() -> Outcome {
    let triples = [
        (1.0, -2.0, INF),
        (1.0, -2.0, 1.0),
        (0.0, -2.0, INF),
        (-1.0, -2.0, 1.0),
        (1.0, -0.5, INF),
        (0.0, -0.5, 1.0),
        (-1.0, -0.5, 1.0),
        (1.0, 3.0, INF),
        (0.0, 3.0, 1.0),
        (-1.0, 3.0, INF),
        (1.0, INF, 1.0),
        (-1.0, INF, 1.0),
    ];
    let grid = interior(11);
    let mut order_excess = f64::NEG_INFINITY;
    let mut dev: f64 = 0.0;
    for (rho, n, d) in triples {
        let p = params(rho, n, d);
        for &v in &grid {
            let g = gl_profile(&p, v).unwrap();
            let f = flat_cdd_profile(&p, v).unwrap();
            if f.is_finite() {
                order_excess = order_excess.max(g.value() - f.value());
            } else {
                order_excess = order_excess.max(f64::NEG_INFINITY);
            }
            if equality_asserted(&p) {
                dev = dev.max(relative_gap(g, f));
            }
        }
    }
    outcome(
        order_excess <= 1e-6 && dev <= 1e-3,
        format!("max(GL - flat) = {order_excess:.3e} (tol 1e-6), max relative deviation {dev:.3e} (tol 1e-3), 12 triples x 9 v"),
    )
}

fn c4_counterexample() -> Outcome {
    let m = named_density(Family::sin(0.5, 1.0), 0.0, PI).unwrap();
    let wd = normalize(&m, 0.0, PI).unwrap();
    let n = 20_000;
    let interval = brute_force_interval_profile(&wd, n, 0.05).unwrap().value();
    let flat = brute_force_flat(&wd, n, 0.05).unwrap().value();
    outcome(
        interval < 0.9 * flat,
        format!("interval oracle {interval:.6} vs 0.9 x flat oracle {:.6}", 0.9 * flat),
    )
}

fn c5_weak_concavity() -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    let mut worst_cell: f64 = 0.0;
    let cell = 1.0 / (GRID - 1) as f64;
    for n in [-4.0, -2.0, -1.0] {
        let m = named_density(Family::power(n), 1.0, INF).unwrap().shifted(1.0).scaled(n.abs());
        let wd = normalize(&m, 0.0, INF).unwrap();
        let curve = flat_curve_of(&wd);
        let e = n / (n - 1.0);
        let q: Vec<(f64, f64)> = curve
            .grid
            .iter()
            .zip(&curve.values)
            .filter(|(v, _)| **v > 0.0 && **v < 1.0)
            .map(|(v, x)| (*v, x.value().powf(e) / v))
            .collect();
        for w in q.windows(2) {
            worst_rise = worst_rise.max(w[1].1 - w[0].1);
        }
        // The quotient may be flat; take the grid minimizer nearest 1/2
        // among those within the slack of the minimum.
        let quotient: Vec<(f64, f64)> = curve
            .grid
            .iter()
            .zip(&curve.values)
            .filter(|(v, _)| **v > 0.0 && **v < 1.0)
            .map(|(v, x)| (*v, x.value() / v.min(1.0 - v).powf((n - 1.0) / n)))
            .collect();
        let min = quotient.iter().map(|x| x.1).fold(INF, f64::min);
        let nearest = quotient
            .iter()
            .filter(|x| x.1 <= min + 1e-9)
            .map(|x| (x.0 - 0.5).abs())
            .fold(INF, f64::min);
        worst_cell = worst_cell.max(nearest / cell);
    }
    outcome(
        worst_rise <= 1e-9 && worst_cell <= 1.0,
        format!("max increase of I^(N/(N-1))/v = {worst_rise:.3e} (slack 1e-9), argmin distance {worst_cell:.2} cells"),
    )
}

fn c6_concentration() -> Outcome {
    let r: Vec<f64> = (0..=400).map(|i| i as f64 * 0.005).collect();
    let mut worst_ratio: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for n in [-4.0, -1.0, -0.5] {
        let p = params(1.0, n, INF);
        let k: Vec<f64> = r.iter().map(|&x| cosh_model_concentration(&p, x).unwrap()).collect();
        let d = cheeger_n(&flat_curve_of(&cosh_wd(1.0, n)), n, false).unwrap().d_che_n;
        let est = concentration_to_cheeger(&ConcentrationCurve::new(r.clone(), k.clone()).unwrap(), n).unwrap();
        worst_ratio = worst_ratio.max((est / d - 1.0).abs());
        for (&x, &kx) in r.iter().zip(&k) {
            worst_excess = worst_excess.max(kx - poly_concentration(d, n, x).unwrap());
        }
    }
    let k0 = cosh_model_concentration(&params(1.0, -1.0, INF), SQRT_2).unwrap();
    let point = (k0 - K0_SQRT2).abs();
    outcome(
        worst_ratio <= 0.02 && worst_excess <= 1e-9 && point <= 1e-8,
        format!(
            "cheeger recovery {:.3}% (tol 2%), max K0 - bound {worst_excess:.3e} (tol 1e-9), |K0(sqrt2) - oracle| {point:.3e} (tol 1e-8)",
            100.0 * worst_ratio
        ),
    )
}

fn c7_linear_cheeger() -> Outcome {
    let mut worst = INF;
    for n in [-3.0, -1.0] {
        for d in [1.0, 2.0] {
            for i in 0..32 {
                let xi = 10f64.powf(-2.0 + 4.0 * i as f64 / 31.0);
                let m = named_density(Family::power(n), xi, xi + d).unwrap();
                let wd = normalize(&m, xi, xi + d).unwrap();
                let c = cheeger_n(&flat_curve_of(&wd), n, false).unwrap().d_che_inf;
                worst = worst.min(c - 1.0 / d);
            }
        }
    }
    outcome(worst >= -1e-6, format!("min(d_che_inf - 1/D) = {worst:.3e} (tol -1e-6), 128 models"))
}

fn c8_poincare() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, _) in COSH_CHEEGER {
        let d = cosh_d_che_inf(n);
        let b = poincare_bounds(&params(1.0, n, INF), Some(d)).unwrap();
        let pc = b.positive_curvature.unwrap();
        worst = worst.max((pc * d * d / 4.0 - 1.0).abs());
    }
    let lich = poincare_bounds(&params(1.0, -1.0, INF), None).unwrap().lichnerowicz;
    let diam = poincare_bounds(&params(0.0, -1.0, 2.0), None).unwrap().diameter;
    outcome(
        worst <= 1e-10 && lich == Some(2.0) && diam == Some(16.0),
        format!("max relative gap to 4/d_che_inf^2 {worst:.3e} (tol 1e-10), lichnerowicz {lich:?}, diameter {diam:?}"),
    )
}

fn c9_sandwich() -> Outcome {
    let mut violations = 0;
    let mut bracket_ok = true;
    for n in [-4.0, -1.0, 0.5] {
        for i in 0..10_000 {
            let t = 20.0 * i as f64 / 9_999.0;
            if !cosh_estimates(n, t).unwrap().sandwich_holds {
                violations += 1;
            }
        }
        let e = cosh_estimates(n, 0.0).unwrap();
        let q = cosh_integral(n).unwrap();
        bracket_ok &= e.integral_lo <= q && q <= e.integral_hi;
    }
    outcome(
        violations == 0 && bracket_ok,
        format!("{violations} sandwich violations on 3 x 10^4 points, integral brackets hold: {bracket_ok}"),
    )
}

fn random_n(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(-6.0..-0.1),
        1 => rng.gen_range(0.1..0.9),
        2 => rng.gen_range(1.5..8.0),
        _ => INF,
    }
}

fn c10_sturm() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_101);
    let mut residual: f64 = 0.0;
    for _ in 0..50 {
        let p = params(rng.gen_range(-2.0..2.0), random_n(&mut rng), INF);
        let s = model_sample(rng.gen_range(-2.0..2.0), &p, 801).unwrap();
        for r in jac_cd_residuals(&s, &p).unwrap() {
            residual = residual.max(r.abs());
        }
    }

    let (mut certified, mut dominated) = (0, 0);
    for _ in 0..50 {
        let p = params(rng.gen_range(-2.0..2.0), random_n(&mut rng), INF);
        let h = rng.gen_range(-2.0..2.0);
        let stiffer = params(p.rho + rng.gen_range(0.0..1.0), p.n.value(), INF);
        let a = rng.gen_range(0.0..0.5);
        let base = model_sample(h, &stiffer, 801).unwrap();
        let j: Vec<f64> = base.t.iter().zip(&base.j).map(|(t, j)| j * (-a * t.powi(4)).exp()).collect();
        let s = JacobianSample::new(base.t.clone(), j, h).unwrap();
        match sturm_compare(&s, &p, 1e-9) {
            Ok(r) => {
                certified += 1;
                if r.dominated {
                    dominated += 1;
                }
            }
            Err(ComparisonError::NotCdCertified) => {}
            Err(e) => panic!("{e}"),
        }
    }

    let mut cs = 0;
    for _ in 0..400 {
        let (al, be) = (rng.gen_range(0.01f64..10.0), rng.gen_range(0.01f64..10.0));
        let (x, y) = if rng.gen_bool(0.5) { (al.min(be) * 0.99, -al.max(be)) } else { (al, be) };
        let (a, b) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let c = cauchy_schwarz_split(x, y, a, b).unwrap();
        if c.valid_range && c.lhs >= c.rhs - 1e-12 * c.lhs.abs().max(c.rhs.abs()).max(1.0) {
            cs += 1;
        }
    }
    outcome(
        residual <= 1e-5 && certified > 0 && dominated == certified && cs == 400,
        format!(
            "max |equality residual| {residual:.3e} (tol 1e-5), dominated {dominated}/{certified} certified samples, split inequality {cs}/400"
        ),
    )
}

fn c11_oracles() -> Outcome {
    let n = 4000;
    let tol = (3.0 / n as f64).max(1e-3);
    let dens = [
        named_density(Family::Uniform, 0.0, 1.0).unwrap(),
        named_density(Family::Exp { k: -1.0, exponent: 1.0 }, 0.0, 5.0).unwrap(),
        named_density(Family::Sin { k: 1.0, exponent: 1.0 }, 0.0, PI).unwrap(),
        named_density(Family::Power { exponent: -3.0 }, 1.0, 3.0).unwrap(),
        named_density(Family::cosh(-1.0, -0.5), -6.0, 6.0).unwrap(),
    ];
    let vs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut worst: f64 = 0.0;
    for m in &dens {
        let (lo, hi) = m.domain();
        let wd = normalize(m, lo, hi).unwrap();
        for &v in &vs {
            let a = flat_profile(&wd, v).unwrap().value();
            let b = brute_force_flat(&wd, n, v).unwrap().value();
            worst = worst.max((a - b).abs());
        }
    }
    let cosh = named_density(Family::cosh(-1.0, -0.5), -8.0, 8.0).unwrap();
    let wd = normalize(&cosh, -8.0, 8.0).unwrap();
    let mut bobkov: f64 = 0.0;
    for &v in &vs {
        let a = brute_force_interval_profile(&wd, n, v).unwrap().value();
        let b = brute_force_flat(&wd, n, v).unwrap().value();
        bobkov = bobkov.max((a - b).abs());
    }
    outcome(
        worst <= tol && bobkov <= 1e-3,
        format!("max |flat - oracle| {worst:.3e} (tol {tol:.1e}), interval vs half-line {bobkov:.3e} (tol 1e-3)"),
    )
}

fn c12_constants() -> Outcome {
    let mut lorentz: f64 = 0.0;
    for mass in [0.1, 0.37, 0.5, 1.0] {
        for alpha in [0.5, 1.0, 2.0, 3.5] {
            for r in [0.5, 1.0, 2.0, INF] {
                let x = lorentz_norm(&[(1.0, mass), (0.0, 1.0 - mass)], alpha, r).unwrap();
                lorentz = lorentz.max((x - mass.powf(1.0 / alpha)).abs());
            }
        }
    }
    let sob = (sobolev_constants(0.5, 1.0, -1.0, SQRT_2).unwrap().c_pq - SQRT_2).abs();
    let nash = (nash_constant(1.0, -1.0, SQRT_2).unwrap().coefficient - 2f64.powf(0.25)).abs();
    let fm = (fm_bound(1.0, -2.0).unwrap() - 2.0 * SQRT_2).abs();
    let stab = (stability_w1(1.0, -2.0, 1.0).unwrap() - 0.04618).abs();
    outcome(
        lorentz <= 1e-12 && sob <= 1e-12 && nash <= 1e-12 && fm <= 1e-10 && stab <= 1e-4,
        format!("lorentz {lorentz:.1e}, sobolev {sob:.1e}, nash {nash:.1e}, fm {fm:.1e}, stability {stab:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("cosh-model Cheeger constant", c1_cosh_cheeger),
        ("Gaussian profile", c2_gaussian),
        ("order and equality of the two profiles", c3_order_and_equality),
        ("interval sets beat half-lines", c4_counterexample),
        ("weak concavity", c5_weak_concavity),
        ("concentration chain", c6_concentration),
        ("linear Cheeger constant for D < inf", c7_linear_cheeger),
        ("Poincare bounds", c8_poincare),
        ("cosh sandwich", c9_sandwich),
        ("Sturm comparison and Jacobian CD", c10_sturm),
        ("oracle agreement", c11_oracles),
        ("functional constants", c12_constants),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.2}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
