//! The Mittag-Leffler distribution, the one-sided stable law behind it, and the spectral
//! density f_a.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::Exp1;

use crate::error::{domain, precondition, MlError, Result};
use crate::gamma::{cos_pi, log_gamma_real, sin_pi};
use crate::ml::{ml_eval, MLParams};

/// Tolerance handed to the E_{a,b} evaluations behind the distribution functions.
const EVAL_TOL: f64 = 1e-14;
/// Quantiles satisfy |cdf(t) − p| within this.
pub const QUANTILE_TOL: f64 = 1e-10;
const MAX_QUANTILE_ITER: usize = 200;
/// The stable series is used only where its largest term stays below this, keeping the
/// rounding error of the sum near 1e-12.
pub const STABLE_PEAK_LIMIT: f64 = 1e4;
/// Term budget of the stable series.
pub const STABLE_MAX_TERMS: usize = 400;

/// M with Pr[M ≤ t] = 1 − E_a(−t^a), 0 < a ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLDistribution {
    a: f64,
}

impl MLDistribution {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(domain(format!("Mittag-Leffler distribution needs 0 < a <= 1, got {a}")));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

/// The positive stable law R with E[e^{−sR}] = e^{−s^a}, 0 < a < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableOneSided {
    a: f64,
    t_min: f64,
}

impl StableOneSided {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(domain(format!("one-sided stable law needs 0 < a < 1, got {a}")));
        }
        Ok(Self { a, t_min: t_min(a) })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Left end of the range where the density series is trusted.
    pub fn t_min(&self) -> f64 {
        self.t_min
    }
}

fn eval_real(a: f64, b: f64, x: f64) -> Result<f64> {
    Ok(ml_eval(MLParams::new(a, b)?, Complex64::new(x, 0.0), EVAL_TOL)?.value.re)
}

/// Pr[M ≤ t], computed as t^a E_{a,a+1}(−t^a) to avoid forming 1 − E_a(−t^a).
pub fn ml_cdf(d: MLDistribution, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(precondition(format!("cdf needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if t.is_infinite() {
        return Ok(1.0);
    }
    let x = t.powf(d.a);
    Ok((x * eval_real(d.a, d.a + 1.0, -x)?).clamp(0.0, 1.0))
}

/// t^{a−1} E_{a,a}(−t^a).
pub fn ml_pdf(d: MLDistribution, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(precondition(format!("pdf needs t > 0, got {t}")));
    }
    let x = t.powf(d.a);
    Ok(t.powf(d.a - 1.0) * eval_real(d.a, d.a, -x)?)
}

/// (sin πa/π) t^{a−1} / (1 + 2t^a cos πa + t^{2a}).
pub fn spectral_density_fa(a: f64, t: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain(format!("f_a needs 0 < a < 1, got {a}")));
    }
    if !(t > 0.0) {
        return Err(precondition(format!("f_a needs t > 0, got {t}")));
    }
    let ta = t.powf(a);
    let den = if ta > 1e150 { ta * ta } else { 1.0 + 2.0 * ta * cos_pi(a) + ta * ta };
    Ok(sin_pi(a) / PI * t.powf(a - 1.0) / den)
}

/// Solves cdf(t) = p for an increasing cdf on (0, ∞) with density pdf: a geometric bracket
/// from t = 1, then Newton steps guarded by bisection in ln t.
fn invert_increasing(
    cdf: impl Fn(f64) -> Result<f64>,
    pdf: impl Fn(f64) -> Result<f64>,
    p: f64,
    floor: f64,
) -> Result<f64> {
    let mut lo = floor;
    let mut hi = 1.0f64.max(floor);
    let mut iter = 0;
    if cdf(hi)? < p {
        while cdf(hi)? < p {
            lo = hi;
            hi *= 4.0;
            iter += 1;
            if iter > MAX_QUANTILE_ITER || !hi.is_finite() {
                return Err(MlError::NonConvergence(format!("no upper bracket for p = {p}")));
            }
        }
    } else {
        lo = hi;
        while lo > floor && cdf(lo)? > p {
            hi = lo;
            lo = (lo / 4.0).max(floor);
            iter += 1;
            if iter > MAX_QUANTILE_ITER || lo == 0.0 {
                return Err(MlError::NonConvergence(format!("no lower bracket for p = {p}")));
            }
        }
        if lo == floor && cdf(lo)? > p {
            return Ok(floor);
        }
    }
    let mut t = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
    for _ in iter..MAX_QUANTILE_ITER {
        let f = cdf(t)? - p;
        if f.abs() <= QUANTILE_TOL {
            return Ok(t);
        }
        if f < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(t);
        }
        let dens = pdf(t)?;
        let newton = t - f / dens;
        t = if dens > 0.0 && newton > lo && newton < hi {
            newton
        } else if lo > 0.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * hi
        };
    }
    Err(MlError::NonConvergence(format!("quantile search for p = {p} did not settle")))
}

/// t with Pr[M ≤ t] = p.
pub fn ml_quantile(d: MLDistribution, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(precondition(format!("quantile needs 0 < p < 1, got {p}")));
    }
    invert_increasing(|t| ml_cdf(d, t), |t| ml_pdf(d, t), p, 0.0)
}

fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// n draws by inverting the cdf at uniform variates.
pub fn ml_sample<R: Rng + ?Sized>(d: MLDistribution, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(precondition("sample size must be at least 1"));
    }
    (0..n).map(|_| ml_quantile(d, open_uniform(rng))).collect()
}

/// log of the magnitude of the k-th term Γ(ka + shift)/k! · t^{−ak}.
fn ln_term(a: f64, k: usize, shift: f64, ln_t: f64) -> f64 {
    let kf = k as f64;
    log_gamma_real(kf * a + shift).unwrap_or(f64::INFINITY) - log_gamma_real(kf + 1.0).unwrap_or(0.0) - a * kf * ln_t
}

/// Whether the series for Pr[R > t] can be summed in binary64 at t: no term may exceed the
/// peak limit, and the terms must fall below 1e-17 of min(1, first term) within the budget.
fn series_usable(a: f64, t: f64) -> bool {
    let ln_t = t.ln();
    let ln_limit = STABLE_PEAK_LIMIT.ln();
    let ln_floor = 1e-17f64.ln() + ln_term(a, 1, 0.0, ln_t).min(0.0);
    for k in 1..=STABLE_MAX_TERMS {
        let cur = ln_term(a, k, 0.0, ln_t);
        if cur > ln_limit {
            return false;
        }
        if cur < ln_floor {
            return true;
        }
    }
    false
}

/// Smallest t at which the stable series is trusted, located by bisection in ln t.
pub fn t_min(a: f64) -> f64 {
    let mut hi = 1.0;
    while !series_usable(a, hi) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while series_usable(a, lo) && lo > 1e-300 {
        hi = lo;
        lo /= 2.0;
    }
    for _ in 0..60 {
        let mid = (lo * hi).sqrt();
        if series_usable(a, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    hi
}

/// (1/π) Σ_{k≥1} (−1)^{k−1} Γ(ka + shift) sin(πka)/k! · t^{−ak} · t^{−extra}.
fn stable_series(s: StableOneSided, t: f64, tol: f64, shift: f64, extra: f64) -> Result<f64> {
    if !(t > s.t_min) {
        return Err(MlError::SeriesDivergence(format!(
            "stable series needs t > {:.6e} for a = {}, got {t}",
            s.t_min, s.a
        )));
    }
    let a = s.a;
    let ln_t = t.ln();
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut prev = f64::INFINITY;
    for k in 1..=STABLE_MAX_TERMS {
        let lt = ln_term(a, k, shift, ln_t);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * sin_pi(k as f64 * a) * lt.exp();
        sum += term;
        let mag = lt.exp();
        if mag < prev && mag <= tol * sum.abs() {
            quiet += 1;
            if quiet == 2 {
                return Ok(sum / PI * t.powf(-extra));
            }
        } else {
            quiet = 0;
        }
        prev = mag;
    }
    Err(MlError::NonConvergence(format!("stable series at t = {t} did not settle")))
}

/// Density of R.
pub fn stable_pdf(s: StableOneSided, t: f64, tol: f64) -> Result<f64> {
    stable_series(s, t, tol, 1.0, 1.0)
}

/// Pr[R > t].
pub fn stable_cdf_complement(s: StableOneSided, t: f64, tol: f64) -> Result<f64> {
    stable_series(s, t, tol, 0.0, 0.0)
}

/// n draws of R by inverting Pr[R > t]. Uniforms that land in the left tail below t_min
/// (probability Pr[R ≤ t_min], tiny for moderate a) return t_min.
pub fn stable_sample<R: Rng + ?Sized>(s: StableOneSided, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(precondition("sample size must be at least 1"));
    }
    let tol = 1e-15;
    let floor = s.t_min * (1.0 + 1e-9);
    let cdf = |t: f64| -> Result<f64> {
        if t <= floor {
            return Ok(1.0 - stable_cdf_complement(s, floor, tol)?);
        }
        Ok(1.0 - stable_cdf_complement(s, t, tol)?)
    };
    let pdf = |t: f64| if t <= floor { Ok(0.0) } else { stable_pdf(s, t, tol) };
    (0..n).map(|_| invert_increasing(cdf, pdf, open_uniform(rng), floor)).collect()
}

/// n draws of W = Y^{1/a} with Y ~ Exp(1).
pub fn weibull_sample<R: Rng + ?Sized>(a: f64, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(domain(format!("Weibull shape must be positive, got {a}")));
    }
    Ok((0..n)
        .map(|_| {
            let y: f64 = rng.sample(Exp1);
            y.powf(1.0 / a)
        })
        .collect())
}

/// n draws of M = R·W with R stable and W Weibull, independent of the inverse-cdf sampler.
pub fn ml_sample_decomposed<R: Rng + ?Sized>(d: MLDistribution, rng: &mut R, n: usize) -> Result<Vec<f64>> {
    let s = StableOneSided::new(d.a)?;
    let r = stable_sample(s, rng, n)?;
    let w = weibull_sample(d.a, rng, n)?;
    Ok(r.iter().zip(&w).map(|(r, w)| r * w).collect())
}

/// Goodness-of-fit statistics for checking the samplers.
pub mod ks {
    /// sup |F_n − F| of a sample against a cdf.
    pub fn statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
        let mut x = samples.to_vec();
        x.sort_by(f64::total_cmp);
        let n = x.len() as f64;
        x.iter()
            .enumerate()
            .map(|(i, &v)| {
                let f = cdf(v);
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max)
    }

    /// sup |F_n − G_m| between two samples.
    pub fn two_sample(x: &[f64], y: &[f64]) -> f64 {
        let mut x = x.to_vec();
        let mut y = y.to_vec();
        x.sort_by(f64::total_cmp);
        y.sort_by(f64::total_cmp);
        let (n, m) = (x.len() as f64, y.len() as f64);
        let (mut i, mut j, mut d) = (0, 0, 0.0f64);
        while i < x.len() || j < y.len() {
            let v = x.get(i).copied().unwrap_or(f64::INFINITY).min(y.get(j).copied().unwrap_or(f64::INFINITY));
            while i < x.len() && x[i] <= v {
                i += 1;
            }
            while j < y.len() && y[j] <= v {
                j += 1;
            }
            d = d.max((i as f64 / n - j as f64 / m).abs());
        }
        d
    }

    /// Asymptotic 1% critical value of the one-sample statistic.
    pub fn critical_1pct(n: usize) -> f64 {
        1.628 / (n as f64).sqrt()
    }

    /// Asymptotic 1% critical value of the two-sample statistic.
    pub fn critical_1pct_two(n: usize, m: usize) -> f64 {
        let (n, m) = (n as f64, m as f64);
        1.628 * ((n + m) / (n * m)).sqrt()
    }
}
