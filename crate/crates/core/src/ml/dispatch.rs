use num_complex::Complex64;

use super::asymptotic::ml_asymptotic_auto;
use super::integral::integral_rep_core;
use super::taylor::sum_series;
use super::{
    is_finite, ml_closed_form, ml_integral_rep, ml_neg_real, ml_reduce_a, ml_shift_b, ml_taylor, principal,
    ray_distance, EvalResult, MLParams, MethodTag, DELTA_RAY, SMALL_A,
};
use crate::calculus::ml_small_a;
use crate::error::{domain, precondition, MlError, Result};
use crate::quadrature::QuadratureConfig;

const TAYLOR_MAX_TERMS: usize = 200_000;
const SMALL_A_TERMS: usize = 40;

/// Radius below which the dispatcher sums the series directly.
pub fn r_taylor(p: MLParams) -> f64 {
    let v = (1.0 + p.b().floor()).powf(p.a()) / 2.0;
    if v.is_nan() {
        1.0
    } else {
        v.max(1.0)
    }
}

/// Modulus above which the asymptotic expansion is tried.
pub fn z_asym(a: f64) -> f64 {
    12.0_f64.powf(a)
}

/// E_{a,b}(z) to relative accuracy `tol` where the chosen method can deliver it.
pub fn ml_eval(p: MLParams, z: Complex64, tol: f64) -> Result<EvalResult> {
    let cfg = QuadratureConfig::default().with_rel_tol(tol.clamp(1e-13, 1e-3));
    ml_eval_with(p, z, tol, &cfg)
}

/// [`ml_eval`] with an explicit quadrature configuration for the integral branches.
pub fn ml_eval_with(p: MLParams, z: Complex64, tol: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if !(tol > 0.0) {
        return Err(precondition("tolerance must be positive"));
    }
    if !is_finite(z) {
        return Err(domain("z must be finite"));
    }
    let z = principal(z);
    let mut r = dispatch(p, z, tol, cfg)?;
    if !is_finite(r.value) {
        return Err(MlError::Overflow(format!("E_{{{},{}}}({z}) is not representable", p.a(), p.b())));
    }
    if z.im == 0.0 {
        // Real parameters and argument give a real value; the residue is rounding.
        r.value.im = 0.0;
    }
    Ok(r)
}

fn dispatch(p: MLParams, z: Complex64, tol: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    let (a, b) = (p.a(), p.b());
    let modulus = z.norm();
    if a == 0.0 || a < SMALL_A {
        if modulus >= 1.0 {
            return Err(domain(format!("a = {a} needs |z| < 1, got |z| = {modulus}")));
        }
        if a == 0.0 {
            return ml_closed_form(p, z).ok_or_else(|| domain("geometric case needs |z| < 1"));
        }
        return ml_small_a(p, -z, SMALL_A_TERMS, tol);
    }
    if let Some(r) = ml_closed_form(p, z) {
        return Ok(r);
    }
    if a > 1.0 {
        return ml_reduce_a(p, z, tol);
    }
    if modulus <= r_taylor(p) {
        if let Ok(r) = ml_taylor(p, z, tol, TAYLOR_MAX_TERMS) {
            return Ok(r);
        }
    }
    if b >= a + 1.0 {
        return ml_shift_b(p, z, shift_down_count(a, b), tol);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return ml_neg_real(p, -z.re, *cfg);
    }
    if modulus >= z_asym(a) {
        if let Ok(r) = ml_asymptotic_auto(p, z) {
            if r.abs_err_est <= tol * r.value.norm() {
                return Ok(r);
            }
        }
    }
    if ray_distance(a, z) > DELTA_RAY {
        return ml_integral_rep(p, z, *cfg);
    }
    near_ray(p, z, tol, cfg)
}

/// Smallest m > 0 with b − m a < a + 1.
fn shift_down_count(a: f64, b: f64) -> i64 {
    let mut m = ((b - a - 1.0) / a).floor().max(0.0) as i64 + 1;
    while b - m as f64 * a >= a + 1.0 {
        m += 1;
    }
    m
}

/// Inside the ray band: the integral with the near-pole as a panel boundary when it
/// converges, otherwise whichever of Taylor and the asymptotic series claims the smaller
/// error.
fn near_ray(p: MLParams, z: Complex64, tol: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    let (a, b) = (p.a(), p.b());
    let mut candidates = Vec::new();
    if let Ok(r) = integral_rep_core(a, b, z, cfg) {
        if r.abs_err_est <= tol.max(cfg.rel_tol) * r.value.norm() {
            return Ok(r);
        }
        candidates.push(r);
    }
    if let Ok(s) = sum_series(a, b, z, tol, TAYLOR_MAX_TERMS) {
        let err = s.abs_err.max(s.ratio * f64::EPSILON * s.value.norm());
        candidates.push(EvalResult::new(s.value, err, MethodTag::Taylor));
    }
    if z.norm() >= z_asym(a) {
        if let Ok(r) = ml_asymptotic_auto(p, z) {
            candidates.push(r);
        }
    }
    candidates
        .into_iter()
        .filter(|r| is_finite(r.value))
        .min_by(|x, y| x.rel_err_est().total_cmp(&y.rel_err_est()))
        .ok_or_else(|| MlError::NonConvergence(format!("no method converged near the critical ray at z = {z}")))
}

/// Σ_{k≥0} x^k/(k!)^a; every term is positive.
pub fn hadamard_series(a: f64, x: f64, tol: f64) -> Result<f64> {
    if !(a > 0.0) || !(x >= 0.0) || !(tol > 0.0) {
        return Err(precondition("Hadamard series needs a > 0, x >= 0, tol > 0"));
    }
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..10_000_000_u64 {
        term *= x / (k as f64).powf(a);
        sum += term;
        if !sum.is_finite() {
            return Err(MlError::Overflow(format!("Hadamard series overflows at x = {x}")));
        }
        // Terms decrease once k^a > x; after that the tail is below term·k^a/(k^a − x).
        let ka = ((k + 1) as f64).powf(a);
        if ka > 2.0 * x && term <= tol * sum {
            return Ok(sum);
        }
    }
    Err(MlError::NonConvergence(format!("Hadamard series at x = {x}")))
}
