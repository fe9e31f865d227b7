use std::f64::consts::PI;

use num_complex::Complex64;

use super::{exp_polar, is_finite, principal, z_asym, EvalResult, MLParams, MethodTag, DELTA_RAY};
use crate::error::{precondition, MlError, Result};
use crate::gamma::{log_gamma_real, recip_gamma};

/// Cap on the algebraic terms the optimally truncated series may use.
const MAX_ASYMPTOTIC_TERMS: usize = 4000;

/// ⌊|z|^{min(1, 1/a)}⌋, the term budget of [`ml_asymptotic`].
pub fn k_opt(a: f64, z: Complex64) -> usize {
    z.norm().powf(1.0_f64.min(1.0 / a)).floor() as usize
}

/// ln of an upper envelope of |1/Γ(x)|. For x < 0 the sin(πx) factor of the reflection
/// formula is dropped so that terms which happen to sit on a pole of Γ still count.
fn ln_recip_gamma_envelope(x: f64) -> f64 {
    if x < 0.0 {
        log_gamma_real(1.0 - x).map_or(f64::INFINITY, |l| l - PI.ln())
    } else {
        recip_gamma(x).abs().ln()
    }
}

/// Index of the smallest algebraic term z^{−k}/Γ(b − ak), searched up to a fixed cap.
pub fn optimal_terms(p: MLParams, z: Complex64) -> usize {
    let (a, b) = (p.a(), p.b());
    let ln_abs = z.norm().ln();
    let mut best = (0, f64::INFINITY);
    let mut rising = 0;
    for k in 1..MAX_ASYMPTOTIC_TERMS {
        let ln_g = ln_recip_gamma_envelope(b - a * k as f64);
        if ln_g == f64::NEG_INFINITY {
            continue;
        }
        let ln_t = ln_g - k as f64 * ln_abs;
        if ln_t < best.1 {
            best = (k, ln_t);
            rising = 0;
        } else {
            rising += 1;
            if rising > 8 {
                break;
            }
        }
    }
    // Keep every term up to and excluding the smallest.
    best.0.saturating_sub(1).max(1)
}

/// Exponential part and the size of the exponentials that were left out near Stokes lines.
fn exponential_part(a: f64, b: f64, z: Complex64) -> Result<(Complex64, f64)> {
    let theta = z.arg();
    let r = z.norm().powf(1.0 / a);
    let cut = a * PI * (1.0 - DELTA_RAY);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut dropped = 0.0;
    for k in [-1.0, 0.0, 1.0] {
        let phi = theta + 2.0 * PI * k;
        if phi.abs() >= a * PI {
            continue;
        }
        // (1/a) w^{1−b} e^w with w = |z|^{1/a} e^{iφ/a}
        let w = Complex64::from_polar(r, phi / a);
        let term = exp_polar((1.0 - b) * r.ln() + w.re - a.ln(), (1.0 - b) * phi / a + w.im);
        if phi.abs() < cut {
            if !is_finite(term) {
                return Err(MlError::Overflow(format!("e^(z^(1/a)) overflows at |z|^(1/a) = {r:e}")));
            }
            sum += term;
        } else {
            dropped += term.norm();
        }
    }
    Ok((sum, dropped))
}

fn algebraic_sum(a: f64, b: f64, z: Complex64, terms: usize) -> (Complex64, f64, f64) {
    let inv = 1.0 / z;
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 1..=terms {
        pow *= inv;
        let t = pow * recip_gamma(b - a * k as f64);
        sum -= t;
        abs_sum += t.norm();
    }
    let next = (ln_recip_gamma_envelope(b - a * (terms + 1) as f64) - (terms + 1) as f64 * z.norm().ln()).exp();
    (sum, abs_sum, next)
}

fn asymptotic_with(p: MLParams, z: Complex64, terms: usize) -> Result<EvalResult> {
    let (a, b) = (p.a(), p.b());
    let (exp_part, dropped) = exponential_part(a, b, z)?;
    let (alg, alg_abs, next) = algebraic_sum(a, b, z, terms);
    let value = exp_part + alg;
    let w = z.norm().powf(1.0 / a);
    let rounding = f64::EPSILON * (4.0 * alg_abs + (4.0 + w) * exp_part.norm());
    Ok(EvalResult::new(value, next + dropped + rounding, MethodTag::Asymptotic))
}

fn check(p: MLParams, z: Complex64) -> Result<Complex64> {
    if !(p.a() > 0.0 && p.a() < 2.0) {
        return Err(precondition("asymptotic expansion needs 0 < a < 2"));
    }
    if !is_finite(z) || z.norm() < z_asym(p.a()) {
        return Err(precondition(format!("asymptotic expansion needs |z| >= {}", z_asym(p.a()))));
    }
    Ok(principal(z))
}

/// Exponential part (dropped near the Stokes lines) plus K algebraic terms
/// −Σ_{k≤K} z^{−k}/Γ(b − ak). The error estimate is the first omitted term plus any dropped
/// exponential.
pub fn ml_asymptotic(p: MLParams, z: Complex64, terms: usize) -> Result<EvalResult> {
    let z = check(p, z)?;
    let budget = k_opt(p.a(), z);
    if terms > budget {
        return Err(precondition(format!("K = {terms} exceeds the budget {budget}")));
    }
    asymptotic_with(p, z, terms)
}

/// [`ml_asymptotic`] truncated just before its smallest term.
pub fn ml_asymptotic_auto(p: MLParams, z: Complex64) -> Result<EvalResult> {
    let z = check(p, z)?;
    asymptotic_with(p, z, optimal_terms(p, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{ml_neg_real, MLParams};
    use crate::quadrature::QuadratureConfig;

    fn params(a: f64, b: f64) -> MLParams {
        MLParams::new(a, b).unwrap()
    }

    #[test]
    fn half_order_on_negative_axis_decays_like_inverse_root() {
        let x: f64 = 50.0;
        let r = ml_asymptotic(params(0.5, 1.0), Complex64::new(-x, 0.0), 7).unwrap();
        // x^{−1}/Γ(1−a)
        let leading = 1.0 / (x * PI.sqrt());
        assert!((r.value.re - leading).abs() < 0.02 * leading);
        // e^{x²}erfc(x) at x = 50
        let exact = 0.011_281_536_265_323_773;
        assert!((r.value.re - exact).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn exponential_case_has_no_algebraic_tail() {
        let r = ml_asymptotic(params(1.0, 1.0), Complex64::new(30.0, 0.0), 30).unwrap();
        assert!((r.value.re - 30.0_f64.exp()).abs() < 1e-10 * 30.0_f64.exp());
    }

    #[test]
    fn agrees_with_negative_axis_integral() {
        let p = params(0.8, 1.2);
        let r = ml_asymptotic(p, Complex64::new(-40.0, 0.0), 40).unwrap();
        let q = ml_neg_real(p, 40.0, QuadratureConfig::default()).unwrap();
        assert!((r.value - q.value).norm() < 1e-6 * q.value.norm(), "{} vs {}", r.value, q.value);
    }

    #[test]
    fn budget_and_threshold_are_enforced() {
        assert!(ml_asymptotic(params(0.5, 1.0), Complex64::new(-50.0, 0.0), 51).is_err());
        assert!(ml_asymptotic(params(1.0, 1.0), Complex64::new(3.0, 0.0), 1).is_err());
        assert!(ml_asymptotic(params(2.0, 1.0), Complex64::new(300.0, 0.0), 1).is_err());
    }
}
