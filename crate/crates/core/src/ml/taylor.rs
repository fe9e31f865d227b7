use num_complex::Complex64;

use super::{exp_polar, is_finite, principal, EvalResult, MLParams, MethodTag, MAX_CANCELLATION};
use crate::error::{precondition, MlError, Result};
use crate::gamma::{is_gamma_pole, ln_abs_gamma, recip_gamma, GAMMA_OVERFLOW};

/// Abscissa of the minimum of Γ on the positive axis.
const GAMMA_MIN: f64 = 1.462;

/// Raw outcome of a power-series summation, before the cancellation verdict.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum {
    pub value: Complex64,
    pub abs_err: f64,
    /// Largest partial-sum modulus divided by the final modulus.
    pub ratio: f64,
}

/// z^k / Γ(x), switching to logarithms when either factor leaves binary64.
fn series_term(z_pow: Complex64, ln_abs_z: f64, arg_z: f64, k: usize, x: f64) -> Complex64 {
    if is_gamma_pole(x) {
        return Complex64::new(0.0, 0.0);
    }
    if x < GAMMA_OVERFLOW - 1.0 && is_finite(z_pow) && z_pow.norm() < 1e300 {
        return z_pow * recip_gamma(x);
    }
    let (ln_g, sign) = ln_abs_gamma(x).expect("poles filtered above");
    let kf = k as f64;
    exp_polar(kf * ln_abs_z - ln_g, kf * arg_z) * sign
}

/// Σ_{k≥0} z^k / Γ(b + a k) with the stopping rule of [`ml_taylor`].
pub(crate) fn sum_series(a: f64, b: f64, z: Complex64, tol: f64, max_terms: usize) -> Result<SeriesSum> {
    let z = principal(z);
    let first = Complex64::new(recip_gamma(b), 0.0);
    if z == Complex64::new(0.0, 0.0) {
        return Ok(SeriesSum { value: first, abs_err: 4.0 * f64::EPSILON * first.norm(), ratio: 1.0 });
    }
    let ln_abs_z = z.norm().ln();
    let arg_z = z.arg();
    let mut sum = first;
    let mut z_pow = Complex64::new(1.0, 0.0);
    let mut abs_sum = first.norm();
    let mut max_partial = first.norm();
    let mut small_run = 0;
    let mut last_term = first.norm();
    for k in 1..max_terms {
        z_pow *= z;
        let x = b + a * k as f64;
        let term = series_term(z_pow, ln_abs_z, arg_z, k, x);
        if !is_finite(term) {
            return Err(MlError::Overflow(format!("series term {k} overflows")));
        }
        sum += term;
        let mag = term.norm();
        abs_sum += mag;
        max_partial = max_partial.max(sum.norm());
        if mag > 0.0 {
            last_term = mag;
        }
        if mag <= tol * sum.norm() {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && x >= GAMMA_MIN {
            let total = sum.norm();
            let ratio = if total > 0.0 { max_partial / total } else { f64::INFINITY };
            let truncation = 2.0 * last_term.min(mag.max(tol * total));
            let rounding = 8.0 * f64::EPSILON * abs_sum + f64::EPSILON * max_partial;
            return Ok(SeriesSum { value: sum, abs_err: truncation + rounding, ratio });
        }
    }
    Err(MlError::NonConvergence(format!("Taylor series not converged after {max_terms} terms")))
}

/// Direct summation of the defining series.
///
/// Fails with CancellationLoss when the largest partial sum exceeds the result by more than
/// 1e8, which is the dispatcher's cue to switch representation.
pub fn ml_taylor(p: MLParams, z: Complex64, tol: f64, max_terms: usize) -> Result<EvalResult> {
    if !(p.a() > 0.0) {
        return Err(precondition("Taylor summation needs a > 0"));
    }
    if !(tol > 0.0) || !is_finite(z) {
        return Err(precondition("Taylor summation needs tol > 0 and finite z"));
    }
    let s = sum_series(p.a(), p.b(), z, tol, max_terms)?;
    if s.ratio > MAX_CANCELLATION {
        return Err(MlError::CancellationLoss { ratio: s.ratio });
    }
    Ok(EvalResult::new(s.value, s.abs_err, MethodTag::Taylor))
}
