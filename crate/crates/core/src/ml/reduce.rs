use std::f64::consts::PI;

use num_complex::Complex64;

use super::{is_finite, ml_eval, principal, EvalResult, MLParams, MethodTag};
use crate::error::{domain, precondition, Result};
use crate::gamma::recip_gamma;

/// Lowers a > 1 to a/n ≤ 1 with n = ⌊a⌋ + 1 through the root-of-unity average
/// E_{a,b}(z) = (1/n) Σ_r E_{a/n,b}(z^{1/n} e^{2πir/n}).
pub fn ml_reduce_a(p: MLParams, z: Complex64, tol: f64) -> Result<EvalResult> {
    if !(p.a() > 1.0) {
        return Err(precondition("ml_reduce_a needs a > 1"));
    }
    let n = p.a().floor() as usize + 1;
    let nf = n as f64;
    let inner = MLParams::new(p.a() / nf, p.b())?;
    let z = principal(z);
    let r = z.norm().powf(1.0 / nf);
    let theta = z.arg() / nf;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut err = 0.0;
    for k in 0..n {
        let root = Complex64::from_polar(r, theta + 2.0 * PI * k as f64 / nf);
        let part = ml_eval(inner, root, tol)?;
        sum += part.value;
        abs_sum += part.value.norm();
        err += part.abs_err_est;
    }
    let value = sum / nf;
    Ok(EvalResult::new(value, (err + 2.0 * f64::EPSILON * abs_sum) / nf, MethodTag::CyclotomicReduction))
}

/// Moves b by m·a. For m > 0, E_{a,b}(z) = z^{−m}(E_{a,b−ma}(z) − Σ_{l<m} z^l/Γ(b−ma+la));
/// for m < 0 the first |m| series terms are peeled off instead.
pub fn ml_shift_b(p: MLParams, z: Complex64, m: i64, tol: f64) -> Result<EvalResult> {
    if z.norm() == 0.0 {
        return Err(domain("b-shift needs z != 0"));
    }
    let (a, b) = (p.a(), p.b());
    if m == 0 {
        return ml_eval(p, z, tol);
    }
    let z = principal(z);
    let q = m.unsigned_abs() as usize;
    let shifted = if m > 0 { b - m as f64 * a } else { b + q as f64 * a };
    let inner = ml_eval(p.with_b(shifted)?, z, tol)?;
    let base = if m > 0 { shifted } else { b };
    let mut poly = Complex64::new(0.0, 0.0);
    let mut poly_abs = 0.0;
    let mut zl = Complex64::new(1.0, 0.0);
    for l in 0..q {
        let t = zl * recip_gamma(base + a * l as f64);
        poly += t;
        poly_abs += t.norm();
        zl *= z;
    }
    // zl = z^q here
    let (value, err) = if m > 0 {
        let diff = inner.value - poly;
        let scale = inner.value.norm().max(poly_abs);
        let err = (inner.abs_err_est + 4.0 * f64::EPSILON * scale) / zl.norm();
        (diff / zl, err)
    } else {
        let tail = zl * inner.value;
        let err = zl.norm() * inner.abs_err_est + 4.0 * f64::EPSILON * (poly_abs + tail.norm());
        (poly + tail, err)
    };
    if !is_finite(value) {
        return Err(crate::error::MlError::Overflow("b-shift result overflows".into()));
    }
    Ok(EvalResult::new(value, err, MethodTag::BShift))
}
