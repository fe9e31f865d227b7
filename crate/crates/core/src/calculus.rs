//! Derivatives of E_{a,b} in z and in (a, b), local Taylor expansions, the power series of
//! log E_{a,b}, and the small-a expansion built on Fermi-Dirac integrals of negative order.

use num_complex::Complex64;

use crate::combinatorics::{binomial, factorial, stirling_tables};
use crate::error::{domain, precondition, MlError, Result};
use crate::gamma::{digamma, is_gamma_pole, recip_gamma, recip_gamma_derivs};
use crate::ml::{ml_eval, r_taylor, EvalResult, MLParams, MethodTag, DEFAULT_TOL};

/// Highest derivative order served by the closed-form j-th derivative.
pub const MAX_DERIVATIVE_ORDER: usize = 20;
/// Highest order of F_{−k} served by [`fermi_dirac_neg`].
pub const MAX_FERMI_DIRAC_ORDER: usize = 30;
/// Below this modulus derivatives come from the term-wise differentiated series, where the
/// closed forms divide by z and cancel.
const SERIES_DERIVATIVE_RADIUS: f64 = 0.5;

/// Local power series Σ_j coeffs[j] (y − center)^j.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorExpansion {
    pub center: Complex64,
    pub coeffs: Vec<Complex64>,
    /// Ratio of the last two coefficient moduli; a rough radius of accuracy.
    pub radius_hint: f64,
}

impl TaylorExpansion {
    pub fn evaluate(&self, y: Complex64) -> Complex64 {
        let h = y - self.center;
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * h + c)
    }
}

/// d^j/dz^j E_{a,b}(z) = Σ_{k≥j} k!/(k−j)! z^{k−j}/Γ(b+ak), summed directly.
fn derivative_series(a: f64, b: f64, z: Complex64, j: usize, tol: f64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    let mut zpow = Complex64::new(1.0, 0.0);
    for k in j..100_000 {
        let falling = factorial(k) / factorial(k - j);
        let t = zpow * (falling * recip_gamma(b + a * k as f64));
        sum += t;
        if t.norm() <= tol * sum.norm() {
            small += 1;
            if small >= 3 && b + a * k as f64 > 2.0 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        zpow *= z;
        if !falling.is_finite() {
            break;
        }
    }
    Err(MlError::NonConvergence("differentiated series".into()))
}

/// dE_{a,b}/dz = (E_{a,b−1}(z) − (b−1)E_{a,b}(z))/(a z), or 1/Γ(a+b) at the origin.
pub fn ml_derivative(p: MLParams, z: Complex64, tol: f64) -> Result<Complex64> {
    let (a, b) = (p.a(), p.b());
    if !(a > 0.0) {
        return Err(precondition("derivative needs a > 0"));
    }
    if z.norm() == 0.0 {
        return Ok(Complex64::new(recip_gamma(a + b), 0.0));
    }
    if z.norm() < SERIES_DERIVATIVE_RADIUS {
        return derivative_series(a, b, z, 1, tol);
    }
    let lower = ml_eval(p.with_b(b - 1.0)?, z, tol)?.value;
    let here = ml_eval(p, z, tol)?.value;
    Ok((lower - (b - 1.0) * here) / (a * z))
}

/// Coefficients C_k of the j-th derivative w^j E^{(j)}(w) = Σ_k C_k E_{a,b−k}(w).
fn derivative_weights(a: f64, b: f64, j: usize) -> Vec<f64> {
    let st = stirling_tables();
    // inner[m] = Σ_{q=m}^{j} S_j^{(q)} 𝒮_q^{(m)} a^{−q}
    let inner: Vec<f64> = (0..=j)
        .map(|m| (m..=j).map(|q| st.first_f64(j, q) * st.second_f64(q, m) * a.powi(-(q as i32))).sum())
        .collect();
    (0..=j)
        .map(|k| {
            (k..=j)
                .map(|m| {
                    // Γ(2−b)/Γ(2−b−m+k) as the finite product Π_{i<m−k}(1−b−i)
                    let ratio: f64 = (0..m - k).map(|i| 1.0 - b - i as f64).product();
                    binomial(m, k) * ratio * inner[m]
                })
                .sum()
        })
        .collect()
}

/// j-th derivative in z, j ≤ 20, from the Stirling-number closed form.
pub fn ml_derivative_n(p: MLParams, w: Complex64, j: usize, tol: f64) -> Result<Complex64> {
    let (a, b) = (p.a(), p.b());
    if w.norm() == 0.0 {
        return Err(domain("closed-form derivative needs w != 0"));
    }
    if j > MAX_DERIVATIVE_ORDER {
        return Err(precondition(format!("derivative order is capped at {MAX_DERIVATIVE_ORDER}")));
    }
    if !(a > 0.0) {
        return Err(precondition("derivative needs a > 0"));
    }
    if j == 0 {
        return Ok(ml_eval(p, w, tol)?.value);
    }
    if w.norm() < SERIES_DERIVATIVE_RADIUS {
        return derivative_series(a, b, w, j, tol);
    }
    let weights = derivative_weights(a, b, j);
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, c) in weights.iter().enumerate() {
        if *c != 0.0 {
            sum += ml_eval(p.with_b(b - k as f64)?, w, tol)?.value * *c;
        }
    }
    Ok(sum / w.powi(j as i32))
}

fn checked_value(p: MLParams, z: Complex64) -> Result<EvalResult> {
    let e = ml_eval(p, z, DEFAULT_TOL)?;
    let scale = 1e-13 * recip_gamma(p.b()).abs().max(1.0).max(e.abs_err_est * 1e13);
    if e.value.norm() <= scale {
        return Err(MlError::NearZeroDenominator { value: e.value.norm() });
    }
    Ok(e)
}

/// d log E_{a,b}/dz. At z = 0 this is the limit Γ(b)/Γ(a+b).
pub fn ml_log_derivative(p: MLParams, z: Complex64) -> Result<Complex64> {
    if z.norm() == 0.0 {
        let g = recip_gamma(p.b());
        if g == 0.0 {
            return Err(MlError::NearZeroDenominator { value: 0.0 });
        }
        return Ok(Complex64::new(recip_gamma(p.a() + p.b()) / g, 0.0));
    }
    let e = checked_value(p, z)?;
    Ok(ml_derivative(p, z, DEFAULT_TOL)? / e.value)
}

/// d² log E_{a,b}/dz² = E''/E − (E'/E)².
pub fn ml_log_derivative2(p: MLParams, z: Complex64) -> Result<Complex64> {
    let (a, b) = (p.a(), p.b());
    if z.norm() == 0.0 {
        let g = recip_gamma(b);
        if g == 0.0 {
            return Err(MlError::NearZeroDenominator { value: 0.0 });
        }
        let c1 = recip_gamma(a + b) / g;
        let c2 = 2.0 * recip_gamma(2.0 * a + b) / g;
        return Ok(Complex64::new(c2 - c1 * c1, 0.0));
    }
    let e = checked_value(p, z)?.value;
    let d1 = ml_derivative(p, z, DEFAULT_TOL)?;
    let d2 = ml_derivative_n(p, z, 2, DEFAULT_TOL)?;
    let l = d1 / e;
    Ok(d2 / e - l * l)
}

/// Taylor coefficients E^{(j)}(y0)/j! for j = 0..=order.
pub fn ml_taylor_at(p: MLParams, y0: Complex64, order: usize) -> Result<TaylorExpansion> {
    if y0.norm() == 0.0 {
        return Err(domain("expansion centre must be non-zero"));
    }
    let coeffs = (0..=order)
        .map(|j| Ok(ml_derivative_n(p, y0, j, DEFAULT_TOL)? / factorial(j)))
        .collect::<Result<Vec<_>>>()?;
    let radius_hint = if order >= 1 && coeffs[order].norm() > 0.0 {
        coeffs[order - 1].norm() / coeffs[order].norm()
    } else {
        f64::INFINITY
    };
    Ok(TaylorExpansion { center: y0, coeffs, radius_hint })
}

/// c_1..c_M of log(Γ(b) E_{a,b}(z)) = Σ_m c_m z^m.
///
/// s[k,m], the z^m coefficient of (Σ_{j≥1} z^j/Γ(b+ja))^k, is built by repeated Cauchy
/// products, and c_m = −Σ_k (−Γ(b))^k s[k,m]/k.
pub fn log_ml_coeffs(p: MLParams, order: usize) -> Result<Vec<f64>> {
    let (a, b) = (p.a(), p.b());
    if !(b > 0.0) {
        return Err(domain("log-series coefficients need b > 0"));
    }
    if order > 12 {
        return Err(precondition("log-series coefficients are served up to M = 12"));
    }
    let gb = 1.0 / recip_gamma(b);
    let f: Vec<f64> = (0..=order).map(|j| if j == 0 { 0.0 } else { recip_gamma(b + a * j as f64) }).collect();
    let mut power = f.clone();
    let mut c = vec![0.0; order + 1];
    for k in 1..=order {
        if k > 1 {
            let mut next = vec![0.0; order + 1];
            for m in k..=order {
                next[m] = (1..=m - (k - 1)).map(|j| f[j] * power[m - j]).sum();
            }
            power = next;
        }
        let weight = -(-gb).powi(k as i32) / k as f64;
        for m in k..=order {
            c[m] += weight * power[m];
        }
    }
    Ok(c[1..].to_vec())
}

/// d/dx (1/Γ(x)) = −ψ(x)/Γ(x), with the finite limit (−1)^n n! at x = −n.
fn recip_gamma_slope(x: f64) -> f64 {
    if is_gamma_pole(x) {
        let n = (-x).round() as usize;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return sign * factorial(n);
    }
    -digamma(x).expect("poles handled above") * recip_gamma(x)
}

/// (∂E/∂a, ∂E/∂b) from the term-wise differentiated series.
pub fn ml_param_derivs(p: MLParams, z: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
    let (a, b) = (p.a(), p.b());
    if !(a > 0.0) {
        return Err(precondition("parameter derivatives need a > 0"));
    }
    if z.norm() >= r_taylor(p) {
        return Err(precondition(format!("parameter derivatives need |z| < {}", r_taylor(p))));
    }
    let mut da = Complex64::new(0.0, 0.0);
    let mut db = Complex64::new(recip_gamma_slope(b), 0.0);
    let mut zpow = Complex64::new(1.0, 0.0);
    let mut small = 0;
    for k in 1..200_000 {
        zpow *= z;
        let x = b + a * k as f64;
        let t = zpow * recip_gamma_slope(x);
        db += t;
        da += t * k as f64;
        if (t * k as f64).norm() <= tol * da.norm().max(db.norm()) {
            small += 1;
            if small >= 3 && x > 2.0 {
                return Ok((da, db));
            }
        } else {
            small = 0;
        }
    }
    Err(MlError::NonConvergence("parameter-derivative series".into()))
}

/// F_{−k} in terms of σ = 1/(1 + e^{−y}).
fn fermi_dirac_from_sigma(k: usize, sigma: Complex64) -> Complex64 {
    let st = stirling_tables();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sp = Complex64::new(1.0, 0.0);
    for m in 1..=k {
        sp *= sigma;
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        sum += sp * (sign * factorial(m - 1) * st.second_f64(k, m));
    }
    sum
}

/// F_{−k}(y) = d^{k−1}/dy^{k−1} 1/(1 + e^{−y}).
pub fn fermi_dirac_neg(k: usize, y: Complex64) -> Result<Complex64> {
    if k == 0 || k > MAX_FERMI_DIRAC_ORDER {
        return Err(precondition(format!("F_-k needs 1 <= k <= {MAX_FERMI_DIRAC_ORDER}")));
    }
    let den = 1.0 + (-y).exp();
    if den.norm() < 1e-14 {
        return Err(MlError::Pole(format!("F_-{k} at y = {y}")));
    }
    Ok(fermi_dirac_from_sigma(k, 1.0 / den))
}

/// E_{a,b}(−z) for small a and |z| < 1 as a power series in a:
/// Σ_m g^{(m)}(b)/m! · F_{−m−1}(−ln z) · (−a)^m with g = 1/Γ.
pub fn ml_small_a(p: MLParams, z: Complex64, terms: usize, tol: f64) -> Result<EvalResult> {
    let (a, b) = (p.a(), p.b());
    if !(a > 0.0 && a < 0.2) {
        return Err(precondition("small-a expansion needs 0 < a < 0.2"));
    }
    if !(z.norm() < 1.0) {
        return Err(precondition("small-a expansion needs |z| < 1"));
    }
    let terms = terms.min(MAX_FERMI_DIRAC_ORDER - 1);
    let g = recip_gamma_derivs(b, terms)?;
    // e^{−y} = z for y = −ln z
    let sigma = 1.0 / (1.0 + z);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mags = Vec::with_capacity(terms + 1);
    let mut apow = 1.0;
    for m in 0..=terms {
        let t = fermi_dirac_from_sigma(m + 1, sigma) * (g[m] / factorial(m) * apow);
        sum += t;
        mags.push(t.norm());
        if m >= 2 && t.norm() <= tol * sum.norm() && mags[m - 1] <= tol * sum.norm() {
            let err = 2.0 * t.norm().max(mags[m - 1]) + 8.0 * f64::EPSILON * sum.norm();
            return Ok(EvalResult::new(sum, err, MethodTag::Taylor));
        }
        apow *= -a;
    }
    let last = mags[terms];
    if terms >= 2 && last >= mags[terms / 2] {
        return Err(MlError::NonConvergence("small-a terms are not decreasing".into()));
    }
    Ok(EvalResult::new(sum, 2.0 * last + 8.0 * f64::EPSILON * sum.norm(), MethodTag::Taylor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn params(a: f64, b: f64) -> MLParams {
        MLParams::new(a, b).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn eval(p: MLParams, z: Complex64) -> Complex64 {
        ml_eval(p, z, 1e-15).unwrap().value
    }

    fn rel(x: Complex64, y: Complex64) -> f64 {
        (x - y).norm() / y.norm()
    }

    #[test]
    fn first_derivative_examples() {
        let p = params(1.0, 1.0);
        assert!((ml_derivative(p, c(1.0), 1e-15).unwrap().re - E).abs() < 1e-14);
        assert_eq!(ml_derivative(p, c(0.0), 1e-15).unwrap(), c(1.0));
        let p = params(0.6, 1.1);
        let z = c(0.5);
        let h = f64::EPSILON.cbrt();
        let fd = (eval(p, z + h) - eval(p, z - h)) / (2.0 * h);
        assert!(rel(ml_derivative(p, z, 1e-15).unwrap(), fd) < 1e-6);
        // Closed-form branch, away from the series radius.
        let z = c(1.7);
        let fd = (eval(p, z + h) - eval(p, z - h)) / (2.0 * h);
        assert!(rel(ml_derivative(p, z, 1e-15).unwrap(), fd) < 1e-6);
    }

    #[test]
    fn higher_derivatives() {
        let p = params(1.0, 1.0);
        for j in 0..=8 {
            assert!((ml_derivative_n(p, c(1.0), j, 1e-15).unwrap().re - E).abs() < 1e-11, "j={j}");
        }
        let p = params(0.7, 1.3);
        let w = c(0.8);
        let h = 1e-4;
        let fd = (eval(p, w + h) - 2.0 * eval(p, w) + eval(p, w - h)) / (h * h);
        assert!(rel(ml_derivative_n(p, w, 2, 1e-15).unwrap(), fd) < 1e-4);
        assert!(ml_derivative_n(p, c(0.0), 1, 1e-15).is_err());
        assert!(ml_derivative_n(p, c(1.0), 21, 1e-15).is_err());
    }

    #[test]
    fn closed_form_and_series_derivatives_agree() {
        let p = params(0.7, 1.3);
        let w = Complex64::new(0.45, 0.2);
        for j in 1..=5 {
            let series = derivative_series(0.7, 1.3, w, j, 1e-16).unwrap();
            let closed = derivative_weights(0.7, 1.3, j)
                .iter()
                .enumerate()
                .map(|(k, &cw)| eval(p.with_b(1.3 - k as f64).unwrap(), w) * cw)
                .sum::<Complex64>()
                / w.powi(j as i32);
            assert!(rel(closed, series) < 1e-9, "j={j}");
        }
    }

    #[test]
    fn log_derivatives() {
        let p = params(1.0, 1.0);
        for z in [c(0.3), c(2.0), Complex64::new(-1.0, 2.0)] {
            assert!((ml_log_derivative(p, z).unwrap() - c(1.0)).norm() < 1e-12);
            assert!(ml_log_derivative2(p, z).unwrap().norm() < 1e-10);
        }
        let p = params(0.5, 2.0);
        assert!((ml_log_derivative(p, c(0.0)).unwrap().re - recip_gamma(2.5) / recip_gamma(2.0)).abs() < 1e-15);
        let z = c(1.0);
        let h = f64::EPSILON.cbrt();
        let fd = (eval(p, z + h).ln() - eval(p, z - h).ln()) / (2.0 * h);
        assert!(rel(ml_log_derivative(p, z).unwrap(), fd) < 1e-6);
        let h = 1e-4;
        let fd2 = (eval(p, z + h).ln() - 2.0 * eval(p, z).ln() + eval(p, z - h).ln()) / (h * h);
        assert!(rel(ml_log_derivative2(p, z).unwrap(), fd2) < 1e-4);
    }

    #[test]
    fn local_expansions() {
        let t = ml_taylor_at(params(1.0, 1.0), c(1.0), 5).unwrap();
        for (j, cj) in t.coeffs.iter().enumerate() {
            assert!((cj.re - E / factorial(j)).abs() < 1e-12);
        }
        let t = ml_taylor_at(params(0.7, 1.0), c(2.0), 0).unwrap();
        assert_eq!(t.coeffs.len(), 1);
        let p = params(0.8, 1.0);
        let t = ml_taylor_at(p, c(2.0), 6).unwrap();
        // 40-digit Taylor coefficients of E_{0.8,1} about 2.
        let oracle = [13.415_748_887_8, 20.067_696_702_5, 16.143_881_510_2, 9.090_709_274_17, 3.986_372_937_33, 1.442_302_105_71, 0.446_451_936_014];
        for (cj, o) in t.coeffs.iter().zip(oracle) {
            assert!((cj.re - o).abs() < 1e-10 * o, "{cj} vs {o}");
        }
        // The omitted c_7 (0.3)^7 term alone is 1.3e-6 relative at y = 2.3.
        let y = c(2.3);
        assert!(rel(t.evaluate(y), eval(p, y)) < 1.5e-6);
        assert!(rel(ml_taylor_at(p, c(2.0), 9).unwrap().evaluate(y), eval(p, y)) < 1e-8);
    }

    #[test]
    fn log_series_coefficients() {
        let c1 = log_ml_coeffs(params(1.0, 1.0), 6).unwrap();
        assert!((c1[0] - 1.0).abs() < 1e-15);
        assert!(c1[1..].iter().all(|v| v.abs() < 1e-14));
        let half = log_ml_coeffs(params(0.5, 1.0), 2).unwrap();
        let g = recip_gamma(1.5);
        assert!((half[0] - g).abs() < 1e-15);
        assert!((half[1] - (recip_gamma(2.0) - 0.5 * g * g)).abs() < 1e-15);
        assert!(log_ml_coeffs(params(0.5, -1.0), 2).is_err());
        // Against the series of log E computed by finite Taylor composition at a point.
        let p = params(0.6, 1.4);
        let coeffs = log_ml_coeffs(p, 12).unwrap();
        let z: f64 = 0.05;
        let series: f64 = coeffs.iter().enumerate().map(|(i, cm)| cm * z.powi(i as i32 + 1)).sum();
        let direct = (eval(p, c(z)).re / recip_gamma(1.4)).ln();
        assert!((series - direct).abs() < 1e-14);
    }

    #[test]
    fn parameter_derivatives() {
        let p = params(1.0, 1.0);
        let (da, db) = ml_param_derivs(p, c(0.0), 1e-15).unwrap();
        assert_eq!(da, c(0.0));
        assert!((db.re + digamma(1.0).unwrap()).abs() < 1e-15);
        let z = c(0.5);
        let (_, db) = ml_param_derivs(p, z, 1e-15).unwrap();
        let h = 1e-5;
        let fd = (eval(params(1.0, 1.0 + h), z) - eval(params(1.0, 1.0 - h), z)) / (2.0 * h);
        assert!(rel(db, fd) < 1e-6);
        // ∂E/∂a = z ∂²E/∂z∂b
        let p = params(0.7, 1.2);
        let z = c(0.6);
        let (da, _) = ml_param_derivs(p, z, 1e-15).unwrap();
        let h = 1e-3;
        let e = |b: f64, z: f64| eval(params(0.7, b), c(z));
        let mixed = (e(1.2 + h, 0.6 + h) - e(1.2 + h, 0.6 - h) - e(1.2 - h, 0.6 + h) + e(1.2 - h, 0.6 - h)) / (4.0 * h * h);
        assert!(rel(da, z * mixed) < 1e-4);
        assert!(ml_param_derivs(p, c(5.0), 1e-15).is_err());
    }

    #[test]
    fn fermi_dirac_values() {
        assert!((fermi_dirac_neg(1, c(0.0)).unwrap().re - 0.5).abs() < 1e-16);
        assert!((fermi_dirac_neg(2, c(0.0)).unwrap().re - 0.25).abs() < 1e-16);
        let y = c(0.7);
        let lhs = fermi_dirac_neg(3, y).unwrap();
        let rhs = -fermi_dirac_neg(3, -y).unwrap();
        assert!((lhs - rhs).norm() < 1e-15);
        let pole = Complex64::new(0.0, std::f64::consts::PI);
        assert!(matches!(fermi_dirac_neg(2, pole), Err(MlError::Pole(_))));
    }

    #[test]
    fn small_order_expansion() {
        let r = ml_small_a(params(1e-9, 1.0), c(0.5), 20, 1e-15).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-8);
        let r = ml_small_a(params(0.05, 1.0), c(0.3), 29, 1e-15).unwrap();
        assert!((r.value.re - 0.764_264_333_877_45).abs() < 1e-8, "{}", r.value);
        // Leading term alone is the geometric value 1/(1+z).
        let r = ml_small_a(params(1e-12, 1.0), c(0.3), 0, 1e-15).unwrap();
        assert!((r.value.re - 1.0 / 1.3).abs() < 1e-10);
    }
}
