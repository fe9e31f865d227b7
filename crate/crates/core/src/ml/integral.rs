use std::f64::consts::PI;

use num_complex::Complex64;

use super::{exp_polar, is_finite, principal, ray_distance, EvalResult, MLParams, MethodTag, DELTA_RAY};
use crate::error::{precondition, MlError, Result};
use crate::gamma::{cos_pi, recip_gamma, sin_pi};
use crate::quadrature::{integrate_finite_singular, integrate_semi_infinite_weighted, QuadratureConfig};

fn check_rep_range(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(precondition(format!("integral representation needs 0 < a <= 1, got a = {a}")));
    }
    if !(b < a + 1.0) {
        return Err(precondition(format!("integral representation needs b < a + 1, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Residue plus the two real integrals along the positive axis, without the ray check.
///
/// The denominator y^{2a} − 2z y^a cos aπ + z² is smallest near y = |z|^{1/a}, which is
/// passed to the integrator as a panel boundary.
pub(crate) fn integral_rep_core(a: f64, b: f64, z: Complex64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    let z = principal(z);
    let s1 = sin_pi(a - b);
    let s2 = sin_pi(b);
    let c = cos_pi(a);
    let z2 = z * z;
    let p = if s1 != 0.0 { a - b } else { 2.0 * a - b };
    // Integrand divided by y^p, bounded at the origin.
    let regular = |y: f64| -> Complex64 {
        let ya = y.powf(a);
        let den = ya * ya - 2.0 * c * ya * z + z2;
        let num = z * (s1 * y.powf(a - b - p)) + s2 * y.powf(2.0 * a - b - p);
        num * ((-y).exp() / PI) / den
    };
    let y0 = z.norm().powf(1.0 / a);
    let mut breaks = vec![y0, (a - b).max(2.0 * a - b)];
    let d = ray_distance(a, z);
    if d < 0.5 {
        // Lorentzian of relative width ~ d/a around y0.
        let w = (d / a).max(1e-8);
        breaks.extend([y0 * (1.0 - w), y0 * (1.0 + w)]);
    }
    let quad = integrate_semi_infinite_weighted(regular, 1.0, p, &breaks, cfg)?;
    let mut value = quad.value;
    let mut err = quad.err_est;
    let theta = z.arg();
    if theta.abs() < a * PI {
        // (1/a) w^{1−b} e^w, w = z^{1/a}
        let w = Complex64::from_polar(y0, theta / a);
        let ln_mag = (1.0 - b) * y0.ln() + w.re - a.ln();
        let res = exp_polar(ln_mag, (1.0 - b) * w.arg() + w.im);
        if !is_finite(res) {
            return Err(MlError::Overflow(format!("residue e^(z^(1/a)) overflows at |z|^(1/a) = {y0:e}")));
        }
        value += res;
        err += res.norm() * f64::EPSILON * (4.0 + w.norm());
    }
    if !quad.converged {
        err = err.max(cfg.rel_tol * value.norm());
    }
    Ok(EvalResult::new(value, err + 4.0 * f64::EPSILON * value.norm(), MethodTag::IntegralRep))
}

/// Residue-plus-integral representation, valid for 0 < a ≤ 1 and b < a + 1 away from the
/// critical rays.
pub fn ml_integral_rep(p: MLParams, z: Complex64, cfg: QuadratureConfig) -> Result<EvalResult> {
    let (a, b) = (p.a(), p.b());
    check_rep_range(a, b)?;
    if !(z.norm() > 0.0) || !is_finite(z) {
        return Err(precondition("integral representation needs finite z != 0"));
    }
    if ray_distance(a, z) <= DELTA_RAY {
        return Err(MlError::RayProximity);
    }
    integral_rep_core(a, b, z, &cfg)
}

/// E_{a,b}(−x) for x > 0, 0 < a ≤ 1, b < a + 1, as a real integral with no residue.
///
/// Integrated in the variable y = x^{1/a}u, where the decay rate is 1 and the kernel
/// denominator is x² + 2x y^a cos πa + y^{2a}. Its minimum near y^a = −x cos πa (a > ½) is a
/// panel boundary, which keeps a → 1 accurate.
pub fn ml_neg_real(p: MLParams, x: f64, cfg: QuadratureConfig) -> Result<EvalResult> {
    let (a, b) = (p.a(), p.b());
    check_rep_range(a, b)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(precondition("ml_neg_real needs finite x > 0"));
    }
    if a == 1.0 {
        return exponential_neg_real(b, x, &cfg);
    }
    let s1 = sin_pi(a - b);
    let s2 = sin_pi(b);
    let c = cos_pi(a);
    let p_end = if s1 != 0.0 { a - b } else { 2.0 * a - b };
    let regular = |y: f64| -> Complex64 {
        let ya = y.powf(a);
        let den = x * x + 2.0 * c * x * ya + ya * ya;
        let num = -x * s1 * y.powf(a - b - p_end) + s2 * y.powf(2.0 * a - b - p_end);
        Complex64::new(num * (-y).exp() / (PI * den), 0.0)
    };
    let mut breaks = vec![(a - b).max(2.0 * a - b)];
    if c < 0.0 {
        let y0 = (-c * x).powf(1.0 / a);
        let w = (sin_pi(a) / a).min(0.5);
        breaks.extend([y0 * (1.0 - w), y0, y0 * (1.0 + w)]);
    }
    let quad = integrate_semi_infinite_weighted(regular, 1.0, p_end, &breaks, &cfg)?;
    let value = Complex64::new(quad.value.re, 0.0);
    let mut err = quad.err_est + 4.0 * f64::EPSILON * value.norm();
    if !quad.converged {
        err = err.max(cfg.rel_tol * value.norm());
    }
    Ok(EvalResult::new(value, err, MethodTag::NegRealIntegral))
}

/// a = 1, where the kernel degenerates to a pole on the path.
///
/// b > 1 uses E_{1,b}(−x) = (1/Γ(b−1)) ∫_0^1 e^{−x(1−s)} s^{b−2} ds; smaller b climbs with
/// E_{1,b} = 1/Γ(b) − x E_{1,b+1}, starting from (−x)^m e^{−x} at integer b = 1 − m.
fn exponential_neg_real(b: f64, x: f64, cfg: &QuadratureConfig) -> Result<EvalResult> {
    if b > 1.0 {
        let quad = integrate_finite_singular(|s: f64| Complex64::new((-x * (1.0 - s)).exp() * s.powf(b - 2.0), 0.0), 0.0, 1.0, b - 2.0, cfg)?;
        let g = recip_gamma(b - 1.0);
        let value = quad.value.re * g;
        return Ok(EvalResult::new(
            Complex64::new(value, 0.0),
            quad.err_est * g.abs() + 4.0 * f64::EPSILON * value.abs(),
            MethodTag::NegRealIntegral,
        ));
    }
    if b.fract() == 0.0 {
        let m = (1.0 - b) as i32;
        let value = (-x).powi(m) * (-x).exp();
        return Ok(EvalResult::new(Complex64::new(value, 0.0), 4.0 * f64::EPSILON * value.abs(), MethodTag::NegRealIntegral));
    }
    let up = exponential_neg_real(b + 1.0, x, cfg)?;
    let head = recip_gamma(b);
    let value = head - x * up.value.re;
    let err = x * up.abs_err_est + 2.0 * f64::EPSILON * (head.abs() + (x * up.value.re).abs());
    Ok(EvalResult::new(Complex64::new(value, 0.0), err, MethodTag::NegRealIntegral))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::erfcx;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn params(a: f64, b: f64) -> MLParams {
        MLParams::new(a, b).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn half_order_matches_scaled_erfc() {
        let r = ml_integral_rep(params(0.5, 1.0), Complex64::new(-4.0, 0.0), cfg()).unwrap();
        assert!((r.value.re - erfcx(4.0)).abs() < 1e-12 * erfcx(4.0), "{}", r.value);
        let r = ml_neg_real(params(0.5, 1.0), 1.0, cfg()).unwrap();
        assert!((r.value.re - 0.427_583_576_155_807).abs() < 1e-13);
    }

    #[test]
    fn residue_dominated_point() {
        // 400-term sum in 60-digit arithmetic.
        let r = ml_integral_rep(params(0.9, 1.0), Complex64::new(10.0, 0.0), cfg()).unwrap();
        let oracle = 451_737.774_567_737_4;
        assert!((r.value.re - oracle).abs() < 1e-9 * oracle, "{}", r.value);
    }

    #[test]
    fn negative_axis_with_equal_parameters() {
        let oracle = Complex64::new(0.012_201_124_167_156_127, 0.0);
        let r = ml_integral_rep(params(0.7, 0.7), Complex64::new(-5.0, 0.0), cfg()).unwrap();
        assert!(rel(r.value, oracle) < 1e-10, "{}", r.value);
        let r = ml_neg_real(params(0.7, 0.7), 5.0, cfg()).unwrap();
        assert!(rel(r.value, oracle) < 1e-10, "{}", r.value);
    }

    #[test]
    fn exponential_limit_on_negative_axis() {
        let r = ml_neg_real(params(1.0, 1.0), 1.0, cfg()).unwrap();
        assert!((r.value.re - (-1.0_f64).exp()).abs() < 1e-15);
        // E_{1,1.5}(−2) and E_{1,0.5}(−2)
        let r = ml_neg_real(params(1.0, 1.5), 2.0, cfg()).unwrap();
        assert!((r.value.re - 0.361_074_605_264_588_46).abs() < 1e-13, "{}", r.value);
        let lhs = ml_neg_real(params(1.0, 0.5), 2.0, cfg()).unwrap().value.re;
        let rhs = recip_gamma(0.5) - 2.0 * 0.361_074_605_264_588_46;
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn near_unit_order_stays_accurate() {
        // E_{0.99,1}(−3), 60-digit sum.
        let r = ml_neg_real(params(0.99, 1.0), 3.0, cfg()).unwrap();
        assert!((r.value.re - 0.053_451_867_506_199_627).abs() < 1e-12, "{}", r.value);
    }

    #[test]
    fn bounds_sandwich_small_order() {
        // 1/(1 + x Γ(1−a)) ≤ E_a(−x) ≤ 1/(1 + x/Γ(1+a)) for 0 < a < 1
        let a = 0.3;
        let x = 2.0;
        let v = ml_neg_real(params(a, 1.0), x, cfg()).unwrap().value.re;
        let lo = 1.0 / (1.0 + x / recip_gamma(1.0 - a));
        let hi = 1.0 / (1.0 + x * recip_gamma(1.0 + a));
        assert!(lo < v && v < hi, "{lo} < {v} < {hi}");
    }

    #[test]
    fn preconditions_and_rays() {
        assert!(matches!(ml_integral_rep(params(1.5, 1.0), Complex64::new(1.0, 0.0), cfg()), Err(MlError::PreconditionViolation(_))));
        assert!(matches!(ml_integral_rep(params(0.5, 2.0), Complex64::new(1.0, 0.0), cfg()), Err(MlError::PreconditionViolation(_))));
        let on_ray = Complex64::from_polar(3.0, 0.5 * PI);
        assert_eq!(ml_integral_rep(params(0.5, 1.0), on_ray, cfg()), Err(MlError::RayProximity));
    }
}
