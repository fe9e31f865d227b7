use std::f64::consts::PI;

use num_complex::Complex64;

use super::{exp_polar, is_finite, principal, EvalResult, MLParams, MethodTag};
use crate::combinatorics::factorial;
use crate::gamma::{erfcx, incomplete_gamma_p, recip_gamma};

/// Closed forms accepted only when they lose less than this factor to cancellation.
const MAX_CLOSED_FORM_RATIO: f64 = 100.0;

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

fn accept(value: Complex64, ratio: f64, method: MethodTag) -> Option<EvalResult> {
    if !is_finite(value) || !(ratio <= MAX_CLOSED_FORM_RATIO) {
        return None;
    }
    Some(EvalResult::new(value, 8.0 * f64::EPSILON * ratio.max(1.0) * value.norm(), method))
}

/// Elementary or incomplete-gamma expression for E_{a,b}(z) when (a, b, z) admits one.
///
/// Forms that would cancel badly at this particular z decline, so `None` means "use a
/// general method", not "no formula exists".
pub fn ml_closed_form(p: MLParams, z: Complex64) -> Option<EvalResult> {
    let (a, b) = (p.a(), p.b());
    let z = principal(z);
    if !is_finite(z) {
        return None;
    }
    if a == 0.0 {
        if z.norm() >= 1.0 {
            return None;
        }
        return accept(recip_gamma(b) / (1.0 - z), 1.0, MethodTag::Geometric);
    }
    if a == 1.0 {
        return exponential_family(b, z);
    }
    if a == 2.0 && (b == 1.0 || b == 2.0) {
        let root = z.sqrt();
        let value = if b == 1.0 {
            root.cosh()
        } else if z.norm() < 1e-8 {
            // sinh w / w = 1 + w²/6 + …
            1.0 + z / 6.0 + z * z / 120.0
        } else {
            root.sinh() / root
        };
        return accept(value, 1.0, MethodTag::ClosedForm);
    }
    if a == 0.5 && b == 1.0 && z.im == 0.0 {
        // e^{z²} erfc(−z)
        return accept(Complex64::new(erfcx(-z.re), 0.0), 1.0, MethodTag::ClosedForm);
    }
    if is_integer(a) && is_integer(b) && b >= 1.0 && b <= a && z.norm() > 0.0 {
        return roots_of_unity(a as usize, b, z);
    }
    let n = (1.0 / a).round();
    if n >= 2.0 && a == 1.0 / n && z.im == 0.0 && z.re > 0.0 && b >= 1.0 {
        return wiman(n as usize, b, z.re);
    }
    None
}

/// a = 1: e^z, z^m e^z, the truncated-exponential quotient, or the incomplete gamma form.
fn exponential_family(b: f64, z: Complex64) -> Option<EvalResult> {
    if b == 1.0 {
        return accept(z.exp(), 1.0, MethodTag::ClosedForm);
    }
    if is_integer(b) && b < 1.0 {
        // Σ_{k≥m} z^k/(k−m)! with m = 1 − b
        let m = (1.0 - b) as i32;
        return accept(z.powi(m) * z.exp(), 1.0, MethodTag::ClosedForm);
    }
    if is_integer(b) && b <= 171.0 {
        let n = b as usize;
        if z.norm() == 0.0 {
            return accept(Complex64::new(1.0 / factorial(n - 1), 0.0), 1.0, MethodTag::ClosedForm);
        }
        let ez = z.exp();
        let mut poly = Complex64::new(0.0, 0.0);
        let mut poly_abs = 0.0;
        let mut zj = Complex64::new(1.0, 0.0);
        for j in 0..=n - 2 {
            let t = zj / factorial(j);
            poly += t;
            poly_abs += t.norm();
            zj *= z;
        }
        let diff = ez - poly;
        let ratio = ez.norm().max(poly_abs) / diff.norm();
        return accept(diff / z.powi(n as i32 - 1), ratio, MethodTag::ClosedForm);
    }
    if b > 1.0 && z.im == 0.0 && z.re > 0.0 {
        // z^{1−b} e^z P(b−1, z)
        let x = z.re;
        let pg = incomplete_gamma_p(b - 1.0, x).ok()?;
        if pg == 0.0 {
            return None;
        }
        let ln_v = (1.0 - b) * x.ln() + x + pg.ln();
        return accept(Complex64::new(ln_v.exp(), 0.0), 2.0, MethodTag::ClosedForm);
    }
    None
}

/// Integer a = m, integer 1 ≤ b = n ≤ m: (1/m) Σ_r w_r^{1−n} e^{w_r}, w_r = z^{1/m} e^{2πir/m}.
fn roots_of_unity(m: usize, b: f64, z: Complex64) -> Option<EvalResult> {
    let n = b as i32;
    let r = z.norm().powf(1.0 / m as f64);
    let theta = z.arg() / m as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 0..m {
        let w = Complex64::from_polar(r, theta + 2.0 * PI * k as f64 / m as f64);
        let t = w.powi(1 - n) * w.exp();
        sum += t;
        abs_sum += t.norm();
    }
    let value = sum / m as f64;
    accept(value, abs_sum / (m as f64 * value.norm()), MethodTag::ClosedForm)
}

/// a = 1/n, real x > 0, b ≥ 1: x^{(1−b)n} e^{x^n} Σ_{j<n} P(b − 1 + j/n, x^n).
fn wiman(n: usize, b: f64, x: f64) -> Option<EvalResult> {
    let nf = n as f64;
    let xn = x.powf(nf);
    let mut bracket = 0.0;
    for j in 0..n {
        let s = b - 1.0 + j as f64 / nf;
        bracket += if s == 0.0 { 1.0 } else { incomplete_gamma_p(s, xn).ok()? };
    }
    // The bracket underflows only when x^n is tiny; the Taylor branch covers that.
    if bracket < 1e-250 {
        return None;
    }
    let value = exp_polar((1.0 - b) * nf * x.ln() + xn + bracket.ln(), 0.0);
    accept(value, 1.0 + nf, MethodTag::ClosedForm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(a: f64, b: f64, z: Complex64) -> Option<EvalResult> {
        ml_closed_form(MLParams::new(a, b).unwrap(), z)
    }

    fn real(a: f64, b: f64, x: f64) -> f64 {
        let r = eval(a, b, Complex64::new(x, 0.0)).expect("closed form applies");
        assert_eq!(r.value.im, 0.0);
        r.value.re
    }

    #[test]
    fn documented_examples() {
        assert!((real(2.0, 1.0, 1.0) - 1.0_f64.cosh()).abs() < 1e-15);
        assert!((real(1.0, 2.0, 1.0) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        assert!((real(0.5, 1.0, -1.0) - 0.427_583_576_155_807_0).abs() < 1e-15);
    }

    #[test]
    fn geometric_case() {
        let r = eval(0.0, 1.0, Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(r.method, MethodTag::Geometric);
        assert!((r.value.re - 2.0).abs() < 1e-15);
        assert!(eval(0.0, 1.0, Complex64::new(1.5, 0.0)).is_none());
    }

    #[test]
    fn integer_b_against_series() {
        // E_{1,3}(z) = Σ z^k/(k+2)!, E_{3,2}(z), E_{1,−1}(z) = z² e^z
        let z = Complex64::new(1.3, -0.4);
        let series = |a: f64, b: f64| -> Complex64 {
            (0..80).map(|k| z.powi(k) * recip_gamma(b + a * k as f64)).sum()
        };
        for (a, b) in [(1.0, 3.0), (3.0, 2.0), (3.0, 3.0), (1.0, -1.0), (4.0, 1.0)] {
            let r = eval(a, b, z).unwrap();
            assert!((r.value - series(a, b)).norm() < 1e-14 * r.value.norm(), "a={a} b={b}");
        }
    }

    #[test]
    fn incomplete_gamma_and_wiman_forms() {
        // mpmath: E_{1,2.5}(3), E_{1/3,1}(0.8), E_{1/2,1.7}(1.2)
        assert!((real(1.0, 2.5, 3.0) - 3.434_038_144_852_543_5).abs() < 1e-13);
        assert!((real(1.0 / 3.0, 1.0, 0.8) - 3.972_209_345_982_412_6).abs() < 1e-13);
        assert!((real(0.5, 1.7, 1.2) - 5.073_695_469_678_557).abs() < 1e-13);
    }

    #[test]
    fn cancelling_forms_decline() {
        assert!(eval(1.0, 5.0, Complex64::new(1e-6, 0.0)).is_none());
        assert!(eval(0.7, 1.0, Complex64::new(1.0, 0.0)).is_none());
    }
}
