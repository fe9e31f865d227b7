//! Real-argument Gamma-family functions: Γ, ln Γ, 1/Γ and its derivatives, ψ and ψ^{(n)},
//! the regularized lower incomplete gamma function and erfc.

use std::f64::consts::PI;

use crate::combinatorics::{bernoulli_f64, factorial};
use crate::error::{domain, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_502_4;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_9;
/// Largest x with finite Γ(x) in binary64.
pub const GAMMA_OVERFLOW: f64 = 171.624_376_956_302_7;
/// Highest derivative order served by [`recip_gamma_derivs`].
pub const MAX_RECIP_GAMMA_DERIV: usize = 60;
const STIRLING_MIN: f64 = 9.0;
const STIRLING_TERMS: usize = 8;

/// Γ(x) with poles reported in-band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaValue {
    /// NaN at a pole.
    pub value: f64,
    pub is_pole: bool,
}

/// True when x is a non-positive integer to within one ulp.
pub fn is_gamma_pole(x: f64) -> bool {
    if x > 0.0 || !x.is_finite() {
        return false;
    }
    let r = x.round();
    (x - r).abs() <= f64::EPSILON * r.abs().max(1.0) && r <= 0.0
}

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    let (t, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let t = if t > 0.5 { 1.0 - t } else { t };
    sign * (PI * t).sin()
}

/// cos(πx) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Σ_{n=1}^{8} B_{2n}/(2n(2n−1)x^{2n−1}), the Stirling correction. Eight terms keep the
/// first omitted term near 1e-17 at x = 9.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut pow = inv;
    let mut sum = 0.0;
    for n in 1..=STIRLING_TERMS {
        let k = 2 * n;
        sum += bernoulli_f64(k) / ((k * (k - 1)) as f64) * pow;
        pow *= inv2;
    }
    sum
}

fn log_gamma_stirling(x: f64) -> f64 {
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_tail(x)
}

/// Shift x up to at least 9: returns (x + n, x(x+1)…(x+n−1)).
fn shift_up(x: f64) -> (f64, f64) {
    let mut y = x;
    let mut prod = 1.0;
    while y < STIRLING_MIN {
        prod *= y;
        y += 1.0;
    }
    (y, prod)
}

pub fn log_gamma_real(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_nan() {
        return Err(domain(format!("log_gamma_real needs x > 0, got {x}")));
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x >= STIRLING_MIN {
        return Ok(log_gamma_stirling(x));
    }
    if x < 1e-8 {
        // prod would be x·(small shift), keep it away from denormals
        return Ok(-x.ln() + log_gamma_real(x + 1.0)?);
    }
    let (y, prod) = shift_up(x);
    Ok(log_gamma_stirling(y) - prod.ln())
}

/// Γ(x) for x ≥ 9 written as p·(p·e^{−x})·√(2π)·e^{tail} with p = x^{(x−½)/2}, which keeps
/// every factor within a few ulps.
fn gamma_large(x: f64) -> f64 {
    if x > GAMMA_OVERFLOW {
        return f64::INFINITY;
    }
    let p = x.powf(0.5 * (x - 0.5));
    p * (p * (-x).exp()) * SQRT_2PI * stirling_tail(x).exp()
}

fn gamma_positive(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 23.0 {
        // (x−1)! is exact in binary64 up to 22!.
        return factorial(x as usize - 1);
    }
    if x >= STIRLING_MIN {
        return gamma_large(x);
    }
    if x < 1e-8 {
        return gamma_positive(x + 1.0) / x;
    }
    let (y, prod) = shift_up(x);
    gamma_large(y) / prod
}

pub fn gamma_real(x: f64) -> GammaValue {
    if is_gamma_pole(x) || x.is_nan() {
        return GammaValue { value: f64::NAN, is_pole: !x.is_nan() };
    }
    let value = if x > 0.0 {
        gamma_positive(x)
    } else {
        PI / (sin_pi(x) * gamma_positive(1.0 - x))
    };
    GammaValue { value, is_pole: false }
}

/// 1/Γ(x), exactly zero at the poles of Γ.
pub fn recip_gamma(x: f64) -> f64 {
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x > 0.0 {
        if x > GAMMA_OVERFLOW {
            return (-log_gamma_stirling(x)).exp();
        }
        return 1.0 / gamma_positive(x);
    }
    let w = 1.0 - x;
    if w > GAMMA_OVERFLOW {
        return sin_pi(x) / PI * log_gamma_stirling(w).exp();
    }
    sin_pi(x) * gamma_positive(w) / PI
}

/// (ln|Γ(x)|, sign Γ(x)) for any non-pole x.
pub fn ln_abs_gamma(x: f64) -> Result<(f64, f64)> {
    if is_gamma_pole(x) {
        return Err(domain(format!("Γ has a pole at {x}")));
    }
    if x > 0.0 {
        return Ok((log_gamma_real(x)?, 1.0));
    }
    let s = sin_pi(x);
    Ok((PI.ln() - s.abs().ln() - log_gamma_real(1.0 - x)?, s.signum()))
}

/// ψ(x) for any non-pole x.
pub fn digamma(x: f64) -> Result<f64> {
    if is_gamma_pole(x) || x.is_nan() {
        return Err(domain(format!("digamma has a pole at {x}")));
    }
    if x < 0.0 {
        // ψ(x) = ψ(1−x) − π cot(πx)
        return Ok(digamma(1.0 - x)? - PI * cos_pi(x) / sin_pi(x));
    }
    let mut y = x;
    let mut acc = 0.0;
    while y < STIRLING_MIN {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut pow = inv2;
    let mut tail = 0.0;
    for n in 1..=STIRLING_TERMS {
        tail += bernoulli_f64(2 * n) / (2 * n) as f64 * pow;
        pow *= inv2;
    }
    Ok(acc + y.ln() - 0.5 / y - tail)
}

/// ψ^{(n)}(x) for n ≥ 1 and x > 0.
pub fn polygamma(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return digamma(x);
    }
    if !(x > 0.0) {
        return Err(domain(format!("polygamma needs x > 0, got {x}")));
    }
    polygamma_any(n, x)
}

/// ψ^{(n)}(x) for n ≥ 1 at any non-pole x, by recurrence to x ≥ n + 15 and the asymptotic series.
pub(crate) fn polygamma_any(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return digamma(x);
    }
    if is_gamma_pole(x) || x.is_nan() {
        return Err(domain(format!("polygamma has a pole at {x}")));
    }
    let threshold = n as f64 + 15.0;
    let np1 = (n + 1) as i32;
    let mut y = x;
    let mut direct = 0.0;
    while y < threshold {
        direct += y.powi(-np1);
        y += 1.0;
    }
    let nf = factorial(n);
    // (−1)^{n+1}[(n−1)!/y^n + n!/(2y^{n+1}) + Σ B_{2k}(2k+n−1)!/((2k)! y^{2k+n})]
    let mut asym = factorial(n - 1) / y.powi(n as i32) + 0.5 * nf / y.powi(np1);
    let inv2 = 1.0 / (y * y);
    // ratio (2k+n−1)!/(2k)! built incrementally
    let mut ratio = nf / 2.0; // k = 1: (n+1)!/2!
    ratio *= (n + 1) as f64;
    let mut pow = y.powi(-(n as i32)) * inv2;
    for k in 1..=12 {
        if k > 1 {
            let kk = 2 * k;
            ratio *= ((kk + n - 2) * (kk + n - 1)) as f64 / ((kk - 1) * kk) as f64;
        }
        asym += bernoulli_f64(2 * k) * ratio * pow;
        pow *= inv2;
    }
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * (asym + nf * direct))
}

/// Taylor coefficients of 1/Γ(1+v) about v = 0.
const RG_TAYLOR: [f64; 90] = [
    1.00000000000000000000e+00,
    5.77215664901532865549e-01,
    -6.55878071520253902449e-01,
    -4.20026350340952370210e-02,
    1.66538611382291479313e-01,
    -4.21977345555443333902e-02,
    -9.62197152787697303211e-03,
    7.21894324666309990246e-03,
    -1.16516759185906516871e-03,
    -2.15241674114950975192e-04,
    1.28050282388116195512e-04,
    -2.01348547807882386862e-05,
    -1.25049348214267063072e-06,
    1.13302723198169592860e-06,
    -2.05633841697760707339e-07,
    6.11609510448141608721e-09,
    5.00200764446922294544e-09,
    -1.18127457048702004406e-09,
    1.04342671169110053979e-10,
    7.78226343990507081432e-12,
    -3.69680561864220597869e-12,
    5.10037028745447575372e-13,
    -2.05832605356650663575e-14,
    -5.34812253942301782029e-15,
    1.22677862823826084089e-15,
    -1.18125930169745883374e-16,
    1.18669225475160037462e-18,
    1.41238065531803185733e-18,
    -2.29874568443537021993e-19,
    1.71440632192733742815e-20,
    1.33735173049369308843e-22,
    -2.05423355176667282618e-22,
    2.73603004860800013082e-23,
    -1.73235644591051646365e-24,
    -2.36061902449928716132e-26,
    1.86498294171729434297e-26,
    -2.21809562420719727250e-27,
    1.29778197494799370208e-28,
    1.18069747496652841041e-30,
    -1.12458434927708807011e-30,
    1.27708517514086609863e-31,
    -7.39145116961514100460e-33,
    1.13475025755421581075e-35,
    4.63913464105872200390e-35,
    -5.34733681843919864395e-36,
    3.20799592361335242260e-37,
    -4.44582973655075665993e-39,
    -1.31117451888198878069e-39,
    1.64703335254381391752e-40,
    -1.05623317850358118304e-41,
    2.67844298264304937565e-43,
    2.42471549485178276474e-44,
    -3.73658783453561267926e-45,
    2.62833298094019528487e-46,
    -9.29817599537688651279e-48,
    -2.32794241869947056569e-49,
    6.16962083524438710954e-50,
    -4.92829558677099005274e-51,
    2.18351318341451064794e-52,
    -1.21872218914751657411e-54,
    -7.11710884166287520045e-55,
    6.92050405432868958900e-56,
    -3.67643846835667657286e-57,
    8.56309805627565441924e-59,
    4.96304542836684448474e-60,
    -7.15429457708161556726e-61,
    4.55172768908850415698e-62,
    -1.61839930532029434831e-63,
    -3.81804342439995000295e-66,
    5.18505241190584865575e-66,
    -4.16713680922392075842e-67,
    1.91629069293738888071e-68,
    -3.80892813246836568558e-70,
    -2.20638610559241202736e-71,
    2.77223109600989562025e-72,
    -1.59876604781001807982e-73,
    5.31973078041740293312e-75,
    -8.05174614168423920477e-78,
    -1.24846298102637952036e-77,
    9.64318876839922332054e-79,
    -4.28279804830174771939e-80,
    9.50871423690304453960e-82,
    2.71313921386943824510e-83,
    -4.09687794150691556434e-84,
    2.37429800197401608104e-85,
    -8.27708902100727812353e-87,
    9.07249760942664592703e-89,
    1.06455581950269859247e-89,
    -9.28533561960375490669e-91,
    4.33331359272036718604e-92,
];

/// d^j/du^j 1/Γ(u) at u = x for j = 0..=jmax.
///
/// Re-expands the Taylor series of 1/Γ(1+v) about the nearest point x − m with m an integer and
/// multiplies by the rational factor linking Γ(x+u) to Γ(x−m+u). The textbook recurrence
/// g^{(j+1)} = −Σ C(j,i) ψ^{(i)} g^{(j−i)} cancels catastrophically (roughly j! relative to the
/// result) and is not used.
pub fn recip_gamma_derivs(x: f64, jmax: usize) -> Result<Vec<f64>> {
    if is_gamma_pole(x) || !x.is_finite() {
        return Err(domain(format!("recip_gamma_derivs is not defined at {x}")));
    }
    if jmax > MAX_RECIP_GAMMA_DERIV {
        return Err(domain(format!("recip_gamma_derivs supports orders up to {MAX_RECIP_GAMMA_DERIV}")));
    }
    let m = (x - 1.0).round();
    let f = x - 1.0 - m;
    let n_coef = RG_TAYLOR.len();
    // e_j = Σ_{k≥j} d_k C(k,j) f^{k−j}, evaluated Horner-style per j.
    let mut coef = vec![0.0; jmax + 1];
    for (j, c) in coef.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in (j..n_coef).rev() {
            acc = acc * f + RG_TAYLOR[k] * crate::combinatorics::binomial(k, j);
        }
        *c = acc;
    }
    if m > 0.0 {
        // 1/Γ(x+u) = 1/Γ(1+f+u) · Π_{i=1}^{m} 1/(f+i+u)
        for i in 1..=(m as usize) {
            let c = f + i as f64;
            let mut prev = 0.0;
            for e in coef.iter_mut() {
                let next = (*e - prev) / c;
                *e = next;
                prev = next;
            }
        }
    } else if m < 0.0 {
        // 1/Γ(x+u) = Π_{i=0}^{|m|−1}(x+i+u) · 1/Γ(1+f+u)
        for i in 0..((-m) as usize) {
            let c = x + i as f64;
            for j in (0..=jmax).rev() {
                let lower = if j > 0 { coef[j - 1] } else { 0.0 };
                coef[j] = c * coef[j] + lower;
            }
        }
    }
    let mut fact = 1.0;
    for (j, c) in coef.iter_mut().enumerate() {
        if j > 0 {
            fact *= j as f64;
        }
        *c *= fact;
    }
    Ok(coef)
}

/// Regularized lower incomplete gamma P(s, x).
pub fn incomplete_gamma_p(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !(x >= 0.0) {
        return Err(domain(format!("incomplete_gamma_p needs s > 0 and x >= 0, got ({s}, {x})")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let log_prefix = -x + s * x.ln() - log_gamma_real(s)?;
    if x < s + 1.0 {
        let mut term = 1.0 / s;
        let mut sum = term;
        let mut ap = s;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        Ok((sum * log_prefix.exp()).min(1.0))
    } else {
        Ok((1.0 - upper_gamma_cf(s, x) * log_prefix.exp()).max(0.0))
    }
}

/// Continued fraction for Γ(s,x)/(e^{−x} x^s), modified Lentz.
fn upper_gamma_cf(s: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..20_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    h
}

/// Scaled complementary error function e^{x²}·erfc(x).
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // e^{x²}(2 − erfc|x|)
        let ax = -x;
        return 2.0 * (ax * ax).exp() - erfcx(ax);
    }
    if x < 0.5 {
        return (x * x).exp() * (1.0 - erf_series(x));
    }
    if x > 1e8 {
        return FRAC_1_SQRT_PI / x;
    }
    // erfc(x) = Γ(½, x²)/√π = e^{−x²}·x·CF/√π
    x * upper_gamma_cf(0.5, x * x) * FRAC_1_SQRT_PI
}

/// erf(x) = (2/√π) e^{−x²} Σ 2^n x^{2n+1}/(1·3·…·(2n+1)); every term is positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= 2.0 * x2 / (2 * n + 1) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    2.0 * FRAC_1_SQRT_PI * (-x2).exp() * sum
}

pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 0.5 {
        return 1.0 - erf_series(x);
    }
    if x > 27.3 {
        return 0.0;
    }
    erfcx(x) * (-x * x).exp()
}

pub fn erf(x: f64) -> f64 {
    if x.abs() < 0.5 {
        return x.signum() * erf_series(x.abs());
    }
    1.0 - erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureConfig};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma_real(1.0).unwrap().abs() < 1e-14);
        assert!(log_gamma_real(2.0).unwrap().abs() < 1e-14);
        assert!(rel(log_gamma_real(0.5).unwrap(), 0.5 * PI.ln()) < 1e-14);
        let nine_fact: f64 = (1..=9).map(|k| k as f64).product();
        assert!(rel(log_gamma_real(10.0).unwrap(), nine_fact.ln()) < 1e-14);
        assert!(log_gamma_real(0.0).is_err());
        assert!(log_gamma_real(-1.5).is_err());
        assert!(rel(log_gamma_real(1e-300).unwrap(), 300.0 * 10f64.ln()) < 1e-14);
    }

    #[test]
    fn gamma_examples() {
        assert!(rel(gamma_real(5.0).value, 24.0) < 1e-15);
        assert!(rel(gamma_real(-0.5).value, -2.0 * PI.sqrt()) < 1e-14);
        let pole = gamma_real(-3.0);
        assert!(pole.is_pole && pole.value.is_nan());
        assert!(gamma_real(0.0).is_pole);
        assert_eq!(gamma_real(172.0).value, f64::INFINITY);
        assert!(!gamma_real(172.0).is_pole);
        let f170: f64 = (1..170).map(|k| k as f64).product();
        assert!(rel(gamma_real(170.0).value, f170) < 1e-14);
        for n in 1..25 {
            let f: f64 = (1..n).map(|k| k as f64).product();
            assert!(rel(gamma_real(n as f64).value, f) < 4e-16 * 4.0, "n={n}");
        }
    }

    #[test]
    fn recip_gamma_examples() {
        assert_eq!(recip_gamma(-2.0), 0.0);
        assert_eq!(recip_gamma(0.0), 0.0);
        assert!(rel(recip_gamma(1.0), 1.0) < 2e-15);
        assert!(rel(recip_gamma(0.5), 1.0 / PI.sqrt()) < 1e-15);
        assert!(recip_gamma(175.0) > 0.0 && recip_gamma(175.0) < 1e-310);
        assert_eq!(recip_gamma(400.0), 0.0);
        assert!(rel(recip_gamma(-0.5), -0.5 / PI.sqrt()) < 1e-15);
    }

    #[test]
    fn digamma_examples() {
        assert!(rel(digamma(1.0).unwrap(), -EULER_GAMMA) < 4e-15);
        assert!(rel(digamma(2.0).unwrap(), 1.0 - EULER_GAMMA) < 1e-14);
        assert!(rel(digamma(0.5).unwrap(), -EULER_GAMMA - 2.0 * 2f64.ln()) < 1e-14);
        assert!(digamma(-2.0).is_err());
        // ψ(−0.5) = ψ(0.5) + 2
        assert!(rel(digamma(-0.5).unwrap(), -EULER_GAMMA - 2.0 * 2f64.ln() + 2.0) < 1e-13);
    }

    fn zeta_direct(s: i32) -> f64 {
        let n = 1_000_000;
        let mut sum = 0.0;
        for k in (1..=n).rev() {
            sum += (k as f64).powi(-s);
        }
        // integral tail ∫_N^∞ t^{-s} dt − f(N)/2
        let nf = n as f64;
        sum + nf.powi(1 - s) / (s - 1) as f64 - 0.5 * nf.powi(-s)
    }

    #[test]
    fn polygamma_examples() {
        let z2 = zeta_direct(2);
        let z3 = zeta_direct(3);
        assert!(rel(polygamma(1, 1.0).unwrap(), z2) < 1e-10);
        assert!(rel(polygamma(2, 1.0).unwrap(), -2.0 * z3) < 1e-10);
        assert!(rel(polygamma(1, 2.0).unwrap(), PI * PI / 6.0 - 1.0) < 1e-12);
        assert!(polygamma(1, 0.0).is_err());
        assert!(rel(polygamma(0, 1.0).unwrap(), -EULER_GAMMA) < 4e-15);
        // ψ^{(n)}(1) = (−1)^{n+1} n! ζ(n+1); ζ(11) from direct summation
        let z11: f64 = (1..2000).map(|k| (k as f64).powi(-11)).sum();
        assert!(rel(polygamma(10, 1.0).unwrap(), -factorial(10) * z11) < 1e-12);
        // large order stays accurate: ψ^{(30)}(1) = 30! ζ(31)
        let z31: f64 = (1..100).map(|k| (k as f64).powi(-31)).sum();
        assert!(rel(polygamma(30, 1.0).unwrap(), -factorial(30) * z31) < 1e-12);
    }

    #[test]
    fn recip_gamma_derivs_examples() {
        let h = 1e-5;
        let fd = |x: f64| (recip_gamma(x + h) - recip_gamma(x - h)) / (2.0 * h);
        let g = recip_gamma_derivs(1.0, 1).unwrap();
        assert!(rel(g[0], 1.0) < 1e-15);
        assert!(rel(g[1], EULER_GAMMA) < 1e-14);
        assert!((g[1] - fd(1.0)).abs() < 1e-9);
        let g = recip_gamma_derivs(2.0, 1).unwrap();
        assert!(rel(g[1], EULER_GAMMA - 1.0) < 1e-14);
        assert!((g[1] - fd(2.0)).abs() < 1e-9);
        assert!(recip_gamma_derivs(-1.0, 3).is_err());
        assert!(recip_gamma_derivs(1.0, 61).is_err());
    }

    #[test]
    fn recip_gamma_derivs_match_psi_recurrence_at_low_order() {
        // g' = −ψ g, g'' = (ψ² − ψ') g, g''' = (−ψ³ + 3ψψ' − ψ'') g
        for x in [0.3, 1.7, 4.2, 12.5, -0.4, -3.7] {
            let g = recip_gamma_derivs(x, 3).unwrap();
            let r = recip_gamma(x);
            let p0 = digamma(x).unwrap();
            let p1 = polygamma_any(1, x).unwrap();
            let p2 = polygamma_any(2, x).unwrap();
            let want = [r, -p0 * r, (p0 * p0 - p1) * r, (-p0 * p0 * p0 + 3.0 * p0 * p1 - p2) * r];
            for j in 0..4 {
                let scale = want[j].abs().max(r.abs());
                assert!((g[j] - want[j]).abs() <= 1e-11 * scale, "x={x} j={j}: {} vs {}", g[j], want[j]);
            }
        }
    }

    #[test]
    fn recip_gamma_derivs_high_order_by_cauchy_integral() {
        // g^{(j)}(x) = j!/(2π) ∫ 1/Γ(x + r e^{iθ}) r^{−j} e^{−ijθ} dθ with 1/Γ on the circle from
        // the entire series about x itself: compare two centres instead.
        // Shift consistency: 1/Γ(u) = (u)·1/Γ(u+1) ⇒ g_x^{(j)} = x g_{x+1}^{(j)} + j g_{x+1}^{(j−1)}.
        for x in [0.75, 2.3, 7.9] {
            let a = recip_gamma_derivs(x, 40).unwrap();
            let b = recip_gamma_derivs(x + 1.0, 40).unwrap();
            for j in 1..=40 {
                let want = x * b[j] + j as f64 * b[j - 1];
                let scale = (x * b[j]).abs().max((j as f64 * b[j - 1]).abs());
                assert!((a[j] - want).abs() <= 1e-11 * scale, "x={x} j={j}");
            }
        }
    }

    #[test]
    fn incomplete_gamma_examples() {
        let cfg = QuadratureConfig::default();
        assert!(rel(incomplete_gamma_p(1.0, 1.0).unwrap(), 1.0 - (-1.0f64).exp()) < 1e-14);
        assert_eq!(incomplete_gamma_p(2.5, 0.0).unwrap(), 0.0);
        let erf1 = integrate_finite(|u| Complex64::new((-u * u).exp(), 0.0), 0.0, 1.0, &cfg).unwrap().value.re * 2.0
            / PI.sqrt();
        assert!(rel(incomplete_gamma_p(0.5, 1.0).unwrap(), erf1) < 1e-13);
        // continued-fraction branch: P(0.5, 9) = erf(3)
        let erfc3 = integrate_semi_infinite(|t| Complex64::new((-(3.0 + t) * (3.0 + t)).exp(), 0.0), 6.0, &cfg)
            .unwrap()
            .value
            .re
            * 2.0
            / PI.sqrt();
        assert!(rel(1.0 - incomplete_gamma_p(0.5, 9.0).unwrap(), erfc3) < 1e-9);
        assert!(incomplete_gamma_p(0.0, 1.0).is_err());
        assert!(incomplete_gamma_p(1.0, -1.0).is_err());
    }

    #[test]
    fn erfc_examples() {
        let cfg = QuadratureConfig::default();
        let tail = |x: f64| {
            integrate_semi_infinite(|t| Complex64::new((-(x + t) * (x + t)).exp(), 0.0), 2.0 * x.max(1.0), &cfg)
                .unwrap()
                .value
                .re
                * 2.0
                / PI.sqrt()
        };
        assert_eq!(erfc(0.0), 1.0);
        assert!(rel(erfc(1.0), tail(1.0)) < 1e-13);
        for x in [0.3, 0.5, 0.7, 1.5, 2.0, 3.0, 5.0, 8.0] {
            assert!(rel(erfc(x), tail(x)) < 1e-12, "x={x}: {} vs {}", erfc(x), tail(x));
        }
        assert_eq!(erfc(40.0), 0.0);
        assert!(rel(erfc(-1.0), 2.0 - erfc(1.0)) < 1e-16);
        assert!(rel(erfcx(30.0), 0.018_795_888_861_416_75) < 1e-13);
    }

    #[test]
    fn euler_integral_reproduces_gamma() {
        let cfg = QuadratureConfig::default();
        for s in [0.5, 1.0, 2.5, 5.0] {
            let r = if s < 1.0 {
                crate::quadrature::integrate_semi_infinite_singular(|t| Complex64::new(t.powf(s - 1.0) * (-t).exp(), 0.0), 1.0, s - 1.0, &cfg)
            } else {
                integrate_semi_infinite(|t| Complex64::new(t.powf(s - 1.0) * (-t).exp(), 0.0), 1.0, &cfg)
            }
            .unwrap();
            assert!(rel(r.value.re, gamma_real(s).value) < 1e-10, "s={s}");
        }
    }

    #[test]
    fn stirling_bound_on_grid() {
        for i in 0..2000 {
            let x = 0.1 + (100.0 - 0.1) * i as f64 / 1999.0;
            let base = (x - 0.5) * x.ln() - x + LN_SQRT_2PI;
            let lg = log_gamma_real(x).unwrap();
            assert!(base < lg && lg < base + 1.0 / (12.0 * x), "x={x}");
        }
    }

    #[test]
    fn sin_pi_exact_zeros() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-7.0), 0.0);
        assert_eq!(cos_pi(0.5), 0.0);
        assert!((sin_pi(0.25) - (PI / 4.0).sin()).abs() < 1e-16);
        assert!((sin_pi(-1.25) - (-1.25 * PI).sin()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn functional_equation(x in 0.001f64..50.0) {
            let g1 = gamma_real(x + 1.0).value;
            prop_assert!((g1 - x * gamma_real(x).value).abs() / g1 <= 1e-12);
        }

        #[test]
        fn reflection(x in 0.001f64..0.999) {
            prop_assume!((x - 0.5).abs() > 1e-3);
            let v = gamma_real(x).value * gamma_real(1.0 - x).value * sin_pi(x) / PI;
            prop_assert!((v - 1.0).abs() <= 1e-11);
        }

        #[test]
        fn duplication(x in 0.1f64..20.0) {
            let lhs = gamma_real(2.0 * x).value;
            let rhs = (2.0 * PI).powf(-0.5) * 2f64.powf(2.0 * x - 0.5) * gamma_real(x).value * gamma_real(x + 0.5).value;
            prop_assert!(rel(lhs, rhs) <= 1e-11);
        }

        #[test]
        fn digamma_is_derivative_of_log_gamma(x in 0.5f64..20.0) {
            let h = 1e-5 * x;
            let fd = (log_gamma_real(x + h).unwrap() - log_gamma_real(x - h).unwrap()) / (2.0 * h);
            prop_assert!((fd - digamma(x).unwrap()).abs() <= 1e-6 * digamma(x).unwrap().abs().max(1.0));
        }

        #[test]
        fn polygamma_recurrence(n in 1usize..8, x in 0.2f64..30.0) {
            // ψ^{(n)}(x+1) = ψ^{(n)}(x) + (−1)^n n!/x^{n+1}
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = polygamma(n, x + 1.0).unwrap();
            let rhs = polygamma(n, x).unwrap() + sign * factorial(n) / x.powi(n as i32 + 1);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * polygamma(n, x).unwrap().abs());
        }

        #[test]
        fn incomplete_gamma_recursion(s in 0.1f64..20.0, x in 0.01f64..40.0) {
            // P(s+1, x) = P(s, x) − x^s e^{−x}/Γ(s+1)
            let lhs = incomplete_gamma_p(s + 1.0, x).unwrap();
            let rhs = incomplete_gamma_p(s, x).unwrap() - (s * x.ln() - x - log_gamma_real(s + 1.0).unwrap()).exp();
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }
}
