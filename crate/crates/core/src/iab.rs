//! The companion integral I_{a,b}(z) = ∫_0^∞ z^u / Γ(b + a u) du, the continuous analogue
//! of the Mittag-Leffler series, and the Euler-Maclaurin bridge between the two.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, precondition, MlError, Result};
use crate::gamma::{cos_pi, recip_gamma, recip_gamma_derivs, sin_pi, MAX_RECIP_GAMMA_DERIV};
use crate::ml::{exp_polar_pub as exp_polar, EvalResult, MethodTag};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, QuadratureConfig};

/// Width of the band |Re z^{1/a}| ≤ δ where the contour representation is not used.
pub const IAB_RAY_DELTA: f64 = 0.02;

/// The (a, b) pair of I_{a,b}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IabParams {
    a: f64,
    b: f64,
}

impl IabParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(domain(format!("I_(a,b) needs finite a > 0, got {a}")));
        }
        if !b.is_finite() {
            return Err(domain(format!("b must be finite, got {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

fn check_disk(z: Complex64) -> Result<()> {
    let r = z.norm();
    if !(r > 0.0 && r < 1.0) {
        return Err(precondition(format!("needs 0 < |z| < 1, got |z| = {r}")));
    }
    Ok(())
}

/// Direct quadrature of the defining integral, z^u = e^{u ln z} on the principal branch.
/// On the negative axis this is the split |z|^u (cos πu + i sin πu).
pub fn iab_quadrature(p: IabParams, z: Complex64, cfg: QuadratureConfig) -> Result<EvalResult> {
    check_disk(z)?;
    let ln_z = Complex64::new(z.norm().ln(), z.arg());
    let (a, b) = (p.a, p.b);
    let q = integrate_semi_infinite(|u: f64| (ln_z * u).exp() * recip_gamma(b + a * u), -ln_z.re, &cfg)?;
    let mut err = q.err_est + 4.0 * f64::EPSILON * q.value.norm();
    if !q.converged {
        err = err.max(cfg.rel_tol * q.value.norm());
    }
    Ok(EvalResult::new(q.value, err, MethodTag::IntegralRep))
}

/// −(1/ln z) Σ_j (d^j/db^j 1/Γ(b)) (−a/ln z)^j, stopped at its smallest term.
pub fn iab_series(p: IabParams, z: Complex64, terms: usize) -> Result<EvalResult> {
    check_disk(z)?;
    let ln_z = Complex64::new(z.norm().ln(), z.arg());
    let x = -p.a / ln_z;
    let q = x.norm();
    if !(q < 1.0) {
        return Err(precondition(format!("series needs |a/ln z| < 1, got {q}")));
    }
    let terms = terms.min(MAX_RECIP_GAMMA_DERIV);
    let g = recip_gamma_derivs(p.b, terms)?;
    // Terms fluctuate in size, so the cut is placed at the smallest term seen, once two
    // consecutive terms are negligible or the terms have clearly started to grow.
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    let mut best = (f64::INFINITY, sum);
    let mut prev = f64::INFINITY;
    for gj in g.iter() {
        let t = pow * *gj;
        let mag = t.norm();
        if mag <= best.0 {
            best = (mag, sum);
        }
        sum += t;
        if mag.max(prev) <= 0.25 * f64::EPSILON * sum.norm() {
            best = (mag, sum);
            break;
        }
        if mag > 1e3 * best.0 {
            break;
        }
        prev = mag;
        pow *= x;
    }
    let (tail, sum) = best;
    let value = -sum / ln_z;
    let err = tail / ln_z.norm() + 4.0 * f64::EPSILON * value.norm();
    Ok(EvalResult::new(value, err, MethodTag::Taylor))
}

/// The branch point z^{1/a} taken as e^{(ln z)/a} and its unreduced argument arg(z)/a.
fn lambda(a: f64, z: Complex64) -> (Complex64, f64) {
    let phi = z.arg() / a;
    (Complex64::from_polar(z.norm().powf(1.0 / a), phi), phi)
}

/// ∫_{−∞}^{∞} e^{−λe^t} e^{(1−b)t} ((sin bπ/π) t + cos bπ)/(π² + t²) dt, the contour part of
/// the representation in the log variable t = ln x.
fn contour_part(lam: Complex64, b: f64, cfg: &QuadratureConfig) -> Result<(Complex64, f64)> {
    let sb = sin_pi(b) / PI;
    let cb = cos_pi(b);
    let h = |t: f64| -> Complex64 {
        let w = (sb * t + cb) / (PI * PI + t * t);
        (-lam * t.exp()).exp() * ((1.0 - b) * t).exp() * w
    };
    // t ≤ 0 through t = −u/(1−u); the integrand decays like e^{(1−b)t}/t or 1/t².
    let left = integrate_finite(
        |u: f64| {
            let s = 1.0 - u;
            h(-u / s) / (s * s)
        },
        0.0,
        1.0,
        cfg,
    )?;
    // t ≥ 0 until e^{−Re λ e^t} is negligible.
    let t_max = (800.0 / lam.re).ln().max(1.0);
    let mut breaks = vec![0.0];
    let mut t = 0.0;
    while t < t_max {
        t = (t + 0.5).min(t_max);
        breaks.push(t);
    }
    let right = crate::quadrature::integrate_breaks(h, &breaks, cfg)?;
    let total = left + right;
    let mut err = total.err_est;
    if !total.converged {
        err = err.max(cfg.rel_tol * total.value.norm());
    }
    Ok((total.value, err))
}

/// Contour representation, valid when Re z^{1/a} > 0 (with |arg z|/a < π/2) and b ≤ 1; b > 1
/// goes through the linear map I_{a,b}(z) = (1/a) z^{(1−b)/a} (I_{1,1}(λ) − ∫_0^{b−1} λ^v/Γ(1+v) dv).
///
/// For Re z^{1/a} ≤ δ the direct quadrature is used inside the unit disk; outside it the
/// point is reported as out of reach.
pub fn iab_rep(p: IabParams, z: Complex64, cfg: QuadratureConfig) -> Result<EvalResult> {
    if !(z.norm() > 0.0) {
        return Err(precondition("contour representation needs z != 0"));
    }
    let (a, b) = (p.a, p.b);
    let (lam, phi) = lambda(a, z);
    let inside = phi.abs() < 0.5 * PI;
    if !inside || lam.re <= IAB_RAY_DELTA {
        if z.norm() < 1.0 {
            return iab_quadrature(p, z, cfg);
        }
        if inside || lam.re.abs() <= IAB_RAY_DELTA {
            return Err(MlError::RayProximity);
        }
        return Err(precondition("contour representation needs Re z^(1/a) > 0 when |z| >= 1"));
    }
    let ln_z = Complex64::new(z.norm().ln(), z.arg());
    let beta = b.min(1.0);
    let (contour, c_err) = contour_part(lam, beta, &cfg)?;
    // e^{λ} kept separate from the prefactor so that large |λ| overflows only if the result does.
    let mut inner = lam.exp() + contour;
    let mut inner_err = c_err + 4.0 * f64::EPSILON * lam.norm() * lam.exp().norm();
    if b > 1.0 {
        let ln_lam = ln_z / a;
        let q = integrate_finite(|v: f64| (ln_lam * v).exp() * recip_gamma(1.0 + v), 0.0, b - 1.0, &cfg)?;
        inner -= q.value;
        inner_err += q.err_est;
    }
    let pref = exp_polar(((1.0 - b) / a) * ln_z.re - a.ln(), ((1.0 - b) / a) * ln_z.im);
    let value = pref * inner;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(MlError::Overflow(format!("I_(a,b) overflows at z = {z}")));
    }
    let err = pref.norm() * inner_err + 4.0 * f64::EPSILON * value.norm();
    Ok(EvalResult::new(value, err, MethodTag::IntegralRep))
}

/// I_{a,b}(z) by whichever representation fits: the series or quadrature for |z| < e^{−a}, the
/// contour form beyond (which itself falls back to quadrature near Re z^{1/a} = 0).
pub fn iab_eval(p: IabParams, z: Complex64, cfg: QuadratureConfig) -> Result<EvalResult> {
    let r = z.norm();
    if r == 0.0 {
        return Ok(EvalResult::new(Complex64::new(0.0, 0.0), 0.0, MethodTag::Taylor));
    }
    if r < (-p.a).exp() {
        let q = p.a / Complex64::new(r.ln(), z.arg()).norm();
        if q < 0.25 {
            if let Ok(s) = iab_series(p, z, MAX_RECIP_GAMMA_DERIV) {
                if s.abs_err_est <= cfg.rel_tol * s.value.norm() {
                    return Ok(s);
                }
            }
        }
        return iab_quadrature(p, z, cfg);
    }
    iab_rep(p, z, cfg)
}

/// E_{a,b}(z) ≈ z^m I_{a,b+ma}(z) + Σ_{l=0}^{m} z^l / Γ(b + la).
pub fn euler_maclaurin_e(p: IabParams, z: Complex64, m: usize) -> Result<EvalResult> {
    let r = z.norm();
    if !(r < 1.0) {
        return Err(precondition("Euler-Maclaurin bridge needs |z| < 1"));
    }
    if r == 0.0 {
        return Ok(EvalResult::new(Complex64::new(recip_gamma(p.b), 0.0), 0.0, MethodTag::Taylor));
    }
    let ln_z = Complex64::new(r.ln(), z.arg());
    if !((p.a / ln_z.norm()) < 1.0) {
        return Err(precondition("Euler-Maclaurin bridge needs |a/ln z| < 1"));
    }
    let shifted = IabParams::new(p.a, p.b + m as f64 * p.a)?;
    let cfg = QuadratureConfig::default();
    let i = iab_eval(shifted, z, cfg)?;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut zl = Complex64::new(1.0, 0.0);
    for l in 0..=m {
        sum += zl * recip_gamma(p.b + l as f64 * p.a);
        if l < m {
            zl *= z;
        }
    }
    let value = zl * i.value + sum;
    Ok(EvalResult::new(value, zl.norm() * i.abs_err_est + 4.0 * f64::EPSILON * value.norm(), MethodTag::Taylor))
}

/// I_{1/a,b}(z) from I_{a,b}(z^{a²}) · a².
pub fn iab_reciprocal_map(p: IabParams, z: Complex64, cfg: QuadratureConfig) -> Result<EvalResult> {
    let a = p.a;
    let zz = z.powf(a * a);
    let r = iab_eval(IabParams::new(a, p.b)?, zz, cfg)?;
    Ok(EvalResult::new(r.value * (a * a), r.abs_err_est * a * a, r.method))
}

/// I_{a,b}(z) from I_{α,b}(z^{α/a}) · α/a.
pub fn iab_linear_map(p: IabParams, alpha: f64, z: Complex64, cfg: QuadratureConfig) -> Result<EvalResult> {
    let r = iab_eval(IabParams::new(alpha, p.b)?, z.powf(alpha / p.a), cfg)?;
    let f = alpha / p.a;
    Ok(EvalResult::new(r.value * f, r.abs_err_est * f, r.method))
}
