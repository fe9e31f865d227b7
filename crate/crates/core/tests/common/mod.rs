//! Shared test support: an arbitrary-precision direct-summation oracle for E_{a,b}.
#![allow(dead_code)]

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;

/// Largest |z|^{1/a} for which summation is attempted; beyond it the peak term and the
/// term count make ≥50-digit summation impractical.
pub const MAX_ORACLE_SCALE: f64 = 2500.0;

/// Target precision of the oracle sum in bits (about 60 digits).
const TARGET_BITS: u32 = 200;

struct Sum {
    re: Float,
    im: Float,
    /// log2 of the largest term over log2 of the result.
    loss_bits: i64,
}

fn log2_abs(x: &Float) -> i64 {
    x.get_exp().map(i64::from).unwrap_or(i64::MIN / 4)
}

fn sum_at(a: f64, b: f64, z: Complex64, prec: u32) -> Option<Sum> {
    let zr = Float::with_val(prec, z.re);
    let zi = Float::with_val(prec, z.im);
    let mut pr = Float::with_val(prec, 1);
    let mut pi = Float::with_val(prec, 0);
    let mut re = Float::with_val(prec, 0);
    let mut im = Float::with_val(prec, 0);
    let mut max_term = i64::MIN / 4;
    let mut quiet = 0;
    let scale = z.norm().powf(1.0 / a);
    let peak = (scale / a).ceil() as usize + 10;
    for k in 0..5_000_000usize {
        let x = Float::with_val(prec, a) * k as u64 + Float::with_val(prec, b);
        let pole = x <= 0 && x.is_integer();
        if !pole {
            let g = Float::with_val(prec, x.gamma_ref());
            let tr = Float::with_val(prec, &pr / &g);
            let ti = Float::with_val(prec, &pi / &g);
            let mag = log2_abs(&tr).max(log2_abs(&ti));
            max_term = max_term.max(mag);
            re += &tr;
            im += &ti;
            let total = log2_abs(&re).max(log2_abs(&im));
            if k > peak && b + a * k as f64 > 2.0 && (tr.is_zero() && ti.is_zero() || mag < total - prec as i64 - 8) {
                quiet += 1;
                if quiet >= 3 {
                    return Some(Sum { loss_bits: max_term - total, re, im });
                }
            } else {
                quiet = 0;
            }
        }
        let nr = Float::with_val(prec, &pr * &zr) - Float::with_val(prec, &pi * &zi);
        let ni = Float::with_val(prec, &pr * &zi) + Float::with_val(prec, &pi * &zr);
        pr = nr;
        pi = ni;
    }
    None
}

/// Σ z^k/Γ(b+ak) summed in MPFR with enough working precision to keep at least 200 correct
/// bits after cancellation, rounded to binary64. None when the point is out of reach.
///
/// Returns the value even when it over- or underflows binary64, as ±inf or 0.
pub fn ml_oracle(a: f64, b: f64, z: Complex64) -> Option<Complex64> {
    if z.norm().powf(1.0 / a) > MAX_ORACLE_SCALE {
        return None;
    }
    let mut prec = TARGET_BITS + 64;
    for _ in 0..4 {
        let s = sum_at(a, b, z, prec)?;
        let needed = TARGET_BITS as i64 + s.loss_bits.max(0) + 32;
        if (prec as i64) >= needed {
            return Some(Complex64::new(s.re.to_f64(), s.im.to_f64()));
        }
        prec = needed as u32 + 64;
    }
    None
}

/// π at binary64, via MPFR, as a sanity hook for the oracle plumbing.
pub fn mpfr_pi() -> f64 {
    Float::with_val(64, Constant::Pi).to_f64()
}

/// e^{x²} erfc(x) in MPFR at 200 bits, rounded to binary64.
pub fn erfcx_oracle(x: f64) -> f64 {
    let v = Float::with_val(200, x);
    let sq = Float::with_val(200, &v * &v);
    (sq.exp() * v.erfc()).to_f64()
}
