//! The two-parameter Mittag-Leffler function E_{a,b}(z) = Σ_k z^k / Γ(b + a k).
//!
//! [`ml_eval`] picks a representation by region; the individual representations are public
//! so callers and tests can cross-check them.

mod asymptotic;
mod closed_form;
mod dispatch;
mod integral;
mod reduce;
mod taylor;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{domain, Result};

pub use asymptotic::{k_opt, ml_asymptotic, ml_asymptotic_auto, optimal_terms};
pub use closed_form::ml_closed_form;
pub use dispatch::{hadamard_series, ml_eval, ml_eval_with, r_taylor, z_asym};
pub use integral::{ml_integral_rep, ml_neg_real};
pub use reduce::{ml_reduce_a, ml_shift_b};
pub use taylor::ml_taylor;

/// Half-width of the exclusion band around the critical rays |arg z| = aπ.
pub const DELTA_RAY: f64 = 0.05 * PI;
/// Below this `a` the series is summed through the small-a expansion.
pub const SMALL_A: f64 = 1e-4;
/// Partial-sum-to-result ratio above which a summation is reported as cancelling.
pub const MAX_CANCELLATION: f64 = 1e8;
/// Tolerance used when the caller has no opinion.
pub const DEFAULT_TOL: f64 = 1e-14;

/// The (a, b) pair of E_{a,b}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    a: f64,
    b: f64,
}

impl MLParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || a < 0.0 {
            return Err(domain(format!("a must be finite and non-negative, got {a}")));
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

    /// Same a, different b.
    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(self.a, b)
    }
}

/// Which representation produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    Taylor,
    ClosedForm,
    IntegralRep,
    NegRealIntegral,
    CyclotomicReduction,
    BShift,
    Asymptotic,
    Geometric,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::Taylor => "Taylor",
            MethodTag::ClosedForm => "ClosedForm",
            MethodTag::IntegralRep => "IntegralRep",
            MethodTag::NegRealIntegral => "NegRealIntegral",
            MethodTag::CyclotomicReduction => "CyclotomicReduction",
            MethodTag::BShift => "BShift",
            MethodTag::Asymptotic => "Asymptotic",
            MethodTag::Geometric => "Geometric",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value of E_{a,b} together with an error estimate (not a bound) and its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_err_est: f64,
    pub method: MethodTag,
}

impl EvalResult {
    pub(crate) fn new(value: Complex64, abs_err_est: f64, method: MethodTag) -> Self {
        Self { value, abs_err_est, method }
    }

    /// abs_err_est / |value|, infinite for a zero value with non-zero error.
    pub fn rel_err_est(&self) -> f64 {
        let mag = self.value.norm();
        if mag > 0.0 {
            self.abs_err_est / mag
        } else if self.abs_err_est == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Maps a signed zero imaginary part to +0 so that arg z ∈ (−π, π].
pub(crate) fn principal(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Distance of |arg z| from the nearest critical ray |arg z + 2πk| = aπ.
pub(crate) fn ray_distance(a: f64, z: Complex64) -> f64 {
    let theta = principal(z).arg().abs();
    let mut best = f64::INFINITY;
    let mut k = 0.0;
    // Rays sit at aπ − 2πk for the k that can matter when a < 2.
    while k <= 1.0 {
        best = best.min((theta + 2.0 * PI * k - a * PI).abs());
        best = best.min((2.0 * PI * k - theta - a * PI).abs());
        k += 1.0;
    }
    best
}

pub(crate) use exp_polar as exp_polar_pub;

/// exp(ln_mag + i·phase) without forming the possibly overflowing modulus first.
pub(crate) fn exp_polar(ln_mag: f64, phase: f64) -> Complex64 {
    let m = ln_mag.exp();
    Complex64::new(m * phase.cos(), m * phase.sin())
}
