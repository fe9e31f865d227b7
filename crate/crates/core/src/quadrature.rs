//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands on real intervals.
//!
//! Every integral in the crate funnels through [`integrate_finite`] or
//! [`integrate_semi_infinite`]. Integrable algebraic endpoint singularities are removed by a
//! change of variables when the caller declares the exponent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{precondition, Result};

/// Tolerances and work budget shared by all numeric integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-300, max_subdivisions: 2000 }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let cfg = Self { rel_tol, abs_tol, max_subdivisions };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) || self.max_subdivisions < 1 {
            return Err(precondition("quadrature config needs rel_tol > 0, abs_tol >= 0, max_subdivisions >= 1"));
        }
        Ok(())
    }

    /// Same budget with a different relative tolerance.
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        Self { rel_tol, ..self }
    }

    fn target(&self, value: f64) -> f64 {
        (self.rel_tol * value).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub err_est: f64,
    /// False when the subdivision budget ran out first. `value` is still the best estimate.
    pub converged: bool,
}

impl std::ops::Add for QuadResult {
    type Output = QuadResult;
    fn add(self, rhs: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + rhs.value,
            err_est: self.err_est + rhs.err_est,
            converged: self.converged && rhs.converged,
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.norm() * WGK[7];
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[7] = fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = f1;
        fv[14 - j] = f2;
        kronrod += (f1 + f2) * WGK[j];
        abs_sum += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }
    let resasc = asc * half.abs();
    let resabs = abs_sum * half.abs();
    let mut err = ((kronrod - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err < floor {
        err = floor;
    }
    if !kronrod.re.is_finite() || !kronrod.im.is_finite() {
        err = f64::INFINITY;
    }
    Panel { lo, hi, value: kronrod * half, err }
}

/// Global adaptive bisection over a set of initial panels.
fn adaptive<F: Fn(f64) -> Complex64>(f: &F, breaks: &[f64], cfg: &QuadratureConfig) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut frozen_value = Complex64::new(0.0, 0.0);
    let mut frozen_err = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(gk15(f, w[0], w[1]));
        }
    }
    let mut splits = 0;
    loop {
        let (value, err) = heap
            .iter()
            .fold((frozen_value, frozen_err), |(v, e), p| (v + p.value, e + p.err));
        if err <= cfg.target(value.norm()) || heap.is_empty() {
            return QuadResult { value, err_est: err, converged: true };
        }
        if splits >= cfg.max_subdivisions || !err.is_finite() && splits > 0 && heap.len() > 4 * cfg.max_subdivisions {
            return QuadResult { value, err_est: err, converged: false };
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi || (worst.hi - worst.lo) <= 4.0 * f64::EPSILON * mid.abs() {
            // Cannot refine further in binary64.
            frozen_value += worst.value;
            frozen_err += worst.err;
            continue;
        }
        heap.push(gk15(f, worst.lo, mid));
        heap.push(gk15(f, mid, worst.hi));
        splits += 1;
    }
}

/// ∫_lo^hi f(t) dt.
pub fn integrate_finite<F: Fn(f64) -> Complex64>(f: F, lo: f64, hi: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    integrate_breaks(f, &[lo, hi], cfg)
}

/// ∫ over consecutive breakpoints, which must be strictly increasing.
pub fn integrate_breaks<F: Fn(f64) -> Complex64>(f: F, breaks: &[f64], cfg: &QuadratureConfig) -> Result<QuadResult> {
    cfg.validate()?;
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks.iter().any(|b| !b.is_finite()) {
        return Err(precondition("integration bounds must be finite and increasing"));
    }
    Ok(adaptive(&f, breaks, cfg))
}

/// ∫_lo^hi f(t) dt where f(t) ~ (t − lo)^p near `lo`, p > −1.
///
/// Substitutes t = lo + u^{1/(1+p)} so the transformed integrand is bounded at u = 0.
pub fn integrate_finite_singular<F: Fn(f64) -> Complex64>(
    f: F,
    lo: f64,
    hi: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if !(p > -1.0) {
        return Err(precondition("endpoint exponent must exceed -1"));
    }
    if p >= 0.0 {
        return integrate_finite(f, lo, hi, cfg);
    }
    let q = 1.0 / (1.0 + p);
    let umax = (hi - lo).powf(1.0 + p);
    let g = |u: f64| {
        if u <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let s = u.powf(q);
        f(lo + s) * (q * s / u)
    };
    integrate_finite(g, 0.0, umax, cfg)
}

/// ∫_lo^hi (t − lo)^p g(t) dt for p > −1 and g bounded at `lo`.
///
/// With t = lo + u^{1/(1+p)} the weight and the Jacobian combine into the constant 1/(1+p),
/// so g is sampled directly and nothing underflows when p is close to −1.
pub fn integrate_algebraic<G: Fn(f64) -> Complex64>(
    g: G,
    lo: f64,
    hi: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    if !(p > -1.0) {
        return Err(precondition("endpoint exponent must exceed -1"));
    }
    let q = 1.0 / (1.0 + p);
    let umax = (hi - lo).powf(1.0 + p);
    integrate_finite(|u: f64| g(lo + u.max(0.0).powf(q)) * q, 0.0, umax, cfg)
}

/// ∫_0^∞ t^p g(t) dt with g bounded at the origin and decaying like e^{−decay·t}.
pub fn integrate_semi_infinite_weighted<G: Fn(f64) -> Complex64>(
    g: G,
    decay: f64,
    p: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let head = |lo: f64, hi: f64| integrate_algebraic(&g, lo, hi, p, cfg);
    semi_infinite_walk(head, |t: f64| g(t) * t.powf(p), decay, p, breaks, cfg)
}

/// ∫_0^∞ f(t) dt for |f(t)| = O(t^p e^{−decay·t}) with p > −1 also describing the origin.
pub fn integrate_semi_infinite<F: Fn(f64) -> Complex64>(f: F, decay: f64, cfg: &QuadratureConfig) -> Result<QuadResult> {
    integrate_semi_infinite_singular(f, decay, 0.0, cfg)
}

/// Semi-infinite integral whose integrand behaves like t^p at the origin and like
/// t^p e^{−decay·t} at infinity.
pub fn integrate_semi_infinite_singular<F: Fn(f64) -> Complex64>(
    f: F,
    decay: f64,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    integrate_semi_infinite_breaks(f, decay, p, &[], cfg)
}

/// As [`integrate_semi_infinite_singular`], with interior points (peaks, near-poles) that
/// become panel boundaries.
///
/// The range is cut at T where p·ln T − decay·T < ln(abs_tol); past the last interior point
/// panels double in length and the walk stops early once a panel no longer moves the sum.
pub fn integrate_semi_infinite_breaks<F: Fn(f64) -> Complex64>(
    f: F,
    decay: f64,
    p: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult> {
    let head = |lo: f64, hi: f64| integrate_finite_singular(&f, lo, hi, p, cfg);
    semi_infinite_walk(head, &f, decay, p, breaks, cfg)
}

/// Shared panel walk: `head` integrates the first panel [0, t1] (where the origin behaviour
/// lives), `f` everything after it.
fn semi_infinite_walk<H, F>(head: H, f: F, decay: f64, p: f64, breaks: &[f64], cfg: &QuadratureConfig) -> Result<QuadResult>
where
    H: Fn(f64, f64) -> Result<QuadResult>,
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    if !(decay > 0.0) || !decay.is_finite() {
        return Err(precondition("decay rate must be positive and finite"));
    }
    if !(p > -1.0) {
        return Err(precondition("endpoint exponent must exceed -1"));
    }
    let cut = tail_cut(decay, p.max(0.0), cfg.abs_tol.max(f64::MIN_POSITIVE));
    let mut points: Vec<f64> = breaks.iter().copied().filter(|&t| t > 0.0 && t < cut && t.is_finite()).collect();
    points.push((1.0 / decay).min(cut));
    points.sort_by(f64::total_cmp);
    points.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs());
    let mut total = head(0.0, points[0])?;
    if points.len() > 1 {
        total = total + integrate_breaks(&f, &points, cfg)?;
    }
    let mut lo = *points.last().expect("at least one point");
    let mut quiet = 0;
    while lo < cut {
        let hi = (2.0 * lo).min(cut);
        let piece = integrate_finite(&f, lo, hi, cfg)?;
        total = total + piece;
        let past_peak = decay * lo > p.max(0.0) + 1.0;
        if past_peak && piece.value.norm() <= 1e-3 * cfg.rel_tol * total.value.norm() {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    Ok(total)
}

/// Smallest T ≥ 1/decay with p·ln T − decay·T < ln(abs_tol).
fn tail_cut(decay: f64, p: f64, abs_tol: f64) -> f64 {
    let target = abs_tol.ln();
    let mut t = (1.0 / decay).max(1e-300);
    while p * t.ln() - decay * t >= target {
        t *= 2.0;
    }
    t
}
