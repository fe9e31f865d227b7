//! A catalog of identities linking different representations of E_{a,b}. Each entry evaluates
//! both sides on a fixed grid and reports the worst relative disagreement.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::combinatorics::mobius;
use crate::error::{MlError, Result};
use crate::gamma::{cos_pi, gamma_real, incomplete_gamma_p, recip_gamma, sin_pi};
use crate::iab::{euler_maclaurin_e, IabParams};
use crate::ml::{ml_eval, ml_neg_real, ml_taylor, MLParams};
use crate::quadrature::{
    integrate_algebraic, integrate_finite, integrate_semi_infinite, integrate_semi_infinite_weighted, QuadratureConfig,
};

const RECURRENCE_TOL: f64 = 1e-9;
const QUADRATURE_TOL: f64 = 1e-6;
const TRUNCATED_TOL: f64 = 1e-4;
const EVAL_TOL: f64 = 1e-15;

/// Outcome of one catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub id: String,
    pub grid_size: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when an evaluation on the grid failed outright.
    pub failure: Option<String>,
}

type Check = fn(&QuadratureConfig) -> Result<Grid>;

/// Catalog ids in report order, with their default tolerances.
const CATALOG: &[(&str, f64, Check)] = &[
    ("arctan_form", QUADRATURE_TOL, arctan_form),
    ("berberan_santos", QUADRATURE_TOL, berberan_santos),
    ("bounds_sandwich", RECURRENCE_TOL, bounds_sandwich),
    ("cyclotomic_m2", RECURRENCE_TOL, cyclotomic_m2),
    ("cyclotomic_m3", RECURRENCE_TOL, cyclotomic_m3),
    ("deriv_rule", QUADRATURE_TOL, deriv_rule),
    ("dup_integral", QUADRATURE_TOL, dup_integral),
    ("em_bridge", TRUNCATED_TOL, em_bridge),
    ("even_odd", RECURRENCE_TOL, even_odd),
    ("finite_interval", QUADRATURE_TOL, finite_interval),
    ("gen_integration", QUADRATURE_TOL, gen_integration),
    ("laplace_pair", QUADRATURE_TOL, laplace_pair),
    ("mobius_inversion", TRUNCATED_TOL, mobius_inversion),
    ("neg_a_continuation", TRUNCATED_TOL, neg_a_continuation),
    ("product_integration", QUADRATURE_TOL, product_integration),
    ("q_closed_form", QUADRATURE_TOL, q_closed_form),
    ("shift_down", RECURRENCE_TOL, shift_down),
    ("shift_up", RECURRENCE_TOL, shift_up),
    ("wiman", RECURRENCE_TOL, wiman),
];

/// Every catalog id in report order.
pub fn identity_ids() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.0).collect()
}

/// The tolerance an id is judged against when no override is given.
pub fn default_tolerance(id: &str) -> Result<f64> {
    lookup(id).map(|e| e.1)
}

fn lookup(id: &str) -> Result<&'static (&'static str, f64, Check)> {
    CATALOG.iter().find(|e| e.0 == id).ok_or_else(|| MlError::UnknownIdentity(id.to_string()))
}

pub fn run_identity(id: &str, tol: f64, cfg: &QuadratureConfig) -> Result<IdentityReport> {
    let entry = lookup(id)?;
    let (grid_size, max_rel_err, failure) = match (entry.2)(cfg) {
        Ok(g) => (g.points, g.worst, None),
        Err(e) => (0, f64::INFINITY, Some(e.to_string())),
    };
    Ok(IdentityReport {
        id: id.to_string(),
        grid_size,
        max_rel_err,
        tolerance: tol,
        pass: max_rel_err <= tol,
        failure,
    })
}

/// Runs the whole catalog; ids missing from `overrides` use their default tolerance.
pub fn run_all(overrides: &BTreeMap<String, f64>, cfg: &QuadratureConfig) -> Vec<IdentityReport> {
    CATALOG
        .iter()
        .map(|(id, tol, _)| {
            let tol = overrides.get(*id).copied().unwrap_or(*tol);
            run_identity(id, tol, cfg).expect("catalog ids are known")
        })
        .collect()
}

/// Running maximum of relative discrepancies.
#[derive(Debug, Default)]
struct Grid {
    points: usize,
    worst: f64,
}

impl Grid {
    fn compare(&mut self, lhs: Complex64, rhs: Complex64) {
        let scale = lhs.norm().max(rhs.norm());
        let rel = if scale == 0.0 { 0.0 } else { (lhs - rhs).norm() / scale };
        self.record(rel);
    }

    fn record(&mut self, rel: f64) {
        self.points += 1;
        // NaN must not hide behind max().
        self.worst = if rel.is_nan() { f64::INFINITY } else { self.worst.max(rel) };
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn e(a: f64, b: f64, z: Complex64) -> Result<Complex64> {
    Ok(ml_eval(MLParams::new(a, b)?, z, EVAL_TOL)?.value)
}

fn re(r: Result<crate::quadrature::QuadResult>) -> Result<f64> {
    Ok(r?.value.re)
}

fn even_odd(_: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.5, 0.8, 1.3] {
        for b in [0.7, 1.0, 2.0] {
            for z in [c(0.5), Complex64::new(1.5, 0.5), Complex64::new(-2.0, 1.0)] {
                let (plus, minus) = (e(a, b, z)?, e(a, b, -z)?);
                g.compare(e(2.0 * a, b, z * z)?, (plus + minus) / 2.0);
                g.compare(e(2.0 * a, b + a, z * z)?, (plus - minus) / (2.0 * z));
            }
        }
    }
    Ok(g)
}

/// With a·m ≤ 1 neither side goes through the dispatcher's own order reduction.
fn cyclotomic(m: usize, orders: [f64; 3]) -> Result<Grid> {
    let mut g = Grid::default();
    for a in orders {
        for b in [0.8, 1.0, 1.7] {
            for z in [c(0.7), Complex64::new(1.2, 0.8), Complex64::new(-1.5, 0.3)] {
                let mut avg = Complex64::new(0.0, 0.0);
                for r in 0..m {
                    avg += e(a, b, z * Complex64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64))?;
                }
                g.compare(e(a * m as f64, b, z.powu(m as u32))?, avg / m as f64);
            }
        }
    }
    Ok(g)
}

fn cyclotomic_m2(_: &QuadratureConfig) -> Result<Grid> {
    cyclotomic(2, [0.2, 0.35, 0.5])
}

fn cyclotomic_m3(_: &QuadratureConfig) -> Result<Grid> {
    cyclotomic(3, [0.15, 0.25, 0.33])
}

/// The grid stays inside the direct-summation radius so the dispatcher never applies the
/// b-shift it is being checked against.
fn shift_up(_: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.6, 1.2] {
        for beta in [0.5, 1.0, 1.3] {
            for m in [1, 3] {
                for z in [c(0.4), Complex64::new(0.3, 0.5), c(-0.8)] {
                    let head: Complex64 =
                        (0..m).map(|l| z.powu(l as u32) * recip_gamma(beta + l as f64 * a)).sum();
                    let lhs = z.powu(m as u32) * e(a, beta + m as f64 * a, z)?;
                    g.compare(lhs, e(a, beta, z)? - head);
                }
            }
        }
    }
    Ok(g)
}

fn shift_down(_: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.6, 1.2] {
        for beta in [1.0, 2.5] {
            for m in [1, 2] {
                for z in [c(0.7), Complex64::new(2.0, 1.0), c(-3.0)] {
                    let tail: Complex64 = (1..=m).map(|k| z.powi(-k) * recip_gamma(beta - a * k as f64)).sum();
                    let lhs = z.powi(-m) * e(a, beta - m as f64 * a, z)?;
                    g.compare(lhs, e(a, beta, z)? + tail);
                }
            }
        }
    }
    Ok(g)
}

/// The derivative side is a fourth-order central difference of ml_eval.
fn deriv_rule(_: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.5, 0.9, 1.5] {
        for b in [0.5, 1.0, 2.2] {
            for z in [c(0.8), Complex64::new(1.0, 1.0), c(-2.5)] {
                let h = 1e-3 * z.norm().max(1.0);
                let f = |t: f64| e(a, b, z + t);
                let d = (f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h);
                g.compare(a * z * d, e(a, b - 1.0, z)? - (b - 1.0) * e(a, b, z)?);
            }
        }
    }
    Ok(g)
}

fn laplace_pair(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    let x = -1.0;
    for a in [0.5, 1.0, 1.5] {
        for b in [1.0, 2.0] {
            for s in [1.0, 2.0] {
                let p = MLParams::new(a, b)?;
                let integrand = |t: f64| {
                    let v = ml_eval(p, c(x * t.powf(a)), EVAL_TOL).map(|r| r.value).unwrap_or(c(f64::NAN));
                    v * (-s * t).exp()
                };
                let lhs = integrate_semi_infinite_weighted(integrand, s, b - 1.0, &[], cfg)?.value;
                g.compare(lhs, c(s.powf(a - b) / (s.powf(a) - x)));
            }
        }
    }
    Ok(g)
}

/// ∫_0^x (x−u)^{w−1} u^{b−1} h(u) du split at x/2 so each half carries one endpoint power.
fn beta_kernel_integral(
    h: impl Fn(f64) -> Complex64,
    x: f64,
    b: f64,
    w: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    let half = x / 2.0;
    let left = integrate_algebraic(|u: f64| h(u) * (x - u).powf(w - 1.0), 0.0, half, b - 1.0, cfg)?;
    let right = integrate_algebraic(|v: f64| h(x - v) * (x - v).powf(b - 1.0), 0.0, half, w - 1.0, cfg)?;
    Ok(left.value + right.value)
}

fn eval_or_nan(p: MLParams, z: Complex64) -> Complex64 {
    ml_eval(p, z, EVAL_TOL).map(|r| r.value).unwrap_or(c(f64::NAN))
}

fn gen_integration(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    let x = 1.5;
    for a in [0.5, 0.9] {
        for b in [0.6, 1.5] {
            for w in [0.5, 2.0] {
                for lambda in [-1.0, 0.7] {
                    let p = MLParams::new(a, b)?;
                    let h = |u: f64| eval_or_nan(p, c(lambda * u.powf(a)));
                    let lhs = beta_kernel_integral(h, x, b, w, cfg)? / gamma_real(w).value;
                    g.compare(lhs, x.powf(b - 1.0 + w) * e(a, b + w, c(lambda * x.powf(a)))?);
                }
            }
        }
    }
    Ok(g)
}

fn product_integration(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    let (lambda, mu) = (-1.0, 0.5);
    for a in [0.5, 0.9] {
        for b in [0.6, 1.5] {
            for w in [0.5, 2.0] {
                for x in [1.0, 2.0] {
                    let (p, q) = (MLParams::new(a, b)?, MLParams::new(a, w)?);
                    let h = |u: f64| eval_or_nan(p, c(lambda * u.powf(a))) * eval_or_nan(q, c(mu * (x - u).powf(a)));
                    let lhs = beta_kernel_integral(h, x, b, w, cfg)?;
                    let xa = x.powf(a);
                    let rhs = x.powf(b + w - 1.0) * (lambda * e(a, b + w, c(lambda * xa))? - mu * e(a, b + w, c(mu * xa))?)
                        / (lambda - mu);
                    g.compare(lhs, rhs);
                }
            }
        }
    }
    Ok(g)
}

fn dup_integral(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.3, 0.6] {
        for b in [0.5, 1.0, 1.5] {
            for z in [0.5, 2.0] {
                let p = MLParams::new(2.0 * a, 2.0 * b)?;
                let h = |t: f64| eval_or_nan(p, c(-z * (4.0 * t).powf(a))) * (-t).exp();
                let q = integrate_semi_infinite_weighted(h, 1.0, b - 0.5, &[], cfg)?.value;
                let lhs = q * (2f64.powf(2.0 * b - 1.0) / PI.sqrt());
                g.compare(lhs, e(a, b, c(-z))?);
            }
        }
    }
    Ok(g)
}

/// With w = s·tan θ the integral becomes (2/π)∫_0^{π/2} E_{2a,b}(−s² tan²θ) dθ.
fn berberan_santos(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.3, 0.5, 0.8] {
        for b in [1.0, 1.5] {
            for s in [0.5, 1.0, 2.0] {
                let p = MLParams::new(2.0 * a, b)?;
                let h = |th: f64| {
                    let w = s * th.tan();
                    eval_or_nan(p, c(-w * w))
                };
                let lhs = integrate_finite(h, 0.0, PI / 2.0, cfg)?.value * (2.0 / PI);
                g.compare(lhs, e(a, b, c(-s))?);
            }
        }
    }
    Ok(g)
}

/// E_{a,b}(−x) from the integral representation against −Σ_{k=1}^{K} (−x)^{−k}/Γ(b−ak).
fn neg_a_continuation(cfg: &QuadratureConfig) -> Result<Grid> {
    const TERMS: i32 = 6;
    let mut g = Grid::default();
    for a in [0.5, 0.8] {
        for b in [0.8, 1.2] {
            for x in [20.0, 50.0] {
                let lhs = ml_neg_real(MLParams::new(a, b)?, x, *cfg)?.value;
                let rhs: f64 = -(1..=TERMS).map(|k| (-x).powi(-k) * recip_gamma(b - a * k as f64)).sum::<f64>();
                g.compare(lhs, c(rhs));
            }
        }
    }
    Ok(g)
}

/// Truncated at 40 terms; the change over the last three partial sums counts as error too.
fn mobius_inversion(_: &QuadratureConfig) -> Result<Grid> {
    const TERMS: u64 = 40;
    let mut g = Grid::default();
    for z in [0.2f64, 0.5] {
        for x in [0.5, 1.0] {
            for b in [1.0, 2.0] {
                let mut partial = Vec::with_capacity(TERMS as usize);
                let mut sum = 0.0;
                for n in 1..=TERMS {
                    let mu = mobius(n)?;
                    if mu != 0 {
                        let nx = n as f64 * x;
                        let v = e(nx, b, c(z.powf(nx)))?.re - recip_gamma(b);
                        sum += mu as f64 * v;
                    }
                    partial.push(sum);
                }
                let lhs = z.powf(x) * recip_gamma(b + x);
                let k = partial.len();
                let tail = (partial[k - 1] - partial[k - 2]).abs().max((partial[k - 2] - partial[k - 3]).abs());
                g.record(((lhs - sum).abs() + tail) / lhs.abs());
            }
        }
    }
    Ok(g)
}

fn arctan_form(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.3, 0.6, 0.9] {
        let (sa, ca) = (sin_pi(a), cos_pi(a));
        for x in [0.5f64, 2.0, 5.0] {
            let big_x = x.powf(1.0 / a);
            // v = x^{1/a} u
            let h = |v: f64| c(((v / big_x).powf(a) + ca).atan2(sa) * (-v).exp());
            let q = re(integrate_semi_infinite(h, 1.0, cfg))?;
            let rhs = 1.0 - 1.0 / (2.0 * a) + q / (PI * a);
            g.compare(e(a, 1.0, c(-x))?, c(rhs));
        }
    }
    Ok(g)
}

fn finite_interval(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.2, 0.35, 0.45] {
        let (sa, ca) = (sin_pi(a), cos_pi(a));
        for x in [0.5, 2.0, 5.0] {
            let h = |t: f64| {
                if t <= 0.0 {
                    return c(0.0);
                }
                c((-(x * (sa / t - ca)).powf(1.0 / a)).exp() / (1.0 + t * t))
            };
            let q = re(integrate_finite(h, 0.0, (PI * a).tan(), cfg))?;
            g.compare(e(a, 1.0, c(-x))?, c(q / (a * PI)));
        }
    }
    Ok(g)
}

fn q_closed_form(cfg: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.3, 0.6] {
        for u in [0.5, 2.0, 5.0] {
            let ln_u: f64 = f64::ln(u);
            // cosh(πat)/cosh(πt) without overflow
            let h = |t: f64| {
                let ratio = (PI * (a - 1.0) * t).exp() * (1.0 + (-2.0 * PI * a * t).exp()) / (1.0 + (-2.0 * PI * t).exp());
                c(ratio * (a * t * ln_u).cos())
            };
            let lhs = re(integrate_semi_infinite(h, PI * (1.0 - a), cfg))?;
            let ua = u.powf(a);
            let rhs = u.powf(a / 2.0) * (1.0 + ua) * cos_pi(a / 2.0) / (1.0 + 2.0 * ua * cos_pi(a) + ua * ua);
            g.compare(c(lhs), c(rhs));
        }
    }
    Ok(g)
}

/// Reports the relative size of any violation of the two bounds, zero when both hold.
fn bounds_sandwich(_: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for a in [0.1, 0.25, 0.4] {
        for x in [0.5, 1.0, 2.0, 5.0] {
            let v = e(a, 1.0, c(-x))?.re;
            let damp = (-x.powf(1.0 / a)).exp();
            let lower = 0.5 * damp;
            let upper = sin_pi(a) * gamma_real(a).value / (PI * x) - damp * sin_pi(2.0 * a) / (4.0 * a * PI * (1.0 + cos_pi(a)));
            g.record((lower - v).max(v - upper).max(0.0) / v.abs());
        }
    }
    Ok(g)
}

/// The series side is summed directly, since the dispatcher would itself use this form.
fn wiman(_: &QuadratureConfig) -> Result<Grid> {
    let mut g = Grid::default();
    for n in [2u32, 3, 4] {
        let nf = n as f64;
        for b in [1.0, 1.5, 2.0] {
            for x in [0.5, 1.0, 2.0] {
                let lhs = ml_taylor(MLParams::new(1.0 / nf, b)?, c(x), 1e-17, 100_000)?.value;
                let y = x.powf(nf);
                let mut brace = if b == 1.0 { 1.0 } else { 0.0 };
                for j in 0..n {
                    let s = b - 1.0 + j as f64 / nf;
                    // 1/Γ(0) = 0 removes the s = 0 term.
                    if s > 0.0 {
                        brace += incomplete_gamma_p(s, y)?;
                    }
                }
                g.compare(lhs, c(x.powf((1.0 - b) * nf) * y.exp() * brace));
            }
        }
    }
    Ok(g)
}

fn em_bridge(_: &QuadratureConfig) -> Result<Grid> {
    const M: usize = 16;
    let mut g = Grid::default();
    for a in [0.3, 0.4] {
        for b in [1.0, 1.5] {
            for z in [0.3, 0.5] {
                let bridge = euler_maclaurin_e(IabParams::new(a, b)?, c(z), M)?.value;
                g.compare(bridge, e(a, b, c(z))?);
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_sorted_and_complete() {
        let ids = identity_ids();
        assert_eq!(ids.len(), 19);
        assert!(ids.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn documented_examples() {
        let cfg = QuadratureConfig::default();
        for (id, tol) in [("laplace_pair", 1e-6), ("cyclotomic_m3", 1e-8), ("dup_integral", 1e-6)] {
            let r = run_identity(id, tol, &cfg).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(matches!(run_identity("nope", 1.0, &cfg), Err(MlError::UnknownIdentity(_))));
    }

    #[test]
    fn every_identity_passes_at_its_default() {
        let reports = run_all(&BTreeMap::new(), &QuadratureConfig::default());
        for r in &reports {
            println!("{:>20} {:>4} {:.3e} {:.0e} {}", r.id, r.grid_size, r.max_rel_err, r.tolerance, r.pass);
        }
        assert!(reports.iter().all(|r| r.pass), "{reports:#?}");
    }
}
