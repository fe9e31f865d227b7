//! Exact integer sequences: Bernoulli numbers, Stirling numbers, the Möbius function and the
//! characteristic coefficients of (1+z)^α.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, MlError, Result};

/// B_60 is the first Bernoulli number whose numerator needs more than 127 bits.
pub const MAX_BERNOULLI: usize = 59;
pub const MAX_STIRLING: usize = 40;

/// Exact rational with 128-bit numerator and positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: i128,
    pub den: i128,
}

impl Rational {
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    values: Vec<Rational>,
}

impl BernoulliTable {
    pub fn get(&self, n: usize) -> Option<Rational> {
        self.values.get(n).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// B_0..B_N from Σ_{j=0}^{n} C(n+1, j) B_j = 0, so B_1 = −1/2.
pub fn bernoulli(n_max: usize) -> Result<BernoulliTable> {
    if n_max > MAX_BERNOULLI {
        return Err(MlError::Overflow(format!("Bernoulli numbers beyond B_{MAX_BERNOULLI} do not fit 128-bit rationals")));
    }
    let mut exact: Vec<BigRational> = Vec::with_capacity(n_max + 1);
    exact.push(BigRational::one());
    for n in 1..=n_max {
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one(); // C(n+1, j)
        for (j, bj) in exact.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        // binom is now C(n+1, n)
        exact.push(-acc / BigRational::from_integer(binom));
    }
    let values = exact
        .iter()
        .map(|r| {
            let num = r.numer().to_i128();
            let den = r.denom().to_i128();
            match (num, den) {
                (Some(num), Some(den)) => Ok(Rational { num, den }),
                _ => Err(MlError::Overflow("Bernoulli number exceeds 128 bits".into())),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BernoulliTable { values })
}

fn bernoulli_cache() -> &'static [f64] {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    CACHE.get_or_init(|| {
        bernoulli(MAX_BERNOULLI)
            .expect("table up to the supported maximum always fits")
            .values
            .iter()
            .map(|r| r.to_f64())
            .collect()
    })
}

/// B_n as a float, n ≤ 59.
pub fn bernoulli_f64(n: usize) -> f64 {
    bernoulli_cache()[n]
}

/// Signed Stirling numbers of the first kind and Stirling numbers of the second kind.
#[derive(Debug, Clone, PartialEq)]
pub struct StirlingTables {
    first: Vec<Vec<BigInt>>,
    second: Vec<Vec<BigInt>>,
}

impl StirlingTables {
    pub fn size(&self) -> usize {
        self.first.len() - 1
    }

    /// S_n^{(k)}, with sign (−1)^{n−k}.
    pub fn first(&self, n: usize, k: usize) -> &BigInt {
        &self.first[n][k]
    }

    /// 𝒮_n^{(k)}: partitions of an n-set into k blocks.
    pub fn second(&self, n: usize, k: usize) -> &BigInt {
        &self.second[n][k]
    }

    pub fn first_f64(&self, n: usize, k: usize) -> f64 {
        self.first[n][k].to_f64().unwrap_or(f64::NAN)
    }

    pub fn second_f64(&self, n: usize, k: usize) -> f64 {
        self.second[n][k].to_f64().unwrap_or(f64::NAN)
    }
}

pub fn stirling(n_max: usize) -> Result<StirlingTables> {
    if n_max > MAX_STIRLING {
        return Err(MlError::Overflow(format!("Stirling tables are capped at n = {MAX_STIRLING}")));
    }
    let zero_row = || vec![BigInt::zero(); n_max + 1];
    let mut first = vec![zero_row(); n_max + 1];
    let mut second = vec![zero_row(); n_max + 1];
    first[0][0] = BigInt::one();
    second[0][0] = BigInt::one();
    for n in 0..n_max {
        for k in 1..=n + 1 {
            first[n + 1][k] = &first[n][k - 1] - BigInt::from(n) * &first[n][k];
            second[n + 1][k] = BigInt::from(k) * &second[n][k] + &second[n][k - 1];
        }
    }
    Ok(StirlingTables { first, second })
}

/// Shared tables up to n = 40, built on first use.
pub fn stirling_tables() -> &'static StirlingTables {
    static CACHE: OnceLock<StirlingTables> = OnceLock::new();
    CACHE.get_or_init(|| stirling(MAX_STIRLING).expect("supported size"))
}

pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(domain("Möbius function needs n >= 1"));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// C(x, m) for real x.
pub fn binomial_real(x: f64, m: usize) -> f64 {
    (0..m).fold(1.0, |acc, i| acc * (x - i as f64) / (i + 1) as f64)
}

/// s[k,m] of f(z) = (1+z)^α: the coefficient of z^m in (f(z) − 1)^k.
pub fn char_coeff(alpha: f64, k: usize, m: usize) -> Result<f64> {
    if m > MAX_STIRLING {
        return Err(domain(format!("char_coeff needs m <= {MAX_STIRLING}")));
    }
    if k > m {
        return Ok(0.0);
    }
    // The alternating Stirling sum cancels by several digits in floating point; α is a dyadic
    // rational, so the sum is formed exactly and rounded once.
    let Some(alpha) = BigRational::from_float(alpha) else {
        return Err(domain("char_coeff needs a finite alpha"));
    };
    let t = stirling_tables();
    let mut sum = BigRational::zero();
    let mut pow = num_traits::pow::pow(alpha.clone(), k);
    for j in k..=m {
        sum += BigRational::from_integer(t.first(m, j) * t.second(j, k)) * &pow;
        pow = pow * &alpha;
    }
    let scale = BigRational::new(factorial_big(k), factorial_big(m));
    Ok((sum * scale).to_f64().unwrap_or(f64::NAN))
}

fn factorial_big(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Alternate form Σ_{j=1}^{k} (−1)^{j+k} C(k,j) C(αj, m), kept for cross-checking.
///
/// The sum cancels heavily, so it is carried out exactly on the binary value of α.
pub fn char_coeff_alternate(alpha: f64, k: usize, m: usize) -> f64 {
    if k == 0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let Some(alpha) = BigRational::from_float(alpha) else {
        return f64::NAN;
    };
    let mut total = BigRational::zero();
    let mut binom_kj = BigInt::one();
    for j in 1..=k {
        binom_kj = binom_kj * BigInt::from(k + 1 - j) / BigInt::from(j);
        let x = &alpha * BigRational::from_integer(BigInt::from(j));
        let mut c = BigRational::one();
        for i in 0..m {
            c = c * (&x - BigRational::from_integer(BigInt::from(i))) / BigRational::from_integer(BigInt::from(i + 1));
        }
        let term = BigRational::from_integer(binom_kj.clone()) * c;
        if (j + k) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total.to_f64().unwrap_or(f64::NAN)
}
