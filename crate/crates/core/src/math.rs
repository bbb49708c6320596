//! Shared mathematical primitives: Poisson statistics, binary entropy, the
//! PLOB benchmark, and the series kernels every bound formula leans on.
//!
//! All series follow one tail rule: keep adding terms until the running term
//! drops below 1e-16 of the partial sum, with at least 40 terms. Exponential
//! differences such as `e^a - e^b` or `e^mu` minus a Taylor prefix are never
//! formed by direct subtraction; they are rebuilt from their tail series so
//! that the decade-spaced small intensities of the protocol do not wipe out
//! the result.

use crate::error::{Error, Result};

/// Relative tail threshold for series summation.
const SERIES_EPS: f64 = 1e-16;
/// Minimum number of terms before the tail rule may stop a series.
const SERIES_MIN_TERMS: usize = 40;
const SERIES_MAX_TERMS: usize = 2000;

/// Intensities closer than this make every bound denominator blow up.
pub const SEP_TOL: f64 = 1e-9;

const FACT_MAX: usize = 170;

fn factorial_table() -> [f64; FACT_MAX + 1] {
    let mut t = [0.0f64; FACT_MAX + 1];
    // exact in u128 through 33!, then f64 chain (relative error ~1e-15)
    let mut exact: u128 = 1;
    t[0] = 1.0;
    for (n, slot) in t.iter_mut().enumerate().take(34).skip(1) {
        exact *= n as u128;
        *slot = exact as f64;
    }
    for n in 34..=FACT_MAX {
        t[n] = t[n - 1] * n as f64;
    }
    t
}

fn fact(n: usize) -> f64 {
    static TABLE: std::sync::OnceLock<[f64; FACT_MAX + 1]> = std::sync::OnceLock::new();
    assert!(n <= FACT_MAX, "factorial overflow: {n}!");
    TABLE.get_or_init(factorial_table)[n]
}

/// n! as f64, exact through 33! and correctly rounded products beyond.
pub fn factorial(n: usize) -> f64 {
    fact(n)
}

/// ln(n!) by direct accumulation.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= FACT_MAX {
        return fact(n).ln();
    }
    let mut s = fact(FACT_MAX).ln();
    for k in (FACT_MAX + 1)..=n {
        s += (k as f64).ln();
    }
    s
}

/// Binomial coefficient as f64. Exact integer arithmetic (u128) up to n = 120,
/// log-gamma route beyond.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 120 {
        let mut num: u128 = 1;
        let mut den: u128 = 1;
        for i in 0..k {
            num *= (n - i) as u128;
            den *= (i + 1) as u128;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
        (num / den) as f64
    } else {
        (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Poisson weight P_mu(n) = e^{-mu} mu^n / n!.
///
/// Direct evaluation for small n, log space beyond to avoid overflow.
pub fn poisson_weight(mu: f64, n: usize) -> Result<f64> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::domain("poisson mean", mu, "[0, inf)"));
    }
    if mu == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    if n <= 24 && mu < 500.0 {
        Ok((-mu).exp() * mu.powi(n as i32) / fact(n))
    } else {
        Ok((-mu + n as f64 * mu.ln() - ln_factorial(n)).exp())
    }
}

/// Poisson CDF P(X <= n) by direct summation.
pub fn poisson_cdf(mu: f64, n: usize) -> Result<f64> {
    let mut s = 0.0;
    for k in 0..=n {
        s += poisson_weight(mu, k)?;
    }
    Ok(s.min(1.0))
}

/// Coherent-state number coefficient c_n = e^{-alpha^2/2} alpha^n / sqrt(n!),
/// with alpha the positive root of the signal intensity. Satisfies
/// c_n^2 = P_{alpha^2}(n) exactly.
pub fn coherent_coefficient(alpha2: f64, n: usize) -> Result<f64> {
    if !alpha2.is_finite() || alpha2 < 0.0 {
        return Err(Error::domain("signal intensity", alpha2, "[0, inf)"));
    }
    Ok(poisson_weight(alpha2, n)?.sqrt())
}

/// Binary entropy h(x) = -x log2 x - (1-x) log2 (1-x), with h(0) = h(1) = 0.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !x.is_finite() || !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("entropy argument", x, "[0, 1]"));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-(x * x.log2()) - (1.0 - x) * (1.0 - x).log2())
}

/// PLOB bound on the secret-key capacity of a lossy channel,
/// K(eta) = -log2(1 - eta). Returns infinity for a saturated channel.
pub fn plob_bound(eta: f64) -> Result<f64> {
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::domain("transmittance", eta, "[0, 1]"));
    }
    if eta == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-(-eta).ln_1p() / std::f64::consts::LN_2)
}

/// Exponential tail: sum_{j >= k0} x^j / j!  (equals e^x minus its Taylor
/// prefix, computed without cancellation).
pub fn exp_tail(x: f64, k0: usize) -> f64 {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return if k0 == 0 { 1.0 } else { 0.0 };
    }
    let mut term = if k0 <= 24 {
        x.powi(k0 as i32) / fact(k0)
    } else {
        (k0 as f64 * x.ln() - ln_factorial(k0)).exp()
    };
    let mut sum = term;
    let mut k = k0;
    for i in 0..SERIES_MAX_TERMS {
        k += 1;
        term *= x / k as f64;
        sum += term;
        if term < SERIES_EPS * sum && i >= SERIES_MIN_TERMS {
            break;
        }
    }
    sum
}

/// Two-variable tail series sum_{k >= k0} h_{k-j}(a, b) / k!, where
/// h_i(a, b) = sum_{t=0..=i} a^t b^{i-t} is the complete homogeneous
/// symmetric polynomial (h_i = 0 for i < 0).
///
/// Every paired exponential difference in the bound formulas reduces to this:
/// e^a - e^b = (a-b) S(a,b,1,1);
/// a - b + b e^a - a e^b = ab(a-b) S(a,b,2,2);
/// b(e^a - 1 - a^2/2 - a^3/6 - a^4/24) - (a<->b) = ab(a-b) S(a,b,2,5);
/// e^a - e^b - (a-b)(1 + (a+b)/2 + (a^2+ab+b^2)/6) = (a-b) S(a,b,1,4).
pub fn pair_tail(a: f64, b: f64, j: usize, k0: usize) -> f64 {
    debug_assert!(a >= 0.0 && b >= 0.0);
    debug_assert!(k0 >= j && k0 <= 30);
    // h_{k-j} via h_i = a*h_{i-1} + b^i; all terms nonnegative.
    let mut h = 1.0; // h_0
    let mut pow_b = 1.0;
    for _ in 0..(k0 - j) {
        pow_b *= b;
        h = a * h + pow_b;
    }
    let mut k = k0;
    let mut inv_fact = 1.0 / fact(k0);
    let mut sum = h * inv_fact;
    for i in 0..SERIES_MAX_TERMS {
        k += 1;
        pow_b *= b;
        h = a * h + pow_b;
        inv_fact /= k as f64;
        let term = h * inv_fact;
        sum += term;
        if term < SERIES_EPS * sum && i >= SERIES_MIN_TERMS {
            break;
        }
    }
    sum
}

/// e^a - e^b without cancellation.
pub fn exp_diff(a: f64, b: f64) -> f64 {
    (a - b) * pair_tail(a, b, 1, 1)
}

/// The recurring two-decoy bracket a - b + b e^a - a e^b.
pub fn exp_pair_bracket(a: f64, b: f64) -> f64 {
    a * b * (a - b) * pair_tail(a, b, 2, 2)
}

/// Complete homogeneous symmetric polynomial h_d over the given values
/// (sum over all degree-d monomials with repetition). h_0 = 1.
pub fn homogeneous_sum(values: &[f64], degree: usize) -> f64 {
    let mut h = vec![0.0; degree + 1];
    h[0] = 1.0;
    for &v in values {
        for d in 1..=degree {
            h[d] += v * h[d - 1];
        }
    }
    h[degree]
}

/// Compensated linear combination sum_i c_i * x_i (TwoProduct via FMA plus
/// Neumaier accumulation). The gain combinations cancel ten or more digits;
/// this keeps the combination itself exact so only the input rounding of the
/// gains survives.
pub fn compensated_dot(terms: &[(f64, f64)]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &(c, x) in terms {
        let p = c * x;
        let p_err = c.mul_add(x, -p);
        // Neumaier step for p
        let t = sum + p;
        comp += if sum.abs() >= p.abs() {
            (sum - t) + p
        } else {
            (p - t) + sum
        };
        sum = t;
        comp += p_err;
    }
    sum + comp
}
