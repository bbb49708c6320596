//! Analytical channel model: every experimentally observable quantity of the
//! protocol (X- and Z-basis gains, exact photon-number yields) in closed
//! form. A beam splitter of transmittance sqrt(eta) models each arm, both
//! detectors share a dark-count probability, polarization misalignment
//! rotates each arm by theta_A / theta_B, and Bob's signal picks up a phase
//! shift phi = delta*pi.
//!
//! Besides feeding the simulation commands, this module is the correctness
//! oracle for the bound modules: gains rebuilt from the exact yields through
//! the Poisson mixture must reproduce the closed-form gains, and every
//! decoy-state bound must sit on the correct side of the exact yield.

use crate::error::{Error, Result};
use crate::math::{self, binomial, factorial, poisson_cdf, poisson_weight};
use crate::types::{ChannelParams, Outcome};

/// Modified Bessel function of the first kind, order zero, by power series
/// I_0(x) = sum_k (x^2/4)^k / (k!)^2. Relative error below 1e-12 over the
/// arguments the Z-gain formula produces.
pub fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / ((k * k) as f64);
        sum += term;
        if (term < 1e-16 * sum && k >= 40) || k > 2000 {
            break;
        }
    }
    sum
}

/// Conditional X-basis gain p(k_c, k_d | b_A, b_B) for a single-click
/// outcome: (1 - p_d) [ p_d e^{-2 gamma} + q(k_c,k_d | b_A,b_B) ] with
/// gamma = sqrt(eta) alpha^2 and the interference branch selected by
/// k_c XOR b_A XOR b_B.
pub fn x_gain_conditional(
    ch: &ChannelParams,
    alpha2: f64,
    outcome: Outcome,
    b_a: bool,
    b_b: bool,
) -> Result<f64> {
    if !alpha2.is_finite() || alpha2 < 0.0 {
        return Err(Error::domain("signal intensity", alpha2, "[0, inf)"));
    }
    let gamma = ch.eta.sqrt() * alpha2;
    let c = ch.phi().cos() * ch.theta().cos();
    let kc = matches!(outcome, Outcome::ClickC);
    let constructive = kc ^ b_a ^ b_b;
    let q = if constructive {
        (-gamma * (1.0 - c)).exp() - (-2.0 * gamma).exp()
    } else {
        (-gamma * (1.0 + c)).exp() - (-2.0 * gamma).exp()
    };
    Ok((1.0 - ch.pd) * (ch.pd * (-2.0 * gamma).exp() + q))
}

/// Closed-form X-basis statistics, identical for both single-click outcomes
/// under the model's k_c <-> k_d symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XBasisStats {
    /// p(k_c, k_d), indexed by `Outcome::index`.
    pub p_click: [f64; 2],
    /// Bit-error rate per outcome.
    pub e_bit: [f64; 2],
}

/// X-basis click probability and bit-error rate from the closed forms.
/// Errors with `NoClicks` when the click probability vanishes (no dark
/// counts and vacuum signal), where the error rate is undefined.
pub fn x_basis_stats(ch: &ChannelParams, alpha2: f64) -> Result<XBasisStats> {
    if !alpha2.is_finite() || alpha2 < 0.0 {
        return Err(Error::domain("signal intensity", alpha2, "[0, inf)"));
    }
    let gamma = ch.eta.sqrt() * alpha2;
    let c = ch.phi().cos() * ch.theta().cos();
    let pd = ch.pd;
    let p = 0.5 * (1.0 - pd) * ((-gamma * c).exp() + (gamma * c).exp()) * (-gamma).exp()
        - (1.0 - pd) * (1.0 - pd) * (-2.0 * gamma).exp();
    if p <= 0.0 {
        return Err(Error::NoClicks);
    }
    let e = ((-gamma * c).exp() - (1.0 - pd) * (-gamma).exp())
        / ((-gamma * c).exp() + (gamma * c).exp() - 2.0 * (1.0 - pd) * (-gamma).exp());
    Ok(XBasisStats {
        p_click: [p, p],
        e_bit: [e, e],
    })
}

/// Z-basis gain Q^{k,l} for phase-randomized pulses of intensities mu_k and
/// mu_l.
pub fn z_gain(ch: &ChannelParams, mu_k: f64, mu_l: f64) -> Result<f64> {
    if !mu_k.is_finite() || mu_k < 0.0 {
        return Err(Error::domain("intensity mu_k", mu_k, "[0, inf)"));
    }
    if !mu_l.is_finite() || mu_l < 0.0 {
        return Err(Error::domain("intensity mu_l", mu_l, "[0, inf)"));
    }
    let se = ch.eta.sqrt();
    let pd = ch.pd;
    let s = mu_k + mu_l;
    Ok((1.0 - pd)
        * ((pd - 1.0) * (-se * s).exp()
            + (-se * s / 2.0).exp() * bessel_i0((ch.eta * mu_k * mu_l).sqrt() * ch.theta().cos())))
}

/// Precomputed misalignment kernel for the exact yield formula.
///
/// The innermost triple sum of the yield expansion depends only on how many
/// photons survive on each side (k, l) and on the two polarization angles,
/// not on the emitted numbers (n, m) or on eta. Caching it turns the yield
/// table into a cheap double sum per entry.
#[derive(Debug, Clone)]
pub struct YieldKernel {
    theta_a: f64,
    theta_b: f64,
    kmax: usize,
    w: Vec<f64>,
}

impl YieldKernel {
    pub fn new(ch: &ChannelParams, kmax: usize) -> Self {
        let (ca, cb) = (ch.theta_a.cos(), ch.theta_b.cos());
        let (sa, sb) = (ch.theta_a.sin(), ch.theta_b.sin());
        let pmax = 3 * kmax + 3;
        let pow = |base: f64| -> Vec<f64> {
            let mut v = Vec::with_capacity(pmax);
            let mut x = 1.0;
            for _ in 0..pmax {
                v.push(x);
                x *= base;
            }
            v
        };
        let (cap, cbp, sap, sbp) = (pow(ca), pow(cb), pow(sa), pow(sb));
        let mut w = vec![0.0; (kmax + 1) * (kmax + 1)];
        for k in 0..=kmax {
            for l in 0..=kmax {
                let mut sum = 0.0;
                for r in 0..=k {
                    for p in 0..=l {
                        let q_lo = (r + p).saturating_sub(l);
                        let q_hi = k.min(r + p);
                        for q in q_lo..=q_hi {
                            sum += binomial(k, r)
                                * binomial(l, p)
                                * binomial(k, q)
                                * binomial(l, r + p - q)
                                * factorial(r + p)
                                * factorial(k + l - r - p)
                                * cap[r + q]
                                * cbp[r + 2 * p - q]
                                * sap[2 * k - r - q]
                                * sbp[(2 * l + q) - (r + 2 * p)];
                        }
                    }
                }
                w[k * (kmax + 1) + l] = sum;
            }
        }
        YieldKernel {
            theta_a: ch.theta_a,
            theta_b: ch.theta_b,
            kmax,
            w,
        }
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn matches(&self, ch: &ChannelParams) -> bool {
        self.theta_a == ch.theta_a && self.theta_b == ch.theta_b
    }

    fn w(&self, k: usize, l: usize) -> f64 {
        self.w[k * (self.kmax + 1) + l]
    }

    /// Exact model yield Y_{nm} for this kernel's misalignment angles.
    pub fn yield_nm(&self, ch: &ChannelParams, n: usize, m: usize) -> Result<f64> {
        if n.max(m) > self.kmax {
            return Err(Error::domain(
                "photon number beyond kernel size",
                n.max(m) as f64,
                "0..=kmax",
            ));
        }
        debug_assert!(self.matches(ch));
        let se = ch.eta.sqrt();
        let oms = 1.0 - se;
        let mut se_pow = vec![1.0; n + m + 1];
        let mut oms_pow = vec![1.0; n + m + 1];
        for i in 1..=(n + m) {
            se_pow[i] = se_pow[i - 1] * se;
            oms_pow[i] = oms_pow[i - 1] * oms;
        }
        let mut y = 0.0;
        let mut half_k = 1.0; // 2^{-k}
        for k in 0..=n {
            let mut half_kl = half_k;
            for l in 0..=m {
                y += binomial(n, k) * binomial(m, l) * se_pow[k + l] * oms_pow[n + m - k - l]
                    / (factorial(k) * factorial(l))
                    * half_kl
                    * self.w(k, l);
                half_kl *= 0.5;
            }
            half_k *= 0.5;
        }
        Ok((1.0 - ch.pd) * ((ch.pd - 1.0) * oms_pow[n + m] + y))
    }
}

/// Exact model yield Y_{nm}: the probability that the node announces a given
/// single-click outcome when Alice and Bob emit n- and m-photon states.
/// Identical for both outcomes under the model's symmetry.
///
/// Builds a kernel per call; use [`YieldKernel`] directly on hot paths.
pub fn model_yield(ch: &ChannelParams, n: usize, m: usize) -> Result<f64> {
    YieldKernel::new(ch, n.max(m)).yield_nm(ch, n, m)
}

/// A truncated yield table: values for n, m <= n_max.
#[derive(Debug, Clone, PartialEq)]
pub struct YieldGrid {
    n_max: usize,
    vals: Vec<f64>,
}

impl YieldGrid {
    pub fn new(n_max: usize, vals: Vec<f64>) -> Result<Self> {
        if vals.len() != (n_max + 1) * (n_max + 1) {
            return Err(Error::GainShape {
                expected: n_max + 1,
                got: vals.len(),
            });
        }
        Ok(YieldGrid { n_max, vals })
    }

    pub fn from_fn(n_max: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut vals = Vec::with_capacity((n_max + 1) * (n_max + 1));
        for n in 0..=n_max {
            for m in 0..=n_max {
                vals.push(f(n, m));
            }
        }
        YieldGrid { n_max, vals }
    }

    /// Exact model yields for entries whose Poisson weight under
    /// (mu_k, mu_l) is at least `weight_floor`; entries below it are filled
    /// with the model value at the effective truncation edge, which is also
    /// returned as the matching tail constant. Skipped entries change the
    /// reconstructed gain by less than `weight_floor` per entry.
    pub fn from_model(
        ch: &ChannelParams,
        n_max: usize,
        mu_k: f64,
        mu_l: f64,
        weight_floor: f64,
    ) -> Result<(Self, f64)> {
        let mut need = 0usize;
        for n in 0..=n_max {
            if poisson_weight(mu_k.max(mu_l), n)? >= weight_floor {
                need = n;
            }
        }
        let kernel = YieldKernel::new(ch, need);
        let c_tail = kernel.yield_nm(ch, need, need)?;
        let mut vals = Vec::with_capacity((n_max + 1) * (n_max + 1));
        for n in 0..=n_max {
            let pk = poisson_weight(mu_k, n)?;
            for m in 0..=n_max {
                let keep = n <= need && m <= need && pk * poisson_weight(mu_l, m)? >= weight_floor;
                vals.push(if keep {
                    kernel.yield_nm(ch, n, m)?
                } else {
                    c_tail
                });
            }
        }
        Ok((YieldGrid { n_max, vals }, c_tail))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.vals[n * (self.n_max + 1) + m]
    }
}

/// Observed gain as a Poisson mixture over a truncated yield table, with the
/// infinite tail handled in closed form through the Poisson CDF:
///
///   Q = sum_{n,m<=N} P_k(n) P_l(m) Y_nm + c_tail (1 - CDF_k(N) CDF_l(N)).
pub fn gain_from_yields(grid: &YieldGrid, c_tail: f64, mu_k: f64, mu_l: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c_tail) {
        return Err(Error::domain("tail yield", c_tail, "[0, 1]"));
    }
    let n = grid.n_max();
    let pk: Vec<f64> = (0..=n)
        .map(|i| poisson_weight(mu_k, i))
        .collect::<Result<_>>()?;
    let pl: Vec<f64> = (0..=n)
        .map(|i| poisson_weight(mu_l, i))
        .collect::<Result<_>>()?;
    let mut q = 0.0;
    for (i, &wk) in pk.iter().enumerate() {
        let mut row = 0.0;
        for (j, &wl) in pl.iter().enumerate() {
            row += wl * grid.get(i, j);
        }
        q += wk * row;
    }
    let covered = poisson_cdf(mu_k, n)? * poisson_cdf(mu_l, n)?;
    Ok(q + c_tail * (1.0 - covered))
}

/// Simulated Z-basis gain table over an intensity set (identical for both
/// outcomes under the channel symmetry).
pub fn simulate_gain_table(
    ch: &ChannelParams,
    intensities: &[f64],
    outcome: Outcome,
) -> Result<crate::types::GainTable> {
    let k = intensities.len();
    let mut q = Vec::with_capacity(k * k);
    for &a in intensities {
        for &b in intensities {
            q.push(z_gain(ch, a, b)?.clamp(0.0, 1.0));
        }
    }
    crate::types::GainTable::new(outcome, k, q)
}

/// n_cut for the phase-error sums: the smallest n with c_n < 1e-16, floored
/// at 25.
pub fn coefficient_cutoff(alpha2: f64) -> usize {
    let mut n = 0usize;
    loop {
        let c = math::coherent_coefficient(alpha2, n).unwrap_or(0.0);
        if (c < 1e-16 && n >= 25) || n >= 160 {
            return n.max(25);
        }
        n += 1;
    }
}
