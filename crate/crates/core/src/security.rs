//! Error rates and the asymptotic secret-key rate.
//!
//! The rate is R >= max{R_10, 0} + max{R_01, 0} with
//! R_kckd = p_X^2 p(k_c,k_d) [1 - f h(e_bit) - h(e_ph)], where e_ph is the
//! phase-error estimate built from the yield bounds: inside the bounded index
//! set each term carries sqrt(Y^U), outside it the bare coefficient product
//! (the yield is trivially 1).

use crate::channel::{self, x_gain_conditional, YieldKernel};
use crate::error::{Error, Result};
use crate::math::{binary_entropy, coherent_coefficient};
use crate::types::{ChannelParams, Outcome, ProtocolParams, YieldBoundSet};

/// Decoy configuration selecting which bound module feeds the phase-error
/// estimate; `Infinite` uses the exact model yields (truncated at 12 photons,
/// 1 beyond), the ideal reference of infinitely many decoys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DecoyMode {
    Two,
    Three,
    Four,
    Infinite,
}

impl DecoyMode {
    pub fn decoy_count(self) -> Option<usize> {
        match self {
            DecoyMode::Two => Some(2),
            DecoyMode::Three => Some(3),
            DecoyMode::Four => Some(4),
            DecoyMode::Infinite => None,
        }
    }
}

/// Per-outcome terms of one key-rate evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityResult {
    /// max{R_10, 0} + max{R_01, 0}.
    pub rate: f64,
    /// Raw per-outcome terms R_10, R_01 (may be negative).
    pub r: [f64; 2],
    pub p_click: [f64; 2],
    pub e_bit: [f64; 2],
    /// Phase-error upper estimate per outcome, capped at 1.
    pub e_ph: [f64; 2],
}

/// Privacy-amplification entropy term. The binary entropy is non-monotone
/// above 1/2, where a larger phase-error estimate would spuriously lower the
/// cost again; beyond 1/2 no key survives, so the term saturates at 1.
fn privacy_entropy(e_ph: f64) -> f64 {
    if e_ph >= 0.5 {
        1.0
    } else {
        binary_entropy(e_ph).expect("e_ph in [0, 0.5)")
    }
}

/// Coherent-state coefficients c_0..c_cut for the phase-error sums, with the
/// cut chosen by the c_n tail rule.
fn coefficients(alpha2: f64) -> Result<Vec<f64>> {
    let cut = channel::coefficient_cutoff(alpha2);
    (0..=cut).map(|n| coherent_coefficient(alpha2, n)).collect()
}

/// Uncapped phase-error sum; the public entry points cap at 1.
fn phase_error_from(
    c: &[f64],
    p_click: f64,
    mut weight: impl FnMut(usize, usize) -> f64,
) -> Result<f64> {
    if p_click <= 0.0 {
        return Err(Error::NoClicks);
    }
    let mut even = 0.0;
    let mut odd = 0.0;
    for i in 0..c.len() {
        let mut row = 0.0;
        for j in ((i % 2)..c.len()).step_by(2) {
            row += c[j] * weight(i, j);
        }
        if i % 2 == 0 {
            even += c[i] * row;
        } else {
            odd += c[i] * row;
        }
    }
    Ok((even * even + odd * odd) / p_click)
}

/// Phase-error estimate from a yield bound set: sqrt(Y^U) inside the bounded
/// index set, 1 outside; both parity sums truncated by the c_n tail rule and
/// the result capped at 1.
pub fn phase_error_bound(bounds: &YieldBoundSet, alpha2: f64, p_click: f64) -> Result<f64> {
    let c = coefficients(alpha2)?;
    // dense sqrt lookup over the small bounded square
    let mut sq = [[f64::NAN; 5]; 5];
    for (r, row) in sq.iter_mut().enumerate() {
        for (col, v) in row.iter_mut().enumerate() {
            *v = bounds.upper_or_one(r, col).clamp(0.0, 1.0).sqrt();
        }
    }
    Ok(phase_error_from(&c, p_click, |i, j| {
        if i < 5 && j < 5 && bounds.upper.contains_key(&(i as u8, j as u8)) {
            sq[i][j]
        } else {
            1.0
        }
    })?
    .min(1.0))
}

/// Phase-error estimate with the exact model yields for n, m <= n_trunc and
/// trivial yields beyond, the infinite-decoy reference.
pub fn phase_error_exact(
    kernel: &YieldKernel,
    ch: &ChannelParams,
    alpha2: f64,
    p_click: f64,
    n_trunc: usize,
) -> Result<f64> {
    let c = coefficients(alpha2)?;
    let mut sqrt_y = vec![vec![f64::NAN; n_trunc + 1]; n_trunc + 1];
    for (n, row) in sqrt_y.iter_mut().enumerate() {
        for (m, slot) in row.iter_mut().enumerate() {
            if (n + m) % 2 == 0 {
                *slot = kernel.yield_nm(ch, n, m)?.clamp(0.0, 1.0).sqrt();
            }
        }
    }
    Ok(phase_error_from(&c, p_click, |i, j| {
        if i <= n_trunc && j <= n_trunc {
            sqrt_y[i][j]
        } else {
            1.0
        }
    })?
    .min(1.0))
}

/// Bit-error rates per outcome through the conditional-gain route: the error
/// events for (1,0) are the anti-aligned bit pairs, for (0,1) the aligned
/// ones (Bob flips on a destructive click). Equals the closed form of the
/// channel model; the two routes are cross-checked in the tests.
pub fn bit_error_rates(ch: &ChannelParams, alpha2: f64) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for outcome in Outcome::BOTH {
        let mut total = 0.0;
        let mut errors = 0.0;
        for (b_a, b_b) in [(false, false), (false, true), (true, false), (true, true)] {
            let p = 0.25 * x_gain_conditional(ch, alpha2, outcome, b_a, b_b)?;
            total += p;
            let is_error = match outcome {
                Outcome::ClickC => b_a != b_b,
                Outcome::ClickD => b_a == b_b,
            };
            if is_error {
                errors += p;
            }
        }
        if total <= 0.0 {
            return Err(Error::NoClicks);
        }
        out[outcome.index()] = errors / total;
    }
    Ok(out)
}

/// Assemble a key rate from externally computed parts: per-outcome click
/// probabilities, bit-error rates and phase-error estimates.
pub fn key_rate_from_parts(
    params: &ProtocolParams,
    p_click: [f64; 2],
    e_bit: [f64; 2],
    e_ph: [f64; 2],
) -> Result<SecurityResult> {
    let mut r = [0.0; 2];
    for i in 0..2 {
        let h_bit = binary_entropy(e_bit[i].clamp(0.0, 1.0))?;
        r[i] = params.p_x * params.p_x
            * p_click[i]
            * (1.0 - params.f_ec * h_bit - privacy_entropy(e_ph[i]));
    }
    Ok(SecurityResult {
        rate: r[0].max(0.0) + r[1].max(0.0),
        r,
        p_click,
        e_bit,
        e_ph,
    })
}

/// Full simulated key rate: gains from the channel model, yield bounds per
/// the decoy mode, both outcomes evaluated independently.
///
/// For `Infinite` mode a [`YieldKernel`] covering at least 12 photons must be
/// supplied (it only depends on the misalignment angles and is reused across
/// sweep points); other modes ignore it.
pub fn key_rate(
    params: &ProtocolParams,
    ch: &ChannelParams,
    mode: DecoyMode,
    kernel: Option<&YieldKernel>,
) -> Result<SecurityResult> {
    let stats = channel::x_basis_stats(ch, params.alpha2)?;
    let e_bit = bit_error_rates(ch, params.alpha2)?;
    let mut e_ph = [0.0; 2];
    match mode {
        DecoyMode::Infinite => {
            let owned;
            let kernel = match kernel {
                Some(k) if k.matches(ch) && k.kmax() >= 12 => k,
                _ => {
                    owned = YieldKernel::new(ch, 12);
                    &owned
                }
            };
            for outcome in Outcome::BOTH {
                let i = outcome.index();
                e_ph[i] = phase_error_exact(kernel, ch, params.alpha2, stats.p_click[i], 12)?;
            }
        }
        DecoyMode::Two | DecoyMode::Three | DecoyMode::Four => {
            let mu = params.intensities.values();
            for outcome in Outcome::BOTH {
                let i = outcome.index();
                let gains = channel::simulate_gain_table(ch, mu, outcome)?;
                let set = match mode {
                    DecoyMode::Two => {
                        let input = crate::bounds::two::TwoDecoyInput::new(&params.intensities, gains)?;
                        crate::bounds::two::two_decoy_bounds(&input)?
                    }
                    DecoyMode::Three => {
                        let input =
                            crate::bounds::three::ThreeDecoyInput::new(&params.intensities, gains)?;
                        crate::bounds::three::three_decoy_bounds(&input)?
                    }
                    DecoyMode::Four => {
                        let input =
                            crate::bounds::four::FourDecoyInput::new(&params.intensities, gains)?;
                        crate::bounds::four::four_decoy_bounds(&input, None)?
                    }
                    DecoyMode::Infinite => unreachable!(),
                };
                e_ph[i] = phase_error_bound(&set, params.alpha2, stats.p_click[i])?;
            }
        }
    }
    key_rate_from_parts(params, stats.p_click, e_bit, e_ph)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::x_basis_stats;
    use crate::types::IntensitySet;

    fn ch(eta: f64, pd: f64) -> ChannelParams {
        ChannelParams::with_standard_misalignment(eta, pd).unwrap()
    }

    fn params(alpha2: f64, mu: Vec<f64>) -> ProtocolParams {
        let set = if mu.len() == 4 {
            IntensitySet::with_roles(mu).unwrap()
        } else {
            IntensitySet::descending(mu).unwrap()
        };
        ProtocolParams::new(alpha2, 1.0, 1.16, set).unwrap()
    }

    #[test]
    fn bit_error_routes_agree() {
        // summation route over conditional gains vs the closed form
        for (eta, pd, a2) in [(1e-3, 1e-7, 0.03), (0.3, 1e-6, 0.2), (1.0, 0.0, 0.5)] {
            let c = ch(eta, pd);
            let e = bit_error_rates(&c, a2).unwrap();
            let s = x_basis_stats(&c, a2).unwrap();
            assert!((e[0] - s.e_bit[0]).abs() < 1e-12, "{e:?} vs {:?}", s.e_bit);
            assert!((e[1] - s.e_bit[1]).abs() < 1e-12);
            assert!((e[0] - e[1]).abs() < 1e-13, "outcome symmetry");
        }
        // no dark counts and perfect alignment: error-free
        let c = ChannelParams::new(0.5, 0.0, 0.0, 0.0, 0.0).unwrap();
        let e = bit_error_rates(&c, 0.1).unwrap();
        assert!(e[0].abs() < 1e-15 && e[1].abs() < 1e-15);
    }

    #[test]
    fn phase_error_all_bounds_zero() {
        // all bounded yields 0 over a set covering every even pair up to the
        // coefficient cut: with tiny alpha2 the cut stops at 25, but indices
        // beyond the set still contribute 1. Use a dense zero set over the
        // 5x5 square and alpha2 small enough that c_n beyond n=4 is
        // negligible relative to the assertion tolerance.
        let mut upper = std::collections::BTreeMap::new();
        for n in 0..5u8 {
            for m in 0..5u8 {
                if (n + m) % 2 == 0 {
                    upper.insert((n, m), 0.0);
                }
            }
        }
        let set = YieldBoundSet {
            outcome: Outcome::ClickC,
            upper,
            lower_y22: None,
            clamped: vec![],
        };
        let e = phase_error_bound(&set, 1e-4, 0.5).unwrap();
        assert!(e < 1e-17, "only >=6-photon trivial terms remain: {e}");
    }

    #[test]
    fn phase_error_trivial_bounds_collapse() {
        // empty bounded set: Eq-direct evaluation must equal the closed
        // rearrangement ((sum even c)^2)^2 + ((sum odd c)^2)^2, an
        // independent summation order
        let alpha2 = 0.1;
        let p = 0.9;
        let c = coefficients(alpha2).unwrap();
        // direct double-sum order with trivial weights, uncapped
        let e = phase_error_from(&c, p, |_, _| 1.0).unwrap();
        // independent summation order: the double sums factorize
        let (mut ev, mut od) = (0.0, 0.0);
        for (n, cn) in c.iter().enumerate() {
            if n % 2 == 0 {
                ev += cn;
            } else {
                od += cn;
            }
        }
        let expect = ((ev * ev) * (ev * ev) + (od * od) * (od * od)) / p;
        assert!((e - expect).abs() < 1e-13 * expect, "{e} vs {expect}");
        // the public entry caps at 1
        let set = YieldBoundSet {
            outcome: Outcome::ClickC,
            upper: std::collections::BTreeMap::new(),
            lower_y22: None,
            clamped: vec![],
        };
        assert_eq!(phase_error_bound(&set, alpha2, p).unwrap(), 1.0);
    }

    #[test]
    fn phase_error_monotone_in_bounds() {
        // raising any single upper bound never lowers e_ph
        let c = ch(1e-3, 1e-7);
        let a2 = 0.05;
        let stats = x_basis_stats(&c, a2).unwrap();
        let mu = IntensitySet::descending(vec![0.3, 1e-2, 1e-3]).unwrap();
        let gains = crate::channel::simulate_gain_table(&c, mu.values(), Outcome::ClickC).unwrap();
        let input = crate::bounds::three::ThreeDecoyInput::new(&mu, gains).unwrap();
        let base_set = crate::bounds::three::three_decoy_bounds(&input).unwrap();
        let base = phase_error_bound(&base_set, a2, stats.p_click[0]).unwrap();
        for (&idx, &v) in base_set.upper.iter() {
            let mut bumped = base_set.clone();
            bumped.upper.insert(idx, (v + 0.07).min(1.0));
            let e = phase_error_bound(&bumped, a2, stats.p_click[0]).unwrap();
            assert!(e >= base - 1e-15, "bump {idx:?}: {e} < {base}");
        }
    }

    #[test]
    fn exact_phase_error_truncation_stable() {
        let c = ChannelParams::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let a2 = 0.3;
        let p = x_basis_stats(&c, a2).unwrap().p_click[0];
        let k16 = YieldKernel::new(&c, 16);
        let e12 = phase_error_exact(&k16, &c, a2, p, 12).unwrap();
        let e16 = phase_error_exact(&k16, &c, a2, p, 16).unwrap();
        assert!((e12 - e16).abs() <= 1e-6 * e12.max(1e-12), "{e12} vs {e16}");
        // ideal channel, small signal: vanishing phase error
        let tiny = phase_error_exact(&k16, &c, 1e-4,
            x_basis_stats(&c, 1e-4).unwrap().p_click[0], 12).unwrap();
        assert!(tiny < 1e-3, "{tiny}");
    }

    #[test]
    fn rate_clamps_and_mode_sanity() {
        let c = ch(1e-3, 1e-7);
        // two-decoy paper preset at 30 dB
        let p2 = params(0.03, vec![0.4, 1e-5]);
        let r2 = key_rate(&p2, &c, DecoyMode::Two, None).unwrap();
        assert!(r2.rate >= 0.0);
        assert_eq!(r2.rate, r2.r[0].max(0.0) + r2.r[1].max(0.0));
        assert!(r2.e_ph[0] <= 1.0 && r2.e_ph[0] >= 0.0);
        // infinite mode dominates the bound modes at the same settings
        let pi = params(0.03, vec![0.4, 1e-5]);
        let ri = key_rate(&pi, &c, DecoyMode::Infinite, None).unwrap();
        assert!(ri.rate >= r2.rate - 1e-12, "{} vs {}", ri.rate, r2.rate);
        // bounds produce a phase-error estimate at least as pessimistic
        assert!(r2.e_ph[0] >= ri.e_ph[0] - 1e-12);
    }

    #[test]
    fn ideal_channel_positive_rate() {
        // pd = 0, perfect alignment: e_bit = 0 and some alpha2 gives a
        // strictly positive rate at eta = 1
        let c = ChannelParams::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let p = params(0.2, vec![0.4, 1e-5]);
        let r = key_rate(&p, &c, DecoyMode::Infinite, None).unwrap();
        assert!(r.e_bit[0] == 0.0);
        assert!(r.rate > 0.0);
    }
}
