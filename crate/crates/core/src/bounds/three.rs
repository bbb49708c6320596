//! Yield bounds from three decoy intensity settings {mu_0 > mu_1 > mu_2 > 0}.
//!
//! Nine gain equations allow non-trivial upper bounds on all nine yields with
//! n + m <= 4 that enter the phase-error rate: Y_00, Y_11, Y_02, Y_20, Y_22,
//! Y_13, Y_31, Y_04 and Y_40. None of these combinations is valid when an
//! intensity is zero.
//!
//! Each auxiliary factor is implemented twice: the direct alternant
//! polynomial and the factored form whose sign is manifest. The two must
//! agree; the validation suite checks the algebra over random triples. The
//! row-index bounds (Y_20, Y_40, Y_31) are the column-index formulas applied
//! to the transposed gain table, so transpose duality holds bit-exactly.

use crate::error::{Error, Result};
use crate::math::{compensated_dot, exp_tail, homogeneous_sum, SEP_TOL};
use crate::types::{GainTable, IntensitySet, YieldBoundSet};

use super::{clamp_unit, pair_combo, rescaled_gains};

/// Input for the three-decoy bounds: a strictly descending positive triple
/// and the 3x3 gain table of one detector outcome.
#[derive(Debug, Clone)]
pub struct ThreeDecoyInput {
    mu: [f64; 3],
    gains: GainTable,
    qt: Vec<Vec<f64>>,
    qt_t: Vec<Vec<f64>>,
}

fn transpose(qt: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = qt.len();
    (0..k).map(|i| (0..k).map(|j| qt[j][i]).collect()).collect()
}

impl ThreeDecoyInput {
    pub fn new(intensities: &IntensitySet, gains: GainTable) -> Result<Self> {
        if intensities.len() != 3 {
            return Err(Error::IntensityCount {
                expected: "3",
                got: intensities.len(),
            });
        }
        intensities.require_positive()?;
        let mu = [intensities.get(0), intensities.get(1), intensities.get(2)];
        for i in 0..3 {
            for j in (i + 1)..3 {
                if mu[i] - mu[j] <= 0.0 {
                    return Err(Error::NotDescending {
                        index: j,
                        value: mu[j],
                    });
                }
                if mu[i] - mu[j] < SEP_TOL {
                    return Err(Error::DegenerateIntensities {
                        a: mu[i],
                        b: mu[j],
                        tol: SEP_TOL,
                    });
                }
            }
        }
        if gains.size() != 3 {
            return Err(Error::GainShape {
                expected: 3,
                got: gains.size() * gains.size(),
            });
        }
        let qt = rescaled_gains(&mu, &gains);
        let qt_t = transpose(&qt);
        Ok(ThreeDecoyInput {
            mu,
            gains,
            qt,
            qt_t,
        })
    }

    pub fn gains(&self) -> &GainTable {
        &self.gains
    }
}

// ---------------------------------------------------------------------------
// Auxiliary alternant factors, direct and factored forms.
// ---------------------------------------------------------------------------

/// A_22(mu_0, mu_1, mu_2, m) = mu_1^m (mu_0-mu_2) + mu_2^m (mu_1-mu_0)
/// + mu_0^m (mu_2-mu_1); zero for m in {0, 1}.
pub fn a22_direct(mu: [f64; 3], m: usize) -> f64 {
    let p = |x: f64| x.powi(m as i32);
    p(mu[1]) * (mu[0] - mu[2]) + p(mu[2]) * (mu[1] - mu[0]) + p(mu[0]) * (mu[2] - mu[1])
}

/// Factored A_22: (mu_0-mu_2)(mu_2-mu_1) sum_k mu_2^k (mu_0^{m-1-k} - mu_1^{m-1-k}).
pub fn a22_factored(mu: [f64; 3], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let mut s = 0.0;
    let mut pow2 = 1.0;
    for k in 0..m {
        let e = (m - 1 - k) as i32;
        s += pow2 * (mu[0].powi(e) - mu[1].powi(e));
        pow2 *= mu[2];
    }
    (mu[0] - mu[2]) * (mu[2] - mu[1]) * s
}

/// A_11(mu_0, mu_1, mu_2, m) = mu_1^m (mu_0^2-mu_2^2) + mu_2^m (mu_1^2-mu_0^2)
/// + mu_0^m (mu_2^2-mu_1^2).
pub fn a11_direct(mu: [f64; 3], m: usize) -> f64 {
    let p = |x: f64| x.powi(m as i32);
    p(mu[1]) * (mu[0] * mu[0] - mu[2] * mu[2])
        + p(mu[2]) * (mu[1] * mu[1] - mu[0] * mu[0])
        + p(mu[0]) * (mu[2] * mu[2] - mu[1] * mu[1])
}

/// Factored A_11 for m >= 3:
/// (mu_0-mu_2)(mu_1-mu_2)(mu_1-mu_0) F(m) with F(m) >= 0.
pub fn a11_factored(mu: [f64; 3], m: usize) -> f64 {
    assert!(m >= 3, "factored A_11 printed for m >= 3");
    let mut total = 0.0;
    let mut pow2 = 1.0;
    for k in 0..=(m - 3) {
        let mut inner = 0.0;
        for j in 0..=(m - 3 - k) {
            inner += mu[1].powi((m - 2 - k - j) as i32) * mu[0].powi(j as i32);
        }
        total += pow2 * ((mu[2] + mu[0]) * inner + mu[2] * mu[0].powi((m - 2 - k) as i32));
        pow2 *= mu[2];
    }
    (mu[0] - mu[2]) * (mu[1] - mu[2]) * (mu[1] - mu[0]) * total
}

/// B_02(mu_0, mu_1, mu_2, n) = mu_1 mu_2 mu_0^n (mu_1-mu_2)
/// + mu_0^2 (mu_1 mu_2^n - mu_2 mu_1^n) + mu_0 (mu_2^2 mu_1^n - mu_1^2 mu_2^n).
pub fn b02_direct(mu: [f64; 3], n: usize) -> f64 {
    let p = |x: f64| x.powi(n as i32);
    mu[1] * mu[2] * p(mu[0]) * (mu[1] - mu[2])
        + mu[0] * mu[0] * (mu[1] * p(mu[2]) - mu[2] * p(mu[1]))
        + mu[0] * (mu[2] * mu[2] * p(mu[1]) - mu[1] * mu[1] * p(mu[2]))
}

/// Factored B_02 for n >= 2:
/// mu_0 mu_1 mu_2 (mu_1-mu_2)(mu_0-mu_2) sum_k mu_2^k (mu_0^{n-2-k} - mu_1^{n-2-k}).
pub fn b02_factored(mu: [f64; 3], n: usize) -> f64 {
    assert!(n >= 2, "factored B_02 printed for n >= 2");
    let mut s = 0.0;
    let mut pow2 = 1.0;
    for k in 0..=(n - 2) {
        let e = (n - 2 - k) as i32;
        s += pow2 * (mu[0].powi(e) - mu[1].powi(e));
        pow2 *= mu[2];
    }
    mu[0] * mu[1] * mu[2] * (mu[1] - mu[2]) * (mu[0] - mu[2]) * s
}

/// A_00(mu_0, mu_1, mu_2, m) = mu_1^m (mu_2^2 mu_0 - mu_2 mu_0^2) plus the
/// cyclic companions; satisfies A_00(m) = -mu_0 mu_1 mu_2 A_22(m-1).
pub fn a00_direct(mu: [f64; 3], m: usize) -> f64 {
    let p = |x: f64| x.powi(m as i32);
    p(mu[1]) * (mu[2] * mu[2] * mu[0] - mu[2] * mu[0] * mu[0])
        + p(mu[2]) * (mu[0] * mu[0] * mu[1] - mu[0] * mu[1] * mu[1])
        + p(mu[0]) * (mu[1] * mu[1] * mu[2] - mu[1] * mu[2] * mu[2])
}

/// Factored A_00 for m >= 2:
/// mu_0 mu_1 mu_2 (mu_0-mu_2)(mu_1-mu_2) sum_k mu_2^k (mu_0^{m-2-k} - mu_1^{m-2-k}).
pub fn a00_factored(mu: [f64; 3], m: usize) -> f64 {
    assert!(m >= 2, "factored A_00 printed for m >= 2");
    let mut s = 0.0;
    let mut pow2 = 1.0;
    for k in 0..=(m - 2) {
        let e = (m - 2 - k) as i32;
        s += pow2 * (mu[0].powi(e) - mu[1].powi(e));
        pow2 *= mu[2];
    }
    mu[0] * mu[1] * mu[2] * (mu[0] - mu[2]) * (mu[1] - mu[2]) * s
}

// ---------------------------------------------------------------------------
// Gain combinations (all on rescaled gains).
// ---------------------------------------------------------------------------

fn g22(mu: [f64; 3], qt: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let (mi, mj) = (mu[i], mu[j]);
    pair_combo(qt, i, j, mj * mj, mi * mi, mi * mj, mi * mj)
}

fn g11(qt: &[Vec<f64>], i: usize, j: usize) -> f64 {
    pair_combo(qt, i, j, 1.0, 1.0, 1.0, 1.0)
}

fn g02(mu: [f64; 3], qt: &[Vec<f64>], i: usize, j: usize) -> f64 {
    let (mi, mj) = (mu[i], mu[j]);
    pair_combo(qt, i, j, mj, mi, mj, mi)
}

/// Coefficients of the nine-gain Y_13 combination, normalized to c_00 = 1;
/// the Y_31 combination uses the transpose of this table.
fn c13_table(mu: [f64; 3]) -> [[f64; 3]; 3] {
    let (m0, m1, m2) = (mu[0], mu[1], mu[2]);
    let c01 = -(m0 - m2) / (m1 - m2);
    let c02 = (m0 - m1) / (m1 - m2);
    let c10 = -(m0 * m0 - m2 * m2) / (m1 * m1 - m2 * m2);
    [
        [1.0, c01, c02],
        [c10, c10 * c01, c10 * c02],
        [-1.0 - c10, c01 * (-1.0 - c10), (1.0 + c10) * (1.0 + c01)],
    ]
}

fn g13(mu: [f64; 3], qt: &[Vec<f64>]) -> f64 {
    let c = c13_table(mu);
    let mut terms = Vec::with_capacity(9);
    for (i, row) in c.iter().enumerate() {
        for (j, &cc) in row.iter().enumerate() {
            terms.push((cc, qt[i][j]));
        }
    }
    compensated_dot(&terms)
}

// ---------------------------------------------------------------------------
// Individual bounds (raw, unclamped).
// ---------------------------------------------------------------------------

fn bound_y22(inp: &ThreeDecoyInput) -> f64 {
    let m = inp.mu;
    let qt = &inp.qt;
    4.0 * (g22(m, qt, 0, 1) / (m[0] * m[1] * (m[0] - m[1]))
        - g22(m, qt, 0, 2) / (m[0] * m[2] * (m[0] - m[2]))
        + g22(m, qt, 1, 2) / (m[1] * m[2] * (m[1] - m[2])))
        / ((m[0] - m[1]) * (m[0] - m[2]) * (m[1] - m[2]))
}

fn y02_numerator(mu: [f64; 3], qt: &[Vec<f64>]) -> f64 {
    mu[2] * g02(mu, qt, 0, 1) / (mu[0] - mu[1]) - mu[1] * g02(mu, qt, 0, 2) / (mu[0] - mu[2])
        + mu[0] * g02(mu, qt, 1, 2) / (mu[1] - mu[2])
}

fn y02_raw(mu: [f64; 3], qt: &[Vec<f64>]) -> f64 {
    2.0 * y02_numerator(mu, qt) / ((mu[0] - mu[2]) * (mu[1] - mu[2]) * (mu[0] - mu[1]))
}

/// Shared denominator of the Y_04/Y_40 bounds,
/// mu_1(mu_0^4-mu_2^4) - mu_0(mu_1^4-mu_2^4) - mu_2(mu_0^4-mu_1^4),
/// evaluated through its stable factorization -A_22(4) =
/// (mu_0-mu_1)(mu_0-mu_2)(mu_1-mu_2) h_2(mu_0, mu_1, mu_2).
fn y04_denominator(mu: [f64; 3]) -> f64 {
    (mu[0] - mu[1]) * (mu[0] - mu[2]) * (mu[1] - mu[2]) * homogeneous_sum(&mu, 2)
}

fn y04_raw(mu: [f64; 3], qt: &[Vec<f64>]) -> f64 {
    24.0 * y02_numerator(mu, qt) / y04_denominator(mu)
}

/// The exponential alternant brackets of the Y_13/Y_31 bounds, assembled from
/// Taylor tails so nothing is lost when the weak decoys sit at 1e-3..1e-5:
///   br1 = sum_{m>=2} A_22(m)/m!,  br2 = sum_{m>=3} A_11(m)/m!.
fn y13_brackets(mu: [f64; 3]) -> (f64, f64) {
    let br1 = (mu[0] - mu[2]) * exp_tail(mu[1], 2)
        + (mu[1] - mu[0]) * exp_tail(mu[2], 2)
        + (mu[2] - mu[1]) * exp_tail(mu[0], 2);
    let br2 = (mu[0] * mu[0] - mu[2] * mu[2]) * exp_tail(mu[1], 3)
        + (mu[1] * mu[1] - mu[0] * mu[0]) * exp_tail(mu[2], 3)
        + (mu[2] * mu[2] - mu[1] * mu[1]) * exp_tail(mu[0], 3);
    (br1, br2)
}

fn y13_raw(mu: [f64; 3], qt: &[Vec<f64>]) -> f64 {
    let g = g13(mu, qt);
    let (br1, br2) = y13_brackets(mu);
    let den =
        (mu[0] - mu[2]) * (mu[0] - mu[2]) * (mu[0] - mu[1]) * (mu[0] - mu[1]) * (mu[0] + mu[1] + mu[2]);
    let d12 = mu[1] - mu[2];
    -6.0 * (mu[1] + mu[2]) * g / den + 6.0 * br1 * br2 / (d12 * d12 * den)
}

/// E_11: the all-ones remainder of the Y_11 combination. Equal to
/// sum_{n>=4} A_11(n)/n! / ((mu_0+mu_2)(mu_1+mu_2)), assembled from Taylor
/// tails rather than the printed grouped differences, which lose all
/// precision below mu ~ 1e-3.
pub fn e11(mu: [f64; 3]) -> f64 {
    let s = (mu[0] * mu[0] - mu[2] * mu[2]) * exp_tail(mu[1], 4)
        + (mu[1] * mu[1] - mu[0] * mu[0]) * exp_tail(mu[2], 4)
        + (mu[2] * mu[2] - mu[1] * mu[1]) * exp_tail(mu[0], 4);
    s / ((mu[0] + mu[2]) * (mu[1] + mu[2]))
}

/// The printed grouped form of E_11 (three exponential-minus-polynomial
/// differences, each rebuilt from its Taylor tail); kept for the algebra
/// cross-check.
pub fn e11_grouped(mu: [f64; 3]) -> f64 {
    let d = |a: f64, b: f64| (a - b) * crate::math::pair_tail(a, b, 1, 4);
    d(mu[0], mu[1]) + (mu[0] + mu[1]) / (mu[1] + mu[2]) * d(mu[1], mu[2])
        - (mu[0] + mu[1]) / (mu[0] + mu[2]) * d(mu[0], mu[2])
}

/// The nine-gain Y_11 bound with the E_11 remainder and the clamped
/// Y_13/Y_31 upper bounds folded in.
fn y11_nine_gain(inp: &ThreeDecoyInput, y13_clamped: f64, y31_clamped: f64) -> f64 {
    let m = inp.mu;
    let qt = &inp.qt;
    let combo = g11(qt, 0, 1)
        - (m[0] * m[0] - m[1] * m[1]) / (m[0] * m[0] - m[2] * m[2]) * g11(qt, 0, 2)
        + (m[0] * m[0] - m[1] * m[1]) / (m[1] * m[1] - m[2] * m[2]) * g11(qt, 1, 2);
    let pref = (m[0] + m[2]) * (m[1] + m[2])
        / ((m[0] - m[1]) * (m[0] - m[1]) * (m[1] - m[2]) * (m[0] - m[2]));
    pref * (combo - 2.0 * (m[0] - m[1]) * e11(m))
        + (m[1] * m[2] + m[0] * m[1] + m[0] * m[2]) / 6.0 * (y13_clamped + y31_clamped)
}

/// Y_11 upper bound: the tightest of the nine-gain combination and the
/// single-pair combinations G_11^{i,j} / (mu_i - mu_j)^2 over the three
/// sub-pairs. Every component is a valid upper bound on its own; the
/// nine-gain form wins at ordinary operating points, while its
/// gain-independent all-ones remainder (the E_11 term) saturates at very
/// high loss, where the pair forms take over.
fn bound_y11(inp: &ThreeDecoyInput, y13_clamped: f64, y31_clamped: f64) -> f64 {
    let m = inp.mu;
    let qt = &inp.qt;
    let mut best = y11_nine_gain(inp, y13_clamped, y31_clamped);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let d = m[i] - m[j];
        best = best.min(g11(qt, i, j) / (d * d));
    }
    best
}

fn bound_y00(inp: &ThreeDecoyInput) -> f64 {
    let m = inp.mu;
    let qt = &inp.qt;
    let num = m[2] * m[2] * g22(m, qt, 0, 1) / (m[0] - m[1])
        - m[1] * m[1] * g22(m, qt, 0, 2) / (m[0] - m[2])
        + m[0] * m[0] * g22(m, qt, 1, 2) / (m[1] - m[2]);
    num / ((m[0] - m[1]) * (m[0] - m[2]) * (m[1] - m[2]))
}

/// All nine three-decoy bounds, clamped into [0, 1]. Evaluation order is
/// pinned: Y_22, Y_02/Y_04, Y_20/Y_40, Y_13, Y_31, then Y_11 (which consumes
/// the clamped Y_13/Y_31), then Y_00.
pub fn three_decoy_bounds(input: &ThreeDecoyInput) -> Result<YieldBoundSet> {
    let mu = input.mu;
    let mut clamped = Vec::new();
    let mut upper = std::collections::BTreeMap::new();
    let put = |idx: (u8, u8), raw: f64, clamped: &mut Vec<(u8, u8)>,
                   upper: &mut std::collections::BTreeMap<(u8, u8), f64>| {
        let v = clamp_unit(raw, idx, clamped);
        upper.insert(idx, v);
        v
    };
    put((2, 2), bound_y22(input), &mut clamped, &mut upper);
    put((0, 2), y02_raw(mu, &input.qt), &mut clamped, &mut upper);
    put((0, 4), y04_raw(mu, &input.qt), &mut clamped, &mut upper);
    put((2, 0), y02_raw(mu, &input.qt_t), &mut clamped, &mut upper);
    put((4, 0), y04_raw(mu, &input.qt_t), &mut clamped, &mut upper);
    let y13 = put((1, 3), y13_raw(mu, &input.qt), &mut clamped, &mut upper);
    let y31 = put((3, 1), y13_raw(mu, &input.qt_t), &mut clamped, &mut upper);
    put((1, 1), bound_y11(input, y13, y31), &mut clamped, &mut upper);
    put((0, 0), bound_y00(input), &mut clamped, &mut upper);
    Ok(YieldBoundSet {
        outcome: input.gains.outcome,
        upper,
        lower_y22: None,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Outcome;

    fn input(mu: [f64; 3], q: Vec<f64>) -> ThreeDecoyInput {
        let set = IntensitySet::descending(mu.to_vec()).unwrap();
        let gains = GainTable::new(Outcome::ClickC, 3, q).unwrap();
        ThreeDecoyInput::new(&set, gains).unwrap()
    }

    #[test]
    fn aux_factor_hand_values() {
        // the three terms of A_22 cancel for m = 1 (and m = 0)
        assert!(a22_direct([0.5, 0.2, 0.07], 1).abs() < 1e-17);
        assert!(a22_direct([0.5, 0.2, 0.07], 0).abs() < 1e-17);
        // direct equals factored, frozen spot value
        let d = a22_direct([0.5, 0.1, 0.01], 3);
        assert!((d - (-0.010760400000000002)).abs() < 1e-15);
        assert!((d - a22_factored([0.5, 0.1, 0.01], 3)).abs() < 1e-15);
        // A_00 identity: A_00(m) = -mu0 mu1 mu2 A_22(m-1)
        let mu = [0.37, 0.12, 0.003];
        // m = 2: both sides vanish (A_22(1) = 0), up to rounding residue
        assert!(a00_direct(mu, 2).abs() < 1e-18);
        for m in 3..=7 {
            let lhs = a00_direct(mu, m);
            let rhs = -mu[0] * mu[1] * mu[2] * a22_direct(mu, m - 1);
            assert!(
                (lhs - rhs).abs() < 1e-10 * lhs.abs().max(1e-300),
                "m={m}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn factored_forms_agree() {
        let mus = [
            [0.5, 0.1, 0.01],
            [0.9, 0.04, 0.001],
            [0.2, 0.11, 0.05],
            [2.5, 0.6, 0.2],
        ];
        for mu in mus {
            for m in 3..=9 {
                let pairs = [
                    (a22_direct(mu, m), a22_factored(mu, m)),
                    (a11_direct(mu, m), a11_factored(mu, m)),
                    (b02_direct(mu, m), b02_factored(mu, m)),
                    (a00_direct(mu, m), a00_factored(mu, m)),
                ];
                for (d, f) in pairs {
                    assert!(
                        (d - f).abs() <= 1e-10 * d.abs().max(1e-300),
                        "mu={mu:?} m={m}: {d} vs {f}"
                    );
                }
            }
        }
    }

    #[test]
    fn e11_routes_agree() {
        for mu in [
            [0.5, 0.01, 0.001],
            [0.3, 0.1, 0.05],
            [1.2, 0.4, 0.2],
            [0.5, 1e-4, 1e-5],
        ] {
            let a = e11(mu);
            let b = e11_grouped(mu);
            assert!(
                (a - b).abs() <= 1e-11 * a.abs().max(1e-300),
                "mu={mu:?}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn zero_gain_corner() {
        let inp = input([0.5, 0.01, 0.001], vec![0.0; 9]);
        let set = three_decoy_bounds(&inp).unwrap();
        // combinations vanish where the formula is homogeneous in the gains
        assert_eq!(set.upper_or_one(2, 2), 0.0);
        assert_eq!(set.upper_or_one(0, 2), 0.0);
        assert_eq!(set.upper_or_one(2, 0), 0.0);
        assert_eq!(set.upper_or_one(0, 0), 0.0);
        assert_eq!(set.upper_or_one(0, 4), 0.0);
        assert_eq!(set.upper_or_one(4, 0), 0.0);
        // Y_13/Y_31 keep their gain-independent remainder, clamped to [0,1]
        for idx in [(1usize, 3usize), (3, 1), (1, 1)] {
            let v = set.upper_or_one(idx.0, idx.1);
            assert!((0.0..=1.0).contains(&v));
        }
        assert!(set.lower_y22.is_none());
    }

    #[test]
    fn transpose_duality() {
        let q: Vec<f64> = (0..9).map(|i| 0.02 + 0.03 * i as f64).collect();
        let mu = [0.5, 0.01, 0.001];
        let inp = input(mu, q.clone());
        let mut qt = vec![0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                qt[j * 3 + i] = q[i * 3 + j];
            }
        }
        let inp_t = input(mu, qt);
        let a = three_decoy_bounds(&inp).unwrap();
        let b = three_decoy_bounds(&inp_t).unwrap();
        assert_eq!(a.upper_or_one(2, 0), b.upper_or_one(0, 2));
        assert_eq!(a.upper_or_one(4, 0), b.upper_or_one(0, 4));
        assert_eq!(a.upper_or_one(3, 1), b.upper_or_one(1, 3));
        // symmetric-combination bounds are invariant up to summation order
        let rel = |x: f64, y: f64| (x - y).abs() <= 1e-13 * x.abs().max(1e-300);
        assert!(rel(a.upper_or_one(0, 0), b.upper_or_one(0, 0)));
        assert!(rel(a.upper_or_one(2, 2), b.upper_or_one(2, 2)));
    }

    #[test]
    fn zero_intensity_rejected() {
        let set = IntensitySet::descending(vec![0.5, 0.01, 0.0]).unwrap();
        let gains = GainTable::new(Outcome::ClickC, 3, vec![0.0; 9]).unwrap();
        assert!(matches!(
            ThreeDecoyInput::new(&set, gains),
            Err(Error::NonpositiveIntensity(_))
        ));
    }
}
