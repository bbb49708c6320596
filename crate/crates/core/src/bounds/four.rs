//! Four-decoy upper bounds on Y_13, Y_31, Y_04 and Y_40. The remaining five
//! indices reuse the three-decoy bounds on {mu_0, mu_1, mu_2}: one more decoy
//! would not improve them appreciably.
//!
//! Unlike the two- and three-decoy sets, the fourth intensity is a free role
//! index rather than a magnitude rank; the optimizer routinely pushes mu_3
//! above 1 while mu_0..mu_2 stay fixed below 0.1. The combinations only
//! require pairwise separation, so the input accepts any role ordering.

use crate::error::{Error, Result};
use crate::math::{compensated_dot, exp_tail, homogeneous_sum};
use crate::types::{GainTable, IntensitySet, YieldBoundSet};

use super::{clamp_unit, pair_combo, rescaled_gains, three};

/// Input for the four-decoy bounds: four positive pairwise-separated
/// intensities in role order and the 4x4 gain table of one outcome.
#[derive(Debug, Clone)]
pub struct FourDecoyInput {
    mu: [f64; 4],
    gains: GainTable,
    qt: Vec<Vec<f64>>,
    qt_t: Vec<Vec<f64>>,
}

impl FourDecoyInput {
    pub fn new(intensities: &IntensitySet, gains: GainTable) -> Result<Self> {
        if intensities.len() != 4 {
            return Err(Error::IntensityCount {
                expected: "4",
                got: intensities.len(),
            });
        }
        intensities.require_positive()?;
        let v = intensities.values();
        let mu = [v[0], v[1], v[2], v[3]];
        if gains.size() != 4 {
            return Err(Error::GainShape {
                expected: 4,
                got: gains.size() * gains.size(),
            });
        }
        let qt = rescaled_gains(&mu, &gains);
        let qt_t = (0..4)
            .map(|i| (0..4).map(|j| qt[j][i]).collect())
            .collect();
        Ok(FourDecoyInput {
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

/// Complete homogeneous symmetric polynomial over the four intensities
/// (sum of all degree-d monomials with repetition; 1 at degree 0).
pub fn intensity_power_sum(mu: &[f64; 4], degree: usize) -> f64 {
    homogeneous_sum(mu, degree)
}

/// C_n coefficients of the Y_13 combination tail, defined recursively from
/// C_4 = e_3(mu) with power sums and the homogeneous tail; positive for
/// positive intensities.
pub fn c_n_recursion(mu: &[f64; 4], n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::domain("recursion index", n as f64, "[4, inf)"));
    }
    let e3 = mu[0] * mu[1] * mu[2] + mu[0] * mu[1] * mu[3] + mu[0] * mu[2] * mu[3]
        + mu[1] * mu[2] * mu[3];
    let e4 = mu[0] * mu[1] * mu[2] * mu[3];
    let mut c = vec![e3];
    for k in 5..=n {
        // power sums p_j = sum_i mu_i^j
        let mut s = 0.0;
        for j in 1..=(k - 4) {
            let p: f64 = mu.iter().map(|x| x.powi(j as i32)).sum();
            s += p * c[k - j - 4];
        }
        s -= e4 * homogeneous_sum(mu, k - 5);
        c.push(s / (k - 4) as f64);
    }
    Ok(c[n - 4])
}

/// The six pair-combination coefficients removing Y_2m, Y_3m, Y_n1 and Y_n2
/// from the Y_04 combination, normalized to c_01 = 1; indexed (i, j), j > i.
fn c04_coeffs(mu: &[f64; 4]) -> [((usize, usize), f64); 6] {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    [
        ((0, 1), 1.0),
        (
            (0, 2),
            -d(0, 1) * mu[1] * d(1, 3) / (d(0, 2) * mu[2] * d(2, 3)),
        ),
        (
            (0, 3),
            d(0, 1) * mu[1] * d(1, 2) / (d(0, 3) * mu[3] * d(2, 3)),
        ),
        (
            (1, 2),
            d(0, 1) * mu[0] * d(0, 3) / (d(1, 2) * mu[2] * d(2, 3)),
        ),
        (
            (1, 3),
            -d(0, 1) * mu[0] * d(0, 2) / (d(1, 3) * mu[3] * d(2, 3)),
        ),
        (
            (2, 3),
            mu[0] * mu[1] * d(0, 1) * d(0, 1) / (mu[2] * mu[3] * d(2, 3) * d(2, 3)),
        ),
    ]
}

/// Coefficient of Y_04 in its combination:
/// A_04(4) = -(mu0-mu1)^2 (mu0-mu2)(mu1-mu2)(mu0-mu3)(mu1-mu3)
///           (mu0+mu1+mu2+mu3) / (mu2 mu3).
fn a04_at_4(mu: &[f64; 4]) -> f64 {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    -(d(0, 1) * d(0, 1) * d(0, 2) * d(1, 2) * d(0, 3) * d(1, 3))
        * (mu[0] + mu[1] + mu[2] + mu[3])
        / (mu[2] * mu[3])
}

/// Generic A_04(m): the printed alternant form; the degree-(m-3) homogeneous
/// factorization is checked against this in the validation suite.
pub fn a04_direct(mu: &[f64; 4], m: usize) -> f64 {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    let p = |x: f64| x.powi(m as i32);
    -(d(0, 1) / (mu[2] * mu[3] * d(2, 3)))
        * (p(mu[0]) * d(1, 2) * d(1, 3) * d(2, 3) - p(mu[1]) * d(0, 2) * d(0, 3) * d(2, 3)
            + p(mu[2]) * d(0, 1) * d(0, 3) * d(1, 3)
            - p(mu[3]) * d(0, 1) * d(0, 2) * d(1, 2))
}

/// Factored A_04(m) for m >= 3.
pub fn a04_factored(mu: &[f64; 4], m: usize) -> f64 {
    assert!(m >= 3);
    let d = |i: usize, j: usize| mu[i] - mu[j];
    -(d(0, 1) * d(0, 1) * d(0, 2) * d(1, 2) * d(0, 3) * d(1, 3)) / (mu[2] * mu[3])
        * homogeneous_sum(mu, m - 3)
}

/// The squared exponential bracket of the Y_04/Y_40 tail sum. The bracket
/// equals the alternant series sum_{m>=3} S(m)/m! = V h-series, so its
/// square is nonnegative by construction.
pub fn b04_bracket_squared(mu: &[f64; 4]) -> f64 {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    let a0 = d(1, 2) * d(1, 3) * d(2, 3);
    let a1 = d(0, 2) * d(0, 3) * d(2, 3);
    let a2 = d(0, 1) * d(0, 3) * d(1, 3);
    let a3 = d(0, 1) * d(0, 2) * d(1, 2);
    let bracket = exp_tail(mu[0], 3) * a0 - exp_tail(mu[1], 3) * a1 + exp_tail(mu[2], 3) * a2
        - exp_tail(mu[3], 3) * a3;
    bracket * bracket
}

/// sum_{k>=0} h_k(mu) / (k + shift)! over the four intensities; every term
/// is positive. Maintains h_k over the variable prefixes:
/// h_k(x_0..x_j) = h_k(x_0..x_{j-1}) + x_j h_{k-1}(x_0..x_j).
fn homogeneous_tail_series(mu: &[f64; 4], shift: usize) -> f64 {
    let mut row = [1.0f64; 4]; // h_0 over each prefix
    let mut inv_fact = 1.0 / crate::math::factorial(shift);
    let mut sum = inv_fact; // k = 0 term
    for k in 1..400usize {
        let prev = row;
        row[0] = mu[0] * prev[0];
        for j in 1..4 {
            row[j] = row[j - 1] + mu[j] * prev[j];
        }
        inv_fact /= (k + shift) as f64;
        let term = row[3] * inv_fact;
        sum += term;
        if term < 1e-17 * sum && k >= 40 {
            break;
        }
    }
    sum
}

/// The all-ones tail subtracted by the Y_04/Y_40 bounds: the exact double
/// sum over the B_04 coefficients,
///   sum_{n>=4, m>=3} B_04(n, m) / (n! m!)
///     = mu_0 mu_1 (mu_0-mu_1)^2 (mu_0-mu_2)(mu_1-mu_2)(mu_1-mu_3)(mu_0-mu_3)
///       * S_3 * S_4,   with S_j = sum_k h_k(mu) / (k+j)!.
///
/// The printed collapsed form squares the m-series instead of pairing it
/// with the shifted n-series; that variant stays on the safe side of the
/// worst case but loses more than a decibel of tolerated loss at the lowest
/// dark-count rates, so the exact sum is used here (the squared form remains
/// available as [`b04_bracket_squared`] for the algebra checks).
pub fn b04_tail_sum(mu: &[f64; 4]) -> f64 {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    let s3 = homogeneous_tail_series(mu, 3);
    let s4 = homogeneous_tail_series(mu, 4);
    mu[0] * mu[1] * d(0, 1) * d(0, 1) * d(0, 2) * d(1, 2) * d(1, 3) * d(0, 3) * s3 * s4
}

/// G_04^{i,j} = mu_j Qt^{i,i} + mu_i Qt^{j,j} - mu_j Qt^{i,j} - mu_i Qt^{j,i};
/// the Y_40 combination uses the same formula on the transposed table.
fn g04(mu: &[f64; 4], qt: &[Vec<f64>], i: usize, j: usize) -> f64 {
    pair_combo(qt, i, j, mu[j], mu[i], mu[j], mu[i])
}

fn y04_raw(mu: &[f64; 4], qt: &[Vec<f64>]) -> f64 {
    let combo: f64 = compensated_dot(
        &c04_coeffs(mu)
            .iter()
            .map(|&((i, j), c)| (c, g04(mu, qt, i, j)))
            .collect::<Vec<_>>(),
    );
    24.0 / a04_at_4(mu) * (combo - b04_tail_sum(mu))
}

/// Coefficient table of the sixteen-gain Y_13 combination, normalized to
/// c_00 = 1; the Y_31 combination uses its transpose.
fn c13_table(mu: &[f64; 4]) -> [[f64; 4]; 4] {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    // w(a;b,c) = mu_a (mu_b + mu_c) + mu_b mu_c
    let w = |a: usize, b: usize, c: usize| mu[a] * (mu[b] + mu[c]) + mu[b] * mu[c];
    let w123 = w(1, 2, 3);
    let mut c = [[0.0; 4]; 4];
    c[0][0] = 1.0;
    c[0][1] = d(0, 2) * d(0, 3) / ((mu[2] - mu[1]) * d(1, 3));
    c[0][2] = d(0, 1) * d(0, 3) / (d(1, 2) * d(2, 3));
    c[0][3] = d(0, 1) * d(0, 2) / (d(1, 3) * (mu[3] - mu[2]));
    c[1][0] = -d(0, 2) * d(0, 3) * w(0, 2, 3) / (d(1, 2) * d(1, 3) * w123);
    c[1][1] =
        d(0, 2) * d(0, 2) * d(0, 3) * d(0, 3) * w(0, 2, 3) / (d(1, 2) * d(1, 2) * d(1, 3) * d(1, 3) * w123);
    c[1][2] = -d(0, 1) * d(0, 2) * d(0, 3) * d(0, 3) * w(0, 2, 3)
        / (d(1, 2) * d(1, 2) * d(1, 3) * d(2, 3) * w123);
    c[1][3] = d(0, 1) * d(0, 2) * d(0, 2) * d(0, 3) * w(0, 2, 3)
        / (d(1, 2) * d(1, 3) * d(1, 3) * d(2, 3) * w123);
    c[2][0] = d(0, 1) * d(0, 3) * w(0, 1, 3) / (d(1, 2) * d(2, 3) * w123);
    c[2][1] = -d(0, 1) * d(0, 2) * d(0, 3) * d(0, 3) * w(0, 1, 3)
        / (d(1, 2) * d(1, 2) * d(1, 3) * d(2, 3) * w123);
    c[2][2] =
        d(0, 1) * d(0, 1) * d(0, 3) * d(0, 3) * w(0, 1, 3) / (d(1, 2) * d(1, 2) * d(2, 3) * d(2, 3) * w123);
    c[2][3] = -d(0, 1) * d(0, 1) * d(0, 2) * d(0, 3) * w(0, 1, 3)
        / (d(1, 2) * d(1, 3) * d(2, 3) * d(2, 3) * w123);
    c[3][0] = d(0, 1) * d(0, 2) * w(0, 1, 2) / (d(1, 3) * (mu[3] - mu[2]) * w123);
    c[3][1] = d(0, 1) * d(0, 2) * d(0, 2) * d(0, 3) * w(0, 1, 2)
        / (d(1, 2) * d(1, 3) * d(1, 3) * d(2, 3) * w123);
    c[3][2] = -d(0, 1) * d(0, 1) * d(0, 2) * d(0, 3) * w(0, 1, 2)
        / (d(1, 2) * d(1, 3) * d(2, 3) * d(2, 3) * w123);
    c[3][3] =
        d(0, 1) * d(0, 1) * d(0, 2) * d(0, 2) * w(0, 1, 2) / (d(1, 3) * d(1, 3) * d(2, 3) * d(2, 3) * w123);
    c
}

/// Coefficient of Y_13 in its combination:
/// A_13(3) = (mu0-mu1)^2 (mu0-mu2)^2 (mu0-mu3)^2 / (mu2 mu3 + mu1 mu2 + mu1 mu3).
fn a13_at_3(mu: &[f64; 4]) -> f64 {
    let d = |i: usize, j: usize| mu[i] - mu[j];
    d(0, 1) * d(0, 1) * d(0, 2) * d(0, 2) * d(0, 3) * d(0, 3)
        / (mu[2] * mu[3] + mu[1] * mu[2] + mu[1] * mu[3])
}

fn y13_raw(mu: &[f64; 4], qt: &[Vec<f64>]) -> f64 {
    let c = c13_table(mu);
    let mut terms = Vec::with_capacity(16);
    for (i, row) in c.iter().enumerate() {
        for (j, &cc) in row.iter().enumerate() {
            terms.push((cc, qt[i][j]));
        }
    }
    6.0 / a13_at_3(mu) * compensated_dot(&terms)
}

/// Four-decoy bound set: Y_13, Y_31, Y_04 and Y_40 from the sixteen-gain
/// combinations, the other five indices from the three-decoy bounds on the
/// sub-table selected by `three_decoy_subset` (by default the fixed decoys
/// {mu_0, mu_1, mu_2}, which must be descending).
pub fn four_decoy_bounds(
    input: &FourDecoyInput,
    three_decoy_subset: Option<[usize; 3]>,
) -> Result<YieldBoundSet> {
    let subset = three_decoy_subset.unwrap_or([0, 1, 2]);
    let sub_mu: Vec<f64> = subset.iter().map(|&i| input.mu[i]).collect();
    let sub_set = IntensitySet::descending(sub_mu)?;
    let sub_gains = input.gains.subset(&subset);
    let three_input = three::ThreeDecoyInput::new(&sub_set, sub_gains)?;
    let mut set = three::three_decoy_bounds(&three_input)?;

    let mut clamped: Vec<(u8, u8)> = set
        .clamped
        .iter()
        .copied()
        .filter(|idx| !matches!(idx, (1, 3) | (3, 1) | (0, 4) | (4, 0)))
        .collect();
    let mut put = |idx: (u8, u8), raw: f64| {
        let v = clamp_unit(raw, idx, &mut clamped);
        set.upper.insert(idx, v);
    };
    put((0, 4), y04_raw(&input.mu, &input.qt));
    put((4, 0), y04_raw(&input.mu, &input.qt_t));
    put((1, 3), y13_raw(&input.mu, &input.qt));
    put((3, 1), y13_raw(&input.mu, &input.qt_t));
    set.clamped = clamped;
    set.outcome = input.gains.outcome;
    Ok(set)
}
