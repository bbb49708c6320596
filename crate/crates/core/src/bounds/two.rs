//! Yield bounds from two decoy intensity settings {mu_0 > mu_1}.
//!
//! Four gain equations constrain the infinite yield set; combining them
//! cancels whole rows and columns of yields and leaves closed-form upper
//! bounds on Y_00, Y_11, Y_02 and Y_20 (plus generic Y_0m / Y_n0 bounds and a
//! lower bound on Y_22, which the Y_00 bound consumes).
//!
//! The row-index bounds (Y_20, Y_n0) are the column-index formulas applied to
//! the transposed gain table, so the transpose duality holds bit-exactly.

use crate::error::{Error, Result};
use crate::math::{exp_diff, exp_pair_bracket, factorial, homogeneous_sum, pair_tail, SEP_TOL};
use crate::types::{GainTable, IntensitySet, YieldBoundSet};

use super::{clamp_unit, pair_combo, rescaled_gains};

/// Input for the two-decoy bounds: a descending intensity pair and the 2x2
/// gain table of one detector outcome.
#[derive(Debug, Clone)]
pub struct TwoDecoyInput {
    mu0: f64,
    mu1: f64,
    gains: GainTable,
    qt: Vec<Vec<f64>>,
    qt_t: Vec<Vec<f64>>,
}

fn transpose(qt: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = qt.len();
    (0..k).map(|i| (0..k).map(|j| qt[j][i]).collect()).collect()
}

impl TwoDecoyInput {
    pub fn new(intensities: &IntensitySet, gains: GainTable) -> Result<Self> {
        if intensities.len() != 2 {
            return Err(Error::IntensityCount {
                expected: "2",
                got: intensities.len(),
            });
        }
        let (mu0, mu1) = (intensities.get(0), intensities.get(1));
        if mu0 <= mu1 {
            return Err(Error::NotDescending {
                index: 1,
                value: mu1,
            });
        }
        if mu0 - mu1 < SEP_TOL {
            return Err(Error::DegenerateIntensities {
                a: mu0,
                b: mu1,
                tol: SEP_TOL,
            });
        }
        if gains.size() != 2 {
            return Err(Error::GainShape {
                expected: 2,
                got: gains.size() * gains.size(),
            });
        }
        let qt = rescaled_gains(&[mu0, mu1], &gains);
        let qt_t = transpose(&qt);
        Ok(TwoDecoyInput {
            mu0,
            mu1,
            gains,
            qt,
            qt_t,
        })
    }

    pub fn gains(&self) -> &GainTable {
        &self.gains
    }

    /// Rescaled gains Qt^{k,l} = e^{mu_k+mu_l} Q^{k,l}.
    pub fn rescaled(&self) -> &[Vec<f64>] {
        &self.qt
    }
}

fn g11(qt: &[Vec<f64>]) -> f64 {
    pair_combo(qt, 0, 1, 1.0, 1.0, 1.0, 1.0)
}

fn g02(mu0: f64, mu1: f64, qt: &[Vec<f64>]) -> f64 {
    pair_combo(qt, 0, 1, mu1, mu0, mu1, mu0)
}

fn g00(mu0: f64, mu1: f64, qt: &[Vec<f64>]) -> f64 {
    pair_combo(qt, 0, 1, mu1 * mu1, mu0 * mu0, mu0 * mu1, mu0 * mu1)
}

/// Raw (unclamped) upper bound on Y_11: G_11 / (mu_0 - mu_1)^2.
pub fn bound_y11(input: &TwoDecoyInput) -> f64 {
    let d = input.mu0 - input.mu1;
    g11(&input.qt) / (d * d)
}

fn y02_raw(mu0: f64, mu1: f64, qt: &[Vec<f64>]) -> f64 {
    let d = mu0 - mu1;
    (2.0 * exp_diff(mu0, mu1) * exp_pair_bracket(mu0, mu1) - 2.0 * g02(mu0, mu1, qt))
        / ((mu0 + mu1) * d * d)
}

/// Raw upper bound on Y_02.
pub fn bound_y02(input: &TwoDecoyInput) -> f64 {
    y02_raw(input.mu0, input.mu1, &input.qt)
}

/// Raw upper bound on Y_20: the Y_02 formula on the transposed gain table.
pub fn bound_y20(input: &TwoDecoyInput) -> f64 {
    y02_raw(input.mu0, input.mu1, &input.qt_t)
}

fn y0m_raw(mu0: f64, mu1: f64, qt: &[Vec<f64>], m: usize) -> f64 {
    let d = mu0 - mu1;
    // mu_0^m - mu_1^m = (mu_0 - mu_1) h_{m-1}(mu_0, mu_1)
    let power_diff = d * homogeneous_sum(&[mu0, mu1], m - 1);
    let raw = factorial(m) / (d * power_diff)
        * (-g02(mu0, mu1, qt) + exp_diff(mu0, mu1) * exp_pair_bracket(mu0, mu1));
    raw.min(1.0)
}

/// Upper bound on a generic Y_0m, m >= 2, including the printed min{., 1}.
pub fn bound_y0m(input: &TwoDecoyInput, m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain("column index m", m as f64, "[2, inf)"));
    }
    Ok(y0m_raw(input.mu0, input.mu1, &input.qt, m))
}

/// Upper bound on a generic Y_n0, n >= 2, including the printed min{., 1}.
pub fn bound_yn0(input: &TwoDecoyInput, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("row index n", n as f64, "[2, inf)"));
    }
    Ok(y0m_raw(input.mu0, input.mu1, &input.qt_t, n))
}

/// Lower bound on Y_22, with the printed max{., 0}.
pub fn lower_y22(input: &TwoDecoyInput) -> f64 {
    let (m0, m1) = (input.mu0, input.mu1);
    let (d, s) = (m0 - m1, m0 + m1);
    let ed = exp_diff(m0, m1);
    (4.0 * (g11(&input.qt) - ed * ed) / (d * d * s * s) + 1.0).max(0.0)
}

/// Raw upper bound on Y_00, composing the clamped sub-bounds on Y_02, Y_20,
/// Y_03, Y_30, Y_04, Y_40 and the Y_22 lower bound.
pub fn bound_y00(input: &TwoDecoyInput) -> Result<f64> {
    let (m0, m1) = (input.mu0, input.mu1);
    let d = m0 - m1;
    let cl = |x: f64| x.clamp(0.0, 1.0);
    let y02 = cl(bound_y02(input));
    let y20 = cl(bound_y20(input));
    let y03 = cl(bound_y0m(input, 3)?);
    let y30 = cl(bound_yn0(input, 3)?);
    let y04 = cl(bound_y0m(input, 4)?);
    let y40 = cl(bound_yn0(input, 4)?);
    let y22l = cl(lower_y22(input));
    // tail: (2/d) [mu_1 (e^{mu_0} - prefix) - mu_0 (e^{mu_1} - prefix)]
    //     = 2 mu_0 mu_1 sum_{k>=5} h_{k-2}(mu_0, mu_1) / k!
    let tail = 2.0 * m0 * m1 * pair_tail(m0, m1, 2, 5);
    Ok(g00(m0, m1, &input.qt) / (d * d)
        + m0 * m1 / d
            * (d / 2.0 * (y02 + y20)
                + (m0 * m0 - m1 * m1) / 6.0 * (y03 + y30)
                + (m0 * m0 * m0 - m1 * m1 * m1) / 24.0 * (y04 + y40))
        + tail
        - m0 * m0 * m1 * m1 / 4.0 * y22l)
}

/// All two-decoy bounds, clamped into [0, 1], over the index set
/// {(0,0), (1,1), (0,2), (2,0)}; other indices stay trivially bounded by 1.
pub fn two_decoy_bounds(input: &TwoDecoyInput) -> Result<YieldBoundSet> {
    let mut clamped = Vec::new();
    let mut upper = std::collections::BTreeMap::new();
    upper.insert((0, 0), clamp_unit(bound_y00(input)?, (0, 0), &mut clamped));
    upper.insert((1, 1), clamp_unit(bound_y11(input), (1, 1), &mut clamped));
    upper.insert((0, 2), clamp_unit(bound_y02(input), (0, 2), &mut clamped));
    upper.insert((2, 0), clamp_unit(bound_y20(input), (2, 0), &mut clamped));
    let y22l = lower_y22(input).clamp(0.0, 1.0);
    Ok(YieldBoundSet {
        outcome: input.gains.outcome,
        upper,
        lower_y22: Some(y22l),
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Outcome;

    fn input(mu0: f64, mu1: f64, q: Vec<f64>) -> TwoDecoyInput {
        let set = IntensitySet::descending(vec![mu0, mu1]).unwrap();
        let gains = GainTable::new(Outcome::ClickC, 2, q).unwrap();
        TwoDecoyInput::new(&set, gains).unwrap()
    }

    #[test]
    fn rescaling() {
        let inp = input(0.1, 0.01, vec![0.0, 0.2, 0.1, 0.3]);
        // Qt^{0,1} = e^{0.11} * 0.2, frozen from direct evaluation
        assert!((inp.rescaled()[0][1] - 0.22325561409177427).abs() < 1e-15);
        let zero = input(0.1, 0.01, vec![0.0; 4]);
        assert!(zero.rescaled().iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn equal_rescaled_gains_annihilate_y11() {
        // gains chosen so that e^{mu_k+mu_l} Q^{k,l} is constant; the G_11
        // combination then cancels identically
        let c = 0.25;
        let q = vec![
            c * (-0.6f64).exp(),
            c * (-0.304f64).exp(),
            c * (-0.304f64).exp(),
            c * (-0.008f64).exp(),
        ];
        let inp = input(0.3, 0.004, q);
        assert!(bound_y11(&inp).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_corners() {
        let inp = input(0.5, 1e-5, vec![0.0; 4]);
        assert_eq!(bound_y11(&inp), 0.0);
        assert_eq!(lower_y22(&inp), 0.0, "max clamp at zero gains");
        let set = two_decoy_bounds(&inp).unwrap();
        assert_eq!(set.upper_or_one(1, 1), 0.0);
        // Y_02/Y_20 raw values at zero gains are positive (pure tail terms)
        assert!(bound_y02(&inp) > 0.0);
        assert_eq!(bound_y02(&inp), bound_y20(&inp));
        // Y_00 composition evaluated then clamped
        let y00 = set.upper_or_one(0, 0);
        assert!((0.0..=1.0).contains(&y00));
        // outside the set: trivial bound
        assert_eq!(set.upper_or_one(3, 3), 1.0);
    }

    #[test]
    fn y0m_clamp_branch() {
        // a dominant Q^{1,0} drives -G_02 far above the clamp threshold
        let inp = input(0.5, 1e-5, vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(bound_y0m(&inp, 3).unwrap(), 1.0);
        // transposed: Q^{0,1} dominant clamps the row bound
        let inp_t = input(0.5, 1e-5, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(bound_yn0(&inp_t, 4).unwrap(), 1.0);
        assert!(bound_y0m(&inp, 1).is_err());
    }

    #[test]
    fn transpose_maps_row_to_column_bounds() {
        let q = vec![0.11, 0.32, 0.05, 0.41];
        let inp = input(0.4, 0.03, q.clone());
        let qt = vec![q[0], q[2], q[1], q[3]];
        let inp_t = input(0.4, 0.03, qt);
        assert_eq!(bound_y20(&inp), bound_y02(&inp_t));
        assert_eq!(bound_y02(&inp), bound_y20(&inp_t));
        assert_eq!(bound_yn0(&inp, 4).unwrap(), bound_y0m(&inp_t, 4).unwrap());
    }

    #[test]
    fn degenerate_pair_rejected() {
        let set = IntensitySet::descending(vec![0.1, 0.1 - 1e-12]);
        assert!(set.is_err());
    }
}
