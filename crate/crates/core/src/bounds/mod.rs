//! Analytical decoy-state yield bounds. Each submodule derives upper bounds
//! on the yields entering the phase-error rate from the Z-basis gain tables
//! of two, three, or four intensity settings.
//!
//! All raw bound values are clamped into [0, 1] (yields are probabilities;
//! clamping is always sound and tightens the loose side). A clamp at zero can
//! only fire when the gain table is inconsistent with the exact Poisson
//! mixture, e.g. measured data with noise; such indices are reported in the
//! result's `clamped` list instead of erroring.

pub mod four;
pub mod three;
pub mod two;

use crate::math::compensated_dot;
use crate::types::GainTable;

/// Rescaled gains Qt^{k,l} = e^{mu_k + mu_l} Q^{k,l}; the bound combinations
/// act on these.
pub fn rescaled_gains(intensities: &[f64], gains: &GainTable) -> Vec<Vec<f64>> {
    let k = intensities.len();
    debug_assert_eq!(gains.size(), k);
    (0..k)
        .map(|a| {
            (0..k)
                .map(|b| (intensities[a] + intensities[b]).exp() * gains.get(a, b))
                .collect()
        })
        .collect()
}

/// Gain combination c11*Qt^{i,i} + c22*Qt^{j,j} - c12*Qt^{i,j} - c21*Qt^{j,i}
/// evaluated with compensated arithmetic; these combinations cancel most of
/// the gains' leading content.
pub(crate) fn pair_combo(
    qt: &[Vec<f64>],
    i: usize,
    j: usize,
    c11: f64,
    c22: f64,
    c12: f64,
    c21: f64,
) -> f64 {
    compensated_dot(&[
        (c11, qt[i][i]),
        (c22, qt[j][j]),
        (-c12, qt[i][j]),
        (-c21, qt[j][i]),
    ])
}

/// Clamp a raw bound into [0, 1], recording the index when the clamp fires
/// materially.
pub(crate) fn clamp_unit(raw: f64, idx: (u8, u8), clamped: &mut Vec<(u8, u8)>) -> f64 {
    if (0.0..=1.0).contains(&raw) {
        raw
    } else {
        clamped.push(idx);
        raw.clamp(0.0, 1.0)
    }
}
