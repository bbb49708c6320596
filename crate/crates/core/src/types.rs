//! Domain records shared by every module. All are immutable after
//! construction and safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::SEP_TOL;

/// Detector outcome announced by the untrusted node. Only single-click events
/// (k_c + k_d = 1) are kept by the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    /// Click in the constructive-interference detector: (k_c, k_d) = (1, 0).
    #[serde(rename = "10")]
    ClickC,
    /// Click in the destructive-interference detector: (k_c, k_d) = (0, 1).
    #[serde(rename = "01")]
    ClickD,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::ClickC, Outcome::ClickD];

    pub fn index(self) -> usize {
        match self {
            Outcome::ClickC => 0,
            Outcome::ClickD => 1,
        }
    }

    /// Wire label used in gain CSV files.
    pub fn label(self) -> &'static str {
        match self {
            Outcome::ClickC => "10",
            Outcome::ClickD => "01",
        }
    }

    pub fn from_label(s: &str) -> Result<Outcome> {
        match s {
            "10" => Ok(Outcome::ClickC),
            "01" => Ok(Outcome::ClickD),
            _ => Err(Error::InvalidOutcome),
        }
    }
}

/// Ordered decoy intensities used in the Z basis.
///
/// Values are stored in role order mu_0, mu_1, ... The canonical two- and
/// three-decoy sets are strictly descending; the four-decoy set relaxes the
/// magnitude ordering because the free fourth intensity may exceed mu_0. All
/// constructors enforce pairwise separation of at least [`SEP_TOL`]: every
/// bound divides by intensity differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensitySet {
    values: Vec<f64>,
}

impl IntensitySet {
    /// Strictly descending set (two- and three-decoy bound paths).
    pub fn descending(values: Vec<f64>) -> Result<Self> {
        let set = Self::with_roles(values)?;
        for i in 1..set.values.len() {
            if set.values[i] >= set.values[i - 1] {
                return Err(Error::NotDescending {
                    index: i,
                    value: set.values[i],
                });
            }
        }
        Ok(set)
    }

    /// Role-ordered set with pairwise separation only (four-decoy path, where
    /// the optimized mu_3 may exceed mu_0).
    pub fn with_roles(values: Vec<f64>) -> Result<Self> {
        if !(2..=4).contains(&values.len()) {
            return Err(Error::IntensityCount {
                expected: "2..=4",
                got: values.len(),
            });
        }
        for &v in &values {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::domain("decoy intensity", v, "[0, inf)"));
            }
        }
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                if (values[i] - values[j]).abs() < SEP_TOL {
                    return Err(Error::DegenerateIntensities {
                        a: values[i],
                        b: values[j],
                        tol: SEP_TOL,
                    });
                }
            }
        }
        Ok(IntensitySet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    /// All values strictly positive (required by the three- and four-decoy
    /// bounds, which are not valid when any intensity is zero).
    pub fn require_positive(&self) -> Result<()> {
        for &v in &self.values {
            if v <= 0.0 {
                return Err(Error::NonpositiveIntensity(v));
            }
        }
        Ok(())
    }
}

/// Physical channel description. Each arm Alice-C and Bob-C carries
/// transmittance sqrt(eta); both detectors share the dark-count probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Total Alice->Bob transmittance, in (0, 1].
    pub eta: f64,
    /// Dark-count probability per detector, in [0, 1).
    pub pd: f64,
    /// Polarization rotation on Alice's arm (radians).
    pub theta_a: f64,
    /// Polarization rotation on Bob's arm (radians).
    pub theta_b: f64,
    /// Phase-mismatch fraction; the phase shift is phi = delta * pi.
    pub delta: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, pd: f64, theta_a: f64, theta_b: f64, delta: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
            return Err(Error::domain("transmittance", eta, "(0, 1]"));
        }
        if !pd.is_finite() || !(0.0..1.0).contains(&pd) {
            return Err(Error::domain("dark-count probability", pd, "[0, 1)"));
        }
        Ok(ChannelParams {
            eta,
            pd,
            theta_a,
            theta_b,
            delta,
        })
    }

    /// Default misalignment configuration: 2% polarization and phase, i.e.
    /// theta_A = -theta_B = arcsin(sqrt(0.02)), delta = 0.02.
    pub fn with_standard_misalignment(eta: f64, pd: f64) -> Result<Self> {
        let t = 0.02f64.sqrt().asin();
        Self::new(eta, pd, t, -t, 0.02)
    }

    /// Relative polarization rotation theta = theta_A - theta_B.
    pub fn theta(&self) -> f64 {
        self.theta_a - self.theta_b
    }

    /// Phase mismatch phi = delta * pi.
    pub fn phi(&self) -> f64 {
        self.delta * std::f64::consts::PI
    }
}

/// Protocol-side parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    /// Signal intensity alpha^2 used in the X basis.
    pub alpha2: f64,
    /// X-basis selection probability.
    pub p_x: f64,
    /// Error-correction inefficiency f >= 1.
    pub f_ec: f64,
    /// Decoy intensities used in the Z basis.
    pub intensities: IntensitySet,
}

impl ProtocolParams {
    pub fn new(alpha2: f64, p_x: f64, f_ec: f64, intensities: IntensitySet) -> Result<Self> {
        if !alpha2.is_finite() || alpha2 <= 0.0 {
            return Err(Error::domain("signal intensity", alpha2, "(0, inf)"));
        }
        if !p_x.is_finite() || p_x <= 0.0 || p_x > 1.0 {
            return Err(Error::domain("X-basis probability", p_x, "(0, 1]"));
        }
        if !f_ec.is_finite() || f_ec < 1.0 {
            return Err(Error::domain("error-correction inefficiency", f_ec, "[1, inf)"));
        }
        Ok(ProtocolParams {
            alpha2,
            p_x,
            f_ec,
            intensities,
        })
    }
}

/// Observed (or simulated) Z-basis gains Q^{k,l} for one detector outcome;
/// a complete K x K table over the decoy intensity indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainTable {
    pub outcome: Outcome,
    k: usize,
    q: Vec<f64>,
}

impl GainTable {
    pub fn new(outcome: Outcome, k: usize, q: Vec<f64>) -> Result<Self> {
        if q.len() != k * k {
            return Err(Error::GainShape {
                expected: k,
                got: q.len(),
            });
        }
        for (idx, &v) in q.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::GainRange {
                    k: idx / k,
                    l: idx % k,
                    value: v,
                });
            }
        }
        Ok(GainTable { outcome, k, q })
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.q[k * self.k + l]
    }

    /// The table with gain indices swapped, (k,l) -> (l,k).
    pub fn transposed(&self) -> GainTable {
        let mut q = vec![0.0; self.q.len()];
        for k in 0..self.k {
            for l in 0..self.k {
                q[l * self.k + k] = self.get(k, l);
            }
        }
        GainTable {
            outcome: self.outcome,
            k: self.k,
            q,
        }
    }

    /// Sub-table over the given intensity indices (order preserved).
    pub fn subset(&self, indices: &[usize]) -> GainTable {
        let n = indices.len();
        let mut q = Vec::with_capacity(n * n);
        for &a in indices {
            for &b in indices {
                q.push(self.get(a, b));
            }
        }
        GainTable {
            outcome: self.outcome,
            k: n,
            q,
        }
    }
}

/// Upper bounds on the yields for the index set carried by the decoy count,
/// plus the lower bound on Y_22 produced by the two-decoy analysis. Indices
/// outside the set are implicitly bounded by 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YieldBoundSet {
    pub outcome: Outcome,
    /// (n, m) -> upper bound, clamped to [0, 1].
    pub upper: std::collections::BTreeMap<(u8, u8), f64>,
    /// Lower bound on Y_22 (two-decoy analysis only).
    pub lower_y22: Option<f64>,
    /// Indices whose raw bound fell outside [0, 1] before clamping. Expected
    /// for loose bounds clamped to 1; a clamp at 0 signals gains inconsistent
    /// with the Poisson model.
    pub clamped: Vec<(u8, u8)>,
}

impl YieldBoundSet {
    /// Upper bound for (n, m); 1 outside the non-trivially bounded set.
    pub fn upper_or_one(&self, n: usize, m: usize) -> f64 {
        if n <= u8::MAX as usize && m <= u8::MAX as usize {
            self.upper
                .get(&(n as u8, m as u8))
                .copied()
                .unwrap_or(1.0)
        } else {
            1.0
        }
    }

    /// The index set bounded non-trivially for the given decoy count:
    /// {(0,0),(1,1),(0,2),(2,0)} for two decoys, plus
    /// {(2,2),(1,3),(3,1),(0,4),(4,0)} for three and four.
    pub fn index_set(decoys: usize) -> &'static [(u8, u8)] {
        const TWO: [(u8, u8); 4] = [(0, 0), (1, 1), (0, 2), (2, 0)];
        const THREE: [(u8, u8); 9] = [
            (0, 0),
            (1, 1),
            (0, 2),
            (2, 0),
            (2, 2),
            (1, 3),
            (3, 1),
            (0, 4),
            (4, 0),
        ];
        match decoys {
            2 => &TWO,
            _ => &THREE,
        }
    }
}

/// One sweep sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRatePoint {
    /// Overall loss -10 log10(eta) in dB.
    pub loss_db: f64,
    pub eta: f64,
    /// Secret key rate per pulse (0 when no positive rate exists).
    pub rate: f64,
    /// PLOB benchmark at the same transmittance.
    pub plob: f64,
    /// Optimized signal intensity.
    pub alpha2_opt: f64,
    /// Optimized free decoy intensity, when the scenario has one.
    pub mu_opt: Option<f64>,
    pub e_bit: f64,
    pub e_ph: f64,
}
