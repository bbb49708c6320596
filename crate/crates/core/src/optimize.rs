//! Scenario presets, key-rate maximization over the free intensities, loss
//! sweeps, and worst-case analysis under intensity fluctuations.
//!
//! The search is fully deterministic: a fixed log-spaced grid seeds a
//! bounded direct-search simplex (five restarts from the best grid points),
//! and no randomness enters anywhere. Identical inputs give bit-identical
//! sweep files.

use crate::channel::YieldKernel;
use crate::error::{Error, Result};
use crate::math::plob_bound;
use crate::security::{key_rate, DecoyMode, SecurityResult};
use crate::types::{ChannelParams, IntensitySet, KeyRatePoint, ProtocolParams};

/// Rates below this are "roughly zero" for threshold bisection.
pub const RATE_FLOOR: f64 = 1e-12;

/// Misalignment configuration, stored as the physical angles.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Misalignment {
    pub theta_a: f64,
    pub theta_b: f64,
    pub delta: f64,
}

impl Misalignment {
    /// 2% polarization and phase misalignment.
    pub fn standard() -> Self {
        let t = 0.02f64.sqrt().asin();
        Misalignment {
            theta_a: t,
            theta_b: -t,
            delta: 0.02,
        }
    }

    pub fn none() -> Self {
        Misalignment {
            theta_a: 0.0,
            theta_b: 0.0,
            delta: 0.0,
        }
    }
}

/// A simulation scenario: decoy mode, fixed decoy intensities, search ranges
/// for the free variables, and the channel/protocol constants.
///
/// Fixed-decoy semantics per mode: two decoys fix mu_1 and optimize mu_0;
/// three fix (mu_1, mu_2) and optimize mu_0; four fix (mu_0, mu_1, mu_2) and
/// optimize the additional mu_3; the infinite reference optimizes only the
/// signal intensity.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Scenario {
    pub mode: DecoyMode,
    pub pd: f64,
    /// Fixed decoy intensities in role order (see above).
    pub fixed_decoys: Vec<f64>,
    /// Search range for the free decoy intensity, when the mode has one.
    pub free_decoy_range: Option<(f64, f64)>,
    /// Search range for the signal intensity alpha^2.
    pub alpha2_range: (f64, f64),
    pub misalignment: Misalignment,
    pub f_ec: f64,
    pub p_x: f64,
}

impl Scenario {
    /// Reference presets: mu_1 = 1e-5 for two decoys; (mu_1, mu_2) =
    /// (1e-2, 1e-3) for three; (mu_0, mu_1, mu_2) = (1e-1, 1e-2, 1e-3) for
    /// four.
    pub fn paper(mode: DecoyMode, pd: f64) -> Scenario {
        let fixed = match mode {
            DecoyMode::Two => vec![1e-5],
            DecoyMode::Three => vec![1e-2, 1e-3],
            DecoyMode::Four => vec![1e-1, 1e-2, 1e-3],
            DecoyMode::Infinite => vec![],
        };
        Scenario::with_fixed(mode, pd, fixed)
    }

    /// Weaker-decoy variants: (mu_1, mu_2) = (1e-4, 1e-5) for three decoys,
    /// (mu_0, mu_1, mu_2) = (1e-3, 1e-4, 1e-5) for four. Two-decoy and
    /// infinite scenarios have no weaker variant and keep the reference
    /// preset.
    pub fn appendix_b(mode: DecoyMode, pd: f64) -> Scenario {
        let fixed = match mode {
            DecoyMode::Two => vec![1e-5],
            DecoyMode::Three => vec![1e-4, 1e-5],
            DecoyMode::Four => vec![1e-3, 1e-4, 1e-5],
            DecoyMode::Infinite => vec![],
        };
        Scenario::with_fixed(mode, pd, fixed)
    }

    /// Scenario with explicit fixed decoys (role order per mode); search
    /// ranges follow the defaults: alpha^2 in [1e-4, 2], free decoy in
    /// [1e-4, 5] floored above the strongest fixed decoy it must exceed.
    pub fn with_fixed(mode: DecoyMode, pd: f64, fixed_decoys: Vec<f64>) -> Scenario {
        let free_decoy_range = match mode {
            DecoyMode::Infinite => None,
            DecoyMode::Four => Some((1e-4, 5.0)),
            // the free mu_0 must stay above the strongest fixed decoy
            _ => {
                let top = fixed_decoys.first().copied().unwrap_or(0.0);
                Some(((1e-4f64).max(1.5 * top), 5.0))
            }
        };
        Scenario {
            mode,
            pd,
            fixed_decoys,
            free_decoy_range,
            alpha2_range: (1e-4, 2.0),
            misalignment: Misalignment::standard(),
            f_ec: 1.16,
            p_x: 1.0,
        }
    }

    fn expected_fixed(&self) -> usize {
        match self.mode {
            DecoyMode::Two => 1,
            DecoyMode::Three => 2,
            DecoyMode::Four => 3,
            DecoyMode::Infinite => 0,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !self.pd.is_finite() || !(0.0..1.0).contains(&self.pd) {
            return Err(Error::domain("dark-count probability", self.pd, "[0, 1)"));
        }
        if self.fixed_decoys.len() != self.expected_fixed() {
            return Err(Error::IntensityCount {
                expected: "mode-dependent fixed decoy count",
                got: self.fixed_decoys.len(),
            });
        }
        if self.mode != DecoyMode::Infinite && self.free_decoy_range.is_none() {
            return Err(Error::domain("free decoy range", f64::NAN, "required"));
        }
        Ok(())
    }

    fn channel(&self, eta: f64, decoys_pd: f64) -> Result<ChannelParams> {
        ChannelParams::new(
            eta,
            decoys_pd,
            self.misalignment.theta_a,
            self.misalignment.theta_b,
            self.misalignment.delta,
        )
    }

    /// Full intensity vector in role order given the free decoy value.
    pub fn intensities(&self, free: Option<f64>) -> Result<Vec<f64>> {
        Ok(match self.mode {
            DecoyMode::Infinite => vec![],
            DecoyMode::Two | DecoyMode::Three => {
                let mu0 = free.ok_or(Error::domain("free decoy", f64::NAN, "required"))?;
                let mut v = vec![mu0];
                v.extend_from_slice(&self.fixed_decoys);
                v
            }
            DecoyMode::Four => {
                let mu3 = free.ok_or(Error::domain("free decoy", f64::NAN, "required"))?;
                let mut v = self.fixed_decoys.clone();
                v.push(mu3);
                v
            }
        })
    }
}

/// Shared evaluation state for one scenario (the yield kernel only depends on
/// the misalignment angles, so it is built once and reused across all loss
/// points and optimizer iterations).
pub struct Evaluator {
    scenario: Scenario,
    kernel: Option<YieldKernel>,
}

impl Evaluator {
    pub fn new(scenario: &Scenario) -> Result<Evaluator> {
        scenario.check()?;
        let kernel = match scenario.mode {
            DecoyMode::Infinite => {
                let ch = scenario.channel(0.5, scenario.pd)?;
                Some(YieldKernel::new(&ch, 12))
            }
            _ => None,
        };
        Ok(Evaluator {
            scenario: scenario.clone(),
            kernel,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Key rate at an explicit operating point; `None` when the point is
    /// geometrically invalid (ordering or separation violated) or yields no
    /// clicks.
    pub fn rate_with(&self, eta: f64, alpha2: f64, decoys: &[f64]) -> Option<SecurityResult> {
        let ch = self.scenario.channel(eta, self.scenario.pd).ok()?;
        let set = match self.scenario.mode {
            DecoyMode::Infinite => IntensitySet::descending(vec![1.0, 0.1]).ok()?, // placeholder, unused
            DecoyMode::Four => IntensitySet::with_roles(decoys.to_vec()).ok()?,
            _ => IntensitySet::descending(decoys.to_vec()).ok()?,
        };
        let params = ProtocolParams::new(alpha2, self.scenario.p_x, self.scenario.f_ec, set).ok()?;
        key_rate(&params, &ch, self.scenario.mode, self.kernel.as_ref()).ok()
    }

    fn rate_free(&self, eta: f64, alpha2: f64, free: Option<f64>) -> Option<SecurityResult> {
        let decoys = self.scenario.intensities(free).ok()?;
        self.rate_with(eta, alpha2, &decoys)
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Bounded Nelder-Mead on f over the box, in the given coordinates.
/// Deterministic; returns the best evaluated point.
fn nelder_mead(
    f: &mut impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..d {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    // initial simplex: x0 plus a 5% box-step along each axis
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let push = |x: Vec<f64>, f: &mut dyn FnMut(&[f64]) -> f64| {
        let v = f(&x);
        (x, v)
    };
    simplex.push(push(x0.to_vec(), f));
    for i in 0..d {
        let mut x = x0.to_vec();
        let step = 0.05 * (hi[i] - lo[i]);
        x[i] = if x[i] + step <= hi[i] { x[i] + step } else { x[i] - step };
        simplex.push(push(x, f));
    }
    let (mut best_x, mut best_f) = simplex[0].clone();
    for &(ref x, v) in &simplex {
        if v < best_f {
            best_f = v;
            best_x = x.clone();
        }
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let f_best = simplex[0].1;
        let f_worst = simplex[d].1;
        if (f_worst - f_best).abs() <= 1e-6 * f_best.abs().max(1e-300) {
            break;
        }
        // centroid of all but the worst
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for i in 0..d {
                centroid[i] += x[i] / d as f64;
            }
        }
        let worst = simplex[d].clone();
        let mut propose = |coef: f64| -> (Vec<f64>, f64) {
            let mut x: Vec<f64> = (0..d)
                .map(|i| centroid[i] + coef * (centroid[i] - worst.0[i]))
                .collect();
            clamp(&mut x);
            let v = f(&x);
            if v < best_f {
                best_f = v;
                best_x = x.clone();
            }
            (x, v)
        };
        let reflected = propose(1.0);
        if reflected.1 < simplex[0].1 {
            let expanded = propose(2.0);
            simplex[d] = if expanded.1 < reflected.1 { expanded } else { reflected };
        } else if reflected.1 < simplex[d - 1].1 {
            simplex[d] = reflected;
        } else {
            let contracted = if reflected.1 < worst.1 {
                propose(0.5)
            } else {
                propose(-0.5)
            };
            if contracted.1 < worst.1.min(reflected.1) {
                simplex[d] = contracted;
            } else {
                // shrink toward the best vertex
                let anchor = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> = (0..d)
                        .map(|i| anchor[i] + 0.5 * (v.0[i] - anchor[i]))
                        .collect();
                    clamp(&mut x);
                    let fv = f(&x);
                    if fv < best_f {
                        best_f = fv;
                        best_x = x.clone();
                    }
                    *v = (x, fv);
                }
            }
        }
    }
    (best_x, best_f)
}

/// Maximize the key rate at one loss point over the scenario's free
/// variables (log-spaced grid, then direct-search refinement from the five
/// best grid points). The reported optimum is never below any grid point.
pub fn maximize_rate(ev: &Evaluator, loss_db: f64) -> Result<KeyRatePoint> {
    maximize_rate_seeded(ev, loss_db, &[])
}

/// As [`maximize_rate`], with extra seed points (signal intensity plus free
/// decoy) evaluated alongside the grid. Threshold bisection feeds the last
/// positive optimum back in, so a basin narrower than the grid spacing is
/// still tracked down to where it vanishes.
pub fn maximize_rate_seeded(
    ev: &Evaluator,
    loss_db: f64,
    hints: &[(f64, Option<f64>)],
) -> Result<KeyRatePoint> {
    if !loss_db.is_finite() || loss_db < 0.0 {
        return Err(Error::domain("loss", loss_db, "[0, inf) dB"));
    }
    let eta = 10f64.powf(-loss_db / 10.0);
    let sc = &ev.scenario;
    let (a_lo, a_hi) = sc.alpha2_range;
    let has_free = sc.mode != DecoyMode::Infinite;

    // seed grid in log10 coordinates
    let alphas = log_grid(a_lo, a_hi, if has_free { 13 } else { 25 });
    let frees: Vec<Option<f64>> = if let Some((lo, hi)) = sc.free_decoy_range.filter(|_| has_free) {
        log_grid(lo, hi, 11).into_iter().map(Some).collect()
    } else {
        vec![None]
    };
    let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
    let eval_seed = |a: f64, m: Option<f64>, seeds: &mut Vec<(f64, Vec<f64>)>| {
        let r = ev.rate_free(eta, a, m).map(|s| s.rate).unwrap_or(0.0);
        let coords = match m {
            Some(mu) => vec![a.log10(), mu.log10()],
            None => vec![a.log10()],
        };
        seeds.push((r, coords));
    };
    for &a in &alphas {
        for &m in &frees {
            eval_seed(a, m, &mut seeds);
        }
    }
    for &(a, m) in hints {
        let a = a.clamp(a_lo, a_hi);
        let m = match (m, sc.free_decoy_range.filter(|_| has_free)) {
            (Some(v), Some((lo, hi))) => Some(v.clamp(lo, hi)),
            _ => None,
        };
        eval_seed(a, m, &mut seeds);
    }
    seeds.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let grid_best = seeds[0].0;

    let lo: Vec<f64> = match sc.free_decoy_range.filter(|_| has_free) {
        Some((mlo, _)) => vec![a_lo.log10(), mlo.log10()],
        None => vec![a_lo.log10()],
    };
    let hi: Vec<f64> = match sc.free_decoy_range.filter(|_| has_free) {
        Some((_, mhi)) => vec![a_hi.log10(), mhi.log10()],
        None => vec![a_hi.log10()],
    };
    let mut neg_rate = |x: &[f64]| -> f64 {
        let a = 10f64.powf(x[0]);
        let m = x.get(1).map(|v| 10f64.powf(*v));
        -ev.rate_free(eta, a, m).map(|s| s.rate).unwrap_or(0.0)
    };
    let mut best_val = grid_best;
    let mut best_x = seeds[0].1.clone();
    for (_, start) in seeds.iter().take(5) {
        let (x, v) = nelder_mead(&mut neg_rate, start, &lo, &hi, 250);
        if -v > best_val {
            best_val = -v;
            best_x = x;
        }
    }
    debug_assert!(best_val >= grid_best);

    let alpha2_opt = 10f64.powf(best_x[0]);
    let mu_opt = best_x.get(1).map(|v| 10f64.powf(*v));
    let result = ev.rate_free(eta, alpha2_opt, mu_opt);
    let (e_bit, e_ph) = match &result {
        Some(s) => (s.e_bit[0], s.e_ph[0]),
        None => (0.0, 1.0),
    };
    Ok(KeyRatePoint {
        loss_db,
        eta,
        rate: if best_val > 0.0 { best_val } else { 0.0 },
        plob: plob_bound(eta)?,
        alpha2_opt,
        mu_opt,
        e_bit,
        e_ph,
    })
}

/// One maximized point per loss value. Points are independent and evaluated
/// in parallel (`threads` caps the worker count); results keep grid order.
pub fn sweep(scenario: &Scenario, loss_grid: &[f64], threads: usize) -> Result<Vec<KeyRatePoint>> {
    let ev = Evaluator::new(scenario)?;
    let n = loss_grid.len();
    let workers = threads.max(1).min(n.max(1));
    if workers <= 1 || n <= 1 {
        return loss_grid.iter().map(|&l| maximize_rate(&ev, l)).collect();
    }
    let mut out: Vec<Option<Result<KeyRatePoint>>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let ev = &ev;
        let mut handles = Vec::new();
        for w in 0..workers {
            let grid = loss_grid;
            handles.push(scope.spawn(move || {
                let mut part = Vec::new();
                let mut i = w;
                while i < grid.len() {
                    part.push((i, maximize_rate(ev, grid[i])));
                    i += workers;
                }
                part
            }));
        }
        for h in handles {
            for (i, r) in h.join().expect("sweep worker") {
                out[i] = Some(r);
            }
        }
    });
    out.into_iter().map(|o| o.expect("all points filled")).collect()
}

/// Symmetric fluctuation magnitude applied to the signal intensity and every
/// decoy intensity: each value x ranges over [(1-m) x, (1+m) x].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FluctuationSpec {
    pub magnitude: f64,
}

impl FluctuationSpec {
    pub fn new(magnitude: f64) -> Result<Self> {
        if !magnitude.is_finite() || !(0.0..1.0).contains(&magnitude) {
            return Err(Error::domain("fluctuation magnitude", magnitude, "[0, 1)"));
        }
        Ok(FluctuationSpec { magnitude })
    }
}

/// Worst-case analysis result at one loss point.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCasePoint {
    pub nominal: KeyRatePoint,
    /// Minimal rate over the fluctuation box around the nominal optimum.
    pub worst_rate: f64,
    /// The minimizing intensity vector [alpha2, mu_0, mu_1, ...].
    pub worst_point: Vec<f64>,
}

/// Minimize the key rate over the fluctuation box around the nominal
/// optimum: all box corners, a three-per-axis inner grid, then direct-search
/// refinement from the worst point found (the minimum may be interior).
pub fn worst_case_rate(
    ev: &Evaluator,
    loss_db: f64,
    fluct: FluctuationSpec,
) -> Result<WorstCasePoint> {
    worst_case_rate_seeded(ev, loss_db, fluct, &[])
}

/// As [`worst_case_rate`], with seed points for the nominal maximization.
pub fn worst_case_rate_seeded(
    ev: &Evaluator,
    loss_db: f64,
    fluct: FluctuationSpec,
    hints: &[(f64, Option<f64>)],
) -> Result<WorstCasePoint> {
    let nominal = maximize_rate_seeded(ev, loss_db, hints)?;
    let eta = nominal.eta;
    let sc = &ev.scenario;

    // nominal intensity vector: [alpha2, decoys...]
    let mut center = vec![nominal.alpha2_opt];
    center.extend(sc.intensities(nominal.mu_opt)?);
    let d = center.len();
    let m = fluct.magnitude;
    let lo: Vec<f64> = center.iter().map(|x| x * (1.0 - m)).collect();
    let hi: Vec<f64> = center.iter().map(|x| x * (1.0 + m)).collect();

    let mut eval = |x: &[f64]| -> f64 {
        // invalid geometry is excluded from the minimization, not counted 0
        ev.rate_with(eta, x[0], &x[1..])
            .map(|s| s.rate)
            .unwrap_or(f64::INFINITY)
    };

    let mut worst_rate = nominal.rate;
    let mut worst_point = center.clone();
    // corners and 3-per-axis grid in one pass: levels {lo, mid, hi}
    let mut idx = vec![0usize; d];
    loop {
        let x: Vec<f64> = (0..d)
            .map(|i| match idx[i] {
                0 => lo[i],
                1 => center[i],
                _ => hi[i],
            })
            .collect();
        let r = eval(&x);
        if r < worst_rate {
            worst_rate = r;
            worst_point = x;
        }
        let mut carry = 0;
        while carry < d {
            idx[carry] += 1;
            if idx[carry] < 3 {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
        if carry == d {
            break;
        }
    }
    // refine: minimize from the worst grid point
    let (x, v) = nelder_mead(&mut eval, &worst_point.clone(), &lo, &hi, 250);
    if v < worst_rate {
        worst_rate = v;
        worst_point = x;
    }
    if m == 0.0 {
        worst_rate = nominal.rate;
        worst_point = center;
    }
    Ok(WorstCasePoint {
        worst_rate: worst_rate.min(nominal.rate),
        nominal,
        worst_point,
    })
}

/// Maximum tolerated loss: bisection (0.1 dB resolution) on the largest loss
/// with an optimized rate above [`RATE_FLOOR`]. The flag is false when no
/// loss with a positive rate exists. The bisection warm-starts each
/// maximization from the last optimum with a positive rate.
pub fn max_tolerated_loss(scenario: &Scenario) -> Result<(f64, bool)> {
    let ev = Evaluator::new(scenario)?;
    let mut hint: Vec<(f64, Option<f64>)> = Vec::new();
    max_tolerated_loss_by(|l| {
        let p = maximize_rate_seeded(&ev, l, &hint)?;
        if p.rate > RATE_FLOOR {
            hint = vec![(p.alpha2_opt, p.mu_opt)];
        }
        Ok(p.rate)
    })
}

/// Maximum tolerated loss under worst-case intensity fluctuations.
pub fn max_tolerated_loss_worst(scenario: &Scenario, fluct: FluctuationSpec) -> Result<(f64, bool)> {
    let ev = Evaluator::new(scenario)?;
    let mut hint: Vec<(f64, Option<f64>)> = Vec::new();
    max_tolerated_loss_by(|l| {
        let p = worst_case_rate_seeded(&ev, l, fluct, &hint)?;
        if p.nominal.rate > RATE_FLOOR {
            hint = vec![(p.nominal.alpha2_opt, p.nominal.mu_opt)];
        }
        Ok(p.worst_rate)
    })
}

fn max_tolerated_loss_by(mut rate_at: impl FnMut(f64) -> Result<f64>) -> Result<(f64, bool)> {
    let mut lo = 0.0f64;
    if rate_at(lo)? <= RATE_FLOOR {
        return Ok((0.0, false));
    }
    let mut hi = 10.0f64;
    while rate_at(hi)? > RATE_FLOOR {
        lo = hi;
        hi += 10.0;
        if hi > 200.0 {
            return Ok((200.0, true));
        }
    }
    while hi - lo > 0.1 {
        let mid = 0.5 * (lo + hi);
        if rate_at(mid)? > RATE_FLOOR {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), true))
}
