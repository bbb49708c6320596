//! Self-check suites: channel-model consistency, bound soundness against
//! planted yield tables and against the exact model, and the algebra
//! cross-checks between direct and factored auxiliary factors. The `validate`
//! CLI command runs these; the acceptance tests reuse them with larger case
//! counts.
//!
//! All randomness comes from a fixed-seed SplitMix64 stream, so every run
//! checks the identical case list.

use crate::bounds::{four, three, two};
use crate::channel::{gain_from_yields, z_gain, YieldGrid, YieldKernel};
use crate::error::Result;
use crate::types::{ChannelParams, GainTable, IntensitySet, Outcome};

/// SplitMix64: tiny deterministic generator for the validation case lists.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Log-uniform in [lo, hi].
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        10f64.powf(lo.log10() + (hi.log10() - lo.log10()) * self.next_f64())
    }
}

/// Outcome of one validation suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Worst margin observed; negative values mean the suite held with that
    /// much slack, positive values are violations.
    pub worst: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Channel-model self-consistency: gains reconstructed from the exact yields
/// through the Poisson mixture must match the closed-form Z gain within
/// `tol` over `cases` random parameter draws (eta in [1e-6, 1],
/// pd in [0, 1e-5], intensities up to 0.5).
pub fn gain_consistency_suite(cases: usize, tol: f64) -> Result<SuiteResult> {
    let mut rng = SplitMix64::new(0x5eed_0001);
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let eta = rng.log_uniform(1e-6, 1.0);
        let pd = rng.next_f64() * 1e-5;
        let theta = (rng.next_f64() - 0.5) * 0.6;
        let ch = ChannelParams::new(eta, pd, theta, -theta * rng.next_f64(), 0.02)?;
        let mu_k = rng.log_uniform(1e-4, 0.5);
        let mu_l = rng.log_uniform(1e-4, 0.5);
        let (grid, c_tail) = YieldGrid::from_model(&ch, 60, mu_k, mu_l, 1e-30)?;
        let mixed = gain_from_yields(&grid, c_tail, mu_k, mu_l)?;
        let closed = z_gain(&ch, mu_k, mu_l)?;
        let diff = (mixed - closed).abs() - tol;
        worst = worst.max(diff);
        if diff > 0.0 {
            failures += 1;
        }
    }
    Ok(SuiteResult {
        name: "gain-series consistency",
        cases,
        failures,
        worst,
    })
}

/// Draw a protocol-like intensity vector: decade-separated small decoys plus,
/// for four decoys, a free intensity up to ~4. The bounds lose precision when
/// intensities sit within a few percent of each other, which the protocol
/// never does.
fn draw_intensities(rng: &mut SplitMix64, count: usize) -> Vec<f64> {
    match count {
        2 => {
            let mu0 = rng.log_uniform(1e-2, 1.0);
            let mu1 = mu0 * rng.log_uniform(1e-4, 0.2);
            vec![mu0, mu1]
        }
        3 => {
            let mu0 = rng.log_uniform(5e-2, 1.0);
            let mu1 = mu0 * rng.log_uniform(0.05, 0.3);
            let mu2 = mu1 * rng.log_uniform(0.05, 0.3);
            vec![mu0, mu1, mu2]
        }
        _ => {
            let mu0 = rng.log_uniform(5e-2, 0.5);
            let mu1 = mu0 * rng.log_uniform(0.05, 0.3);
            let mu2 = mu1 * rng.log_uniform(0.05, 0.3);
            let mu3 = rng.log_uniform(0.4, 4.0);
            vec![mu0, mu1, mu2, mu3]
        }
    }
}

struct PlantedCase {
    grid: YieldGrid,
    c_tail: f64,
}

impl PlantedCase {
    fn draw(rng: &mut SplitMix64, n_max: usize) -> Self {
        let grid = YieldGrid::from_fn(n_max, |_, _| rng.next_f64());
        let c_tail = rng.next_f64();
        PlantedCase { grid, c_tail }
    }

    fn gains(&self, mu: &[f64], outcome: Outcome) -> Result<GainTable> {
        let k = mu.len();
        let mut q = Vec::with_capacity(k * k);
        for &a in mu {
            for &b in mu {
                q.push(gain_from_yields(&self.grid, self.c_tail, a, b)?.clamp(0.0, 1.0));
            }
        }
        GainTable::new(outcome, k, q)
    }
}

/// The central soundness property: for gains produced exactly by the Poisson
/// mixture of a planted random yield table, every upper bound must dominate
/// the planted yield (and the two-decoy Y_22 lower bound must stay below it)
/// within `slack`. Checks `cases` tables for each of the three decoy counts.
pub fn planted_soundness_suite(cases: usize, slack: f64) -> Result<SuiteResult> {
    let mut rng = SplitMix64::new(0x5eed_0002);
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut check = |violation: f64, failures: &mut usize| {
        worst = worst.max(violation);
        if violation > 0.0 {
            *failures += 1;
        }
    };
    for _ in 0..cases {
        let case = PlantedCase::draw(&mut rng, 9);
        let truth = |n: usize, m: usize| case.grid.get(n, m);

        // two decoys
        let mu = draw_intensities(&mut rng, 2);
        let set = IntensitySet::descending(mu.clone())?;
        let input = two::TwoDecoyInput::new(&set, case.gains(&mu, Outcome::ClickC)?)?;
        let b = two::two_decoy_bounds(&input)?;
        for &(n, m) in YieldBoundSetIndices::TWO {
            check(
                truth(n, m) - b.upper_or_one(n, m) - slack,
                &mut failures,
            );
        }
        check(
            b.lower_y22.unwrap() - truth(2, 2) - slack,
            &mut failures,
        );

        // three decoys
        let mu = draw_intensities(&mut rng, 3);
        let set = IntensitySet::descending(mu.clone())?;
        let input = three::ThreeDecoyInput::new(&set, case.gains(&mu, Outcome::ClickC)?)?;
        let b = three::three_decoy_bounds(&input)?;
        for &(n, m) in YieldBoundSetIndices::THREE {
            check(
                truth(n, m) - b.upper_or_one(n, m) - slack,
                &mut failures,
            );
        }

        // four decoys
        let mu = draw_intensities(&mut rng, 4);
        let set = IntensitySet::with_roles(mu.clone())?;
        let input = four::FourDecoyInput::new(&set, case.gains(&mu, Outcome::ClickC)?)?;
        let b = four::four_decoy_bounds(&input, None)?;
        for &(n, m) in YieldBoundSetIndices::THREE {
            check(
                truth(n, m) - b.upper_or_one(n, m) - slack,
                &mut failures,
            );
        }
    }
    Ok(SuiteResult {
        name: "planted-table soundness",
        cases,
        failures,
        worst,
    })
}

struct YieldBoundSetIndices;

impl YieldBoundSetIndices {
    const TWO: &'static [(usize, usize)] = &[(0, 0), (1, 1), (0, 2), (2, 0)];
    const THREE: &'static [(usize, usize)] = &[
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
}

/// Bound soundness against the exact channel model over a grid of settings:
/// gains simulated by the closed-form Z gain, compared index-by-index against
/// the exact yields.
pub fn model_soundness_suite(slack: f64) -> Result<SuiteResult> {
    let etas = [1e-2, 1e-4, 1e-5];
    let pds = [1e-6, 1e-7, 1e-8];
    let mu0s = [0.1, 0.3, 0.6];
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for &eta in &etas {
        for &pd in &pds {
            let ch = ChannelParams::with_standard_misalignment(eta, pd)?;
            let kernel = YieldKernel::new(&ch, 4);
            let truth = |n: usize, m: usize| kernel.yield_nm(&ch, n, m);
            for &mu0 in &mu0s {
                cases += 1;
                let mut check = |violation: f64| {
                    worst = worst.max(violation);
                    if violation > 0.0 {
                        failures += 1;
                    }
                };

                let mu2 = vec![mu0, 1e-5];
                let set = IntensitySet::descending(mu2.clone())?;
                let gains = crate::channel::simulate_gain_table(&ch, &mu2, Outcome::ClickC)?;
                let b = two::two_decoy_bounds(&two::TwoDecoyInput::new(&set, gains)?)?;
                for &(n, m) in YieldBoundSetIndices::TWO {
                    check(truth(n, m)? - b.upper_or_one(n, m) - slack);
                }
                check(b.lower_y22.unwrap() - truth(2, 2)? - slack);

                let mu3 = vec![mu0, 1e-2, 1e-3];
                let set = IntensitySet::descending(mu3.clone())?;
                let gains = crate::channel::simulate_gain_table(&ch, &mu3, Outcome::ClickC)?;
                let b = three::three_decoy_bounds(&three::ThreeDecoyInput::new(&set, gains)?)?;
                for &(n, m) in YieldBoundSetIndices::THREE {
                    check(truth(n, m)? - b.upper_or_one(n, m) - slack);
                }

                let mu4 = vec![0.1, 1e-2, 1e-3, 1.0 + mu0];
                let set = IntensitySet::with_roles(mu4.clone())?;
                let gains = crate::channel::simulate_gain_table(&ch, &mu4, Outcome::ClickC)?;
                let b = four::four_decoy_bounds(&four::FourDecoyInput::new(&set, gains)?, None)?;
                for &(n, m) in YieldBoundSetIndices::THREE {
                    check(truth(n, m)? - b.upper_or_one(n, m) - slack);
                }
            }
        }
    }
    Ok(SuiteResult {
        name: "channel-model soundness",
        cases,
        failures,
        worst,
    })
}

/// Direct vs factored auxiliary factors over random positive triples, plus
/// the nonnegativity of the squared bracket in the four-decoy tail sum.
pub fn factored_equivalence_suite(cases: usize, rel_tol: f64) -> Result<SuiteResult> {
    let mut rng = SplitMix64::new(0x5eed_0003);
    let mut failures = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..cases {
        let v = draw_intensities(&mut rng, 3);
        let mu = [v[0], v[1], v[2]];
        let m = 3 + (rng.next_u64() % 6) as usize;
        let pairs = [
            (three::a22_direct(mu, m), three::a22_factored(mu, m)),
            (three::a11_direct(mu, m), three::a11_factored(mu, m)),
            (three::b02_direct(mu, m), three::b02_factored(mu, m)),
            (three::a00_direct(mu, m), three::a00_factored(mu, m)),
        ];
        for (d, f) in pairs {
            let rel = (d - f).abs() / d.abs().max(1e-300) - rel_tol;
            worst = worst.max(rel);
            if rel > 0.0 {
                failures += 1;
            }
        }
        // four-decoy: A_04 forms agree and the tail sum is a nonneg square
        let v4 = draw_intensities(&mut rng, 4);
        let mu4 = [v4[0], v4[1], v4[2], v4[3]];
        let (d, f) = (four::a04_direct(&mu4, m), four::a04_factored(&mu4, m));
        let rel = (d - f).abs() / d.abs().max(1e-300) - rel_tol;
        worst = worst.max(rel);
        if rel > 0.0 {
            failures += 1;
        }
        // the printed tail double sum is a perfect square
        let sq = four::b04_bracket_squared(&mu4);
        if sq.is_nan() || sq < 0.0 || !sq.is_finite() {
            failures += 1;
        }
    }
    Ok(SuiteResult {
        name: "factored-form equivalence",
        cases,
        failures,
        worst,
    })
}

/// The standard validation run used by the `validate` command.
pub fn run_all(quick: bool) -> Result<Vec<SuiteResult>> {
    let (consistency_cases, planted_cases, algebra_cases) =
        if quick { (50, 100, 250) } else { (200, 500, 1000) };
    Ok(vec![
        gain_consistency_suite(consistency_cases, 1e-8)?,
        planted_soundness_suite(planted_cases, 1e-10)?,
        model_soundness_suite(1e-10)?,
        factored_equivalence_suite(algebra_cases, 1e-10)?,
    ])
}
