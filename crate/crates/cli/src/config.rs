//! Flag and config-file handling. Every subcommand accepts `--config FILE`
//! pointing at a flat JSON object whose keys mirror the long flag names;
//! flags given on the command line override file values, and unknown keys in
//! the file are rejected.

use clap::Args;
use serde::Deserialize;

use tfqkd_core::optimize::Scenario;
use tfqkd_core::security::DecoyMode;

use crate::CliError;

pub fn parse_decoys(s: &str) -> Result<DecoyMode, String> {
    match s {
        "2" => Ok(DecoyMode::Two),
        "3" => Ok(DecoyMode::Three),
        "4" => Ok(DecoyMode::Four),
        "inf" => Ok(DecoyMode::Infinite),
        _ => Err(format!("`{s}` is not one of 2|3|4|inf")),
    }
}

fn decoys_from_str(s: &str) -> Result<DecoyMode, CliError> {
    parse_decoys(s).map_err(CliError::Usage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Paper,
    AppendixB,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    match s {
        "paper" => Ok(Preset::Paper),
        "appendixB" | "appendixb" | "appendix-b" => Ok(Preset::AppendixB),
        _ => Err(format!("`{s}` is not one of paper|appendixB")),
    }
}

/// One `key=value` override for scenario constants (mu0..mu3, f_ec, p_x).
fn parse_fixed(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not key=value"))?;
    let key = k.trim().to_string();
    if !matches!(key.as_str(), "mu0" | "mu1" | "mu2" | "mu3" | "f_ec" | "p_x") {
        return Err(format!("unknown fixed key `{key}`"));
    }
    let val: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("`{v}` is not a number"))?;
    if !val.is_finite() {
        return Err(format!("`{v}` is not finite"));
    }
    Ok((key, val))
}

/// Read a flat JSON config object with the allowed keys of type `C`.
fn load_config<C: for<'de> Deserialize<'de> + Default>(
    path: &Option<std::path::PathBuf>,
) -> Result<C, CliError> {
    match path {
        None => Ok(C::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))
        }
    }
}

/// Build a scenario from common flags: decoy mode, preset, dark counts, and
/// `--fixed` overrides.
fn build_scenario(
    decoys: &str,
    preset: Preset,
    pd: f64,
    fixed: &[(String, f64)],
) -> Result<(Scenario, DecoyMode), CliError> {
    let mode = decoys_from_str(decoys)?;
    if !pd.is_finite() || !(0.0..1.0).contains(&pd) {
        return Err(CliError::Usage(format!(
            "dark-count probability {pd} outside [0, 1)"
        )));
    }
    let mut scenario = match preset {
        Preset::Paper => Scenario::paper(mode, pd),
        Preset::AppendixB => Scenario::appendix_b(mode, pd),
    };
    for (key, val) in fixed {
        match (key.as_str(), mode) {
            ("f_ec", _) => scenario.f_ec = *val,
            ("p_x", _) => scenario.p_x = *val,
            ("mu1", DecoyMode::Two) => scenario.fixed_decoys[0] = *val,
            ("mu1", DecoyMode::Three) => scenario.fixed_decoys[0] = *val,
            ("mu2", DecoyMode::Three) => scenario.fixed_decoys[1] = *val,
            ("mu0", DecoyMode::Four) => scenario.fixed_decoys[0] = *val,
            ("mu1", DecoyMode::Four) => scenario.fixed_decoys[1] = *val,
            ("mu2", DecoyMode::Four) => scenario.fixed_decoys[2] = *val,
            (k, _) => {
                return Err(CliError::Usage(format!(
                    "fixed key `{k}` does not apply to --decoys {decoys}"
                )))
            }
        }
    }
    // keep the free-mu_0 floor above any overridden fixed decoy
    if matches!(mode, DecoyMode::Two | DecoyMode::Three) {
        let top = scenario.fixed_decoys[0];
        scenario.free_decoy_range = Some(((1e-4f64).max(1.5 * top), 5.0));
    }
    scenario.check().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((scenario, mode))
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Decoy mode: 2, 3, 4 or inf.
    #[arg(long)]
    pub decoys: Option<String>,
    /// Dark-count probability per detector.
    #[arg(long)]
    pub pd: Option<f64>,
    /// First loss point (dB).
    #[arg(long)]
    pub loss_start: Option<f64>,
    /// Last loss point (dB), inclusive.
    #[arg(long)]
    pub loss_end: Option<f64>,
    /// Loss step (dB).
    #[arg(long)]
    pub loss_step: Option<f64>,
    /// Fixed-decoy preset: paper or appendixB.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Override a scenario constant, e.g. --fixed mu1=1e-5 (repeatable).
    #[arg(long, value_parser = parse_fixed)]
    pub fixed: Vec<(String, f64)>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Worker threads (capped by TFQKD_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON config file supplying defaults for any of the above.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub decoys: Option<String>,
    pub pd: Option<f64>,
    pub loss_start: Option<f64>,
    pub loss_end: Option<f64>,
    pub loss_step: Option<f64>,
    pub preset: Option<String>,
    pub fixed: Option<Vec<String>>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

pub struct SweepSpec {
    pub scenario: Scenario,
    pub loss_grid: Vec<f64>,
    pub out: std::path::PathBuf,
    pub threads: usize,
    pub echo: String,
}

impl SweepArgs {
    pub fn resolve(self) -> Result<SweepSpec, CliError> {
        let file: SweepFile = load_config(&self.config)?;
        let decoys = self
            .decoys
            .or(file.decoys)
            .ok_or_else(|| CliError::Usage("--decoys is required".into()))?;
        let pd = self
            .pd
            .or(file.pd)
            .ok_or_else(|| CliError::Usage("--pd is required".into()))?;
        let start = self
            .loss_start
            .or(file.loss_start)
            .ok_or_else(|| CliError::Usage("--loss-start is required".into()))?;
        let end = self
            .loss_end
            .or(file.loss_end)
            .ok_or_else(|| CliError::Usage("--loss-end is required".into()))?;
        let step = self
            .loss_step
            .or(file.loss_step)
            .ok_or_else(|| CliError::Usage("--loss-step is required".into()))?;
        let preset = match (self.preset, file.preset) {
            (Some(p), _) => p,
            (None, Some(s)) => parse_preset(&s).map_err(CliError::Usage)?,
            (None, None) => Preset::Paper,
        };
        let mut fixed = self.fixed;
        if fixed.is_empty() {
            for s in file.fixed.unwrap_or_default() {
                fixed.push(parse_fixed(&s).map_err(CliError::Usage)?);
            }
        }
        let out = self
            .out
            .or_else(|| file.out.map(std::path::PathBuf::from))
            .ok_or_else(|| CliError::Usage("--out is required".into()))?;
        let loss_grid = loss_grid(start, end, step)?;
        let (scenario, mode) = build_scenario(&decoys, preset, pd, &fixed)?;
        let echo = format!(
            "decoys={decoys} pd={pd:e} loss={start}..{end} step={step} preset={} fixed={:?} f_ec={} p_x={}",
            match preset {
                Preset::Paper => "paper",
                Preset::AppendixB => "appendixB",
            },
            scenario.fixed_decoys,
            scenario.f_ec,
            scenario.p_x,
        );
        let _ = mode;
        Ok(SweepSpec {
            scenario,
            loss_grid,
            out,
            threads: crate::thread_cap(self.threads.or(file.threads)),
            echo,
        })
    }
}

pub fn loss_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !start.is_finite() || !end.is_finite() || !step.is_finite() || step <= 0.0 || end < start
        || start < 0.0
    {
        return Err(CliError::Usage(format!(
            "invalid loss grid {start}..{end} step {step}"
        )));
    }
    let n = ((end - start) / step).round() as usize + 1;
    if n > 100_000 {
        return Err(CliError::Usage(format!("loss grid too large ({n} points)")));
    }
    Ok((0..n)
        .map(|i| start + step * i as f64)
        .filter(|&l| l <= end + 1e-9)
        .collect())
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Decoy mode: 2, 3, 4 or inf.
    #[arg(long)]
    pub decoys: Option<String>,
    /// Dark-count probability per detector.
    #[arg(long)]
    pub pd: Option<f64>,
    /// Loss point (dB).
    #[arg(long)]
    pub loss: Option<f64>,
    /// Fixed-decoy preset: paper or appendixB.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Override a scenario constant, e.g. --fixed mu1=1e-5 (repeatable).
    #[arg(long, value_parser = parse_fixed)]
    pub fixed: Vec<(String, f64)>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// JSON config file supplying defaults for any of the above.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeFile {
    pub decoys: Option<String>,
    pub pd: Option<f64>,
    pub loss: Option<f64>,
    pub preset: Option<String>,
    pub fixed: Option<Vec<String>>,
    pub out: Option<String>,
}

pub struct OptimizeSpec {
    pub scenario: Scenario,
    pub loss: f64,
    pub out: Option<std::path::PathBuf>,
}

impl OptimizeArgs {
    pub fn resolve(self) -> Result<OptimizeSpec, CliError> {
        let file: OptimizeFile = load_config(&self.config)?;
        let decoys = self
            .decoys
            .or(file.decoys)
            .ok_or_else(|| CliError::Usage("--decoys is required".into()))?;
        let pd = self
            .pd
            .or(file.pd)
            .ok_or_else(|| CliError::Usage("--pd is required".into()))?;
        let loss = self
            .loss
            .or(file.loss)
            .ok_or_else(|| CliError::Usage("--loss is required".into()))?;
        if !loss.is_finite() || loss < 0.0 {
            return Err(CliError::Usage(format!("loss {loss} outside [0, inf)")));
        }
        let preset = match (self.preset, file.preset) {
            (Some(p), _) => p,
            (None, Some(s)) => parse_preset(&s).map_err(CliError::Usage)?,
            (None, None) => Preset::Paper,
        };
        let mut fixed = self.fixed;
        if fixed.is_empty() {
            for s in file.fixed.unwrap_or_default() {
                fixed.push(parse_fixed(&s).map_err(CliError::Usage)?);
            }
        }
        let (scenario, _) = build_scenario(&decoys, preset, pd, &fixed)?;
        Ok(OptimizeSpec {
            scenario,
            loss,
            out: self.out.or(file.out.map(std::path::PathBuf::from)),
        })
    }
}

// ---------------------------------------------------------------------------
// fluctuate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct FluctuateArgs {
    /// Decoy mode: 2, 3, 4 or inf.
    #[arg(long)]
    pub decoys: Option<String>,
    /// Dark-count probability per detector.
    #[arg(long)]
    pub pd: Option<f64>,
    /// Fluctuation magnitude as a fraction, e.g. 0.4 for 40%.
    #[arg(long)]
    pub magnitude: Option<f64>,
    /// First loss point (dB).
    #[arg(long)]
    pub loss_start: Option<f64>,
    /// Last loss point (dB), inclusive.
    #[arg(long)]
    pub loss_end: Option<f64>,
    /// Loss step (dB).
    #[arg(long)]
    pub loss_step: Option<f64>,
    /// Fixed-decoy preset: paper or appendixB.
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
    /// Override a scenario constant, e.g. --fixed mu1=1e-5 (repeatable).
    #[arg(long, value_parser = parse_fixed)]
    pub fixed: Vec<(String, f64)>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// JSON config file supplying defaults for any of the above.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluctuateFile {
    pub decoys: Option<String>,
    pub pd: Option<f64>,
    pub magnitude: Option<f64>,
    pub loss_start: Option<f64>,
    pub loss_end: Option<f64>,
    pub loss_step: Option<f64>,
    pub preset: Option<String>,
    pub fixed: Option<Vec<String>>,
    pub out: Option<String>,
}

pub struct FluctuateSpec {
    pub scenario: Scenario,
    pub magnitude: f64,
    pub loss_grid: Vec<f64>,
    pub out: std::path::PathBuf,
    pub echo: String,
}

impl FluctuateArgs {
    pub fn resolve(self) -> Result<FluctuateSpec, CliError> {
        let file: FluctuateFile = load_config(&self.config)?;
        let decoys = self
            .decoys
            .or(file.decoys)
            .ok_or_else(|| CliError::Usage("--decoys is required".into()))?;
        let pd = self
            .pd
            .or(file.pd)
            .ok_or_else(|| CliError::Usage("--pd is required".into()))?;
        let magnitude = self
            .magnitude
            .or(file.magnitude)
            .ok_or_else(|| CliError::Usage("--magnitude is required".into()))?;
        if !magnitude.is_finite() || !(0.0..1.0).contains(&magnitude) {
            return Err(CliError::Usage(format!(
                "magnitude {magnitude} outside [0, 1)"
            )));
        }
        let start = self
            .loss_start
            .or(file.loss_start)
            .ok_or_else(|| CliError::Usage("--loss-start is required".into()))?;
        let end = self
            .loss_end
            .or(file.loss_end)
            .ok_or_else(|| CliError::Usage("--loss-end is required".into()))?;
        let step = self
            .loss_step
            .or(file.loss_step)
            .ok_or_else(|| CliError::Usage("--loss-step is required".into()))?;
        let preset = match (self.preset, file.preset) {
            (Some(p), _) => p,
            (None, Some(s)) => parse_preset(&s).map_err(CliError::Usage)?,
            (None, None) => Preset::Paper,
        };
        let mut fixed = self.fixed;
        if fixed.is_empty() {
            for s in file.fixed.unwrap_or_default() {
                fixed.push(parse_fixed(&s).map_err(CliError::Usage)?);
            }
        }
        let out = self
            .out
            .or_else(|| file.out.map(std::path::PathBuf::from))
            .ok_or_else(|| CliError::Usage("--out is required".into()))?;
        let loss_grid = loss_grid(start, end, step)?;
        let (scenario, _) = build_scenario(&decoys, preset, pd, &fixed)?;
        let echo = format!(
            "decoys={decoys} pd={pd:e} magnitude={magnitude} loss={start}..{end} step={step} fixed={:?}",
            scenario.fixed_decoys
        );
        Ok(FluctuateSpec {
            scenario,
            magnitude,
            loss_grid,
            out,
            echo,
        })
    }
}

// ---------------------------------------------------------------------------
// bounds / simulate / validate
// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Gain-table CSV (columns outcome,k,l,q).
    #[arg(long)]
    pub gains: Option<std::path::PathBuf>,
    /// Comma-separated decoy intensities in role order, e.g. 1e-1,1e-2,1e-3.
    #[arg(long)]
    pub intensities: Option<String>,
    /// Decoy count: 2, 3 or 4.
    #[arg(long)]
    pub decoys: Option<String>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// JSON config file supplying defaults for any of the above.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsFile {
    pub gains: Option<String>,
    pub intensities: Option<String>,
    pub decoys: Option<String>,
    pub out: Option<String>,
}

pub struct BoundsSpec {
    pub gains: std::path::PathBuf,
    pub intensities: Vec<f64>,
    pub decoys: usize,
    pub out: Option<std::path::PathBuf>,
}

impl BoundsArgs {
    pub fn resolve(self) -> Result<BoundsSpec, CliError> {
        let file: BoundsFile = load_config(&self.config)?;
        let gains = self
            .gains
            .or(file.gains.map(std::path::PathBuf::from))
            .ok_or_else(|| CliError::Usage("--gains is required".into()))?;
        let list = self
            .intensities
            .or(file.intensities)
            .ok_or_else(|| CliError::Usage("--intensities is required".into()))?;
        let intensities = tfqkd_core::io::parse_intensity_list(&list)
            .map_err(|e| CliError::Usage(format!("intensities: {e}")))?;
        let decoys_str = self
            .decoys
            .or(file.decoys)
            .ok_or_else(|| CliError::Usage("--decoys is required".into()))?;
        let decoys = match decoys_str.as_str() {
            "2" => 2,
            "3" => 3,
            "4" => 4,
            other => {
                return Err(CliError::Usage(format!(
                    "`{other}` is not one of 2|3|4 (bounds need finite decoys)"
                )))
            }
        };
        if intensities.len() != decoys {
            return Err(CliError::Usage(format!(
                "intensity count {} does not match --decoys {decoys}",
                intensities.len()
            )));
        }
        Ok(BoundsSpec {
            gains,
            intensities,
            decoys,
            out: self.out.or(file.out.map(std::path::PathBuf::from)),
        })
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Decoy count: 2, 3 or 4.
    #[arg(long)]
    pub decoys: Option<String>,
    /// Dark-count probability per detector.
    #[arg(long)]
    pub pd: Option<f64>,
    /// Loss point (dB).
    #[arg(long)]
    pub loss: Option<f64>,
    /// Comma-separated decoy intensities in role order.
    #[arg(long)]
    pub intensities: Option<String>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// JSON config file supplying defaults for any of the above.
    #[arg(long)]
    pub config: Option<std::path::PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub decoys: Option<String>,
    pub pd: Option<f64>,
    pub loss: Option<f64>,
    pub intensities: Option<String>,
    pub out: Option<String>,
}

pub struct SimulateSpec {
    pub intensities: Vec<f64>,
    pub pd: f64,
    pub loss: f64,
    pub out: std::path::PathBuf,
    pub echo: String,
}

impl SimulateArgs {
    pub fn resolve(self) -> Result<SimulateSpec, CliError> {
        let file: SimulateFile = load_config(&self.config)?;
        let decoys_str = self
            .decoys
            .or(file.decoys)
            .ok_or_else(|| CliError::Usage("--decoys is required".into()))?;
        let decoys = match decoys_str.as_str() {
            "2" => 2usize,
            "3" => 3,
            "4" => 4,
            other => {
                return Err(CliError::Usage(format!(
                    "`{other}` is not one of 2|3|4 (simulate emits finite tables)"
                )))
            }
        };
        let pd = self
            .pd
            .or(file.pd)
            .ok_or_else(|| CliError::Usage("--pd is required".into()))?;
        if !(0.0..1.0).contains(&pd) {
            return Err(CliError::Usage(format!("pd {pd} outside [0, 1)")));
        }
        let loss = self
            .loss
            .or(file.loss)
            .ok_or_else(|| CliError::Usage("--loss is required".into()))?;
        if !loss.is_finite() || loss < 0.0 {
            return Err(CliError::Usage(format!("loss {loss} outside [0, inf)")));
        }
        let list = self
            .intensities
            .or(file.intensities)
            .ok_or_else(|| CliError::Usage("--intensities is required".into()))?;
        let intensities = tfqkd_core::io::parse_intensity_list(&list)
            .map_err(|e| CliError::Usage(format!("intensities: {e}")))?;
        if intensities.len() != decoys {
            return Err(CliError::Usage(format!(
                "intensity count {} does not match --decoys {decoys}",
                intensities.len()
            )));
        }
        let out = self
            .out
            .or_else(|| file.out.map(std::path::PathBuf::from))
            .ok_or_else(|| CliError::Usage("--out is required".into()))?;
        let echo = format!("decoys={decoys} pd={pd:e} loss={loss} intensities={intensities:?}");
        Ok(SimulateSpec {
            intensities,
            pd,
            loss,
            out,
            echo,
        })
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Smaller case counts for a fast smoke run.
    #[arg(long)]
    pub quick: bool,
}
