//! Command implementations. Input/validation problems exit 2, numerical
//! failures during computation exit 1 (mapped in `run`).

use tfqkd_core::bounds::{four, three, two};
use tfqkd_core::channel::simulate_gain_table;
use tfqkd_core::optimize::{
    maximize_rate, sweep as core_sweep, worst_case_rate, Evaluator, FluctuationSpec,
};
use tfqkd_core::types::{ChannelParams, GainTable, IntensitySet, Outcome, YieldBoundSet};
use tfqkd_core::{io as core_io, validate as core_validate};

use crate::config::{
    BoundsArgs, FluctuateArgs, OptimizeArgs, SimulateArgs, SweepArgs, ValidateArgs,
};
use crate::output;
use crate::CliError;

fn write_or_print(path: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let spec = args.resolve()?;
    let points = core_sweep(&spec.scenario, &spec.loss_grid, spec.threads)?;
    std::fs::write(&spec.out, output::sweep_csv(&spec.echo, &points))?;
    Ok(())
}

pub fn optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let spec = args.resolve()?;
    let ev = Evaluator::new(&spec.scenario)?;
    let point = maximize_rate(&ev, spec.loss)?;
    let mode = match spec.scenario.mode {
        tfqkd_core::security::DecoyMode::Two => "2",
        tfqkd_core::security::DecoyMode::Three => "3",
        tfqkd_core::security::DecoyMode::Four => "4",
        tfqkd_core::security::DecoyMode::Infinite => "inf",
    };
    let mut text = output::optimize_json(mode, &point);
    text.push('\n');
    write_or_print(spec.out.as_deref(), &text)
}

pub fn fluctuate(args: FluctuateArgs) -> Result<(), CliError> {
    let spec = args.resolve()?;
    let fluct = FluctuationSpec::new(spec.magnitude)?;
    let ev = Evaluator::new(&spec.scenario)?;
    let mut rows = Vec::with_capacity(spec.loss_grid.len());
    for &loss in &spec.loss_grid {
        let w = worst_case_rate(&ev, loss, fluct)?;
        rows.push((w.nominal, w.worst_rate));
    }
    std::fs::write(&spec.out, output::fluctuate_csv(&spec.echo, &rows))?;
    Ok(())
}

/// Bounds from an external gain file: one bound set per outcome present.
pub fn bounds(args: BoundsArgs) -> Result<(), CliError> {
    let spec = args.resolve()?;
    let text = std::fs::read_to_string(&spec.gains)
        .map_err(|e| CliError::Usage(format!("gains {}: {e}", spec.gains.display())))?;
    let tables = core_io::parse_gains_csv(&text)
        .map_err(|e| CliError::Usage(format!("gains {}: {e}", spec.gains.display())))?;
    if tables.is_empty() {
        return Err(CliError::Usage("gain file holds no tables".into()));
    }
    let mut sets = Vec::new();
    for table in tables {
        if table.size() != spec.decoys {
            return Err(CliError::Usage(format!(
                "outcome {}: table is {size}x{size} but --decoys is {decoys}",
                table.outcome.label(),
                size = table.size(),
                decoys = spec.decoys
            )));
        }
        sets.push(bounds_for_table(&spec.intensities, table)?);
    }
    let mut text = output::bounds_json(spec.decoys, &spec.intensities, &sets);
    text.push('\n');
    write_or_print(spec.out.as_deref(), &text)
}

/// Dispatch one gain table through the right bound module. Invariant
/// violations (ordering, separation, zero intensities) are usage errors.
pub fn bounds_for_table(intensities: &[f64], table: GainTable) -> Result<YieldBoundSet, CliError> {
    let usage = |e: tfqkd_core::Error| CliError::Usage(e.to_string());
    match intensities.len() {
        2 => {
            let set = IntensitySet::descending(intensities.to_vec()).map_err(usage)?;
            let input = two::TwoDecoyInput::new(&set, table).map_err(usage)?;
            two::two_decoy_bounds(&input).map_err(CliError::from)
        }
        3 => {
            let set = IntensitySet::descending(intensities.to_vec()).map_err(usage)?;
            let input = three::ThreeDecoyInput::new(&set, table).map_err(usage)?;
            three::three_decoy_bounds(&input).map_err(CliError::from)
        }
        4 => {
            let set = IntensitySet::with_roles(intensities.to_vec()).map_err(usage)?;
            let input = four::FourDecoyInput::new(&set, table).map_err(usage)?;
            four::four_decoy_bounds(&input, None).map_err(CliError::from)
        }
        n => Err(CliError::Usage(format!("unsupported decoy count {n}"))),
    }
}

pub fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let spec = args.resolve()?;
    let eta = 10f64.powf(-spec.loss / 10.0);
    let ch = ChannelParams::with_standard_misalignment(eta, spec.pd)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let tables: Vec<GainTable> = Outcome::BOTH
        .iter()
        .map(|&o| simulate_gain_table(&ch, &spec.intensities, o))
        .collect::<Result<_, _>>()?;
    let mut text = format!("# tfqkd simulate {}\n", spec.echo);
    text.push_str(&core_io::format_gains_csv(&tables));
    std::fs::write(&spec.out, text)?;
    Ok(())
}

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let suites = core_validate::run_all(args.quick)?;
    let mut all_ok = true;
    for s in &suites {
        let verdict = if s.passed() { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {:<28} cases={:<5} failures={:<3} worst margin={:+.3e}",
            s.name, s.cases, s.failures, s.worst
        );
        all_ok &= s.passed();
    }
    if all_ok {
        println!("all validation suites passed");
        Ok(())
    } else {
        Err(CliError::Numerical("validation suite failed".into()))
    }
}
