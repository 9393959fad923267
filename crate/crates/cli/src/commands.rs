use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use weakval_core::meter::{convergence_study, simulate_readout, ConvergenceStudy, MeterConfig, MeterReadout, ReadoutMode};
use weakval_core::metrology::{bound_check, cauchy_schwarz_gap, CauchySchwarzGap, MetrologyReport, Strictness, ZeroProbMode};
use weakval_core::optimize::{certify_optimum, optimize_measurement, OptimalityCertificate, OptimizationResult, OptimizeOptions};
use weakval_core::quantum::{QuantumState, ValidationReport};
use weakval_core::split::{
    is_measurement_insensitive, split_fisher, split_operator_flagged, subspace_dimensions, OperatorSplit, SplitFisher,
    SubspaceDimensions,
};
use weakval_core::weak::{weak_value_profile, WeakValueProfile};

use crate::identities::{applicable_checks, profile_checks};
use crate::report::{outcome_rows, render_checks, render_table, sibling_csv, sig6, write_json, write_outcome_csv, CheckRecord, OUTCOME_HEADER};
use crate::scenario::{parse_scenario, LoadedScenario};
use crate::verify::run_verify;

#[derive(Debug, Parser)]
#[command(name = "weakval", version, about = "Weak values, Fisher information and phase-estimation bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario document (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Machine-readable report destination.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random trials per dimension for `verify`.
    #[arg(long, global = true, default_value_t = 200)]
    pub trials: usize,
    /// Comma-separated dimensions for `verify`.
    #[arg(long, global = true, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
    pub dims: Vec<usize>,
    /// Meter coupling λ.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub lambda: f64,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Treatment of zero-probability outcomes in the Fisher information.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    /// Exit 1 when any reported check fails.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Meter position spread σ_x.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub sigma_x: f64,
    #[arg(long, global = true, value_enum, default_value_t = ReadoutArg::Both)]
    pub readout: ReadoutArg,
    /// Couplings for a convergence study, e.g. 0.4,0.2,0.1,0.05.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambdas: Vec<f64>,
    #[arg(long, global = true, default_value_t = 5)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 2000)]
    pub max_iters: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak-value profile and sensitivity report for a scenario.
    Analyze,
    /// Randomized sweep over every identity; exits 1 on any failure.
    Verify,
    /// Monte Carlo meter readout of the weak values.
    SimulateMeter,
    /// Search for the measurement basis with the largest Fisher information.
    Optimize,
    /// Split the generator into phase-visible and phase-invisible parts.
    Decompose,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exclude,
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReadoutArg {
    Position,
    Momentum,
    Both,
}

/// Runs a parsed command line; `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    match cli.command {
        Command::Analyze => analyze(cli),
        Command::Verify => verify(cli),
        Command::SimulateMeter => simulate_meter(cli),
        Command::Optimize => optimize(cli),
        Command::Decompose => decompose(cli),
    }
}

fn load(cli: &Cli) -> Result<(LoadedScenario, QuantumState)> {
    let path = cli.scenario.as_deref().context("--scenario is required for this command")?;
    let loaded = parse_scenario(path)?;
    let state = loaded.scenario.rotated_state()?;
    Ok((loaded, state))
}

fn finish(cli: &Cli, checks: &[CheckRecord]) -> bool {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.identity.as_str()).collect();
    if failed.is_empty() {
        return true;
    }
    eprintln!("failed checks: {}", failed.join(", "));
    !cli.strict
}

fn emit<T: Serialize>(out: Option<&Path>, doc: &T) -> Result<()> {
    if let Some(path) = out {
        write_json(path, doc)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScenarioSummary {
    path: String,
    dimension: usize,
    phase: f64,
    pure: bool,
    projective: bool,
}

fn summary(cli: &Cli, loaded: &LoadedScenario) -> ScenarioSummary {
    let s = &loaded.scenario;
    ScenarioSummary {
        path: cli.scenario.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        dimension: s.dim(),
        phase: s.phase,
        pure: s.state.is_pure(),
        projective: s.measurement.is_projective(),
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    command: &'static str,
    scenario: ScenarioSummary,
    validation: ValidationReport,
    profile: WeakValueProfile,
    metrology: MetrologyReport,
    cauchy_schwarz: CauchySchwarzGap,
    checks: Vec<CheckRecord>,
    passed: bool,
}

fn analyze(cli: &Cli) -> Result<bool> {
    let (loaded, state) = load(cli)?;
    let s = &loaded.scenario;
    let mode = match cli.mode {
        Some(ModeArg::Exclude) => ZeroProbMode::Exclude,
        Some(ModeArg::Limit) if !state.is_pure() => bail!("--mode limit needs a pure state"),
        Some(ModeArg::Limit) => ZeroProbMode::LimitCorrect,
        None => ZeroProbMode::default_for(&state),
    };
    let profile = weak_value_profile(&state, &s.measurement, &s.generator)?;
    let metrology = bound_check(&state, &s.measurement, &s.generator, Some(mode), Strictness::ReportOnly)?;
    let cauchy_schwarz = cauchy_schwarz_gap(&state, &s.measurement, &s.generator)?;
    let mut checks = profile_checks(&state, &s.measurement, &s.generator)?;
    checks.extend(applicable_checks(&state, &s.measurement, &s.generator, mode)?);

    let mut text = format!("{}\n", render_table(&OUTCOME_HEADER, &outcome_rows(&metrology)));
    let delta_phi = match metrology.delta_phi {
        weakval_core::metrology::PhaseUncertainty::DeltaPhi(x) => sig6(x),
        weakval_core::metrology::PhaseUncertainty::Insensitive => "insensitive".into(),
    };
    let summary_rows = vec![
        vec!["fisher".into(), sig6(metrology.fisher)],
        vec!["4·var_in".into(), sig6(metrology.four_var_in)],
        vec!["re_variance".into(), sig6(metrology.re_variance)],
        vec!["est_variance".into(), sig6(metrology.est_variance)],
        vec!["bound_slack".into(), sig6(metrology.bound_slack)],
        vec!["delta_phi".into(), delta_phi],
        vec!["zero_prob_mode".into(), format!("{:?}", metrology.zero_prob_mode)],
    ];
    text += &render_table(&["quantity", "value"], &summary_rows);
    text += "\n";
    text += &render_checks(&checks);
    print!("{text}");

    let passed = checks.iter().all(|c| c.passed);
    if let Some(out) = cli.out.as_deref() {
        write_outcome_csv(&sibling_csv(out), &metrology)?;
    }
    emit(
        cli.out.as_deref(),
        &AnalyzeReport {
            command: "analyze",
            scenario: summary(cli, &loaded),
            validation: loaded.validation.clone(),
            profile,
            metrology,
            cauchy_schwarz,
            checks: checks.clone(),
            passed,
        },
    )?;
    Ok(finish(cli, &checks))
}

fn verify(cli: &Cli) -> Result<bool> {
    if cli.trials == 0 || cli.dims.is_empty() || cli.dims.contains(&0) {
        bail!("verify needs --trials ≥ 1 and positive --dims");
    }
    let matrix = run_verify(cli.seed, cli.trials, &cli.dims);
    print!("{}", matrix.render());
    for e in &matrix.errors {
        eprintln!("error: {e}");
    }
    emit(cli.out.as_deref(), &matrix)?;
    if !matrix.passed {
        eprintln!("failed identities: {}", matrix.failing().join(", "));
    }
    Ok(matrix.passed)
}

#[derive(Serialize)]
struct MeterOutcomeSummary {
    outcome: usize,
    probability: f64,
    exact: f64,
    implied: f64,
    stderr: f64,
    z_score: f64,
}

#[derive(Serialize)]
struct MeterSection {
    readout: MeterReadout,
    comparison: Vec<MeterOutcomeSummary>,
}

#[derive(Serialize)]
struct MeterReport {
    command: &'static str,
    scenario: ScenarioSummary,
    config: MeterConfig,
    sections: Vec<MeterSection>,
    convergence: Vec<ConvergenceStudy>,
    checks: Vec<CheckRecord>,
    passed: bool,
}

fn simulate_meter(cli: &Cli) -> Result<bool> {
    let (loaded, state) = load(cli)?;
    let s = &loaded.scenario;
    let config = MeterConfig::for_generator(&s.generator, cli.sigma_x, cli.lambda, cli.samples, cli.seed);
    let profile = weak_value_profile(&state, &s.measurement, &s.generator)?;
    let modes: &[ReadoutMode] = match cli.readout {
        ReadoutArg::Position => &[ReadoutMode::Position],
        ReadoutArg::Momentum => &[ReadoutMode::Momentum],
        ReadoutArg::Both => &[ReadoutMode::Position, ReadoutMode::Momentum],
    };

    let mut sections = Vec::new();
    let mut checks = Vec::new();
    for &mode in modes {
        let readout = simulate_readout(&state, &s.measurement, &s.generator, &config, mode)?;
        let scale = match mode {
            ReadoutMode::Position => config.coupling,
            ReadoutMode::Momentum => 2.0 * config.coupling * config.sigma_p().powi(2),
        };
        let comparison: Vec<MeterOutcomeSummary> = readout
            .outcomes
            .iter()
            .zip(&profile.outcomes)
            .enumerate()
            .filter_map(|(m, (o, w))| {
                let w = w.weak_value?;
                let exact = if mode == ReadoutMode::Position { w.re } else { w.im };
                let stderr = o.stderr / scale.abs();
                Some(MeterOutcomeSummary {
                    outcome: m,
                    probability: o.count as f64 / readout.samples as f64,
                    exact,
                    implied: o.implied_weak_part,
                    stderr,
                    z_score: (o.implied_weak_part - exact) / stderr,
                })
            })
            .collect();
        let worst = comparison.iter().map(|c| c.z_score.abs()).fold(0.0, f64::max);
        let name = match mode {
            ReadoutMode::Position => "meter-position-z",
            ReadoutMode::Momentum => "meter-momentum-z",
        };
        checks.push(CheckRecord::upper(name, worst, 3.0));

        println!("{mode:?} readout, λ = {}, N = {}", sig6(config.coupling), config.samples);
        let rows: Vec<Vec<String>> = comparison
            .iter()
            .map(|c| {
                vec![
                    c.outcome.to_string(),
                    sig6(c.probability),
                    sig6(c.exact),
                    sig6(c.implied),
                    sig6(c.stderr),
                    sig6(c.z_score),
                ]
            })
            .collect();
        print!("{}", render_table(&["outcome", "frequency", "exact", "implied", "stderr", "z"], &rows));
        for w in &readout.warnings {
            eprintln!("warning: {w}");
        }
        sections.push(MeterSection { readout, comparison });
    }

    let mut convergence = Vec::new();
    if !cli.lambdas.is_empty() {
        for &mode in modes {
            let study = convergence_study(&state, &s.measurement, &s.generator, &config, &cli.lambdas, mode)?;
            println!("{mode:?} convergence (outcome {})", study.rows.first().map_or(0, |r| r.outcome));
            let rows: Vec<Vec<String>> = study
                .rows
                .iter()
                .map(|r| vec![sig6(r.lambda), sig6(r.implied), sig6(r.bias), sig6(r.stderr)])
                .collect();
            print!("{}", render_table(&["lambda", "implied", "bias", "stderr"], &rows));
            checks.push(CheckRecord::upper(
                &format!("{}-quadratic-trend", if mode == ReadoutMode::Position { "position" } else { "momentum" }),
                if study.is_quadratic() { 0.0 } else { 1.0 },
                0.0,
            ));
            convergence.push(study);
        }
    }
    print!("{}", render_checks(&checks));
    let passed = checks.iter().all(|c| c.passed);
    emit(
        cli.out.as_deref(),
        &MeterReport {
            command: "simulate-meter",
            scenario: summary(cli, &loaded),
            config,
            sections,
            convergence,
            checks: checks.clone(),
            passed,
        },
    )?;
    Ok(finish(cli, &checks))
}

#[derive(Serialize)]
struct OptimizeReport {
    command: &'static str,
    scenario: ScenarioSummary,
    options: OptimizeOptions,
    result: OptimizationResult,
    certificate: Option<OptimalityCertificate>,
    checks: Vec<CheckRecord>,
    passed: bool,
}

fn optimize(cli: &Cli) -> Result<bool> {
    let (loaded, state) = load(cli)?;
    let s = &loaded.scenario;
    let options = OptimizeOptions {
        max_iters: cli.max_iters,
        restarts: cli.restarts,
        seed: cli.seed,
        ..OptimizeOptions::default()
    };
    let result = optimize_measurement(&state, &s.generator, options)?;
    let mut checks = vec![CheckRecord::upper("below-ceiling", (-result.gap).max(0.0), 1e-9)];
    let certificate = if state.is_pure() {
        let cert = certify_optimum(&state, &s.generator, &result.best_basis)?;
        checks.push(CheckRecord::upper("ceiling-reached", result.gap / (1.0 + result.ceiling), 1e-5));
        checks.push(CheckRecord::upper("real-weak-values-at-mean", cert.re_deviation, 1e-3));
        Some(cert)
    } else {
        None
    };
    let rows = vec![
        vec!["best_fisher".into(), sig6(result.best_fisher)],
        vec!["ceiling".into(), sig6(result.ceiling)],
        vec!["gap".into(), sig6(result.gap)],
        vec!["converged".into(), result.converged.to_string()],
        vec!["restart".into(), result.restart.to_string()],
        vec!["accepted_steps".into(), result.trace.len().saturating_sub(1).to_string()],
    ];
    print!("{}\n{}", render_table(&["quantity", "value"], &rows), render_checks(&checks));
    let passed = checks.iter().all(|c| c.passed);
    emit(
        cli.out.as_deref(),
        &OptimizeReport {
            command: "optimize",
            scenario: summary(cli, &loaded),
            options,
            result,
            certificate,
            checks: checks.clone(),
            passed,
        },
    )?;
    Ok(finish(cli, &checks))
}

#[derive(Serialize)]
struct DecomposeReport {
    command: &'static str,
    scenario: ScenarioSummary,
    split: OperatorSplit,
    fisher: SplitFisher,
    subspaces: SubspaceDimensions,
    symmetric_part_insensitive: bool,
    checks: Vec<CheckRecord>,
    passed: bool,
}

fn decompose(cli: &Cli) -> Result<bool> {
    let (loaded, state) = load(cli)?;
    let s = &loaded.scenario;
    let split = split_operator_flagged(&state, &s.measurement, &s.generator)?;
    if split.degenerate {
        eprintln!(
            "warning: outcomes {:?} have zero overlap with the state; their γ phase is set to 1",
            split.basis.degenerate
        );
    }
    let fisher = split_fisher(&state, &s.measurement, &s.generator, &split)?;
    let subspaces = subspace_dimensions(s.dim())?;
    let insensitive = is_measurement_insensitive(&state, &s.measurement, &split.symmetric_part)?;
    let sum = split.symmetric_part.matrix() + split.generator_part.matrix();
    let checks = vec![
        CheckRecord::upper("split-sum", weakval_core::linalg::max_abs_diff(&sum, s.generator.matrix()), 1e-12),
        CheckRecord::upper("symmetric-part-fisher", fisher.symmetric.abs(), 1e-9),
        CheckRecord::upper("generator-part-fisher", (fisher.full - fisher.generator).abs(), 1e-9),
    ];
    let rows = vec![
        vec!["fisher(A)".into(), sig6(fisher.full)],
        vec!["fisher(S)".into(), sig6(fisher.symmetric)],
        vec!["fisher(K)".into(), sig6(fisher.generator)],
        vec!["generator subspace".into(), subspaces.generators.to_string()],
        vec!["observable subspace".into(), subspaces.observables.to_string()],
        vec!["S insensitive".into(), insensitive.to_string()],
    ];
    print!("{}\n{}", render_table(&["quantity", "value"], &rows), render_checks(&checks));
    let passed = checks.iter().all(|c| c.passed);
    emit(
        cli.out.as_deref(),
        &DecomposeReport {
            command: "decompose",
            scenario: summary(cli, &loaded),
            split,
            fisher,
            subspaces,
            symmetric_part_insensitive: insensitive,
            checks: checks.clone(),
            passed,
        },
    )?;
    Ok(finish(cli, &checks))
}
