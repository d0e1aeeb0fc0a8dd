//! The subcommands, independent of argument parsing and process exit.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use waylimit_core::bounds::{BoundEvaluator, ConservationPair, INEQUALITY_TOL};
use waylimit_core::optimizer::{
    exchange_theta, optimize_noise, spin_ladder_probe, sweep_probe_size, NoiseProblem,
    Objective, OptimizerConfig, ProbeFamily,
};
use waylimit_core::oscillator::{m_z_moments, oscillator_bound, CoherentAmplitudes, FockSpace};
use waylimit_core::spin::{
    named_spin_state, spin_basis, spin_operators, swap_demo_model, trivial_demo_model, Axis,
    YWModel,
};
use waylimit_core::{Complex64, Ket64};

use crate::report::{fmt_num, fmt_opt, report_csv_row, Environment, ReportFile, REPORT_CSV_HEADER};
use crate::schema::{
    encode_ket, parse_json, JsonComplex, JsonKet, JsonNumber, Metadata, ModelFile, YWModelFile,
};

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Clean,
    /// Some inequality that is a theorem failed numerically.
    Violation,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Clean => 0,
            Status::Violation => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    /// Diagnostics for stderr.
    pub warnings: Vec<String>,
}

impl Outcome {
    fn clean() -> Self {
        Outcome {
            status: Status::Clean,
            warnings: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub const STATE_NAMES: [&str; 6] = ["alpha_x", "alpha_y", "alpha_z", "beta_x", "beta_y", "beta_z"];

/// A named spin-½ state or an inline JSON ket, which is normalized.
pub fn parse_state(spec: &str, dim: usize) -> Result<Ket64> {
    let spec = spec.trim();
    if spec.starts_with('[') {
        let amps: JsonKet = parse_json(spec, "--state")?;
        if amps.len() != dim {
            bail!("--state: expected {dim} amplitudes, found {}", amps.len());
        }
        let amps = amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        return Ket64::normalize(amps).context("--state");
    }
    let ket = named_spin_state::<f64>(spec).with_context(|| {
        format!(
            "--state: unknown state {spec:?} (named states: {}, or a JSON array of [re, im])",
            STATE_NAMES.join(", ")
        )
    })?;
    if dim != 2 {
        bail!("--state: named spin states need a two-level object, model has object_dim {dim}");
    }
    Ok(ket)
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_json(&text, &path.display().to_string())
}

pub fn verify(model_path: &Path, state: &str, format: ReportFormat, out: &mut dyn Write) -> Result<Outcome> {
    let file = load_model(model_path)?;
    let (model, pair) = file
        .to_model()
        .with_context(|| format!("invalid model {}", model_path.display()))?;
    let psi = parse_state(state, model.object_dim())?;
    let report = BoundEvaluator::new(&model, &pair)?.report(&psi)?;
    match format {
        ReportFormat::Json => {
            let name = if file.metadata.name.is_empty() {
                model_path.display().to_string()
            } else {
                file.metadata.name.clone()
            };
            let rf = ReportFile::new(&name, state, &report, Environment::new(None));
            write_json(out, &rf)?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(REPORT_CSV_HEADER)?;
            w.write_record(report_csv_row(&report))?;
            w.flush()?;
        }
    }
    let mut outcome = Outcome::clean();
    for c in report.checks().iter().filter(|c| !c.holds) {
        outcome.status = Status::Violation;
        outcome.warnings.push(format!(
            "inequality violated: {} (lhs {}, rhs {})",
            c.name,
            fmt_num(c.lhs),
            fmt_num(c.rhs)
        ));
    }
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepArgs {
    pub family: ProbeFamily,
    pub sizes: Vec<f64>,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
}

pub const SWEEP_CSV_HEADER: [&str; 7] =
    ["family", "size", "var_mz", "bound", "achieved", "gap_ratio", "seed"];

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<Outcome> {
    if args.sizes.is_empty() {
        bail!("--sizes: at least one size is required");
    }
    let config = OptimizerConfig {
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        ..OptimizerConfig::default()
    };
    let rows = sweep_probe_size(args.family, &args.sizes, &config);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    let mut outcome = Outcome::clean();
    let slack = INEQUALITY_TOL;
    for r in &rows {
        w.write_record([
            r.family.to_string(),
            fmt_num(r.size),
            fmt_opt(r.var_mz),
            fmt_opt(r.bound),
            fmt_opt(r.achieved),
            fmt_opt(r.gap_ratio),
            r.seed.to_string(),
        ])?;
        if let Some(note) = &r.note {
            outcome.warnings.push(format!("size {}: {note}", r.size));
        }
        if let (Some(a), Some(b)) = (r.achieved, r.bound) {
            if a < b - slack {
                outcome.status = Status::Violation;
                outcome
                    .warnings
                    .push(format!("size {}: achieved {a} below bound {b}", r.size));
            }
        }
        if r.note.as_deref().is_some_and(|n| n.contains("below the bound")) {
            outcome.status = Status::Violation;
        }
    }
    w.flush()?;
    Ok(outcome)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    State,
    Sup,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    SpinLadder,
    Oscillator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableName {
    Sx,
    Sz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitName {
    Identity,
    Exchange,
}

/// Configuration file of `optimize`. Every field is optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_step: f64,
    pub tol: f64,
    pub seed: u64,
    pub objective: ObjectiveName,
    pub family: FamilyName,
    /// Probe dimension of the spin ladder.
    pub size: usize,
    /// Object observable being measured.
    pub observable: ObservableName,
    /// Starting interaction of the first restart.
    pub init: InitName,
    pub optimize_xi: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        OptimizeConfig {
            restarts: d.restarts,
            max_iters: d.max_iters,
            grad_step: d.grad_step,
            tol: d.tol,
            seed: d.seed,
            objective: ObjectiveName::State,
            family: FamilyName::SpinLadder,
            size: 2,
            observable: ObservableName::Sx,
            init: InitName::Identity,
            optimize_xi: d.optimize_xi,
        }
    }
}

impl OptimizeConfig {
    fn optimizer(&self) -> Result<OptimizerConfig> {
        if self.restarts == 0 {
            bail!("config: restarts must be at least 1");
        }
        if !(self.grad_step > 0.0 && self.grad_step.is_finite()) {
            bail!("config: grad_step must be positive");
        }
        if !(self.tol >= 0.0) {
            bail!("config: tol must be nonnegative");
        }
        Ok(OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            grad_step: self.grad_step,
            tol: self.tol,
            seed: self.seed,
            objective: match self.objective {
                ObjectiveName::State => Objective::State,
                ObjectiveName::Sup => Objective::Sup,
            },
            optimize_xi: self.optimize_xi,
        })
    }

    fn problem(&self) -> Result<NoiseProblem> {
        if self.family == FamilyName::Oscillator {
            bail!("config: family \"oscillator\" has no interaction search; use spin_ladder");
        }
        let probe = spin_ladder_probe::<f64>(self.size).context("config: size")?;
        let s = spin_operators::<f64>();
        let a = match self.observable {
            ObservableName::Sx => s.sx,
            ObservableName::Sz => s.sz.clone(),
        };
        let pair = ConservationPair::new(s.sz, probe.jz)?;
        let problem = NoiseProblem::new(a, pair, probe.m, probe.xi, spin_basis(Axis::Y).up)?;
        Ok(match self.init {
            InitName::Identity => problem,
            InitName::Exchange => {
                let theta = exchange_theta(problem.basis());
                problem.with_initial_theta(theta)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartEntry {
    pub restart: usize,
    pub seed: u64,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub violations: usize,
}

/// `optimize` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFile {
    pub config: OptimizeConfig,
    pub seed: u64,
    pub best_restart: usize,
    pub converged: bool,
    pub final_objective: JsonNumber,
    pub bound_value: JsonNumber,
    pub violations: usize,
    pub theta: Vec<f64>,
    pub xi: Vec<JsonComplex>,
    pub objective_trace: Vec<f64>,
    pub restarts: Vec<RestartEntry>,
    pub result_model: ModelFile,
    pub environment: Environment,
}

pub fn optimize(config_text: &str, out: &mut dyn Write) -> Result<Outcome> {
    let cfg: OptimizeConfig = parse_json(config_text, "config")?;
    let opt = cfg.optimizer()?;
    let problem = cfg.problem()?;
    let run = optimize_noise(&problem, &opt)?;
    let file = RunFile {
        config: cfg.clone(),
        seed: run.seed,
        best_restart: run.best_restart,
        converged: run.converged,
        final_objective: run.final_objective.into(),
        bound_value: run.bound_value.into(),
        violations: run.violations(),
        theta: run.theta.clone(),
        xi: encode_ket(&run.xi),
        objective_trace: run.objective_trace.clone(),
        restarts: run
            .restarts
            .iter()
            .map(|r| RestartEntry {
                restart: r.restart,
                seed: r.seed,
                initial_objective: r.initial_objective,
                final_objective: r.final_objective,
                iterations: r.iterations,
                converged: r.converged,
                violations: r.violations,
            })
            .collect(),
        result_model: ModelFile::from_model(
            &run.result_model,
            problem.pair(),
            Metadata {
                name: format!("optimized spin_ladder size {}", cfg.size),
                description: "best interaction found by optimize".into(),
            },
        ),
        environment: Environment::new(Some(cfg.seed)),
    };
    write_json(out, &file)?;
    let mut outcome = Outcome::clean();
    if run.violations() > 0 {
        outcome.status = Status::Violation;
        outcome.warnings.push(format!(
            "{} accepted iterates fell below the Yanase bound",
            run.violations()
        ));
    }
    if !run.converged {
        outcome
            .warnings
            .push("best restart did not converge; reporting best-so-far".into());
    }
    Ok(outcome)
}

pub const DEMO_NAMES: [&str; 3] = ["swap", "trivial", "yw-sample"];

pub fn demo(name: &str, out: &mut dyn Write) -> Result<()> {
    match name {
        "swap" => {
            let (model, pair) = swap_demo_model::<f64>();
            let meta = Metadata {
                name: "swap".into(),
                description: "exchange readout of Sx: conserves total Sz, noiseless, \
                              record observable does not commute with L2"
                    .into(),
            };
            write_json(out, &ModelFile::from_model(&model, &pair, meta))
        }
        "trivial" => {
            let (model, pair) = trivial_demo_model::<f64>();
            let meta = Metadata {
                name: "trivial".into(),
                description: "no interaction and a null record observable".into(),
            };
            write_json(out, &ModelFile::from_model(&model, &pair, meta))
        }
        "yw-sample" => {
            let meta = Metadata {
                name: "yw-sample".into(),
                description: "two-branch interaction on a three-level probe, eps_Y^2 = 0.1"
                    .into(),
            };
            write_json(out, &YWModelFile::from_model(&YWModel::sample(), meta))
        }
        other => bail!(
            "unknown demo {other:?}; available demos: {}",
            DEMO_NAMES.join(", ")
        ),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherentArgs {
    pub n_max: usize,
    /// Moduli tried for both |α| and |β|.
    pub grid: Vec<f64>,
    pub seed: u64,
}

pub const COHERENT_CSV_HEADER: [&str; 8] = [
    "n_max",
    "re_alpha",
    "im_alpha",
    "re_beta",
    "im_beta",
    "var_mz",
    "var_law_error",
    "bound",
];

/// `Δ²m̂_z` of `|α⟩⊗|β⟩` over a grid of moduli with seeded random phases.
pub fn coherent(args: &CoherentArgs, out: &mut dyn Write) -> Result<Outcome> {
    if args.grid.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        bail!("--grid: moduli must be finite and nonnegative");
    }
    let space = FockSpace::new(args.n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COHERENT_CSV_HEADER)?;
    for &ra in &args.grid {
        for &rb in &args.grid {
            let pa: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let pb: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let alpha = Complex64::from_polar(ra, pa);
            let beta = Complex64::from_polar(rb, pb);
            let amps = CoherentAmplitudes::new(alpha, beta, space)
                .with_context(|| format!("|alpha| = {ra}, |beta| = {rb}"))?;
            let state = amps
                .state(space)
                .with_context(|| format!("|alpha| = {ra}, |beta| = {rb}"))?;
            let (_, var) = m_z_moments(space, &state)?;
            let err = (var - amps.total_occupation()).abs();
            w.write_record([
                args.n_max.to_string(),
                fmt_num(alpha.re),
                fmt_num(alpha.im),
                fmt_num(beta.re),
                fmt_num(beta.im),
                fmt_num(var),
                fmt_num(err),
                fmt_num(oscillator_bound(&amps)),
            ])?;
        }
    }
    w.flush()?;
    Ok(Outcome::clean())
}

fn write_json<S: Serialize>(out: &mut dyn Write, value: &S) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}
