//! `cop`: command-line front end for coherence-of-purification computations.
//!
//! Exit codes: 0 on success, 1 when an asserted invariant fails, 2 on usage
//! or input validation errors.

mod format;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cop_core::aosd::{self, AosdCondition, SweepOptions};
use cop_core::entanglement::entanglement_of_purification;
use cop_core::io::read_state;
use cop_core::optim::{grid_oracle, OptimizerConfig, UnitarySearchResult};
use cop_core::purification::{
    canonical_purification, cop_adapted, cop_fixed_basis, cop_sweep_ancilla, residual_quantumness,
};
use cop_core::random::Seed;
use cop_core::verify::{run_suite, witness_checks, PropId};
use cop_core::{DensityOperator, Error};

#[derive(Debug, Parser)]
#[command(name = "cop", version, about = "Coherence of purification and related measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct OptArgs {
    /// Optimizer restarts (restart 0 starts at the identity).
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Simplex iterations per restart.
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    /// Objective tolerance for simplex convergence.
    #[arg(long, default_value_t = 1e-9)]
    opt_tol: f64,
    /// Seed for every stochastic step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl OptArgs {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            restarts: self.restarts,
            max_iters: self.max_iters,
            f_tol: self.opt_tol,
            seed: Seed(self.seed),
            ..OptimizerConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConditionArg {
    Optimal,
    Constant,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RootArg {
    Plus,
    Minus,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coherence of purification of a state file.
    Compute {
        /// JSON state file (`matrix` or `vector`, optional `factor_dims`)
        #[arg(long)]
        state: PathBuf,
        /// Evaluate the ancilla-adapted closed form instead of the
        /// fixed-basis minimum.
        #[arg(long)]
        adapted: bool,
        /// Minimize over ancilla dimensions rank..d·rank.
        #[arg(long)]
        sweep_ancilla: bool,
        #[command(flatten)]
        opt: OptArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residual quantumness C_P(ρ) − C_P(Δ[ρ]).
    Residual {
        /// JSON state file (`matrix` or `vector`, optional `factor_dims`)
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        opt: OptArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement of purification of a bipartite state, compared with C_P.
    Eop {
        /// JSON state file (`matrix` or `vector`, optional `factor_dims`)
        #[arg(long)]
        state: PathBuf,
        /// Ancilla split `AxB` (default: smallest balanced split of the rank).
        #[arg(long, value_parser = parse_split)]
        split: Option<(usize, usize)>,
        #[command(flatten)]
        opt: OptArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// AOSD sweep over |α|, written as CSV.
    Aosd {
        /// Grid `start:stop:count`, endpoints included [default: 0:1:21, or
        /// 0:0.5:21 for the constant condition].
        #[arg(long, value_parser = parse_grid)]
        alpha_grid: Option<Grid>,
        #[arg(long, value_enum, default_value_t = ConditionArg::Optimal)]
        condition: ConditionArg,
        /// Root of the constant-success condition.
        #[arg(long, value_enum, default_value_t = RootArg::Plus)]
        root: RootArg,
        /// Prior probability of the `+` preparation
        #[arg(long, default_value_t = 0.5)]
        p_plus: f64,
        /// Draw a random common phase for the branch amplitudes at each point.
        #[arg(long)]
        random_phases: bool,
        #[command(flatten)]
        opt: OptArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Haar-sampling cross-check of the fixed-basis minimum.
    Oracle {
        /// JSON state file (`matrix` or `vector`, optional `factor_dims`)
        #[arg(long)]
        state: PathBuf,
        /// Number of Haar-random ancilla unitaries
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property suite.
    Verify {
        /// Comma-separated ids (P1..P8, QR, AOSD) or `all`.
        #[arg(long, default_value = "all")]
        props: String,
        /// Samples per property and dimension
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// System dimensions for properties without a fixed size
        #[arg(long, default_value = "2,3", value_delimiter = ',')]
        dims: Vec<usize>,
        #[command(flatten)]
        opt: OptArgs,
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_split(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or("expected `AxB`")?;
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err("expected `start:stop:count`".into());
    };
    let f = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let n = count.trim().parse::<usize>().map_err(|e| format!("`{count}`: {e}"))?;
    if n == 0 {
        return Err("count must be at least 1".into());
    }
    Ok(Grid(aosd::linspace(f(start)?, f(stop)?, n)))
}

/// Failure kinds mapped to exit codes.
enum Failure {
    Usage(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Optimizer(_) => Failure::Invariant(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<DensityOperator, Failure> {
    read_state(path).map(|s| s.into_density()).map_err(|e| match e {
        Error::Io(io) => Failure::Usage(format!("cannot read `{}`: {io}", path.display())),
        other => Failure::Usage(format!("{}: {other}", path.display())),
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn emit_json(out: Option<&Path>, value: Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(&format::round_json(value)).expect("JSON serialises");
    text.push('\n');
    emit(out, &text)
}

fn optimizer_json(r: &UnitarySearchResult, restarts: usize) -> Value {
    json!({
        "restarts": restarts,
        "best": r.best_restart,
        "converged": r.converged,
        "failed_restarts": r.failed_restarts,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compute { state, adapted, sweep_ancilla, opt, out } => {
            let rho = load(&state)?;
            let value = if adapted {
                json!({
                    "value": cop_adapted(&rho),
                    "definition": "adapted",
                    "ancilla_dim": canonical_purification(&rho, None)?.ancilla_dim,
                    "optimizer": Value::Null,
                })
            } else if sweep_ancilla {
                let sweep = cop_sweep_ancilla(&rho, &opt.config())?;
                json!({
                    "value": sweep.best.value_fixed_basis,
                    "definition": "fixed_basis",
                    "ancilla_dim": sweep.best.ancilla_dim,
                    "optimizer": optimizer_json(&sweep.best.optimizer, opt.restarts),
                    "per_ancilla_dim": sweep.per_dim,
                })
            } else {
                let r = cop_fixed_basis(&rho, &opt.config())?;
                json!({
                    "value": r.value_fixed_basis,
                    "definition": "fixed_basis",
                    "ancilla_dim": r.ancilla_dim,
                    "optimizer": optimizer_json(&r.optimizer, opt.restarts),
                })
            };
            emit_json(out.as_deref(), value)
        }
        Command::Residual { state, opt, out } => {
            let rho = load(&state)?;
            let r = residual_quantumness(&rho, &opt.config())?;
            emit_json(out.as_deref(), json!({ "value": r.value, "cop": r.cop, "cop_dephased": r.cop_dephased }))
        }
        Command::Eop { state, split, opt, out } => {
            let rho = load(&state)?;
            let cfg = opt.config();
            let e = entanglement_of_purification(&rho, &cfg, split)?;
            let cop = cop_fixed_basis(&rho, &cfg)?.value_fixed_basis;
            emit_json(
                out.as_deref(),
                json!({ "eop": e.value, "cop": cop, "gap": cop - e.value, "split": [e.split.0, e.split.1] }),
            )
        }
        Command::Aosd { alpha_grid, condition, root, p_plus, random_phases, opt, out } => {
            let condition = match condition {
                ConditionArg::Optimal => AosdCondition::Optimal,
                ConditionArg::Constant => AosdCondition::Constant { plus_root: matches!(root, RootArg::Plus) },
            };
            let grid = match (alpha_grid, condition) {
                (Some(Grid(g)), _) => g,
                (None, AosdCondition::Optimal) => aosd::linspace(0.0, 1.0, 21),
                (None, AosdCondition::Constant { .. }) => aosd::linspace(0.0, 0.5, 21),
            };
            let opts = SweepOptions { condition, p_plus, random_phases: random_phases.then_some(Seed(opt.seed)) };
            let rows = aosd::sweep(&grid, &opts, &opt.config())?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let io_err = |e: csv::Error| Failure::Usage(format!("CSV output: {e}"));
            w.write_record(["alpha", "ps", "concurrence", "cop", "cop_dephased"]).map_err(io_err)?;
            for r in &rows {
                w.write_record([r.alpha, r.ps, r.concurrence, r.cop, r.cop_dephased].map(format::csv_number))
                    .map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::Usage(format!("CSV output: {e}")))?;
            emit(out.as_deref(), &String::from_utf8(bytes).expect("CSV is UTF-8"))
        }
        Command::Oracle { state, samples, seed, out } => {
            let rho = load(&state)?;
            let base = canonical_purification(&rho, None)?;
            let coeffs = base.coefficients();
            let objective = |u: &cop_core::CMatrix| {
                let rotated = &coeffs * u.transpose();
                cop_core::entropy::entropy_of_weights(rotated.iter().map(|z| z.norm_sqr()))
            };
            let value = grid_oracle(base.ancilla_dim, objective, samples, Seed(seed));
            emit_json(out.as_deref(), json!({ "value": value, "samples": samples, "ancilla_dim": base.ancilla_dim }))
        }
        Command::Verify { props, n, dims, opt, out } => {
            let props = PropId::parse_list(&props)?;
            let cfg = opt.config();
            let reports = run_suite(&props, n, &dims, Seed(opt.seed), &cfg)?;
            let witnesses = witness_checks(&cfg)?;
            let ok = reports.iter().all(|r| r.all_pass()) && witnesses.exhibited();
            emit_json(
                out.as_deref(),
                json!({
                    "seed": opt.seed,
                    "all_pass": ok,
                    "reports": reports,
                    "witnesses": witnesses,
                    "witnesses_exhibited": witnesses.exhibited(),
                }),
            )?;
            for r in &reports {
                eprintln!(
                    "{} d={}: {}/{} pass, worst margin {}",
                    r.prop,
                    r.dim,
                    r.n_pass,
                    r.n_samples,
                    r.worst_margin.map_or("n/a".into(), |m| format!("{m:.3e}"))
                );
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Invariant("verification failed".into()))
            }
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("COP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("COP_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure threads: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
