//! `wthermo`: pressure, dimensions, spectra and marginal projections for
//! weighted shifts described by a JSON model file.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 model or input error,
//! 3 computation budget exhausted, 4 infeasible constraint.

mod model;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use weighted_thermo::equilibrium::WeightedGibbsMeasure;
use weighted_thermo::multifractal::{
    birkhoff_spectrum, local_dimension_spectrum, q_grid, vector_spectrum,
};
use weighted_thermo::optimize::BfgsOptions;
use weighted_thermo::pressure::{
    pressure, pressure_enclosure, GradientOptions, PressureEnclosure, PressureOptions,
};
use weighted_thermo::projection::{project, MarginalConstraint, ProjectionOptions};
use weighted_thermo::shift_space::format_symbols;
use weighted_thermo::{exec, Error, FiniteDepth, PushMode};

use model::Model;

#[derive(Debug)]
pub enum CliError {
    Model(String),
    Compute(Error),
    Io(String),
    Budget(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(_) | CliError::Io(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Compute(e) => match e {
                Error::Budget { .. } | Error::NMaxTooSmall(_) => 3,
                Error::BoundaryConstraint(_) => 4,
                Error::NonFinite(_)
                | Error::EnclosureTooWide { .. }
                | Error::NoConvergence { .. } => 1,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Model(m) | CliError::Io(m) | CliError::Budget(m) => f.write_str(m),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "wthermo", version, about = "Weighted thermodynamic formalism on chains of full shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON model file.
    #[arg(long)]
    model: PathBuf,
    /// Largest word length used by enumeration (overrides the model budget).
    #[arg(long)]
    n_max: Option<usize>,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Weighted pressure of a named potential.
    Pressure {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        potential: String,
    },
    /// Hausdorff dimension of the symbolic space.
    Dimension {
        #[command(flatten)]
        common: Common,
    },
    /// Multifractal spectrum as CSV (q,alpha,f), or one point of a vector
    /// spectrum as JSON when --alpha is given.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Birkhoff spectrum of this potential.
        #[arg(long, conflicts_with = "measure")]
        potential: Option<String>,
        /// Local-dimension spectrum of this Bernoulli measure.
        #[arg(long)]
        measure: Option<String>,
        /// With --potential: local-dimension spectrum of its equilibrium state.
        #[arg(long, requires = "potential")]
        local_dimension: bool,
        #[arg(long)]
        q_max: Option<f64>,
        #[arg(long)]
        q_steps: Option<usize>,
        /// Target average for a vector potential, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "potential")]
        alpha: Option<Vec<f64>>,
    },
    /// Maximal weighted entropy subject to block marginals read from a JSON
    /// file {"n": .., "p": [..]}.
    ProjectMarginals {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        constraint: PathBuf,
        /// Target marginal error (overrides the model budget).
        #[arg(long)]
        tol: Option<f64>,
        /// Largest accepted block length (overrides the model budget).
        #[arg(long)]
        max_block: Option<usize>,
    },
    /// Equilibrium cylinder masses as CSV (word,log_mass).
    Masses {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
}

fn pressure_options(model: &Model, n_max: Option<usize>) -> PressureOptions {
    PressureOptions {
        n_max: n_max.unwrap_or(model.budget.n_max),
        max_words: model.budget.max_words,
        ..Default::default()
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct PressureReport {
    #[serde(flatten)]
    result: PressureEnclosure,
    /// Independent enclosure from enumerating words up to `n_max`.
    enumeration: PressureEnclosure,
}

fn pressure_report(phi: &FiniteDepth, model: &Model, n_max: Option<usize>) -> Result<PressureReport, CliError> {
    let opts = pressure_options(model, n_max);
    let result = pressure(phi, &model.chain, &model.a, &opts)?;
    let enumeration = pressure_enclosure(
        &phi.clone().into(),
        &model.chain,
        &model.a,
        &PressureOptions {
            push_mode: PushMode::Enumerate,
            ..opts
        },
    )?;
    Ok(PressureReport { result, enumeration })
}

#[derive(Serialize)]
struct DimensionReport {
    dim: f64,
    lo: f64,
    hi: f64,
    enumeration: PressureEnclosure,
}

fn run(command: Command) -> Result<(String, Option<PathBuf>), CliError> {
    match command {
        Command::Pressure { common, potential } => {
            let model = Model::load(&common.model)?;
            let phi = model.scalar_potential(&potential)?;
            let report = pressure_report(phi, &model, common.n_max)?;
            Ok((json(&report)?, common.out))
        }
        Command::Dimension { common } => {
            let model = Model::load(&common.model)?;
            let zero = FiniteDepth::zero(0, model.chain.alphabet_size(0));
            let r = pressure_report(&zero, &model, common.n_max)?;
            let report = DimensionReport {
                dim: r.result.estimate,
                lo: r.result.lo,
                hi: r.result.hi,
                enumeration: r.enumeration,
            };
            Ok((json(&report)?, common.out))
        }
        Command::Spectrum {
            common,
            potential,
            measure,
            local_dimension,
            q_max,
            q_steps,
            alpha,
        } => {
            let model = Model::load(&common.model)?;
            let opts = pressure_options(&model, common.n_max);
            let grad = GradientOptions::default();
            let grid = q_grid(
                q_max.unwrap_or(model.budget.q_max),
                q_steps.unwrap_or(model.budget.q_steps),
            );
            let text = match (potential, measure) {
                (Some(name), None) if alpha.is_some() => {
                    let phis = model.potential(&name)?;
                    let alpha = alpha.expect("checked");
                    if alpha.len() != phis.len() {
                        return Err(CliError::Model(format!(
                            "--alpha has {} components, potential {name:?} has {}",
                            alpha.len(),
                            phis.len()
                        )));
                    }
                    let q0 = vec![0.0; phis.len()];
                    let v = vector_spectrum(
                        phis,
                        &model.chain,
                        &model.a,
                        &alpha,
                        &q0,
                        &opts,
                        &grad,
                        &BfgsOptions::default(),
                    )?;
                    json(&v)?
                }
                (Some(name), None) => {
                    let phi = model.scalar_potential(&name)?;
                    let s = if local_dimension {
                        let mu = WeightedGibbsMeasure::new(phi, &model.chain, &model.a, &opts)?;
                        local_dimension_spectrum(&mu, &grid, &opts, &grad)?
                    } else {
                        birkhoff_spectrum(phi, &model.chain, &model.a, &grid, &opts, &grad)?
                    };
                    s.to_csv()
                }
                (None, Some(name)) => {
                    let eta = model.measure(&name)?;
                    let weighted_thermo::equilibrium::MeasureSpec::Bernoulli(p) = eta.spec() else {
                        return Err(CliError::Model(format!(
                            "measure {name:?} is not Bernoulli; local-dimension spectra need an exact product measure"
                        )));
                    };
                    // A fully supported Bernoulli measure is the equilibrium
                    // state of the depth-1 potential found by projecting onto
                    // its own one-symbol marginals.
                    let c = MarginalConstraint::from_block_law(1, p.clone());
                    let proj = project(
                        &c,
                        &model.chain,
                        &model.a,
                        &ProjectionOptions {
                            tol: model.budget.tol,
                            pressure: opts,
                            ..Default::default()
                        },
                    )?;
                    local_dimension_spectrum(&proj.measure, &grid, &opts, &grad).map(|s| s.to_csv())?
                }
                _ => {
                    return Err(CliError::Model(
                        "spectrum needs exactly one of --potential or --measure".into(),
                    ))
                }
            };
            Ok((text, common.out))
        }
        Command::ProjectMarginals {
            common,
            constraint,
            tol,
            max_block,
        } => {
            let model = Model::load(&common.model)?;
            let c = read_constraint(&constraint)?;
            let cap = max_block.unwrap_or(model.budget.max_block);
            if c.n > cap {
                return Err(CliError::Budget(format!(
                    "block length {} exceeds the limit {cap}; raise it with --max-block",
                    c.n
                )));
            }
            let opts = ProjectionOptions {
                tol: tol.unwrap_or(model.budget.tol),
                pressure: pressure_options(&model, common.n_max),
                ..Default::default()
            };
            let r = project(&c, &model.chain, &model.a, &opts)?;
            Ok((json(&r.summary())?, common.out))
        }
        Command::Masses {
            common,
            potential,
            depth,
        } => {
            let model = Model::load(&common.model)?;
            let phi = model.scalar_potential(&potential)?;
            let opts = pressure_options(&model, common.n_max);
            let mu = WeightedGibbsMeasure::new(phi, &model.chain, &model.a, &opts)?;
            let mut out = String::from("word,log_mass,log_ratio_bound\n");
            for (word, _) in mu.export_masses(depth) {
                let w = weighted_thermo::Word::new(&model.chain, 0, word)?;
                let m = mu.cylinder_mass(&w)?;
                out.push_str(&format!(
                    "{},{},{}\n",
                    format_symbols(w.symbols()),
                    m.value,
                    m.log_ratio_bound
                ));
            }
            Ok((out, common.out))
        }
    }
}

fn read_constraint(path: &Path) -> Result<MarginalConstraint, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Model(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Model(format!("constraint file: {e}")))
}

fn threads_of(command: &Command) -> usize {
    match command {
        Command::Pressure { common, .. }
        | Command::Dimension { common }
        | Command::Spectrum { common, .. }
        | Command::ProjectMarginals { common, .. }
        | Command::Masses { common, .. } => common.threads,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = threads_of(&cli.command);
    let result = exec::with_threads(threads, || run(cli.command));
    let outcome = result.and_then(|(text, out)| match out {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wthermo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
