//! Command-line driver for `capacitary-core`: built-in shapes and OFF mesh
//! files in, JSON and CSV reports out.
//!
//! Exit status: 0 on success (whatever the verdict), 1 for usage errors,
//! 2 for solver errors, 3 for mesh validation or failed checks, 4 for
//! unreadable files, 5 for unsupported shapes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;

use args::{Command, Format};
use capacitary_core::identity_lab::{IdentityKind, SuiteOptions};
use commands::{ConvergenceConfig, IdentityConfig, Outcome};
use config::{parse_levels, Input, RunConfig, ShapeSpec};
pub use error::CliError;

fn run_config(
    subcommand: &'static str,
    solve: &args::SolveArgs,
    format: Format,
) -> Result<RunConfig, CliError> {
    let cfg = RunConfig {
        subcommand,
        input: Some(Input::from_args(&solve.input)?),
        quad_order: solve.quad_order,
        far_radius: solve.far_radius,
        tol_f1: None,
        tol_f2: None,
        tol_newton: None,
        format,
        output: solve.out.output.clone(),
        seed: capacitary_core::functionals::DEFAULT_SEED,
        samples: capacitary_core::functionals::DEFAULT_SAMPLE_COUNT,
    };
    Ok(cfg)
}

/// Runs a parsed command. The report text is returned even when the run
/// status is a failure, so that partial results still get written.
pub fn run(command: &Command) -> Result<(Outcome, Option<std::path::PathBuf>), CliError> {
    match command {
        Command::Capacity(a) => {
            let cfg = run_config("capacity", a, a.out.format.unwrap_or(Format::Json))?;
            cfg.check()?;
            Ok((commands::capacity(&cfg)?, cfg.output))
        }
        Command::Verify(a) => {
            let mut cfg = run_config(
                "verify",
                &a.solve,
                a.solve.out.format.unwrap_or(Format::Json),
            )?;
            cfg.tol_f1 = a.tol_f1;
            cfg.tol_f2 = a.tol_f2;
            cfg.tol_newton = a.tol_newton;
            cfg.seed = a.seed;
            cfg.samples = a.samples;
            cfg.check()?;
            Ok((commands::verify(&cfg)?, cfg.output))
        }
        Command::IdentityCheck(a) => {
            let fault = match &a.inject_fault {
                None => None,
                Some(k) => Some(IdentityKind::from_key(k).ok_or_else(|| {
                    CliError::Usage(format!("unknown identity \"{k}\" (div-free, a, b, c)"))
                })?),
            };
            let cfg = IdentityConfig {
                suite: SuiteOptions {
                    dims: a.dims.clone(),
                    points_per_function: a.points,
                    seed: a.seed,
                    fault,
                    ..SuiteOptions::default()
                },
                format: a.out.format,
            };
            Ok((commands::identity_check(&cfg)?, a.out.output.clone()))
        }
        Command::Convergence(a) => {
            let input = Input::from_args(&a.input)?;
            let levels = match (&a.levels, &input) {
                (Some(s), _) => parse_levels(s)?,
                (None, Input::Shape(ShapeSpec { level: Some(l), .. })) if *l >= 2 => {
                    (2..=*l).collect()
                }
                (None, _) => (2..=4).collect(),
            };
            let run = RunConfig {
                subcommand: "convergence",
                input: Some(input),
                quad_order: a.quad_order,
                far_radius: 20.0,
                tol_f1: None,
                tol_f2: None,
                tol_newton: None,
                format: a.out.format.unwrap_or(Format::Csv),
                output: a.out.output.clone(),
                seed: a.seed,
                samples: a.samples,
            };
            run.check()?;
            let cfg = ConvergenceConfig {
                run,
                levels,
                timing: !a.no_timing,
            };
            Ok((commands::convergence(&cfg)?, a.out.output.clone()))
        }
        Command::Oracle(a) => {
            let spec = ShapeSpec::parse(&a.shape)?;
            Ok((
                commands::oracle(&spec, a.dim, a.out.format.unwrap_or(Format::Json))?,
                a.out.output.clone(),
            ))
        }
        Command::Export(a) => {
            let mesh = ShapeSpec::parse(&a.shape)?.mesh()?;
            io::save_off(&mesh, &a.output)?;
            Ok((
                Outcome {
                    text: String::new(),
                    status: Ok(()),
                },
                None,
            ))
        }
    }
}
