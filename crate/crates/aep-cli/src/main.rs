use aep_cli::config::RunConfig;
use aep_cli::{compare, exactcheck_cmd, pde_cmd, runner, selfdiff_cmd};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "aep",
    about = "Active exclusion process: simulation, PDE solves and verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run replicas of the particle system and export coarse-grained fields.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the hydrodynamic PDE from the configured initial profile.
    Pde {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate the self-diffusion coefficient table.
    Selfdiff {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare the particle system with the PDE across lattice sizes.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the exact finite-volume verification suite.
    Exactcheck {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cmd: &Cmd) -> aep_core::Result<bool> {
    let config_path = match cmd {
        Cmd::Simulate { config }
        | Cmd::Pde { config }
        | Cmd::Selfdiff { config }
        | Cmd::Compare { config }
        | Cmd::Exactcheck { config } => config,
    };
    let (cfg, text) = RunConfig::load(config_path)?;
    match cmd {
        Cmd::Simulate { .. } => {
            runner::run_simulate(&cfg, &text)?;
            println!("simulate: outputs in {}", cfg.paths.output.display());
            Ok(true)
        }
        Cmd::Pde { .. } => {
            let report = pde_cmd::run_pde(&cfg, &text)?;
            println!(
                "pde: mass drift {:.3e}/unit time, clamp correction {:.3e}",
                report.mass_drift_per_unit_time, report.cumulative_correction
            );
            if let Some(linf) = report.heat_linf {
                println!("pde: heat-kernel max error {linf:.3e}");
                return Ok(linf <= 1e-3);
            }
            Ok(report.mass_drift_per_unit_time <= 1e-10)
        }
        Cmd::Selfdiff { .. } => {
            let table = selfdiff_cmd::run_selfdiff(&cfg, &text)?;
            let (rho, ds, _) = table.grid();
            for (r, v) in rho.iter().zip(ds) {
                println!("selfdiff: d_s({r}) = {v:.4}");
            }
            Ok(true)
        }
        Cmd::Compare { .. } => {
            let report = compare::run_compare(&cfg, &text)?;
            for (n, d) in report.sizes.iter().zip(&report.d) {
                println!("compare: D({n}) = {d:.5}");
            }
            println!("compare: log-log slope {:.3}", report.slope);
            let decreasing = report.d.windows(2).all(|w| w[1] < w[0]);
            Ok(decreasing)
        }
        Cmd::Exactcheck { .. } => {
            let verdicts =
                exactcheck_cmd::run_exactcheck(cfg.model.seed, &cfg.paths.output, &text)?;
            let mut ok = true;
            for v in &verdicts {
                println!(
                    "exactcheck: {} defect {:.3e} tolerance {:.3e} {}",
                    v.name,
                    v.defect,
                    v.tolerance,
                    if v.pass { "PASS" } else { "FAIL" }
                );
                ok &= v.pass;
            }
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: in-run assertions failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
