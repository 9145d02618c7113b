use apids_cli::commands::{self, CliFailure};
use apids_cli::config::RunConfig;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral toolkit for almost-periodic operators (−Δ)^w + B: validation,
/// gauge transform, resonance geometry, density of states, expansion fits.
#[derive(Parser)]
#[command(name = "apids", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Path to the TOML run configuration.
    #[arg(long, global = true, default_value = "apids.toml")]
    config: PathBuf,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the quadrature seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker thread count (defaults to the core count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Convergence grid override (Brillouin-zone points per dimension;
    /// also the norm-grid refinement for `symbols`).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Override the gauge depth k̃.
    #[arg(long, global = true)]
    ktilde: Option<u32>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the parameter chain, symbol symmetry and the frequency
    /// conditions.
    Validate,
    /// Symbol diagnostics: norms, symmetry, partition defects.
    Symbols,
    /// Run the gauge recursion and report per-level residuals.
    Gauge,
    /// Resonance-region geometry and congruence-class statistics.
    Regions,
    /// Compute N(λ) with the configured engines; writes ids.csv.
    Ids,
    /// Fit the asymptotic expansion to an ids.csv; writes fit.json.
    Fit,
}

fn run(cli: &Cli) -> Result<String, CliFailure> {
    if let Some(t) = cli.threads {
        // ignore failure if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let strict = !matches!(cli.cmd, Cmd::Validate);
    let mut cfg = RunConfig::load(&cli.config, strict)?;
    if let Some(seed) = cli.seed {
        cfg.raw.ids.seed = seed;
    }
    if let Some(g) = cli.grid {
        cfg.raw.ids.bz_grid = g;
    }
    if let Some(k) = cli.ktilde {
        cfg.scales.k_tilde = k;
        if strict {
            cfg.scales.validate()?;
        }
    }
    match cli.cmd {
        Cmd::Validate => {
            let rep = commands::cmd_validate(&cfg)?;
            let text = rep.render();
            if rep.all_pass() {
                Ok(text)
            } else {
                Err(CliFailure {
                    exit_code: 3,
                    message: format!("{text}validation failed"),
                })
            }
        }
        Cmd::Symbols => commands::cmd_symbols(&cfg, cli.grid.unwrap_or(1)),
        Cmd::Gauge => commands::cmd_gauge(&cfg, &cli.out),
        Cmd::Regions => commands::cmd_regions(&cfg, 2000),
        Cmd::Ids => commands::cmd_ids(&cfg, &cli.out),
        Cmd::Fit => commands::cmd_fit(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.exit_code as u8)
        }
    }
}
