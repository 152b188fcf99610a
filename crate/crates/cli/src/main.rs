use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qring_cli::config::parse_number;
use qring_cli::output::emit;
use qring_cli::{commands, verify, Format, Overrides, RunConfig, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "qring",
    version,
    about = "Scattering on a ring of two Y-junctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn number(s: &str) -> std::result::Result<f64, String> {
    parse_number(s)
}

#[derive(Args, Clone)]
struct Common {
    /// INI config file
    #[arg(long, short, env = "QRING_CONFIG")]
    config: Option<PathBuf>,
    /// Copy [node_I] to node II
    #[arg(long)]
    symmetric: bool,
    /// Arm length; places node I at xi = d and node II at xi = 0
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    d: Option<f64>,
    /// Override a config value, e.g. --set node_I.beta=0.25*pi
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    k_min: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    k_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    flux_min: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    flux_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            symmetric: self.symmetric,
            d: self.d,
            k_min: self.k_min,
            k_max: self.k_max,
            points: self.points,
            k: self.k,
            flux_min: self.flux_min,
            flux_max: self.flux_max,
            set: self.set.clone(),
        }
    }

    fn load(&self, verify: bool) -> Result<RunConfig> {
        let cfg = RunConfig::load(
            self.config.as_deref(),
            &self.overrides(),
            self.output.clone(),
            self.format,
            verify,
        )?;
        Ok(cfg)
    }

    fn has_input(&self) -> bool {
        self.config.is_some() || !self.set.is_empty()
    }
}

#[derive(Subcommand)]
enum Command {
    /// Node and ring S-matrices at one k
    Smatrix {
        #[command(flatten)]
        common: Common,
        /// Aharonov-Bohm phase applied at node II
        #[arg(long, value_parser = number, allow_hyphen_values = true, default_value = "0")]
        flux: f64,
    },
    /// R and T across a k grid
    SweepK {
        #[command(flatten)]
        common: Common,
        /// Append the deviation from the direct solve
        #[arg(long)]
        verify: bool,
    },
    /// R and T of a symmetric ring across a flux grid at fixed k
    SweepFlux {
        #[command(flatten)]
        common: Common,
    },
    /// Localized states in a k range
    Localized {
        #[command(flatten)]
        common: Common,
        /// Write the sampled wavefunction of one state here
        #[arg(long)]
        wavefunction: Option<PathBuf>,
        /// Which state (n) to sample; defaults to the first found
        #[arg(long)]
        state: Option<u32>,
    },
    /// Compare closed forms with the direct solver on random draws
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = verify::DEFAULT_DRAWS)]
        draws: usize,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Smatrix { common, flux } => {
            let cfg = common.load(false)?;
            let t = commands::smatrix(&cfg, flux)?;
            emit(&t.render(cfg.format), cfg.output.as_deref())?;
        }
        Command::SweepK { common, verify } => {
            let cfg = common.load(verify)?;
            let t = commands::sweep_k(&cfg)?;
            emit(&t.render(cfg.format), cfg.output.as_deref())?;
        }
        Command::SweepFlux { common } => {
            let cfg = common.load(false)?;
            let t = commands::sweep_flux(&cfg)?;
            emit(&t.render(cfg.format), cfg.output.as_deref())?;
        }
        Command::Localized {
            common,
            wavefunction,
            state,
        } => {
            let cfg = common.load(false)?;
            let (t, states) = commands::localized(&cfg)?;
            emit(&t.render(cfg.format), cfg.output.as_deref())?;
            if let Some(path) = wavefunction {
                let chosen = match state {
                    Some(n) => states.iter().find(|s| s.n == n),
                    None => states.first(),
                };
                let s = chosen.context(
                    "no localized state with coefficients to sample (needs a symmetric ring)",
                )?;
                emit(&commands::wavefunction_table(s).to_csv(), Some(&path))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Verify {
            common,
            seed,
            draws,
            inject_fault,
        } => {
            let cfg = if common.has_input() {
                Some(common.load(true)?)
            } else {
                None
            };
            let opts = VerifyOptions {
                seed,
                draws,
                inject_fault,
            };
            let report = verify::run(cfg.as_ref(), opts);
            let text = match common.format {
                Format::Csv => report.to_text(),
                Format::Json => report.to_json(),
            };
            emit(&text, common.output.as_deref())?;
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
