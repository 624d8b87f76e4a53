//! `eventoptics` command-line front end.
//!
//! Exit status is 0 on success, 1 for usage errors and 2 when a run fails.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use eventoptics::config::{self, ConfigDraft, ExperimentKind};
use eventoptics::profile::write_atomic;
use eventoptics::units::{format_angle, format_length, parse_length};
use eventoptics::{analyze, run, Error, ExperimentConfig, ScreenGeometry};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "eventoptics", version, about = "Event-by-event simulation of single-photon interference")]
struct Cli {
    /// Directory for CSV profiles, fit reports and resolved configs.
    #[arg(long, global = true, env = "EVENTOPTICS_OUT_DIR", default_value = ".")]
    out: PathBuf,

    /// Only log warnings and errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two slits, semicircular screen of detectors.
    DoubleSlit(Overrides),
    /// Two Gaussian beams, plane screen.
    TwoBeam(Overrides),
    /// Fresnel biprism, one run per screen offset.
    Biprism {
        /// Comma-separated distances of the screen beyond the apex.
        #[arg(long, value_delimiter = ',', value_parser = length, default_value = "7mm,15mm,55mm")]
        screen_offset: Vec<f64>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the canonical configuration of a preset without running it.
    Config {
        /// double-slit, two-beam or biprism.
        #[arg(value_parser = kind)]
        experiment: ExperimentKind,
        /// Screen distance beyond the apex (biprism only).
        #[arg(long, value_parser = length)]
        screen_offset: Option<f64>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    /// Events per replica.
    #[arg(long)]
    events: Option<u64>,
    #[arg(long)]
    detectors: Option<usize>,
    /// Detector memory, in (0, 1).
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    replicas: Option<u32>,
    /// Wavelength with a unit, e.g. 670nm.
    #[arg(long, value_parser = length)]
    wavelength: Option<f64>,
}

impl Overrides {
    fn apply(&self, draft: &mut ConfigDraft) {
        draft.seed = self.seed.or(draft.seed);
        draft.events = self.events.or(draft.events);
        draft.detectors = self.detectors.or(draft.detectors);
        draft.gamma = self.gamma.or(draft.gamma);
        draft.replicas = self.replicas.or(draft.replicas);
        draft.wavelength = self.wavelength.or(draft.wavelength);
    }
}

fn length(s: &str) -> Result<f64, String> {
    parse_length(s).map_err(|e| e.to_string())
}

fn kind(s: &str) -> Result<ExperimentKind, String> {
    ExperimentKind::from_name(s).map_err(|e| e.to_string())
}

/// A resolved run and the file stem its outputs are written under.
struct Job {
    name: String,
    config: ExperimentConfig,
}

fn jobs(command: &Command) -> Result<Vec<Job>, String> {
    let build = |draft: &ConfigDraft| draft.build().map_err(|e| e.to_string());
    let preset = |kind: ExperimentKind, o: &Overrides| {
        let mut draft = ConfigDraft::new(kind);
        o.apply(&mut draft);
        draft
    };
    match command {
        Command::DoubleSlit(o) => Ok(vec![Job {
            name: "double-slit".into(),
            config: build(&preset(ExperimentKind::DoubleSlit, o))?,
        }]),
        Command::TwoBeam(o) => Ok(vec![Job {
            name: "two-beam".into(),
            config: build(&preset(ExperimentKind::TwoBeam, o))?,
        }]),
        Command::Biprism { screen_offset, overrides } => screen_offset
            .iter()
            .map(|&offset| {
                let mut draft = preset(ExperimentKind::Biprism, overrides);
                draft.screen_offset = Some(offset);
                Ok(Job {
                    name: format!("biprism-{}", format_length(offset)),
                    config: build(&draft)?,
                })
            })
            .collect(),
        Command::Run { config, overrides } => {
            let text = std::fs::read_to_string(config).map_err(|e| format!("{}: {e}", config.display()))?;
            let mut draft = ConfigDraft::from_text(&text).map_err(|e| format!("{}: {e}", config.display()))?;
            overrides.apply(&mut draft);
            let name = config
                .file_stem()
                .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
            Ok(vec![Job {
                name,
                config: build(&draft)?,
            }])
        }
        Command::Config { .. } => Ok(Vec::new()),
    }
}

fn execute(job: &Job, out: &Path) -> eventoptics::Result<()> {
    let profile = run(&job.config)?;
    let csv = out.join(format!("{}.csv", job.name));
    let fit = out.join(format!("{}.fit.txt", job.name));
    write_atomic(
        &out.join(format!("{}.toml", job.name)),
        config::to_text(&job.config).as_bytes(),
    )?;
    // Too few events leave every detector silent; the counts are still written.
    let report = match analyze(&job.config, &profile) {
        Ok(analysis) => {
            analysis.profile.write_csv(&csv)?;
            write_atomic(&fit, analysis.report.to_text().as_bytes())?;
            Some(analysis.report)
        }
        Err(Error::DegenerateFit(why)) => {
            log::warn!("{}: no fit: {why}", job.name);
            profile.write_csv(&csv)?;
            None
        }
        Err(e) => return Err(e),
    };

    let unit: fn(f64) -> String = match job.config.screen.geometry {
        ScreenGeometry::Semicircle { .. } => format_angle,
        ScreenGeometry::Plane { .. } => format_length,
    };
    let period = |p: Option<f64>| p.map_or("none".to_string(), unit);
    println!("{}", job.name);
    println!("  config digest   {}", job.config.digest());
    println!(
        "  events          {} ({} replica(s), seed {})",
        profile.total_events, job.config.replicas, job.config.seed
    );
    println!(
        "  received/fired  {} / {}",
        profile.total_received(),
        profile.total_fired()
    );
    println!("  off screen      {}", profile.off_screen);
    println!("  absorbed        {}", profile.absorbed);
    match &report {
        Some(r) => {
            println!("  normalized rmse {:.4}", r.normalized_rmse);
            println!(
                "  fringe period   sim {} theory {}",
                period(r.fringe_period_sim),
                period(r.fringe_period_theory)
            );
        }
        None => println!("  fit             unavailable"),
    }
    println!("  wrote           {}", csv.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Command::Config {
        experiment,
        screen_offset,
        overrides,
    } = &cli.command
    {
        let mut draft = ConfigDraft::new(*experiment);
        overrides.apply(&mut draft);
        draft.screen_offset = *screen_offset;
        return match draft.build() {
            Ok(c) => {
                print!("{}", config::to_text(&c));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        };
    }

    let jobs = match jobs(&cli.command) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create {}: {e}", cli.out.display());
        return ExitCode::from(2);
    }
    for job in &jobs {
        if let Err(e) = execute(job, &cli.out) {
            log::error!("{}: {e}", job.name);
            eprintln!("error: {}: {e}", job.name);
            return ExitCode::from(2);
        }
    }
    ExitCode::SUCCESS
}
