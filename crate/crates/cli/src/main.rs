use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use uavassoc::harness::pipeline::{evaluate_cmd, generate_cmd, histogram_cmd, sweep_cmd, train_cmd, train_models_cmd};
use uavassoc::harness::{ExperimentConfig, Stream, SweepAxis, SweepPoint};
use uavassoc::policies::PolicyKind;
use uavassoc::Error;

/// Base-station association for a UAV with a directional antenna: datasets,
/// classifier training and Monte Carlo coverage.
#[derive(Parser)]
#[command(name = "uavassoc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML, or JSON by extension). Defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    height_m: Option<f64>,
    #[arg(long)]
    density_per_km2: Option<f64>,
    #[arg(long)]
    beamwidth_deg: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum StreamArg {
    Train,
    Test,
}

#[derive(Subcommand)]
enum Command {
    /// Print the default config as TOML.
    DefaultConfig,
    /// Generate a labelled dataset CSV.
    Generate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value = "train")]
        stream: StreamArg,
        /// Number of samples; defaults to the configured train or test size.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Train a classifier on a dataset CSV.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        data: PathBuf,
        /// Held-out dataset to report accuracy on.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Coverage of each policy at one point.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long = "policy", value_parser = parse_policy)]
        policies: Vec<PolicyKind>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Coverage along one axis, all other parameters at their defaults.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        #[arg(long = "policy", value_parser = parse_policy)]
        policies: Vec<PolicyKind>,
        #[arg(long)]
        models_dir: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Generate data and train one model per (density, beamwidth) pair on the given axes.
    TrainModels {
        #[command(flatten)]
        common: Common,
        #[arg(long = "axis", value_parser = parse_axis, required = true)]
        axes: Vec<SweepAxis>,
        #[arg(long)]
        models_dir: PathBuf,
    },
    /// Distance rank of the chosen BS at the configured histogram heights.
    Histogram {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_policy, default_value = "neural")]
        policy: PolicyKind,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> Result<SweepAxis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn load_config(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) if !p.exists() => return Err(Error::InvalidConfig(format!("config file {} not found", p.display()))),
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    if let Some(n) = common.trials {
        cfg.n_trials = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn point(cfg: &ExperimentConfig, args: &PointArgs) -> Result<SweepPoint, Error> {
    let mut p = cfg.default_point();
    p.uav_height_m = args.height_m.unwrap_or(p.uav_height_m);
    p.bs_density_per_km2 = args.density_per_km2.unwrap_or(p.bs_density_per_km2);
    p.beamwidth_deg = args.beamwidth_deg.unwrap_or(p.beamwidth_deg);
    let check = ExperimentConfig {
        uav_height_m: p.uav_height_m,
        bs_density_per_km2: p.bs_density_per_km2,
        beamwidth_deg: p.beamwidth_deg,
        ..cfg.clone()
    };
    check.validate()?;
    Ok(p)
}

fn policies_or_config(cfg: &ExperimentConfig, given: Vec<PolicyKind>) -> Vec<PolicyKind> {
    if given.is_empty() {
        cfg.policies.clone()
    } else {
        given
    }
}

fn require(path: &Path) -> Result<(), Error> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("{} not found", path.display()))))
    }
}

fn print_results(results: &[uavassoc::harness::CoverageResult]) {
    for r in results {
        println!(
            "{:>8} {:<9} coverage={:.4} ci=[{:.4}, {:.4}] n={}",
            r.axis_value, r.policy, r.coverage, r.ci_low, r.ci_high, r.n_trials
        );
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::DefaultConfig => print!("{}", ExperimentConfig::default().to_toml()),
        Command::Generate { common, point: pa, stream, samples, out } => {
            let cfg = load_config(&common)?;
            let p = point(&cfg, &pa)?;
            let (stream, default_n) = match stream {
                StreamArg::Train => (Stream::Train, cfg.dataset.train_samples),
                StreamArg::Test => (Stream::Test, cfg.dataset.test_samples),
            };
            let ds = generate_cmd(&cfg, &p, stream, samples.unwrap_or(default_n), &out)?;
            eprintln!("wrote {} samples to {}", ds.samples.len(), out.display());
        }
        Command::Train { common, data, test, model, metrics } => {
            let cfg = load_config(&common)?;
            require(&data)?;
            if let Some(t) = &test {
                require(t)?;
            }
            let (trained, test_acc) = train_cmd(&cfg, &data, test.as_deref(), &model, metrics.as_deref())?;
            if let Some(m) = trained.metrics.last() {
                eprintln!("epoch {}: loss {:.4}, validation accuracy {:.4}", m.epoch, m.train_loss, m.validation_accuracy);
            }
            if let Some(a) = test_acc {
                println!("test accuracy {a:.4}");
            }
        }
        Command::Evaluate { common, point: pa, policies, model, out } => {
            let cfg = load_config(&common)?;
            let p = point(&cfg, &pa)?;
            let kinds = policies_or_config(&cfg, policies);
            if let Some(m) = &model {
                require(m)?;
            }
            print_results(&evaluate_cmd(&cfg, &p, &kinds, model.as_deref(), &out)?);
        }
        Command::Sweep { common, axis, policies, models_dir, out, svg } => {
            let cfg = load_config(&common)?;
            let kinds = policies_or_config(&cfg, policies);
            print_results(&sweep_cmd(&cfg, axis, &kinds, models_dir.as_deref(), &out, svg.as_deref())?);
        }
        Command::TrainModels { common, axes, models_dir } => {
            let cfg = load_config(&common)?;
            for t in train_models_cmd(&cfg, &axes, &models_dir)? {
                println!("{}: test accuracy {:.4}", t.point, t.test_accuracy);
            }
        }
        Command::Histogram { common, policy, model, out } => {
            let cfg = load_config(&common)?;
            if let Some(m) = &model {
                require(m)?;
            }
            for (h, probs) in histogram_cmd(&cfg, policy, model.as_deref(), &out)? {
                let cells: Vec<String> = probs.iter().map(|p| format!("{p:.3}")).collect();
                println!("{h:>6} m: {}", cells.join(" "));
            }
        }
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::UnsupportedVersion { .. } => 2,
        Error::MissingModel { .. } => 3,
        Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
