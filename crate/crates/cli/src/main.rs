use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use naev::harness::{
    compare_sav_naev, convergence_study, halving_sequence, run_simulation, write_snapshot,
    RunConfig, PRESETS,
};
use naev::{Error, ModelKind};

/// Energy-stable auxiliary-variable solvers for 2D gradient flows.
#[derive(Parser)]
#[command(name = "naev", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation, writing the energy log and snapshots.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Temporal convergence study by successive halving of dt.
    Converge {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        steps: StepList,
    },
    /// Compare naev_cn against sav_cn at one or more constants C.
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        steps: StepList,
        /// SAV constants, comma separated.
        #[arg(long = "c-list", value_delimiter = ',', default_values_t = [10.0, 100.0])]
        c_list: Vec<f64>,
    },
    /// Write the initial condition as a snapshot file.
    IcPreview {
        #[command(flatten)]
        config: ConfigArgs,
        /// Snapshot path; defaults to `<output_dir>/phi_ic.bin`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StepList {
    /// Explicit halving sequence of time steps, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["dt0", "levels"])]
    dts: Option<Vec<f64>>,
    /// Coarsest time step; defaults to the config's `dt`.
    #[arg(long)]
    dt0: Option<f64>,
    /// Number of rows in the table.
    #[arg(long, default_value_t = 4)]
    levels: usize,
}

impl StepList {
    fn resolve(&self, cfg: &RunConfig) -> Vec<f64> {
        match &self.dts {
            Some(d) => d.clone(),
            None => halving_sequence(self.dt0.unwrap_or(cfg.dt), self.levels),
        }
    }
}

/// Configuration sources, applied in order: preset, file, flags.
#[derive(Args)]
struct ConfigArgs {
    /// Start from a named reference setup.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS))]
    preset: Option<String>,
    /// TOML file with `RunConfig` fields; applied on top of the preset.
    #[arg(long)]
    config: Option<PathBuf>,

    #[arg(long)]
    model: Option<ModelKind>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    lx: Option<f64>,
    #[arg(long)]
    ly: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    #[arg(long)]
    ic: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    ic_value: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    snapshot_times: Option<Vec<f64>>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    abort_on_clamp: bool,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.preset {
            Some(name) => RunConfig::preset(name)?,
            None => RunConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            cfg = cfg
                .with_toml_overrides(&text)
                .with_context(|| format!("loading {}", path.display()))?;
        }
        macro_rules! set {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f { cfg.$f = v.clone(); }
            )*};
        }
        set!(model, epsilon, g, scheme, c, kappa, nx, ny, lx, ly, dt, t_final, ic, radius, ic_value, seed, snapshot_times);
        if let Some(w) = self.width {
            cfg.width = Some(w);
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = Some(d.clone());
        }
        cfg.abort_on_clamp |= self.abort_on_clamp;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { config } => {
            let cfg = config.resolve()?;
            info!("running {} with {} to t={}", cfg.model, cfg.scheme, cfg.t_final);
            let out = run_simulation(&cfg)?;
            let last = out.log.last().expect("log has the initial record");
            println!(
                "steps {}  E {:.10e}  E_modified {:.10e}  min E1 {:.6e}  clamps {}",
                last.n, last.e_original, last.e_modified, out.min_e1, out.clamp_count
            );
            for s in &out.snapshots {
                println!("snapshot {}", s.display());
            }
        }
        Command::Converge { config, steps } => {
            let cfg = config.resolve()?;
            let table = convergence_study(&cfg, &steps.resolve(&cfg))?;
            print!("{}", table.to_text());
            println!("clamp events {}, min E1 {:.6e}", table.total_clamps(), table.min_e1());
            if let Some(dir) = &cfg.output_dir {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("rates.csv");
                table.write_csv(&path)?;
                println!("wrote {}", path.display());
            }
        }
        Command::Compare {
            config,
            steps,
            c_list,
        } => {
            let cfg = config.resolve()?;
            let report = compare_sav_naev(&cfg, &c_list, &steps.resolve(&cfg))?;
            print!("{}", report.to_text());
            for s in std::iter::once(&report.naev).chain(&report.sav) {
                if let Some(p) = &s.energy_csv {
                    println!("wrote {}", p.display());
                }
            }
        }
        Command::IcPreview { config, out } => {
            let cfg = config.resolve()?;
            let (model, phi) = cfg.build()?;
            let path = match (out, &cfg.output_dir) {
                (Some(p), _) => p,
                (None, Some(d)) => {
                    std::fs::create_dir_all(d)?;
                    d.join("phi_ic.bin")
                }
                (None, None) => bail!("ic-preview needs --out or --output-dir"),
            };
            write_snapshot(&phi, &path, 0.0)?;
            let (lo, hi) = phi
                .values()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            println!(
                "{}: min {lo:.6e} max {hi:.6e} mean {:.6e} E {:.10e} E1 {:.10e}",
                cfg.ic,
                phi.mean(),
                model.total_energy(&phi),
                model.e1_of(&phi)
            );
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::ClampAbort { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
