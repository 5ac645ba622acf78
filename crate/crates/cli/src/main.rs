use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use physio_cli::{run, CliError, CliResult, Command, RunConfig};

#[derive(Parser)]
#[command(name = "physio", version, about = "Latent physiological state discovery from biomarker panels")]
struct Cli {
    /// `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Flag subjects far from the cohort centroid.
    Screen {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        screen: ScreenArgs,
    },
    /// Ward or K-Means clustering at one or more resolutions.
    Cluster {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
    },
    /// Fit a diagonal GMM and append synthetic subjects.
    Augment {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        gmm: GmmArgs,
    },
    /// PCA scores and scatter plot.
    Project {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        pca: PcaArgs,
    },
    /// Profile report, heatmap and PCA scatter per k.
    Report {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Generate a planted-profile seed panel.
    Seedgen {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        seedgen: SeedgenArgs,
    },
    /// Every stage in order, with intermediate files under --out.
    Pipeline {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        screen: ScreenArgs,
        #[command(flatten)]
        cluster: ClusterArgs,
        #[command(flatten)]
        gmm: GmmArgs,
        #[command(flatten)]
        pca: PcaArgs,
        #[command(flatten)]
        report: ReportArgs,
        #[command(flatten)]
        seedgen: SeedgenArgs,
    },
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// auto, fit or identity.
    #[arg(long)]
    normalize: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ScreenArgs {
    #[arg(long)]
    threshold: Option<f64>,
    /// Re-estimate means and stds on the retained subjects.
    #[arg(long)]
    refit_after_screen: bool,
}

#[derive(Args)]
struct ClusterArgs {
    /// Repeatable or comma separated.
    #[arg(long = "k", value_delimiter = ',')]
    k: Vec<usize>,
    /// ward or kmeans.
    #[arg(long)]
    method: Option<String>,
    /// 0 disables the stability report.
    #[arg(long)]
    stability_runs: Option<usize>,
}

#[derive(Args)]
struct GmmArgs {
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    components: Option<usize>,
    #[arg(long)]
    reg_covar: Option<f64>,
    #[arg(long)]
    n_init: Option<usize>,
    /// Silence the observation-to-variable ratio warning.
    #[arg(long)]
    force: bool,
    /// Exit with status 4 when EM does not converge.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct PcaArgs {
    #[arg(long)]
    pca_components: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Rule file replacing the built-in signatures.
    #[arg(long)]
    rules: Option<PathBuf>,
}

#[derive(Args)]
struct SeedgenArgs {
    /// Seed spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Apportion subjects to the reference cohort shares.
    #[arg(long)]
    weighted: bool,
}

fn set<T: ToString>(cfg: &mut RunConfig, key: &str, value: &Option<T>) -> CliResult<()> {
    match value {
        Some(v) => cfg.set(key, &v.to_string()),
        None => Ok(()),
    }
}

impl IoArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        if let Some(p) = &self.input {
            cfg.input = Some(p.clone());
        }
        if let Some(p) = &self.out {
            cfg.out = p.clone();
        }
        set(cfg, "normalize", &self.normalize)?;
        set(cfg, "seed", &self.seed)
    }
}

impl ScreenArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        cfg.refit_after_screen |= self.refit_after_screen;
        set(cfg, "threshold", &self.threshold)
    }
}

impl ClusterArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        if !self.k.is_empty() {
            cfg.k = self.k.clone();
        }
        set(cfg, "method", &self.method)?;
        set(cfg, "stability_runs", &self.stability_runs)
    }
}

impl GmmArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        cfg.force |= self.force;
        cfg.strict |= self.strict;
        set(cfg, "count", &self.count)?;
        set(cfg, "components", &self.components)?;
        set(cfg, "reg_covar", &self.reg_covar)?;
        set(cfg, "n_init", &self.n_init)
    }
}

impl PcaArgs {
    fn apply(&self, cfg: &mut RunConfig) -> CliResult<()> {
        set(cfg, "pca_components", &self.pca_components)
    }
}

impl ReportArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.rules {
            cfg.rules = Some(p.clone());
        }
    }
}

impl SeedgenArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(p) = &self.spec {
            cfg.seed_spec = Some(p.clone());
        }
        cfg.weighted |= self.weighted;
    }
}

fn configure(cli: &Cli) -> CliResult<(Command, RunConfig)> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.apply_file(path)?;
    }
    let command = match &cli.command {
        Cmd::Screen { io, screen } => {
            io.apply(&mut cfg)?;
            screen.apply(&mut cfg)?;
            Command::Screen
        }
        Cmd::Cluster { io, cluster } => {
            io.apply(&mut cfg)?;
            cluster.apply(&mut cfg)?;
            Command::Cluster
        }
        Cmd::Augment { io, gmm } => {
            io.apply(&mut cfg)?;
            gmm.apply(&mut cfg)?;
            Command::Augment
        }
        Cmd::Project { io, cluster, pca } => {
            io.apply(&mut cfg)?;
            cluster.apply(&mut cfg)?;
            pca.apply(&mut cfg)?;
            Command::Project
        }
        Cmd::Report { io, cluster, report } => {
            io.apply(&mut cfg)?;
            cluster.apply(&mut cfg)?;
            report.apply(&mut cfg);
            Command::Report
        }
        Cmd::Seedgen { io, seedgen } => {
            io.apply(&mut cfg)?;
            seedgen.apply(&mut cfg);
            Command::Seedgen
        }
        Cmd::Pipeline {
            io,
            screen,
            cluster,
            gmm,
            pca,
            report,
            seedgen,
        } => {
            io.apply(&mut cfg)?;
            screen.apply(&mut cfg)?;
            cluster.apply(&mut cfg)?;
            gmm.apply(&mut cfg)?;
            pca.apply(&mut cfg)?;
            report.apply(&mut cfg);
            seedgen.apply(&mut cfg);
            Command::Pipeline
        }
    };
    Ok((command, cfg))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result: Result<Vec<PathBuf>, CliError> = configure(&cli).and_then(|(command, cfg)| run(command, &cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
