use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semiband::ensembles::{verify_aau, BoundKind};
use semiband::harness::manifest::{unix_ms, PointSeeds};
use semiband::harness::{
    emit_plot_data, run_convergence, run_lemma_suite, run_oracle_comparison, run_variance_study, sample_spectrum,
    write_spectrum_csv, BandwidthRule, ExperimentConfig, LemmaSuiteConfig, PlotKind, RunManifest,
};
use semiband::{esd_moment, kolmogorov_distance, BandSpec, CovSpec, Error, Scheme, WignerDist};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "semiband", version, about = "Random band matrices with dependent entries")]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides the config file).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct SchemeArgs {
    /// curie-weiss, gaussian or wigner.
    #[arg(long)]
    scheme: Option<String>,
    /// Curie-Weiss inverse temperature.
    #[arg(long)]
    beta: Option<f64>,
    /// Gaussian correlation exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Gaussian off-diagonal correlation; omit for the largest admissible value n^(-2 alpha).
    #[arg(long, allow_hyphen_values = true)]
    corr: Option<f64>,
    /// Wigner entry law: rademacher or standard-normal.
    #[arg(long)]
    dist: Option<WignerDist>,
}

impl SchemeArgs {
    fn scheme(&self) -> Result<Option<Scheme>, String> {
        let Some(kind) = self.scheme.as_deref() else {
            return Ok(None);
        };
        let s = match kind {
            "curie-weiss" | "cw" => Scheme::CurieWeiss { beta: self.beta.ok_or("--beta is required for curie-weiss")? },
            "gaussian" => {
                let alpha = self.alpha.ok_or("--alpha is required for gaussian")?;
                let cov = match self.corr {
                    Some(c) => CovSpec::Equicorrelated { off_diag_value: c },
                    None => CovSpec::MaxCorrelation,
                };
                Scheme::Gaussian { alpha, cov }
            }
            "wigner" => Scheme::Wigner { dist: self.dist.unwrap_or(WignerDist::StandardNormal) },
            other => return Err(format!("unknown scheme {other:?}")),
        };
        Ok(Some(s))
    }
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// full, power:<gamma> or fixed:<b>.
    #[arg(long)]
    bandwidth: Option<BandwidthRule>,
    /// Replicas per grid point.
    #[arg(long)]
    replicas: Option<usize>,
    /// Moment orders, comma separated.
    #[arg(long, value_delimiter = ',')]
    moments: Vec<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one matrix and write its spectrum.
    Sample {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        n: usize,
        /// Bandwidth (default: n).
        #[arg(long)]
        b: Option<usize>,
    },
    /// ESD moments and Kolmogorov distance across a grid of dimensions.
    Converge(GridArgs),
    /// Variance of ESD moments across replicas and its decay in n.
    Variance(GridArgs),
    /// Exact expected moments against Monte Carlo on small instances.
    OracleCompare(GridArgs),
    /// Exhaustive checks of the counting bounds, Dyck counts and Gaussian bounds.
    VerifyLemmas {
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 6)]
        max_k: usize,
        #[arg(long, default_value_t = 4)]
        max_pair_n: usize,
        #[arg(long, default_value_t = 4)]
        max_pair_k: usize,
    },
    /// Empirical AAU constants for a scheme.
    VerifyAau {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Exponent in the normalization (defaults to the Gaussian alpha or 0.5).
        #[arg(long = "aau-alpha")]
        aau_alpha: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "10,32,100")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        max_l: usize,
    },
    /// Plot data from an experiment CSV.
    PlotData {
        /// Input CSV (spectrum, convergence summary or variance table).
        #[arg(long)]
        input: PathBuf,
        /// esd_histogram, moment_vs_n or variance_loglog.
        #[arg(long)]
        kind: PlotKind,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Run(Error),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Run(other),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, Failure> {
    let mut c = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        c.out_dir = d.clone();
    }
    Ok(c)
}

fn grid_config(cli: &Cli, g: &GridArgs) -> Result<ExperimentConfig, Failure> {
    let mut c = load_config(cli)?;
    if let Some(s) = g.scheme.scheme().map_err(Failure::Usage)? {
        c.scheme = s;
    } else if cli.config.is_none() {
        return Err(Failure::Usage("give --scheme or --config".into()));
    }
    if !g.n.is_empty() {
        c.n_values = g.n.clone();
        c.points.clear();
    }
    if let Some(b) = g.bandwidth {
        c.bandwidth = b;
    }
    if let Some(r) = g.replicas {
        c.replicas = r;
    }
    if !g.moments.is_empty() {
        c.moments = g.moments.clone();
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Sample { scheme, n, b } => {
            let c = load_config(cli)?;
            let s = scheme.scheme().map_err(Failure::Usage)?.unwrap_or(c.scheme.clone());
            let spec = BandSpec::new(*n, b.unwrap_or(*n))?;
            let started = unix_ms();
            let spectrum = sample_spectrum(&s, &spec, c.seed)?;
            std::fs::create_dir_all(&c.out_dir).map_err(Error::from)?;
            let csv = c.out_dir.join("spectrum.csv");
            write_spectrum_csv(&csv, &spectrum)?;
            let mut m = RunManifest::new(
                "sample",
                c.seed,
                serde_json::json!({ "scheme": s, "n": n, "b": spec.b(), "seed": c.seed }),
                started,
            );
            m.points.push(PointSeeds { point: 0, n: *n, b: spec.b(), seeds: vec![c.seed] });
            m.finish(&c.out_dir, "spectrum", std::slice::from_ref(&csv))?;
            println!("scheme      {s}");
            println!("n, b        {n}, {}", spec.b());
            for k in 1..=4 {
                println!("moment {k}    {:.6}", esd_moment(&spectrum, k));
            }
            println!("kolmogorov  {:.6}", kolmogorov_distance(&spectrum));
            println!("wrote       {}", csv.display());
        }
        Command::Converge(g) => {
            let c = grid_config(cli, g)?;
            let out = run_convergence(&c)?;
            println!("{:>6} {:>6} {:>3} {:>12} {:>10} {:>10} {:>10}", "n", "b", "k", "mean", "stderr", "ref", "ks");
            for s in &out.study.summary {
                println!(
                    "{:>6} {:>6} {:>3} {:>12.6} {:>10.2e} {:>10} {:>10.5}",
                    s.n, s.b, s.k, s.mean, s.stderr, s.reference, s.kolmogorov_mean
                );
            }
            println!("wrote {}", out.manifest.display());
        }
        Command::Variance(g) => {
            let c = grid_config(cli, g)?;
            let out = run_variance_study(&c)?;
            for f in &out.study.fits {
                println!(
                    "k={} slope {:.3} +- {:.3}  decreasing={} summable={}",
                    f.k, f.slope, f.slope_stderr, f.strictly_decreasing, f.summable
                );
            }
            println!("wrote {}", out.manifest.display());
        }
        Command::OracleCompare(g) => {
            let c = grid_config(cli, g)?;
            let out = run_oracle_comparison(&c)?;
            for r in &out.comparison.rows {
                println!(
                    "n={} b={} k={} exact={:.12} mc={:.6}+-{:.2e}{}",
                    r.n,
                    r.b,
                    r.k,
                    r.exact,
                    r.mc_mean,
                    r.mc_stderr,
                    if r.flagged { "  FLAGGED" } else { "" }
                );
            }
            println!("wrote {}", out.manifest.display());
            let flagged = out.comparison.flagged().len();
            if flagged > 0 {
                return Err(Failure::Violation(format!("{flagged} comparisons beyond 4 standard errors")));
            }
        }
        Command::VerifyLemmas { max_n, max_k, max_pair_n, max_pair_k } => {
            let c = load_config(cli)?;
            let cfg = LemmaSuiteConfig {
                max_n: *max_n,
                max_k: *max_k,
                max_pair_n: *max_pair_n,
                max_pair_k: *max_pair_k,
                ..LemmaSuiteConfig::default()
            };
            let report = run_lemma_suite(&cfg)?;
            let path = report.save_json(&c.out_dir)?;
            let checked: u64 = report.entries.iter().map(|e| e.checked).sum();
            println!("{} cells, {checked} tuples or pairs checked in {:.1}s", report.entries.len(), report.seconds);
            for v in report.violations.iter().take(20) {
                println!("violation: {v:?}");
            }
            println!("wrote {}", path.display());
            if !report.passed() {
                return Err(Failure::Violation(format!("{} violations", report.violation_count())));
            }
        }
        Command::VerifyAau { scheme, aau_alpha, n, max_l } => {
            let c = load_config(cli)?;
            let s = scheme.scheme().map_err(Failure::Usage)?.unwrap_or(c.scheme.clone());
            let alpha = aau_alpha.unwrap_or(match &s {
                Scheme::Gaussian { alpha, .. } => *alpha,
                _ => 0.5,
            });
            let started = unix_ms();
            let report = verify_aau(&s, alpha, n, *max_l)?;
            std::fs::create_dir_all(&c.out_dir).map_err(Error::from)?;
            let csv = c.out_dir.join("aau.csv");
            report.save_csv(&csv)?;
            let cfg = serde_json::json!({ "scheme": s, "alpha": alpha, "n": n, "max_l": max_l });
            RunManifest::new("verify-aau", c.seed, cfg, started).finish(
                &c.out_dir,
                "aau",
                std::slice::from_ref(&csv),
            )?;
            for kind in [BoundKind::Aau1, BoundKind::Aau2, BoundKind::Aau3] {
                for t in report.trends(kind) {
                    let vals: Vec<String> = t.values.iter().map(|(n, v)| format!("{n}:{v:.4e}")).collect();
                    println!("{kind:?} {:?} {}", t.delta, vals.join(" "));
                }
            }
            println!("wrote {}", csv.display());
            let bad = report.reference_violations().len();
            if !report.consistent(1e-10) || bad > 0 {
                return Err(Failure::Violation(format!(
                    "{bad} constants above reference bounds or inconsistent moments"
                )));
            }
        }
        Command::PlotData { input, kind, output } => {
            let path = emit_plot_data(input, *kind, output.as_deref().map(Path::new))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VIOLATION)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE })
        }
    }
}
