//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use covprio_core::CriterionId;

use crate::commands::{self, MinNRequest};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::records::{self, CovariateRecord};
use crate::report::{Format, Table};

#[derive(Debug, Parser)]
#[command(
    name = "covprio",
    version,
    about = "Prioritize covariates for a planned meta-analysis study"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Criterion table: one row per covariate.
    Rank {
        #[command(flatten)]
        common: Common,
        /// Emit per-criterion prioritization orders instead of the table.
        #[arg(long)]
        orders: bool,
        /// Size of the top set used for the consensus rows.
        #[arg(long, default_value_t = 4)]
        top_k: usize,
    },
    /// Category of each covariate under each criterion.
    Classify {
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the planned sample size.
    SweepN {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "DE")]
        criterion: String,
        #[arg(long, default_value_t = 1000.0)]
        n_min: f64,
        #[arg(long, default_value_t = 200_000.0)]
        n_max: f64,
        /// Number of log-spaced grid points.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Explicit comma-separated grid; overrides the log grid.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Emit only the points where the leading covariate changes.
        #[arg(long)]
        leaders: bool,
    },
    /// Sweep the prior inclusion probability.
    SweepPrior {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "BFDR")]
        criterion: String,
        /// Explicit comma-separated grid of prior probabilities.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Smallest planned sample size reaching a target criterion value.
    MinN {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "DE")]
        criterion: String,
        #[arg(long)]
        target: f64,
        /// Covariate id; repeat for several. All covariates when omitted.
        #[arg(long = "id")]
        ids: Vec<String>,
        #[arg(long, default_value_t = 1000.0)]
        lower: f64,
        #[arg(long, default_value_t = 200_000.0)]
        upper: f64,
        #[arg(long, default_value_t = 200)]
        check_points: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Covariate CSV; the bundled CRP example when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Config file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value = "tsv")]
    pub format: Format,
    /// Leave out the leading version comment.
    #[arg(long)]
    pub no_header: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// One flag per config key, applied after the config file.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long = "sigma_init_sq", alias = "sigma-init-sq")]
    pub sigma_init_sq: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub pi0: Option<String>,
    #[arg(long = "bf_limit", alias = "bf-limit")]
    pub bf_limit: Option<String>,
    #[arg(long = "bfdr_level", alias = "bfdr-level")]
    pub bfdr_level: Option<String>,
    #[arg(long = "cp_threshold", alias = "cp-threshold")]
    pub cp_threshold: Option<String>,
    #[arg(long = "evidence_source", alias = "evidence-source")]
    pub evidence_source: Option<String>,
    #[arg(long = "gamma_sq", alias = "gamma-sq")]
    pub gamma_sq: Option<String>,
    #[arg(long = "n_ref", alias = "n-ref")]
    pub n_ref: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> [(&'static str, &Option<String>); 11] {
        [
            ("delta", &self.delta),
            ("alpha", &self.alpha),
            ("sigma_init_sq", &self.sigma_init_sq),
            ("omega", &self.omega),
            ("pi0", &self.pi0),
            ("bf_limit", &self.bf_limit),
            ("bfdr_level", &self.bfdr_level),
            ("cp_threshold", &self.cp_threshold),
            ("evidence_source", &self.evidence_source),
            ("gamma_sq", &self.gamma_sq),
            ("n_ref", &self.n_ref),
        ]
    }
}

impl Common {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        for (key, value) in self.overrides.pairs() {
            if let Some(v) = value {
                cfg.set(key, v)
                    .map_err(|e| CliError::Input(format!("--{key}: {e}")))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn records(&self) -> Result<Vec<CovariateRecord>, CliError> {
        match &self.input {
            Some(path) => records::load_records(path),
            None => Ok(records::bundled_records()),
        }
    }

    fn emit(&self, table: &Table, command: &str) -> Result<(), CliError> {
        let comment = format!("covprio {} {command}", env!("CARGO_PKG_VERSION"));
        let text = table.render(self.format, (!self.no_header).then_some(comment.as_str()));
        match &self.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                    // a closed downstream pipe (e.g. `| head`) is not a failure
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    other => other.map_err(|e| CliError::Io(e.to_string())),
                }
            }
        }
    }
}

fn criterion(raw: &str) -> Result<CriterionId, CliError> {
    raw.parse()
        .map_err(|e: covprio_core::Error| CliError::Input(e.to_string()))
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Rank {
            common,
            orders,
            top_k,
        } => {
            let (recs, cfg) = (common.records()?, common.config()?);
            if orders {
                common.emit(&commands::priorities(&recs, &cfg, top_k)?, "rank --orders")
            } else {
                common.emit(&commands::rank(&recs, &cfg)?, "rank")
            }
        }
        Command::Classify { common } => {
            let (recs, cfg) = (common.records()?, common.config()?);
            common.emit(&commands::classify(&recs, &cfg)?, "classify")
        }
        Command::SweepN {
            common,
            criterion: c,
            n_min,
            n_max,
            points,
            grid,
            leaders,
        } => {
            let (recs, cfg) = (common.records()?, common.config()?);
            let grid = match grid {
                Some(g) => g,
                None => commands::sample_size_grid(n_min, n_max, points)?,
            };
            let result = commands::run_sweep_n(&recs, &cfg, criterion(&c)?, grid)?;
            if leaders {
                common.emit(&commands::leader_table(&result, "n"), "sweep-n --leaders")
            } else {
                common.emit(&commands::sweep_n_table(&result), "sweep-n")
            }
        }
        Command::SweepPrior {
            common,
            criterion: c,
            grid,
        } => {
            let (recs, cfg) = (common.records()?, common.config()?);
            let result = commands::run_sweep_prior(&recs, &cfg, criterion(&c)?, grid)?;
            common.emit(&commands::sweep_prior_table(&result), "sweep-prior")
        }
        Command::MinN {
            common,
            criterion: c,
            target,
            ids,
            lower,
            upper,
            check_points,
        } => {
            let (recs, cfg) = (common.records()?, common.config()?);
            let req = MinNRequest {
                criterion: criterion(&c)?,
                target,
                lower,
                upper,
                check_points,
                ids,
            };
            common.emit(&commands::min_n(&recs, &cfg, &req)?, "min-n")
        }
    }
}

/// Parse `args`, run, and return the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("covprio: {e}");
            e.exit_code()
        }
    }
}
