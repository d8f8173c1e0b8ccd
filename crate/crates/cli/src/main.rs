mod claims;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thermoecon::analysis::{self, InflationOptions};
use thermoecon::ingest::{self, OutputFormat};
use thermoecon::pipeline::Pipeline;
use thermoecon::reconstruction::{EnergyMethod, LABEL_W_SUM_LW, LABEL_W_SUM_REP_MORRIS};
use thermoecon::{Year, YearRange};

use crate::claims::Claim;
use crate::config::{resolve_datasets, RunConfig, DEFAULT_DATA_DIR, DEFAULT_OUT_DIR};

const EXIT_REPRODUCTION_FAILURE: u8 = 1;
const EXIT_INPUT_ERROR: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "thermoecon", version, about = "Rebuild long-run GWP and energy datasets and test the constant-w hypothesis against them")]
struct Cli {
    /// Directory holding the source CSV tables.
    #[arg(long, global = true, env = "THERMOECON_DATA_DIR")]
    data_dir: Option<PathBuf>,
    /// Where outputs are written.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build datasets and write them to the output directory.
    Build(BuildArgs),
    /// Run a falsification test.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Least-squares fit of one series over a year window.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Write every dataset together with every claim report.
    Export(ExportArgs),
    /// Evaluate every reproduction claim and print one line per claim.
    Verify,
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Dataset label, kebab-case alias, or `all`. Repeatable.
    #[arg(long = "dataset", value_delimiter = ',')]
    datasets: Vec<String>,
    #[arg(long, value_enum, ignore_case = true)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long, value_enum, ignore_case = true)]
    method: Option<MethodArg>,
}

#[derive(Subcommand, Debug)]
enum AnalyzeCommand {
    /// Linear drift of W_sum_RepMorris / E_Rep over a window.
    WOverE {
        #[arg(long, default_value_t = 1970)]
        from: Year,
        #[arg(long, default_value_t = 2019)]
        to: Year,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Year-on-year energy change against CPI inflation.
    Inflation {
        #[arg(long)]
        cutoff: Option<f64>,
        /// Pair dE/dt from this many years earlier with each CPI year.
        #[arg(long)]
        lag: Option<Year>,
        #[arg(long, default_value_t = 1970)]
        from: Year,
        #[arg(long, default_value_t = 2019)]
        to: Year,
    },
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Dataset label or one of Y_LW, E_LW, W_LW, W_over_E.
    #[arg(long)]
    series: String,
    #[arg(long)]
    from: Year,
    #[arg(long)]
    to: Year,
    /// Year treated as x = 0.
    #[arg(long, default_value_t = 0)]
    origin: Year,
}

#[derive(Subcommand, Debug)]
enum FitCommand {
    Exp(FitArgs),
    Linear(FitArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    A,
    B,
}

impl From<MethodArg> for EnergyMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::A => EnergyMethod::A,
            MethodArg::B => EnergyMethod::B,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

struct RunContext {
    config: RunConfig,
    data_dir: PathBuf,
    out_dir: PathBuf,
}

impl RunContext {
    fn pipeline(&self, method: Option<MethodArg>) -> anyhow::Result<Pipeline> {
        let mut options = self.config.pipeline.clone();
        if let Some(m) = method {
            options.method = m.into();
        }
        Ok(Pipeline::new(&self.data_dir, options)?)
    }
}

/// Prints each claim line; true when every claim passed.
fn report(claims: &[Claim]) -> bool {
    for c in claims {
        println!("{}", c.line());
    }
    claims.iter().all(|c| c.pass)
}

fn verdict_exit(all_pass: bool) -> ExitCode {
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_REPRODUCTION_FAILURE)
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = RunContext {
        data_dir: cli
            .data_dir
            .or_else(|| config.data_dir.clone())
            .unwrap_or_else(|| DEFAULT_DATA_DIR.into()),
        out_dir: cli
            .out_dir
            .or_else(|| config.out_dir.clone())
            .unwrap_or_else(|| DEFAULT_OUT_DIR.into()),
        config,
    };
    if !ctx.data_dir.is_dir() {
        anyhow::bail!("data directory {} does not exist", ctx.data_dir.display());
    }

    match cli.command {
        Command::Build(args) => build(&ctx, args),
        Command::Analyze(AnalyzeCommand::WOverE { from, to, threshold }) => {
            let p = ctx.pipeline(None)?;
            let threshold = threshold.unwrap_or_else(|| ctx.config.threshold());
            let claim = claims::constancy(&p, from, to, threshold)?;
            Ok(verdict_exit(report(&[claim])))
        }
        Command::Analyze(AnalyzeCommand::Inflation { cutoff, lag, from, to }) => {
            let p = ctx.pipeline(None)?;
            let mut options: InflationOptions = ctx.config.inflation;
            if let Some(c) = cutoff {
                options.outlier_cutoff = c;
            }
            if let Some(l) = lag {
                options.lag = l;
            }
            let claim = claims::inflation(&p, from, to, options)?;
            Ok(verdict_exit(report(&[claim])))
        }
        Command::Fit(cmd) => fit(&ctx, cmd),
        Command::Export(args) => {
            let p = ctx.pipeline(args.method)?;
            let series = build_series(&p, &resolve_datasets("all")?)?;
            let claims = evaluate(&ctx, &p)?;
            let mut reports = dataset_reports(&p, &series)?;
            reports.extend(claims.iter().map(|c| serde_json::to_value(c).unwrap_or_default()));
            let written = ingest::write_outputs(&series, &reports, args.format.into(), &ctx.out_dir)?;
            println!("wrote {} files to {}", written.len(), ctx.out_dir.display());
            Ok(verdict_exit(report(&claims)))
        }
        Command::Verify => {
            let p = ctx.pipeline(None)?;
            let claims = evaluate(&ctx, &p)?;
            Ok(verdict_exit(report(&claims)))
        }
    }
}

fn evaluate(ctx: &RunContext, p: &Pipeline) -> anyhow::Result<Vec<Claim>> {
    claims::evaluate(p, &ctx.config.analyses, ctx.config.threshold(), ctx.config.inflation)
        .into_iter()
        .collect::<thermoecon::Result<Vec<_>>>()
        .map_err(Into::into)
}

fn build_series(p: &Pipeline, labels: &[&str]) -> anyhow::Result<Vec<thermoecon::AnnualSeries>> {
    labels
        .iter()
        .map(|l| p.dataset(l).with_context(|| format!("building {l}")))
        .collect()
}

fn dataset_reports(p: &Pipeline, series: &[thermoecon::AnnualSeries]) -> anyhow::Result<Vec<serde_json::Value>> {
    let mut reports = Vec::new();
    for s in series {
        let w = match s.label() {
            LABEL_W_SUM_LW => p.w_sum_lw()?,
            LABEL_W_SUM_REP_MORRIS => p.w_sum_rep_morris()?,
            _ => continue,
        };
        let flagged: Vec<Year> = w.flagged_years().collect();
        reports.push(json!({
            "dataset": s.label(),
            "flagged_unreliable": flagged.first().map(|first| [*first, *flagged.last().unwrap_or(first)]),
            "flagged_count": flagged.len(),
        }));
    }
    let warnings = p.supplement().map(|s| s.1.clone()).unwrap_or_default();
    if !warnings.is_empty() {
        reports.push(json!({ "supplement_warnings": warnings }));
    }
    Ok(reports)
}

fn build(ctx: &RunContext, args: BuildArgs) -> anyhow::Result<ExitCode> {
    let selectors = if args.datasets.is_empty() {
        if ctx.config.datasets.is_empty() {
            vec!["all".to_string()]
        } else {
            ctx.config.datasets.clone()
        }
    } else {
        args.datasets
    };
    let mut labels: Vec<&str> = Vec::new();
    for s in &selectors {
        for l in resolve_datasets(s)? {
            if !labels.contains(&l) {
                labels.push(l);
            }
        }
    }
    let p = ctx.pipeline(args.method)?;
    let series = build_series(&p, &labels)?;
    let reports = dataset_reports(&p, &series)?;
    let format = args
        .format
        .map(OutputFormat::from)
        .or(ctx.config.format)
        .unwrap_or_default();
    let written = ingest::write_outputs(&series, &reports, format, &ctx.out_dir)?;
    for s in &series {
        println!(
            "built {} ({} points, {}..={}, {})",
            s.label(),
            s.len(),
            s.first_year().unwrap_or_default(),
            s.last_year().unwrap_or_default(),
            s.unit()
        );
    }
    println!("wrote {} files to {}", written.len(), ctx.out_dir.display());

    // the Morris datasets carry their own consistency checks
    let mut checks = Vec::new();
    if labels.iter().any(|l| l.contains("RepMorris")) {
        checks.push(claims::morris_anchor(&p)?);
        checks.push(claims::gk_constancy(&p)?);
    }
    Ok(verdict_exit(report(&checks)))
}

fn fit(ctx: &RunContext, cmd: FitCommand) -> anyhow::Result<ExitCode> {
    let p = ctx.pipeline(None)?;
    let (args, exponential) = match cmd {
        FitCommand::Exp(a) => (a, true),
        FitCommand::Linear(a) => (a, false),
    };
    let series = p.series(&args.series)?;
    let window = YearRange::new(args.from, args.to)?;
    let mut checks = Vec::new();
    if exponential {
        let f = analysis::fit_exponential(&series, window, args.origin)?;
        println!(
            "{} = {:.6} * exp({:.6e} * (year - {})), r2 = {:.4}, n = {}",
            args.series, f.amplitude, f.rate, args.origin, f.r2, f.n
        );
        if args.series == "W_LW" && (args.from, args.to, args.origin) == (1, 1969, 0) {
            checks.push(claims::w_lw_exponential(&p)?);
        }
    } else {
        let f = analysis::fit_linear(&series, window, args.origin)?;
        println!(
            "{} = {:.6e} * (year - {}) + {:.6}, r2 = {:.4}, n = {}",
            args.series, f.slope, args.origin, f.intercept, f.r2, f.n
        );
        if args.series == "W_over_E" && (args.from, args.to, args.origin) == (1970, 2020, 1970) {
            checks.push(claims::w_over_e_fit(&p)?);
        }
    }
    Ok(verdict_exit(report(&checks)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
