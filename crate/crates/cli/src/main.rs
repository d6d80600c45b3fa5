use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use xeq_core::ingest::{load_responses, write_responses};
use xeq_core::report::{metadata, render_saved_report, run_pipeline, Analysis, PipelineConfig};
use xeq_core::scoring::{dimension_totals, BenchmarkEntry, BenchmarkStore};
use xeq_core::simulation::{generate_factor_data, generate_retest, generate_two_group, with_survey_metadata, GeneratorSpec};
use xeq_core::{Error, ScaleDefinition};

const EXIT_VALIDATION: u8 = 2;
const EXIT_ANALYSIS: u8 = 3;

/// Scale validation toolkit for the XEQ questionnaire and similar Likert instruments.
#[derive(Parser)]
#[command(name = "xeq", version)]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expert-panel content validity (I-CVI, S-CVI, item selection).
    ValidateContent {
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        expert_ratings: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        threshold_cvi: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Full pilot analysis: reliability, construct and discriminant validity, scores.
    Analyze {
        #[command(flatten)]
        inputs: PipelineArgs,
        /// Restrict to these analyses (default: everything the inputs allow).
        #[arg(long, value_enum, value_delimiter = ',')]
        only: Vec<AnalysisArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Test-retest agreement (Pearson r and both ICC forms).
    Retest {
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        retest: PathBuf,
        #[arg(long)]
        no_filters: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stakeholder, factor and system scores, optionally benchmarked.
    Score {
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        responses: PathBuf,
        /// Per-dimension weights in scale order, summing to 1.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long)]
        benchmark: Option<PathBuf>,
        #[arg(long)]
        no_filters: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Manage the benchmark store of evaluated systems.
    Benchmark {
        #[command(subcommand)]
        action: BenchmarkAction,
    },
    /// Generate synthetic response files with planted factor structure.
    Simulate(SimulateArgs),
    /// Re-render tables and the scree plot from a saved report.json.
    Report {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4)]
        rounding: usize,
    },
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    scale: PathBuf,
    #[arg(long)]
    responses: PathBuf,
    #[arg(long)]
    expert_ratings: Option<PathBuf>,
    #[arg(long)]
    retest: Option<PathBuf>,
    #[arg(long)]
    benchmark: Option<PathBuf>,
    /// Master seed for discriminant trials and CFA restarts; discriminant
    /// trials are skipped without it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0.75)]
    threshold_cvi: f64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Use item-rest instead of item-total correlations.
    #[arg(long)]
    corrected: bool,
    /// Keep under-time and pattern respondents.
    #[arg(long)]
    no_filters: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for report.json, report.txt and plots.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    rounding: usize,
    /// Print JSON instead of text tables.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AnalysisArg {
    Content,
    Reliability,
    Retest,
    Construct,
    Discriminant,
    Scoring,
}

impl From<AnalysisArg> for Analysis {
    fn from(a: AnalysisArg) -> Self {
        match a {
            AnalysisArg::Content => Analysis::ContentValidity,
            AnalysisArg::Reliability => Analysis::Reliability,
            AnalysisArg::Retest => Analysis::TestRetest,
            AnalysisArg::Construct => Analysis::ConstructValidity,
            AnalysisArg::Discriminant => Analysis::DiscriminantValidity,
            AnalysisArg::Scoring => Analysis::Scoring,
        }
    }
}

#[derive(Subcommand)]
enum BenchmarkAction {
    /// Add a system, from a response file or explicit per-dimension totals.
    Add {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        scale: PathBuf,
        #[arg(long)]
        system_id: String,
        #[arg(long, conflicts_with = "totals", required_unless_present = "totals")]
        responses: Option<PathBuf>,
        /// e.g. Learning=14.2,Utility=22.0,Fulfilment=18.5,Engagement=11.0
        #[arg(long, value_delimiter = ',')]
        totals: Option<Vec<String>>,
    },
    /// Classify a system against the store.
    Classify {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        scale: PathBuf,
        #[arg(long, conflicts_with = "totals", required_unless_present = "totals")]
        responses: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        totals: Option<Vec<String>>,
    },
    List {
        #[arg(long)]
        store: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scale: PathBuf,
    /// Respondents (per group when --delta is given).
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Response CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Latent shift of the Negative arm; produces two labelled groups.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.7)]
    loading: f64,
    /// Correlation between dimension factors.
    #[arg(long, default_value_t = 0.3)]
    phi: f64,
    /// Domains assigned round-robin.
    #[arg(long, value_delimiter = ',')]
    domains: Vec<String>,
    #[arg(long, default_value_t = 600.0)]
    allocated_seconds: f64,
    /// Also write a retest wave here.
    #[arg(long)]
    retest_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    retest_noise: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let validation = e.downcast_ref::<Error>().is_none_or(Error::is_validation);
            ExitCode::from(if validation { EXIT_VALIDATION } else { EXIT_ANALYSIS })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::ValidateContent {
            scale,
            expert_ratings,
            threshold_cvi,
            output,
        } => {
            let mut cfg = PipelineConfig::new(scale);
            cfg.expert_ratings = Some(expert_ratings);
            cfg.cvi_threshold = threshold_cvi;
            cfg.analyses.insert(Analysis::ContentValidity);
            pipeline(cfg, &output)
        }
        Command::Analyze { inputs, only, output } => {
            let analyses: BTreeSet<Analysis> = if only.is_empty() {
                let mut a = BTreeSet::from([Analysis::Reliability, Analysis::ConstructValidity, Analysis::Scoring]);
                if inputs.expert_ratings.is_some() {
                    a.insert(Analysis::ContentValidity);
                }
                if inputs.retest.is_some() {
                    a.insert(Analysis::TestRetest);
                }
                if inputs.seed.is_some() {
                    a.insert(Analysis::DiscriminantValidity);
                } else {
                    log::warn!("no --seed given; skipping discriminant trials");
                }
                a
            } else {
                only.into_iter().map(Analysis::from).collect()
            };
            let mut cfg = PipelineConfig::new(&inputs.scale);
            cfg.responses = Some(inputs.responses);
            cfg.expert_ratings = inputs.expert_ratings;
            cfg.retest = inputs.retest;
            cfg.benchmark = inputs.benchmark;
            cfg.seed = inputs.seed;
            cfg.cvi_threshold = inputs.threshold_cvi;
            cfg.n_trials = inputs.trials;
            cfg.train_fraction = inputs.train_fraction;
            cfg.weights = inputs.weights;
            cfg.corrected_item_total = inputs.corrected;
            if inputs.no_filters {
                cfg.min_time_fraction = None;
            }
            cfg.analyses = analyses;
            pipeline(cfg, &output)
        }
        Command::Retest {
            scale,
            responses,
            retest,
            no_filters,
            output,
        } => {
            let mut cfg = PipelineConfig::new(scale);
            cfg.responses = Some(responses);
            cfg.retest = Some(retest);
            if no_filters {
                cfg.min_time_fraction = None;
            }
            cfg.analyses.insert(Analysis::TestRetest);
            pipeline(cfg, &output)
        }
        Command::Score {
            scale,
            responses,
            weights,
            benchmark,
            no_filters,
            output,
        } => {
            let mut cfg = PipelineConfig::new(scale);
            cfg.responses = Some(responses);
            cfg.weights = weights;
            cfg.benchmark = benchmark;
            if no_filters {
                cfg.min_time_fraction = None;
            }
            cfg.analyses.insert(Analysis::Scoring);
            pipeline(cfg, &output)
        }
        Command::Benchmark { action } => benchmark(action),
        Command::Simulate(args) => simulate(args),
        Command::Report { from, out, rounding } => {
            let text = fs::read_to_string(&from).map_err(|source| Error::Io {
                path: from.clone(),
                source,
            })?;
            let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
            for path in render_saved_report(&value, &out, rounding)? {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn pipeline(mut cfg: PipelineConfig, output: &OutputArgs) -> Result<()> {
    cfg.out_dir = output.out.clone();
    cfg.rounding = output.rounding;
    let meta = metadata(Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)));
    let result = run_pipeline(&cfg, &meta)?;
    if output.json {
        print!("{}", result.json);
    } else {
        print!("{}", result.text);
    }
    for path in &result.written {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_totals(pairs: &[String]) -> Result<BTreeMap<String, f64>> {
    pairs
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected DIMENSION=VALUE, got {p:?}")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("not a number in {p:?}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn candidate_totals(scale: &ScaleDefinition, responses: Option<&Path>, totals: Option<&[String]>) -> Result<BTreeMap<String, f64>> {
    match (responses, totals) {
        (Some(path), _) => Ok(dimension_totals(&load_responses(path, scale)?, scale)?),
        (None, Some(t)) => parse_totals(t),
        (None, None) => Err(anyhow!(Error::Config("give --responses or --totals".into()))),
    }
}

fn benchmark(action: BenchmarkAction) -> Result<()> {
    match action {
        BenchmarkAction::Add {
            store,
            scale,
            system_id,
            responses,
            totals,
        } => {
            let scale = ScaleDefinition::load(&scale)?;
            let mut db = if store.exists() {
                BenchmarkStore::load_for(&store, &scale)?
            } else {
                BenchmarkStore::for_scale(&scale)
            };
            let totals = candidate_totals(&scale, responses.as_deref(), totals.as_deref())?;
            db.add(BenchmarkEntry {
                system_id: system_id.clone(),
                totals,
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            })?;
            db.save(&store)?;
            println!("added {system_id}; store now holds {} systems (revision {})", db.entries.len(), db.version);
        }
        BenchmarkAction::Classify {
            store,
            scale,
            responses,
            totals,
        } => {
            let scale = ScaleDefinition::load(&scale)?;
            let db = BenchmarkStore::load_for(&store, &scale)?;
            let totals = candidate_totals(&scale, responses.as_deref(), totals.as_deref())?;
            for c in db.classify(&totals)? {
                println!(
                    "{:<12} {:>9.4} {:>7.2}th  {:?} ({})",
                    c.dimension,
                    c.value,
                    c.percentile,
                    c.category,
                    c.category.description()
                );
            }
        }
        BenchmarkAction::List { store } => {
            let db = BenchmarkStore::load(&store)?;
            println!("{} v{}, revision {}, {} systems", db.scale_id, db.scale_version, db.version, db.entries.len());
            for e in &db.entries {
                let totals: Vec<String> = e.totals.iter().map(|(k, v)| format!("{k}={v:.4}")).collect();
                println!("{}  {}  {}", e.system_id, e.timestamp, totals.join(" "));
            }
        }
    }
    Ok(())
}

fn write_csv(matrix: &xeq_core::ResponseMatrix, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })?;
    write_responses(matrix, file)?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let scale = ScaleDefinition::load(&args.scale)?;
    let spec = GeneratorSpec::for_scale(&scale, args.loading, args.phi, args.n, args.seed);
    let matrix = match args.delta {
        Some(delta) => generate_two_group(&spec, &scale, delta, args.n)?,
        None => generate_factor_data(&spec, &scale)?,
    };
    // metadata draws use a stream family distinct from the response draws
    let meta_seed = args.seed ^ 0x9E37_79B9_7F4A_7C15;
    let matrix = with_survey_metadata(&matrix, &scale, &args.domains, args.allocated_seconds, meta_seed)?;
    write_csv(&matrix, &args.out).with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} respondents to {}", matrix.n_respondents(), args.out.display());
    if let Some(path) = &args.retest_out {
        let retest = generate_retest(&matrix, &scale, args.retest_noise, args.seed.wrapping_add(1))?;
        write_csv(&retest, path)?;
        println!("wrote retest wave to {}", path.display());
    }
    Ok(())
}
