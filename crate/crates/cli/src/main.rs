//! `reda` command-line tool.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use reda_core::eval::{run_restoration_suite, SuiteConfig, Task};
use reda_core::ngram::DEFAULT_ORDER;
use reda_core::ops::parse_ops;
use reda_core::pairs::{augment_dataset, pairs_to_tsv, read_pairs, AugPlan, DEFAULT_N_AUG_THRESHOLD};
use reda_core::{
    build_pseudo_dict, tokenize, AugConfig, FilterConfig, Mode, NgramModel, Op, Seed, SynonymDict,
    Text,
};
use serde_json::json;

use crate::manifest::{write_atomic, Manifest};

#[derive(Parser)]
#[command(name = "reda", version, about = "Token-level text augmentation with n-gram filtering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an n-gram model on a corpus with one text per line.
    TrainLm(TrainLmArgs),
    /// Print the log-probability of a text.
    Score(ScoreArgs),
    /// Build a decoy synonym dictionary from a model's frequency ranks.
    PseudoDict(PseudoDictArgs),
    /// Augment a question-pair TSV dataset.
    Augment(AugmentArgs),
    /// Run the text-restoration evaluation suite.
    RestoreEval(RestoreEvalArgs),
}

#[derive(Args)]
struct TrainLmArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[arg(long)]
    model: PathBuf,
    /// Text to score; several arguments are joined with spaces.
    #[arg(required = true, num_args = 1..)]
    text: Vec<String>,
    /// Optional path for a run manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct PseudoDictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 3855)]
    count: usize,
    /// First rank of the window (0-based, inclusive).
    #[arg(long, default_value_t = 1000)]
    rank_lo: usize,
    /// End of the window (0-based, exclusive).
    #[arg(long, default_value_t = 10000)]
    rank_hi: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Reda,
    RedaNg,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Reda => Mode::Reda,
            ModeArg::RedaNg => Mode::RedaNg,
        }
    }
}

#[derive(Clone)]
struct OpList(Vec<Op>);

#[derive(Clone)]
struct TaskList(Vec<Task>);

fn ops_arg(s: &str) -> Result<OpList, String> {
    parse_ops(s).map(OpList).map_err(|e| e.to_string())
}

fn tasks_arg(s: &str) -> Result<TaskList, String> {
    let mut tasks = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let task: Task = part.parse().map_err(|e: reda_core::Error| e.to_string())?;
        if !tasks.contains(&task) {
            tasks.push(task);
        }
    }
    if tasks.is_empty() {
        return Err("no tasks given".into());
    }
    Ok(TaskList(tasks))
}

#[derive(Args)]
struct AugmentArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "reda")]
    mode: ModeArg,
    #[arg(long, value_parser = ops_arg, default_value = "sr,rs,ri,rd,rm")]
    ops: OpList,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model file, required for reda-ng.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Outputs kept per text in reda-ng mode (default: the per-text output count).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 20)]
    multiplier: usize,
    #[arg(long, default_value_t = DEFAULT_N_AUG_THRESHOLD)]
    n_aug_threshold: usize,
    #[arg(long, default_value_t = 0.2)]
    rate_sr: f64,
    #[arg(long, default_value_t = 0.2)]
    rate_rs: f64,
    #[arg(long, default_value_t = 0.1)]
    rate_ri: f64,
    #[arg(long, default_value_t = 0.1)]
    rate_rd: f64,
    #[arg(long, default_value_t = 2)]
    rm_num_ops: usize,
}

#[derive(Args)]
struct RestoreEvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Pseudo synonym dictionary (see `pseudo-dict`).
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    sample: usize,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    multiplier: usize,
    #[arg(long, value_parser = tasks_arg, default_value = "sr,rs,rd")]
    tasks: TaskList,
    #[arg(long)]
    out: PathBuf,
}

/// A failure attributed to how the command was invoked.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::TrainLm(args) => train_lm(args),
        Command::Score(args) => score(args),
        Command::PseudoDict(args) => pseudo_dict(args),
        Command::Augment(args) => augment(args),
        Command::RestoreEval(args) => restore_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_corpus(path: &Path) -> anyhow::Result<Vec<Text>> {
    let raw = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(raw.lines().map(tokenize).filter(|t| !t.is_empty()).collect())
}

fn load_model(path: &Path) -> anyhow::Result<NgramModel> {
    NgramModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn report_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".report.json");
    PathBuf::from(name)
}

fn train_lm(args: TrainLmArgs) -> anyhow::Result<()> {
    if args.order == 0 {
        return Err(usage("--order must be at least 1"));
    }
    let started = Instant::now();
    let corpus = read_corpus(&args.corpus)?;
    let model = NgramModel::train(&corpus, args.order)?;
    let mut bytes = Vec::new();
    model.write_to(&mut bytes)?;
    write_atomic(&args.out, &bytes)?;

    let stats = model.stats();
    println!("tokens\t{}", stats.total_tokens);
    println!("vocab\t{}", stats.vocab_size);
    for (i, n) in stats.distinct_per_order.iter().enumerate() {
        println!("order{}\t{n}", i + 1);
    }

    Manifest::new("train-lm", json!({ "order": args.order, "stats": stats }), None)
        .input(&args.corpus)?
        .output(&args.out)?
        .finish(started)
        .write(&manifest_path(&args.out))
}

fn score(args: ScoreArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let text = tokenize(&args.text.join(" "));
    if text.is_empty() {
        return Err(usage("text to score is empty"));
    }
    let model = load_model(&args.model)?;
    let logp = model.score(text.tokens())?;
    println!("{logp}");
    if let Some(path) = args.manifest {
        Manifest::new("score", json!({ "text": text.to_string(), "log_prob": logp }), None)
            .input(&args.model)?
            .finish(started)
            .write(&path)?;
    }
    Ok(())
}

fn pseudo_dict(args: PseudoDictArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let model = load_model(&args.model)?;
    let ranked = model.ranked_vocabulary();
    let dict = build_pseudo_dict(
        &ranked,
        &mut Seed(args.seed).rng(),
        args.count,
        args.rank_lo,
        args.rank_hi,
    )?;
    write_atomic(&args.out, dict.to_tsv().as_bytes())?;
    println!("entries\t{}", dict.len());
    Manifest::new(
        "pseudo-dict",
        json!({ "count": args.count, "rank_lo": args.rank_lo, "rank_hi": args.rank_hi }),
        Some(args.seed),
    )
    .input(&args.model)?
    .output(&args.out)?
    .finish(started)
    .write(&manifest_path(&args.out))
}

fn augment(args: AugmentArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    let mode: Mode = args.mode.into();
    if mode == Mode::RedaNg && args.model.is_none() {
        return Err(usage("--mode reda-ng requires --model"));
    }
    let plan = AugPlan {
        mode,
        aug: AugConfig {
            rate_sr: args.rate_sr,
            rate_rs: args.rate_rs,
            rate_ri: args.rate_ri,
            rate_rd: args.rate_rd,
            rm_num_ops: args.rm_num_ops,
            ops_enabled: args.ops.0,
            ..AugConfig::default()
        },
        filter: FilterConfig {
            multiplier: args.multiplier,
            ..FilterConfig::default()
        },
        k: args.k,
        n_aug_threshold: args.n_aug_threshold,
    };
    plan.validate().map_err(|e| usage(e.to_string()))?;

    let pairs = read_pairs(&args.input)?;
    let dict = SynonymDict::load(&args.dict)?;
    let model = args.model.as_deref().map(load_model).transpose()?;
    let (output, report) = augment_dataset(&pairs, &plan, &dict, model.as_ref(), Seed(args.seed))?;

    write_atomic(&args.out, pairs_to_tsv(&output).as_bytes())?;
    let report_file = report_path(&args.out);
    write_atomic(&report_file, &serde_json::to_vec_pretty(&report)?)?;
    println!(
        "originals\t{}\naugmented\t{}\ntotal\t{}",
        report.originals, report.augmented, report.total
    );

    let mut manifest = Manifest::new("augment", serde_json::to_value(&plan)?, Some(args.seed))
        .input(&args.input)?
        .input(&args.dict)?;
    if let Some(m) = &args.model {
        manifest = manifest.input(m)?;
    }
    manifest
        .output(&args.out)?
        .output(&report_file)?
        .finish(started)
        .write(&manifest_path(&args.out))
}

fn restore_eval(args: RestoreEvalArgs) -> anyhow::Result<()> {
    let started = Instant::now();
    if args.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    let filter = FilterConfig {
        multiplier: args.multiplier,
        ..FilterConfig::default()
    };
    filter.validate().map_err(|e| usage(e.to_string()))?;

    let corpus = read_corpus(&args.corpus)?;
    let dict = SynonymDict::load(&args.dict)?;
    let model = load_model(&args.model)?;
    if corpus.len() < args.sample {
        bail!(
            "corpus {} has {} texts, fewer than --sample {}",
            args.corpus.display(),
            corpus.len(),
            args.sample
        );
    }
    let config = SuiteConfig {
        tasks: args.tasks.0,
        sample_size: args.sample,
        runs: args.runs,
        filter,
        seed: Seed(args.seed),
        ..SuiteConfig::default()
    };
    let report = run_restoration_suite(&corpus, &dict, &model, &config)?;
    write_atomic(&args.out, &serde_json::to_vec_pretty(&report)?)?;

    for cell in &report.cells {
        println!(
            "{:?}\t{}\t{}\t{:.4}",
            cell.op, cell.n_edits, cell.method, cell.accuracy
        );
    }
    let q = &report.quality;
    println!(
        "quality RS x{}\tREDA overlap {:.3} distance {:.3}\tREDA_NG overlap {:.3} distance {:.3}",
        q.n_swaps, q.reda.bigram_overlap, q.reda.edit_distance, q.reda_ng.bigram_overlap, q.reda_ng.edit_distance
    );

    Manifest::new("restore-eval", serde_json::to_value(&config)?, Some(args.seed))
        .input(&args.corpus)?
        .input(&args.dict)?
        .input(&args.model)?
        .output(&args.out)?
        .finish(started)
        .write(&manifest_path(&args.out))
}
