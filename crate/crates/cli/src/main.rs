//! `sarcgen` command-line tool.
//!
//! Exit codes: 0 success, 1 configuration or input-file error, 2 when at
//! least one input item failed in the pipeline.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use sarcgen::commonsense::FixtureCauses;
use sarcgen::evaluation::{
    correlate, load_ratings, pairwise_game, scores_for, system_means, Criterion,
};
use sarcgen::grammar::FixtureGec;
use sarcgen::ranking::{FixtureNli, HeuristicNli};
use sarcgen::retrieval::{CacheStatus, IndexCache};
use sarcgen::{generate, Backends, Error, ResourcePaths, Resources, System, SystemConfig, Trace};

const EXIT_CONFIG: u8 = 1;
const EXIT_ITEM: u8 = 2;

#[derive(Parser)]
#[command(
    name = "sarcgen",
    version,
    about = "Retrieve-and-edit sarcasm generation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate sarcastic rewrites of one sentence or a file of sentences.
    Generate(Box<GenerateArgs>),
    /// Build (or refresh) the on-disk corpus index.
    Index(IndexArgs),
    /// Analyse human ratings.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// A single input sentence.
    #[arg(
        long,
        conflicts_with = "input_file",
        required_unless_present = "input_file"
    )]
    input: Option<String>,
    /// One input per line; `-` reads standard input.
    #[arg(long)]
    input_file: Option<PathBuf>,
    /// FM, RV, NoRV or NSI.
    #[arg(long, default_value = "FM")]
    system: String,

    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Reuse a prebuilt index, rebuilding it when the corpus changed.
    #[arg(long)]
    index_cache: Option<PathBuf>,
    #[arg(long)]
    sentiment_lex: PathBuf,
    #[arg(long)]
    antonym_lex: PathBuf,
    #[arg(long)]
    stopwords: PathBuf,
    /// Filler prefixes stripped from commonsense phrases.
    #[arg(long)]
    fillers: Option<PathBuf>,

    /// Falls back to $CAUSES_URL.
    #[arg(long, conflicts_with = "causes_fixture")]
    causes_url: Option<String>,
    #[arg(long)]
    causes_fixture: Option<PathBuf>,
    /// Falls back to $NLI_URL.
    #[arg(long, conflicts_with_all = ["nli_heuristic", "nli_fixture"])]
    nli_url: Option<String>,
    #[arg(long)]
    nli_heuristic: bool,
    /// TSV of premise, hypothesis and three scores; unknown pairs use the
    /// heuristic scorer when --nli-heuristic is also set.
    #[arg(long)]
    nli_fixture: Option<PathBuf>,
    /// Falls back to $GEC_URL; without either, contexts are not corrected.
    #[arg(long, conflicts_with = "gec_fixture")]
    gec_url: Option<String>,
    #[arg(long)]
    gec_fixture: Option<PathBuf>,

    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = sarcgen::reversal::DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = sarcgen::commonsense::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = sarcgen::retrieval::DEFAULT_MAX_OUT)]
    max_out: usize,
    /// Write a JSON array of traces, one per input.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    ratings: PathBuf,
    /// Pairwise game between two systems, e.g. FM:RV.
    #[arg(long, conflicts_with = "correlate")]
    game: Option<String>,
    #[arg(long, default_value = "sarcasticness")]
    criterion: String,
    /// Correlate ratings of --system with the chosen context's
    /// contradiction score from --traces (item ids are 1-based trace positions).
    #[arg(long, requires = "traces")]
    correlate: bool,
    #[arg(long)]
    traces: Option<PathBuf>,
    #[arg(long, default_value = "FM")]
    system: String,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

/// A failure that maps to exit code 1.
struct ConfigError(String);

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(format!("{}: {e}", e.kind()))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(*args),
        Command::Index(args) => cmd_index(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn require_file(flag: &str, path: &Path) -> Result<(), ConfigError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(ConfigError(format!(
            "--{flag} {}: no such file",
            path.display()
        )))
    }
}

fn env_fallback(flag: Option<String>, var: &str) -> Option<String> {
    flag.or_else(|| std::env::var(var).ok().filter(|v| !v.trim().is_empty()))
}

fn read_inputs(args: &GenerateArgs) -> Result<Vec<String>, ConfigError> {
    if let Some(text) = &args.input {
        return Ok(vec![text.clone()]);
    }
    let path = args
        .input_file
        .as_ref()
        .expect("clap enforces one input source");
    let lines: io::Result<Vec<String>> = if path.as_os_str() == "-" {
        io::stdin().lock().lines().collect()
    } else {
        require_file("input-file", path)?;
        std::fs::File::open(path).and_then(|f| io::BufReader::new(f).lines().collect())
    };
    lines.map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn build_backends(
    args: &GenerateArgs,
    cfg: &SystemConfig,
    res: &Resources,
) -> Result<Backends, ConfigError> {
    let mut backends = Backends::from_config(cfg, res);
    if let Some(p) = &args.causes_fixture {
        require_file("causes-fixture", p)?;
        backends.causes = Some(Arc::new(FixtureCauses::load(p)?));
    }
    if let Some(p) = &args.nli_fixture {
        require_file("nli-fixture", p)?;
        let mut fixture = FixtureNli::load(p)?;
        if args.nli_heuristic {
            fixture = fixture.with_fallback(Box::new(HeuristicNli::new(
                Arc::clone(&res.antonyms),
                Arc::clone(&res.stopwords),
            )));
        }
        backends.nli = Some(Arc::new(fixture));
    }
    if let Some(p) = &args.gec_fixture {
        require_file("gec-fixture", p)?;
        backends.gec = Some(Arc::new(FixtureGec::load(p)?));
    }
    backends.check(cfg.system)?;
    Ok(backends)
}

fn cmd_generate(args: GenerateArgs) -> Result<u8, ConfigError> {
    let system: System = args.system.parse()?;
    let cfg = SystemConfig {
        system,
        tau: args.tau,
        k: args.k,
        max_out: args.max_out,
        seed: args.seed,
        causes_url: env_fallback(args.causes_url.clone(), "CAUSES_URL")
            .filter(|_| args.causes_fixture.is_none()),
        nli_url: env_fallback(args.nli_url.clone(), "NLI_URL")
            .filter(|_| !args.nli_heuristic && args.nli_fixture.is_none()),
        gec_url: env_fallback(args.gec_url.clone(), "GEC_URL")
            .filter(|_| args.gec_fixture.is_none()),
        nli_heuristic: args.nli_heuristic,
    };
    cfg.validate()?;

    require_file("sentiment-lex", &args.sentiment_lex)?;
    require_file("antonym-lex", &args.antonym_lex)?;
    require_file("stopwords", &args.stopwords)?;
    if let Some(p) = &args.fillers {
        require_file("fillers", p)?;
    }
    match &args.corpus {
        Some(p) => require_file("corpus", p)?,
        None if system != System::Rv => {
            return Err(ConfigError(format!("--corpus is required for {system}")));
        }
        None => {}
    }
    let inputs = read_inputs(&args)?;

    let res = Resources::load(&ResourcePaths {
        sentiment: args.sentiment_lex.clone(),
        antonyms: args.antonym_lex.clone(),
        stopwords: args.stopwords.clone(),
        corpus: args.corpus.clone(),
        fillers: args.fillers.clone(),
        index_cache: args.index_cache.clone(),
    })?;
    let backends = build_backends(&args, &cfg, &res)?;

    let results: Vec<_> = inputs
        .par_iter()
        .map(|line| generate(line, &cfg, &res, &backends))
        .collect();

    let mut failed = false;
    let mut traces: Vec<Trace> = Vec::with_capacity(results.len());
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(o) => {
                let _ = writeln!(out, "{}", o.output);
                traces.push(o.trace);
            }
            Err(e) => {
                failed = true;
                let _ = writeln!(out);
                eprintln!("item {}: {}: {}", i + 1, e.error.kind(), e.error);
                traces.push(*e.trace);
            }
        }
        if let Some(t) = traces.last() {
            for w in &t.warnings {
                eprintln!("item {}: warning: {w}", i + 1);
            }
        }
    }
    let _ = out.flush();

    if let Some(path) = &args.trace {
        let json = serde_json::to_string_pretty(&traces).expect("traces serialize");
        std::fs::write(path, json + "\n")
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    }
    Ok(if failed { EXIT_ITEM } else { 0 })
}

fn cmd_index(args: IndexArgs) -> Result<u8, ConfigError> {
    require_file("corpus", &args.corpus)?;
    let cache = IndexCache::new(&args.out);
    let (index, status) = cache.load_or_build(&args.corpus)?;
    let verb = match status {
        CacheStatus::Fresh => "up to date",
        CacheStatus::Rebuilt => "built",
    };
    println!("{verb}: {} ({} sentences)", args.out.display(), index.len());
    Ok(0)
}

fn split_game(pair: &str) -> Result<(String, String), ConfigError> {
    match pair.split_once(':') {
        Some((a, b)) if !a.trim().is_empty() && !b.trim().is_empty() => {
            Ok((a.trim().into(), b.trim().into()))
        }
        _ => Err(ConfigError(format!(
            "--game expects SYSTEM_A:SYSTEM_B, got {pair:?}"
        ))),
    }
}

/// Contradiction of the chosen context, keyed by 1-based trace position.
fn trace_scores(path: &Path) -> Result<BTreeMap<String, f64>, ConfigError> {
    require_file("traces", path)?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let traces: Vec<Trace> =
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    Ok(traces
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let head = t.ranked.as_ref()?.first()?;
            Some(((i + 1).to_string(), head.scores.contradiction))
        })
        .collect())
}

fn cmd_eval(args: EvalArgs) -> Result<u8, ConfigError> {
    require_file("ratings", &args.ratings)?;
    let records = load_ratings(&args.ratings)?;
    let criterion: Criterion = args.criterion.parse()?;

    if let Some(pair) = &args.game {
        let (a, b) = split_game(pair)?;
        let g = pairwise_game(
            &scores_for(&records, &a, criterion),
            &scores_for(&records, &b, criterion),
        )?;
        if args.json {
            println!(
                "{}",
                serde_json::json!({ "a": a, "b": b, "criterion": criterion, "result": g })
            );
        } else {
            println!("{a} vs {b} ({criterion}): {g}");
        }
    } else if args.correlate {
        let scores = trace_scores(args.traces.as_ref().expect("clap requires --traces"))?;
        let ratings = scores_for(&records, &args.system, criterion);
        let r = correlate(&ratings, &scores)?;
        if args.json {
            println!(
                "{}",
                serde_json::json!({ "system": args.system, "criterion": criterion, "items": scores.len(), "pearson": r })
            );
        } else {
            println!(
                "pearson r = {r:.4} ({} items, {} {criterion} vs contradiction)",
                scores.len(),
                args.system
            );
        }
    } else {
        let means = system_means(&records, criterion);
        if args.json {
            println!(
                "{}",
                serde_json::json!({ "criterion": criterion, "means": means })
            );
        } else {
            for (system, m) in means {
                println!("{system}\t{m:.2}");
            }
        }
    }
    Ok(0)
}
