use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mbrkit::correlation::{self, Label, Pooling, ScoreTable, Statistic};
use mbrkit::decode::{self, ParseOptions, SystemSpec};
use mbrkit::ensemble::SegmentMatrices;
use mbrkit::eval::{self, ReportFormat, SegmentEvaluation};
use mbrkit::io::{self as mio, MatrixStore};
use mbrkit::lexical::LexicalMetric;
use mbrkit::mbr::{self, MbrConfig};
use mbrkit::pipeline::{PipelineConfig, PseudorefMode};
use mbrkit::registry::GroupName;
use mbrkit::types::{CandidateSet, MqmRecord, SelectionRecord};
use mbrkit::{Error, Result};

#[derive(Parser)]
#[command(name = "mbrkit", version)]
#[command(about = "MBR, QE and rank-ensemble selection over translation candidates")]
struct Cli {
    /// Directory that relative input paths are resolved against
    #[arg(long, global = true, env = "MBRKIT_DATA_DIR")]
    data_dir: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "MBRKIT_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute pairwise lexical score matrices
    Score(ScoreArgs),
    /// Select one candidate per segment for each system
    Decode(DecodeArgs),
    /// Score selections and report means, deltas and significance
    Evaluate(EvaluateArgs),
    /// Correlate metric scores with MQM judgements
    Correlate(CorrelateArgs),
}

#[derive(Args)]
struct ScoreArgs {
    /// Candidate sets, one JSON object per line
    #[arg(long)]
    candidates: PathBuf,

    /// Lexical metrics: chrF, chrF++, sentBLEU, TER
    #[arg(long, value_delimiter = ',', required = true)]
    metrics: Vec<String>,

    /// Output file (default: stdout)
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    candidates: PathBuf,

    /// Matrix files; may be repeated
    #[arg(long)]
    matrices: Vec<PathBuf>,

    /// System descriptors, e.g. greedy,MetricX,rankAvg:noLex,ckQE(32)xcMBR
    #[arg(long, value_delimiter = ',', required = true)]
    systems: Vec<String>,

    /// Group for bare strategies such as `rankAvg`
    #[arg(long)]
    group: Option<String>,

    /// Filter size substituted for `N` in pipeline names
    #[arg(long)]
    filter_n: Option<usize>,

    /// Leave each candidate's self-score out of its MBR average
    #[arg(long)]
    exclude_self: bool,

    /// Pseudoreferences for the MBR stage of a pipeline
    #[arg(long, default_value = "filtered", value_parser = ["filtered", "full"])]
    pseudorefs: String,

    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    candidates: PathBuf,

    #[arg(long)]
    selections: PathBuf,

    /// QE vectors and `<metric>@ref` vectors; may be repeated
    #[arg(long)]
    matrices: Vec<PathBuf>,

    /// Evaluation metrics, in column order
    #[arg(long, value_delimiter = ',', required = true)]
    metrics: Vec<String>,

    #[arg(long, default_value = decode::GREEDY)]
    baseline: String,

    #[arg(long, default_value = "markdown", value_parser = ["tsv", "markdown", "html"])]
    format: String,

    /// Also write per-segment scores as JSON lines
    #[arg(long)]
    segment_scores: Option<PathBuf>,

    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrelateArgs {
    #[arg(long)]
    mqm: PathBuf,

    /// Per-segment metric scores; may be repeated
    #[arg(long)]
    scores: Vec<PathBuf>,

    /// Labels: metric ids, `<metric>:mbr`, `avg(a,b,...)`
    #[arg(long, required = true)]
    labels: Vec<String>,

    /// Candidate sets, for language pairs and `:mbr` labels
    #[arg(long)]
    candidates: Option<PathBuf>,

    /// Selections whose pseudoreference scores back `:mbr` labels
    #[arg(long)]
    selections: Option<PathBuf>,

    /// Pairwise matrices for `:mbr` labels; may be repeated
    #[arg(long)]
    matrices: Vec<PathBuf>,

    #[arg(long, value_delimiter = ',', default_value = "kendall_tau,pearson")]
    statistics: Vec<String>,

    #[arg(long, default_value = "pair", value_parser = ["pair", "global"])]
    pooling: String,

    #[arg(long, short)]
    out: Option<PathBuf>,
}

struct Paths {
    data_dir: Option<PathBuf>,
}

impl Paths {
    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn open(&self, path: &Path) -> Result<BufReader<File>> {
        let path = self.resolve(path);
        File::open(&path)
            .map(BufReader::new)
            .map_err(|source| Error::File {
                path: path.display().to_string(),
                source,
            })
    }
}

fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            Error::File {
                path: p.display().to_string(),
                source,
            }
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|source| Error::File {
            path: path.map_or("<stdout>".into(), |p| p.display().to_string()),
            source,
        })
}

fn read_all_candidates(paths: &Paths, path: &Path) -> Result<Vec<CandidateSet>> {
    mio::read_candidates(paths.open(path)?).collect()
}

fn load_matrices(paths: &Paths, files: &[PathBuf]) -> Result<MatrixStore> {
    let mut readers: Vec<Box<dyn BufRead>> = Vec::new();
    for f in files {
        readers.push(Box::new(paths.open(f)?));
    }
    mio::index_matrices(readers.into_iter().flat_map(mio::read_matrices))
}

fn cmd_score(paths: &Paths, args: ScoreArgs) -> Result<()> {
    let metrics = args
        .metrics
        .iter()
        .map(|m| LexicalMetric::from_id(m))
        .collect::<Result<Vec<_>>>()?;
    let mut out = create(args.out.as_deref())?;
    for (index, set) in mio::read_candidates(paths.open(&args.candidates)?).enumerate() {
        let set = set?;
        for metric in &metrics {
            let matrix = mbr::compute_pairwise_matrix(&set, metric.id())?;
            serde_json::to_writer(&mut out, &matrix).map_err(|e| Error::Io {
                index,
                source: e.into(),
            })?;
            out.write_all(b"\n")
                .map_err(|source| Error::Io { index, source })?;
        }
    }
    out.flush().map_err(|source| Error::Io { index: 0, source })
}

fn cmd_decode(paths: &Paths, args: DecodeArgs) -> Result<()> {
    let options = ParseOptions {
        group: args
            .group
            .as_deref()
            .map(str::parse::<GroupName>)
            .transpose()?,
        filter_n: match args.filter_n {
            Some(0) => return Err(Error::InvalidFilterN("0".into())),
            n => n,
        },
    };
    let systems = args
        .systems
        .iter()
        .map(|d| SystemSpec::parse(d, options))
        .collect::<Result<Vec<_>>>()?;
    let config = PipelineConfig {
        mbr: MbrConfig {
            exclude_self: args.exclude_self,
        },
        pseudorefs: args.pseudorefs.parse::<PseudorefMode>()?,
    };
    let sets = read_all_candidates(paths, &args.candidates)?;
    let store = load_matrices(paths, &args.matrices)?;
    let empty = SegmentMatrices::new();
    let records: Vec<Vec<SelectionRecord>> = sets
        .par_iter()
        .map(|set| {
            let matrices = store.get(&set.segment_id).unwrap_or(&empty);
            decode::decode_segment(set, matrices, &systems, config)
        })
        .collect::<Result<_>>()?;
    mio::write_selections(records.iter().flatten(), create(args.out.as_deref())?)
}

fn by_segment(sets: Vec<CandidateSet>) -> HashMap<String, CandidateSet> {
    sets.into_iter()
        .map(|s| (s.segment_id.clone(), s))
        .collect()
}

fn cmd_evaluate(paths: &Paths, args: EvaluateArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    let sets = by_segment(read_all_candidates(paths, &args.candidates)?);
    let selections: Vec<SelectionRecord> =
        mio::read_selections(paths.open(&args.selections)?).collect::<Result<_>>()?;
    let store = load_matrices(paths, &args.matrices)?;
    let metrics: Vec<&str> = args.metrics.iter().map(String::as_str).collect();
    let evaluations = eval::evaluate_selections(&selections, &sets, &metrics, &store)?;
    let reports = eval::build_reports(&evaluations, &args.baseline)?;
    if let Some(path) = &args.segment_scores {
        mio::write_jsonl::<SegmentEvaluation, _, _>(&evaluations, create(Some(path))?)?;
    }
    write_text(args.out.as_deref(), &eval::render_report(&reports, format))
}

/// Splits on commas outside parentheses, so `avg(a,b),c` is two labels.
fn split_labels(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for arg in raw {
        let mut depth = 0usize;
        let mut current = String::new();
        for c in arg.chars() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    out.push(std::mem::take(&mut current));
                    continue;
                }
                _ => {}
            }
            current.push(c);
        }
        out.push(current);
    }
    out.into_iter()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty())
        .collect()
}

fn cmd_correlate(paths: &Paths, args: CorrelateArgs) -> Result<()> {
    let labels = split_labels(&args.labels)
        .iter()
        .map(|l| l.parse::<Label>())
        .collect::<Result<Vec<_>>>()?;
    let statistics = args
        .statistics
        .iter()
        .map(|s| s.parse::<Statistic>())
        .collect::<Result<Vec<_>>>()?;
    let pooling = if args.pooling == "global" {
        Pooling::Global
    } else {
        Pooling::PerPair
    };
    let mqm: Vec<MqmRecord> = mio::read_mqm(paths.open(&args.mqm)?).collect::<Result<_>>()?;

    let mut table = ScoreTable::new();
    for f in &args.scores {
        for record in mio::read_segment_scores(paths.open(f)?) {
            table.insert(record?)?;
        }
    }

    let mbr_metrics: Vec<String> = labels
        .iter()
        .flat_map(|l| match l {
            Label::Single(k) => vec![k.clone()],
            Label::Average(ks) => ks.clone(),
        })
        .filter_map(|k| k.strip_suffix(correlation::MBR_SUFFIX).map(str::to_string))
        .fold(Vec::new(), |mut acc, k| {
            if !acc.contains(&k) {
                acc.push(k);
            }
            acc
        });
    if !mbr_metrics.is_empty() {
        let selections_path = args.selections.as_deref().ok_or_else(|| {
            Error::Invalid("`:mbr` labels need --selections and --matrices".into())
        })?;
        let selections: Vec<SelectionRecord> =
            mio::read_selections(paths.open(selections_path)?).collect::<Result<_>>()?;
        let store = load_matrices(paths, &args.matrices)?;
        for metric in &mbr_metrics {
            table.add_pseudoref_scores(&selections, &store, metric)?;
        }
    }

    let segment_pairs: HashMap<String, String> = match (&args.candidates, pooling) {
        (Some(path), _) => read_all_candidates(paths, path)?
            .into_iter()
            .map(|s| (s.segment_id, s.language_pair))
            .collect(),
        (None, Pooling::Global) => HashMap::new(),
        (None, Pooling::PerPair) => {
            return Err(Error::Invalid(
                "per-pair pooling needs --candidates for language pairs".into(),
            ))
        }
    };

    let results = correlation::correlate_with_mqm(
        &mqm,
        &table,
        &labels,
        &statistics,
        pooling,
        &segment_pairs,
    )?;
    write_text(
        args.out.as_deref(),
        &correlation::render_correlations(&results),
    )
}

fn run(cli: Cli) -> Result<()> {
    let paths = Paths {
        data_dir: cli.data_dir,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Invalid("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Score(args) => cmd_score(&paths, args),
        Command::Decode(args) => cmd_decode(&paths, args),
        Command::Evaluate(args) => cmd_evaluate(&paths, args),
        Command::Correlate(args) => cmd_correlate(&paths, args),
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {message}", e.code());
            ExitCode::FAILURE
        }
    }
}
