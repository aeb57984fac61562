//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 on usage errors (flags, config, unknown
//! algorithms), 2 on data errors (unreadable or malformed input, empty
//! dataset or test set, bad snapshots).

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use folkrec::config::ConfigOverlay;
use folkrec::error::{io_err, DataError, FolkrecError};
use folkrec::report::stats_csv;
use folkrec::run::{load_and_prepare, run_experiment};
use folkrec::snapshot::write_snapshot_file;
use folkrec::synth::{generate_synthetic, SynthParams};
use folkrec_core::{build_index, leave_one_out_split, Folksonomy};

#[derive(Parser)]
#[command(
    name = "folkrec",
    version,
    about = "Folksonomy tag recommender benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, preprocess, sample and prune a dataset, then write a snapshot.
    Prepare(PrepareArgs),
    /// Print dataset statistics per preparation stage as CSV.
    Stats(StatsArgs),
    /// Write the leave-one-out train/test split as two assignment files.
    Split(SplitArgs),
    /// Run a full experiment: prepare, split, evaluate, report.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic dataset file.
    Synth(SynthArgs),
}

/// Corpus options shared by every data-consuming subcommand.
#[derive(Args, Debug, Default)]
struct CorpusArgs {
    /// Raw dataset file (one tag assignment per line).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Prepared corpus snapshot (alternative to --dataset).
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Column order, a permutation of user,resource,tag,timestamp.
    #[arg(long)]
    columns: Option<String>,
    /// Field delimiter: tab, comma, semicolon, space or a single character.
    #[arg(long)]
    delimiter: Option<String>,
    /// Skip the first line of the dataset.
    #[arg(long)]
    header: bool,
    /// Extra blacklist tags (comma separated, added to the default list).
    #[arg(long)]
    blacklist: Option<String>,
    /// Do not blacklist the default auto-generated tags.
    #[arg(long)]
    no_default_blacklist: bool,
    /// Keep only this fraction of users (seeded).
    #[arg(long)]
    sample_users: Option<f64>,
    /// Seed for sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// p-core level; 0 disables pruning.
    #[arg(long, short = 'p')]
    p_core: Option<usize>,
}

impl CorpusArgs {
    fn overlay(&self) -> ConfigOverlay {
        ConfigOverlay {
            dataset: self.dataset.clone(),
            snapshot: self.snapshot.clone(),
            columns: self.columns.clone(),
            delimiter: self.delimiter.clone(),
            header: if self.header { Some(true) } else { None },
            blacklist: self
                .blacklist
                .as_ref()
                .map(|b| b.split(',').map(|t| t.trim().to_string()).collect()),
            default_blacklist: if self.no_default_blacklist {
                Some(false)
            } else {
                None
            },
            sample_users: self.sample_users,
            seed: self.seed,
            p_core: self.p_core,
            ..ConfigOverlay::default()
        }
    }
}

#[derive(Args)]
struct PrepareArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Snapshot file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Output file for the training assignments.
    #[arg(long)]
    train_out: PathBuf,
    /// Output file for the held-out test assignments.
    #[arg(long)]
    test_out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Config file; command-line flags override its keys.
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Algorithms to evaluate (comma separated).
    #[arg(long)]
    algorithms: Option<String>,
    /// Cutoff list, e.g. 1..10 or 1,5,10.
    #[arg(long)]
    cutoffs: Option<String>,
    /// Directory for the report files.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// BLL decay exponent.
    #[arg(long)]
    d: Option<f64>,
    /// User-component weight for bll_c and girptm.
    #[arg(long)]
    beta: Option<f64>,
    /// User-component weight for mp_ur.
    #[arg(long)]
    beta_m: Option<f64>,
    /// Exponential decay rate per second for girp/girptm.
    #[arg(long)]
    lambda: Option<f64>,
    /// Lower recency clamp in seconds.
    #[arg(long)]
    min_recency: Option<i64>,
    /// CF neighborhood size.
    #[arg(long)]
    neighbors: Option<usize>,
    /// PageRank damping factor.
    #[arg(long)]
    damping: Option<f64>,
    /// PageRank convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// PageRank iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Rayon thread count (0 or absent = library default).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of users.
    #[arg(long, default_value_t = 100)]
    users: usize,
    /// Size of the shared fresh-tag vocabulary.
    #[arg(long, default_value_t = 100)]
    base_tags: usize,
    /// Probability of reusing one of the user's earlier tags.
    #[arg(long, default_value_t = 0.5)]
    reuse_bias: f64,
    /// Weight of recency (vs frequency) when reusing.
    #[arg(long, default_value_t = 0.5)]
    recency_bias: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Posts per user are drawn from 1..=this.
    #[arg(long, default_value_t = 20)]
    max_posts_per_user: usize,
    /// Shared resource pool size; 0 gives every post its own resource.
    #[arg(long, default_value_t = 0)]
    resource_pool: usize,
    /// Dataset file to write (tab-separated assignments).
    #[arg(long)]
    out: PathBuf,
}

fn write_assignments(f: &Folksonomy, path: &PathBuf) -> Result<(), DataError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for post in f.posts() {
        for tag in post.tags() {
            writeln!(
                w,
                "{}\t{}\t{}\t{}",
                post.user, post.resource, tag, post.timestamp
            )
            .map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

fn run(cli: Cli) -> Result<(), FolkrecError> {
    match cli.command {
        Command::Prepare(args) => {
            let options = args.corpus.overlay().resolve_corpus()?;
            let prepared = load_and_prepare(&options)?;
            let index = build_index(&prepared.folksonomy);
            write_snapshot_file(&index, &args.out)?;
            print!("{}", stats_csv(&prepared.stages));
            Ok(())
        }
        Command::Stats(args) => {
            let options = args.corpus.overlay().resolve_corpus()?;
            let prepared = load_and_prepare(&options)?;
            print!("{}", stats_csv(&prepared.stages));
            Ok(())
        }
        Command::Split(args) => {
            let options = args.corpus.overlay().resolve_corpus()?;
            let prepared = load_and_prepare(&options)?;
            let split = leave_one_out_split(prepared.folksonomy);
            if split.test.is_empty() {
                return Err(DataError::EmptyTestSet.into());
            }
            write_assignments(&split.train, &args.train_out)?;
            let held_out: Vec<folkrec_core::Post> = split
                .test
                .iter()
                .map(|tc| {
                    folkrec_core::Post::new(
                        tc.user.clone(),
                        tc.resource.clone(),
                        tc.true_tags.iter().cloned(),
                        tc.timestamp,
                    )
                    .expect("test cases always carry tags")
                })
                .collect();
            write_assignments(&Folksonomy::from_posts(held_out)?, &args.test_out)?;
            eprintln!(
                "train: {} posts, test: {} posts",
                split.train.posts().len(),
                split.test.len()
            );
            Ok(())
        }
        Command::Evaluate(args) => {
            let file_overlay = match &args.config {
                Some(path) => ConfigOverlay::from_file(path)?,
                None => ConfigOverlay::default(),
            };
            let cli_overlay = ConfigOverlay {
                algorithms: args
                    .algorithms
                    .as_ref()
                    .map(|a| a.split(',').map(|s| s.trim().to_string()).collect()),
                cutoffs: args.cutoffs.clone(),
                output_dir: args.output_dir.clone(),
                d: args.d,
                beta: args.beta,
                beta_m: args.beta_m,
                lambda: args.lambda,
                min_recency: args.min_recency,
                neighbors: args.neighbors,
                damping: args.damping,
                tol: args.tol,
                max_iter: args.max_iter,
                threads: args.threads,
                ..args.corpus.overlay()
            };
            let config = cli_overlay.over(file_overlay).resolve_experiment()?;
            let out = run_experiment(&config)?;
            println!("wrote {}", out.stats.display());
            println!("wrote {}", out.metrics.display());
            println!("wrote {}", out.pr_curve.display());
            println!("wrote {}", out.manifest.display());
            Ok(())
        }
        Command::Synth(args) => {
            let params = SynthParams {
                users: args.users,
                base_tags: args.base_tags,
                reuse_bias: args.reuse_bias,
                recency_bias: args.recency_bias,
                seed: args.seed,
                max_posts_per_user: args.max_posts_per_user,
                resource_pool: args.resource_pool,
            };
            let corpus = generate_synthetic(&params);
            if let Some(dir) = args.out.parent() {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(dir).map_err(io_err(dir))?;
                }
            }
            write_assignments(&corpus, &args.out)?;
            let s = corpus.stats();
            eprintln!(
                "wrote {} ({} posts, {} users, {} tags, {} assignments)",
                args.out.display(),
                s.bookmarks,
                s.users,
                s.tags,
                s.assignments
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are not errors.
            let benign = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if benign {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
