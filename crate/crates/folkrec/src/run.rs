//! Experiment orchestration: prepare, split, evaluate, report.
//!
//! The pipeline order is fixed: parse, preprocess, sample, p-core, split,
//! index, evaluate. Dataset statistics are captured after every preparation
//! stage. Evaluation fans out over test cases with rayon; the reduction is
//! exact, so the report does not depend on thread count. All file writes
//! happen after all computation, in a fixed order.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use folkrec_core::evaluate::{evaluate_case, MetricAccumulator};
use folkrec_core::{
    build_index, build_recommender, leave_one_out_split, p_core, preprocess, AlgorithmKind,
    EvalError, EvalReport, Folksonomy, FolksonomyStats, Recommender, TestCase,
};

use crate::config::{CorpusInput, CorpusOptions, ExperimentConfig};
use crate::error::{io_err, DataError, FolkrecError, UsageError};
use crate::parse::parse_dataset_file;
use crate::report;
use crate::sample::sample_users;
use crate::snapshot::read_snapshot_folksonomy_file;

/// A corpus ready for splitting, with the statistics of every stage it went
/// through.
#[derive(Debug, Clone)]
pub struct PreparedCorpus {
    pub folksonomy: Folksonomy,
    pub stages: Vec<(String, FolksonomyStats)>,
}

/// Loads and prepares a corpus. Dataset input goes through preprocessing,
/// optional sampling and optional p-core pruning; snapshot input is adopted
/// as-is, since a snapshot stores an already prepared corpus.
pub fn load_and_prepare(options: &CorpusOptions) -> Result<PreparedCorpus, FolkrecError> {
    let mut stages = Vec::new();
    let folksonomy = match &options.input {
        CorpusInput::Snapshot(path) => {
            let f = read_snapshot_folksonomy_file(path)?;
            stages.push(("snapshot".to_string(), f.stats()));
            f
        }
        CorpusInput::Dataset(path) => {
            let raw = parse_dataset_file(path, &options.format)?;
            stages.push(("raw".to_string(), raw.stats()));
            let mut f = preprocess(raw, &options.blacklist);
            stages.push(("preprocessed".to_string(), f.stats()));
            if let Some(fraction) = options.sample_users {
                f = sample_users(f, fraction, options.seed);
                stages.push(("sampled".to_string(), f.stats()));
            }
            if options.p_core >= 1 {
                f = p_core(f, options.p_core);
                stages.push((format!("core{}", options.p_core), f.stats()));
            }
            f
        }
    };
    Ok(PreparedCorpus { folksonomy, stages })
}

/// Parallel twin of [`folkrec_core::evaluate`]: scores test cases across the
/// current rayon pool and reduces them exactly, so the outcome is identical
/// to the sequential evaluation no matter how many threads run.
pub fn evaluate_parallel(
    recommender: &(dyn Recommender + Send + Sync),
    test: &[TestCase],
    cutoffs: &[usize],
) -> Result<EvalReport, EvalError> {
    let cases = test
        .par_iter()
        .map(|case| evaluate_case(recommender, case, cutoffs))
        .collect::<Vec<_>>();
    let mut acc = MetricAccumulator::new(cutoffs)?;
    for case in cases {
        acc.add(case);
    }
    acc.finish()
}

/// Paths of the files a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stats: PathBuf,
    pub metrics: PathBuf,
    pub pr_curve: PathBuf,
    pub manifest: PathBuf,
}

fn map_eval_error(err: EvalError) -> FolkrecError {
    match err {
        EvalError::EmptyTestSet => DataError::EmptyTestSet.into(),
        EvalError::CutoffOutOfRange(k) => UsageError::InvalidValue {
            key: "cutoffs",
            reason: format!("cutoff {k} outside 1..=10"),
        }
        .into(),
    }
}

/// Runs a full experiment and writes stats, metrics, recall/precision curve
/// data and the manifest into the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput, FolkrecError> {
    let total_start = Instant::now();
    let prepared = load_and_prepare(&config.corpus)?;
    let split = leave_one_out_split(prepared.folksonomy);
    if split.test.is_empty() {
        return Err(DataError::EmptyTestSet.into());
    }
    let train_posts = split.train.posts().len();
    let index = build_index(&split.train);

    let evaluate_all = || -> Result<Vec<(AlgorithmKind, EvalReport)>, FolkrecError> {
        let mut reports = Vec::with_capacity(config.algorithms.len());
        for &kind in &config.algorithms {
            let started = Instant::now();
            let recommender = build_recommender(kind, &config.params, &index);
            let mut report = evaluate_parallel(recommender.as_ref(), &split.test, &config.cutoffs)
                .map_err(map_eval_error)?;
            report.wall_time_ms = started.elapsed().as_millis() as u64;
            reports.push((kind, report));
        }
        Ok(reports)
    };
    let reports = match config.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("building a rayon pool cannot fail with a plain thread count")
            .install(evaluate_all),
        None => evaluate_all(),
    }?;

    let timings: Vec<(AlgorithmKind, u64)> = reports
        .iter()
        .map(|(kind, r)| (*kind, r.wall_time_ms))
        .collect();
    let manifest = report::manifest_text(
        config,
        train_posts,
        split.test.len(),
        &timings,
        total_start.elapsed().as_millis() as u64,
    );

    fs::create_dir_all(&config.output_dir).map_err(io_err(&config.output_dir))?;
    let out = RunOutput {
        stats: config.output_dir.join("stats.csv"),
        metrics: config.output_dir.join("metrics.csv"),
        pr_curve: config.output_dir.join("precision_recall.csv"),
        manifest: config.output_dir.join("manifest.txt"),
    };
    fs::write(&out.stats, report::stats_csv(&prepared.stages)).map_err(io_err(&out.stats))?;
    fs::write(&out.metrics, report::metrics_csv(&reports)).map_err(io_err(&out.metrics))?;
    fs::write(&out.pr_curve, report::pr_curve_csv(&reports)).map_err(io_err(&out.pr_curve))?;
    fs::write(&out.manifest, manifest).map_err(io_err(&out.manifest))?;
    Ok(out)
}
