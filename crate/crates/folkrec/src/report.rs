//! Deterministic text output: stats CSV, metrics CSV, recall/precision curve
//! data and the run manifest.
//!
//! All builders return strings so the run orchestrator can do every write in
//! one deterministic pass at the end; identical inputs produce identical
//! bytes. Timing entries in the manifest are written as comment lines so the
//! remaining manifest is itself a loadable config file.

use folkrec_core::{AlgorithmKind, EvalReport, FolksonomyStats};

use crate::config::{CorpusInput, ExperimentConfig};

/// One row per preparation stage, mirroring the usual dataset property
/// table: bookmarks, users, resources, tags, assignments.
pub fn stats_csv(stages: &[(String, FolksonomyStats)]) -> String {
    let mut out = String::from("stage,bookmarks,users,resources,tags,assignments\n");
    for (label, s) in stages {
        out.push_str(&format!(
            "{label},{},{},{},{},{}\n",
            s.bookmarks, s.users, s.resources, s.tags, s.assignments
        ));
    }
    out
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// One row per (algorithm, cutoff) with recall, precision and F1, plus one
/// summary row per algorithm carrying MRR, MAP and the evaluated post count.
pub fn metrics_csv(reports: &[(AlgorithmKind, EvalReport)]) -> String {
    let mut out = String::from("algorithm,k,recall,precision,f1,mrr,map,n_posts\n");
    for (kind, report) in reports {
        let name = kind.name();
        for (i, k) in report.cutoffs.iter().enumerate() {
            out.push_str(&format!(
                "{name},{k},{},{},{},,,\n",
                fmt(report.recall[i]),
                fmt(report.precision[i]),
                fmt(report.f1[i]),
            ));
        }
        out.push_str(&format!(
            "{name},summary,,,,{},{},{}\n",
            fmt(report.mrr),
            fmt(report.map),
            report.n_posts
        ));
    }
    out
}

/// (recall, precision) pairs per cutoff and algorithm: plot-ready data for
/// recall/precision curves.
pub fn pr_curve_csv(reports: &[(AlgorithmKind, EvalReport)]) -> String {
    let mut out = String::from("algorithm,k,recall,precision\n");
    for (kind, report) in reports {
        for (i, k) in report.cutoffs.iter().enumerate() {
            out.push_str(&format!(
                "{},{k},{},{}\n",
                kind.name(),
                fmt(report.recall[i]),
                fmt(report.precision[i]),
            ));
        }
    }
    out
}

fn cutoffs_spec(cutoffs: &[usize]) -> String {
    let contiguous = cutoffs.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous && cutoffs.len() > 1 {
        format!("{}..{}", cutoffs[0], cutoffs[cutoffs.len() - 1])
    } else {
        cutoffs
            .iter()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// The run manifest: a config echo (loadable as a config file) plus comment
/// lines for corpus sizes and wall times. Timing comments are the only
/// nondeterministic content.
pub fn manifest_text(
    config: &ExperimentConfig,
    train_posts: usize,
    test_posts: usize,
    timings_ms: &[(AlgorithmKind, u64)],
    total_ms: u64,
) -> String {
    let mut out = String::new();
    out.push_str("# folkrec run manifest\n");
    out.push_str(&format!("# version = {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("# train_posts = {train_posts}\n"));
    out.push_str(&format!("# test_posts = {test_posts}\n"));
    for (kind, ms) in timings_ms {
        out.push_str(&format!("# wall_time_ms {} = {ms}\n", kind.name()));
    }
    out.push_str(&format!("# wall_time_ms total = {total_ms}\n"));

    let corpus = &config.corpus;
    match &corpus.input {
        CorpusInput::Dataset(path) => out.push_str(&format!("dataset = {}\n", path.display())),
        CorpusInput::Snapshot(path) => out.push_str(&format!("snapshot = {}\n", path.display())),
    }
    let delimiter = match corpus.format.delimiter {
        '\t' => "tab".to_string(),
        ',' => "comma".to_string(),
        ';' => "semicolon".to_string(),
        ' ' => "space".to_string(),
        other => other.to_string(),
    };
    out.push_str(&format!("columns = {}\n", column_spec(&corpus.format)));
    out.push_str(&format!("delimiter = {delimiter}\n"));
    out.push_str(&format!("header = {}\n", corpus.format.has_header));
    if !corpus.blacklist.is_empty() {
        let list: Vec<&str> = corpus.blacklist.iter().map(String::as_str).collect();
        out.push_str("default_blacklist = false\n");
        out.push_str(&format!("blacklist = {}\n", list.join(",")));
    } else {
        out.push_str("default_blacklist = false\n");
    }
    if let Some(fraction) = corpus.sample_users {
        out.push_str(&format!("sample_users = {fraction}\n"));
    }
    out.push_str(&format!("seed = {}\n", corpus.seed));
    out.push_str(&format!("p_core = {}\n", corpus.p_core));
    let algorithms: Vec<&str> = config.algorithms.iter().map(|a| a.name()).collect();
    out.push_str(&format!("algorithms = {}\n", algorithms.join(",")));
    out.push_str(&format!("cutoffs = {}\n", cutoffs_spec(&config.cutoffs)));
    out.push_str(&format!("output_dir = {}\n", config.output_dir.display()));
    let p = &config.params;
    out.push_str(&format!("d = {}\n", p.decay.d));
    out.push_str(&format!("beta = {}\n", p.decay.beta));
    out.push_str(&format!("beta_m = {}\n", p.mix));
    out.push_str(&format!("lambda = {}\n", p.decay.lambda));
    out.push_str(&format!("min_recency = {}\n", p.decay.min_recency));
    out.push_str(&format!("neighbors = {}\n", p.neighbors));
    out.push_str(&format!("damping = {}\n", p.damping));
    out.push_str(&format!("tol = {}\n", p.tol));
    out.push_str(&format!("max_iter = {}\n", p.max_iter));
    if let Some(threads) = config.threads {
        out.push_str(&format!("threads = {threads}\n"));
    }
    out
}

fn column_spec(format: &crate::parse::ColumnFormat) -> String {
    let width = format
        .user
        .max(format.resource)
        .max(format.tag)
        .max(format.timestamp)
        + 1;
    let mut names = vec!["-"; width];
    names[format.user] = "user";
    names[format.resource] = "resource";
    names[format.tag] = "tag";
    names[format.timestamp] = "timestamp";
    names.join(",")
}
