//! Experiment configuration: a flat key=value file, overridable by CLI flags.
//!
//! Keys (all optional in the file; `dataset`/`snapshot`, `algorithms` and
//! `output_dir` must be present after merging CLI flags):
//!
//! ```text
//! dataset          = path/to/dump.tsv
//! snapshot         = path/to/corpus.idx   (alternative to dataset)
//! columns          = user,resource,tag,timestamp
//! delimiter        = tab | comma | semicolon | space | <single char>
//! header           = false
//! blacklist        = no-tag,bibtex-import   (extends the default list)
//! default_blacklist = true
//! sample_users     = 0.03                 (fraction of users to keep)
//! seed             = 42
//! p_core           = 0                    (0 = no pruning)
//! algorithms       = mp,mp_u,mp_r,mp_ur,cf,bll,bll_c,girp,girptm,apr,fr
//! cutoffs          = 1..10                (or a comma list like 1,5,10)
//! output_dir       = out/
//! d                = 0.5
//! beta             = 0.5
//! beta_m           = 0.5
//! lambda           = 0.0000115740740740741
//! min_recency      = 1
//! neighbors        = 20
//! damping          = 0.7
//! tol              = 1e-6
//! max_iter         = 100
//! threads          = 0                    (0 = rayon default)
//! ```
//!
//! Lines starting with `#` and blank lines are ignored. Unknown keys are
//! usage errors. The run manifest is written in this same format.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use folkrec_core::{AlgorithmKind, AlgorithmParams, DecayParams};

use crate::error::{io_err, FolkrecError, UsageError};
use crate::parse::ColumnFormat;

/// Tags removed by default during preprocessing; the config can extend (or
/// disable) the list.
pub const DEFAULT_BLACKLIST: [&str; 2] = ["no-tag", "bibtex-import"];

/// A configuration layer in which every setting is optional; layers merge
/// with the more specific one (CLI flags) winning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverlay {
    pub dataset: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub columns: Option<String>,
    pub delimiter: Option<String>,
    pub header: Option<bool>,
    pub blacklist: Option<Vec<String>>,
    pub default_blacklist: Option<bool>,
    pub sample_users: Option<f64>,
    pub seed: Option<u64>,
    pub p_core: Option<usize>,
    pub algorithms: Option<Vec<String>>,
    pub cutoffs: Option<String>,
    pub output_dir: Option<PathBuf>,
    pub d: Option<f64>,
    pub beta: Option<f64>,
    pub beta_m: Option<f64>,
    pub lambda: Option<f64>,
    pub min_recency: Option<i64>,
    pub neighbors: Option<usize>,
    pub damping: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub threads: Option<usize>,
}

macro_rules! take_first {
    ($self:ident, $base:ident, $($field:ident),+ $(,)?) => {
        ConfigOverlay { $($field: $self.$field.or($base.$field)),+ }
    };
}

impl ConfigOverlay {
    /// Reads a key=value config file.
    pub fn from_file(path: &Path) -> Result<Self, FolkrecError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_str(&text, path)
    }

    fn from_str(text: &str, path: &Path) -> Result<Self, FolkrecError> {
        let mut overlay = ConfigOverlay::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| {
                FolkrecError::Usage(UsageError::Config {
                    path: path.to_path_buf(),
                    line: i + 1,
                    reason,
                })
            };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err("expected key = value".to_string()))?;
            if value.is_empty() {
                return Err(err(format!("empty value for key {key:?}")));
            }
            let parse_err = |what: &str| err(format!("invalid {what} value {value:?}"));
            match key {
                "dataset" => overlay.dataset = Some(PathBuf::from(value)),
                "snapshot" => overlay.snapshot = Some(PathBuf::from(value)),
                "columns" => overlay.columns = Some(value.to_string()),
                "delimiter" => overlay.delimiter = Some(value.to_string()),
                "header" => overlay.header = Some(value.parse().map_err(|_| parse_err("bool"))?),
                "blacklist" => {
                    overlay.blacklist =
                        Some(value.split(',').map(|t| t.trim().to_string()).collect())
                }
                "default_blacklist" => {
                    overlay.default_blacklist = Some(value.parse().map_err(|_| parse_err("bool"))?)
                }
                "sample_users" => {
                    overlay.sample_users = Some(value.parse().map_err(|_| parse_err("number"))?)
                }
                "seed" => overlay.seed = Some(value.parse().map_err(|_| parse_err("integer"))?),
                "p_core" => overlay.p_core = Some(value.parse().map_err(|_| parse_err("integer"))?),
                "algorithms" => {
                    overlay.algorithms =
                        Some(value.split(',').map(|a| a.trim().to_string()).collect())
                }
                "cutoffs" => overlay.cutoffs = Some(value.to_string()),
                "output_dir" => overlay.output_dir = Some(PathBuf::from(value)),
                "d" => overlay.d = Some(value.parse().map_err(|_| parse_err("number"))?),
                "beta" => overlay.beta = Some(value.parse().map_err(|_| parse_err("number"))?),
                "beta_m" => overlay.beta_m = Some(value.parse().map_err(|_| parse_err("number"))?),
                "lambda" => overlay.lambda = Some(value.parse().map_err(|_| parse_err("number"))?),
                "min_recency" => {
                    overlay.min_recency = Some(value.parse().map_err(|_| parse_err("integer"))?)
                }
                "neighbors" => {
                    overlay.neighbors = Some(value.parse().map_err(|_| parse_err("integer"))?)
                }
                "damping" => {
                    overlay.damping = Some(value.parse().map_err(|_| parse_err("number"))?)
                }
                "tol" => overlay.tol = Some(value.parse().map_err(|_| parse_err("number"))?),
                "max_iter" => {
                    overlay.max_iter = Some(value.parse().map_err(|_| parse_err("integer"))?)
                }
                "threads" => {
                    overlay.threads = Some(value.parse().map_err(|_| parse_err("integer"))?)
                }
                unknown => return Err(err(format!("unknown key {unknown:?}"))),
            }
        }
        Ok(overlay)
    }

    /// Overlays `self` on top of `base`; settings present in `self` win.
    pub fn over(self, base: ConfigOverlay) -> ConfigOverlay {
        take_first!(
            self,
            base,
            dataset,
            snapshot,
            columns,
            delimiter,
            header,
            blacklist,
            default_blacklist,
            sample_users,
            seed,
            p_core,
            algorithms,
            cutoffs,
            output_dir,
            d,
            beta,
            beta_m,
            lambda,
            min_recency,
            neighbors,
            damping,
            tol,
            max_iter,
            threads,
        )
    }

    /// Resolves the dataset-handling options, which every subcommand needs.
    pub fn resolve_corpus(&self) -> Result<CorpusOptions, UsageError> {
        let mut format = ColumnFormat::default();
        if let Some(spec) = &self.columns {
            format = format.with_columns(spec)?;
        }
        if let Some(spec) = &self.delimiter {
            format = format.with_delimiter(spec)?;
        }
        format.has_header = self.header.unwrap_or(false);

        if let Some(fraction) = self.sample_users {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return Err(UsageError::InvalidValue {
                    key: "sample_users",
                    reason: format!("{fraction} is not in (0, 1]"),
                });
            }
        }
        let input = match (&self.dataset, &self.snapshot) {
            (Some(_), Some(_)) => {
                return Err(UsageError::InvalidValue {
                    key: "dataset",
                    reason: "dataset and snapshot are mutually exclusive".to_string(),
                })
            }
            (Some(d), None) => CorpusInput::Dataset(d.clone()),
            (None, Some(s)) => CorpusInput::Snapshot(s.clone()),
            (None, None) => return Err(UsageError::MissingOption("--dataset or --snapshot")),
        };

        let mut blacklist: BTreeSet<String> = BTreeSet::new();
        if self.default_blacklist.unwrap_or(true) {
            blacklist.extend(DEFAULT_BLACKLIST.iter().map(|t| t.to_string()));
        }
        if let Some(extra) = &self.blacklist {
            blacklist.extend(extra.iter().map(|t| t.to_lowercase()));
        }

        Ok(CorpusOptions {
            input,
            format,
            blacklist,
            sample_users: self.sample_users,
            seed: self.seed.unwrap_or(42),
            p_core: self.p_core.unwrap_or(0),
        })
    }

    /// Resolves a full experiment configuration (corpus options plus
    /// algorithm selection, parameters and output directory).
    pub fn resolve_experiment(&self) -> Result<ExperimentConfig, UsageError> {
        let corpus = self.resolve_corpus()?;
        let names = self
            .algorithms
            .clone()
            .ok_or(UsageError::MissingOption("--algorithms"))?;
        if names.is_empty() {
            return Err(UsageError::NoAlgorithms);
        }
        let mut algorithms = Vec::with_capacity(names.len());
        for name in &names {
            algorithms.push(
                AlgorithmKind::parse(name).ok_or(UsageError::UnknownAlgorithm(name.clone()))?,
            );
        }
        let cutoffs = parse_cutoffs(self.cutoffs.as_deref().unwrap_or("1..10"))?;
        let output_dir = self
            .output_dir
            .clone()
            .ok_or(UsageError::MissingOption("--output-dir"))?;

        let defaults = AlgorithmParams::default();
        let decay_defaults = DecayParams::default();
        let params = AlgorithmParams {
            decay: DecayParams {
                d: self.d.unwrap_or(decay_defaults.d),
                min_recency: self.min_recency.unwrap_or(decay_defaults.min_recency),
                beta: self.beta.unwrap_or(decay_defaults.beta),
                lambda: self.lambda.unwrap_or(decay_defaults.lambda),
            },
            mix: self.beta_m.unwrap_or(defaults.mix),
            neighbors: self.neighbors.unwrap_or(defaults.neighbors),
            damping: self.damping.unwrap_or(defaults.damping),
            tol: self.tol.unwrap_or(defaults.tol),
            max_iter: self.max_iter.unwrap_or(defaults.max_iter),
        };
        validate_params(&params)?;

        Ok(ExperimentConfig {
            corpus,
            algorithms,
            cutoffs,
            output_dir,
            params,
            threads: self.threads.filter(|&t| t > 0),
        })
    }
}

fn validate_params(params: &AlgorithmParams) -> Result<(), UsageError> {
    let bad = |key: &'static str, reason: String| Err(UsageError::InvalidValue { key, reason });
    let unit = |v: f64| (0.0..=1.0).contains(&v);
    if params.decay.d.is_nan() || params.decay.d < 0.0 {
        return bad("d", format!("{} must be non-negative", params.decay.d));
    }
    if params.decay.min_recency < 1 {
        return bad(
            "min_recency",
            format!("{} must be at least 1", params.decay.min_recency),
        );
    }
    if !unit(params.decay.beta) {
        return bad("beta", format!("{} is not in [0, 1]", params.decay.beta));
    }
    if params.decay.lambda.is_nan() || params.decay.lambda <= 0.0 {
        return bad(
            "lambda",
            format!("{} must be positive", params.decay.lambda),
        );
    }
    if !unit(params.mix) {
        return bad("beta_m", format!("{} is not in [0, 1]", params.mix));
    }
    if params.neighbors == 0 {
        return bad("neighbors", "must be at least 1".to_string());
    }
    if !(params.damping >= 0.0 && params.damping < 1.0) {
        return bad("damping", format!("{} is not in [0, 1)", params.damping));
    }
    if params.tol.is_nan() || params.tol <= 0.0 {
        return bad("tol", format!("{} must be positive", params.tol));
    }
    if params.max_iter == 0 {
        return bad("max_iter", "must be at least 1".to_string());
    }
    Ok(())
}

fn parse_cutoffs(spec: &str) -> Result<Vec<usize>, UsageError> {
    let bad = |reason: String| UsageError::InvalidValue {
        key: "cutoffs",
        reason,
    };
    let cutoffs: Vec<usize> = if let Some((lo, hi)) = spec.split_once("..") {
        let lo: usize = lo
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad range {spec:?}")))?;
        let hi: usize = hi
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad range {spec:?}")))?;
        if lo > hi {
            return Err(bad(format!("empty range {spec:?}")));
        }
        (lo..=hi).collect()
    } else {
        spec.split(',')
            .map(|k| {
                k.trim()
                    .parse::<usize>()
                    .map_err(|_| bad(format!("bad cutoff {k:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if let Some(&k) = cutoffs.iter().find(|&&k| k == 0 || k > 10) {
        return Err(bad(format!("cutoff {k} outside 1..=10")));
    }
    Ok(cutoffs)
}

/// Where the corpus comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusInput {
    Dataset(PathBuf),
    Snapshot(PathBuf),
}

/// Everything needed to load and prepare a corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusOptions {
    pub input: CorpusInput,
    pub format: ColumnFormat,
    pub blacklist: BTreeSet<String>,
    pub sample_users: Option<f64>,
    pub seed: u64,
    /// 0 disables pruning.
    pub p_core: usize,
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub corpus: CorpusOptions,
    pub algorithms: Vec<AlgorithmKind>,
    pub cutoffs: Vec<usize>,
    pub output_dir: PathBuf,
    pub params: AlgorithmParams,
    pub threads: Option<usize>,
}
