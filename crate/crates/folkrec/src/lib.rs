//! Benchmark harness around `folkrec-core`: dataset parsing, corpus
//! snapshots, experiment configs, a synthetic corpus generator, parallel
//! evaluation and CSV reporting. The `folkrec` binary wires these together
//! behind the `prepare`, `stats`, `split`, `evaluate` and `synth`
//! subcommands.

pub mod config;
pub mod error;
pub mod parse;
pub mod report;
pub mod run;
pub mod sample;
pub mod snapshot;
pub mod synth;

pub use config::{ConfigOverlay, CorpusInput, CorpusOptions, ExperimentConfig, DEFAULT_BLACKLIST};
pub use error::{DataError, FolkrecError, UsageError};
pub use parse::{parse_dataset, parse_dataset_file, ColumnFormat};
pub use run::{evaluate_parallel, load_and_prepare, run_experiment, PreparedCorpus, RunOutput};
pub use sample::sample_users;
pub use snapshot::{
    read_snapshot, read_snapshot_file, snapshot_to_vec, write_snapshot, write_snapshot_file,
    SNAPSHOT_HEADER,
};
pub use synth::{generate_synthetic, SynthParams};
