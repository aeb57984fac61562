//! Core algorithms for personalized tag recommendation over folksonomies.
//!
//! A folksonomy is the tripartite structure of users, resources and tags that
//! emerges from social tagging. This crate provides:
//!
//! * the domain model ([`Folksonomy`], [`Post`], [`TrainingIndex`]) together
//!   with preprocessing and p-core pruning,
//! * frequency-based recommenders (global, per-user, per-resource and their
//!   mixture) and user-based collaborative filtering,
//! * time-decay recommenders built on the base-level learning equation of the
//!   ACT-R memory model, plus the exponential first/last-usage variants,
//! * adapted PageRank and its differential extension over the folksonomy
//!   graph,
//! * a leave-one-out evaluation kernel (precision, recall, F1, MRR, MAP)
//!   that accumulates in exact rational arithmetic so results are independent
//!   of summation order.
//!
//! The crate is `no_std`-compatible (`--no-default-features --features libm`);
//! it only needs `alloc`. File formats, dataset parsing and the benchmark CLI
//! live in the companion `folkrec` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("folkrec-core needs either the `std` feature or the `libm` feature");

pub mod evaluate;
pub mod folksonomy;
pub mod frequency;
pub mod graph;
pub mod index;
mod math;
pub mod metrics;
pub mod recommend;
pub mod split;
pub mod temporal;

pub use evaluate::{evaluate, EvalError, EvalReport};
pub use folksonomy::{p_core, preprocess, Folksonomy, FolksonomyError, FolksonomyStats, Post};
pub use index::{build_index, TrainingIndex};
pub use recommend::{
    build_recommender, AlgorithmKind, AlgorithmParams, Recommendation, Recommender, ScoredTag,
};
pub use split::{leave_one_out_split, SplitPair, TestCase};
pub use temporal::DecayParams;
