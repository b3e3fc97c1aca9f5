//! Write-once-memory rewriting codes built on source polarization.
//!
//! A page whose cells can only move from 1 to 0 is rewritten by choosing a
//! codeword `x` with `x_n = 0` wherever the current state has `y_n = 0`. The
//! encoder samples the transformed word `u = x G_N` bit by bit from the model
//! conditionals, except on the high-entropy index set where it places message
//! bits. The decoder only applies `G_N` and reads those indices back.

pub mod bits;
pub mod cli;
pub mod codec;
pub mod construct;
pub mod error;
pub mod model;
pub mod polar;
pub mod sc;
pub mod seed;
pub mod sim;
pub mod validate;

pub use bits::BitSequence;
pub use codec::{
    decode, encode, validate_write, EncodeFailure, EncodeOptions, EncodeOutcome, FrozenRule,
    Message,
};
pub use construct::{
    estimate_statistics, exact_statistics, select_high_entropy_set, HighEntropySet, IndexStats,
    Method, SelectionMode,
};
pub use error::{Result, WomError};
pub use model::{
    count_flips, entropy, model_stats, sample_joint, sample_state, ModelStats, SourceModel,
};
pub use polar::{bit_reversal_perm, gn_matrix, polar_transform, TransformSize};
pub use sc::{brute_force_conditional, chain_probability, leaf_pair, ProbPair, ScEngine};
pub use sim::{
    run_multiwrite, run_write_experiment, tv_distance_exact, ExperimentReport, TvReport,
};
