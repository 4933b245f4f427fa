//! Oversampling of band-limited functions with derivative frames: frame
//! verification, canonical duals, truncated reconstruction and recovery of
//! finitely many missing samples.

pub mod cli;
pub mod config;
pub mod derivative;
pub mod duals;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod gramian;
pub mod linalg;
pub mod params;
pub mod poly;
pub mod quad;
pub mod recovery;
pub mod sampling;
pub mod signal;
pub mod spectral;

pub use derivative::{derivative_generators, dual2_fourier, dual2_time, vandermonde_minor_det};
pub use duals::{numeric_duals, DualSet, NumericDuals};
pub use error::{Error, Result};
pub use generators::{GeneratorSet, PiecewisePoly};
pub use gramian::{cross_vector, mixed_gramian_at, pre_gramian_at, verify_frame, FrameReport, PreGramianSlice};
pub use params::{compute_params, partition, FrameParams, FrequencyPartition, Regime, Zone};
pub use recovery::{build_recovery_system, recover, recoverable, Certificate, MissingIndexSet, RecoverySystem};
pub use sampling::{reconstruct, reconstruction_error, take_samples, SampleSet};
pub use signal::{eval_signal, Signal, SincTerm};
