//! The two-party protocol: Bob's settings, Alice's strategies, transcripts
//! and their projections, the unveil message and Bob's verification.

mod commit;
mod strategy;
mod sweep;
mod types;
mod verify;

pub use commit::{discrimination_states, streams, CommitConfig, Protocol, DOUBLE_SLIT_PRIOR};
pub use strategy::{StrategyKind, UnveilStats};
#[cfg(feature = "parallel")]
pub use sweep::attack_sweep_par;
pub use sweep::{
    attack_sweep, attack_sweep_seq, cheat_acceptance_bound, repetition_seed, required_correct,
    routing_accuracy, run_once, AcceptanceEstimate, SINGLE_SLIT_FRACTION, SWEEP_CONFIDENCE,
};
pub use types::{
    draw_setting, AliceRecord, AliceTrial, BobTrial, CommitBit, Disclosed, Disclosure, EventClass,
    PublicTrial, SlitSetting, Transcript, TrialRecord, UnveilMessage,
};
pub use verify::{test_names, TestOutcome, Thresholds, VerificationReport, Verifier};

use thiserror::Error;

use crate::{decay::DecayError, optics::OpticsError, quantum::QuantumError, stats::StatsError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("no record for detected trial {index}")]
    MissingRecords { index: u64 },
    #[error("malformed unveil: {0}")]
    MalformedUnveil(String),
    #[error("strategy failure: {0}")]
    StrategyFailure(String),
    #[error("epsilon must be in (0, 1/2), got {0}")]
    BadEpsilon(f64),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Decay(#[from] DecayError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
