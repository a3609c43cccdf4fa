//! Monte Carlo acceptance estimates for a strategy, and the closed-form bound
//! for guessing slit labels.

use serde::{Deserialize, Serialize};

use super::commit::{streams, Protocol};
use super::strategy::StrategyKind;
use super::types::{AliceRecord, EventClass, Transcript};
use super::verify::{Thresholds, VerificationReport, Verifier};
use super::ProtocolError;
use crate::exec;
use crate::rng;
use crate::stats::{binomial_tail, clopper_pearson};

/// Confidence level of the reported acceptance intervals.
pub const SWEEP_CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceEstimate {
    pub n: usize,
    pub strategy: String,
    pub acceptances: u64,
    pub reps: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Seed of repetition `rep` of a sweep at detection target `n`.
pub fn repetition_seed(master: u64, n: usize, rep: u64) -> u64 {
    rng::derive_seed(master, &[n as u64, rep])
}

/// One full commit / unveil / verify round.
pub fn run_once(
    protocol: &Protocol,
    verifier: &Verifier,
    strategy: StrategyKind,
    seed: u64,
) -> Result<VerificationReport, ProtocolError> {
    let transcript = protocol.run_commit_seeded(strategy, seed)?;
    let mut unveil_rng = rng::stream(seed, &[streams::UNVEIL]);
    let msg = protocol.unveil(
        &transcript.alice_view(),
        strategy,
        transcript.commit_end_time,
        &mut unveil_rng,
    )?;
    verifier.verify(&transcript.bob_view(), &msg)
}

fn summarize(
    protocol: &Protocol,
    strategy: StrategyKind,
    outcomes: Vec<Result<bool, ProtocolError>>,
) -> Result<AcceptanceEstimate, ProtocolError> {
    let reps = outcomes.len() as u64;
    let mut acceptances = 0u64;
    for o in outcomes {
        if o? {
            acceptances += 1;
        }
    }
    let (ci_low, ci_high) = clopper_pearson(acceptances, reps, SWEEP_CONFIDENCE)?;
    Ok(AcceptanceEstimate {
        n: protocol.config().n_detections,
        strategy: strategy.label(),
        acceptances,
        reps,
        estimate: acceptances as f64 / reps as f64,
        ci_low,
        ci_high,
    })
}

fn check_reps(reps: u64) -> Result<(), ProtocolError> {
    if reps == 0 {
        return Err(ProtocolError::ConfigInvalid(
            "need at least one repetition".into(),
        ));
    }
    Ok(())
}

pub fn attack_sweep_seq(
    protocol: &Protocol,
    thresholds: Thresholds,
    strategy: StrategyKind,
    reps: u64,
) -> Result<AcceptanceEstimate, ProtocolError> {
    check_reps(reps)?;
    let verifier = protocol.verifier(thresholds)?;
    let master = protocol.config().seed;
    let n = protocol.config().n_detections;
    let outcomes = exec::map_indexed_seq(reps, |r| {
        run_once(protocol, &verifier, strategy, repetition_seed(master, n, r))
            .map(|rep| rep.accepted)
    });
    summarize(protocol, strategy, outcomes)
}

#[cfg(feature = "parallel")]
pub fn attack_sweep_par(
    protocol: &Protocol,
    thresholds: Thresholds,
    strategy: StrategyKind,
    reps: u64,
) -> Result<AcceptanceEstimate, ProtocolError> {
    check_reps(reps)?;
    let verifier = protocol.verifier(thresholds)?;
    let master = protocol.config().seed;
    let n = protocol.config().n_detections;
    let outcomes = exec::map_indexed_par(reps, |r| {
        run_once(protocol, &verifier, strategy, repetition_seed(master, n, r))
            .map(|rep| rep.accepted)
    });
    summarize(protocol, strategy, outcomes)
}

/// Estimates the probability that Bob accepts under `strategy`. Repetition
/// `r` is seeded by [`repetition_seed`]`(config.seed, N, r)`; the result is
/// identical with or without the `parallel` feature.
pub fn attack_sweep(
    protocol: &Protocol,
    thresholds: Thresholds,
    strategy: StrategyKind,
    reps: u64,
) -> Result<AcceptanceEstimate, ProtocolError> {
    #[cfg(feature = "parallel")]
    {
        attack_sweep_par(protocol, thresholds, strategy, reps)
    }
    #[cfg(not(feature = "parallel"))]
    {
        attack_sweep_seq(protocol, thresholds, strategy, reps)
    }
}

/// `P[Bin(m, 1/2) ≥ ⌈(1 − ε)m⌉]` with `m = round(N · single_fraction)`: the
/// chance that coin-flip slit labels clear the accuracy check.
pub fn cheat_acceptance_bound(
    n: usize,
    epsilon: f64,
    single_fraction: f64,
) -> Result<f64, ProtocolError> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(ProtocolError::BadEpsilon(epsilon));
    }
    if !(0.0..=1.0).contains(&single_fraction) {
        return Err(ProtocolError::ConfigInvalid(format!(
            "single-slit fraction {single_fraction} not in [0,1]"
        )));
    }
    let m = (n as f64 * single_fraction).round() as u64;
    Ok(binomial_tail(m, required_correct(m, epsilon), 0.5)?)
}

/// Smallest number of correct labels out of `m` with error rate `≤ ε`.
pub fn required_correct(m: u64, epsilon: f64) -> u64 {
    // The nudge keeps e.g. 0.98 * 200 from rounding up to 197.
    (((1.0 - epsilon) * m as f64) - 1e-9).ceil().max(0.0) as u64
}

/// Fraction of detections a single-slit setting accounts for.
pub const SINGLE_SLIT_FRACTION: f64 = 2.0 / 3.0;

/// Counts router decisions that match the true event class:
/// `(correct, routed)` over the detected trials of a router transcript.
pub fn routing_accuracy(transcript: &Transcript) -> (u64, u64) {
    let mut correct = 0;
    let mut routed = 0;
    for t in &transcript.trials {
        if let AliceRecord::Routed(class) = t.alice_record {
            routed += 1;
            let truth = if t.setting.is_single_slit() {
                EventClass::SingleSlit
            } else {
                EventClass::DoubleSlit
            };
            if class == truth {
                correct += 1;
            }
        }
    }
    (correct, routed)
}
