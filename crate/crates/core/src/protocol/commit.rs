use rand::Rng;
use serde::{Deserialize, Serialize};

use super::strategy::StrategyKind;
use super::types::{draw_setting, AliceRecord, SlitSetting, Transcript, TrialRecord};
use super::verify::{Thresholds, Verifier};
use super::ProtocolError;
use crate::decay::{commit_deadline, DeadlinePolicy, ParticleSpecies};
use crate::optics::{ScreenModel, SlitGeometry};
use crate::quantum::{dm_from_state, DensityMatrix, HelstromMeasurement, SlitState};
use crate::rng::{self, SimRng};

/// Indices of the independent random streams of one run.
pub mod streams {
    pub const SETTINGS: u64 = 0;
    pub const CLOCK: u64 = 1;
    pub const ALICE: u64 = 2;
    pub const NATURE: u64 = 3;
    pub const UNVEIL: u64 = 4;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitConfig {
    /// Detections required before the commit phase can close.
    pub n_detections: usize,
    pub species: ParticleSpecies,
    pub deadline: DeadlinePolicy,
    pub geometry: SlitGeometry,
    pub seed: u64,
    /// Mean spacing between emissions, in half-lives. Zero emits every
    /// particle at once.
    pub inter_arrival: f64,
    /// Seconds between emission and Alice's announcement.
    pub transit_latency: f64,
}

impl Default for CommitConfig {
    fn default() -> Self {
        Self {
            n_detections: 1200,
            species: ParticleSpecies::neutron(),
            deadline: DeadlinePolicy::default(),
            geometry: SlitGeometry::default(),
            seed: 0,
            inter_arrival: 1.0,
            transit_latency: 1e-9,
        }
    }
}

impl CommitConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |m: String| Err(ProtocolError::ConfigInvalid(m));
        if self.n_detections == 0 {
            return bad("N must be at least 1".into());
        }
        if let Err(e) = self.species.validate() {
            return bad(e.to_string());
        }
        if let Err(e) = DeadlinePolicy::new(self.deadline.multiplier) {
            return bad(e.to_string());
        }
        if let Err(e) = self.geometry.validate() {
            return bad(e.to_string());
        }
        if !(self.inter_arrival.is_finite() && self.inter_arrival >= 0.0) {
            return bad(format!(
                "inter-arrival must be >= 0, got {}",
                self.inter_arrival
            ));
        }
        if !(self.transit_latency.is_finite() && self.transit_latency >= 0.0) {
            return bad(format!(
                "transit latency must be >= 0, got {}",
                self.transit_latency
            ));
        }
        Ok(())
    }
}

/// A validated configuration with its screen patterns and Alice's optimal
/// discrimination measurement precomputed. Shared read-only across runs.
#[derive(Debug, Clone)]
pub struct Protocol {
    config: CommitConfig,
    screen: ScreenModel,
    router: HelstromMeasurement,
}

/// Prior of a double-slit event given a detection.
pub const DOUBLE_SLIT_PRIOR: f64 = 1.0 / 3.0;

impl Protocol {
    pub fn new(config: CommitConfig) -> Result<Self, ProtocolError> {
        config.validate()?;
        let screen = ScreenModel::new(config.geometry)?;
        let (rho_double, rho_single) = discrimination_states();
        let router = HelstromMeasurement::optimal(
            &rho_double,
            DOUBLE_SLIT_PRIOR,
            &rho_single,
            1.0 - DOUBLE_SLIT_PRIOR,
        )?;
        Ok(Self {
            config,
            screen,
            router,
        })
    }

    pub fn config(&self) -> &CommitConfig {
        &self.config
    }

    pub fn screen(&self) -> &ScreenModel {
        &self.screen
    }

    pub fn species(&self) -> &ParticleSpecies {
        &self.config.species
    }

    pub fn router(&self) -> &HelstromMeasurement {
        &self.router
    }

    pub fn verifier(&self, thresholds: Thresholds) -> Result<Verifier, ProtocolError> {
        Verifier::new(&self.screen, thresholds)
    }

    /// One particle: Bob's setting has been drawn; Alice acts if it reaches
    /// her.
    pub fn run_trial(
        &self,
        index: u64,
        emit_time: f64,
        setting: SlitSetting,
        strategy: StrategyKind,
        alice: &mut SimRng,
        nature: &mut SimRng,
    ) -> Result<TrialRecord, ProtocolError> {
        let alice_record = match setting.slit_state() {
            Some(state) => self.commit_action(&state, strategy, alice, nature)?,
            None => AliceRecord::None,
        };
        Ok(TrialRecord {
            index,
            emit_time,
            setting,
            detected: setting.passes(),
            alice_record,
            announce_time: emit_time + self.config.transit_latency,
        })
    }

    pub fn run_commit(&self, strategy: StrategyKind) -> Result<Transcript, ProtocolError> {
        self.run_commit_seeded(strategy, self.config.seed)
    }

    /// Emits particles until `N` are detected. Settings, emission times,
    /// Alice's measurements and particle lifetimes use separate streams, so
    /// the public record of a seed does not depend on the strategy.
    pub fn run_commit_seeded(
        &self,
        strategy: StrategyKind,
        seed: u64,
    ) -> Result<Transcript, ProtocolError> {
        let mut settings = rng::stream(seed, &[streams::SETTINGS]);
        let mut clock = rng::stream(seed, &[streams::CLOCK]);
        let mut alice = rng::stream(seed, &[streams::ALICE]);
        let mut nature = rng::stream(seed, &[streams::NATURE]);
        let mean_gap = self.config.inter_arrival * self.config.species.half_life;

        let target = self.config.n_detections;
        let mut trials = Vec::with_capacity(target * 4 / 3 + 16);
        let mut n_detected = 0;
        let mut emit_time = 0.0;
        let mut last_detection_time = 0.0;
        let mut index = 0u64;
        while n_detected < target {
            if index > 0 && mean_gap > 0.0 {
                emit_time += -mean_gap * (1.0 - clock.random::<f64>()).ln();
            }
            let setting = draw_setting(&mut settings);
            let trial =
                self.run_trial(index, emit_time, setting, strategy, &mut alice, &mut nature)?;
            if trial.detected {
                n_detected += 1;
                last_detection_time = trial.announce_time;
            }
            trials.push(trial);
            index += 1;
        }
        Ok(Transcript {
            trials,
            n_detected,
            last_detection_time,
            commit_end_time: commit_deadline(
                last_detection_time,
                &self.config.species,
                self.config.deadline,
            ),
        })
    }
}

/// The double-slit state `|+><+|` and the single-slit mixture `I/2` as Alice
/// sees them after a detection.
pub fn discrimination_states() -> (DensityMatrix, DensityMatrix) {
    let double = dm_from_state(SlitState::plus().as_pure()).expect("normalized");
    let single = DensityMatrix::mixture(&[
        (
            0.5,
            &dm_from_state(SlitState::left().as_pure()).expect("normalized"),
        ),
        (
            0.5,
            &dm_from_state(SlitState::right().as_pure()).expect("normalized"),
        ),
    ])
    .expect("valid mixture");
    (double, single)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{CommitBit, PublicTrial};
    use crate::quantum::Slit;

    fn protocol(n: usize) -> Protocol {
        Protocol::new(CommitConfig {
            n_detections: n,
            seed: 21,
            ..CommitConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn zero_detections_is_invalid() {
        let cfg = CommitConfig {
            n_detections: 0,
            ..CommitConfig::default()
        };
        assert!(matches!(
            Protocol::new(cfg),
            Err(ProtocolError::ConfigInvalid(_))
        ));
        let cfg = CommitConfig {
            inter_arrival: -1.0,
            ..CommitConfig::default()
        };
        assert!(matches!(
            Protocol::new(cfg),
            Err(ProtocolError::ConfigInvalid(_))
        ));
    }

    #[test]
    fn emitted_count_is_geometric() {
        // Emitted count for N detections is negative binomial with success
        // probability 3/4: mean 4N/3, variance N(1/4)/(3/4)^2.
        let p = protocol(100);
        let mean = 400.0 / 3.0;
        let sd = (100.0 * 0.25 / 0.5625f64).sqrt();
        let t = p.run_commit(StrategyKind::Honest(CommitBit::Zero)).unwrap();
        assert_eq!(t.n_detected, 100);
        assert_eq!(t.trials.iter().filter(|t| t.detected).count(), 100);
        assert!(t.trials.last().unwrap().detected);
        assert!((t.n_emitted() as f64 - mean).abs() < 3.0 * sd);
    }

    #[test]
    fn commit_end_is_ten_half_lives_after_last_detection() {
        let p = protocol(50);
        let t = p.run_commit(StrategyKind::Honest(CommitBit::One)).unwrap();
        let expected = t.last_detection_time + 10.0 * p.species().half_life;
        assert!((t.commit_end_time - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn public_view_does_not_depend_on_the_bit() {
        let p = protocol(200);
        let a: Vec<PublicTrial> = p
            .run_commit(StrategyKind::Honest(CommitBit::Zero))
            .unwrap()
            .public_view();
        let b: Vec<PublicTrial> = p
            .run_commit(StrategyKind::Honest(CommitBit::One))
            .unwrap()
            .public_view();
        assert_eq!(a, b);
    }

    #[test]
    fn left_shut_which_slit_is_right() {
        let p = protocol(1);
        let mut a = rng::stream(1, &[]);
        let mut n = rng::stream(2, &[]);
        for i in 0..20 {
            let t = p
                .run_trial(
                    i,
                    0.0,
                    SlitSetting::LeftShut,
                    StrategyKind::Honest(CommitBit::One),
                    &mut a,
                    &mut n,
                )
                .unwrap();
            assert_eq!(t.alice_record, AliceRecord::WhichSlit(Slit::Right));
        }
    }

    #[test]
    fn both_shut_leaves_no_record() {
        let p = protocol(1);
        let mut a = rng::stream(1, &[]);
        let mut n = rng::stream(2, &[]);
        let t = p
            .run_trial(
                0,
                0.0,
                SlitSetting::BothShut,
                StrategyKind::Honest(CommitBit::Zero),
                &mut a,
                &mut n,
            )
            .unwrap();
        assert!(!t.detected);
        assert!(t.alice_record.is_none());
    }

    #[test]
    fn router_is_the_minus_projector() {
        let p = protocol(1);
        let minus = dm_from_state(SlitState::minus().as_pure()).unwrap();
        assert!((p.router().prob_guess_one(&minus) - 1.0).abs() < 1e-9);
        let plus = dm_from_state(SlitState::plus().as_pure()).unwrap();
        assert!(p.router().prob_guess_one(&plus).abs() < 1e-9);
    }
}
