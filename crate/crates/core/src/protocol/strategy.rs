//! Alice's behaviour: the honest commitment for either bit and the cheating
//! strategies that try to unveil a bit other than the one their
//! measurements fixed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::types::{
    AliceRecord, AliceTrial, CommitBit, Disclosed, Disclosure, EventClass, UnveilMessage,
};
use super::{Protocol, ProtocolError};
use crate::decay::sample_decay_time;
use crate::quantum::{dm_from_state, Slit, SlitState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Position measurements for 0, which-slit measurements for 1.
    Honest(CommitBit),
    /// Commits to 1, then forges screen positions to unveil 0.
    ForgePositionsFromWhichSlit,
    /// Commits to 0, then derives slit labels from positions to unveil 1.
    GuessWhichSlitFromPositions,
    /// Keeps every particle unmeasured until the unveil, then measures the
    /// survivors for the target bit.
    StoreAndDelay(CommitBit),
    /// Sorts detections into double- and single-slit events with the
    /// minimum-error measurement, then fabricates data for the target bit.
    HelstromRouter(CommitBit),
}

impl StrategyKind {
    pub const NAMES: [&'static str; 5] = [
        "honest",
        "forge-positions",
        "guess-which-slit",
        "store-and-delay",
        "helstrom-router",
    ];

    /// Parses a strategy name. `bit` is the committed bit for `honest` and
    /// the unveil target for the delayed strategies; the two forging
    /// strategies have a fixed direction and ignore it.
    pub fn from_name(name: &str, bit: CommitBit) -> Option<Self> {
        Some(match name {
            "honest" => StrategyKind::Honest(bit),
            "forge-positions" => StrategyKind::ForgePositionsFromWhichSlit,
            "guess-which-slit" => StrategyKind::GuessWhichSlitFromPositions,
            "store-and-delay" => StrategyKind::StoreAndDelay(bit),
            "helstrom-router" => StrategyKind::HelstromRouter(bit),
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Honest(_) => "honest",
            StrategyKind::ForgePositionsFromWhichSlit => "forge-positions",
            StrategyKind::GuessWhichSlitFromPositions => "guess-which-slit",
            StrategyKind::StoreAndDelay(_) => "store-and-delay",
            StrategyKind::HelstromRouter(_) => "helstrom-router",
        }
    }

    /// Name with the bit direction, e.g. `store-and-delay->0`.
    pub fn label(&self) -> String {
        match self {
            StrategyKind::Honest(b) => format!("honest-{b}"),
            StrategyKind::ForgePositionsFromWhichSlit => "forge-positions-1->0".into(),
            StrategyKind::GuessWhichSlitFromPositions => "guess-which-slit-0->1".into(),
            StrategyKind::StoreAndDelay(b) => format!("store-and-delay->{b}"),
            StrategyKind::HelstromRouter(b) => format!("helstrom-router->{b}"),
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, StrategyKind::Honest(_))
    }

    pub fn unveil_bit(&self) -> CommitBit {
        match *self {
            StrategyKind::Honest(b)
            | StrategyKind::StoreAndDelay(b)
            | StrategyKind::HelstromRouter(b) => b,
            StrategyKind::ForgePositionsFromWhichSlit => CommitBit::Zero,
            StrategyKind::GuessWhichSlitFromPositions => CommitBit::One,
        }
    }

    /// Every cheating strategy in both directions that it supports.
    pub fn cheaters() -> Vec<StrategyKind> {
        vec![
            StrategyKind::ForgePositionsFromWhichSlit,
            StrategyKind::GuessWhichSlitFromPositions,
            StrategyKind::StoreAndDelay(CommitBit::Zero),
            StrategyKind::StoreAndDelay(CommitBit::One),
            StrategyKind::HelstromRouter(CommitBit::Zero),
            StrategyKind::HelstromRouter(CommitBit::One),
        ]
    }
}

impl Protocol {
    fn measure_position<R: Rng + ?Sized>(
        &self,
        state: &SlitState,
        rng: &mut R,
    ) -> Result<f64, ProtocolError> {
        let pdf = self.screen().pdf_for(state).ok_or_else(|| {
            ProtocolError::StrategyFailure("no screen pattern for this slit state".into())
        })?;
        Ok(pdf.sample(rng))
    }

    /// Alice's commit-phase action on a detected particle.
    pub(crate) fn commit_action<R: Rng + ?Sized>(
        &self,
        state: &SlitState,
        strategy: StrategyKind,
        alice: &mut R,
        nature: &mut R,
    ) -> Result<AliceRecord, ProtocolError> {
        Ok(match strategy {
            StrategyKind::Honest(CommitBit::Zero) | StrategyKind::GuessWhichSlitFromPositions => {
                AliceRecord::Position(self.measure_position(state, alice)?)
            }
            StrategyKind::Honest(CommitBit::One) | StrategyKind::ForgePositionsFromWhichSlit => {
                AliceRecord::WhichSlit(state.measure_which_slit(alice.random()))
            }
            StrategyKind::StoreAndDelay(_) => AliceRecord::Held {
                lifetime: sample_decay_time(self.species(), nature),
                particle: Some(state.clone()),
            },
            StrategyKind::HelstromRouter(_) => {
                let p_single = self
                    .router()
                    .prob_guess_one(&dm_from_state(state.as_pure())?);
                if alice.random::<f64>() < p_single {
                    AliceRecord::Routed(EventClass::SingleSlit)
                } else {
                    AliceRecord::Routed(EventClass::DoubleSlit)
                }
            }
        })
    }

    /// Measures a stored particle at `time`, failing if it has decayed.
    fn measure_stored<R: Rng + ?Sized>(
        &self,
        trial: &AliceTrial,
        time: f64,
        bit: CommitBit,
        rng: &mut R,
    ) -> Result<Disclosed, ProtocolError> {
        let AliceRecord::Held { lifetime, particle } = &trial.record else {
            return Err(ProtocolError::StrategyFailure(format!(
                "trial {} holds no particle",
                trial.index
            )));
        };
        let state = particle.as_ref().ok_or_else(|| {
            ProtocolError::StrategyFailure(format!("trial {}: particle not in memory", trial.index))
        })?;
        if *lifetime <= time - trial.announce_time {
            return Err(ProtocolError::StrategyFailure(format!(
                "trial {}: particle decayed",
                trial.index
            )));
        }
        Ok(match bit {
            CommitBit::Zero => Disclosed::Position(self.measure_position(state, rng)?),
            CommitBit::One => Disclosed::Slit(state.measure_which_slit(rng.random())),
        })
    }

    /// A screen position drawn from the detection-weighted mix of patterns:
    /// one third fringed, two thirds envelope.
    fn blind_position<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < 1.0 / 3.0 {
            self.screen().doubleslit().sample(rng)
        } else {
            self.screen().envelope().sample(rng)
        }
    }

    fn random_slit<R: Rng + ?Sized>(rng: &mut R) -> Slit {
        if rng.random::<bool>() {
            Slit::Left
        } else {
            Slit::Right
        }
    }

    /// Builds Alice's unveil message from her private records.
    pub fn unveil<R: Rng + ?Sized>(
        &self,
        alice: &[AliceTrial],
        strategy: StrategyKind,
        unveil_time: f64,
        rng: &mut R,
    ) -> Result<UnveilMessage, ProtocolError> {
        self.unveil_with_stats(alice, strategy, unveil_time, rng)
            .map(|(m, _)| m)
    }

    /// As [`Protocol::unveil`], also reporting how many disclosures came from
    /// a real measurement and how many were fabricated.
    pub fn unveil_with_stats<R: Rng + ?Sized>(
        &self,
        alice: &[AliceTrial],
        strategy: StrategyKind,
        unveil_time: f64,
        rng: &mut R,
    ) -> Result<(UnveilMessage, UnveilStats), ProtocolError> {
        let bit = strategy.unveil_bit();
        let mut stats = UnveilStats::default();
        let mut records = Vec::new();
        for t in alice.iter().filter(|t| t.detected) {
            let missing = || ProtocolError::MissingRecords { index: t.index };
            let value = match (strategy, &t.record) {
                (_, AliceRecord::None) => return Err(missing()),
                (StrategyKind::Honest(CommitBit::Zero), AliceRecord::Position(x)) => {
                    Disclosed::Position(*x)
                }
                (StrategyKind::Honest(CommitBit::One), AliceRecord::WhichSlit(s)) => {
                    Disclosed::Slit(*s)
                }
                (StrategyKind::Honest(_), _) => return Err(missing()),
                (StrategyKind::ForgePositionsFromWhichSlit, AliceRecord::WhichSlit(_)) => {
                    // A which-slit outcome means a one-slit pattern.
                    stats.fabricated += 1;
                    Disclosed::Position(self.screen().envelope().sample(rng))
                }
                (StrategyKind::GuessWhichSlitFromPositions, AliceRecord::Position(x)) => {
                    stats.fabricated += 1;
                    Disclosed::Slit(if *x >= 0.0 { Slit::Right } else { Slit::Left })
                }
                (StrategyKind::StoreAndDelay(_), AliceRecord::Held { .. }) => {
                    match self.measure_stored(t, unveil_time, bit, rng) {
                        Ok(v) => {
                            stats.measured += 1;
                            v
                        }
                        Err(ProtocolError::StrategyFailure(_)) => {
                            stats.fabricated += 1;
                            match bit {
                                CommitBit::Zero => Disclosed::Position(self.blind_position(rng)),
                                CommitBit::One => Disclosed::Slit(Self::random_slit(rng)),
                            }
                        }
                        Err(e) => return Err(e),
                    }
                }
                (StrategyKind::HelstromRouter(_), AliceRecord::Routed(class)) => {
                    stats.fabricated += 1;
                    match (bit, class) {
                        (CommitBit::Zero, EventClass::DoubleSlit) => {
                            Disclosed::Position(self.screen().doubleslit().sample(rng))
                        }
                        (CommitBit::Zero, EventClass::SingleSlit) => {
                            Disclosed::Position(self.screen().envelope().sample(rng))
                        }
                        (CommitBit::One, _) => Disclosed::Slit(Self::random_slit(rng)),
                    }
                }
                _ => return Err(missing()),
            };
            if matches!(strategy, StrategyKind::Honest(_)) {
                stats.measured += 1;
            }
            records.push(Disclosure {
                index: t.index,
                value,
            });
        }
        Ok((UnveilMessage { bit, records }, stats))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UnveilStats {
    /// Disclosures backed by an actual measurement.
    pub measured: usize,
    pub fabricated: usize,
}
