use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::quantum::{Slit, SlitState};

/// Bob's slit configuration for one emitted particle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlitSetting {
    BothOpen,
    LeftShut,
    RightShut,
    BothShut,
}

impl SlitSetting {
    pub const ALL: [SlitSetting; 4] = [
        SlitSetting::BothOpen,
        SlitSetting::LeftShut,
        SlitSetting::RightShut,
        SlitSetting::BothShut,
    ];

    /// The particle reaches the screen unless both slits are shut.
    pub fn passes(self) -> bool {
        self != SlitSetting::BothShut
    }

    pub fn is_single_slit(self) -> bool {
        matches!(self, SlitSetting::LeftShut | SlitSetting::RightShut)
    }

    /// The only open slit, for single-slit settings.
    pub fn open_slit(self) -> Option<Slit> {
        match self {
            SlitSetting::LeftShut => Some(Slit::Right),
            SlitSetting::RightShut => Some(Slit::Left),
            _ => None,
        }
    }

    /// Transverse state of a particle that made it through.
    pub fn slit_state(self) -> Option<SlitState> {
        match self {
            SlitSetting::BothOpen => Some(SlitState::plus()),
            SlitSetting::BothShut => None,
            single => single.open_slit().map(SlitState::through),
        }
    }
}

/// Uniform draw over the four settings.
pub fn draw_setting<R: Rng + ?Sized>(rng: &mut R) -> SlitSetting {
    SlitSetting::ALL[rng.random_range(0..4)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum CommitBit {
    Zero,
    One,
}

impl CommitBit {
    pub fn flipped(self) -> Self {
        match self {
            CommitBit::Zero => CommitBit::One,
            CommitBit::One => CommitBit::Zero,
        }
    }
}

impl From<CommitBit> for u8 {
    fn from(b: CommitBit) -> u8 {
        match b {
            CommitBit::Zero => 0,
            CommitBit::One => 1,
        }
    }
}

impl TryFrom<u8> for CommitBit {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(CommitBit::Zero),
            1 => Ok(CommitBit::One),
            other => Err(format!("commit bit must be 0 or 1, got {other}")),
        }
    }
}

impl std::fmt::Display for CommitBit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", u8::from(*self))
    }
}

/// Alice's guess of the setting behind a detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventClass {
    DoubleSlit,
    SingleSlit,
}

/// What Alice holds for one trial at the end of the commit phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceRecord {
    None,
    Position(f64),
    WhichSlit(Slit),
    /// Outcome of a minimum-error double/single discrimination.
    Routed(EventClass),
    /// An unmeasured particle kept in storage. `lifetime` counts from the
    /// detection announcement; the particle itself never leaves memory.
    Held {
        lifetime: f64,
        #[serde(skip)]
        particle: Option<SlitState>,
    },
}

impl AliceRecord {
    pub fn is_none(&self) -> bool {
        matches!(self, AliceRecord::None)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub emit_time: f64,
    pub setting: SlitSetting,
    pub detected: bool,
    pub alice_record: AliceRecord,
    pub announce_time: f64,
}

/// Public channel: only whether and when a detection was announced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PublicTrial {
    pub index: u64,
    pub detected: bool,
    pub announce_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BobTrial {
    pub index: u64,
    pub emit_time: f64,
    pub setting: SlitSetting,
    pub detected: bool,
    pub announce_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliceTrial {
    pub index: u64,
    pub detected: bool,
    pub announce_time: f64,
    pub record: AliceRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub trials: Vec<TrialRecord>,
    pub n_detected: usize,
    pub last_detection_time: f64,
    pub commit_end_time: f64,
}

impl Transcript {
    pub fn n_emitted(&self) -> usize {
        self.trials.len()
    }

    pub fn public_view(&self) -> Vec<PublicTrial> {
        self.trials
            .iter()
            .map(|t| PublicTrial {
                index: t.index,
                detected: t.detected,
                announce_time: t.announce_time,
            })
            .collect()
    }

    pub fn bob_view(&self) -> Vec<BobTrial> {
        self.trials
            .iter()
            .map(|t| BobTrial {
                index: t.index,
                emit_time: t.emit_time,
                setting: t.setting,
                detected: t.detected,
                announce_time: t.announce_time,
            })
            .collect()
    }

    pub fn alice_view(&self) -> Vec<AliceTrial> {
        self.trials
            .iter()
            .map(|t| AliceTrial {
                index: t.index,
                detected: t.detected,
                announce_time: t.announce_time,
                record: t.alice_record.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disclosed {
    Position(f64),
    Slit(Slit),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disclosure {
    pub index: u64,
    pub value: Disclosed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnveilMessage {
    pub bit: CommitBit,
    pub records: Vec<Disclosure>,
}
