//! Exponential decay of the particles Bob emits, and the rule that closes the
//! commit phase a fixed number of half-lives after the last detection.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecayError {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("half-life must be positive, got {0}")]
    BadHalfLife(f64),
    #[error("deadline multiplier must be >= 1, got {0}")]
    BadMultiplier(f64),
    #[error("unknown particle {0:?}; use neutron, muon, or custom with a half-life")]
    UnknownSpecies(String),
}

pub type Result<T> = std::result::Result<T, DecayError>;

pub const NEUTRON_HALF_LIFE: f64 = 608.9;
pub const MUON_HALF_LIFE: f64 = 1.523e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSpecies {
    pub name: String,
    /// Seconds.
    pub half_life: f64,
}

impl ParticleSpecies {
    pub fn new(name: impl Into<String>, half_life: f64) -> Result<Self> {
        if !(half_life.is_finite() && half_life > 0.0) {
            return Err(DecayError::BadHalfLife(half_life));
        }
        Ok(Self {
            name: name.into(),
            half_life,
        })
    }

    pub fn neutron() -> Self {
        Self::new("neutron", NEUTRON_HALF_LIFE).expect("positive")
    }

    pub fn muon() -> Self {
        Self::new("muon", MUON_HALF_LIFE).expect("positive")
    }

    /// Looks up a built-in species; `custom` requires an explicit half-life.
    pub fn by_name(name: &str, half_life: Option<f64>) -> Result<Self> {
        match (name, half_life) {
            ("neutron", None) => Ok(Self::neutron()),
            ("muon", None) => Ok(Self::muon()),
            ("neutron" | "muon", Some(h)) | ("custom", Some(h)) => Self::new(name, h),
            _ => Err(DecayError::UnknownSpecies(name.to_string())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.name.clone(), self.half_life).map(|_| ())
    }

    /// `ln 2 / τ½`.
    pub fn decay_rate(&self) -> f64 {
        std::f64::consts::LN_2 / self.half_life
    }

    /// Mean lifetime `τ½ / ln 2`.
    pub fn mean_lifetime(&self) -> f64 {
        self.half_life / std::f64::consts::LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeadlinePolicy {
    /// Half-lives to wait after the last detection.
    pub multiplier: f64,
}

impl Default for DeadlinePolicy {
    fn default() -> Self {
        Self { multiplier: 10.0 }
    }
}

impl DeadlinePolicy {
    pub fn new(multiplier: f64) -> Result<Self> {
        if !(multiplier.is_finite() && multiplier >= 1.0) {
            return Err(DecayError::BadMultiplier(multiplier));
        }
        Ok(Self { multiplier })
    }
}

/// `2^(−t/τ½)`.
pub fn survival_prob(species: &ParticleSpecies, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(DecayError::NegativeTime(t));
    }
    Ok((-t / species.half_life).exp2())
}

/// Inverse transform of a uniform variate `u ∈ (0, 1]`: `t = −τ½·log₂(u)`,
/// so `u = 1/2` gives exactly one half-life.
pub fn decay_time_from_uniform(species: &ParticleSpecies, u: f64) -> f64 {
    -species.half_life * u.log2()
}

pub fn sample_decay_time<R: Rng + ?Sized>(species: &ParticleSpecies, rng: &mut R) -> f64 {
    // random() is in [0, 1); flip it onto (0, 1].
    decay_time_from_uniform(species, 1.0 - rng.random::<f64>())
}

/// End of the commit phase: `last_detection + k·τ½`.
pub fn commit_deadline(
    last_detection: f64,
    species: &ParticleSpecies,
    policy: DeadlinePolicy,
) -> f64 {
    last_detection + policy.multiplier * species.half_life
}
