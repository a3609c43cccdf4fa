//! Bob's check of an unveiled commitment against his private settings.
//!
//! For `b = 0` the positions of double-slit events must fit the fringed
//! pattern, the positions of single-slit events must fit the envelope, and
//! the single-slit positions must not fit the fringed pattern. For `b = 1`
//! the slit labels of single-slit events must be (almost) always right, and
//! the labels of double-slit events must look like fair coin flips.
//!
//! The position tests bin by fringe phase: equal-width bins half a fringe
//! wide carry the same mass under both patterns and cannot tell them apart.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::types::{BobTrial, CommitBit, Disclosed, SlitSetting, UnveilMessage};
use super::ProtocolError;
use crate::optics::ScreenModel;
use crate::quantum::Slit;
use crate::stats::{GofReference, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Family-wise significance of the pattern-fit tests for `b = 0`.
    pub alpha: f64,
    /// Largest tolerated which-slit error rate on single-slit events.
    pub epsilon: f64,
    /// Statistical tests on fewer events pass with a warning.
    pub min_events: usize,
    /// Fringe-phase cells used by the position tests.
    pub phase_bins: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            epsilon: 0.02,
            min_events: 30,
            phase_bins: 2,
        }
    }
}

/// Number of pattern-fit tests sharing `alpha`.
const FIT_TESTS: f64 = 2.0;

impl Thresholds {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ProtocolError::ConfigInvalid(format!(
                "alpha must be in (0,1), got {}",
                self.alpha
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 0.5) {
            return Err(ProtocolError::ConfigInvalid(format!(
                "epsilon must be in [0, 1/2), got {}",
                self.epsilon
            )));
        }
        if self.phase_bins < 2 {
            return Err(ProtocolError::ConfigInvalid(
                "need at least two phase bins".into(),
            ));
        }
        Ok(())
    }

    /// Level of each pattern-fit test (Bonferroni share of `alpha`).
    pub fn fit_alpha(&self) -> f64 {
        self.alpha / FIT_TESTS
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub name: String,
    pub n_events: usize,
    /// Chi-square value, error rate, or z-score depending on the test.
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub bit: CommitBit,
    pub accepted: bool,
    pub tests: Vec<TestOutcome>,
}

impl VerificationReport {
    pub fn test(&self, name: &str) -> Option<&TestOutcome> {
        self.tests.iter().find(|t| t.name == name)
    }
}

pub mod test_names {
    pub const FRINGE_FIT: &str = "fringe_fit";
    pub const ENVELOPE_FIT: &str = "envelope_fit";
    pub const ANTI_FRINGE: &str = "anti_fringe";
    pub const WHICH_SLIT_ACCURACY: &str = "which_slit_accuracy";
    pub const DOUBLE_SLIT_BALANCE: &str = "double_slit_balance";
}

/// Bob's verification procedure with its reference bin masses precomputed.
#[derive(Debug, Clone)]
pub struct Verifier {
    thresholds: Thresholds,
    doubleslit: GofReference,
    envelope: GofReference,
    lower: f64,
    upper: f64,
}

impl Verifier {
    pub fn new(screen: &ScreenModel, thresholds: Thresholds) -> Result<Self, ProtocolError> {
        thresholds.validate()?;
        let ds = screen.doubleslit();
        let partition = Partition::fringe_phase(
            ds.lower(),
            ds.upper(),
            screen.geometry().fringe_period(),
            thresholds.phase_bins,
        )?;
        Ok(Self {
            thresholds,
            doubleslit: GofReference::new(ds, partition.clone()),
            envelope: GofReference::new(screen.envelope(), partition),
            lower: ds.lower(),
            upper: ds.upper(),
        })
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    fn too_few(&self, name: &str, n: usize, threshold: f64) -> TestOutcome {
        TestOutcome {
            name: name.into(),
            n_events: n,
            statistic: 0.0,
            p_value: None,
            threshold,
            passed: true,
            warning: Some(format!(
                "only {n} events (< {}); test skipped",
                self.thresholds.min_events
            )),
        }
    }

    /// `expect_fit`: pass iff `p >= threshold`; otherwise pass iff `p < threshold`.
    fn fit_test(
        &self,
        name: &str,
        samples: &[f64],
        reference: &GofReference,
        threshold: f64,
        expect_fit: bool,
    ) -> Result<TestOutcome, ProtocolError> {
        if samples.len() < self.thresholds.min_events {
            return Ok(self.too_few(name, samples.len(), threshold));
        }
        let g = reference.test(samples)?;
        Ok(TestOutcome {
            name: name.into(),
            n_events: samples.len(),
            statistic: g.statistic,
            p_value: Some(g.p_value),
            threshold,
            passed: if expect_fit {
                g.p_value >= threshold
            } else {
                g.p_value < threshold
            },
            warning: None,
        })
    }

    pub fn verify(
        &self,
        bob: &[BobTrial],
        msg: &UnveilMessage,
    ) -> Result<VerificationReport, ProtocolError> {
        let detected: Vec<&BobTrial> = bob.iter().filter(|t| t.detected).collect();
        if detected.len() != msg.records.len() {
            return Err(ProtocolError::MalformedUnveil(format!(
                "{} detections but {} disclosed records",
                detected.len(),
                msg.records.len()
            )));
        }
        let mut seen = HashSet::new();
        let mut double = Vec::new();
        let mut single = Vec::new();
        for (trial, rec) in detected.iter().zip(&msg.records) {
            if rec.index != trial.index || !seen.insert(rec.index) {
                return Err(ProtocolError::MalformedUnveil(format!(
                    "record for trial {} where trial {} was expected",
                    rec.index, trial.index
                )));
            }
            match (msg.bit, rec.value) {
                (CommitBit::Zero, Disclosed::Position(x)) => {
                    if !(x.is_finite() && x >= self.lower && x <= self.upper) {
                        return Err(ProtocolError::MalformedUnveil(format!(
                            "trial {}: position {x} outside the screen",
                            rec.index
                        )));
                    }
                }
                (CommitBit::One, Disclosed::Slit(_)) => {}
                (bit, value) => {
                    return Err(ProtocolError::MalformedUnveil(format!(
                        "trial {}: {value:?} disclosed for bit {bit}",
                        rec.index
                    )))
                }
            }
            match trial.setting {
                SlitSetting::BothOpen => double.push((trial.setting, rec.value)),
                SlitSetting::LeftShut | SlitSetting::RightShut => {
                    single.push((trial.setting, rec.value))
                }
                SlitSetting::BothShut => {
                    return Err(ProtocolError::MalformedUnveil(format!(
                        "trial {} is marked detected behind two shut slits",
                        trial.index
                    )))
                }
            }
        }

        let tests = match msg.bit {
            CommitBit::Zero => self.position_tests(&double, &single)?,
            CommitBit::One => self.slit_tests(&double, &single),
        };
        Ok(VerificationReport {
            bit: msg.bit,
            accepted: tests.iter().all(|t| t.passed),
            tests,
        })
    }

    fn position_tests(
        &self,
        double: &[(SlitSetting, Disclosed)],
        single: &[(SlitSetting, Disclosed)],
    ) -> Result<Vec<TestOutcome>, ProtocolError> {
        let positions = |v: &[(SlitSetting, Disclosed)]| -> Vec<f64> {
            v.iter()
                .filter_map(|(_, d)| match d {
                    Disclosed::Position(x) => Some(*x),
                    Disclosed::Slit(_) => None,
                })
                .collect()
        };
        let (xd, xs) = (positions(double), positions(single));
        let fit = self.thresholds.fit_alpha();
        Ok(vec![
            self.fit_test(test_names::FRINGE_FIT, &xd, &self.doubleslit, fit, true)?,
            self.fit_test(test_names::ENVELOPE_FIT, &xs, &self.envelope, fit, true)?,
            self.fit_test(
                test_names::ANTI_FRINGE,
                &xs,
                &self.doubleslit,
                self.thresholds.alpha,
                false,
            )?,
        ])
    }

    fn slit_tests(
        &self,
        double: &[(SlitSetting, Disclosed)],
        single: &[(SlitSetting, Disclosed)],
    ) -> Vec<TestOutcome> {
        let eps = self.thresholds.epsilon;
        let errors = single
            .iter()
            .filter(|(s, d)| match d {
                Disclosed::Slit(label) => Some(*label) != s.open_slit(),
                Disclosed::Position(_) => true,
            })
            .count();
        let m = single.len();
        let rate = if m == 0 {
            0.0
        } else {
            errors as f64 / m as f64
        };
        let accuracy = TestOutcome {
            name: test_names::WHICH_SLIT_ACCURACY.into(),
            n_events: m,
            statistic: rate,
            p_value: None,
            threshold: eps,
            passed: rate <= eps,
            warning: (m == 0).then(|| "no single-slit events".to_string()),
        };

        let n = double.len();
        let balance = if n < self.thresholds.min_events {
            self.too_few(test_names::DOUBLE_SLIT_BALANCE, n, 3.0)
        } else {
            let lefts = double
                .iter()
                .filter(|(_, d)| *d == Disclosed::Slit(Slit::Left))
                .count();
            let z = (lefts as f64 - 0.5 * n as f64) / (0.25 * n as f64).sqrt();
            TestOutcome {
                name: test_names::DOUBLE_SLIT_BALANCE.into(),
                n_events: n,
                statistic: z,
                p_value: None,
                threshold: 3.0,
                passed: z.abs() <= 3.0,
                warning: None,
            }
        };
        vec![accuracy, balance]
    }
}
