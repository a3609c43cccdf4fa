//! Minimum-error discrimination between two density operators.

use nalgebra::DMatrix;

use super::density::trace_norm;
use super::{Complex64, DensityMatrix, QuantumError, Result, TOL};

fn check_inputs(rho0: &DensityMatrix, p0: f64, rho1: &DensityMatrix, p1: f64) -> Result<()> {
    if !(p0 >= 0.0 && p1 >= 0.0) || (p0 + p1 - 1.0).abs() > 1e-12 {
        return Err(QuantumError::BadPriors { p0, p1 });
    }
    if rho0.dim() != rho1.dim() {
        return Err(QuantumError::DimensionMismatch(format!(
            "cannot discriminate dimensions {} and {}",
            rho0.dim(),
            rho1.dim()
        )));
    }
    Ok(())
}

fn weighted_difference(
    rho0: &DensityMatrix,
    p0: f64,
    rho1: &DensityMatrix,
    p1: f64,
) -> DMatrix<Complex64> {
    rho1.entries().scale(p1) - rho0.entries().scale(p0)
}

/// Optimal probability of naming the right hypothesis:
/// `(1 + ‖p1ρ1 − p0ρ0‖₁) / 2`.
pub fn helstrom_success(
    rho0: &DensityMatrix,
    p0: f64,
    rho1: &DensityMatrix,
    p1: f64,
) -> Result<f64> {
    check_inputs(rho0, p0, rho1, p1)?;
    let norm = trace_norm(&weighted_difference(rho0, p0, rho1, p1));
    Ok((0.5 * (1.0 + norm)).clamp(p0.max(p1), 1.0))
}

/// The two-outcome measurement attaining the Helstrom bound. Outcome "one"
/// is the projector onto the positive eigenspace of `p1ρ1 − p0ρ0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelstromMeasurement {
    guess_one: DMatrix<Complex64>,
}

impl HelstromMeasurement {
    pub fn optimal(rho0: &DensityMatrix, p0: f64, rho1: &DensityMatrix, p1: f64) -> Result<Self> {
        check_inputs(rho0, p0, rho1, p1)?;
        let gamma = weighted_difference(rho0, p0, rho1, p1);
        let gamma = (&gamma + gamma.adjoint()).unscale(2.0);
        let eig = gamma.symmetric_eigen();
        let dim = rho0.dim();
        let mut proj = DMatrix::zeros(dim, dim);
        for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > TOL.positivity {
                let v = eig.eigenvectors.column(k);
                proj += v * v.adjoint();
            }
        }
        Ok(Self { guess_one: proj })
    }

    /// Projector for the "hypothesis one" outcome.
    pub fn projector(&self) -> &DMatrix<Complex64> {
        &self.guess_one
    }

    /// Probability that a system in state `rho` yields the "one" outcome.
    pub fn prob_guess_one(&self, rho: &DensityMatrix) -> f64 {
        rho.expectation(&self.guess_one).clamp(0.0, 1.0)
    }

    /// Success probability of this measurement on the given ensemble.
    pub fn success(&self, rho0: &DensityMatrix, p0: f64, rho1: &DensityMatrix, p1: f64) -> f64 {
        p0 * (1.0 - self.prob_guess_one(rho0)) + p1 * self.prob_guess_one(rho1)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::quantum::{dm_from_state, PureState, SlitState};

    fn plus() -> DensityMatrix {
        dm_from_state(SlitState::plus().as_pure()).unwrap()
    }

    #[test]
    fn identical_states_fall_back_to_prior() {
        let rho = plus();
        assert!((helstrom_success(&rho, 0.7, &rho, 0.3).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn double_versus_single_slit_event() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let p = helstrom_success(&plus(), 1.0 / 3.0, &mixed, 2.0 / 3.0).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-9);
        let m = HelstromMeasurement::optimal(&plus(), 1.0 / 3.0, &mixed, 2.0 / 3.0).unwrap();
        assert!((m.success(&plus(), 1.0 / 3.0, &mixed, 2.0 / 3.0) - p).abs() < 1e-12);
        // The optimal "single-slit" outcome is the |−> projector.
        let minus = dm_from_state(SlitState::minus().as_pure()).unwrap();
        assert!((m.prob_guess_one(&minus) - 1.0).abs() < 1e-12);
        assert!(m.prob_guess_one(&plus()).abs() < 1e-12);
    }

    #[test]
    fn two_pure_states_match_overlap_formula() {
        let left = dm_from_state(&PureState::basis(2, 0).unwrap()).unwrap();
        let p = helstrom_success(&plus(), 0.5, &left, 0.5).unwrap();
        let overlap_sq = FRAC_1_SQRT_2 * FRAC_1_SQRT_2;
        let expect = 0.5 * (1.0 + (1.0 - overlap_sq).sqrt());
        assert!((p - expect).abs() < 1e-12);
        assert!((p - 0.85355).abs() < 1e-5);
    }

    #[test]
    fn bad_priors() {
        let rho = plus();
        assert!(matches!(
            helstrom_success(&rho, 0.6, &rho, 0.6),
            Err(QuantumError::BadPriors { .. })
        ));
        assert!(helstrom_success(&rho, -0.1, &rho, 1.1).is_err());
    }
}
