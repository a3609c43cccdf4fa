use nalgebra::DMatrix;

use super::{Complex64, PureState, QuantumError, Result, MAX_DIM, TOL};

/// Which factor of a bipartite space `A ⊗ B` to keep after tracing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A validated density operator: Hermitian, unit trace, positive
/// semidefinite, all within the shared tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = entries.shape();
        if r != c || r == 0 {
            return Err(QuantumError::DimensionMismatch(format!(
                "density matrix must be square, got {r}x{c}"
            )));
        }
        if r > MAX_DIM {
            return Err(QuantumError::DimensionTooLarge(r));
        }
        let herm_err = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_err > TOL.structure {
            return Err(QuantumError::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm_err:e})"
            )));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > TOL.structure || tr.im.abs() > TOL.structure {
            return Err(QuantumError::InvalidDensityMatrix(format!(
                "trace {tr} is not 1"
            )));
        }
        let rho = Self { entries };
        let min_eig = rho.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -TOL.positivity {
            return Err(QuantumError::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(rho)
    }

    pub fn from_real(rows: usize, data: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_row_iterator(
            rows,
            rows,
            data.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    /// Maximally mixed state `I/dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim).unscale(dim as f64))
    }

    /// Convex combination `Σ w_i ρ_i`; weights must sum to one.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| QuantumError::DimensionMismatch("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut acc = DMatrix::zeros(dim, dim);
        for (w, rho) in parts {
            if rho.dim() != dim {
                return Err(QuantumError::DimensionMismatch(
                    "mixture of unequal dimensions".into(),
                ));
            }
            acc += rho.entries.scale(*w);
        }
        Self::new(acc)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `Tr(ρ M)` for a Hermitian observable or projector `M`.
    pub fn expectation(&self, observable: &DMatrix<Complex64>) -> f64 {
        (&self.entries * observable).trace().re
    }
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()).unscale(2.0);
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Trace norm `‖M‖₁ = Σ|λ_i|` of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// `|ψ><ψ|` for a normalized state.
pub fn dm_from_state(psi: &PureState) -> Result<DensityMatrix> {
    psi.require_normalized()?;
    // Renormalize the residual so the trace check sees exactly one.
    let n2 = psi.norm() * psi.norm();
    DensityMatrix::new(psi.outer().unscale(n2))
}

/// Reduces `rho` on `A ⊗ B` to the kept subsystem.
pub fn partial_trace(
    rho: &DensityMatrix,
    dims: [usize; 2],
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let [da, db] = dims;
    if da == 0 || db == 0 || da * db != rho.dim() {
        return Err(QuantumError::DimensionMismatch(format!(
            "dims {da}x{db} do not factor a {}-dimensional matrix",
            rho.dim()
        )));
    }
    let m = rho.entries();
    let out = match keep {
        Subsystem::B => DMatrix::from_fn(db, db, |b, bp| {
            (0..da).map(|a| m[(a * db + b, a * db + bp)]).sum()
        }),
        Subsystem::A => DMatrix::from_fn(da, da, |a, ap| {
            (0..db).map(|b| m[(a * db + b, ap * db + b)]).sum()
        }),
    };
    DensityMatrix::new(out)
}

/// `(1/2)‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(QuantumError::DimensionMismatch(format!(
            "trace distance between dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let d = 0.5 * trace_norm(&(rho.entries() - sigma.entries()));
    Ok(d.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> PureState {
        PureState::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2], vec![2, 2]).unwrap()
    }

    #[test]
    fn projector_of_basis_state() {
        let rho = dm_from_state(&PureState::basis(2, 0).unwrap()).unwrap();
        assert_eq!(rho.get(0, 0), c(1.0));
        assert_eq!(rho.get(1, 1), c(0.0));
        assert_eq!(rho.get(0, 1), c(0.0));
    }

    #[test]
    fn projector_of_plus_has_all_halves() {
        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![2]).unwrap();
        let rho = dm_from_state(&plus).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.get(i, j) - c(0.5)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn unnormalized_state_rejected() {
        let s = PureState::from_real(&[1.0, 1.0], vec![2]).unwrap();
        assert!(matches!(
            dm_from_state(&s),
            Err(QuantumError::NotNormalized { .. })
        ));
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let rho = dm_from_state(&bell()).unwrap();
        let b = partial_trace(&rho, [2, 2], Subsystem::B).unwrap();
        assert!(b.max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-15);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let zero = PureState::basis(2, 0).unwrap();
        let plus = PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![2]).unwrap();
        let rho = dm_from_state(&zero.tensor(&plus).unwrap()).unwrap();
        let b = partial_trace(&rho, [2, 2], Subsystem::B).unwrap();
        assert!(b.max_abs_diff(&dm_from_state(&plus).unwrap()) < 1e-15);
    }

    #[test]
    fn schmidt_form_reduces_to_diagonal() {
        let psi = PureState::from_real(
            &[(1.0f64 / 3.0).sqrt(), 0.0, 0.0, (2.0f64 / 3.0).sqrt()],
            vec![2, 2],
        )
        .unwrap();
        let b = partial_trace(&dm_from_state(&psi).unwrap(), [2, 2], Subsystem::B).unwrap();
        let expect = DensityMatrix::from_real(2, &[1.0 / 3.0, 0.0, 0.0, 2.0 / 3.0]).unwrap();
        assert!(b.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let rho = dm_from_state(&bell()).unwrap();
        assert!(matches!(
            partial_trace(&rho, [3, 2], Subsystem::B),
            Err(QuantumError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let zero = dm_from_state(&PureState::basis(2, 0).unwrap()).unwrap();
        let one = dm_from_state(&PureState::basis(2, 1).unwrap()).unwrap();
        let plus =
            dm_from_state(&PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![2]).unwrap())
                .unwrap();
        assert!(trace_distance(&zero, &zero).unwrap().abs() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        // Difference [[1/2,-1/2],[-1/2,-1/2]] has eigenvalues ±1/√2.
        assert!(
            (trace_distance(&zero, &plus).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12
        );
        assert!((trace_distance(&zero, &plus).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2).unwrap();
        let b = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(trace_distance(&a, &b).is_err());
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(DensityMatrix::from_real(2, &[0.5, 0.0, 0.0, 0.6]).is_err());
        assert!(DensityMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]).is_err());
        assert!(DensityMatrix::from_real(2, &[0.5, 0.1, 0.2, 0.5]).is_err());
        assert!(DensityMatrix::maximally_mixed(17).is_err());
    }
}
