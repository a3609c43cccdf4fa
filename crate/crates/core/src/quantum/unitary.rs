//! Construction of the local unitary relating two purifications with equal
//! reduced states on the second factor.

use nalgebra::{DMatrix, DVector};

use super::{
    dm_from_state, partial_trace, trace_distance, Complex64, PureState, QuantumError, Result,
    Subsystem, TOL,
};

/// A unitary acting on the first factor of `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    matrix: DMatrix<Complex64>,
    dims: [usize; 2],
}

impl LocalUnitary {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    /// `(U ⊗ I)|ψ>`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dims[0] * self.dims[1] {
            return Err(QuantumError::DimensionMismatch(format!(
                "unitary on {:?} applied to state with dims {:?}",
                self.dims,
                psi.dims()
            )));
        }
        let m = coefficient_matrix(psi, self.dims);
        Ok(from_coefficients(&(&self.matrix * m), self.dims))
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Reshapes `ψ` on `A ⊗ B` to the `dA × dB` matrix `M[a, b] = ψ[a·dB + b]`.
fn coefficient_matrix(psi: &PureState, [da, db]: [usize; 2]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(da, db, psi.amplitudes())
}

fn from_coefficients(m: &DMatrix<Complex64>, dims: [usize; 2]) -> PureState {
    let [da, db] = dims;
    let v = DVector::from_fn(da * db, |i, _| m[(i / db, i % db)]);
    PureState::from_vector(v, dims.to_vec())
}

/// Orthonormalizes `vectors` in order, dropping numerically dependent ones.
fn gram_schmidt(
    vectors: impl IntoIterator<Item = DVector<Complex64>>,
    basis: &mut Vec<DVector<Complex64>>,
) {
    for mut v in vectors {
        for _ in 0..2 {
            for q in basis.iter() {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        if n > 1e-6 {
            basis.push(v.unscale(n));
        }
    }
}

/// Extends an orthonormal set to a full basis of `C^dim`, always adding the
/// standard basis vector with the largest residual.
fn complete_basis(basis: &mut Vec<DVector<Complex64>>, dim: usize) {
    while basis.len() < dim {
        let best = (0..dim)
            .map(|j| {
                let mut e = DVector::<Complex64>::zeros(dim);
                e[j] = Complex64::new(1.0, 0.0);
                for q in basis.iter() {
                    let proj = q.dotc(&e);
                    e -= q * proj;
                }
                e
            })
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("dim > 0");
        let before = basis.len();
        gram_schmidt([best], basis);
        assert!(basis.len() > before, "basis completion stalled");
    }
}

/// Finds `U_A` with `(U_A ⊗ I)|ψ0> = |ψ1>` whenever the two states have the
/// same reduced state on B.
///
/// With `M0 = U Σ V†`, equal reduced states imply `M1†M1 = M0†M0`, so the
/// columns `M1 v_k / σ_k` are orthonormal and `U_A` maps `u_k` onto them.
/// Using ψ0's right singular vectors for both states makes degenerate Schmidt
/// coefficients harmless. Directions with zero Schmidt weight are paired by
/// completing both sets to bases.
///
/// The global phase is fixed so the largest-magnitude amplitude of
/// `(U_A ⊗ I)|ψ0>` has the same argument as the matching amplitude of ψ1.
pub fn find_local_unitary(
    psi0: &PureState,
    psi1: &PureState,
    dims: [usize; 2],
) -> Result<LocalUnitary> {
    let [da, db] = dims;
    for psi in [psi0, psi1] {
        if psi.dim() != da * db {
            return Err(QuantumError::DimensionMismatch(format!(
                "state with dims {:?} is not on {da}x{db}",
                psi.dims()
            )));
        }
        psi.require_normalized()?;
    }
    let reduced = |psi: &PureState| {
        let bip = PureState::from_vector(psi.vector().clone(), dims.to_vec());
        partial_trace(&dm_from_state(&bip)?, dims, Subsystem::B)
    };
    let distance = trace_distance(&reduced(psi0)?, &reduced(psi1)?)?;
    if distance >= TOL.equality {
        return Err(QuantumError::ReducedStatesDiffer { distance });
    }

    let m0 = coefficient_matrix(psi0, dims);
    let m1 = coefficient_matrix(psi1, dims);
    let svd = m0.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut sources = Vec::new();
    let mut targets = Vec::new();
    for k in order {
        let s = svd.singular_values[k];
        if s <= TOL.degeneracy {
            continue;
        }
        let v_k = v_t.row(k).adjoint();
        let before = sources.len();
        gram_schmidt([u.column(k).into_owned()], &mut sources);
        if sources.len() == before {
            continue;
        }
        let before = targets.len();
        gram_schmidt([(&m1 * v_k).unscale(s)], &mut targets);
        if targets.len() == before {
            sources.pop();
        }
    }
    complete_basis(&mut sources, da);
    complete_basis(&mut targets, da);

    let mut matrix = DMatrix::<Complex64>::zeros(da, da);
    for (src, dst) in sources.iter().zip(&targets) {
        matrix += dst * src.adjoint();
    }

    let mapped = &matrix * &m0;
    let (idx, amp) = mapped
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, z)| (i, *z))
        .expect("nonempty");
    let target = m1[idx];
    if amp.norm() > 0.0 && target.norm() > 0.0 {
        let phase = target / amp;
        matrix *= phase.unscale(phase.norm());
    }

    Ok(LocalUnitary { matrix, dims })
}
