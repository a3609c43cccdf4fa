use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Complex64, QuantumError, Result, MAX_DIM, TOL};

/// A state vector over a product of subsystems.
///
/// The amplitude of basis state `|i_1 i_2 ... i_k>` sits at the row-major
/// index, so the first subsystem is the most significant factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Builds a state without renormalizing. The norm is checked by the
    /// operations that need it.
    pub fn new(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(QuantumError::DimensionMismatch(format!(
                "subsystem dimensions must be positive, got {dims:?}"
            )));
        }
        let total: usize = dims.iter().product();
        if total != amplitudes.len() {
            return Err(QuantumError::DimensionMismatch(format!(
                "dims {dims:?} imply length {total}, got {}",
                amplitudes.len()
            )));
        }
        if total > MAX_DIM {
            return Err(QuantumError::DimensionTooLarge(total));
        }
        Ok(Self {
            amplitudes: DVector::from_vec(amplitudes),
            dims,
        })
    }

    /// Builds a state and rescales it to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let mut s = Self::new(amplitudes, dims)?;
        let n = s.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QuantumError::ZeroVector);
        }
        s.amplitudes.unscale_mut(n);
        Ok(s)
    }

    pub fn from_real(amplitudes: &[f64], dims: Vec<usize>) -> Result<Self> {
        Self::new(
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            dims,
        )
    }

    /// Computational basis vector `|index>` of a single system.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(QuantumError::DimensionMismatch(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v, vec![dim])
    }

    pub(crate) fn from_vector(amplitudes: DVector<Complex64>, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), amplitudes.len());
        Self { amplitudes, dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.amplitudes.as_slice()
    }

    pub(crate) fn vector(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOL.normalization
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(QuantumError::NotNormalized { norm: self.norm() })
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch(format!(
                "inner product of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Tensor product `self ⊗ other`; subsystem lists are concatenated.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::new(amps, dims)
    }

    /// Projector `|ψ><ψ|` without any validation.
    pub(crate) fn outer(&self) -> DMatrix<Complex64> {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &PureState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(QuantumError::DimensionMismatch(format!(
                "distance between dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok((&self.amplitudes - &other.amplitudes).norm())
    }
}

/// Slit label in the two-mode basis `{|L>, |R>}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slit {
    Left,
    Right,
}

impl Slit {
    pub fn other(self) -> Self {
        match self {
            Slit::Left => Slit::Right,
            Slit::Right => Slit::Left,
        }
    }
}

/// Transverse state of a particle behind the slits, expressed in the
/// two-dimensional which-slit basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SlitState(PureState);

impl SlitState {
    pub fn new(left: Complex64, right: Complex64) -> Result<Self> {
        let s = PureState::new(vec![left, right], vec![2])?;
        s.require_normalized()?;
        Ok(Self(s))
    }

    pub fn left() -> Self {
        Self(PureState::basis(2, 0).expect("valid basis"))
    }

    pub fn right() -> Self {
        Self(PureState::basis(2, 1).expect("valid basis"))
    }

    pub fn through(slit: Slit) -> Self {
        match slit {
            Slit::Left => Self::left(),
            Slit::Right => Self::right(),
        }
    }

    /// `(|L> + |R>)/√2`, the state behind two open slits.
    pub fn plus() -> Self {
        Self(PureState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], vec![2]).expect("valid"))
    }

    /// `(|L> - |R>)/√2`.
    pub fn minus() -> Self {
        Self(PureState::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2], vec![2]).expect("valid"))
    }

    pub fn as_pure(&self) -> &PureState {
        &self.0
    }

    pub fn left_amplitude(&self) -> Complex64 {
        self.0.amplitudes()[0]
    }

    pub fn right_amplitude(&self) -> Complex64 {
        self.0.amplitudes()[1]
    }

    /// Born probability of the which-slit outcome.
    pub fn slit_probability(&self, slit: Slit) -> f64 {
        match slit {
            Slit::Left => self.left_amplitude().norm_sqr(),
            Slit::Right => self.right_amplitude().norm_sqr(),
        }
    }

    /// Projective which-slit measurement driven by a uniform variate in [0, 1).
    pub fn measure_which_slit(&self, u: f64) -> Slit {
        if u < self.slit_probability(Slit::Left) {
            Slit::Left
        } else {
            Slit::Right
        }
    }

    /// Born probability `|<other|self>|²`.
    pub fn overlap_probability(&self, other: &SlitState) -> f64 {
        other
            .0
            .inner(&self.0)
            .expect("both two-dimensional")
            .norm_sqr()
    }
}
