//! The purification attack on toy commitments `|Ψ^(b)> ∈ A ⊗ B`.
//!
//! If Bob's reduced states for the two bits coincide, a unitary on Alice's
//! side alone turns one commitment into the other. [`mount_attack`] builds
//! that unitary or reports how far apart Bob's states are.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::quantum::{
    dm_from_state, find_local_unitary, partial_trace, trace_distance, Complex64, LocalUnitary,
    PureState, QuantumError, Subsystem,
};
use crate::rng;

/// Gap below which Bob's reduced states count as identical.
pub const CONCEALING_TOLERANCE: f64 = 1e-8;
/// Perturbed pairs are redrawn until their gap exceeds this.
pub const MIN_PERTURBED_GAP: f64 = 1e-3;
/// Largest factor dimension used by the demo.
pub const MAX_FACTOR_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NogoError {
    #[error("reduced states differ by {gap}; no local unitary exists")]
    ImpossibleAttack { gap: f64 },
    #[error("toy commitment: {0}")]
    InvalidCommitment(String),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, NogoError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyCommitment {
    psi0: PureState,
    psi1: PureState,
    dims: [usize; 2],
    labels: [String; 2],
}

impl ToyCommitment {
    pub fn new(psi0: PureState, psi1: PureState, dims: [usize; 2]) -> Result<Self> {
        Self::with_labels(psi0, psi1, dims, ["b=0".into(), "b=1".into()])
    }

    pub fn with_labels(
        psi0: PureState,
        psi1: PureState,
        dims: [usize; 2],
        labels: [String; 2],
    ) -> Result<Self> {
        let [da, db] = dims;
        if da == 0 || db == 0 {
            return Err(NogoError::InvalidCommitment(format!(
                "empty factor in {dims:?}"
            )));
        }
        for psi in [&psi0, &psi1] {
            if psi.dim() != da * db {
                return Err(NogoError::InvalidCommitment(format!(
                    "state of dimension {} is not on {da}x{db}",
                    psi.dim()
                )));
            }
            if !psi.is_normalized() {
                return Err(QuantumError::NotNormalized { norm: psi.norm() }.into());
            }
        }
        let psi0 = PureState::new(psi0.amplitudes().to_vec(), dims.to_vec())?;
        let psi1 = PureState::new(psi1.amplitudes().to_vec(), dims.to_vec())?;
        Ok(Self {
            psi0,
            psi1,
            dims,
            labels,
        })
    }

    pub fn psi0(&self) -> &PureState {
        &self.psi0
    }

    pub fn psi1(&self) -> &PureState {
        &self.psi1
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn labels(&self) -> &[String; 2] {
        &self.labels
    }

    /// Bob's state for each bit: the partial trace over A.
    pub fn reduced_states(&self) -> Result<[crate::quantum::DensityMatrix; 2]> {
        let r0 = partial_trace(&dm_from_state(&self.psi0)?, self.dims, Subsystem::B)?;
        let r1 = partial_trace(&dm_from_state(&self.psi1)?, self.dims, Subsystem::B)?;
        Ok([r0, r1])
    }
}

/// Trace distance between Bob's reduced states.
pub fn concealing_gap(tc: &ToyCommitment) -> Result<f64> {
    let [r0, r1] = tc.reduced_states()?;
    Ok(trace_distance(&r0, &r1)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Attack {
    pub unitary: LocalUnitary,
    /// `‖(U_A ⊗ I)ψ0 − ψ1‖`.
    pub residual: f64,
}

pub fn mount_attack(tc: &ToyCommitment) -> Result<Attack> {
    let gap = concealing_gap(tc)?;
    if gap >= CONCEALING_TOLERANCE {
        return Err(NogoError::ImpossibleAttack { gap });
    }
    let unitary = match find_local_unitary(&tc.psi0, &tc.psi1, tc.dims) {
        Ok(u) => u,
        Err(QuantumError::ReducedStatesDiffer { distance }) => {
            return Err(NogoError::ImpossibleAttack { gap: distance })
        }
        Err(e) => return Err(e.into()),
    };
    let residual = unitary.apply(&tc.psi0)?.distance(&tc.psi1)?;
    Ok(Attack { unitary, residual })
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let z = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn random_spectrum<R: Rng + ?Sized>(rank: usize, rng: &mut R) -> Vec<f64> {
    // Bounded away from zero so the Schmidt rank is exactly `rank`.
    let raw: Vec<f64> = (0..rank).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `Σ_k √λ_k a_k ⊗ b_k` with `a_k`, `b_k` the columns of the given unitaries.
fn schmidt_state(
    spectrum: &[f64],
    basis_a: &DMatrix<Complex64>,
    basis_b: &DMatrix<Complex64>,
    dims: [usize; 2],
) -> Result<PureState> {
    let [da, db] = dims;
    let mut amps = vec![Complex64::new(0.0, 0.0); da * db];
    for (k, &lambda) in spectrum.iter().enumerate() {
        let w = lambda.sqrt();
        for a in 0..da {
            for b in 0..db {
                amps[a * db + b] += basis_a[(a, k)] * basis_b[(b, k)] * w;
            }
        }
    }
    Ok(PureState::normalized(amps, dims.to_vec())?)
}

fn random_dims<R: Rng + ?Sized>(rng: &mut R) -> [usize; 2] {
    [
        rng.random_range(2..=MAX_FACTOR_DIM),
        rng.random_range(2..=MAX_FACTOR_DIM),
    ]
}

/// A pair sharing B's Schmidt spectrum and basis, with independent A bases.
pub fn random_concealing_pair<R: Rng + ?Sized>(rng: &mut R) -> Result<ToyCommitment> {
    let dims = random_dims(rng);
    let rank = dims[0].min(dims[1]);
    let spectrum = random_spectrum(rank, rng);
    let basis_b = haar_unitary(dims[1], rng);
    let psi0 = schmidt_state(&spectrum, &haar_unitary(dims[0], rng), &basis_b, dims)?;
    let psi1 = schmidt_state(&spectrum, &haar_unitary(dims[0], rng), &basis_b, dims)?;
    ToyCommitment::new(psi0, psi1, dims)
}

/// A concealing pair whose second state is mixed with a random vector, redrawn
/// until the gap exceeds [`MIN_PERTURBED_GAP`].
pub fn random_perturbed_pair<R: Rng + ?Sized>(rng: &mut R) -> Result<ToyCommitment> {
    loop {
        let base = random_concealing_pair(rng)?;
        let dims = base.dims;
        let strength = rng.random_range(0.05..0.5);
        let noise: Vec<Complex64> = (0..dims[0] * dims[1])
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        let noise_norm = noise.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let amps = base
            .psi1
            .amplitudes()
            .iter()
            .zip(&noise)
            .map(|(a, n)| a + n * (strength / noise_norm))
            .collect();
        let psi1 = PureState::normalized(amps, dims.to_vec())?;
        let tc = ToyCommitment::new(base.psi0, psi1, dims)?;
        if concealing_gap(&tc)? > MIN_PERTURBED_GAP {
            return Ok(tc);
        }
    }
}

/// Product pair `|r0>⊗|v>`, `|r1>⊗|v>` on `2 ⊗ 2`: a position-type and a
/// which-slit-type record on A next to the same state of B.
pub fn protocol_analog_pair() -> Result<ToyCommitment> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r0 = PureState::from_real(&[s, s], vec![2])?;
    let r1 = PureState::from_real(&[1.0, 0.0], vec![2])?;
    let v = PureState::from_real(&[0.6, 0.8], vec![2])?;
    ToyCommitment::with_labels(
        r0.tensor(&v)?,
        r1.tensor(&v)?,
        [2, 2],
        ["position record".into(), "which-slit record".into()],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Concealing,
    Perturbed,
    ProtocolAnalog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub index: u64,
    pub kind: PairKind,
    pub dims: [usize; 2],
    pub gap: f64,
    pub attack_found: bool,
    pub residual: Option<f64>,
}

impl PairReport {
    /// Whether the outcome matches the concealing criterion: an attack with
    /// small residual exactly when the gap is below tolerance.
    pub fn consistent(&self) -> bool {
        let concealing = self.gap < CONCEALING_TOLERANCE;
        match (concealing, self.attack_found, self.residual) {
            (true, true, Some(r)) => r < CONCEALING_TOLERANCE,
            (false, false, None) => true,
            _ => false,
        }
    }
}

pub fn evaluate(index: u64, kind: PairKind, tc: &ToyCommitment) -> Result<PairReport> {
    let gap = concealing_gap(tc)?;
    let (attack_found, residual) = match mount_attack(tc) {
        Ok(a) => (true, Some(a.residual)),
        Err(NogoError::ImpossibleAttack { .. }) => (false, None),
        Err(e) => return Err(e),
    };
    Ok(PairReport {
        index,
        kind,
        dims: tc.dims,
        gap,
        attack_found,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSummary {
    pub concealing: u64,
    pub concealing_attacked: u64,
    pub perturbed: u64,
    pub perturbed_blocked: u64,
    pub max_residual: f64,
    pub min_perturbed_gap: f64,
}

/// Evaluates `n_concealing` concealing pairs followed by `n_perturbed`
/// perturbed pairs. Pair `i` draws from stream `(seed, i)`.
pub fn run_demo(seed: u64, n_concealing: u64, n_perturbed: u64) -> Result<Vec<PairReport>> {
    exec::map_indexed(n_concealing + n_perturbed, |i| {
        let mut r = rng::stream(seed, &[i]);
        if i < n_concealing {
            evaluate(i, PairKind::Concealing, &random_concealing_pair(&mut r)?)
        } else {
            evaluate(i, PairKind::Perturbed, &random_perturbed_pair(&mut r)?)
        }
    })
    .into_iter()
    .collect()
}

pub fn summarize(reports: &[PairReport]) -> DemoSummary {
    let mut s = DemoSummary {
        concealing: 0,
        concealing_attacked: 0,
        perturbed: 0,
        perturbed_blocked: 0,
        max_residual: 0.0,
        min_perturbed_gap: f64::INFINITY,
    };
    for r in reports {
        match r.kind {
            PairKind::Concealing => {
                s.concealing += 1;
                if let (true, Some(res)) = (r.attack_found, r.residual) {
                    if res < CONCEALING_TOLERANCE {
                        s.concealing_attacked += 1;
                    }
                }
            }
            PairKind::Perturbed => {
                s.perturbed += 1;
                s.min_perturbed_gap = s.min_perturbed_gap.min(r.gap);
                if !r.attack_found {
                    s.perturbed_blocked += 1;
                }
            }
            PairKind::ProtocolAnalog => {}
        }
        if let Some(res) = r.residual {
            s.max_residual = s.max_residual.max(res);
        }
    }
    s
}
