//! Statistical tests behind Bob's verification and the calibration runs.

use serde::{Deserialize, Serialize};
use statrs::function::{beta::inv_beta_reg, erf::erfc, gamma::gamma_ur, gamma::ln_gamma};
use thiserror::Error;

use crate::optics::ScreenPdf;

/// Minimum sample size for a goodness-of-fit test.
pub const MIN_GOF_SAMPLES: usize = 30;

/// Bins whose expected count falls below this are merged rightward.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
    #[error("bad arguments: {0}")]
    BadArgs(String),
    #[error("sample {0} lies outside the screen window")]
    OutOfRange(f64),
    #[error("binning collapsed to a single cell")]
    DegenerateBinning,
}

pub type Result<T> = std::result::Result<T, StatsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub n_samples: usize,
    /// Cells left after merging.
    pub n_bins: usize,
}

/// An ordered partition of the screen window into cells. Each cell is a
/// union of intervals `[edges[i], edges[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    edges: Vec<f64>,
    segment_cell: Vec<usize>,
    n_cells: usize,
}

impl Partition {
    pub fn equal_width(lo: f64, hi: f64, n_bins: usize) -> Result<Self> {
        if n_bins < 2 || !(hi > lo) {
            return Err(StatsError::BadArgs(format!(
                "need n_bins >= 2 over a nonempty range, got {n_bins} on [{lo}, {hi}]"
            )));
        }
        let w = (hi - lo) / n_bins as f64;
        let mut edges: Vec<f64> = (0..n_bins).map(|i| lo + i as f64 * w).collect();
        edges.push(hi);
        Ok(Self {
            edges,
            segment_cell: (0..n_bins).collect(),
            n_cells: n_bins,
        })
    }

    /// Cells by fringe phase. With fringe period `p`, phase `φ = x/p mod 1`
    /// and cell `j` of `q` holds `φ ∈ [(j − ½)/q, (j + ½)/q)`, so cell 0 is
    /// centred on the bright fringes. With `q = 2` the cells are the bright
    /// and dark halves of every fringe.
    pub fn fringe_phase(lo: f64, hi: f64, period: f64, phase_bins: usize) -> Result<Self> {
        if phase_bins < 2 || !(hi > lo) || !(period > 0.0) {
            return Err(StatsError::BadArgs(format!(
                "need phase_bins >= 2 and a positive period, got {phase_bins} and {period}"
            )));
        }
        let q = phase_bins as f64;
        let offset = 0.5 / q;
        let mut edges = vec![lo];
        let first = ((lo / period - offset) * q).floor() as i64;
        let last = ((hi / period - offset) * q).ceil() as i64;
        for j in first..=last {
            let x = period * (j as f64 / q + offset);
            if x > lo && x < hi {
                edges.push(x);
            }
        }
        edges.push(hi);
        let segment_cell = edges
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let phase = (mid / period + offset).rem_euclid(1.0);
                ((phase * q) as usize).min(phase_bins - 1)
            })
            .collect();
        Ok(Self {
            edges,
            segment_cell,
            n_cells: phase_bins,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().expect("nonempty")
    }

    /// Cell index of `x`; the upper edge belongs to the last segment.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.lower() && x <= self.upper()) {
            return None;
        }
        let seg = self.edges.partition_point(|&e| e <= x).saturating_sub(1);
        Some(self.segment_cell[seg.min(self.segment_cell.len() - 1)])
    }

    /// Probability mass the PDF assigns to each cell.
    pub fn cell_masses(&self, pdf: &ScreenPdf) -> Vec<f64> {
        let mut masses = vec![0.0; self.n_cells];
        for (w, &cell) in self.edges.windows(2).zip(&self.segment_cell) {
            masses[cell] += pdf.mass_between(w[0], w[1]);
        }
        masses
    }
}

/// A partition together with the expected cell masses of one PDF, reusable
/// across many tests.
#[derive(Debug, Clone, PartialEq)]
pub struct GofReference {
    partition: Partition,
    masses: Vec<f64>,
}

impl GofReference {
    pub fn new(pdf: &ScreenPdf, partition: Partition) -> Self {
        let masses = partition.cell_masses(pdf);
        Self { partition, masses }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn test(&self, samples: &[f64]) -> Result<GofResult> {
        let n = samples.len();
        if n < MIN_GOF_SAMPLES {
            return Err(StatsError::TooFewSamples {
                got: n,
                min: MIN_GOF_SAMPLES,
            });
        }
        let mut counts = vec![0usize; self.partition.n_cells];
        for &x in samples {
            let c = self.partition.cell_of(x).ok_or(StatsError::OutOfRange(x))?;
            counts[c] += 1;
        }
        pearson(&counts, &self.masses, n)
    }
}

/// Pearson statistic with rightward merging of low-expectation cells.
fn pearson(counts: &[usize], masses: &[f64], n: usize) -> Result<GofResult> {
    let total_mass: f64 = masses.iter().sum();
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&c, &m) in counts.iter().zip(masses) {
        obs += c as f64;
        exp += n as f64 * m / total_mass;
        if exp >= MIN_EXPECTED_COUNT {
            groups.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if obs > 0.0 || exp > 0.0 {
        match groups.last_mut() {
            Some(g) => {
                g.0 += obs;
                g.1 += exp;
            }
            None => groups.push((obs, exp)),
        }
    }
    if groups.len() < 2 {
        return Err(StatsError::DegenerateBinning);
    }
    let statistic: f64 = groups.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = groups.len() - 1;
    Ok(GofResult {
        statistic,
        dof,
        p_value: chi_square_upper_tail(statistic, dof)?,
        n_samples: n,
        n_bins: groups.len(),
    })
}

/// Pearson goodness of fit of `samples` against `pdf` on equal-width bins
/// spanning the PDF's window.
pub fn chi_square_gof(samples: &[f64], pdf: &ScreenPdf, n_bins: usize) -> Result<GofResult> {
    let partition = Partition::equal_width(pdf.lower(), pdf.upper(), n_bins)?;
    chi_square_gof_partition(samples, pdf, partition)
}

pub fn chi_square_gof_partition(
    samples: &[f64],
    pdf: &ScreenPdf,
    partition: Partition,
) -> Result<GofResult> {
    GofReference::new(pdf, partition).test(samples)
}

/// `Q(dof/2, x/2)`, the upper tail of the chi-square distribution.
pub fn chi_square_upper_tail(x: f64, dof: usize) -> Result<f64> {
    if dof == 0 || x.is_nan() || x < 0.0 {
        return Err(StatsError::BadArgs(format!(
            "chi-square tail needs x >= 0 and dof >= 1, got x={x}, dof={dof}"
        )));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_ur(dof as f64 / 2.0, x / 2.0).clamp(0.0, 1.0))
}

fn ln_choose(m: u64, j: u64) -> f64 {
    ln_gamma(m as f64 + 1.0) - ln_gamma(j as f64 + 1.0) - ln_gamma((m - j) as f64 + 1.0)
}

/// Exact `P[Bin(m, p) ≥ k]`, accumulated in log space.
pub fn binomial_tail(m: u64, k: u64, p: f64) -> Result<f64> {
    if k > m || !(0.0..=1.0).contains(&p) {
        return Err(StatsError::BadArgs(format!(
            "binomial tail needs 0 <= k <= m and p in [0,1], got m={m}, k={k}, p={p}"
        )));
    }
    if k == 0 || p == 1.0 {
        return Ok(1.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let terms: Vec<f64> = (k..=m)
        .map(|j| ln_choose(m, j) + j as f64 * lp + (m - j) as f64 * lq)
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    Ok((top + sum.ln()).exp().min(1.0))
}

/// Two-sided Clopper–Pearson interval for a binomial proportion.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials || !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::BadArgs(format!(
            "interval needs 0 <= successes <= trials, trials > 0, confidence in (0,1); got {successes}/{trials} at {confidence}"
        )));
    }
    let tail = (1.0 - confidence) / 2.0;
    let (x, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 {
        0.0
    } else {
        inv_beta_reg(x, n - x + 1.0, tail)
    };
    let hi = if successes == trials {
        1.0
    } else {
        inv_beta_reg(x + 1.0, n - x, 1.0 - tail)
    };
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankTestResult {
    /// Mann–Whitney U of the first sample.
    pub u: f64,
    pub z: f64,
    pub p_value: f64,
}

/// Two-sided Mann–Whitney rank-sum test, normal approximation with tie and
/// continuity corrections.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankTestResult> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(StatsError::BadArgs(
            "rank test needs two nonempty samples".into(),
        ));
    }
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    if all.iter().any(|(x, _)| x.is_nan()) {
        return Err(StatsError::BadArgs("NaN in rank test input".into()));
    }
    all.sort_by(|x, y| x.0.total_cmp(&y.0));
    let n = all.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        rank_sum_a += avg_rank * all[i..=j].iter().filter(|(_, from_a)| *from_a).count() as f64;
        i = j + 1;
    }
    let (f1, f2, nf) = (n1 as f64, n2 as f64, n as f64);
    let u = rank_sum_a - f1 * (f1 + 1.0) / 2.0;
    let mean = f1 * f2 / 2.0;
    let var = f1 * f2 / 12.0 * ((nf + 1.0) - tie_term / (nf * (nf - 1.0)));
    if !(var > 0.0) {
        return Ok(RankTestResult {
            u,
            z: 0.0,
            p_value: 1.0,
        });
    }
    let diff = (u - mean).abs();
    let z = (diff - 0.5).max(0.0) / var.sqrt();
    let p_value = erfc(z / std::f64::consts::SQRT_2).clamp(0.0, 1.0);
    Ok(RankTestResult {
        u,
        z: if u >= mean { z } else { -z },
        p_value,
    })
}
