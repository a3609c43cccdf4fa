//! Reference implementations used only by the tests. They avoid the library's
//! own numerics (nalgebra, statrs) so agreement is meaningful.

#![allow(dead_code, clippy::needless_range_loop)]

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix `H = X + iY` from the real embedding
/// `[[X, -Y], [Y, X]]`, whose spectrum is that of `H` with each value doubled.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut m = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = h[i][j].re;
            m[i + n][j + n] = h[i][j].re;
            m[i][j + n] = -h[i][j].im;
            m[i + n][j] = h[i][j].im;
        }
    }
    let ev = jacobi_eigenvalues(m);
    ev.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

pub fn trace_norm(h: &[Vec<Complex64>]) -> f64 {
    hermitian_eigenvalues(h).iter().map(|x| x.abs()).sum()
}

/// `(1 + ‖p1 ρ1 − p0 ρ0‖₁) / 2`.
pub fn helstrom(p0: f64, rho0: &[Vec<Complex64>], p1: f64, rho1: &[Vec<Complex64>]) -> f64 {
    let n = rho0.len();
    let diff: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| rho1[i][j] * p1 - rho0[i][j] * p0).collect())
        .collect();
    0.5 * (1.0 + trace_norm(&diff))
}

/// Closed-form trace distance of two 2×2 density matrices:
/// half the Euclidean distance of their Bloch vectors.
pub fn trace_distance_2x2(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    let bloch =
        |m: &[Vec<Complex64>]| [2.0 * m[0][1].re, -2.0 * m[0][1].im, (m[0][0] - m[1][1]).re];
    let (u, v) = (bloch(a), bloch(b));
    0.5 * ((u[0] - v[0]).powi(2) + (u[1] - v[1]).powi(2) + (u[2] - v[2]).powi(2)).sqrt()
}

/// Composite Simpson rule with `2n` panels.
pub fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> f64 {
    let m = 2 * n;
    let h = (hi - lo) / m as f64;
    let mut s = f(lo) + f(hi);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

/// `ln P[Bin(m, 1/2) >= k]` by exact integer summation.
pub fn ln_fair_binomial_tail(m: u64, k: u64) -> f64 {
    let mut row = BigUint::one();
    let mut sum = BigUint::zero();
    for j in 0..=m {
        if j >= k {
            sum += &row;
        }
        row = row * (m - j) / (j + 1);
    }
    if sum.is_zero() {
        return f64::NEG_INFINITY;
    }
    let shift = sum.bits().saturating_sub(64);
    let top = (sum >> shift).to_f64().unwrap();
    top.ln() + (shift as f64 - m as f64) * std::f64::consts::LN_2
}

/// Random density matrix of dimension `n`: `G G† / tr(G G†)`.
pub fn random_density<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    let g: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect()
        })
        .collect();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                m[i][j] += g[i][k] * g[j][k].conj();
            }
        }
    }
    let tr: f64 = (0..n).map(|i| m[i][i].re).sum();
    for row in &mut m {
        for z in row.iter_mut() {
            *z /= tr;
        }
    }
    m
}

pub fn to_flat(m: &[Vec<Complex64>]) -> Vec<Complex64> {
    m.iter().flatten().copied().collect()
}
