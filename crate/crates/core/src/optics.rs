//! Far-field screen patterns for one and two open slits.
//!
//! Screen positions are dimensionless, measured in units of `λD/a`. In these
//! units the single-slit envelope is `sinc²(πx)` with zeros at nonzero
//! integers, and two slits add `cos²(π(d/a)x)` fringes of period `a/d`.
//! Shifting a slit only changes the far-field phase, so the left-slit and
//! right-slit patterns are the same envelope.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{Slit, SlitState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("bad geometry: {0}")]
    BadGeometry(String),
    #[error("bad density table: {0}")]
    BadDensity(String),
}

pub type Result<T> = std::result::Result<T, OpticsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitGeometry {
    /// Slit width `a` (metres).
    pub slit_width: f64,
    /// Centre-to-centre separation `d` (metres).
    pub slit_separation: f64,
    /// de Broglie wavelength `λ` (metres).
    pub wavelength: f64,
    /// Slit-to-screen distance `D` (metres).
    pub screen_distance: f64,
    /// Screen half-width `W` in units of `λD/a`.
    pub half_width: f64,
    /// Number of uniform tabulation nodes over `[-W, W]`.
    pub grid_nodes: usize,
}

impl Default for SlitGeometry {
    fn default() -> Self {
        Self {
            slit_width: 1.0e-6,
            slit_separation: 1.0e-5,
            wavelength: 1.0e-9,
            screen_distance: 1.0,
            half_width: 2.0,
            grid_nodes: 4001,
        }
    }
}

impl SlitGeometry {
    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("slit_width", self.slit_width),
            ("slit_separation", self.slit_separation),
            ("wavelength", self.wavelength),
            ("screen_distance", self.screen_distance),
        ];
        for (name, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(OpticsError::BadGeometry(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.slit_separation <= self.slit_width {
            return Err(OpticsError::BadGeometry(format!(
                "slit separation {} must exceed slit width {}",
                self.slit_separation, self.slit_width
            )));
        }
        if !(self.half_width.is_finite() && self.half_width >= 1.0) {
            return Err(OpticsError::BadGeometry(format!(
                "half-width must be >= 1, got {}",
                self.half_width
            )));
        }
        if self.grid_nodes < 3 {
            return Err(OpticsError::BadGeometry(format!(
                "need at least 3 grid nodes, got {}",
                self.grid_nodes
            )));
        }
        Ok(())
    }

    /// `d/a`, the number of fringes per envelope unit.
    pub fn fringe_ratio(&self) -> f64 {
        self.slit_separation / self.slit_width
    }

    /// Fringe period in screen units, `a/d`.
    pub fn fringe_period(&self) -> f64 {
        self.slit_width / self.slit_separation
    }

    /// Length of one screen unit, `λD/a`, in metres.
    pub fn screen_unit(&self) -> f64 {
        self.wavelength * self.screen_distance / self.slit_width
    }

    pub fn to_physical(&self, x: f64) -> f64 {
        x * self.screen_unit()
    }

    /// Uniform nodes over `[-W, W]`, exactly antisymmetric about zero.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.grid_nodes;
        let m = (n - 1) as f64;
        (0..n)
            .map(|i| self.half_width * (2.0 * i as f64 - m) / m)
            .collect()
    }

    pub fn with_grid_nodes(mut self, grid_nodes: usize) -> Self {
        self.grid_nodes = grid_nodes;
        self
    }
}

fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        t.sin() / t
    }
}

/// Unnormalized single-slit intensity `sinc²(πx)`, exactly zero at nonzero
/// integers.
pub fn envelope_intensity(x: f64) -> f64 {
    if x != 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    let s = sinc(std::f64::consts::PI * x);
    s * s
}

/// Unnormalized two-slit intensity `cos²(π(d/a)x)·sinc²(πx)`.
pub fn doubleslit_intensity(x: f64, fringe_ratio: f64) -> f64 {
    let c = (std::f64::consts::PI * fringe_ratio * x).cos();
    c * c * envelope_intensity(x)
}

/// A tabulated position density on the screen with its cumulative
/// distribution. Between nodes the density is linear for evaluation and the
/// CDF is linear for sampling and for bin masses, so sampled data follow the
/// same distribution that goodness-of-fit tests compare against.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPdf {
    grid: Vec<f64>,
    density: Vec<f64>,
    cdf: Vec<f64>,
    normalization: f64,
}

impl ScreenPdf {
    /// Normalizes a nonnegative table over an ascending grid.
    pub fn from_density(grid: Vec<f64>, raw: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != raw.len() {
            return Err(OpticsError::BadDensity(format!(
                "grid of {} nodes with {} density values",
                grid.len(),
                raw.len()
            )));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(OpticsError::BadDensity(
                "grid must be strictly ascending".into(),
            ));
        }
        if raw.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(OpticsError::BadDensity(
                "density must be finite and nonnegative".into(),
            ));
        }
        let mut cdf = Vec::with_capacity(grid.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for i in 1..grid.len() {
            acc += 0.5 * (raw[i] + raw[i - 1]) * (grid[i] - grid[i - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(OpticsError::BadDensity("total mass is zero".into()));
        }
        let density = raw.iter().map(|v| v / acc).collect();
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        *cdf.last_mut().expect("nonempty") = 1.0;
        Ok(Self {
            grid,
            density,
            cdf,
            normalization: acc,
        })
    }

    pub fn from_fn(geom: &SlitGeometry, f: impl Fn(f64) -> f64) -> Result<Self> {
        geom.validate()?;
        let grid = geom.grid();
        let raw = grid.iter().map(|&x| f(x)).collect();
        Self::from_density(grid, raw)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    /// Trapezoidal mass of the raw table before normalization.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn lower(&self) -> f64 {
        self.grid[0]
    }

    pub fn upper(&self) -> f64 {
        *self.grid.last().expect("nonempty")
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower() && x <= self.upper()
    }

    fn cell(&self, x: f64) -> usize {
        let i = self.grid.partition_point(|&g| g <= x);
        i.clamp(1, self.grid.len() - 1) - 1
    }

    /// Linear interpolation of the density table; zero outside the window.
    pub fn density_at(&self, x: f64) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        let i = self.cell(x);
        let t = (x - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.density[i] + t * (self.density[i + 1] - self.density[i])
    }

    /// Piecewise-linear CDF, clamped to [0, 1] outside the window.
    pub fn cdf_at(&self, x: f64) -> f64 {
        if x <= self.lower() {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        let i = self.cell(x);
        let t = (x - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
    }

    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf_at(hi) - self.cdf_at(lo)).max(0.0)
    }

    /// Inverse of the piecewise-linear CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        // First node whose CDF exceeds u; zero-mass cells are skipped.
        let j = self.cdf.partition_point(|&c| c <= u);
        if j == 0 {
            return self.lower();
        }
        if j >= self.cdf.len() {
            return self.upper();
        }
        let (c0, c1) = (self.cdf[j - 1], self.cdf[j]);
        let t = (u - c0) / (c1 - c0);
        self.grid[j - 1] + t * (self.grid[j] - self.grid[j - 1])
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

pub fn envelope_pdf(geom: &SlitGeometry) -> Result<ScreenPdf> {
    ScreenPdf::from_fn(geom, envelope_intensity)
}

pub fn doubleslit_pdf(geom: &SlitGeometry) -> Result<ScreenPdf> {
    let ratio = geom.fringe_ratio();
    ScreenPdf::from_fn(geom, |x| doubleslit_intensity(x, ratio))
}

pub fn sample_position<R: Rng + ?Sized>(pdf: &ScreenPdf, rng: &mut R) -> f64 {
    pdf.sample(rng)
}

/// Both screen patterns for one geometry, built once and shared.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenModel {
    geometry: SlitGeometry,
    envelope: ScreenPdf,
    doubleslit: ScreenPdf,
}

impl ScreenModel {
    pub fn new(geometry: SlitGeometry) -> Result<Self> {
        Ok(Self {
            envelope: envelope_pdf(&geometry)?,
            doubleslit: doubleslit_pdf(&geometry)?,
            geometry,
        })
    }

    pub fn geometry(&self) -> &SlitGeometry {
        &self.geometry
    }

    pub fn envelope(&self) -> &ScreenPdf {
        &self.envelope
    }

    pub fn doubleslit(&self) -> &ScreenPdf {
        &self.doubleslit
    }

    /// Screen distribution for a particle arriving in `state`. Only states
    /// with a single open slit or the symmetric two-slit superposition have
    /// a tabulated pattern.
    pub fn pdf_for(&self, state: &SlitState) -> Option<&ScreenPdf> {
        let tol = 1e-12;
        if state.overlap_probability(&SlitState::plus()) > 1.0 - tol {
            Some(&self.doubleslit)
        } else if [Slit::Left, Slit::Right]
            .iter()
            .any(|&s| state.slit_probability(s) > 1.0 - tol)
        {
            Some(&self.envelope)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_pdfs() -> (ScreenPdf, ScreenPdf) {
        let g = SlitGeometry::default();
        (envelope_pdf(&g).unwrap(), doubleslit_pdf(&g).unwrap())
    }

    #[test]
    fn envelope_zero_and_peak() {
        let (env, _) = default_pdfs();
        assert!(env.density_at(1.0).abs() < 1e-12);
        let imax = env
            .density()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(env.grid()[imax], 0.0);
    }

    #[test]
    fn doubleslit_null_peak_and_period() {
        let (_, ds) = default_pdfs();
        assert!(ds.density_at(0.05).abs() < 1e-12);
        let peak = ds.density_at(0.0);
        assert!(ds.density().iter().all(|&v| v <= peak));
        let g = SlitGeometry::default();
        assert!((g.fringe_period() - 0.1).abs() < 1e-15);
        assert!(ds.density_at(0.15).abs() < 1e-12);
        assert!(ds.density_at(0.1) > 0.9 * ds.density_at(0.0));
    }

    #[test]
    fn densities_are_even() {
        let (env, ds) = default_pdfs();
        for pdf in [env, ds] {
            let d = pdf.density();
            let n = d.len();
            for i in 0..n {
                assert!((d[i] - d[n - 1 - i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fringes_bounded_by_envelope() {
        let (env, ds) = default_pdfs();
        let ratio = env.normalization() / ds.normalization();
        let g = SlitGeometry::default();
        for (i, &x) in env.grid().iter().enumerate() {
            assert!(ds.density()[i] <= ratio * env.density()[i] * (1.0 + 1e-12) + 1e-300);
            // Fringe nulls sit at half-integer multiples of the period.
            let phase = x * g.fringe_ratio();
            if ((phase - 0.5).rem_euclid(1.0)).min(1.0 - (phase - 0.5).rem_euclid(1.0)) < 1e-9 {
                assert!(ds.density()[i] < 1e-10);
                if (x - x.round()).abs() > 1e-9 {
                    assert!(env.density()[i] > 0.0);
                }
            }
        }
    }

    #[test]
    fn quantile_of_constant_density() {
        let grid: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
        let pdf = ScreenPdf::from_density(grid.clone(), vec![1.0; grid.len()]).unwrap();
        assert!(pdf.quantile(0.5).abs() < 1e-9);
        assert!((pdf.quantile(0.25) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn cdf_ends_at_one_and_is_monotone() {
        let (env, ds) = default_pdfs();
        for pdf in [env, ds] {
            assert_eq!(*pdf.cdf().last().unwrap(), 1.0);
            assert!(pdf.cdf().windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn grid_refinement_converges() {
        let g = SlitGeometry::default();
        let fine = g.with_grid_nodes(2 * g.grid_nodes - 1);
        let (a, b) = (doubleslit_pdf(&g).unwrap(), doubleslit_pdf(&fine).unwrap());
        let (c, d) = (envelope_pdf(&g).unwrap(), envelope_pdf(&fine).unwrap());
        for k in 0..=4000 {
            let x = -2.0 + k as f64 * 0.001 + 0.0003;
            assert!((a.cdf_at(x) - b.cdf_at(x)).abs() < 1e-4);
            assert!((c.cdf_at(x) - d.cdf_at(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn bad_geometry_rejected() {
        let mut g = SlitGeometry::default();
        g.slit_separation = g.slit_width;
        assert!(matches!(envelope_pdf(&g), Err(OpticsError::BadGeometry(_))));
        let g = SlitGeometry {
            half_width: 0.5,
            ..SlitGeometry::default()
        };
        assert!(doubleslit_pdf(&g).is_err());
        let g = SlitGeometry {
            wavelength: -1.0,
            ..SlitGeometry::default()
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn model_picks_pattern_by_state() {
        let m = ScreenModel::new(SlitGeometry::default()).unwrap();
        assert!(std::ptr::eq(
            m.pdf_for(&SlitState::plus()).unwrap(),
            m.doubleslit()
        ));
        assert!(std::ptr::eq(
            m.pdf_for(&SlitState::left()).unwrap(),
            m.envelope()
        ));
        assert!(m.pdf_for(&SlitState::minus()).is_none());
    }
}
