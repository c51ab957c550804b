use std::f64::consts::PI;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::operator::{c, C64};
use crate::error::{Error, Result};

pub const MIN_GRID_POINTS: usize = 16;

/// Uniform grid `min + j * spacing`, `j = 0..points`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    min: f64,
    max: f64,
    points: usize,
}

impl Grid1D {
    pub fn new(min: f64, max: f64, points: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if max <= min {
            return Err(Error::InvalidGrid(format!("max {max} must exceed min {min}")));
        }
        if points < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid(format!("{points} points, need at least {MIN_GRID_POINTS}")));
        }
        Ok(Self { min, max, points })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, points)
    }

    /// Rebuilds a grid from explicit coordinates, rejecting uneven spacing.
    pub fn from_coordinates(coords: &[f64]) -> Result<Self> {
        if coords.len() < MIN_GRID_POINTS {
            return Err(Error::InvalidGrid(format!("{} points, need at least {MIN_GRID_POINTS}", coords.len())));
        }
        let grid = Self::new(coords[0], coords[coords.len() - 1], coords.len())?;
        let h = grid.spacing();
        for (j, &x) in coords.iter().enumerate() {
            if (x - grid.coordinate(j)).abs() > 1e-9 * h {
                return Err(Error::NonUniformGrid);
            }
        }
        Ok(grid)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        self.min + j as f64 * self.spacing()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coordinate(j)).collect()
    }

    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.min <= lo && hi <= self.max
    }

    pub fn require_covers(&self, lo: f64, hi: f64) -> Result<()> {
        if self.covers(lo, hi) {
            Ok(())
        } else {
            Err(Error::GridTooNarrow { min: self.min, max: self.max, need_min: lo, need_max: hi })
        }
    }

    /// Index offset of the zero-frequency sample on the conjugate grid.
    fn centre_offset(&self) -> usize {
        self.points / 2
    }

    /// Conjugate (momentum) grid: `P_k = (k - n/2) * 2 pi / (n h)`.
    pub fn conjugate(&self) -> Grid1D {
        let n = self.points;
        let dp = 2.0 * PI / (n as f64 * self.spacing());
        let s = self.centre_offset() as f64;
        Grid1D { min: -s * dp, max: (n as f64 - 1.0 - s) * dp, points: n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

/// Sampled wavefunction. `grid` is always the position grid; momentum
/// samples live on `grid.conjugate()`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction1D {
    grid: Grid1D,
    amplitudes: Vec<C64>,
    representation: Representation,
}

impl WaveFunction1D {
    pub fn new(grid: Grid1D, amplitudes: Vec<C64>, representation: Representation) -> Result<Self> {
        if amplitudes.len() != grid.points() {
            return Err(Error::DimensionMismatch { expected: grid.points(), found: amplitudes.len() });
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite("wavefunction"));
        }
        Ok(Self { grid, amplitudes, representation })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> C64) -> Self {
        let amplitudes = grid.coordinates().into_iter().map(f).collect();
        Self { grid, amplitudes, representation: Representation::Position }
    }

    pub fn from_real_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| c(f(x), 0.0))
    }

    /// Normalised Gaussian `(width^2 pi)^(-1/4) exp(-(x - centre)^2 / (2 width^2))`.
    pub fn gaussian(grid: Grid1D, centre: f64, width: f64) -> Self {
        let norm = (width * width * PI).powf(-0.25);
        Self::from_real_fn(grid, |x| norm * (-(x - centre).powi(2) / (2.0 * width * width)).exp())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    /// Grid of the current representation.
    pub fn active_grid(&self) -> Grid1D {
        match self.representation {
            Representation::Position => self.grid,
            Representation::Momentum => self.grid.conjugate(),
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn with_amplitudes(&self, amplitudes: Vec<C64>) -> Result<Self> {
        Self::new(self.grid, amplitudes, self.representation)
    }

    /// `sum |psi|^2 * d` over the active grid.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.active_grid().spacing()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(Self { amplitudes: self.amplitudes.iter().map(|a| a / n).collect(), ..self.clone() })
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `sum conj(self) * other * d`; both must share grid and representation.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_compatible(other)?;
        let d = self.active_grid().spacing();
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<C64>() * d)
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        let d = self.active_grid().spacing();
        Ok((self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() * d).sqrt())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.representation != other.representation {
            return Err(Error::InvalidGrid("wavefunctions live on different grids".into()));
        }
        Ok(())
    }

    pub fn to_position(&self) -> Self {
        match self.representation {
            Representation::Position => self.clone(),
            Representation::Momentum => fourier_pair(self),
        }
    }

    pub fn to_momentum(&self) -> Self {
        match self.representation {
            Representation::Momentum => self.clone(),
            Representation::Position => fourier_pair(self),
        }
    }
}

/// Unitary transform between position and momentum representations,
/// `psi~(P) = (2 pi)^(-1/2) int psi(Q) exp(-i P Q) dQ` discretised on the grid.
/// Applying it twice returns the input.
pub fn fourier_pair(wf: &WaveFunction1D) -> WaveFunction1D {
    let grid = wf.grid;
    let n = grid.points();
    let h = grid.spacing();
    let pgrid = grid.conjugate();
    let dp = pgrid.spacing();
    let s = grid.centre_offset();
    let q0 = grid.min();
    let mut planner = FftPlanner::<f64>::new();
    // Reduce s*j modulo n in integers so the phase stays accurate for large j.
    let twiddle = |j: usize| 2.0 * PI * ((s * j) % n) as f64 / n as f64;

    match wf.representation {
        Representation::Position => {
            let mut buf: Vec<C64> = wf
                .amplitudes
                .iter()
                .enumerate()
                .map(|(j, a)| a * C64::from_polar(1.0, twiddle(j)))
                .collect();
            planner.plan_fft_forward(n).process(&mut buf);
            let scale = h / (2.0 * PI).sqrt();
            for (k, b) in buf.iter_mut().enumerate() {
                *b *= C64::from_polar(scale, -pgrid.coordinate(k) * q0);
            }
            WaveFunction1D { grid, amplitudes: buf, representation: Representation::Momentum }
        }
        Representation::Momentum => {
            let mut buf: Vec<C64> = wf
                .amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| a * C64::from_polar(1.0, pgrid.coordinate(k) * q0))
                .collect();
            planner.plan_fft_inverse(n).process(&mut buf);
            let scale = dp / (2.0 * PI).sqrt();
            for (j, b) in buf.iter_mut().enumerate() {
                *b *= C64::from_polar(scale, -twiddle(j));
            }
            WaveFunction1D { grid, amplitudes: buf, representation: Representation::Position }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid1D {
        Grid1D::symmetric(20.0, 1024).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 15).is_err());
        assert!(Grid1D::new(1.0, 1.0, 32).is_err());
        assert!(matches!(Grid1D::from_coordinates(&[0.0, 1.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0]), Err(Error::NonUniformGrid)));
        let uniform: Vec<f64> = (0..20).map(|j| j as f64 * 0.5).collect();
        assert_eq!(Grid1D::from_coordinates(&uniform).unwrap().points(), 20);
    }

    #[test]
    fn gaussian_maps_to_gaussian_of_inverse_width() {
        let g = grid();
        let wf = WaveFunction1D::gaussian(g, 0.0, 1.0);
        let p = fourier_pair(&wf);
        let pg = g.conjugate();
        // (2 pi)^(-1/2) int (pi)^(-1/4) e^{-Q^2/2} e^{-iPQ} dQ = pi^(-1/4) e^{-P^2/2}
        for (k, a) in p.amplitudes().iter().enumerate() {
            let pk = pg.coordinate(k);
            let expect = PI.powf(-0.25) * (-pk * pk / 2.0).exp();
            assert!((a - c(expect, 0.0)).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn spike_has_flat_momentum_magnitude() {
        let g = grid();
        let mut amps = vec![c(0.0, 0.0); g.points()];
        amps[300] = c(1.0, 0.0);
        let wf = WaveFunction1D::new(g, amps, Representation::Position).unwrap();
        let p = fourier_pair(&wf);
        let m0 = p.amplitudes()[0].norm();
        assert!(p.amplitudes().iter().all(|a| (a.norm() - m0).abs() < 1e-14));
    }

    #[test]
    fn shifted_gaussian_gets_linear_phase() {
        let g = grid();
        let q0 = 2.0;
        let p0 = fourier_pair(&WaveFunction1D::gaussian(g, 0.0, 1.0));
        let p1 = fourier_pair(&WaveFunction1D::gaussian(g, q0, 1.0));
        let pg = g.conjugate();
        for k in 0..g.points() {
            let expect = p0.amplitudes()[k] * C64::from_polar(1.0, -pg.coordinate(k) * q0);
            assert!((p1.amplitudes()[k] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_and_round_trip() {
        let g = Grid1D::new(-7.0, 11.0, 301).unwrap();
        let wf = WaveFunction1D::from_fn(g, |x| c((-(x - 1.0).powi(2) / 3.0).exp(), (0.3 * x).sin() * (-x * x / 8.0).exp()));
        let p = fourier_pair(&wf);
        assert!((p.norm_sqr() - wf.norm_sqr()).abs() < 1e-10);
        let back = fourier_pair(&p);
        assert!(back.distance(&wf).unwrap() < 1e-10);
    }
}
