//! Von Neumann measurements with a Gaussian pointer.
//!
//! Conventions: the pointer starts in `G(Q) = (Δ² π)^(-1/4) exp(-Q²/(2Δ²))`
//! and the impulsive interaction `exp(-i P C)` translates the branch with
//! eigenvalue `c_n` to `G(Q - c_n)`. In the momentum representation the
//! post-selected pointer is `G~(P) sum_n A_n exp(-i P c_n)`, which for a weak
//! coupling is `G~(P) exp(-i P C_w)`. Since `|G~(P)|² ∝ exp(-P² Δ²)`, the
//! factor `|exp(-i P C_w)|² = exp(2 P Im C_w)` moves the mean momentum to
//! `Im(C_w) / Δ²`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    c, embed, fourier_pair, hermitian_eigendecomposition, CVector, DenseOperator, Grid1D, Representation,
    SpectralDecomposition, WaveFunction1D, C64, DEFAULT_GROUPING_TOL,
};
use crate::states::{CoStateVector, Description, StateVector, TwoStateVector};
use crate::weak::weak_value;

pub const DEFAULT_POINTER_POINTS: usize = 4096;

/// Extra half-width of the default grid, in units of `Δ`.
pub const DEFAULT_MARGIN_WIDTHS: f64 = 8.0;

/// Minimal coverage beyond the shifted centres, in units of `Δ`.
pub const REQUIRED_MARGIN_WIDTHS: f64 = 6.0;

/// Relative height above which a local maximum counts as a peak.
pub const PEAK_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPointer {
    delta: f64,
    grid: Grid1D,
}

impl GaussianPointer {
    pub fn new(delta: f64, grid: Grid1D) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", "must be positive and finite"));
        }
        Ok(Self { delta, grid })
    }

    /// Default grid: `DEFAULT_POINTER_POINTS` points over `±(max_shift + 8Δ)`.
    pub fn for_shifts(delta: f64, max_shift: f64) -> Result<Self> {
        Self::with_points(delta, max_shift, DEFAULT_POINTER_POINTS)
    }

    pub fn with_points(delta: f64, max_shift: f64, points: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", "must be positive and finite"));
        }
        let half = max_shift.abs() + DEFAULT_MARGIN_WIDTHS * delta;
        Self::new(delta, Grid1D::symmetric(half, points)?)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitude(&self, q: f64) -> f64 {
        let d = self.delta;
        (d * d * PI).powf(-0.25) * (-q * q / (2.0 * d * d)).exp()
    }

    pub fn initial(&self) -> WaveFunction1D {
        WaveFunction1D::gaussian(self.grid, 0.0, self.delta)
    }

    fn require_covers(&self, shifts: &[f64]) -> Result<()> {
        let lo = shifts.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = shifts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let m = REQUIRED_MARGIN_WIDTHS * self.delta;
        self.grid.require_covers(lo - m, hi + m)
    }
}

/// Coupling `H = g(t) P C` in the impulsive limit, fixed by `∫g dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementModel {
    pub coupling_integral: f64,
    pub impulsive: bool,
}

impl Default for MeasurementModel {
    fn default() -> Self {
        Self { coupling_integral: 1.0, impulsive: true }
    }
}

impl MeasurementModel {
    pub fn new(coupling_integral: f64) -> Result<Self> {
        if !(coupling_integral > 0.0 && coupling_integral.is_finite()) {
            return Err(Error::param("coupling_integral", "must be positive"));
        }
        Ok(Self { coupling_integral, impulsive: true })
    }
}

/// `sum_n P_n |Psi> ⊗ G(Q - g c_n)`, kept per eigenspace.
#[derive(Debug, Clone)]
pub struct JointState {
    pub eigenvalues: Vec<f64>,
    pub system_components: Vec<CVector>,
    pub pointer_branches: Vec<WaveFunction1D>,
}

impl JointState {
    /// Amplitude `<k| ⊗ <Q_j|` of the joint state.
    pub fn amplitude(&self, k: usize, j: usize) -> C64 {
        self.system_components
            .iter()
            .zip(&self.pointer_branches)
            .map(|(s, p)| s[k] * p.amplitudes()[j])
            .sum()
    }

    /// Pointer state after projecting the system onto `<Phi|`.
    pub fn project_system(&self, bra: &CoStateVector) -> Result<WaveFunction1D> {
        let weights: Vec<C64> = self.system_components.iter().map(|s| bra.ket().dotc(s)).collect();
        combine(&self.pointer_branches, &weights)
    }
}

fn combine(branches: &[WaveFunction1D], weights: &[C64]) -> Result<WaveFunction1D> {
    let first = branches.first().ok_or(Error::EmptyDescription)?;
    let mut amps = vec![c(0.0, 0.0); first.amplitudes().len()];
    for (b, w) in branches.iter().zip(weights) {
        for (a, x) in amps.iter_mut().zip(b.amplitudes()) {
            *a += w * x;
        }
    }
    first.with_amplitudes(amps)
}

fn spectrum(obs: &DenseOperator) -> Result<SpectralDecomposition> {
    hermitian_eigendecomposition(obs, DEFAULT_GROUPING_TOL)
}

pub fn joint_state_after_impulse(
    pre: &StateVector,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
    model: &MeasurementModel,
) -> Result<JointState> {
    if pre.dim() != obs.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), found: pre.dim() });
    }
    let spec = spectrum(obs)?;
    let shifts: Vec<f64> = spec.eigenvalues().iter().map(|e| e * model.coupling_integral).collect();
    pointer.require_covers(&shifts)?;
    let mut system_components = Vec::with_capacity(spec.len());
    let mut pointer_branches = Vec::with_capacity(spec.len());
    for (p, s) in spec.projectors().iter().zip(&shifts) {
        system_components.push(p.apply(pre.amplitudes())?);
        pointer_branches.push(WaveFunction1D::gaussian(pointer.grid, *s, pointer.delta));
    }
    Ok(JointState { eigenvalues: spec.eigenvalues().to_vec(), system_components, pointer_branches })
}

/// Probability densities of the pointer in both representations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerResult {
    pub delta: f64,
    pub q: Vec<f64>,
    pub q_prob: Vec<f64>,
    pub p: Vec<f64>,
    pub p_prob: Vec<f64>,
    pub peak: f64,
    pub mean: f64,
    pub p_mean: f64,
}

fn normalized_density(density: Vec<f64>, spacing: f64) -> Result<Vec<f64>> {
    let total: f64 = density.iter().sum::<f64>() * spacing;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::ImpossiblePostSelection);
    }
    Ok(density.into_iter().map(|d| d / total).collect())
}

fn first_moment(x: &[f64], p: &[f64], spacing: f64) -> f64 {
    x.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() * spacing
}

/// Location of the global maximum, refined by a parabola through the three
/// samples around it.
pub fn peak_location(x: &[f64], y: &[f64]) -> f64 {
    let (j, _) = y.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    if j == 0 || j + 1 >= y.len() {
        return x[j];
    }
    let (a, b, cc) = (y[j - 1], y[j], y[j + 1]);
    let denom = a - 2.0 * b + cc;
    if denom == 0.0 {
        return x[j];
    }
    let h = x[j + 1] - x[j];
    x[j] + 0.5 * h * (a - cc) / denom
}

/// Positions of local maxima above `threshold * max`.
pub fn local_maxima(x: &[f64], y: &[f64], threshold: f64) -> Vec<f64> {
    let top = y.iter().copied().fold(0.0, f64::max);
    (1..y.len().saturating_sub(1))
        .filter(|&j| y[j] > y[j - 1] && y[j] >= y[j + 1] && y[j] > threshold * top)
        .map(|j| x[j])
        .collect()
}

impl PointerResult {
    fn from_densities(delta: f64, grid: &Grid1D, q_density: Vec<f64>, p_density: Vec<f64>) -> Result<Self> {
        let pgrid = grid.conjugate();
        let q = grid.coordinates();
        let p = pgrid.coordinates();
        let q_prob = normalized_density(q_density, grid.spacing())?;
        let p_prob = normalized_density(p_density, pgrid.spacing())?;
        let peak = peak_location(&q, &q_prob);
        let mean = first_moment(&q, &q_prob, grid.spacing());
        let p_mean = first_moment(&p, &p_prob, pgrid.spacing());
        Ok(Self { delta, q, q_prob, p, p_prob, peak, mean, p_mean })
    }

    /// Post-selected pointer with the given (unnormalized) position amplitude.
    pub fn from_wavefunction(delta: f64, wf: &WaveFunction1D) -> Result<Self> {
        let pos = wf.to_position();
        if pos.norm_sqr() < 1e-20 {
            return Err(Error::ImpossiblePostSelection);
        }
        let mom = pos.to_momentum();
        Self::from_densities(delta, pos.grid(), pos.density(), mom.density())
    }

    pub fn q_spacing(&self) -> f64 {
        self.q[1] - self.q[0]
    }

    /// `∫ prob dQ` over the grid.
    pub fn q_normalization(&self) -> f64 {
        self.q_prob.iter().sum::<f64>() * self.q_spacing()
    }

    pub fn p_normalization(&self) -> f64 {
        self.p_prob.iter().sum::<f64>() * (self.p[1] - self.p[0])
    }

    pub fn q_std(&self) -> f64 {
        let h = self.q_spacing();
        let m2: f64 = self.q.iter().zip(&self.q_prob).map(|(x, p)| (x - self.mean).powi(2) * p).sum::<f64>() * h;
        m2.sqrt()
    }

    pub fn maxima(&self, threshold: f64) -> Vec<f64> {
        local_maxima(&self.q, &self.q_prob, threshold)
    }

    /// Probability mass in `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let h = self.q_spacing();
        self.q.iter().zip(&self.q_prob).filter(|(x, _)| **x >= lo && **x <= hi).map(|(_, p)| p).sum::<f64>() * h
    }

    pub fn q_csv(&self) -> String {
        series_csv("Q", &self.q, &self.q_prob)
    }

    pub fn p_csv(&self) -> String {
        series_csv("P", &self.p, &self.p_prob)
    }
}

fn series_csv(name: &str, x: &[f64], y: &[f64]) -> String {
    let mut out = format!("{name},prob\n");
    for (a, b) in x.iter().zip(y) {
        out.push_str(&format!("{a:.16e},{b:.16e}\n"));
    }
    out
}

/// `Prob(Q) = sum_n ||P_n Psi||² G²(Q - c_n)`.
pub fn pointer_distribution_preselected(
    pre: &StateVector,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
) -> Result<PointerResult> {
    let joint = joint_state_after_impulse(pre, obs, pointer, &MeasurementModel::default())?;
    let n = pointer.grid.points();
    let mut q_density = vec![0.0; n];
    let mut p_density = vec![0.0; n];
    for (s, b) in joint.system_components.iter().zip(&joint.pointer_branches) {
        let w = s.norm_squared();
        if w == 0.0 {
            continue;
        }
        let mom = fourier_pair(b);
        for j in 0..n {
            q_density[j] += w * b.amplitudes()[j].norm_sqr();
            p_density[j] += w * mom.amplitudes()[j].norm_sqr();
        }
    }
    PointerResult::from_densities(pointer.delta, &pointer.grid, q_density, p_density)
}

/// Pointer amplitude `sum_n A(P_n) G(Q - c_n)` for any description, where
/// `A` is the description's amplitude functional.
pub fn postselected_pointer_state<D: Description>(
    description: &D,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
    model: &MeasurementModel,
) -> Result<WaveFunction1D> {
    if description.dim() != obs.dim() {
        return Err(Error::DimensionMismatch { expected: obs.dim(), found: description.dim() });
    }
    let spec = spectrum(obs)?;
    let shifts: Vec<f64> = spec.eigenvalues().iter().map(|e| e * model.coupling_integral).collect();
    pointer.require_covers(&shifts)?;
    let mut weights = Vec::with_capacity(spec.len());
    let mut branches = Vec::with_capacity(spec.len());
    for (p, s) in spec.projectors().iter().zip(&shifts) {
        weights.push(description.amplitude(p)?);
        branches.push(WaveFunction1D::gaussian(pointer.grid, *s, pointer.delta));
    }
    let wf = combine(&branches, &weights)?;
    if wf.norm_sqr() < 1e-20 {
        return Err(Error::ImpossiblePostSelection);
    }
    Ok(wf)
}

pub fn pointer_distribution_postselected<D: Description>(
    description: &D,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
) -> Result<PointerResult> {
    let wf = postselected_pointer_state(description, obs, pointer, &MeasurementModel::default())?;
    PointerResult::from_wavefunction(pointer.delta, &wf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumShift {
    pub mean_p: f64,
    /// `Δ² · mean_p`, the imaginary part of the weak value it encodes.
    pub inferred_imaginary: f64,
    pub weak_regime: bool,
}

/// Default weak-regime criterion: `Δ ≥ 10 max|c_n|`.
pub const WEAK_REGIME_RATIO: f64 = 10.0;

pub fn momentum_shift_imaginary_part<D: Description>(
    description: &D,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
) -> Result<MomentumShift> {
    let spec = spectrum(obs)?;
    let result = pointer_distribution_postselected(description, obs, pointer)?;
    let d2 = pointer.delta * pointer.delta;
    Ok(MomentumShift {
        mean_p: result.p_mean,
        inferred_imaginary: d2 * result.p_mean,
        weak_regime: pointer.delta >= WEAK_REGIME_RATIO * spec.spectral_radius(),
    })
}

/// Relative L2 distance, in the momentum representation, between the exact
/// post-selected pointer state and its expansion in weak values,
///
/// `G~(P) [exp(-i P C_w) + sum_{k=2}^{order-1} (-iP)^k/k! ((C^k)_w - (C_w)^k)]`.
///
/// `order = 2` keeps the weak value alone; each further order adds one
/// correction term.
pub fn moment_expansion_residual<D: Description>(
    description: &D,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
    order: usize,
) -> Result<f64> {
    if order < 2 {
        return Err(Error::param("order", "must be at least 2"));
    }
    let spec = spectrum(obs)?;
    let overlap = description.overlap()?;
    if overlap.norm() <= description.epsilon() {
        return Err(Error::NearOrthogonal { overlap: overlap.norm(), threshold: description.epsilon() });
    }
    let mut weights = Vec::with_capacity(spec.len());
    for p in spec.projectors() {
        weights.push(description.amplitude(p)? / overlap);
    }
    let cw = weak_value(description, obs)?.value;
    let mut corrections = Vec::new();
    let mut power = DenseOperator::identity(obs.dim());
    for k in 1..order {
        power = power.mul(obs)?;
        if k >= 2 {
            let ck = weak_value(description, &power)?.value;
            corrections.push((k, ck - cw.powu(k as u32)));
        }
    }
    let pgrid = pointer.grid.conjugate();
    let d = pointer.delta;
    let g0 = (d * d / PI).powf(0.25);
    let mut err2 = 0.0;
    let mut ref2 = 0.0;
    for k in 0..pgrid.points() {
        let pk = pgrid.coordinate(k);
        let g = g0 * (-pk * pk * d * d / 2.0).exp();
        let exact: C64 = spec
            .eigenvalues()
            .iter()
            .zip(&weights)
            .map(|(e, w)| w * C64::from_polar(1.0, -pk * e))
            .sum::<C64>()
            * g;
        let mut approx = (c(0.0, -pk) * cw).exp();
        let mut factor = c(1.0, 0.0);
        let mut last = 0;
        for &(n, delta_moment) in &corrections {
            while last < n {
                last += 1;
                factor *= c(0.0, -pk) / last as f64;
            }
            approx += factor * delta_moment;
        }
        approx *= g;
        err2 += (exact - approx).norm_sqr();
        ref2 += exact.norm_sqr();
    }
    if ref2 == 0.0 {
        return Err(Error::ImpossiblePostSelection);
    }
    Ok((err2 / ref2).sqrt())
}

/// Which statistics the ensemble is drawn from.
#[derive(Debug, Clone)]
pub enum Selection<D: Description> {
    Preselected(StateVector),
    Postselected(D),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub n_samples: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// Draws `n_samples` readings from a pointer distribution by inverting its
/// cumulative distribution (piecewise-constant density per grid cell).
pub fn sample_readings(result: &PointerResult, n_samples: usize, seed: u64) -> Result<Vec<f64>> {
    if n_samples == 0 {
        return Err(Error::param("n_samples", "must be at least 1"));
    }
    let h = result.q_spacing();
    let mut cdf = Vec::with_capacity(result.q_prob.len());
    let mut acc = 0.0;
    for p in &result.q_prob {
        acc += p * h;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q0 = result.q[0] - 0.5 * h;
    Ok((0..n_samples)
        .map(|_| {
            let u: f64 = rng.gen::<f64>() * total;
            let j = cdf.partition_point(|&v| v < u).min(cdf.len() - 1);
            let lo = if j == 0 { 0.0 } else { cdf[j - 1] };
            let width = cdf[j] - lo;
            let frac = if width > 0.0 { (u - lo) / width } else { 0.5 };
            q0 + (j as f64 + frac) * h
        })
        .collect())
}

pub fn estimate_from_samples(samples: &[f64], seed: u64) -> EnsembleEstimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    EnsembleEstimate { n_samples: samples.len(), mean, std: var.sqrt(), stderr: (var / n).sqrt(), seed }
}

pub fn ensemble_mean_estimator<D: Description>(
    selection: &Selection<D>,
    obs: &DenseOperator,
    pointer: &GaussianPointer,
    n_samples: usize,
    seed: u64,
) -> Result<EnsembleEstimate> {
    let result = match selection {
        Selection::Preselected(pre) => pointer_distribution_preselected(pre, obs, pointer)?,
        Selection::Postselected(d) => pointer_distribution_postselected(d, obs, pointer)?,
    };
    Ok(estimate_from_samples(&sample_readings(&result, n_samples, seed)?, seed))
}

/// Which Gaussian centres the N-spin closed form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpinCenters {
    /// `(N - 2i)/N`, spanning the spectrum of `sum sigma_xi / N`.
    #[default]
    Derived,
    /// `(2N - i)/N`, kept for comparison.
    Printed,
}

/// Binomial coefficient as `f64` (exact up to N ≈ 60).
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weights and centres of the N-spin post-selected pointer amplitude for
/// `C = sum_k sigma_xi^(k) / N`, pre-selection `∏|up_x>` and post-selection
/// `∏<up_y|`. Up to a global phase each spin contributes `cos²(π/8)` to the
/// `+1` branch and `-sin²(π/8)` to the `-1` branch.
pub fn n_spin_terms(n: usize, centers: SpinCenters) -> Vec<(f64, f64)> {
    let c2 = (PI / 8.0).cos().powi(2);
    let s2 = (PI / 8.0).sin().powi(2);
    (0..=n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * binomial(n, i) * c2.powi((n - i) as i32) * s2.powi(i as i32);
            let centre = match centers {
                SpinCenters::Derived => (n as f64 - 2.0 * i as f64) / n as f64,
                SpinCenters::Printed => (2.0 * n as f64 - i as f64) / n as f64,
            };
            (w, centre)
        })
        .collect()
}

pub fn n_spin_pointer_closed_form(n: usize, pointer: &GaussianPointer, centers: SpinCenters) -> Result<PointerResult> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let terms = n_spin_terms(n, centers);
    let shifts: Vec<f64> = terms.iter().map(|t| t.1).collect();
    pointer.require_covers(&shifts)?;
    let amps = pointer
        .grid
        .coordinates()
        .into_iter()
        .map(|q| c(terms.iter().map(|(w, x)| w * pointer.amplitude(q - x)).sum(), 0.0))
        .collect();
    let wf = WaveFunction1D::new(pointer.grid, amps, Representation::Position)?;
    PointerResult::from_wavefunction(pointer.delta, &wf)
}

/// The same N-spin experiment on the full `2^n`-dimensional space.
pub fn n_spin_tensor_description(n: usize) -> Result<(TwoStateVector, DenseOperator)> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    let up_x = StateVector::spin_up([1.0, 0.0, 0.0])?;
    let up_y = StateVector::spin_up([0.0, 1.0, 0.0])?;
    let mut pre = up_x.clone();
    let mut post = up_y.clone();
    for _ in 1..n {
        pre = pre.tensor(&up_x)?;
        post = post.tensor(&up_y)?;
    }
    let xi = DenseOperator::spin_along([1.0, 1.0, 0.0])?;
    let mut total = DenseOperator::zeros(1 << n);
    for site in 0..n {
        total = total.add(&embed(&xi, site, n)?)?;
    }
    Ok((TwoStateVector::new(post.dual(), pre)?, total.scale(1.0 / n as f64)))
}

/// `sum_n alpha_n f(Q - c_n)`, evaluated exactly for band-limited `f` by
/// multiplying the spectrum with `sum_n alpha_n exp(-i P c_n)`.
pub fn shift_superposition(f: &WaveFunction1D, weights: &[C64], shifts: &[f64]) -> Result<WaveFunction1D> {
    if weights.len() != shifts.len() {
        return Err(Error::DimensionMismatch { expected: weights.len(), found: shifts.len() });
    }
    if weights.is_empty() {
        return Err(Error::EmptyDescription);
    }
    let span = f.grid().span();
    for &s in shifts {
        if !s.is_finite() || s.abs() >= span / 2.0 {
            return Err(Error::GridOverflow { shift: s, span });
        }
    }
    spectral_multiply(f, |p| weights.iter().zip(shifts).map(|(w, s)| w * C64::from_polar(1.0, -p * s)).sum())
}

/// Applies a multiplier `m(P)` in the momentum representation and returns
/// to position space.
pub fn spectral_multiply(f: &WaveFunction1D, m: impl Fn(f64) -> C64) -> Result<WaveFunction1D> {
    let mom = f.to_momentum();
    let pgrid = mom.active_grid();
    let amps: Vec<C64> = mom.amplitudes().iter().enumerate().map(|(k, a)| a * m(pgrid.coordinate(k))).collect();
    Ok(mom.with_amplitudes(amps)?.to_position())
}

/// Exact derivative of a periodic sampled function, used for `<i d/dp>`.
pub fn spectral_derivative(values: &[C64], spacing: f64) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 2.0 * PI / (n as f64 * spacing);
    for (k, b) in buf.iter_mut().enumerate() {
        let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        let freq = if n % 2 == 0 && k == n / 2 { 0.0 } else { freq };
        *b *= c(0.0, freq * scale) / n as f64;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}
