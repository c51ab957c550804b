//! Binomial superpositions of small time shifts that mimic one large shift.
//!
//! With `alpha_n = C(N,n) eta^n (1-eta)^(N-n)` and shifts `c_n = n dt / N`,
//! `sum_n alpha_n f(t - c_n)` approximates `f(t - eta dt)` for band-limited
//! `f`. In frequency space the multiplier is
//! `S(w) = sum_n alpha_n e^{-i w c_n} = (eta e^{-i w dt/N} + 1 - eta)^N`.
//! For `eta > 1` the weights alternate in sign and `sum |alpha_n|` reaches
//! `(2 eta - 1)^N`, so the weights are kept exactly (every `f64` is a dyadic
//! rational) and summed in double-double arithmetic.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::numerics::{c, Grid1D, WaveFunction1D, C64};

pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const EARTH_MASS: f64 = 5.972_2e24;

/// Spectral components below `NOISE_FLOOR * max|f^|` are rounding noise and
/// are dropped wherever the multiplier would amplify them.
pub const NOISE_FLOOR: f64 = 16.0 * f64::EPSILON;

/// Bound on the spectral weight above a quarter of the Nyquist frequency.
pub const BAND_LIMIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeMachineConfig {
    pub n_terms: usize,
    pub eta: f64,
    pub delta_t: f64,
    pub external_t: f64,
    pub shell_mass: f64,
    pub r0: f64,
    pub grav_const: f64,
    pub light_speed: f64,
}

impl Default for TimeMachineConfig {
    fn default() -> Self {
        Self {
            n_terms: 13,
            eta: 10.0,
            delta_t: 1.0,
            external_t: 1e12,
            shell_mass: EARTH_MASS,
            r0: 6.4e6,
            grav_const: GRAVITATIONAL_CONSTANT,
            light_speed: SPEED_OF_LIGHT,
        }
    }
}

impl TimeMachineConfig {
    pub fn schwarzschild_radius(&self) -> f64 {
        2.0 * self.grav_const * self.shell_mass / (self.light_speed * self.light_speed)
    }

    /// `dt = 0` is accepted: it is the degenerate case where every branch
    /// carries the same shift.
    pub fn validate(&self) -> Result<()> {
        if self.n_terms == 0 {
            return Err(Error::param("n_terms", "must be at least 1"));
        }
        if !self.eta.is_finite() {
            return Err(Error::param("eta", "must be finite"));
        }
        if !(self.delta_t >= 0.0 && self.delta_t.is_finite()) {
            return Err(Error::param("delta_t", "must be finite and non-negative"));
        }
        if !(self.external_t > 0.0 && self.external_t.is_finite()) {
            return Err(Error::param("external_t", "must be positive"));
        }
        if !(self.grav_const > 0.0 && self.light_speed > 0.0 && self.shell_mass >= 0.0) {
            return Err(Error::param("shell_mass", "mass, G and c must be non-negative and G, c positive"));
        }
        if !(self.r0 > self.schwarzschild_radius()) {
            return Err(Error::param("r0", "must exceed the Schwarzschild radius 2GM/c^2"));
        }
        Ok(())
    }
}

/// Weights of the binomial expansion of `(eta + (1 - eta))^N`.
#[derive(Debug, Clone)]
pub struct BinomialSchedule {
    n: usize,
    eta: f64,
    exact: Vec<BigRational>,
    weights: Vec<TwoFloat>,
}

fn rational_to_twofloat(r: &BigRational) -> TwoFloat {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return TwoFloat::from(hi);
    }
    let rest = r - BigRational::from_float(hi).expect("finite");
    TwoFloat::new_add(hi, rest.to_f64().unwrap_or(0.0))
}

impl BinomialSchedule {
    pub fn new(n: usize, eta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n_terms", "must be at least 1"));
        }
        let e = BigRational::from_float(eta).ok_or_else(|| Error::param("eta", "must be finite"))?;
        let one_minus = BigRational::one() - &e;
        let mut exact = Vec::with_capacity(n + 1);
        let mut binom = BigInt::one();
        for k in 0..=n {
            if k > 0 {
                binom = binom * BigInt::from(n - k + 1) / BigInt::from(k);
            }
            let term = BigRational::from_integer(binom.clone()) * pow(&e, k) * pow(&one_minus, n - k);
            exact.push(term);
        }
        let weights = exact.iter().map(rational_to_twofloat).collect();
        Ok(Self { n, eta, exact, weights })
    }

    pub fn n_terms(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `c_n = n / N`.
    pub fn shifts(&self) -> Vec<f64> {
        (0..=self.n).map(|k| k as f64 / self.n as f64).collect()
    }

    /// Weights rounded to `f64`.
    pub fn weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| f64::from(*w)).collect()
    }

    pub fn weights_double_double(&self) -> &[TwoFloat] {
        &self.weights
    }

    /// `(ln|alpha_n|, sign)`; zero weights give `(-inf, 0)`.
    pub fn log_magnitudes(&self) -> Vec<(f64, i8)> {
        let n = self.n;
        let ln_eta = self.eta.abs().ln();
        let ln_rest = (1.0 - self.eta).abs().ln();
        let mut ln_binom = 0.0;
        (0..=n)
            .map(|k| {
                if k > 0 {
                    ln_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
                }
                let sign = self.exact[k].signum().to_i8().unwrap_or(0);
                if sign == 0 {
                    (f64::NEG_INFINITY, 0)
                } else {
                    (ln_binom + k as f64 * ln_eta + (n - k) as f64 * ln_rest, sign)
                }
            })
            .collect()
    }

    /// `sum alpha_n`, exactly 1 by the binomial theorem.
    pub fn sum(&self) -> f64 {
        let s: BigRational = self.exact.iter().sum();
        s.to_f64().unwrap_or(f64::NAN)
    }

    /// `sum alpha_n` accumulated in double-double from the rounded weights.
    pub fn compensated_sum(&self) -> f64 {
        f64::from(self.weights.iter().fold(TwoFloat::from(0.0), |acc, w| acc + *w))
    }

    pub fn sum_abs(&self) -> f64 {
        self.exact.iter().map(|r| r.abs()).sum::<BigRational>().to_f64().unwrap_or(f64::INFINITY)
    }

    /// `sum alpha_n^2`.
    pub fn sum_squares(&self) -> f64 {
        self.exact.iter().map(|r| r * r).sum::<BigRational>().to_f64().unwrap_or(f64::INFINITY)
    }

    /// `log10 sum alpha_n^2`, usable when the sum itself overflows.
    pub fn log10_sum_squares(&self) -> f64 {
        let s: BigRational = self.exact.iter().map(|r| r * r).sum();
        if s.is_zero() {
            return f64::NEG_INFINITY;
        }
        let digits = s.numer().to_string().len() as i64 - s.denom().to_string().len() as i64;
        let scale = BigRational::from_integer(BigInt::from(10).pow(digits.unsigned_abs() as u32));
        let scaled = if digits >= 0 { s / scale } else { s * scale };
        scaled.to_f64().unwrap_or(f64::NAN).log10() + digits as f64
    }

    /// `S(w) = (eta e^{-i w dt/N} + 1 - eta)^N`.
    pub fn multiplier(&self, omega: f64, delta_t: f64) -> C64 {
        let z = C64::from_polar(1.0, -omega * delta_t / self.n as f64);
        (z * self.eta + (1.0 - self.eta)).powu(self.n as u32)
    }

    /// `sum_n alpha_n z^n` with `z = e^{-i w dt/N}`, accumulated in
    /// double-double. Agrees with [`Self::multiplier`] while
    /// `sum |alpha_n| * 1e-32` stays small against the result.
    pub fn direct_multiplier(&self, omega: f64, delta_t: f64) -> C64 {
        let z = C64::from_polar(1.0, -omega * delta_t / self.n as f64);
        let (zr, zi) = (TwoFloat::from(z.re), TwoFloat::from(z.im));
        let (mut pr, mut pi) = (TwoFloat::from(1.0), TwoFloat::from(0.0));
        let (mut sr, mut si) = (TwoFloat::from(0.0), TwoFloat::from(0.0));
        for (k, w) in self.weights.iter().enumerate() {
            if k > 0 {
                let nr = pr * zr - pi * zi;
                let ni = pr * zi + pi * zr;
                pr = nr;
                pi = ni;
            }
            sr += *w * pr;
            si += *w * pi;
        }
        c(f64::from(sr), f64::from(si))
    }
}

fn pow(base: &BigRational, k: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..k {
        out *= base;
    }
    out
}

pub fn binomial_schedule(n: usize, eta: f64) -> Result<BinomialSchedule> {
    BinomialSchedule::new(n, eta)
}

/// Momentum-space multiplication with the amplified-noise mask.
fn apply_multiplier(f: &WaveFunction1D, m: impl Fn(f64) -> C64) -> Result<(WaveFunction1D, usize)> {
    let mom = f.to_momentum();
    let pgrid = mom.active_grid();
    let top = mom.amplitudes().iter().map(|a| a.norm()).fold(0.0, f64::max);
    let floor = NOISE_FLOOR * top;
    let mut masked = 0;
    let amps: Vec<C64> = mom
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let s = m(pgrid.coordinate(k));
            if a.norm() < floor && s.norm() > 1.0 {
                masked += 1;
                c(0.0, 0.0)
            } else {
                a * s
            }
        })
        .collect();
    Ok((mom.with_amplitudes(amps)?.to_position(), masked))
}

/// Fraction of `∫|f^|²` carried by `|P|` above a quarter of the Nyquist frequency.
pub fn spectral_tail_fraction(f: &WaveFunction1D) -> f64 {
    let mom = f.to_momentum();
    let pgrid = mom.active_grid();
    let cutoff = PI / f.grid().spacing() / 4.0;
    let mut tail = 0.0;
    let mut total = 0.0;
    for (k, a) in mom.amplitudes().iter().enumerate() {
        let w = a.norm_sqr();
        total += w;
        if pgrid.coordinate(k).abs() > cutoff {
            tail += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

#[derive(Debug, Clone)]
pub struct AmplifiedShift {
    /// `sum_n alpha_n f(t - c_n dt)`.
    pub shifted: WaveFunction1D,
    /// `f(t - eta dt)`.
    pub ideal: WaveFunction1D,
    /// `||shifted - ideal|| / ||f||`.
    pub distortion: f64,
    pub spectral_tail: f64,
    pub band_limit_warning: bool,
    pub masked_components: usize,
}

fn check_margin(f: &WaveFunction1D, shift: f64) -> Result<()> {
    let span = f.grid().span();
    if !shift.is_finite() || shift.abs() >= span / 2.0 {
        return Err(Error::GridOverflow { shift, span });
    }
    Ok(())
}

pub fn amplified_shift(f: &WaveFunction1D, n: usize, eta: f64, delta_t: f64) -> Result<AmplifiedShift> {
    if !(delta_t >= 0.0 && delta_t.is_finite()) {
        return Err(Error::param("delta_t", "must be finite and non-negative"));
    }
    let schedule = BinomialSchedule::new(n, eta)?;
    check_margin(f, eta * delta_t)?;
    check_margin(f, delta_t)?;
    let f = f.to_position();
    let (shifted, masked_components) = apply_multiplier(&f, |w| schedule.multiplier(w, delta_t))?;
    let ideal = crate::pointer::spectral_multiply(&f, |w| C64::from_polar(1.0, -w * eta * delta_t))?;
    let distortion = shifted.distance(&ideal)? / f.norm();
    let spectral_tail = spectral_tail_fraction(&f);
    Ok(AmplifiedShift {
        shifted,
        ideal,
        distortion,
        spectral_tail,
        band_limit_warning: spectral_tail >= BAND_LIMIT_TOLERANCE,
        masked_components,
    })
}

/// `T (1 - sqrt(1 - V²/c²))`, evaluated as `T β² / (1 + sqrt(1 - β²))`.
pub fn sr_dilation(v: f64, t: f64, light_speed: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(Error::param("v", "must be non-negative"));
    }
    if v >= light_speed {
        return Err(Error::param("v", "must be below the speed of light"));
    }
    let b2 = (v / light_speed).powi(2);
    Ok(t * b2 / (1.0 + (1.0 - b2).sqrt()))
}

/// `T (1 - sqrt(1 - 2GM/(c² R)))` in the cancellation-free form.
pub fn gr_dilation(mass: f64, radius: f64, t: f64, grav_const: f64, light_speed: f64) -> Result<f64> {
    let x = 2.0 * grav_const * mass / (light_speed * light_speed * radius);
    if !(radius > 0.0) || !(x < 1.0) {
        return Err(Error::param("radius", "must exceed the Schwarzschild radius 2GM/c^2"));
    }
    Ok(t * x / (1.0 + (1.0 - x).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusForm {
    /// `dt_n = T (sqrt(1 - r_s/R_0) - sqrt(1 - r_s/R_n))`.
    Full,
    /// `dt_n = T (1 - sqrt(1 - r_s/R_n))`, for a negligible initial dilation.
    Simplified,
}

/// Radii `R_n` realizing `dt_n = n dt / N`.
pub fn radius_schedule(config: &TimeMachineConfig, form: RadiusForm) -> Result<Vec<f64>> {
    config.validate()?;
    let rs = config.schwarzschild_radius();
    let t = config.external_t;
    let x0 = rs / config.r0;
    let base = match form {
        RadiusForm::Full => x0 / (1.0 + (1.0 - x0).sqrt()),
        RadiusForm::Simplified => 0.0,
    };
    let n = config.n_terms;
    let mut radii = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let target = k as f64 * config.delta_t / n as f64;
        // d = 1 - sqrt(1 - r_s/R_n)
        let d = base + target / t;
        if !(d < 1.0) {
            return Err(Error::param("delta_t", format!("shift {target} is not reachable with T = {t}")));
        }
        if k == 0 && form == RadiusForm::Full {
            radii.push(config.r0);
            continue;
        }
        let x = d * (2.0 - d);
        radii.push(if x == 0.0 { f64::INFINITY } else { rs / x });
    }
    Ok(radii)
}

/// Amplitudes of the control register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QosState {
    pub amplitudes: Vec<f64>,
}

impl QosState {
    /// `N sum alpha_n |n>` with `N = (sum |alpha_n|²)^(-1/2)`.
    pub fn initial(schedule: &BinomialSchedule) -> Self {
        let w = schedule.weights();
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        Self { amplitudes: w.into_iter().map(|a| a / norm).collect() }
    }

    /// `(N + 1)^(-1/2) sum |n>`.
    pub fn final_state(n: usize) -> Self {
        let a = ((n + 1) as f64).sqrt().recip();
        Self { amplitudes: vec![a; n + 1] }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub norm_sq: f64,
}

#[derive(Debug, Clone)]
pub struct MachineRun {
    pub stages: Vec<Stage>,
    pub initial_qos: QosState,
    pub final_qos: QosState,
    /// `sum_n alpha_n f(t - c_n dt)` from the register pipeline.
    pub final_fn: WaveFunction1D,
    /// Relative L2 gap to the closed-form multiplier path.
    pub path_discrepancy: f64,
    pub distortion: f64,
    /// `N² / (N+1) · ||sum alpha_n f_n||²`.
    pub success_prob: f64,
    pub log10_success_prob: f64,
    /// `N² / (N+1)`, the value for unit overlaps.
    pub unit_overlap_prob: f64,
    /// `N² / N`, the large-N shorthand.
    pub shorthand_prob: f64,
    /// Probability of finding the system in `f(t - eta dt)` just before the
    /// register is post-selected.
    pub direct_projection_bound: f64,
    /// Fidelity of the normalized output with `f(t - eta dt)`.
    pub target_fidelity: f64,
}

/// Full pipeline: product state, shell-correlated state, post-selection.
pub fn run_machine(system_fn: &WaveFunction1D, config: &TimeMachineConfig) -> Result<MachineRun> {
    config.validate()?;
    let schedule = BinomialSchedule::new(config.n_terms, config.eta)?;
    let dt = config.delta_t;
    check_margin(system_fn, config.eta * dt)?;
    check_margin(system_fn, dt)?;
    let f = system_fn.to_position().normalized()?;
    let n = config.n_terms;

    let initial_qos = QosState::initial(&schedule);
    let final_qos = QosState::final_state(n);
    let log10_norm_sq = -schedule.log10_sum_squares();
    let norm_sq = 10f64.powf(log10_norm_sq);

    let branches: Vec<WaveFunction1D> = schedule
        .shifts()
        .iter()
        .map(|s| crate::pointer::spectral_multiply(&f, |w| C64::from_polar(1.0, -w * s * dt)))
        .collect::<Result<_>>()?;
    let product_norm = initial_qos.norm().powi(2) * f.norm_sqr();
    let correlated_norm: f64 =
        initial_qos.amplitudes.iter().zip(&branches).map(|(a, b)| a * a * b.norm_sqr()).sum();

    let (final_fn, _) = apply_multiplier(&f, |w| schedule.direct_multiplier(w, dt))?;
    let (closed, _) = apply_multiplier(&f, |w| schedule.multiplier(w, dt))?;
    let path_discrepancy = final_fn.distance(&closed)? / closed.norm().max(f64::MIN_POSITIVE);

    let target = crate::pointer::spectral_multiply(&f, |w| C64::from_polar(1.0, -w * config.eta * dt))?;
    let distortion = final_fn.distance(&target)?;
    let output_norm_sq = final_fn.norm_sqr();
    let log10_success = log10_norm_sq - ((n + 1) as f64).log10() + output_norm_sq.log10();
    let success_prob = 10f64.powf(log10_success);
    let post_norm = success_prob;

    let mut bound = 0.0;
    for (a, b) in initial_qos.amplitudes.iter().zip(&branches) {
        bound += a * a * target.inner(b)?.norm_sqr();
    }
    let target_fidelity = if output_norm_sq > 0.0 {
        target.inner(&final_fn)?.norm_sqr() / output_norm_sq
    } else {
        0.0
    };

    Ok(MachineRun {
        stages: vec![
            Stage { name: "product".into(), norm_sq: product_norm },
            Stage { name: "correlated".into(), norm_sq: correlated_norm },
            Stage { name: "post_selected".into(), norm_sq: post_norm },
        ],
        initial_qos,
        final_qos,
        final_fn,
        path_discrepancy,
        distortion,
        success_prob,
        log10_success_prob: log10_success,
        unit_overlap_prob: norm_sq / (n + 1) as f64,
        shorthand_prob: norm_sq / n as f64,
        direct_projection_bound: bound,
        target_fidelity,
    })
}

/// Success probability from the closed-form multiplier; valid for any `N`.
pub fn success_probability(f: &WaveFunction1D, n: usize, eta: f64, delta_t: f64) -> Result<f64> {
    Ok(10f64.powf(log10_success_probability(f, n, eta, delta_t)?))
}

pub fn log10_success_probability(f: &WaveFunction1D, n: usize, eta: f64, delta_t: f64) -> Result<f64> {
    let schedule = BinomialSchedule::new(n, eta)?;
    check_margin(f, eta * delta_t)?;
    let f = f.to_position().normalized()?;
    let (out, _) = apply_multiplier(&f, |w| schedule.multiplier(w, delta_t))?;
    Ok(-schedule.log10_sum_squares() - ((n + 1) as f64).log10() + out.norm_sqr().log10())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n_terms: usize,
    pub log10_success_prob: f64,
    /// Per-step ratio `(Prob(N_k) / Prob(N_{k-1}))^(1/(N_k - N_{k-1}))`.
    pub step_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingProbe {
    pub eta: f64,
    pub rows: Vec<ScalingRow>,
    /// `1 / (2 eta - 1)`.
    pub claimed_ratio: f64,
    /// `1 / (2 eta - 1)²`, the asymptote of the binomial register.
    pub register_asymptote: f64,
}

impl ScalingProbe {
    pub fn last_ratio(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.step_ratio)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n_terms,log10_success_prob,step_ratio\n");
        for r in &self.rows {
            let ratio = r.step_ratio.map(|x| format!("{x:.16e}")).unwrap_or_default();
            out.push_str(&format!("{},{:.16e},{}\n", r.n_terms, r.log10_success_prob, ratio));
        }
        out
    }
}

pub fn success_scaling_probe(f: &WaveFunction1D, eta: f64, n_range: &[usize], delta_t: f64) -> Result<ScalingProbe> {
    if n_range.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("n_range", "must be strictly ascending"));
    }
    let mut rows: Vec<ScalingRow> = Vec::with_capacity(n_range.len());
    for &n in n_range {
        let lp = log10_success_probability(f, n, eta, delta_t)?;
        let step_ratio = rows.last().map(|prev| {
            let steps = (n - prev.n_terms) as f64;
            10f64.powf((lp - prev.log10_success_prob) / steps)
        });
        rows.push(ScalingRow { n_terms: n, log10_success_prob: lp, step_ratio });
    }
    let k = 2.0 * eta - 1.0;
    Ok(ScalingProbe { eta, rows, claimed_ratio: 1.0 / k, register_asymptote: 1.0 / (k * k) })
}

/// Grid and test function used for the large-shift illustration.
pub fn figure5_setup(sigma: f64) -> Result<WaveFunction1D> {
    let grid = Grid1D::new(-60.0, 70.0, 4096)?;
    Ok(WaveFunction1D::gaussian(grid, 0.0, sigma))
}

/// `t, original, superposed, shifted` columns of `|.|²`.
pub fn figure5_csv(result: &AmplifiedShift, original: &WaveFunction1D) -> String {
    let mut out = String::from("t,original,superposed,shifted\n");
    let grid = original.grid();
    for j in 0..grid.points() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            grid.coordinate(j),
            original.amplitudes()[j].norm_sqr(),
            result.shifted.amplitudes()[j].norm_sqr(),
            result.ideal.amplitudes()[j].norm_sqr()
        ));
    }
    out
}
