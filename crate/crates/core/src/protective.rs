//! Protective measurements.
//!
//! The pointer couples through `g(t) p A`, which commutes with the pointer
//! momentum. Every momentum value therefore evolves as an independent block
//! of the system alone, and the pointer wavefunction is reassembled from the
//! block amplitudes. The pointer position is `Q = i d/dp`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    c, hermitian_eigendecomposition, CMatrix, CVector, DenseOperator, Grid1D, Representation, TensorProduct,
    WaveFunction1D, C64, DEFAULT_GROUPING_TOL,
};
use crate::pointer::spectral_derivative;
use crate::states::{CoStateVector, StateVector, TwoStateVector};
use crate::weak::weak_value;

/// Leakage between instantaneous eigenstates above which a run is flagged.
pub const LEAKAGE_FLAG: f64 = 0.01;
pub const MIN_STEPS: usize = 100;
pub const MAX_SPIN: usize = 2048;
pub const POSTSELECTION_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticSchedule {
    pub total_time: f64,
    pub ramp_fraction: f64,
    pub steps: usize,
}

impl AdiabaticSchedule {
    /// Ten percent cosine ramps and `max(100, 5T)` steps.
    pub fn new(total_time: f64) -> Result<Self> {
        let steps = MIN_STEPS.max((5.0 * total_time).ceil() as usize);
        Self::with(total_time, 0.1, steps)
    }

    pub fn with(total_time: f64, ramp_fraction: f64, steps: usize) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::param("total_time", "must be positive and finite"));
        }
        if !(ramp_fraction > 0.0 && ramp_fraction < 0.5) {
            return Err(Error::param("ramp_fraction", "must lie in (0, 0.5)"));
        }
        if steps < MIN_STEPS {
            return Err(Error::param("steps", format!("must be at least {MIN_STEPS}")));
        }
        Ok(Self { total_time, ramp_fraction, steps })
    }

    /// Coupling `g(t)`: cosine ramps joined by a plateau, normalised so that
    /// `∫ g dt = 1`.
    pub fn g(&self, t: f64) -> f64 {
        let tt = self.total_time;
        let tr = self.ramp_fraction * tt;
        let shape = if t <= 0.0 || t >= tt {
            0.0
        } else if t < tr {
            0.5 * (1.0 - (PI * t / tr).cos())
        } else if t > tt - tr {
            0.5 * (1.0 - (PI * (tt - t) / tr).cos())
        } else {
            1.0
        };
        shape / (tt * (1.0 - self.ramp_fraction))
    }

    pub fn step(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Midpoint times of the piecewise-constant steps.
    pub fn midpoints(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.step();
        (0..self.steps).map(move |k| (k as f64 + 0.5) * dt)
    }
}

/// Pointer prepared as a Gaussian in momentum with spread `p0`:
/// `phi(p) = (2 pi p0²)^(-1/4) exp(-p² / (4 p0²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPointer {
    p0: f64,
    grid: Grid1D,
}

impl MomentumPointer {
    /// 1024 momenta covering `±10 p0`.
    pub fn new(p0: f64) -> Result<Self> {
        Self::with_points(p0, 1024, 10.0)
    }

    pub fn with_points(p0: f64, points: usize, extent: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0.is_finite()) {
            return Err(Error::param("p0", "must be positive and finite"));
        }
        if !(extent >= 6.0) {
            return Err(Error::param("extent", "must cover at least six momentum widths"));
        }
        // Position grid whose conjugate reaches ±extent·p0.
        let h = PI / (extent * p0);
        let min = -h * (points / 2) as f64;
        let grid = Grid1D::new(min, min + h * (points - 1) as f64, points)?;
        Ok(Self { p0, grid })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn momenta(&self) -> Vec<f64> {
        self.grid.conjugate().coordinates()
    }

    pub fn dp(&self) -> f64 {
        self.grid.conjugate().spacing()
    }

    pub fn amplitude(&self, p: f64) -> f64 {
        (2.0 * PI * self.p0 * self.p0).powf(-0.25) * (-p * p / (4.0 * self.p0 * self.p0)).exp()
    }

    /// `<Q> = <f| i d/dp |f> / <f|f>`.
    pub fn mean_position(&self, f: &[C64]) -> f64 {
        let d = spectral_derivative(f, self.dp());
        let num: f64 = f.iter().zip(&d).map(|(a, b)| (a.conj() * c(0.0, 1.0) * b).re).sum();
        let den: f64 = f.iter().map(|a| a.norm_sqr()).sum();
        num / den
    }

    pub fn norm_sqr(&self, f: &[C64]) -> f64 {
        f.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.dp()
    }

    /// Position-space pointer wavefunction for momentum amplitudes `f`.
    pub fn to_position(&self, f: &[C64]) -> Result<WaveFunction1D> {
        Ok(WaveFunction1D::new(self.grid, f.to_vec(), Representation::Momentum)?.to_position())
    }
}

/// `exp(-i H t)` for a Hermitian matrix.
fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -e * t)));
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    vd * v.adjoint()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    pub eigenvalue: f64,
    pub state: StateVector,
    /// Probability of this branch, `|alpha_i|²` in the adiabatic limit.
    pub weight: f64,
    pub shift: f64,
    /// `<E_i|A|E_i>`.
    pub expectation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdiabaticReport {
    pub pointer_shift: f64,
    pub branches: Vec<Branch>,
    pub gap: f64,
    /// Largest pointer-averaged probability of leaving an eigenstate.
    pub leakage: f64,
    pub leakage_flagged: bool,
    #[serde(skip)]
    pub pointer: Vec<C64>,
}

impl AdiabaticReport {
    pub fn outcome_probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.weight).collect()
    }
}

pub fn adiabatic_protective_measurement(
    h0: &DenseOperator,
    a: &DenseOperator,
    initial: &StateVector,
    schedule: &AdiabaticSchedule,
    pointer: &MomentumPointer,
) -> Result<AdiabaticReport> {
    let d = h0.dim();
    for (dim, _) in [(a.dim(), "a"), (initial.dim(), "initial")] {
        if dim != d {
            return Err(Error::DimensionMismatch { expected: d, found: dim });
        }
    }
    h0.require_hermitian()?;
    a.require_hermitian()?;
    let spec = hermitian_eigendecomposition(h0, DEFAULT_GROUPING_TOL)?;
    if spec.len() != d {
        return Err(Error::DegenerateSpectrum { gap: 0.0 });
    }
    let gap = spec.min_gap();
    let eigvecs: Vec<CVector> = (0..d).map(|i| spec.eigenvectors(i)[0].clone()).collect();
    let psi0 = initial.normalized();
    let ps = pointer.momenta();
    let dt = schedule.step();
    let g: Vec<f64> = schedule.midpoints().map(|t| schedule.g(t)).collect();

    // Full evolution operator per momentum block, in a fixed order.
    let blocks: Vec<CMatrix> = ps
        .par_iter()
        .map(|&p| {
            let mut u = CMatrix::identity(d, d);
            for &gk in &g {
                let h = h0.matrix() + a.matrix() * c(gk * p, 0.0);
                u = expm_hermitian(&h, dt) * u;
            }
            u
        })
        .collect();

    let phi: Vec<f64> = ps.iter().map(|&p| pointer.amplitude(p)).collect();
    let total_phi: f64 = phi.iter().map(|x| x * x).sum();
    let mut leakage: f64 = 0.0;
    for (i, e) in eigvecs.iter().enumerate() {
        let stay: f64 = blocks
            .iter()
            .zip(&phi)
            .map(|(u, w)| (e.adjoint() * u * &eigvecs[i])[0].norm_sqr() * w * w)
            .sum::<f64>()
            / total_phi;
        leakage = leakage.max(1.0 - stay);
    }

    let evolved: Vec<CVector> = blocks.iter().map(|u| u * psi0.amplitudes()).collect();
    let mut branches = Vec::with_capacity(d);
    let mut pointer_total = vec![c(0.0, 0.0); ps.len()];
    let mut total_weight = 0.0;
    let mut weighted_shift = 0.0;
    for (i, e) in eigvecs.iter().enumerate() {
        let f: Vec<C64> = evolved.iter().zip(&phi).map(|(v, w)| e.dotc(v) * *w).collect();
        let weight = pointer.norm_sqr(&f);
        let shift = if weight > 0.0 { pointer.mean_position(&f) } else { f64::NAN };
        let expectation = (e.adjoint() * a.matrix() * e)[0].re;
        for (acc, x) in pointer_total.iter_mut().zip(&f) {
            *acc += x.norm_sqr();
        }
        if weight > 0.0 {
            total_weight += weight;
            weighted_shift += weight * shift;
        }
        branches.push(Branch { eigenvalue: spec.eigenvalues()[i], state: StateVector::new(e.clone())?, weight, shift, expectation });
    }
    Ok(AdiabaticReport {
        pointer_shift: weighted_shift / total_weight,
        branches,
        gap,
        leakage,
        leakage_flagged: leakage > LEAKAGE_FLAG,
        pointer: pointer_total,
    })
}

/// Runs the measurement again on the state left by branch `index`.
pub fn repeat_on_branch(
    report: &AdiabaticReport,
    index: usize,
    h0: &DenseOperator,
    a: &DenseOperator,
    schedule: &AdiabaticSchedule,
    pointer: &MomentumPointer,
) -> Result<AdiabaticReport> {
    let branch = report
        .branches
        .get(index)
        .ok_or_else(|| Error::param("index", format!("no branch {index}")))?;
    adiabatic_protective_measurement(h0, a, &branch.state, schedule, pointer)
}

/// Spin-`N` operators in the `|S_z = m>` basis, `m = N, ..., -N`.
#[derive(Debug, Clone)]
pub struct LargeSpin {
    spin_n: usize,
    ops: [DenseOperator; 3],
}

impl LargeSpin {
    pub fn new(spin_n: usize) -> Result<Self> {
        if spin_n == 0 || spin_n > MAX_SPIN {
            return Err(Error::param("spin_n", format!("must lie in 1..={MAX_SPIN}")));
        }
        let d = 2 * spin_n + 1;
        let j = spin_n as f64;
        let m = |k: usize| j - k as f64;
        let mut plus = CMatrix::zeros(d, d);
        for k in 1..d {
            plus[(k - 1, k)] = c((j * (j + 1.0) - m(k) * (m(k) + 1.0)).sqrt(), 0.0);
        }
        let minus = plus.adjoint();
        let sx = (&plus + &minus) * c(0.5, 0.0);
        let sy = (&plus - &minus) * c(0.0, -0.5);
        let sz = CMatrix::from_diagonal(&CVector::from_iterator(d, (0..d).map(|k| c(m(k), 0.0))));
        Ok(Self {
            spin_n,
            ops: [DenseOperator::hermitian(sx)?, DenseOperator::hermitian(sy)?, DenseOperator::hermitian(sz)?],
        })
    }

    pub fn spin_n(&self) -> usize {
        self.spin_n
    }

    pub fn dim(&self) -> usize {
        2 * self.spin_n + 1
    }

    pub fn sx(&self) -> &DenseOperator {
        &self.ops[0]
    }

    pub fn sy(&self) -> &DenseOperator {
        &self.ops[1]
    }

    pub fn sz(&self) -> &DenseOperator {
        &self.ops[2]
    }

    pub fn components(&self) -> &[DenseOperator; 3] {
        &self.ops
    }

    /// `n . S` for a real direction.
    pub fn along(&self, direction: [f64; 3]) -> Result<DenseOperator> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::param("direction", "must be a finite nonzero vector"));
        }
        self.ops[0]
            .scale(direction[0] / norm)
            .add(&self.ops[1].scale(direction[1] / norm))?
            .add(&self.ops[2].scale(direction[2] / norm))
    }

    /// `|S_n = N>`.
    pub fn top_state(&self, direction: [f64; 3]) -> Result<StateVector> {
        let spec = hermitian_eigendecomposition(&self.along(direction)?, DEFAULT_GROUPING_TOL)?;
        StateVector::new(spec.eigenvectors(spec.len() - 1)[0].clone())
    }

    /// `max |[S_x, S_y] - i S_z|`, relative to `N`.
    pub fn commutator_defect(&self) -> f64 {
        let comm = self.ops[0].matrix() * self.ops[1].matrix() - self.ops[1].matrix() * self.ops[0].matrix();
        max_abs(&(comm - self.ops[2].matrix() * c(0.0, 1.0))) / self.spin_n as f64
    }

    /// `max |S² - N(N+1) I|`, relative to `N(N+1)`.
    pub fn casimir_defect(&self) -> f64 {
        let n = self.spin_n as f64;
        let s2: CMatrix = self.ops.iter().map(|o| o.matrix() * o.matrix()).sum();
        max_abs(&(s2 - CMatrix::identity(self.dim(), self.dim()) * c(n * (n + 1.0), 0.0))) / (n * (n + 1.0))
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn pauli() -> [DenseOperator; 3] {
    [DenseOperator::pauli_x(), DenseOperator::pauli_y(), DenseOperator::pauli_z()]
}

/// `-λ (w · σ)` for a complex vector `w`.
fn contract(w: &[C64; 3], sigma: &[DenseOperator; 3], lambda: f64) -> Result<DenseOperator> {
    let d = sigma[0].dim();
    let mut m = CMatrix::zeros(d, d);
    for (wk, s) in w.iter().zip(sigma) {
        m += s.matrix() * (wk * -lambda);
    }
    DenseOperator::new(m)
}

/// Weak values of `(S_x, S_y, S_z)` for the protector.
pub fn spin_weak_vector(protector: &TwoStateVector, spin: &LargeSpin) -> Result<[C64; 3]> {
    let mut w = [c(0.0, 0.0); 3];
    for (k, op) in spin.components().iter().enumerate() {
        w[k] = weak_value(protector, op)?.value;
    }
    Ok(w)
}

/// `H_eff = -λ S_w · σ` on the protected spin-1/2, with `S_w` the weak-value
/// vector of the protector.
pub fn weak_value_substituted_hamiltonian(protector: &TwoStateVector, spin: &LargeSpin, lambda: f64) -> Result<DenseOperator> {
    let w = spin_weak_vector(protector, spin)?;
    contract(&w, &pauli(), lambda)
}

/// `<S_beta = N|| |S_alpha = N>`.
pub fn protector_description(spin: &LargeSpin, alpha: [f64; 3], beta: [f64; 3]) -> Result<TwoStateVector> {
    TwoStateVector::new(spin.top_state(beta)?.dual(), spin.top_state(alpha)?)
}

/// `-λ Σ_k S_k ⊗ σ_k`.
fn coupling(spin: &LargeSpin, sigma: &[DenseOperator; 3], lambda: f64) -> Result<CMatrix> {
    let d = spin.dim() * sigma[0].dim();
    let mut m = CMatrix::zeros(d, d);
    for (s, sig) in spin.components().iter().zip(sigma) {
        m += s.tensor(sig)?.matrix() * c(-lambda, 0.0);
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtectedReport {
    pub shift: f64,
    /// `Re (σ_ξ)_w` of the protected two-state vector.
    pub target_value: f64,
    pub error: f64,
    pub lambda_n_over_p0: f64,
    pub postselection_probability: f64,
    #[serde(skip)]
    pub pointer: Vec<C64>,
}

/// Joint simulation of protector ⊗ spin-1/2 ⊗ pointer for unit time under
/// `H = -λ S·σ + p σ_ξ`, pre-selecting `|S_alpha=N>|up_alpha>` and
/// post-selecting `<S_beta=N|<up_beta|`.
pub fn protected_two_state_measurement(
    alpha: [f64; 3],
    beta: [f64; 3],
    obs: &DenseOperator,
    spin_n: usize,
    lambda: f64,
    pointer: &MomentumPointer,
) -> Result<ProtectedReport> {
    if obs.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: obs.dim() });
    }
    obs.require_hermitian()?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", "must be finite and non-negative"));
    }
    let spin = LargeSpin::new(spin_n)?;
    let up_a = StateVector::spin_up(alpha)?;
    let up_b = StateVector::spin_up(beta)?;
    let target = TwoStateVector::new(up_b.dual(), up_a.clone())?;
    let target_value = weak_value(&target, obs)?.re();

    let pre = spin.top_state(alpha)?.tensor(&up_a)?;
    let post = spin.top_state(beta)?.tensor(&up_b)?;
    let h0 = coupling(&spin, &pauli(), lambda)?;
    let v = DenseOperator::identity(spin.dim()).tensor(obs)?.matrix().clone();
    let ps = pointer.momenta();
    let amps: Vec<C64> = ps
        .par_iter()
        .map(|&p| {
            let eig = (&h0 + &v * c(p, 0.0)).symmetric_eigen();
            let left = eig.eigenvectors.adjoint() * post.amplitudes();
            let right = eig.eigenvectors.adjoint() * pre.amplitudes();
            (0..left.len())
                .map(|k| left[k].conj() * right[k] * C64::from_polar(1.0, -eig.eigenvalues[k]))
                .sum::<C64>()
        })
        .collect();
    let f: Vec<C64> = amps.iter().zip(&ps).map(|(a, &p)| a * pointer.amplitude(p)).collect();
    let prob = pointer.norm_sqr(&f);
    if !(prob >= POSTSELECTION_FLOOR) {
        return Err(Error::ImpossiblePostSelection);
    }
    let shift = pointer.mean_position(&f);
    Ok(ProtectedReport {
        shift,
        target_value,
        error: shift - target_value,
        lambda_n_over_p0: lambda * spin_n as f64 / pointer.p0(),
        postselection_probability: prob,
        pointer: f,
    })
}

#[derive(Debug, Clone)]
pub struct ModelSpinProtection {
    /// Model-spin operators `σ~` on the full system space.
    pub sigma: [DenseOperator; 3],
    /// `<Psi_1|Psi_2>` and `<Psi_perp|Psi_2>` (the latter real, non-negative).
    pub a: C64,
    pub b: f64,
    pub psi_perp: StateVector,
    /// Bloch direction of `|Psi_2>` in the model-spin basis.
    pub chi: [f64; 3],
    /// `<S_chi = N|| |S_z = N>`.
    pub protector: TwoStateVector,
    /// `-λ S·σ~` on protector ⊗ system.
    pub hamiltonian: DenseOperator,
    /// `-λ S_w·σ~` on the system.
    pub effective_hamiltonian: DenseOperator,
}

pub fn model_spin_protection(pre: &StateVector, post: &StateVector, spin_n: usize, lambda: f64) -> Result<ModelSpinProtection> {
    let d = pre.dim();
    if d < 2 {
        return Err(Error::param("pre", "dimension must be at least 2"));
    }
    if post.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: post.dim() });
    }
    let u = pre.normalized().into_amplitudes();
    let p2 = post.normalized().into_amplitudes();
    let a = u.dotc(&p2);
    let eps = crate::states::NEAR_ORTHOGONAL_EPS;
    if a.norm() < eps {
        return Err(Error::NearOrthogonal { overlap: a.norm(), threshold: eps });
    }
    let rest = &p2 - &u * a;
    let b = rest.norm();
    let v = if b > 1e-12 {
        rest.unscale(b)
    } else {
        // Any unit vector orthogonal to Psi_1.
        let k = (0..d).min_by(|&i, &j| u[i].norm().total_cmp(&u[j].norm())).unwrap_or(0);
        let mut e = crate::numerics::basis(d, k);
        e -= &u * u.dotc(&e);
        let n = e.norm();
        e.unscale(n)
    };
    let b = v.dotc(&p2).re;
    let uv = &u * v.adjoint();
    let vu = &v * u.adjoint();
    let sigma = [
        DenseOperator::hermitian(&uv + &vu)?,
        DenseOperator::hermitian(&uv * c(0.0, -1.0) + &vu * c(0.0, 1.0))?,
        DenseOperator::hermitian(&u * u.adjoint() - &v * v.adjoint())?,
    ];
    let ab = a.conj() * b;
    let chi = [2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b * b];

    let spin = LargeSpin::new(spin_n)?;
    let protector = protector_description(&spin, [0.0, 0.0, 1.0], chi)?;
    let w = spin_weak_vector(&protector, &spin)?;
    let effective_hamiltonian = contract(&w, &sigma, lambda)?;
    let hamiltonian = DenseOperator::hermitian(coupling(&spin, &sigma, lambda)?)?;
    Ok(ModelSpinProtection {
        sigma,
        a,
        b,
        psi_perp: StateVector::new(v)?,
        chi,
        protector,
        hamiltonian,
        effective_hamiltonian,
    })
}

/// Residuals `||H|Psi_1> - e|Psi_1>||` and `||<Psi_2|H - e<Psi_2|||` with
/// `e = <Psi_2|H|Psi_1> / <Psi_2|Psi_1>`.
pub fn eigen_residuals(h: &DenseOperator, right: &StateVector, left: &CoStateVector) -> (C64, f64, f64) {
    let r = right.amplitudes();
    let l = left.ket();
    let hr = h.matrix() * r;
    let e = l.dotc(&hr) / l.dotc(r);
    let right_res = (&hr - r * e).norm();
    let lh = l.adjoint() * h.matrix();
    let left_res = (lh - l.adjoint() * e).norm();
    (e, right_res, left_res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn schedule_integrates_to_one() {
        let s = AdiabaticSchedule::new(10.0).unwrap();
        let integral: f64 = s.midpoints().map(|t| s.g(t)).sum::<f64>() * s.step();
        assert!((integral - 1.0).abs() < 1e-3);
        assert!(AdiabaticSchedule::with(10.0, 0.1, 99).is_err());
        assert!(AdiabaticSchedule::with(10.0, 0.5, 100).is_err());
    }

    #[test]
    fn spin_algebra() {
        for n in [1, 2, 5, 10, 20] {
            let s = LargeSpin::new(n).unwrap();
            assert!(s.commutator_defect() < 1e-10);
            assert!(s.casimir_defect() < 1e-10);
        }
    }

    #[test]
    fn identity_coupling_shifts_by_one() {
        let sched = AdiabaticSchedule::new(10.0).unwrap();
        let ptr = MomentumPointer::new(1.0).unwrap();
        let r = adiabatic_protective_measurement(
            &DenseOperator::pauli_z(),
            &DenseOperator::identity(2),
            &StateVector::basis(2, 0).unwrap(),
            &sched,
            &ptr,
        )
        .unwrap();
        assert!((r.pointer_shift - 1.0).abs() < 1e-10, "{}", r.pointer_shift);
    }

    #[test]
    fn substituted_hamiltonian_for_x_y() {
        let spin = LargeSpin::new(4).unwrap();
        let prot = protector_description(&spin, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]).unwrap();
        let w = spin_weak_vector(&prot, &spin).unwrap();
        for (got, want) in w.iter().zip([c(4.0, 0.0), c(4.0, 0.0), c(0.0, 4.0)]) {
            assert!((got - want).norm() < 1e-10, "{got}");
        }
        let h = weak_value_substituted_hamiltonian(&prot, &spin, 0.5).unwrap();
        let (e, r, l) = eigen_residuals(
            &h,
            &StateVector::spin_up([1.0, 0.0, 0.0]).unwrap(),
            &StateVector::spin_up([0.0, 1.0, 0.0]).unwrap().dual(),
        );
        assert!((e - c(-2.0, 0.0)).norm() < 1e-10 && r < 1e-10 && l < 1e-10);
    }

    #[test]
    fn two_state_protection_reaches_root_two() {
        let ptr = MomentumPointer::new(1.0).unwrap();
        let xi = DenseOperator::spin_along([1.0, 1.0, 0.0]).unwrap();
        let r = protected_two_state_measurement([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], &xi, 10, 5.0, &ptr).unwrap();
        assert!((r.target_value - SQRT_2).abs() < 1e-12);
        assert!((r.shift - SQRT_2).abs() < 0.02 * SQRT_2, "{}", r.shift);
    }
}
