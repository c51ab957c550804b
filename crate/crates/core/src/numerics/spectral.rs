use nalgebra::SymmetricEigen;

use super::operator::{c, CMatrix, CVector, DenseOperator, C64};
use crate::error::{Error, Result};

/// Default relative tolerance for merging nearly equal eigenvalues.
pub const DEFAULT_GROUPING_TOL: f64 = 1e-9;

/// Eigenvalues grouped into distinct levels, each with its spectral projector.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    projectors: Vec<DenseOperator>,
    /// Orthonormal eigenvectors spanning each projector's range.
    eigenvectors: Vec<Vec<CVector>>,
    grouping_tolerance: f64,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[DenseOperator] {
        &self.projectors
    }

    pub fn eigenvectors(&self, level: usize) -> &[CVector] {
        &self.eigenvectors[level]
    }

    pub fn grouping_tolerance(&self) -> f64 {
        self.grouping_tolerance
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max)
    }

    /// Minimal spacing between distinct levels (infinite for a single level).
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index of the level matching `value` within the grouping tolerance.
    pub fn level_of(&self, value: f64) -> Option<usize> {
        let tol = self.grouping_tolerance * self.spectral_radius().max(1.0);
        self.eigenvalues.iter().position(|&e| (e - value).abs() <= tol)
    }

    /// `sum_n f(c_n) P_n`.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> DenseOperator {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (e, p) in self.eigenvalues.iter().zip(&self.projectors) {
            m += p.matrix() * f(*e);
        }
        DenseOperator::new(m).expect("spectral function of a valid decomposition")
    }

    pub fn reconstruct(&self) -> DenseOperator {
        self.apply_function(|e| c(e, 0.0))
    }
}

/// Eigendecomposition of a Hermitian operator with eigenvalues closer than
/// `tol * spectral_radius` merged into one degenerate level.
pub fn hermitian_eigendecomposition(op: &DenseOperator, tol: f64) -> Result<SpectralDecomposition> {
    if op.dim() == 0 {
        return Err(Error::EmptyDimension);
    }
    op.require_hermitian()?;
    if !(tol >= 0.0) {
        return Err(Error::param("tol", "must be non-negative"));
    }
    // Symmetrise to remove the sub-tolerance anti-Hermitian residue.
    let m = (op.matrix() + op.matrix().adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let radius = eig.eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max);
    let abs_tol = tol * radius;

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        let value = eig.eigenvalues[idx];
        match groups.last_mut() {
            Some(g) if (value - eig.eigenvalues[g[0]]).abs() <= abs_tol => g.push(idx),
            _ => groups.push(vec![idx]),
        }
    }

    let dim = op.dim();
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut projectors = Vec::with_capacity(groups.len());
    let mut eigenvectors = Vec::with_capacity(groups.len());
    for g in groups {
        let mean = g.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / g.len() as f64;
        let vecs: Vec<CVector> = g.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        let mut p = CMatrix::zeros(dim, dim);
        for v in &vecs {
            p += v * v.adjoint();
        }
        eigenvalues.push(mean);
        projectors.push(DenseOperator::hermitian(p)?);
        eigenvectors.push(vecs);
    }
    Ok(SpectralDecomposition { eigenvalues, projectors, eigenvectors, grouping_tolerance: tol })
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn unitary(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    let spec = hermitian_eigendecomposition(h, 0.0)?;
    Ok(spec.apply_function(|e| C64::from_polar(1.0, -e * t)))
}

/// `exp(-i H t) |state>`.
pub fn evolve_unitary(state: &CVector, h: &DenseOperator, t: f64) -> Result<CVector> {
    if state.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: state.len() });
    }
    unitary(h, t)?.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::operator::{basis, real_vec, I};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn identity_has_single_level() {
        let s = hermitian_eigendecomposition(&DenseOperator::identity(3), 1e-8).unwrap();
        assert_eq!(s.eigenvalues().len(), 1);
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-14);
        assert!((s.projectors()[0].matrix() - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn near_degenerate_levels_merge() {
        let op = DenseOperator::from_real_diagonal(&[1.0, 1.0 + 1e-12, -1.0]).unwrap();
        let s = hermitian_eigendecomposition(&op, 1e-9).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-11);
        let ranks: Vec<f64> = s.projectors().iter().map(|p| p.trace().re).collect();
        assert!((ranks[0] - 1.0).abs() < 1e-12 && (ranks[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_xi_has_plus_minus_one() {
        // det(sigma_xi - l) = l^2 - (1/2 + 1/2) = 0 -> l = +-1
        let xi = DenseOperator::spin_along([1.0, 1.0, 0.0]).unwrap();
        let s = hermitian_eigendecomposition(&xi, DEFAULT_GROUPING_TOL).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian_and_empty() {
        let m = DenseOperator::from_rows(&[&[c(0., 0.), c(1., 0.)], &[c(0., 0.), c(0., 0.)]]).unwrap();
        assert!(matches!(hermitian_eigendecomposition(&m, 1e-9), Err(Error::NotHermitian { .. })));
        assert!(DenseOperator::new(CMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let v = real_vec(&[0.6, 0.8]);
        let out = evolve_unitary(&v, &DenseOperator::zeros(2), 3.7).unwrap();
        assert!((out - v).norm() < 1e-15);
    }

    #[test]
    fn sigma_z_for_pi() {
        // exp(-i pi sigma_z) (1,0) = e^{-i pi} (1,0)
        let out = evolve_unitary(&basis(2, 0), &DenseOperator::pauli_z(), PI).unwrap();
        assert!((out[0] - C64::from_polar(1.0, -PI)).norm() < 1e-14);
        assert!(out[1].norm() < 1e-14);
        assert!((out.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rabi_quarter_period() {
        // exp(-i sigma_x pi/2) = cos(pi/2) - i sin(pi/2) sigma_x
        let out = evolve_unitary(&basis(2, 0), &DenseOperator::pauli_x(), PI / 2.0).unwrap();
        assert!(out[0].norm() < 1e-14);
        assert!((out[1] + I).norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_reported() {
        let err = evolve_unitary(&basis(3, 0), &DenseOperator::pauli_x(), 1.0).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn projector_helper_is_idempotent() {
        let p = DenseOperator::projector_onto(&real_vec(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])).unwrap();
        let p2 = p.mul(&p).unwrap();
        assert!((p2.matrix() - p.matrix()).norm() < 1e-15);
    }
}
