use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Largest Hilbert-space dimension any tensor product may produce.
pub const DIMENSION_CAP: usize = 1 << 20;

/// Relative Hermiticity tolerance applied when the flag is asserted.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex square matrix, optionally certified Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    hermitian: bool,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("operator"))
    }
}

impl DenseOperator {
    /// General (not necessarily Hermitian) operator.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        check_finite(&matrix)?;
        Ok(Self { matrix, hermitian: false })
    }

    /// Operator with the Hermitian flag set; verified against
    /// `max|M - M^dagger| <= 1e-12 * max|M|`.
    pub fn hermitian(matrix: CMatrix) -> Result<Self> {
        let mut op = Self::new(matrix)?;
        let deviation = op.hermiticity_defect();
        if deviation > HERMITIAN_TOL * max_abs(&op.matrix) {
            return Err(Error::NotHermitian { deviation });
        }
        op.hermitian = true;
        Ok(op)
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(m)
    }

    pub fn hermitian_from_rows(rows: &[&[C64]]) -> Result<Self> {
        Self::from_rows(rows)?.into_hermitian()
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(diag.len(), diag.iter().map(|&d| c(d, 0.0)));
        Self::hermitian(CMatrix::from_diagonal(&v))
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim), hermitian: true }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: CMatrix::zeros(dim, dim), hermitian: true }
    }

    /// Rank-one projector |v><v| / <v|v>.
    pub fn projector_onto(v: &CVector) -> Result<Self> {
        let n2 = v.norm_squared();
        if n2 == 0.0 {
            return Err(Error::ZeroState);
        }
        Self::hermitian(v * v.adjoint() / c(n2, 0.0))
    }

    pub fn pauli_x() -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        Self { matrix: m, hermitian: true }
    }

    pub fn pauli_y() -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        Self { matrix: m, hermitian: true }
    }

    pub fn pauli_z() -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        Self { matrix: m, hermitian: true }
    }

    /// `n . sigma` for a real direction (normalised internally).
    pub fn spin_along(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::param("direction", "must be a finite nonzero vector"));
        }
        let [x, y, z] = direction.map(|v| v / norm);
        Self::pauli_x()
            .scale(x)
            .add(&Self::pauli_y().scale(y))?
            .add(&Self::pauli_z().scale(z))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn into_hermitian(self) -> Result<Self> {
        Self::hermitian(self.matrix)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation: self.hermiticity_defect() })
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), hermitian: self.hermitian }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { matrix: &self.matrix * c(s, 0.0), hermitian: self.hermitian }
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self { matrix: &self.matrix * s, hermitian: self.hermitian && s.im == 0.0 }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Matrix product. The Hermitian flag is dropped; use [`product_observable`]
    /// to re-verify it.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other.dim())?;
        Ok(Self { matrix: &self.matrix * &other.matrix, hermitian: false })
    }

    pub fn apply(&self, v: &CVector) -> Result<CVector> {
        self.check_same_dim(v.len())?;
        Ok(&self.matrix * v)
    }

    /// `<a| M |b>` with `a` given as a ket.
    pub fn sandwich(&self, a: &CVector, b: &CVector) -> Result<C64> {
        let mb = self.apply(b)?;
        Ok(a.dotc(&mb))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other)?.sub(&other.mul(self)?)?)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    fn check_same_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            Err(Error::DimensionMismatch { expected: self.dim(), found: n })
        } else {
            Ok(())
        }
    }
}

/// Product of two observables, accepted only if the product is itself
/// Hermitian (true when the factors commute).
pub fn product_observable(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    a.mul(b)?.into_hermitian()
}

/// Kronecker product.
pub trait TensorProduct: Sized {
    fn tensor(&self, other: &Self) -> Result<Self>;
}

fn check_cap(dim: usize) -> Result<()> {
    if dim > DIMENSION_CAP {
        Err(Error::ResourceLimit { dim, cap: DIMENSION_CAP })
    } else {
        Ok(())
    }
}

impl TensorProduct for DenseOperator {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.dim().checked_mul(other.dim()).ok_or(Error::ResourceLimit {
            dim: usize::MAX,
            cap: DIMENSION_CAP,
        })?;
        check_cap(dim)?;
        Ok(Self { matrix: self.matrix.kronecker(&other.matrix), hermitian: self.hermitian && other.hermitian })
    }
}

impl TensorProduct for CVector {
    fn tensor(&self, other: &Self) -> Result<Self> {
        let dim = self.len().checked_mul(other.len()).ok_or(Error::ResourceLimit {
            dim: usize::MAX,
            cap: DIMENSION_CAP,
        })?;
        check_cap(dim)?;
        Ok(self.kronecker(other))
    }
}

/// Tensor product of a list of factors, left to right.
pub fn tensor_all<T: TensorProduct + Clone>(factors: &[T]) -> Result<T> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyDimension)?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.tensor(f))
}

/// `I ⊗ .. ⊗ op ⊗ .. ⊗ I` with `op` on factor `site` of `sites` equal-dimension factors.
pub fn embed(op: &DenseOperator, site: usize, sites: usize) -> Result<DenseOperator> {
    if site >= sites {
        return Err(Error::param("site", format!("{site} out of range for {sites} sites")));
    }
    let id = DenseOperator::identity(op.dim());
    let factors: Vec<DenseOperator> =
        (0..sites).map(|k| if k == site { op.clone() } else { id.clone() }).collect();
    tensor_all(&factors)
}

pub fn cvec(re_im: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(re_im.len(), re_im.iter().map(|&(r, i)| c(r, i)))
}

pub fn real_vec(values: &[f64]) -> CVector {
    CVector::from_iterator(values.len(), values.iter().map(|&r| c(r, 0.0)))
}

/// Ket `|i>` of dimension `dim`.
pub fn basis(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = c(1.0, 0.0);
    v
}
