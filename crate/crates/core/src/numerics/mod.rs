//! Dense linear algebra, spectral tools and 1-D wavefunction grids.

pub mod grid;
pub mod operator;
pub mod spectral;
pub mod tridiagonal;

pub use grid::{fourier_pair, Grid1D, Representation, WaveFunction1D};
pub use operator::{
    basis, c, cvec, embed, product_observable, real_vec, tensor_all, CMatrix, CVector, DenseOperator, TensorProduct,
    C64, DIMENSION_CAP, I,
};
pub use spectral::{evolve_unitary, hermitian_eigendecomposition, unitary, SpectralDecomposition, DEFAULT_GROUPING_TOL};
pub use tridiagonal::SymTridiagonal;
