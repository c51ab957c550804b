//! Real symmetric tridiagonal matrices: Sturm-sequence bisection for
//! eigenvalues and a twisted two-sided recurrence for eigenvectors.
//!
//! The recurrence satisfies every row except the twist row to rounding
//! relative to the local magnitude of the vector, so exponentially small
//! tail components keep full relative accuracy.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len() - 1, found: off.len() });
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("tridiagonal entries"));
        }
        if off.iter().any(|&b| b == 0.0) {
            return Err(Error::param("off", "off-diagonal entries must be nonzero (matrix must be irreducible)"));
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// `(T v)_j`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let mut s = self.diag[j] * v[j];
                if j > 0 {
                    s += self.off[j - 1] * v[j - 1];
                }
                if j + 1 < n {
                    s += self.off[j] * v[j + 1];
                }
                s
            })
            .collect()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for j in 0..self.dim() {
            let b2 = if j == 0 { 0.0 } else { self.off[j - 1] * self.off[j - 1] };
            d = self.diag[j] - x - if j == 0 { 0.0 } else { b2 / d };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[j].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for j in 0..n {
            let r = if j > 0 { self.off[j - 1].abs() } else { 0.0 } + if j + 1 < n { self.off[j].abs() } else { 0.0 };
            lo = lo.min(self.diag[j] - r);
            hi = hi.max(self.diag[j] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue, bisected to adjacent floats.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.dim() {
            return Err(Error::param("k", format!("index {k} out of range")));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit eigenvector for an isolated eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        // Left recurrence: rows 0..n-2 solved for v[j+1].
        let mut left = vec![0.0; n];
        left[0] = 1.0;
        for j in 0..n - 1 {
            let prev = if j > 0 { self.off[j - 1] * left[j - 1] } else { 0.0 };
            left[j + 1] = -((self.diag[j] - lambda) * left[j] + prev) / self.off[j];
            if left[j + 1].abs() > 1e150 {
                left.iter_mut().take(j + 2).for_each(|x| *x *= 1e-150);
            }
        }
        // Right recurrence: rows n-1..1 solved for v[j-1].
        let mut right = vec![0.0; n];
        right[n - 1] = 1.0;
        for j in (1..n).rev() {
            let next = if j + 1 < n { self.off[j] * right[j + 1] } else { 0.0 };
            right[j - 1] = -((self.diag[j] - lambda) * right[j] + next) / self.off[j - 1];
            if right[j - 1].abs() > 1e150 {
                right.iter_mut().skip(j - 1).for_each(|x| *x *= 1e-150);
            }
        }
        // Twist where the residual of the joining row is smallest relative to the vector.
        let mut best = (0, f64::INFINITY);
        for k in 0..n {
            if left[k] == 0.0 || right[k] == 0.0 {
                continue;
            }
            let s = left[k] / right[k];
            let mut r = (self.diag[k] - lambda) * left[k];
            if k > 0 {
                r += self.off[k - 1] * left[k - 1];
            }
            if k + 1 < n {
                r += self.off[k] * right[k + 1] * s;
            }
            let rel = (r / left[k]).abs();
            if rel < best.1 {
                best = (k, rel);
            }
        }
        let k = best.0;
        let s = left[k] / right[k];
        let mut v: Vec<f64> = (0..n).map(|j| if j <= k { left[j] } else { right[j] * s }).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let sign = if v.iter().fold(0.0, |a: f64, &x| if x.abs() > a.abs() { x } else { a }) < 0.0 { -1.0 } else { 1.0 };
        v.iter_mut().for_each(|x| *x *= sign / norm);
        v
    }

    /// Lowest eigenpair.
    pub fn ground_state(&self) -> Result<(f64, Vec<f64>)> {
        let e = self.eigenvalue(0)?;
        Ok((e, self.eigenvector(e)))
    }
}
