//! Tensor-product bookkeeping on `M_n ⊗ M_m`.
//!
//! Composite index convention: row `i` of the first factor and row `r` of the
//! second factor map to composite row `i·m + r`; columns likewise. Viewed as an
//! `n x n` grid of `m x m` blocks, block `(i, j)` holds the `M_m` component
//! paired with `e_ij`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{czero, Real};

/// Factor dimensions of a composite space `M_n ⊗ M_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
}

impl Dims {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidDims(format!("factor dimensions ({n}, {m}) must be positive")));
        }
        Ok(Self { n, m })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// `n·m`, the side of a composite operator.
    #[inline]
    pub fn total(&self) -> usize {
        self.n * self.m
    }

    #[inline]
    pub fn index(&self, i: usize, r: usize) -> usize {
        i * self.m + r
    }

    pub fn swapped(&self) -> Self {
        Self { n: self.m, m: self.n }
    }

    pub fn check<T: Real>(&self, x: &CMatrix<T>) -> Result<()> {
        let t = self.total();
        if x.rows() != t || x.cols() != t {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, expected {t}x{t} for dims ({}, {})",
                x.rows(),
                x.cols(),
                self.n,
                self.m
            )));
        }
        Ok(())
    }
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Kronecker product `a ⊗ b`.
pub fn tensor<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    CMatrix::from_fn(a.rows() * br, a.cols() * bc, |row, col| {
        a[(row / br, col / bc)] * b[(row % br, col % bc)]
    })
}

/// Kronecker product of vectors.
pub fn tensor_vec<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Vec<Complex<T>> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

/// `(ι ⊗ t)(x)`: transposes each `m x m` block in place.
pub fn partial_transpose<T: Real>(x: &CMatrix<T>, d: Dims) -> Result<CMatrix<T>> {
    d.check(x)?;
    let m = d.m;
    Ok(CMatrix::from_fn(x.rows(), x.cols(), |row, col| {
        let (i, r) = (row / m, row % m);
        let (j, s) = (col / m, col % m);
        x[(i * m + s, j * m + r)]
    }))
}

/// `(t ⊗ ι)(x)`: transposes the block layout, leaving each block intact.
fn first_factor_transpose<T: Real>(x: &CMatrix<T>, d: Dims) -> CMatrix<T> {
    let m = d.m;
    CMatrix::from_fn(x.rows(), x.cols(), |row, col| {
        let (i, r) = (row / m, row % m);
        let (j, s) = (col / m, col % m);
        x[(j * m + r, i * m + s)]
    })
}

pub fn full_transpose<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    x.transpose()
}

pub fn conj_transpose<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    x.adjoint()
}

/// `(t ⊗ t)(x)`, computed factor by factor. Coincides with the full transpose.
pub fn both_transpose<T: Real>(x: &CMatrix<T>, d: Dims) -> Result<CMatrix<T>> {
    let second = partial_transpose(x, d)?;
    Ok(first_factor_transpose(&second, d))
}

/// Partial trace over one factor: `Tr₁(x) = Σᵢ X_ii`, `Tr₂(x)_ij = Tr(X_ij)`.
pub fn partial_trace<T: Real>(x: &CMatrix<T>, d: Dims, factor: Factor) -> Result<CMatrix<T>> {
    d.check(x)?;
    let (n, m) = (d.n, d.m);
    Ok(match factor {
        Factor::First => CMatrix::from_fn(m, m, |r, s| {
            (0..n).map(|i| x[(i * m + r, i * m + s)]).sum()
        }),
        Factor::Second => CMatrix::from_fn(n, n, |i, j| {
            (0..m).map(|r| x[(i * m + r, j * m + r)]).sum()
        }),
    })
}

/// Hilbert–Schmidt inner product `Tr(a* b)`.
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<Complex<T>> {
    a.same_shape(b, "hs_inner")?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(czero(), |acc, (&x, &y)| acc + x.conj() * y))
}

/// Trace pairing `Tr(a b)` without forming the product.
pub fn trace_pairing<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<Complex<T>> {
    if a.rows() != b.cols() || a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "trace_pairing: {}x{} with {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut acc = czero();
    for r in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a[(r, k)] * b[(k, r)];
        }
    }
    Ok(acc)
}
