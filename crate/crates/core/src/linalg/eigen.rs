//! Dense Hermitian eigendecomposition.
//!
//! Complex Householder reduction to tridiagonal form, a diagonal phase change
//! that makes the off-diagonal real and nonnegative, then implicit-shift QL
//! iteration on the resulting real symmetric tridiagonal matrix (the classical
//! `tql2` scheme) with the rotations accumulated into the unitary factor.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{cone, czero, creal, Real};

/// Default Hermiticity gate and PSD tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues in nonincreasing order and the unitary whose columns are the
/// matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermSpectrum<T: Real = f64> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: CMatrix<T>,
}

impl<T: Real> HermSpectrum<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> T {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.column(k)
    }

    /// Eigenvector of the smallest eigenvalue.
    pub fn min_eigenvector(&self) -> Vec<Complex<T>> {
        self.eigenvector(self.dim() - 1)
    }

    /// `U f(Λ) U*` for a real function of the eigenvalues.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let n = self.dim();
        let u = &self.eigenvectors;
        let weights: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for r in 0..n {
                let ur = u[(r, k)] * w;
                for c in 0..n {
                    out[(r, c)] += ur * u[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.reconstruct_with(|l| l)
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input must satisfy `‖x − x*‖_F ≤ 1e-9·(1 + ‖x‖_F)`; it is symmetrized to
/// `(x + x*)/2` before factorization.
pub fn eig_hermitian<T: Real>(x: &CMatrix<T>) -> Result<HermSpectrum<T>> {
    x.ensure_hermitian(DEFAULT_TOL)?;
    eig_symmetrized(&x.hermitian_part())
}

/// Same as [`eig_hermitian`] without the Hermiticity gate; `x` is symmetrized.
pub(crate) fn eig_unchecked<T: Real>(x: &CMatrix<T>) -> Result<HermSpectrum<T>> {
    eig_symmetrized(&x.hermitian_part())
}

fn eig_symmetrized<T: Real>(h: &CMatrix<T>) -> Result<HermSpectrum<T>> {
    let n = h.rows();
    if n == 0 {
        return Err(Error::InvalidDims("empty matrix".into()));
    }
    let (a, mut q) = tridiagonalize(h);

    // a is now Hermitian tridiagonal. Rotate phases so the subdiagonal is real.
    let mut diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut off: Vec<T> = vec![T::zero(); n];
    let mut phase: Complex<T> = cone();
    let mut phases = vec![phase; n];
    for i in 0..n.saturating_sub(1) {
        let e = a[(i + 1, i)];
        let mag = e.norm();
        off[i] = mag;
        if mag > T::zero() {
            phase = phase * (e / mag);
        }
        phases[i + 1] = phase;
    }
    for c in 0..n {
        let ph = phases[c];
        for r in 0..n {
            q[(r, c)] = q[(r, c)] * ph;
        }
    }
    tql2(&mut diag, &mut off, &mut q)?;

    // Nonincreasing order.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&k| diag[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    Ok(HermSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Returns `(t, q)` with `h = q t q*`, `t` Hermitian tridiagonal, `q` unitary.
fn tridiagonalize<T: Real>(h: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = h.rows();
    let mut a = h.clone();
    let mut q = CMatrix::identity(n);
    let two = T::c(2.0);
    for k in 0..n.saturating_sub(2) {
        // Column below the diagonal.
        let tail_norm2: T = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail_norm2 == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let alpha = (tail_norm2 + x0.norm_sqr()).sqrt();
        let unit_phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { cone() };
        // v = x + e^{iθ}‖x‖ e₁ maps x to -e^{iθ}‖x‖ e₁ under the reflector.
        let mut v = vec![czero::<T>(); n];
        v[k + 1] = x0 + unit_phase * alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let tau = two / vnorm2;
        // H a H with H = I − τ v v*: a − τ v w* − τ w v* + τ² (v*w) v v*, w = a v.
        let w = a.mul_vec(&v);
        let vw: T = v.iter().zip(&w).map(|(vi, wi)| vi.conj() * wi).sum::<Complex<T>>().re;
        let c = creal(tau * tau * vw);
        let tv = creal(tau);
        for r in 0..n {
            for col in 0..n {
                let delta = tv * (v[r] * w[col].conj() + w[r] * v[col].conj())
                    - c * v[r] * v[col].conj();
                a[(r, col)] -= delta;
            }
        }
        // q ← q H
        let qv = q.mul_vec(&v);
        for r in 0..n {
            for col in 0..n {
                let d = tv * qv[r] * v[col].conj();
                q[(r, col)] -= d;
            }
        }
    }
    (a, q)
}

/// Implicit QL on a real symmetric tridiagonal matrix. `off[i]` couples `i` and
/// `i + 1`; `off[n-1]` must be zero. Rotations are applied to the columns of `z`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], z: &mut CMatrix<T>) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    let two = T::c(2.0);
    let max_iter = 50 * n;
    let mut total_iter = 0usize;
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                total_iter += 1;
                if total_iter > max_iter {
                    return Err(Error::NoConvergence {
                        what: "Hermitian eigensolver",
                        iterations: max_iter,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (cc, ss) = (creal(c), creal(s));
                    for k in 0..n {
                        let zk1 = z[(k, i + 1)];
                        let zk = z[(k, i)];
                        z[(k, i + 1)] = ss * zk + cc * zk1;
                        z[(k, i)] = cc * zk - ss * zk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

/// PSD test with relative tolerance: true iff `λ_min ≥ −tol·(1 + ‖x‖_F)`.
/// Returns the minimal eigenvalue either way. Non-Hermitian input is rejected.
pub fn is_psd<T: Real>(x: &CMatrix<T>, tol: f64) -> Result<(bool, T)> {
    let spec = eig_hermitian(x)?;
    let min = spec.min_eigenvalue();
    Ok((min >= -T::c(tol) * (T::one() + x.frobenius_norm()), min))
}

/// Frobenius-nearest PSD matrix (negative eigenvalues clipped to zero).
pub fn project_psd<T: Real>(x: &CMatrix<T>) -> Result<CMatrix<T>> {
    let spec = eig_unchecked(x)?;
    Ok(spec.reconstruct_with(|l| l.max(T::zero())))
}
