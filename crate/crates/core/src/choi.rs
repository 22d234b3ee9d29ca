//! Linear maps `φ: M_n → M_m` stored as Choi matrices
//! `C_φ = Σ_ij e_ij ⊗ φ(e_ij)`, and the calculus built on them.
//!
//! Block `(i, j)` of `C_φ` (in the composite index convention of
//! [`crate::linalg`]) is `φ(e_ij)`. The action of `φ` is recovered as
//! `φ(a) = Σ_ij a_ij φ(e_ij)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{both_transpose, trace_pairing, CMatrix, Dims};
use crate::scalar::{cone, czero, Real};

/// A linear map `M_n → M_m` (`dims.n` in, `dims.m` out) held as its Choi matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MapRep<T: Real = f64> {
    dims: Dims,
    choi: CMatrix<T>,
}

impl<T: Real> MapRep<T> {
    pub fn from_choi(dims: Dims, choi: CMatrix<T>) -> Result<Self> {
        dims.check(&choi)?;
        Ok(Self { dims, choi })
    }

    /// Builds `C_φ` by evaluating `action` on every matrix unit of `M_n`.
    pub fn from_action(
        n: usize,
        m: usize,
        mut action: impl FnMut(&CMatrix<T>) -> CMatrix<T>,
    ) -> Result<Self> {
        let dims = Dims::new(n, m)?;
        let mut choi = CMatrix::zeros(dims.total(), dims.total());
        for i in 0..n {
            for j in 0..n {
                let img = action(&CMatrix::unit(n, i, j));
                if img.rows() != m || img.cols() != m {
                    return Err(Error::DimensionMismatch(format!(
                        "action returned {}x{} on e_{i}{j}, expected {m}x{m}",
                        img.rows(),
                        img.cols()
                    )));
                }
                choi.set_block(i, j, &img);
            }
        }
        Ok(Self { dims, choi })
    }

    /// Identity map on `M_n`; its Choi matrix is `p`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_choi(Dims::square(n)?, max_entangled(n))
    }

    /// Transpose map on `M_n`; its Choi matrix is the swap operator.
    pub fn transpose(n: usize) -> Result<Self> {
        Self::from_action(n, n, |x| x.transpose())
    }

    /// `x ↦ Tr(x)·I_m/m`.
    pub fn completely_depolarizing(n: usize, m: usize) -> Result<Self> {
        let id = CMatrix::identity(m).scale(T::one() / T::c(m as f64));
        Self::from_action(n, m, |x| id.scale_c(x.trace()))
    }

    /// `x ↦ a x a*` for an `m x n` matrix `a`.
    pub fn conjugation(a: &CMatrix<T>) -> Result<Self> {
        let adj = a.adjoint();
        Self::from_action(a.cols(), a.rows(), |x| &(a * x) * &adj)
    }

    /// `x ↦ a xᵗ a*` for an `m x n` matrix `a`.
    pub fn transpose_conjugation(a: &CMatrix<T>) -> Result<Self> {
        let adj = a.adjoint();
        Self::from_action(a.cols(), a.rows(), |x| &(a * &x.transpose()) * &adj)
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn input_dim(&self) -> usize {
        self.dims.n
    }

    #[inline]
    pub fn output_dim(&self) -> usize {
        self.dims.m
    }

    #[inline]
    pub fn choi(&self) -> &CMatrix<T> {
        &self.choi
    }

    pub fn into_choi(self) -> CMatrix<T> {
        self.choi
    }

    /// `φ(e_ij)`.
    pub fn image_of_unit(&self, i: usize, j: usize) -> CMatrix<T> {
        self.choi.block(i, j, self.dims.m)
    }

    pub fn apply(&self, a: &CMatrix<T>) -> Result<CMatrix<T>> {
        apply(self, a)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dims: self.dims,
            choi: self.choi.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dims(self, other)?;
        Ok(Self {
            dims: self.dims,
            choi: &self.choi + &other.choi,
        })
    }

    /// Hermitian Choi matrix within the default gate, i.e. `φ` preserves Hermiticity.
    pub fn is_hermitian_preserving(&self) -> bool {
        self.choi.ensure_hermitian(crate::linalg::DEFAULT_TOL).is_ok()
    }
}

fn same_dims<T: Real>(a: &MapRep<T>, b: &MapRep<T>) -> Result<()> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch(format!(
            "maps with dims {:?} and {:?}",
            a.dims, b.dims
        )));
    }
    Ok(())
}

/// Matrix unit `e_ij` in `M_n`.
pub fn matrix_unit<T: Real>(n: usize, i: usize, j: usize) -> CMatrix<T> {
    CMatrix::unit(n, i, j)
}

/// The unnormalized maximally entangled operator `p = Σ_ij e_ij ⊗ e_ij`.
pub fn max_entangled<T: Real>(n: usize) -> CMatrix<T> {
    let mut p = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            p[(i * n + i, j * n + j)] = cone();
        }
    }
    p
}

/// Swap operator `Σ_ij e_ij ⊗ e_ji` on `C^n ⊗ C^n`.
pub fn swap_operator<T: Real>(n: usize) -> CMatrix<T> {
    let mut s = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            s[(i * n + j, j * n + i)] = cone();
        }
    }
    s
}

/// `φ(a) = Σ_ij a_ij φ(e_ij)`.
pub fn apply<T: Real>(phi: &MapRep<T>, a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let Dims { n, m } = phi.dims;
    if a.rows() != n || a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "map takes {n}x{n} input, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let c = &phi.choi;
    let mut out = CMatrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij == czero() {
                continue;
            }
            for r in 0..m {
                for s in 0..m {
                    out[(r, s)] += aij * c[(i * m + r, j * m + s)];
                }
            }
        }
    }
    Ok(out)
}

/// `(ι_n ⊗ α)(x)`: applies `α` to each `M_k` block of `x ∈ M_n ⊗ M_k`.
pub fn lift<T: Real>(alpha: &MapRep<T>, x: &CMatrix<T>, n: usize) -> Result<CMatrix<T>> {
    let k = alpha.input_dim();
    let l = alpha.output_dim();
    if x.rows() != n * k || x.cols() != n * k {
        return Err(Error::DimensionMismatch(format!(
            "lift: operator is {}x{}, expected {}x{}",
            x.rows(),
            x.cols(),
            n * k,
            n * k
        )));
    }
    let mut out = CMatrix::zeros(n * l, n * l);
    for i in 0..n {
        for j in 0..n {
            let img = apply(alpha, &x.block(i, j, k))?;
            out.set_block(i, j, &img);
        }
    }
    Ok(out)
}

/// `α ∘ φ`, via `C_{α∘φ} = (ι ⊗ α)(C_φ)`.
pub fn compose_left<T: Real>(alpha: &MapRep<T>, phi: &MapRep<T>) -> Result<MapRep<T>> {
    if alpha.input_dim() != phi.output_dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose: outer map takes M_{}, inner map lands in M_{}",
            alpha.input_dim(),
            phi.output_dim()
        )));
    }
    let choi = lift(alpha, &phi.choi, phi.input_dim())?;
    MapRep::from_choi(Dims::new(phi.input_dim(), alpha.output_dim())?, choi)
}

/// `φᵗ = t ∘ φ ∘ t`, with `C_{φᵗ} = (t ⊗ t)(C_φ)`.
pub fn transpose_conj<T: Real>(phi: &MapRep<T>) -> MapRep<T> {
    let choi = both_transpose(&phi.choi, phi.dims).expect("choi dims are consistent");
    MapRep {
        dims: phi.dims,
        choi,
    }
}

/// Hilbert–Schmidt adjoint `φ*: M_m → M_n`, built entrywise from
/// `φ*(b)_ji = Tr(φ(e_ij) b)`.
pub fn adjoint<T: Real>(phi: &MapRep<T>) -> MapRep<T> {
    let Dims { n, m } = phi.dims;
    let units: Vec<Vec<CMatrix<T>>> = (0..n)
        .map(|i| (0..n).map(|j| phi.image_of_unit(i, j)).collect())
        .collect();
    MapRep::from_action(m, n, |b| {
        CMatrix::from_fn(n, n, |j, i| {
            trace_pairing(&units[i][j], b).expect("square blocks")
        })
    })
    .expect("adjoint dimensions")
}

/// `t ∘ α* ∘ t`: the generator map of `K^d`.
pub fn dual_generator<T: Real>(alpha: &MapRep<T>) -> MapRep<T> {
    transpose_conj(&adjoint(alpha))
}

/// The functional `φ̃` on `M_n ⊗ M_m`, held through its density operator `C_{φᵗ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional<T: Real = f64> {
    pub density: CMatrix<T>,
}

impl<T: Real> DualFunctional<T> {
    /// `Tr(density · x)`.
    pub fn eval(&self, x: &CMatrix<T>) -> Result<Complex<T>> {
        trace_pairing(&self.density, x)
    }

    pub fn eval_real(&self, x: &CMatrix<T>) -> Result<T> {
        Ok(self.eval(x)?.re)
    }
}

pub fn dual_functional<T: Real>(phi: &MapRep<T>) -> DualFunctional<T> {
    DualFunctional {
        density: transpose_conj(phi).choi,
    }
}

/// `Tr(C_φ C_ψ)` for maps with Hermitian Choi matrices.
pub fn pairing<T: Real>(phi: &MapRep<T>, psi: &MapRep<T>) -> Result<T> {
    same_dims(phi, psi)?;
    phi.choi.ensure_hermitian(crate::linalg::DEFAULT_TOL)?;
    psi.choi.ensure_hermitian(crate::linalg::DEFAULT_TOL)?;
    Ok(trace_pairing(&phi.choi, &psi.choi)?.re)
}

fn require_square<T: Real>(x: &CMatrix<T>, d: Dims, what: &str) -> Result<()> {
    if d.n != d.m {
        return Err(Error::InvalidDims(format!(
            "{what} needs equal factor dimensions, got ({}, {})",
            d.n, d.m
        )));
    }
    d.check(x)
}

/// `ω(x) = Tr(p x)/n` for the maximally entangled state on `M_n ⊗ M_n`.
pub fn omega_eval<T: Real>(x: &CMatrix<T>, d: Dims) -> Result<T> {
    require_square(x, d, "omega_eval")?;
    let n = d.n;
    // Tr(p x) = Σ_ij x[(j,j),(i,i)]
    let mut acc = czero::<T>();
    for i in 0..n {
        for j in 0..n {
            acc += x[(j * n + j, i * n + i)];
        }
    }
    Ok(acc.re / T::c(n as f64))
}

/// `Tr ∘ π` with `π(a ⊗ b) = bᵗ a`: sums the `(i, j)` entry of block `(i, j)`.
pub fn trpi_eval<T: Real>(x: &CMatrix<T>, d: Dims) -> Result<Complex<T>> {
    require_square(x, d, "trpi_eval")?;
    let n = d.n;
    let mut acc = czero::<T>();
    for i in 0..n {
        for j in 0..n {
            acc += x[(i * n + i, j * n + j)];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_transpose, tensor};
    use crate::random::{ginibre, random_hermitian, rng_for};
    use crate::scalar::cplx;

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    fn random_map(n: usize, m: usize, seed: u64) -> MapRep {
        let mut rng = rng_for(seed, 0);
        let c = ginibre(n * m, n * m, &mut rng);
        MapRep::from_choi(Dims::new(n, m).unwrap(), c).unwrap()
    }

    #[test]
    fn identity_and_transpose_chois() {
        let id = MapRep::<f64>::from_action(3, 3, |x| x.clone()).unwrap();
        assert_eq!(id.choi(), &max_entangled(3));
        let t = MapRep::<f64>::transpose(3).unwrap();
        assert_eq!(t.choi(), &swap_operator(3));
        assert_eq!(
            partial_transpose(&max_entangled::<f64>(3), Dims::square(3).unwrap()).unwrap(),
            swap_operator(3)
        );
    }

    #[test]
    fn depolarizing_choi_blocks() {
        let phi = MapRep::<f64>::completely_depolarizing(2, 3).unwrap();
        let expect = tensor(&CMatrix::identity(2), &CMatrix::identity(3).scale(1.0 / 3.0));
        assert!(close(phi.choi(), &expect, 1e-15));
    }

    #[test]
    fn from_action_rejects_wrong_output() {
        let err = MapRep::<f64>::from_action(2, 3, |x| x.clone());
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn apply_round_trips_action() {
        let mut rng = rng_for(3, 0);
        let k: CMatrix = ginibre(3, 3, &mut rng);
        let action = |x: &CMatrix| &(&(&k * x) * &k.adjoint()) + &x.transpose().scale(0.5);
        let phi = MapRep::from_action(3, 3, action).unwrap();
        for _ in 0..100 {
            let a: CMatrix = ginibre(3, 3, &mut rng);
            assert!(close(&phi.apply(&a).unwrap(), &action(&a), 1e-13));
        }
        let t = MapRep::<f64>::transpose(2).unwrap();
        assert_eq!(t.apply(&CMatrix::unit(2, 0, 1)).unwrap(), CMatrix::unit(2, 1, 0));
        assert!(t.apply(&CMatrix::identity(3)).is_err());
    }

    #[test]
    fn composition() {
        let phi = random_map(2, 2, 4);
        let alpha = random_map(2, 3, 5);
        let id = MapRep::identity(2).unwrap();
        assert!(close(compose_left(&id, &phi).unwrap().choi(), phi.choi(), 1e-15));
        let t = MapRep::<f64>::transpose(2).unwrap();
        assert_eq!(compose_left(&t, &t).unwrap(), id);
        let comp = compose_left(&alpha, &phi).unwrap();
        assert_eq!(comp.dims(), Dims::new(2, 3).unwrap());
        let mut rng = rng_for(6, 0);
        for _ in 0..20 {
            let a: CMatrix = ginibre(2, 2, &mut rng);
            let direct = alpha.apply(&phi.apply(&a).unwrap()).unwrap();
            assert!(close(&comp.apply(&a).unwrap(), &direct, 1e-13));
        }
        assert!(compose_left(&phi, &alpha).is_err());
    }

    #[test]
    fn transpose_conj_matches_action_and_full_transpose() {
        let phi = random_map(2, 3, 7);
        let pt = transpose_conj(&phi);
        assert!(close(pt.choi(), &phi.choi().transpose(), 1e-15));
        let via_action =
            MapRep::from_action(2, 3, |x| phi.apply(&x.transpose()).unwrap().transpose()).unwrap();
        assert!(close(pt.choi(), via_action.choi(), 1e-15));
        let id = MapRep::<f64>::identity(3).unwrap();
        assert_eq!(transpose_conj(&id), id);
        let t = MapRep::<f64>::transpose(3).unwrap();
        assert_eq!(transpose_conj(&t), t);
    }

    #[test]
    fn adjoint_defining_identity() {
        let phi = random_map(2, 3, 8);
        let adj = adjoint(&phi);
        assert_eq!(adj.dims(), Dims::new(3, 2).unwrap());
        let mut rng = rng_for(9, 0);
        for _ in 0..20 {
            let a: CMatrix = ginibre(2, 2, &mut rng);
            let b: CMatrix = ginibre(3, 3, &mut rng);
            let lhs = (&phi.apply(&a).unwrap() * &b).trace();
            let rhs = (&a * &adj.apply(&b).unwrap()).trace();
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert!(close(adjoint(&adj).choi(), phi.choi(), 1e-13));
        let id = MapRep::<f64>::identity(3).unwrap();
        assert_eq!(adjoint(&id), id);
    }

    #[test]
    fn adjoint_of_conjugation() {
        let mut rng = rng_for(10, 0);
        let v: CMatrix = ginibre(3, 2, &mut rng);
        let phi = MapRep::conjugation(&v).unwrap();
        let expect = MapRep::conjugation(&v.adjoint()).unwrap();
        assert!(close(adjoint(&phi).choi(), expect.choi(), 1e-13));
    }

    #[test]
    fn adjoint_rearrangement_identity() {
        // C_{φ*} = S C_φᵀ S with S the factor swap, checked as an identity.
        let phi = random_map(2, 3, 11);
        let (n, m) = (2, 3);
        let ct = phi.choi().transpose();
        let swapped = CMatrix::from_fn(n * m, n * m, |row, col| {
            let (r, i) = (row / n, row % n);
            let (s, j) = (col / n, col % n);
            ct[(i * m + r, j * m + s)]
        });
        assert!(close(adjoint(&phi).choi(), &swapped, 1e-14));
    }

    #[test]
    fn dual_functional_two_formulas() {
        let phi = random_map(2, 3, 12);
        let f = dual_functional(&phi);
        let mut rng = rng_for(13, 0);
        for _ in 0..20 {
            let a: CMatrix = ginibre(2, 2, &mut rng);
            let b: CMatrix = ginibre(3, 3, &mut rng);
            let via_density = f.eval(&tensor(&a, &b)).unwrap();
            let direct = (&phi.apply(&a).unwrap() * &b.transpose()).trace();
            assert!((via_density - direct).norm() < 1e-13);
        }
        let id = MapRep::<f64>::identity(3).unwrap();
        let val = dual_functional(&id).eval(&max_entangled(3)).unwrap();
        // direct sum over matrix units: Σ_ij Tr(e_ij e_ijᵗ) = Σ_ij Tr(e_ii) = n²
        let mut direct = cplx(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                let e: CMatrix = matrix_unit(3, i, j);
                direct += (&e * &e.transpose()).trace();
            }
        }
        assert_eq!(direct, cplx(9.0, 0.0));
        assert!((val - direct).norm() < 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let id = MapRep::<f64>::identity(2).unwrap();
        assert!((pairing(&id, &id).unwrap() - 4.0).abs() < 1e-15);
        let mut rng = rng_for(14, 0);
        let h: MapRep = MapRep::from_choi(Dims::square(2).unwrap(), random_hermitian(4, &mut rng)).unwrap();
        assert!(pairing(&h, &h).unwrap() >= 0.0);
        let g = random_map(2, 2, 15);
        assert!(matches!(pairing(&g, &id), Err(Error::NotHermitian { .. })));
        let other = MapRep::<f64>::identity(3).unwrap();
        assert!(pairing(&id, &other).is_err());
    }

    #[test]
    fn omega_and_trpi() {
        let d = Dims::square(3).unwrap();
        let p = max_entangled::<f64>(3);
        assert!((omega_eval(&p, d).unwrap() - 3.0).abs() < 1e-15);
        assert!((omega_eval(&CMatrix::<f64>::identity(9), d).unwrap() - 1.0).abs() < 1e-15);
        assert!(omega_eval(&CMatrix::<f64>::identity(6), Dims::new(2, 3).unwrap()).is_err());

        let mut rng = rng_for(16, 0);
        let a: CMatrix = random_hermitian(3, &mut rng);
        let b: CMatrix = random_hermitian(3, &mut rng);
        // ω(a ⊗ b) by direct entry sum: (1/n) Σ_ij a_ij b_ij
        let mut direct = cplx(0.0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                direct += a[(j, i)] * b[(j, i)];
            }
        }
        let w = omega_eval(&tensor(&a, &b), d).unwrap();
        assert!((w - direct.re / 3.0).abs() < 1e-14);

        let tp = trpi_eval(&tensor(&a, &b), d).unwrap();
        assert!((tp - (&b.transpose() * &a).trace()).norm() < 1e-14);
        let x: CMatrix = ginibre(9, 9, &mut rng);
        let xx = &x * &x.adjoint();
        assert!(trpi_eval(&xx, d).unwrap().re >= 0.0f64);
    }
}
