//! Separability of states and the entanglement-breaking map cone.

use num_complex::Complex;

use crate::choi::MapRep;
use crate::error::{Error, Result};
use crate::linalg::{
    both_transpose, eig_unchecked, partial_trace, partial_transpose, tensor_vec, trace_pairing, CMatrix,
    Dims, Factor,
};
use crate::random::{random_unit_vector, rng_for, SeededRng};
use crate::scalar::Real;

use super::blockpos::see_saw;
use super::nnls::{nnls, Gram};
use super::{check_operator, rel_threshold, Certificate, Spectrum, Verdict};

const ROUNDS: usize = 120;

type ProductTerm<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

/// PPT is exact for these factor dimensions (sorted).
fn ppt_is_exact(d: Dims) -> bool {
    let (a, b) = if d.n <= d.m { (d.n, d.m) } else { (d.m, d.n) };
    a == 1 || (a == 2 && b <= 3)
}

fn basis_vector<T: Real>(dim: usize, k: usize) -> Vec<Complex<T>> {
    let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
    v[k] = Complex::new(T::one(), T::zero());
    v
}

/// Product-state dictionary fitted by nonnegative least squares, grown by
/// column generation (each new column maximizes `⟨v| R |v⟩` for the current
/// residual `R`).
struct Fit<'a, T: Real> {
    rho: &'a CMatrix<T>,
    d: Dims,
    terms: Vec<ProductTerm<T>>,
    vecs: Vec<Vec<Complex<T>>>,
    gram: Vec<T>,
    h: Vec<T>,
    weights: Vec<T>,
}

impl<'a, T: Real> Fit<'a, T> {
    fn new(rho: &'a CMatrix<T>, d: Dims) -> Self {
        Self {
            rho,
            d,
            terms: Vec::new(),
            vecs: Vec::new(),
            gram: Vec::new(),
            h: Vec::new(),
            weights: Vec::new(),
        }
    }

    fn push(&mut self, xi: Vec<Complex<T>>, eta: Vec<Complex<T>>) {
        let v = tensor_vec(&xi, &eta);
        let k = self.vecs.len();
        let mut gram = vec![T::zero(); (k + 1) * (k + 1)];
        for i in 0..k {
            for j in 0..k {
                gram[i * (k + 1) + j] = self.gram[i * k + j];
            }
        }
        for i in 0..k {
            let ip: Complex<T> = self.vecs[i].iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            let g = ip.norm_sqr();
            gram[i * (k + 1) + k] = g;
            gram[k * (k + 1) + i] = g;
        }
        let nv: T = v.iter().map(|z| z.norm_sqr()).sum();
        gram[k * (k + 1) + k] = nv * nv;
        self.gram = gram;
        self.h.push(self.rho.quadratic_form(&v).re);
        self.vecs.push(v);
        self.terms.push((xi, eta));
        self.weights.push(T::zero());
    }

    fn solve(&mut self) {
        let gram = Gram {
            k: self.vecs.len(),
            g: self.gram.clone(),
        };
        self.weights = nnls(&gram, &self.h, Some(&self.weights), 4 * gram.k + 50);
        self.polish();
    }

    /// Re-solves the unconstrained least squares on the support by Householder
    /// QR, which is far better conditioned than the Gram form; accepted only if
    /// the weights stay positive and the residual does not grow.
    fn polish(&mut self) {
        let support: Vec<usize> = (0..self.weights.len()).filter(|&k| self.weights[k] > T::zero()).collect();
        let dim = self.d.total();
        let rows = 2 * dim * dim;
        if support.is_empty() || support.len() > rows {
            return;
        }
        let mut a = vec![T::zero(); rows * support.len()];
        for (c, &k) in support.iter().enumerate() {
            let v = &self.vecs[k];
            for i in 0..dim {
                for j in 0..dim {
                    let z = v[i] * v[j].conj();
                    let r = 2 * (i * dim + j);
                    a[r * support.len() + c] = z.re;
                    a[(r + 1) * support.len() + c] = z.im;
                }
            }
        }
        let mut b = vec![T::zero(); rows];
        for i in 0..dim {
            for j in 0..dim {
                let z = self.rho[(i, j)];
                b[2 * (i * dim + j)] = z.re;
                b[2 * (i * dim + j) + 1] = z.im;
            }
        }
        let Some(sol) = householder_lstsq(&mut a, &mut b, rows, support.len()) else {
            return;
        };
        if sol.iter().any(|&v| v <= T::zero()) {
            return;
        }
        let before = self.residual_matrix().frobenius_norm();
        let old = self.weights.clone();
        for (c, &k) in support.iter().enumerate() {
            self.weights[k] = sol[c];
        }
        if self.residual_matrix().frobenius_norm() > before {
            self.weights = old;
        }
    }

    fn residual_matrix(&self) -> CMatrix<T> {
        let mut r = self.rho.clone();
        for (v, &p) in self.vecs.iter().zip(&self.weights) {
            if p > T::zero() {
                r -= &CMatrix::outer(v, v).scale(p);
            }
        }
        r
    }
}

/// Least squares `min ‖A x − b‖` for a full-column-rank `rows x cols` row-major
/// `A`; both inputs are overwritten.
fn householder_lstsq<T: Real>(a: &mut [T], b: &mut [T], rows: usize, cols: usize) -> Option<Vec<T>> {
    let at = |r: usize, c: usize| r * cols + c;
    for k in 0..cols {
        let norm = (k..rows).map(|r| a[at(r, k)] * a[at(r, k)]).sum::<T>().sqrt();
        if norm <= T::c(1e-300) {
            return None;
        }
        let alpha = if a[at(k, k)] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|r| a[at(r, k)]).collect();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 <= T::zero() {
            continue;
        }
        for c in k..cols {
            let dot: T = (k..rows).map(|r| v[r - k] * a[at(r, c)]).sum();
            let f = T::c(2.0) * dot / vnorm2;
            for r in k..rows {
                a[at(r, c)] -= f * v[r - k];
            }
        }
        let dot: T = (k..rows).map(|r| v[r - k] * b[r]).sum();
        let f = T::c(2.0) * dot / vnorm2;
        for r in k..rows {
            b[r] -= f * v[r - k];
        }
    }
    let diag_max = (0..cols).map(|k| a[at(k, k)].abs()).fold(T::zero(), |x, y| x.max(y));
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let rkk = a[at(k, k)];
        if rkk.abs() <= diag_max * T::c(1e-12) {
            return None;
        }
        let s: T = (k + 1..cols).map(|c| a[at(k, c)] * x[c]).sum();
        x[k] = (b[k] - s) / rkk;
    }
    Some(x)
}

fn seed_dictionary<T: Real>(fit: &mut Fit<'_, T>, rng: &mut SeededRng) -> Result<()> {
    let d = fit.d;
    for i in 0..d.n {
        for r in 0..d.m {
            fit.push(basis_vector(d.n, i), basis_vector(d.m, r));
        }
    }
    let ra = eig_unchecked(&partial_trace(fit.rho, d, Factor::Second)?)?;
    let rb = eig_unchecked(&partial_trace(fit.rho, d, Factor::First)?)?;
    for i in 0..d.n {
        for r in 0..d.m {
            fit.push(ra.eigenvector(i), rb.eigenvector(r));
        }
    }
    for _ in 0..2 * d.total() * d.total() {
        fit.push(random_unit_vector(d.n, rng), random_unit_vector(d.m, rng));
    }
    Ok(())
}

fn find_decomposition<T: Real>(
    rho: &CMatrix<T>,
    d: Dims,
    thr: T,
    seed: u64,
) -> Result<Option<Certificate<T>>> {
    let mut rng = rng_for(seed, 1);
    let mut fit = Fit::new(rho, d);
    seed_dictionary(&mut fit, &mut rng)?;
    fit.solve();
    for _ in 0..ROUNDS {
        let r = fit.residual_matrix();
        let residual = r.frobenius_norm();
        if residual <= thr {
            let mut weights = Vec::new();
            let mut terms = Vec::new();
            for (k, &p) in fit.weights.iter().enumerate() {
                if p > T::zero() {
                    weights.push(p);
                    terms.push(fit.terms[k].clone());
                }
            }
            return Ok(Some(Certificate::SeparableDecomposition {
                weights,
                terms,
                residual,
            }));
        }
        let neg = r.scale(-T::one());
        let mut added = 0;
        for _ in 0..3 {
            let run = see_saw(&neg, d, random_unit_vector(d.n, &mut rng))?;
            if run.value < T::zero() {
                fit.push(run.xi, run.eta);
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
        fit.solve();
    }
    Ok(None)
}

/// Block-positive operators with known entanglement-detecting power at 3⊗3:
/// the Choi matrix of the Choi map and its `t ⊗ t` image.
fn choi_map_witnesses() -> Vec<CMatrix<f64>> {
    let c = crate::fixtures::choi_map().into_choi();
    let d = Dims::square(3).expect("nonzero");
    let tt = both_transpose(&c, d).expect("dims");
    vec![c, tt]
}

/// Separability of a state `ρ` on `C^n ⊗ C^m`.
///
/// PPT failure gives OUT; at `min(n, m) = 1` or `{n, m} = {2, 2}, {2, 3}` PPT
/// decides. Otherwise IN requires an explicit product decomposition with
/// residual at most `tol·(1 + ‖ρ‖_F)`, OUT may come from a known block-positive
/// witness at 3⊗3, and anything else is UNDECIDED.
pub fn is_separable<T: Real>(rho: &CMatrix<T>, d: Dims, tol: f64, seed: u64) -> Result<Verdict<T>> {
    check_operator(rho, d)?;
    let rho = rho.hermitian_part();
    let thr = rel_threshold(&rho, tol);
    let tr = rho.trace().re;
    if (tr - T::one()).abs() > T::c(1e-9) {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let spec = eig_unchecked(&rho)?;
    if spec.min_eigenvalue() < -thr {
        return Err(Error::InvalidState(format!(
            "not positive semidefinite (min eigenvalue {})",
            spec.min_eigenvalue()
        )));
    }
    let pt_spec = eig_unchecked(&partial_transpose(&rho, d)?)?;
    if pt_spec.min_eigenvalue() < -thr {
        return Ok(Verdict::outside(Certificate::MinEigen {
            spectrum: Spectrum::PartialTranspose,
            min_eigenvalue: pt_spec.min_eigenvalue(),
            vector: pt_spec.min_eigenvector(),
        }));
    }
    if ppt_is_exact(d) {
        return Ok(Verdict::inside(Some(Certificate::PptSpectra {
            min_eigenvalue: spec.min_eigenvalue(),
            pt_min_eigenvalue: pt_spec.min_eigenvalue(),
        })));
    }
    if d.n == 3 && d.m == 3 {
        for w in choi_map_witnesses() {
            let w: CMatrix<T> = w.cast();
            let value = trace_pairing(&w, &rho)?.re;
            if value < -thr {
                return Ok(Verdict::outside(Certificate::EntanglementWitness { w, value }));
            }
        }
    }
    match find_decomposition(&rho, d, thr, seed)? {
        Some(cert) => Ok(Verdict::inside(Some(cert))),
        None => Ok(Verdict::undecided(None)),
    }
}

/// `φ ∈ S`: `C_φ ⪰ 0` and `C_φ / Tr C_φ` separable.
pub fn in_s<T: Real>(phi: &MapRep<T>, tol: f64, seed: u64) -> Result<Verdict<T>> {
    let c = phi.choi();
    c.ensure_hermitian(crate::linalg::DEFAULT_TOL)?;
    let spec = eig_unchecked(c)?;
    if spec.min_eigenvalue() < -rel_threshold(c, tol) {
        return Ok(Verdict::outside(Certificate::MinEigen {
            spectrum: Spectrum::Direct,
            min_eigenvalue: spec.min_eigenvalue(),
            vector: spec.min_eigenvector(),
        }));
    }
    let tr = c.trace().re;
    if tr <= T::c(1e-300) {
        return Ok(Verdict::inside(None));
    }
    is_separable(&c.hermitian_part().scale(T::one() / tr), phi.dims(), tol, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::max_entangled;
    use crate::fixtures::choi_map_witness;
    use crate::linalg::tensor;
    use crate::random::random_density;

    fn check_decomposition(rho: &CMatrix, v: &Verdict) {
        match &v.certificate {
            Some(Certificate::SeparableDecomposition { weights, terms, .. }) => {
                let mut sum = CMatrix::zeros(rho.rows(), rho.cols());
                for (p, (xi, eta)) in weights.iter().zip(terms) {
                    assert!(*p > 0.0);
                    let v = tensor_vec(xi, eta);
                    sum += &CMatrix::outer(&v, &v).scale(*p);
                }
                assert!((&sum - rho).frobenius_norm() < 1e-8);
            }
            other => panic!("expected decomposition, got {other:?}"),
        }
    }

    #[test]
    fn product_state_is_separable() {
        let mut rng = rng_for(31, 0);
        let d = Dims::new(3, 3).unwrap();
        let a: CMatrix = random_density(3, 3, &mut rng);
        let b: CMatrix = random_density(3, 3, &mut rng);
        let rho = tensor(&a, &b);
        let v = is_separable(&rho, d, 1e-9, 1).unwrap();
        assert!(v.is_in(), "{v:?}");
        check_decomposition(&rho, &v);
    }

    #[test]
    fn maximally_mixed_three_by_three() {
        let d = Dims::square(3).unwrap();
        let rho = CMatrix::<f64>::identity(9).scale(1.0 / 9.0);
        let v = is_separable(&rho, d, 1e-9, 2).unwrap();
        assert!(v.is_in());
        check_decomposition(&rho, &v);
    }

    #[test]
    fn exact_regime() {
        let d = Dims::square(2).unwrap();
        let pure = max_entangled::<f64>(2).scale(0.5);
        assert!(is_separable(&pure, d, 1e-9, 3).unwrap().is_out());
        let mixed = CMatrix::<f64>::identity(4).scale(0.25);
        assert!(is_separable(&mixed, d, 1e-9, 3).unwrap().is_in());
    }

    #[test]
    fn ppt_entangled_fixture_is_caught_by_witness() {
        let d = Dims::square(3).unwrap();
        let v = is_separable(&choi_map_witness(), d, 1e-9, 4).unwrap();
        match v.certificate {
            Some(Certificate::EntanglementWitness { value, .. }) => assert!(value < 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_separable_mixture_three_by_three() {
        let mut rng = rng_for(32, 0);
        let d = Dims::square(3).unwrap();
        let mut rho = CMatrix::<f64>::zeros(9, 9);
        for _ in 0..6 {
            let a: CMatrix = random_density(3, 2, &mut rng);
            let b: CMatrix = random_density(3, 2, &mut rng);
            rho += &tensor(&a, &b).scale(1.0 / 6.0);
        }
        let v = is_separable(&rho, d, 1e-9, 5).unwrap();
        assert!(v.is_in(), "{:?}", v.status);
        check_decomposition(&rho, &v);
    }

    #[test]
    fn invalid_states_rejected() {
        let d = Dims::square(2).unwrap();
        assert!(matches!(
            is_separable(&CMatrix::<f64>::identity(4), d, 1e-9, 0),
            Err(Error::InvalidState(_))
        ));
        let neg = CMatrix::<f64>::diag(&[2.0, -1.0, 0.0, 0.0]);
        assert!(matches!(is_separable(&neg, d, 1e-9, 0), Err(Error::InvalidState(_))));
    }

    #[test]
    fn in_s_examples() {
        let dep = MapRep::<f64>::completely_depolarizing(3, 3).unwrap();
        assert!(in_s(&dep, 1e-9, 6).unwrap().is_in());
        let id = MapRep::<f64>::identity(2).unwrap();
        assert!(in_s(&id, 1e-9, 6).unwrap().is_out());
        let t = MapRep::<f64>::transpose(2).unwrap();
        assert!(matches!(
            in_s(&t, 1e-9, 6).unwrap().certificate,
            Some(Certificate::MinEigen { spectrum: Spectrum::Direct, .. })
        ));
    }
}
