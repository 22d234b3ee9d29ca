//! Closed-form spectral oracles.

use crate::choi::{lift, MapRep};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, partial_transpose, CMatrix, Dims, HermSpectrum};
use crate::scalar::Real;

use super::{check_operator, rel_threshold, Certificate, Spectrum, Verdict};

fn spectrum_verdict<T: Real>(
    x: &CMatrix<T>,
    spec: &HermSpectrum<T>,
    which: Spectrum,
    tol: f64,
) -> Verdict<T> {
    let min = spec.min_eigenvalue();
    if min >= -rel_threshold(x, tol) {
        Verdict::inside(None)
    } else {
        Verdict::outside(Certificate::MinEigen {
            spectrum: which,
            min_eigenvalue: min,
            vector: spec.min_eigenvector(),
        })
    }
}

fn psd_verdict<T: Real>(x: &CMatrix<T>, which: Spectrum, tol: f64) -> Result<(Verdict<T>, T)> {
    let spec = eig_hermitian(x)?;
    Ok((spectrum_verdict(x, &spec, which, tol), spec.min_eigenvalue()))
}

/// `φ` is CP iff `C_φ ⪰ 0`.
pub fn is_cp<T: Real>(phi: &MapRep<T>, tol: f64) -> Result<Verdict<T>> {
    Ok(psd_verdict(phi.choi(), Spectrum::Direct, tol)?.0)
}

/// `φ` is copositive iff `(ι ⊗ t)(C_φ) ⪰ 0`.
pub fn is_cop<T: Real>(phi: &MapRep<T>, tol: f64) -> Result<Verdict<T>> {
    phi.choi().ensure_hermitian(crate::linalg::DEFAULT_TOL)?;
    let pt = partial_transpose(phi.choi(), phi.dims())?;
    Ok(psd_verdict(&pt, Spectrum::PartialTranspose, tol)?.0)
}

/// Shared body of [`in_f`] and [`in_p`].
fn both_spectra<T: Real>(x: &CMatrix<T>, d: Dims, tol: f64) -> Result<Verdict<T>> {
    check_operator(x, d)?;
    let (direct, min) = psd_verdict(x, Spectrum::Direct, tol)?;
    if direct.is_out() {
        return Ok(direct);
    }
    let pt = partial_transpose(x, d)?;
    let (ptv, pt_min) = psd_verdict(&pt, Spectrum::PartialTranspose, tol)?;
    if ptv.is_out() {
        return Ok(ptv);
    }
    Ok(Verdict::inside(Some(Certificate::PptSpectra {
        min_eigenvalue: min,
        pt_min_eigenvalue: pt_min,
    })))
}

/// `φ ∈ P`: both CP and copositive.
pub fn in_p<T: Real>(phi: &MapRep<T>, tol: f64) -> Result<Verdict<T>> {
    both_spectra(phi.choi(), phi.dims(), tol)
}

/// `x ∈ F`: `x ⪰ 0` and `(ι ⊗ t)(x) ⪰ 0`.
pub fn in_f<T: Real>(x: &CMatrix<T>, d: Dims, tol: f64) -> Result<Verdict<T>> {
    both_spectra(x, d, tol)
}

/// [`in_f`] for unit-trace operators.
pub fn is_ppt_state<T: Real>(rho: &CMatrix<T>, d: Dims, tol: f64) -> Result<Verdict<T>> {
    check_operator(rho, d)?;
    let tr = rho.trace().re;
    if (tr - T::one()).abs() > T::c(1e-9) {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    both_spectra(rho, d, tol)
}

/// Sampled `P(M, K)` test: `(ι ⊗ α)(x) ⪰ 0` for every `α` in `samples`.
///
/// OUT names the first violating sample; IN is always flagged heuristic.
pub fn pm_k_membership<T: Real>(
    x: &CMatrix<T>,
    d: Dims,
    samples: &[MapRep<T>],
    tol: f64,
) -> Result<Verdict<T>> {
    check_operator(x, d)?;
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    for (index, alpha) in samples.iter().enumerate() {
        if alpha.input_dim() != d.m {
            return Err(Error::DimensionMismatch(format!(
                "sample {index} takes M_{}, operator has second factor M_{}",
                alpha.input_dim(),
                d.m
            )));
        }
        let y = lift(alpha, x, d.n)?.hermitian_part();
        let spec = eig_hermitian(&y)?;
        let min = spec.min_eigenvalue();
        if min < -rel_threshold(&y, tol) {
            return Ok(Verdict::outside(Certificate::SampleViolation {
                index,
                min_eigenvalue: min,
                vector: spec.min_eigenvector(),
            }));
        }
    }
    Ok(Verdict::heuristic_inside(None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choi::{compose_left, max_entangled};
    use crate::linalg::{is_psd, tensor};
    use crate::random::{ginibre, random_density, random_hermitian, rng_for};

    const TOL: f64 = 1e-9;

    #[test]
    fn cp_examples() {
        assert!(is_cp(&MapRep::<f64>::identity(3).unwrap(), TOL).unwrap().is_in());
        let v = is_cp(&MapRep::<f64>::transpose(3).unwrap(), TOL).unwrap();
        match v.certificate {
            Some(Certificate::MinEigen { min_eigenvalue, .. }) => {
                assert!((min_eigenvalue + 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let a: CMatrix = ginibre(3, 2, &mut rng_for(3, 0));
        assert!(is_cp(&MapRep::conjugation(&a).unwrap(), TOL).unwrap().is_in());
    }

    #[test]
    fn cop_examples() {
        assert!(is_cop(&MapRep::<f64>::transpose(3).unwrap(), TOL).unwrap().is_in());
        assert!(is_cop(&MapRep::<f64>::identity(2).unwrap(), TOL).unwrap().is_out());
        let a: CMatrix = ginibre(2, 3, &mut rng_for(4, 0));
        assert!(is_cop(&MapRep::transpose_conjugation(&a).unwrap(), TOL)
            .unwrap()
            .is_in());
    }

    #[test]
    fn cp_of_map_iff_cop_of_transpose_composition() {
        let mut rng = rng_for(5, 0);
        let t = MapRep::<f64>::transpose(2).unwrap();
        for _ in 0..20 {
            let phi = MapRep::from_choi(Dims::square(2).unwrap(), random_hermitian(4, &mut rng)).unwrap();
            let lhs = is_cp(&phi, TOL).unwrap().status;
            let rhs = is_cop(&compose_left(&t, &phi).unwrap(), TOL).unwrap().status;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn p_examples() {
        let dep = MapRep::<f64>::completely_depolarizing(3, 2).unwrap();
        assert!(in_p(&dep, TOL).unwrap().is_in());
        assert!(in_p(&MapRep::<f64>::identity(2).unwrap(), TOL).unwrap().is_out());
        let mut rng = rng_for(6, 0);
        let d = Dims::square(2).unwrap();
        let prod = |rng: &mut _| {
            let a: CMatrix = random_density(2, 2, rng);
            let b: CMatrix = random_density(2, 2, rng);
            MapRep::from_choi(d, tensor(&a, &b)).unwrap()
        };
        let (x, y) = (prod(&mut rng), prod(&mut rng));
        let mix = x.scale(0.3).add(&y.scale(0.7)).unwrap();
        assert!(in_p(&mix, TOL).unwrap().is_in());
    }

    #[test]
    fn f_and_ppt_state_examples() {
        let d = Dims::new(2, 3).unwrap();
        let mixed = CMatrix::<f64>::identity(6).scale(1.0 / 6.0);
        assert!(is_ppt_state(&mixed, d, TOL).unwrap().is_in());
        let d3 = Dims::square(3).unwrap();
        let pure = max_entangled::<f64>(3).scale(1.0 / 3.0);
        match is_ppt_state(&pure, d3, TOL).unwrap().certificate {
            Some(Certificate::MinEigen {
                spectrum: Spectrum::PartialTranspose,
                min_eigenvalue,
                ..
            }) => assert!((min_eigenvalue + 1.0 / 3.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            is_ppt_state(&CMatrix::<f64>::identity(6), d, TOL),
            Err(Error::InvalidState(_))
        ));
        let bad = CMatrix::<f64>::unit(6, 0, 1);
        assert!(matches!(in_f(&bad, d, TOL), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn separable_mixture_is_in_f() {
        let mut rng = rng_for(8, 0);
        let d = Dims::new(3, 2).unwrap();
        let mut x = CMatrix::<f64>::zeros(6, 6);
        for _ in 0..5 {
            let a: CMatrix = random_density(3, 1, &mut rng);
            let b: CMatrix = random_density(2, 2, &mut rng);
            x += &tensor(&a, &b);
        }
        assert!(in_f(&x, d, TOL).unwrap().is_in());
    }

    #[test]
    fn sampled_membership_reductions() {
        let mut rng = rng_for(9, 0);
        let d = Dims::square(2).unwrap();
        let id = MapRep::<f64>::identity(2).unwrap();
        let t = MapRep::<f64>::transpose(2).unwrap();
        for _ in 0..30 {
            let x: CMatrix = random_hermitian(4, &mut rng);
            let x = &x + &CMatrix::identity(4).scale(1.2);
            let psd = is_psd(&x, TOL).unwrap().0;
            let ppt = is_psd(&partial_transpose(&x, d).unwrap(), TOL).unwrap().0;
            let with_id = pm_k_membership(&x, d, std::slice::from_ref(&id), TOL).unwrap();
            let with_t = pm_k_membership(&x, d, std::slice::from_ref(&t), TOL).unwrap();
            let with_both = pm_k_membership(&x, d, &[id.clone(), t.clone()], TOL).unwrap();
            assert_eq!(with_id.is_in(), psd);
            assert_eq!(with_t.is_in(), ppt);
            assert_eq!(with_both.is_in(), in_f(&x, d, TOL).unwrap().is_in());
            assert_eq!(with_both.is_in(), with_id.is_in() && with_t.is_in());
            if with_both.is_in() {
                assert!(with_both.heuristic);
            }
        }
        let x = CMatrix::<f64>::identity(4);
        assert!(matches!(pm_k_membership(&x, d, &[], TOL), Err(Error::EmptySamples)));
    }
}
