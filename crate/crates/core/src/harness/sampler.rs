//! Random members of the map cones.

use crate::choi::MapRep;
use crate::cones::{
    in_p, in_s, is_cop, is_cp, is_decomposable, is_positive_map, project_f, ConeId, DykstraConfig,
};
use crate::error::{Error, Result};
use crate::fixtures::choi_map;
use crate::linalg::{partial_transpose, tensor, CMatrix, Dims};
use crate::random::{random_density, random_hermitian, random_psd, rng_for, SeededRng};
use rand::Rng;

const MAX_ATTEMPTS: usize = 100;
const SAMPLE_TOL: f64 = 1e-9;

/// A seeded stream of samples from one map cone.
#[derive(Debug, Clone)]
pub struct ConeSampler {
    pub cone: ConeId,
    pub d: Dims,
    pub seed: u64,
    rng: SeededRng,
}

impl ConeSampler {
    pub fn new(cone: ConeId, d: Dims, seed: u64) -> Result<Self> {
        if !cone.is_map_cone() {
            return Err(Error::InvalidConfig(format!("`{cone}` is not a map cone")));
        }
        Ok(Self {
            cone,
            d,
            seed,
            rng: rng_for(seed, 0),
        })
    }

    pub fn draw(&mut self) -> Result<MapRep> {
        sample_map(self.cone, self.d, &mut self.rng)
    }

    pub fn take(&mut self, k: usize) -> Result<Vec<MapRep>> {
        (0..k).map(|_| self.draw()).collect()
    }
}

fn unit_trace(x: CMatrix) -> Option<CMatrix> {
    let tr = x.trace().re;
    (tr > 1e-9 && tr.is_finite()).then(|| x.scale(1.0 / tr))
}

fn cp_choi(d: Dims, rng: &mut SeededRng) -> CMatrix {
    random_psd(d.total(), d.total(), rng)
}

fn candidate(cone: ConeId, d: Dims, rng: &mut SeededRng) -> Result<Option<CMatrix>> {
    let x = match cone {
        ConeId::MapCp => cp_choi(d, rng),
        ConeId::MapCop => partial_transpose(&cp_choi(d, rng), d)?,
        ConeId::MapP => {
            let h = random_hermitian(d.total(), rng);
            let p = match project_f(&h, d, &DykstraConfig::default()) {
                Ok(p) => p,
                Err(Error::NoConvergence { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            if p.frobenius_norm() < 1e-6 * h.frobenius_norm() {
                return Ok(None);
            }
            p
        }
        ConeId::MapD => &cp_choi(d, rng) + &partial_transpose(&cp_choi(d, rng), d)?,
        ConeId::MapS => {
            let mut x = CMatrix::zeros(d.total(), d.total());
            for _ in 0..d.total() {
                let a = random_density(d.n, d.n, rng);
                let b = random_density(d.m, d.m, rng);
                x += &tensor(&a, &b);
            }
            x
        }
        ConeId::MapPos => {
            let base = &cp_choi(d, rng) + &partial_transpose(&cp_choi(d, rng), d)?;
            let base = unit_trace(base).expect("positive trace");
            if d.n == 3 && d.m == 3 {
                let lambda: f64 = rng.gen_range(0.5..1.0);
                let phi = unit_trace(choi_map().into_choi()).expect("positive trace");
                &phi.scale(lambda) + &base.scale(1.0 - lambda)
            } else {
                base
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!("`{other}` is not a map cone")));
        }
    };
    Ok(unit_trace(x))
}

fn passes(cone: ConeId, phi: &MapRep, seed: u64) -> Result<bool> {
    let v = match cone {
        ConeId::MapCp => is_cp(phi, SAMPLE_TOL)?,
        ConeId::MapCop => is_cop(phi, SAMPLE_TOL)?,
        ConeId::MapP => in_p(phi, SAMPLE_TOL)?,
        ConeId::MapD => is_decomposable(phi, &DykstraConfig::default())?,
        ConeId::MapS => in_s(phi, SAMPLE_TOL, seed)?,
        ConeId::MapPos => is_positive_map(phi, 8, SAMPLE_TOL, seed)?,
        _ => unreachable!("checked by candidate"),
    };
    Ok(v.is_in() && (cone == ConeId::MapPos || !v.heuristic))
}

/// One trace-normalized sample of a map cone.
///
/// * CP: `G G*` with `G` a square standard complex Gaussian.
/// * COP: partial transpose of a CP sample.
/// * P: projection of a random Hermitian onto `F`.
/// * D: CP sample plus the partial transpose of another.
/// * S: `Σ_i σ_i ⊗ ρ_i` over `n·m` random density pairs.
/// * POS: a D sample, mixed with the Choi map at 3⊗3.
///
/// Each draw is re-checked by the cone's own oracle; degenerate, unconverged or
/// rejected draws are redrawn, at most 100 times.
pub fn sample_map(cone: ConeId, d: Dims, rng: &mut SeededRng) -> Result<MapRep> {
    for _ in 0..MAX_ATTEMPTS {
        let Some(x) = candidate(cone, d, rng)? else { continue };
        let phi = MapRep::from_choi(d, x)?;
        let check_seed: u64 = rng.gen();
        if passes(cone, &phi, check_seed)? {
            return Ok(phi);
        }
    }
    Err(Error::NoConvergence {
        what: "cone sampler",
        iterations: MAX_ATTEMPTS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_psd;

    #[test]
    fn samples_pass_their_oracles() {
        let d = Dims::new(2, 3).unwrap();
        for cone in [ConeId::MapCp, ConeId::MapCop, ConeId::MapP, ConeId::MapD, ConeId::MapS] {
            let mut s = ConeSampler::new(cone, d, 7).unwrap();
            for phi in s.take(3).unwrap() {
                assert!(passes(cone, &phi, 1).unwrap(), "{cone}");
                assert!((phi.choi().trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn s_samples_are_ppt() {
        let d = Dims::square(2).unwrap();
        let mut s = ConeSampler::new(ConeId::MapS, d, 8).unwrap();
        for phi in s.take(5).unwrap() {
            let pt = partial_transpose(phi.choi(), d).unwrap();
            assert!(is_psd(&pt, 1e-12).unwrap().0);
        }
    }

    #[test]
    fn positive_samples_at_three_include_choi_map() {
        let d = Dims::square(3).unwrap();
        let mut s = ConeSampler::new(ConeId::MapPos, d, 9).unwrap();
        let phi = s.draw().unwrap();
        assert!(is_positive_map(&phi, 8, 1e-9, 0).unwrap().is_in());
    }

    #[test]
    fn sampler_is_deterministic() {
        let d = Dims::square(2).unwrap();
        let a = ConeSampler::new(ConeId::MapP, d, 3).unwrap().take(2).unwrap();
        let b = ConeSampler::new(ConeId::MapP, d, 3).unwrap().take(2).unwrap();
        assert_eq!(a, b);
        assert!(ConeSampler::new(ConeId::OpE, d, 3).is_err());
    }
}
