//! Generator pools, the `K^d`, `K^t` and `K♯` constructions, and the four
//! equivalent conditions for membership in the dual of the `K`-positive maps.

use rand::Rng;

use crate::choi::{adjoint, compose_left, dual_functional, dual_generator, lift, pairing, transpose_conj, MapRep};
use crate::cones::{in_e, is_cp, witness_search, Certificate, ConeId, DykstraConfig, Status, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, partial_transpose, CMatrix, Dims};
use crate::random::{random_density, random_unit_vector, rng_for, split_seed, SeededRng};

use super::sampler::ConeSampler;

/// Default number of sampled generators per pool.
pub const POOL_SIZE: usize = 32;
/// Default number of random PSD probes for condition (iii).
pub const PROBES: usize = 64;

/// `t ∘ α* ∘ t` for every `α`.
pub fn kd_generators(samples: &[MapRep]) -> Vec<MapRep> {
    samples.iter().map(dual_generator).collect()
}

/// `αᵗ = t ∘ α ∘ t` for every `α`.
pub fn k_t(samples: &[MapRep]) -> Vec<MapRep> {
    samples.iter().map(transpose_conj).collect()
}

/// Sampled test of `β ∈ K♯`: `β ∘ α*` is CP for every sampled `α ∈ K`.
/// IN is relative to the samples and always flagged heuristic.
pub fn ksharp_membership(beta: &MapRep, samples: &[MapRep], tol: f64) -> Result<Verdict> {
    let d = beta.dims();
    if d.n != d.m {
        return Err(Error::InvalidDims(format!("K♯ needs a square map, got ({}, {})", d.n, d.m)));
    }
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    for (index, alpha) in samples.iter().enumerate() {
        let v = is_cp(&compose_left(beta, &adjoint(alpha))?, tol)?;
        if let Some(Certificate::MinEigen {
            min_eigenvalue, vector, ..
        }) = v.certificate
        {
            return Ok(Verdict::outside(Certificate::SampleViolation {
                index,
                min_eigenvalue,
                vector,
            }));
        }
    }
    Ok(Verdict::heuristic_inside(None))
}

/// Maps that generate `K` exactly for the concrete cones: `ι` for CP, `t` for
/// COP, both for D, and the completely depolarizing map for P.
pub fn canonical_generators(cone: ConeId, m: usize) -> Result<Vec<MapRep>> {
    Ok(match cone {
        ConeId::MapCp => vec![MapRep::identity(m)?],
        ConeId::MapCop => vec![MapRep::transpose(m)?],
        ConeId::MapD => vec![MapRep::identity(m)?, MapRep::transpose(m)?],
        ConeId::MapP => vec![MapRep::completely_depolarizing(m, m)?],
        other => {
            return Err(Error::UnknownName(format!(
                "no generator pool for cone `{other}` (expected cp, cop, p or d)"
            )))
        }
    })
}

fn unit_frobenius(phi: MapRep) -> MapRep {
    let norm = phi.choi().frobenius_norm();
    phi.scale(1.0 / norm)
}

/// Canonical generators plus `count` samples of `cone` on `M_m`, each scaled to
/// unit Frobenius norm.
pub fn generator_pool(cone: ConeId, m: usize, count: usize, seed: u64) -> Result<Vec<MapRep>> {
    let mut pool = canonical_generators(cone, m)?;
    let mut sampler = ConeSampler::new(cone, Dims::square(m)?, seed)?;
    pool.extend(sampler.take(count)?);
    Ok(pool.into_iter().map(unit_frobenius).collect())
}

/// Members of `P` on `M_m` that expose a non-decomposable `φ: M_n → M_m`, for
/// `n ≤ m`.
///
/// A witness `w ∈ F` with `Tr(C_φ w) < 0` is embedded into `M_m ⊗ M_m` through
/// the first `n` basis vectors of `C^m` and read as the Choi matrix of `β ∈ P`.
/// The returned map is `α = (βᵗ)*`, also in `P`, for which `t ∘ α* ∘ t = β`,
/// `(ι ⊗ α)(C_{φᵗ})` and `(ι ⊗ αᵗ)(C_φ)` all pair negatively with the
/// (compressed) maximally entangled vector. Empty when no witness is found or
/// when `n > m`.
pub fn witness_generators(phi: &MapRep, cfg: &DykstraConfig, seed: u64) -> Result<Vec<MapRep>> {
    let d = phi.dims();
    if d.n > d.m {
        return Ok(Vec::new());
    }
    let Some(found) = witness_search(phi.choi(), d, cfg, 1, seed)? else {
        return Ok(Vec::new());
    };
    let m = d.m;
    let mut embedded = CMatrix::zeros(m * m, m * m);
    for i in 0..d.n {
        for j in 0..d.n {
            embedded.set_block(i, j, &found.w.block(i, j, m));
        }
    }
    let beta = MapRep::from_choi(Dims::square(m)?, embedded)?;
    Ok(vec![unit_frobenius(adjoint(&transpose_conj(&beta)))])
}

/// One of the four conditions: whether it holds (`None` when the oracle could
/// not decide) and the signed margin behind the decision, relative to
/// `1 + ‖C_φ‖_F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub holds: Option<bool>,
    pub margin: f64,
}

impl Condition {
    fn from_margin(margin: f64, tol: f64) -> Self {
        Self {
            holds: Some(margin >= -tol),
            margin,
        }
    }

    /// Decided and at least `10·tol` from the threshold.
    pub fn is_clear(&self, tol: f64) -> bool {
        self.holds.is_some() && self.margin.abs() > 10.0 * tol
    }
}

/// Conditions (i)–(iv) for one map and one cone.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Outcome {
    pub conditions: [Condition; 4],
}

impl Theorem1Outcome {
    pub fn is_boundary(&self, tol: f64) -> bool {
        self.conditions.iter().any(|c| !c.is_clear(tol))
    }

    /// Pairs `(a, b)` (0-based) whose decisions differ.
    pub fn disagreements(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                if self.conditions[a].holds != self.conditions[b].holds {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn agree(&self) -> bool {
        self.disagreements().is_empty()
    }
}

fn min_eig(x: &CMatrix) -> Result<(f64, Vec<crate::C64>)> {
    let spec = eig_hermitian(&x.hermitian_part())?;
    Ok((spec.min_eigenvalue(), spec.min_eigenvector()))
}

fn rank_one_map(d: Dims, v: &[crate::C64]) -> Result<MapRep> {
    MapRep::from_choi(d, CMatrix::outer(v, v))
}

/// Conditions (i)–(iv) computed independently:
///
/// * (i) `pairing(φ, α∘ψ)` over `α ∈ K^d` (from `pool`) and CP `ψ`, with one
///   adversarial rank-one `ψ` per `α` and two random ones.
/// * (ii) the closed form of `C_φ ∈ P(M, Kᵗ)`: PSD, PT-PSD, `E`, `F` for CP,
///   COP, P, D.
/// * (iii) `φ̃((ι ⊗ α*)(x))` over `α ∈ pool`, random PSD probes and one
///   adversarial probe per `α`.
/// * (iv) `αᵗ ∘ φ` CP for `α ∈ pool`.
///
/// `pool` holds maps `M_m → M_m`.
pub fn theorem1_conditions(
    phi: &MapRep,
    cone: ConeId,
    pool: &[MapRep],
    tol: f64,
    rng: &mut SeededRng,
) -> Result<Theorem1Outcome> {
    if !matches!(cone, ConeId::MapCp | ConeId::MapCop | ConeId::MapP | ConeId::MapD) {
        return Err(Error::UnknownName(format!(
            "theorem-1 conditions need cone cp, cop, p or d, got `{cone}`"
        )));
    }
    if pool.is_empty() {
        return Err(Error::EmptySamples);
    }
    let d = phi.dims();
    let c = phi.choi();
    c.ensure_hermitian(crate::linalg::DEFAULT_TOL)?;
    let scale = 1.0 + c.frobenius_norm();

    // (i)
    let mut first = f64::INFINITY;
    let randoms: Vec<MapRep> = (0..2)
        .map(|_| MapRep::from_choi(d, random_density(d.total(), d.total(), rng)))
        .collect::<Result<_>>()?;
    for alpha in kd_generators(pool) {
        let y = lift(&adjoint(&alpha), c, d.n)?;
        let (_, v) = min_eig(&y)?;
        let adversarial = rank_one_map(d, &v)?;
        for psi in std::iter::once(&adversarial).chain(&randoms) {
            first = first.min(pairing(phi, &compose_left(&alpha, psi)?)?);
        }
    }
    let first = Condition::from_margin(first / scale, tol);

    // (ii)
    let second = match cone {
        ConeId::MapCp => Condition::from_margin(min_eig(c)?.0 / scale, tol),
        ConeId::MapCop => Condition::from_margin(min_eig(&partial_transpose(c, d)?)?.0 / scale, tol),
        ConeId::MapD => {
            let m = min_eig(c)?.0.min(min_eig(&partial_transpose(c, d)?)?.0);
            Condition::from_margin(m / scale, tol)
        }
        _ => {
            let v = in_e(c, d, &DykstraConfig::with_tol(tol))?;
            match (v.status, v.certificate) {
                (Status::In, _) => Condition {
                    holds: Some(true),
                    margin: 1.0,
                },
                (Status::Out, Some(Certificate::Witness { value, .. })) => Condition {
                    holds: Some(false),
                    margin: value / scale,
                },
                _ => Condition {
                    holds: None,
                    margin: 0.0,
                },
            }
        }
    };

    // (iii)
    let functional = dual_functional(phi);
    let phi_t = transpose_conj(phi);
    let probes: Vec<CMatrix> = (0..PROBES)
        .map(|k| {
            let rank = if k % 2 == 0 { 1 } else { d.total() };
            random_density(d.total(), rank, rng)
        })
        .collect();
    let mut third = f64::INFINITY;
    for alpha in pool {
        let adj = adjoint(alpha);
        let (_, v) = min_eig(&lift(alpha, phi_t.choi(), d.n)?)?;
        let adversarial = CMatrix::outer(&v, &v);
        for x in std::iter::once(&adversarial).chain(&probes) {
            third = third.min(functional.eval_real(&lift(&adj, x, d.n)?)?);
        }
    }
    let third = Condition::from_margin(third / scale, tol);

    // (iv)
    let mut fourth = f64::INFINITY;
    for beta in k_t(pool) {
        fourth = fourth.min(min_eig(compose_left(&beta, phi)?.choi())?.0);
    }
    let fourth = Condition::from_margin(fourth / scale, tol);

    Ok(Theorem1Outcome {
        conditions: [first, second, third, fourth],
    })
}

/// A trial map for the theorem-1 suite: a member of `P(M, Kᵗ)` (as a Choi
/// matrix; F samples are nudged off the boundary), perturbed by a random
/// Hermitian half of the time. At 3⊗3 a quarter
/// of the P trials start from the Choi map shifted toward the identity.
pub fn theorem1_trial_map(cone: ConeId, d: Dims, rng: &mut SeededRng) -> Result<MapRep> {
    let n = d.total();
    let wishart = |rng: &mut SeededRng| crate::random::random_psd::<f64, _>(n, n, rng);
    let unit = |x: CMatrix| {
        let tr = x.trace().re;
        x.scale(1.0 / tr)
    };
    if cone == ConeId::MapP && d.n == 3 && d.m == 3 && rng.gen_bool(0.25) {
        let shift: f64 = rng.gen_range(0.0..0.4);
        let h = crate::random::random_hermitian::<f64, _>(n, rng);
        let x = &(crate::fixtures::choi_map().choi() + &CMatrix::identity(n).scale(shift)) + &h.scale(0.01);
        return MapRep::from_choi(d, x);
    }
    let member = match cone {
        ConeId::MapCp => wishart(rng),
        ConeId::MapCop => partial_transpose(&wishart(rng), d)?,
        ConeId::MapP => &wishart(rng) + &partial_transpose(&wishart(rng), d)?,
        ConeId::MapD => {
            let seed: u64 = rng.gen();
            let x = ConeSampler::new(ConeId::MapP, d, seed)?.draw()?.into_choi();
            let nudge: f64 = rng.gen_range(0.01..0.1) / n as f64;
            &x + &CMatrix::identity(n).scale(nudge)
        }
        other => return Err(Error::UnknownName(format!("no trial maps for cone `{other}`"))),
    };
    let member = unit(member);
    if rng.gen_bool(0.5) {
        let h = crate::random::random_hermitian::<f64, _>(n, rng);
        let s: f64 = rng.gen_range(0.0..0.5) / h.frobenius_norm();
        MapRep::from_choi(d, &member + &h.scale(s))
    } else {
        MapRep::from_choi(d, member)
    }
}

/// Per-trial stream: the trial index selects the ChaCha stream, the tag keeps
/// suites that share a seed apart.
pub(crate) fn trial_rng(seed: u64, tag: u64, trial: usize) -> SeededRng {
    rng_for(split_seed(seed, tag), trial as u64)
}

/// Random unit vector helper re-exported for suites.
pub(crate) fn unit_vector(dim: usize, rng: &mut SeededRng) -> Vec<crate::C64> {
    random_unit_vector(dim, rng)
}
