//! The individual suites behind [`super::verify`].

use rand::Rng;

use super::generators::{
    generator_pool, kd_generators, ksharp_membership, theorem1_conditions, theorem1_trial_map, unit_vector,
    witness_generators, Condition, POOL_SIZE,
};
use super::sampler::sample_map;
use super::{run_trials, Check, RunCtx, TheoremId, TrialLog};
use crate::choi::{
    adjoint, apply, compose_left, dual_functional, lift, omega_eval, pairing, transpose_conj, trpi_eval, MapRep,
};
use crate::cones::{
    in_f, in_p, is_cp, is_decomposable, is_separable, pm_k_membership, witness_search, Certificate, ConeId,
    DykstraConfig, Status, Verdict,
};
use crate::error::{Error, Result};
use crate::fixtures::{choi_map, choi_map_witness};
use crate::linalg::{
    both_transpose, eig_hermitian, full_transpose, partial_transpose, tensor, trace_pairing, CMatrix, Dims,
};
use crate::random::{ginibre, random_density, random_hermitian, random_psd, SeededRng};

type Logs = (Vec<TrialLog>, Vec<String>);

pub(crate) fn run(ctx: RunCtx, trials: usize) -> Result<Logs> {
    match ctx.id {
        TheoremId::T1 => theorem1(ctx, trials),
        TheoremId::T6 => double_dual(ctx, trials),
        TheoremId::T12 => sharp_cones(ctx, trials),
        TheoremId::T13 => p_d_duality(ctx, trials),
        TheoremId::T18 => d_is_p_sharp(ctx, trials),
        TheoremId::C2 => horodecki(ctx, trials),
        TheoremId::C19 => witness_consistency(ctx, trials),
        TheoremId::L4 => plain(run_trials(trials, |t| transpose_identities(ctx, t))),
        TheoremId::L5 => plain(run_trials(trials, |t| lift_transpose(ctx, t))),
        TheoremId::L8 => plain(run_trials(trials, |t| entangled_bridge(ctx, t))),
        TheoremId::L10 => plain(run_trials(trials, |t| trpi_bridge(ctx, t))),
        TheoremId::L15 => plain(run_trials(trials, |t| join_intersection(ctx, t))),
        TheoremId::L16 => e_inside_p_positive(ctx, trials),
        TheoremId::L17 => p_maps_in_f(ctx, trials),
    }
}

fn plain(logs: Result<Vec<TrialLog>>) -> Result<Logs> {
    Ok((logs?, Vec::new()))
}

fn require_square(ctx: RunCtx) -> Result<()> {
    if ctx.d.n != ctx.d.m {
        return Err(Error::InvalidDims(format!(
            "suite {} needs n = m, got ({}, {})",
            ctx.id, ctx.d.n, ctx.d.m
        )));
    }
    Ok(())
}

fn min_eig(x: &CMatrix) -> Result<f64> {
    Ok(eig_hermitian(&x.hermitian_part())?.min_eigenvalue())
}

fn scale_of(x: &CMatrix) -> f64 {
    1.0 + x.frobenius_norm()
}

fn rel_diff(a: &CMatrix, b: &CMatrix, scale: f64) -> f64 {
    (a - b).frobenius_norm() / scale
}

fn hermitian_map(d: Dims, rng: &mut SeededRng) -> Result<MapRep> {
    MapRep::from_choi(d, random_hermitian(d.total(), rng))
}

/// Wishart or shifted GUE Choi matrix, unit Frobenius norm.
fn mixed_sign_map(d: Dims, rng: &mut SeededRng) -> Result<MapRep> {
    let n = d.total();
    let x = if rng.gen_bool(0.5) {
        random_psd(n, n, rng)
    } else {
        let h = random_hermitian(n, rng);
        let shift: f64 = rng.gen_range(0.0..1.5) * h.frobenius_norm() / (n as f64).sqrt();
        &h + &CMatrix::identity(n).scale(shift)
    };
    let norm = x.frobenius_norm();
    MapRep::from_choi(d, x.scale(1.0 / norm))
}

fn verdict_condition(v: &Verdict, scale: f64) -> Condition {
    let margin = match (&v.status, &v.certificate) {
        (Status::Undecided, _) => return Condition { holds: None, margin: 0.0 },
        (
            _,
            Some(Certificate::MinEigen { min_eigenvalue, .. } | Certificate::SampleViolation { min_eigenvalue, .. }),
        ) => *min_eigenvalue,
        (_, Some(Certificate::PptSpectra { min_eigenvalue, pt_min_eigenvalue })) => {
            min_eigenvalue.min(*pt_min_eigenvalue)
        }
        (_, Some(Certificate::Witness { value, .. } | Certificate::EntanglementWitness { value, .. })) => *value,
        (Status::In, _) => scale,
        (Status::Out, _) => -scale,
    };
    Condition {
        holds: Some(v.is_in()),
        margin: margin / scale,
    }
}

// ---------------------------------------------------------------- L suites

fn transpose_identities(ctx: RunCtx, trial: usize) -> Result<TrialLog> {
    let mut rng = ctx.rng(trial);
    let Dims { n, m } = ctx.d;
    let phi = hermitian_map(ctx.d, &mut rng)?;
    let scale = scale_of(phi.choi());
    let mut log = TrialLog::default();

    let by_action = MapRep::from_action(n, m, |a| {
        full_transpose(&apply(&phi, &full_transpose(a)).expect("input dims"))
    })?;
    let tt = transpose_conj(&phi);
    log.push(Check::identity("C(phi^t) = (t x t)(C)", rel_diff(by_action.choi(), tt.choi(), scale), ctx.tol));

    let f = dual_functional(&phi);
    let ft = dual_functional(&tt);
    for _ in 0..20 {
        let x = ginibre(ctx.d.total(), ctx.d.total(), &mut rng);
        let s = scale * (1.0 + x.frobenius_norm());
        let err = (ft.eval(&x)? - f.eval(&full_transpose(&x))?).norm() / s;
        log.push(Check::identity("dual(phi^t)(x) = dual(phi)(x^t)", err, ctx.tol));
    }

    let a = ginibre(n, n, &mut rng);
    let b = ginibre(m, m, &mut rng);
    let lhs = f.eval(&tensor(&a, &b))?;
    let rhs = trace_pairing(&apply(&phi, &a)?, &full_transpose(&b))?;
    let s = scale * (1.0 + a.frobenius_norm()) * (1.0 + b.frobenius_norm());
    log.push(Check::identity("dual(a x b) = Tr(phi(a) b^t)", (lhs - rhs).norm() / s, ctx.tol));
    Ok(log)
}

fn lift_transpose(ctx: RunCtx, trial: usize) -> Result<TrialLog> {
    let mut rng = ctx.rng(trial);
    let Dims { n, m } = ctx.d;
    let x = random_hermitian(ctx.d.total(), &mut rng);
    let scale = scale_of(&x);
    let mut log = TrialLog::default();
    log.push(Check::identity(
        "(t x t)(x) = x^T",
        rel_diff(&both_transpose(&x, ctx.d)?, &full_transpose(&x), scale),
        ctx.tol,
    ));
    for _ in 0..4 {
        let alpha = hermitian_map(Dims::square(m)?, &mut rng)?;
        let a_scale = scale * scale_of(alpha.choi());
        let lhs = lift(&transpose_conj(&alpha), &full_transpose(&x), n)?;
        let rhs = full_transpose(&lift(&alpha, &x, n)?);
        log.push(Check::identity("(id x alpha^t)(x^T) = ((id x alpha)(x))^T", rel_diff(&lhs, &rhs, a_scale), ctx.tol));
    }
    Ok(log)
}

/// Probes for the entangled-state test of complete positivity.
pub(crate) const L8_PROBES: usize = 200;
/// `|min eig|` below this (relative) counts as boundary in the sign comparison.
pub(crate) const L8_BOUNDARY: f64 = 1e-7;

fn entangled_bridge(ctx: RunCtx, trial: usize) -> Result<TrialLog> {
    require_square(ctx)?;
    let mut rng = ctx.rng(trial);
    let d = ctx.d;
    let n = d.n;
    let phi = if rng.gen_bool(0.5) {
        MapRep::from_choi(d, random_psd(d.total(), d.total(), &mut rng))?
    } else {
        hermitian_map(d, &mut rng)?
    };
    let phi_adj = adjoint(&phi);
    let scale = scale_of(phi.choi());
    let mut log = TrialLog::default();
    let mut worst_bridge: f64 = 0.0;
    let mut min_probe = f64::INFINITY;
    for k in 0..L8_PROBES {
        let rank = if k % 2 == 0 { 1 } else { d.total() };
        let x = random_density(d.total(), rank, &mut rng);
        let via_omega = n as f64 * omega_eval(&lift(&phi_adj, &x, n)?, d)?;
        let direct = trace_pairing(phi.choi(), &x)?.re;
        worst_bridge = worst_bridge.max((via_omega - direct).abs() / scale);
        min_probe = min_probe.min(via_omega);
    }
    log.push(Check::identity("Tr(C x) = n omega((id x phi*)(x))", worst_bridge, ctx.tol));

    let cp = is_cp(&phi, 1e-9)?;
    let lam = min_eig(phi.choi())? / scale;
    if lam.abs() <= L8_BOUNDARY {
        log.push(Check::boundary("is_cp vs probe sign"));
    } else {
        let probes_nonneg = min_probe >= -1e-12 * scale;
        log.push(Check::expect("is_cp vs probe sign", cp.is_in() == probes_nonneg, lam));
    }
    Ok(log)
}

fn trpi_bridge(ctx: RunCtx, trial: usize) -> Result<TrialLog> {
    require_square(ctx)?;
    let mut rng = ctx.rng(trial);
    let d = ctx.d;
    let phi = hermitian_map(d, &mut rng)?;
    let via = adjoint(&transpose_conj(&phi));
    let f = dual_functional(&phi);
    let scale = scale_of(phi.choi());
    let mut log = TrialLog::default();
    for _ in 0..10 {
        let x = ginibre(d.total(), d.total(), &mut rng);
        let s = scale * (1.0 + x.frobenius_norm());
        let err = (f.eval(&x)? - trpi_eval(&lift(&via, &x, d.n)?, d)?).norm() / s;
        log.push(Check::identity("dual(x) = Tr pi((id x phi*t)(x))", err, ctx.tol));
        let xx = &x * &x.adjoint();
        let v = trpi_eval(&xx, d)?;
        let s = 1.0 + xx.frobenius_norm();
        log.push(Check::at_least("Tr pi(x x*) >= 0", v.re / s, ctx.tol));
        log.push(Check::identity("Im Tr pi(x x*) = 0", v.im.abs() / s, ctx.tol));
    }
    Ok(log)
}

fn join_intersection(ctx: RunCtx, trial: usize) -> Result<TrialLog> {
    let mut rng = ctx.rng(trial);
    let d = ctx.d;
    let x = if rng.gen_bool(0.5) {
        // F samples sit on the boundary; nudge half of them inside
        let x = sample_map(ConeId::MapP, d, &mut rng)?.into_choi();
        let n = d.total();
        let nudge: f64 = if rng.gen_bool(0.5) { rng.gen_range(0.01..0.1) / n as f64 } else { 0.0 };
        &x + &CMatrix::identity(n).scale(nudge)
    } else {
        let n = d.total();
        let h = random_hermitian(n, &mut rng);
        let shift: f64 = rng.gen_range(0.0..2.0) * h.frobenius_norm() / (n as f64).sqrt();
        &h + &CMatrix::identity(n).scale(shift)
    };
    let scale = scale_of(&x);
    let id = [MapRep::identity(d.m)?];
    let t = [MapRep::transpose(d.m)?];
    let f = in_f(&x, d, ctx.tol)?;
    let via_id = pm_k_membership(&x, d, &id, ctx.tol)?;
    let via_t = pm_k_membership(&x, d, &t, ctx.tol)?;
    let lam = min_eig(&x)?.min(min_eig(&partial_transpose(&x, d)?)?) / scale;
    let mut log = TrialLog::default();
    let a = Condition {
        holds: Some(f.is_in()),
        margin: lam,
    };
    let b = Condition {
        holds: Some(via_id.is_in() && via_t.is_in()),
        margin: lam,
    };
    log.push(Check::agree("in_F vs P(M,{id}) and P(M,{t})", a, b, ctx.tol));
    Ok(log)
}

fn e_inside_p_positive(ctx: RunCtx, trials: usize) -> Result<Logs> {
    let d = ctx.d;
    let pool = generator_pool(ConeId::MapP, d.m, POOL_SIZE, ctx.sub_seed(1))?;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let n = d.total();
        let rank_a = rng.gen_range(1..=n);
        let rank_b = rng.gen_range(1..=n);
        let x = &random_psd(n, rank_a, &mut rng) + &partial_transpose(&random_psd(n, rank_b, &mut rng), d)?;
        let x = x.scale(1.0 / x.trace().re);
        let scale = scale_of(&x);
        let mut log = TrialLog::default();
        let mut worst = f64::INFINITY;
        for alpha in &pool {
            worst = worst.min(min_eig(&lift(alpha, &x, d.n)?)?);
        }
        log.push(Check::at_least("(id x alpha)(A + PT(B)) >= 0 for alpha in P", worst / scale, ctx.tol));
        Ok(log)
    })?;
    Ok((logs, vec![format!("P pool: {} generators", pool.len())]))
}

fn p_maps_in_f(ctx: RunCtx, trials: usize) -> Result<Logs> {
    let d = ctx.d;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let phi = sample_map(ConeId::MapP, d, &mut rng)?;
        let mut log = TrialLog::default();
        let p = in_p(&phi, ctx.tol)?;
        let f = in_f(phi.choi(), d, ctx.tol)?;
        log.push(Check::expect("in_P => in_F", !p.is_in() || f.is_in(), 1.0));

        let alpha = sample_map(ConeId::MapP, Dims::square(d.m)?, &mut rng)?;
        let psi = MapRep::from_choi(d, random_psd(d.total(), rng.gen_range(1..=d.total()), &mut rng))?;
        let comp = compose_left(&alpha, &psi)?;
        let c = comp.choi();
        let scale = scale_of(c);
        let lam = min_eig(c)?.min(min_eig(&partial_transpose(c, d)?)?);
        log.push(Check::at_least("C(alpha o psi) in F for alpha in P, psi CP", lam / scale, ctx.tol));
        Ok(log)
    })?;
    Ok((logs, Vec::new()))
}

// ---------------------------------------------------------------- theorems

const T1_CONES: [ConeId; 4] = [ConeId::MapCp, ConeId::MapCop, ConeId::MapP, ConeId::MapD];
const PAIR_NAMES: [&str; 4] = ["(i)", "(ii)", "(iii)", "(iv)"];

fn theorem1(ctx: RunCtx, trials: usize) -> Result<Logs> {
    let d = ctx.d;
    let cfg = DykstraConfig::with_tol(ctx.tol);
    let pools: Vec<Vec<MapRep>> = T1_CONES
        .iter()
        .enumerate()
        .map(|(k, &cone)| generator_pool(cone, d.m, POOL_SIZE, ctx.sub_seed(k as u64)))
        .collect::<Result<_>>()?;
    // a single F-witness does not yield a single P generator when n > m
    let skip_p = d.n > d.m;
    let logs = run_trials(trials * T1_CONES.len(), |unit| {
        let (trial, k) = (unit / T1_CONES.len(), unit % T1_CONES.len());
        let cone = T1_CONES[k];
        if skip_p && cone == ConeId::MapP {
            return Ok(TrialLog::default());
        }
        let mut rng = ctx.rng(unit);
        let phi = theorem1_trial_map(cone, d, &mut rng)?;
        let mut pool = pools[k].clone();
        if cone == ConeId::MapP {
            pool.extend(witness_generators(&phi, &cfg, rng.gen())?);
        }
        let out = theorem1_conditions(&phi, cone, &pool, ctx.tol, &mut rng)?;
        let mut log = TrialLog::default();
        for a in 0..4 {
            for b in a + 1..4 {
                let pair = format!("K={cone} trial {trial}: {}-{}", PAIR_NAMES[a], PAIR_NAMES[b]);
                log.push(Check::agree(pair, out.conditions[a], out.conditions[b], ctx.tol));
            }
        }
        Ok(log)
    })?;
    let mut notes = vec![format!(
        "{trials} trials for each of cp, cop, p, d; pools of {} sampled generators plus canonical ones",
        POOL_SIZE
    )];
    if skip_p {
        notes.push("K=p trials skipped: witness-derived generators need n <= m".into());
    }
    Ok((logs, notes))
}

/// `(primal sampler, dual sampler)` for the four concrete cones.
fn primal_dual(cone: ConeId) -> (ConeId, ConeId) {
    match cone {
        ConeId::MapP => (ConeId::MapP, ConeId::MapD),
        ConeId::MapD => (ConeId::MapD, ConeId::MapP),
        c => (c, c),
    }
}

/// Oracle for the dual characterization `C_ψ ∈ P(M, Kᵗ)`.
fn dual_membership(cone: ConeId, psi: &MapRep, tol: f64) -> Result<Verdict> {
    let c = psi.choi();
    let d = psi.dims();
    match cone {
        ConeId::MapCp => is_cp(psi, tol),
        ConeId::MapCop => crate::cones::is_cop(psi, tol),
        ConeId::MapP => crate::cones::in_e(c, d, &DykstraConfig::with_tol(tol)),
        _ => in_f(c, d, tol),
    }
}

/// A map in the dual characterization pairing negatively with `chi`, built
/// from the certificate that `chi` fails membership in the primal cone.
fn separating_map(cone: ConeId, chi: &MapRep, tol: f64) -> Result<Option<MapRep>> {
    let d = chi.dims();
    let primal = match primal_dual(cone).0 {
        ConeId::MapCp => is_cp(chi, tol)?,
        ConeId::MapCop => crate::cones::is_cop(chi, tol)?,
        ConeId::MapP => in_p(chi, tol)?,
        _ => is_decomposable(chi, &DykstraConfig::with_tol(tol))?,
    };
    let psi = match primal.certificate {
        Some(Certificate::MinEigen { spectrum, vector, .. }) if primal.is_out() => {
            let v = CMatrix::outer(&vector, &vector);
            match spectrum {
                crate::cones::Spectrum::Direct => v,
                crate::cones::Spectrum::PartialTranspose => partial_transpose(&v, d)?,
            }
        }
        Some(Certificate::Witness { w, .. }) if primal.is_out() => w,
        _ => return Ok(None),
    };
    Ok(Some(MapRep::from_choi(d, psi)?))
}

fn double_dual(ctx: RunCtx, trials: usize) -> Result<Logs> {
    let d = ctx.d;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let cone = T1_CONES[trial % 4];
        let (primal, dual) = primal_dual(cone);
        let mut log = TrialLog::default();
        let phi = sample_map(primal, d, &mut rng)?;
        let psi = sample_map(dual, d, &mut rng)?;
        let v = pairing(&phi, &psi)? / (scale_of(phi.choi()) * scale_of(psi.choi()));
        log.push(Check::at_least(format!("K={cone}: pairing(member, dual member)"), v, ctx.tol));

        let chi = hermitian_map(d, &mut rng)?;
        if let Some(sep) = separating_map(cone, &chi, ctx.tol)? {
            let s = scale_of(chi.choi()) * scale_of(sep.choi());
            let value = pairing(&chi, &sep)? / s;
            let member = dual_membership(cone, &sep, ctx.tol)?;
            log.push(Check::expect(
                format!("K={cone}: separating map lies in the dual"),
                member.is_in(),
                value,
            ));
            log.push(Check::at_least(format!("K={cone}: separating pairing < 0"), -value, ctx.tol));
        }
        Ok(log)
    })?;
    Ok((logs, vec!["trial k uses cone k mod 4 in the order cp, cop, p, d".into()]))
}

fn sharp_cones(ctx: RunCtx, trials: usize) -> Result<Logs> {
    require_square(ctx)?;
    let d = ctx.d;
    let cones = [ConeId::MapCp, ConeId::MapCop, ConeId::MapD];
    let pools: Vec<Vec<MapRep>> = cones
        .iter()
        .enumerate()
        .map(|(k, &cone)| generator_pool(cone, d.m, POOL_SIZE, ctx.sub_seed(k as u64)))
        .collect::<Result<_>>()?;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let k = trial % cones.len();
        let cone = cones[k];
        let beta = mixed_sign_map(d, &mut rng)?;
        let beta = if rng.gen_bool(0.5) {
            // push toward PT-positivity so COP and P members appear
            let c = beta.choi();
            MapRep::from_choi(d, &c.scale(0.5) + &partial_transpose(c, d)?.scale(0.5))?
        } else {
            beta
        };
        let scale = scale_of(beta.choi());
        let sharp = ksharp_membership(&beta, &pools[k], ctx.tol)?;
        let closed = match cone {
            ConeId::MapCp => is_cp(&beta, ctx.tol)?,
            ConeId::MapCop => crate::cones::is_cop(&beta, ctx.tol)?,
            _ => in_p(&beta, ctx.tol)?,
        };
        let mut log = TrialLog::default();
        log.push(Check::agree(
            format!("K={cone}: sampled K-sharp vs closed form"),
            verdict_condition(&sharp, scale),
            verdict_condition(&closed, scale),
            ctx.tol,
        ));
        Ok(log)
    })?;
    Ok((
        logs,
        vec!["closed forms: CP-sharp = CP, COP-sharp = COP, D-sharp = P".into()],
    ))
}

fn fixture_pairing() -> Result<f64> {
    let phi = choi_map();
    let w = MapRep::from_choi(phi.dims(), choi_map_witness())?;
    pairing(&phi, &w)
}

fn p_d_duality(ctx: RunCtx, trials: usize) -> Result<Logs> {
    let d = ctx.d;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let phi = sample_map(ConeId::MapP, d, &mut rng)?;
        let psi = sample_map(ConeId::MapD, d, &mut rng)?;
        let s = scale_of(phi.choi()) * scale_of(psi.choi());
        let mut log = TrialLog::default();
        log.push(Check::at_least("pairing(P member, D member)", pairing(&phi, &psi)? / s, ctx.tol));
        log.push(Check::at_least("pairing(D member, P member)", pairing(&psi, &phi)? / s, ctx.tol));
        Ok(log)
    })?;
    let mut logs = logs;
    let mut notes = Vec::new();
    if d.n == 3 && d.m == 3 {
        let value = fixture_pairing()?;
        let mut log = TrialLog::default();
        log.push(Check::expect(
            "Choi map vs fixture witness: strictly negative",
            value < 0.0 && value.abs() > 10.0 * ctx.tol,
            value,
        ));
        logs.push(log);
        notes.push(format!("fixture violation: Tr(C_choi W) = {value:.12e}"));
    }
    Ok((logs, notes))
}

/// Trial map for the decomposability suites: a decomposable sample, or at 3⊗3
/// the Choi map shifted by `c·I` plus noise.
fn decomposability_trial(d: Dims, trial: usize, rng: &mut SeededRng) -> Result<MapRep> {
    let n = d.total();
    if trial % 2 == 1 {
        let base = if d.n == 3 && d.m == 3 {
            choi_map().into_choi()
        } else {
            sample_map(ConeId::MapD, d, rng)?.into_choi().scale(n as f64)
        };
        let c: f64 = rng.gen_range(0.0..0.4);
        let h = random_hermitian(n, rng);
        let h = h.scale(0.01 / h.frobenius_norm() * (n as f64));
        return MapRep::from_choi(d, &(&base + &CMatrix::identity(n).scale(c)) + &h);
    }
    sample_map(ConeId::MapD, d, rng)
}

fn d_is_p_sharp(ctx: RunCtx, trials: usize) -> Result<Logs> {
    require_square(ctx)?;
    let d = ctx.d;
    let cfg = DykstraConfig::with_tol(ctx.tol);
    let pool = generator_pool(ConeId::MapP, d.m, POOL_SIZE, ctx.sub_seed(0))?;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let beta = decomposability_trial(d, trial, &mut rng)?;
        let scale = scale_of(beta.choi());
        let mut log = TrialLog::default();
        let dec = is_decomposable(&beta, &cfg)?;
        let mut trial_pool = pool.clone();
        trial_pool.extend(kd_generators(&witness_generators(&beta, &cfg, rng.gen())?));
        let sharp = ksharp_membership(&beta, &trial_pool, ctx.tol)?;
        if trial % 2 == 0 {
            // sampled decomposable: the direction D ⊆ P♯ must hold outright
            let plain = ksharp_membership(&beta, &pool, ctx.tol)?;
            let margin = match plain.certificate {
                Some(Certificate::SampleViolation { min_eigenvalue, .. }) => min_eigenvalue / scale,
                _ => 0.0,
            };
            log.push(Check::at_least("decomposable beta: beta o alpha* CP for alpha in P", margin, ctx.tol));
        }
        log.push(Check::agree(
            "P-sharp (sampled) vs is_decomposable",
            verdict_condition(&sharp, scale),
            verdict_condition(&dec, scale),
            ctx.tol,
        ));
        Ok(log)
    })?;
    Ok((
        logs,
        vec![format!(
            "P pool: {} generators plus one witness-derived generator per trial",
            pool.len()
        )],
    ))
}

fn horodecki(ctx: RunCtx, trials: usize) -> Result<Logs> {
    let d = ctx.d;
    let sorted = (d.n.min(d.m), d.n.max(d.m));
    if !(d.n == 1 || d.m == 1 || sorted == (2, 2) || sorted == (2, 3)) {
        return Err(Error::InvalidDims(format!(
            "suite C2 runs where PPT and separability coincide (2x2, 2x3, 3x2), got ({}, {})",
            d.n, d.m
        )));
    }
    let pool = {
        let mut p = generator_pool(ConeId::MapD, d.m, POOL_SIZE, ctx.sub_seed(0))?;
        p.truncate(2 + 8);
        p
    };
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let n = d.total();
        let c = match trial % 3 {
            0 => random_psd(n, rng.gen_range(1..=n), &mut rng),
            1 => sample_map(ConeId::MapS, d, &mut rng)?.into_choi(),
            _ => {
                let v = unit_vector(n, &mut rng);
                CMatrix::outer(&v, &v)
            }
        };
        let c = c.scale(1.0 / c.trace().re);
        let phi = MapRep::from_choi(d, c)?;
        let scale = scale_of(phi.choi());
        let lam = min_eig(&partial_transpose(phi.choi(), d)?)? / scale;

        let ppt = in_f(phi.choi(), d, ctx.tol)?;
        let density = dual_functional(&phi).density;
        let sep = is_separable(&density, d, ctx.tol, rng.gen())?;
        let mut sampled = true;
        for beta in super::generators::k_t(&pool) {
            if is_cp(&compose_left(&beta, &phi)?, ctx.tol)?.is_out() {
                sampled = false;
                break;
            }
        }
        let a = Condition {
            holds: Some(ppt.is_in()),
            margin: lam,
        };
        let b = Condition {
            holds: if sep.is_undecided() { None } else { Some(sep.is_in()) },
            margin: lam,
        };
        let s = Condition {
            holds: Some(sampled),
            margin: lam,
        };
        let mut log = TrialLog::default();
        log.push(Check::agree("C in F vs dual functional separable", a, b, ctx.tol));
        log.push(Check::agree("C in F vs alpha^t o phi CP over D generators", a, s, ctx.tol));
        Ok(log)
    })?;
    Ok((logs, Vec::new()))
}

fn witness_consistency(ctx: RunCtx, trials: usize) -> Result<Logs> {
    require_square(ctx)?;
    let d = ctx.d;
    let cfg = DykstraConfig::with_tol(ctx.tol);
    let probes = generator_pool(ConeId::MapP, d.m, 8, ctx.sub_seed(0))?;
    let logs = run_trials(trials, |trial| {
        let mut rng = ctx.rng(trial);
        let phi = decomposability_trial(d, trial, &mut rng)?;
        let scale = scale_of(phi.choi());
        let dec = is_decomposable(&phi, &cfg)?;
        let found = witness_search(phi.choi(), d, &cfg, 2, rng.gen())?;
        let mut log = TrialLog::default();
        let searched = match &found {
            Some(wf) => Condition {
                holds: Some(false),
                margin: wf.value / scale,
            },
            None => Condition {
                holds: Some(true),
                margin: 1.0,
            },
        };
        log.push(Check::agree("is_decomposable vs witness search", verdict_condition(&dec, scale), searched, ctx.tol));

        let adj = adjoint(&phi);
        let n = d.n as f64;
        if let Some(wf) = &found {
            let via = n * omega_eval(&lift(&adj, &wf.w, d.n)?, d)?;
            log.push(Check::identity("witness value = n omega((id x phi*)(w))", (via - wf.value).abs() / scale, 1e-10));
        }
        if dec.is_in() {
            let mut worst = f64::INFINITY;
            for w in &probes {
                worst = worst.min(n * omega_eval(&lift(&adj, w.choi(), d.n)?, d)?);
            }
            log.push(Check::at_least("decomposable: n omega((id x phi*)(w)) >= 0 on F", worst / scale, ctx.tol));
        }
        Ok(log)
    })?;
    Ok((logs, Vec::new()))
}

#[cfg(test)]
mod tests {
    use super::super::verify;
    use super::*;

    fn square(n: usize) -> Dims {
        Dims::square(n).unwrap()
    }

    #[test]
    fn identity_suites_pass() {
        for (id, d) in [
            (TheoremId::L4, Dims::new(2, 3).unwrap()),
            (TheoremId::L5, Dims::new(3, 2).unwrap()),
            (TheoremId::L10, square(3)),
        ] {
            let r = verify(id, d, 10, 1, 1e-9).unwrap();
            assert!(r.passed(), "{id}: {:?}", r.failures);
            assert_eq!(r.tol, 1e-12);
        }
        let r = verify(TheoremId::L8, square(3), 10, 2, 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn cone_suites_pass_small() {
        for (id, d) in [
            (TheoremId::L15, Dims::new(2, 3).unwrap()),
            (TheoremId::L16, square(2)),
            (TheoremId::L17, square(2)),
            (TheoremId::T6, square(2)),
            (TheoremId::T12, square(2)),
            (TheoremId::C2, square(2)),
        ] {
            let r = verify(id, d, 8, 3, 1e-9).unwrap();
            assert!(r.passed(), "{id}: {:?}", r.failures);
        }
    }

    #[test]
    fn square_only_suites_reject_rectangular() {
        let d = Dims::new(2, 3).unwrap();
        for id in [TheoremId::L8, TheoremId::L10, TheoremId::T12, TheoremId::T18, TheoremId::C19] {
            assert!(matches!(verify(id, d, 1, 0, 1e-9), Err(Error::InvalidDims(_))), "{id}");
        }
        assert!(matches!(verify(TheoremId::C2, square(3), 1, 0, 1e-9), Err(Error::InvalidDims(_))));
    }

    #[test]
    fn fixture_pairing_is_negative() {
        let v = fixture_pairing().unwrap();
        assert!((v + 1.0 / 7.0).abs() < 1e-12);
    }
}
