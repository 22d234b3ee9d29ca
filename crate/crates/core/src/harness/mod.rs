//! Randomized verification of the duality relations between the map cones.
//!
//! [`verify`] runs one suite, identified by [`TheoremId`], over independent
//! trials. Trial `k` draws from the ChaCha stream `k` of a seed derived from
//! the master seed and the suite tag (see [`crate::random::split_seed`]), so
//! reports are a pure function of `(id, dims, trials, seed, tol)`. Trials run
//! on the rayon pool and are aggregated in trial order.
//!
//! Each trial yields checks of three kinds:
//!
//! * identities, failing when the relative error exceeds `tol`;
//! * inequalities `v ≥ −tol`, with `−10·tol ≤ v < −tol` counted as boundary;
//! * agreements between decisions, counted as boundary when an oracle is
//!   undecided or a margin lies within `10·tol` of its threshold.
//!
//! Boundary checks are reported but are neither passes nor failures.

pub mod generators;
pub mod sampler;
mod suites;

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Dims;

pub use generators::{
    canonical_generators, generator_pool, k_t, kd_generators, ksharp_membership, theorem1_conditions,
    theorem1_trial_map, witness_generators, Condition, Theorem1Outcome, POOL_SIZE, PROBES,
};
pub use sampler::{sample_map, ConeSampler};

/// Version of the serialized [`TheoremReport`] layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Tolerance applied to the algebraic identity suites (`L*`).
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    T1,
    T6,
    T12,
    T13,
    T18,
    C2,
    C19,
    L4,
    L5,
    L8,
    L10,
    L15,
    L16,
    L17,
}

impl TheoremId {
    pub const ALL: [TheoremId; 14] = [
        TheoremId::T1,
        TheoremId::T6,
        TheoremId::T12,
        TheoremId::T13,
        TheoremId::T18,
        TheoremId::C2,
        TheoremId::C19,
        TheoremId::L4,
        TheoremId::L5,
        TheoremId::L8,
        TheoremId::L10,
        TheoremId::L15,
        TheoremId::L16,
        TheoremId::L17,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::T1 => "T1",
            TheoremId::T6 => "T6",
            TheoremId::T12 => "T12",
            TheoremId::T13 => "T13",
            TheoremId::T18 => "T18",
            TheoremId::C2 => "C2",
            TheoremId::C19 => "C19",
            TheoremId::L4 => "L4",
            TheoremId::L5 => "L5",
            TheoremId::L8 => "L8",
            TheoremId::L10 => "L10",
            TheoremId::L15 => "L15",
            TheoremId::L16 => "L16",
            TheoremId::L17 => "L17",
        }
    }

    /// Identity suites run at [`IDENTITY_TOL`] regardless of the requested tolerance.
    pub fn is_identity_suite(self) -> bool {
        matches!(
            self,
            TheoremId::L4 | TheoremId::L5 | TheoremId::L8 | TheoremId::L10
        )
    }

    fn tag(self) -> u64 {
        0x7e57_0000 + self as u64
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = TheoremId::ALL.iter().map(|id| id.name()).collect();
                Error::UnknownName(format!("unknown theorem `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// A hard failure: the check that failed and by how much.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub pair: String,
    pub violation: f64,
}

/// Count of checks whose violation falls in `(lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub label: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub schema_version: u32,
    pub theorem: TheoremId,
    pub dims: Dims,
    pub trials: usize,
    pub seed: u64,
    /// Tolerance the checks were run at.
    pub tol: f64,
    pub checks: usize,
    pub boundary: usize,
    pub failures: Vec<Failure>,
    /// Largest violation among failures; 0 when there are none.
    pub worst_violation: f64,
    pub histogram: Vec<HistogramBin>,
    pub notes: Vec<String>,
    /// Wall time; not serialized so reports stay byte-identical across runs.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(Error::UnknownName(format!(
                "unknown report format `{s}` (expected json or markdown)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Boundary,
    Fail,
}

/// One check inside a trial.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Check {
    pair: String,
    violation: f64,
    outcome: Outcome,
}

impl Check {
    /// `err ≤ tol`.
    pub(crate) fn identity(pair: impl Into<String>, err: f64, tol: f64) -> Self {
        let outcome = if err <= tol { Outcome::Pass } else { Outcome::Fail };
        Self {
            pair: pair.into(),
            violation: err.max(0.0),
            outcome,
        }
    }

    /// `value ≥ −tol`, boundary down to `−10·tol`.
    pub(crate) fn at_least(pair: impl Into<String>, value: f64, tol: f64) -> Self {
        let outcome = if value >= -tol {
            Outcome::Pass
        } else if value >= -10.0 * tol {
            Outcome::Boundary
        } else {
            Outcome::Fail
        };
        Self {
            pair: pair.into(),
            violation: (-value).max(0.0),
            outcome,
        }
    }

    /// Two decisions with margins; the violation of a disagreement is the
    /// smaller of the two margins.
    pub(crate) fn agree(pair: impl Into<String>, a: generators::Condition, b: generators::Condition, tol: f64) -> Self {
        let pair = pair.into();
        if !a.is_clear(tol) || !b.is_clear(tol) {
            return Self {
                pair,
                violation: 0.0,
                outcome: Outcome::Boundary,
            };
        }
        if a.holds == b.holds {
            Self {
                pair,
                violation: 0.0,
                outcome: Outcome::Pass,
            }
        } else {
            Self {
                pair,
                violation: a.margin.abs().min(b.margin.abs()),
                outcome: Outcome::Fail,
            }
        }
    }

    /// A fact that must hold; `violation` reports how far off it is.
    pub(crate) fn expect(pair: impl Into<String>, ok: bool, violation: f64) -> Self {
        Self {
            pair: pair.into(),
            violation: if ok { 0.0 } else { violation.abs().max(f64::MIN_POSITIVE) },
            outcome: if ok { Outcome::Pass } else { Outcome::Fail },
        }
    }

    pub(crate) fn boundary(pair: impl Into<String>) -> Self {
        Self {
            pair: pair.into(),
            violation: 0.0,
            outcome: Outcome::Boundary,
        }
    }
}

/// Checks of one trial plus free-form notes.
#[derive(Debug, Default)]
pub(crate) struct TrialLog {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl TrialLog {
    pub(crate) fn push(&mut self, c: Check) {
        self.checks.push(c);
    }
}

/// Shared inputs of a suite run.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RunCtx {
    pub id: TheoremId,
    pub d: Dims,
    pub seed: u64,
    pub tol: f64,
}

impl RunCtx {
    pub(crate) fn rng(&self, trial: usize) -> crate::random::SeededRng {
        generators::trial_rng(self.seed, self.id.tag(), trial)
    }

    /// Seed for run-level objects such as generator pools.
    pub(crate) fn sub_seed(&self, tag: u64) -> u64 {
        crate::random::split_seed(crate::random::split_seed(self.seed, self.id.tag()), tag)
    }
}

pub(crate) fn run_trials<F>(trials: usize, f: F) -> Result<Vec<TrialLog>>
where
    F: Fn(usize) -> Result<TrialLog> + Sync + Send,
{
    (0..trials).into_par_iter().map(f).collect()
}

const BIN_EDGES: [(f64, &str); 5] = [
    (1e-15, "(0, 1e-15]"),
    (1e-12, "(1e-15, 1e-12]"),
    (1e-9, "(1e-12, 1e-9]"),
    (1e-6, "(1e-9, 1e-6]"),
    (1e-3, "(1e-6, 1e-3]"),
];

fn histogram(logs: &[TrialLog]) -> Vec<HistogramBin> {
    let mut counts = vec![0usize; BIN_EDGES.len() + 2];
    for c in logs.iter().flat_map(|l| &l.checks) {
        let v = c.violation;
        let k = if v <= 0.0 {
            0
        } else {
            BIN_EDGES.iter().position(|&(edge, _)| v <= edge).map_or(BIN_EDGES.len() + 1, |p| p + 1)
        };
        counts[k] += 1;
    }
    let mut labels = vec!["0".to_string()];
    labels.extend(BIN_EDGES.iter().map(|&(_, l)| l.to_string()));
    labels.push("> 1e-3".into());
    labels
        .into_iter()
        .zip(counts)
        .map(|(label, count)| HistogramBin { label, count })
        .collect()
}

fn aggregate(ctx: RunCtx, trials: usize, logs: Vec<TrialLog>, mut notes: Vec<String>, elapsed: Duration) -> TheoremReport {
    let mut failures = Vec::new();
    let mut boundary = 0;
    let mut checks = 0;
    for (trial, log) in logs.iter().enumerate() {
        for c in &log.checks {
            checks += 1;
            match c.outcome {
                Outcome::Pass => {}
                Outcome::Boundary => boundary += 1,
                Outcome::Fail => failures.push(Failure {
                    trial,
                    pair: c.pair.clone(),
                    violation: c.violation,
                }),
            }
        }
        notes.extend(log.notes.iter().cloned());
    }
    let worst_violation = failures.iter().map(|f| f.violation).fold(0.0, f64::max);
    TheoremReport {
        schema_version: REPORT_SCHEMA_VERSION,
        theorem: ctx.id,
        dims: ctx.d,
        trials,
        seed: ctx.seed,
        tol: ctx.tol,
        checks,
        boundary,
        failures,
        worst_violation,
        histogram: histogram(&logs),
        notes,
        elapsed,
    }
}

/// Runs the suite `id` for `trials` trials at dimensions `d`.
///
/// Identity suites (`L4`, `L5`, `L8`, `L10`) check at [`IDENTITY_TOL`]; the
/// report records the tolerance actually used.
pub fn verify(id: TheoremId, d: Dims, trials: usize, seed: u64, tol: f64) -> Result<TheoremReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    let tol = if id.is_identity_suite() { IDENTITY_TOL } else { tol };
    let ctx = RunCtx { id, d, seed, tol };
    let start = Instant::now();
    let (logs, notes) = suites::run(ctx, trials)?;
    Ok(aggregate(ctx, trials, logs, notes, start.elapsed()))
}

fn fmt_num(x: f64) -> String {
    format!("{x:.6e}")
}

/// Deterministic text rendering of a report.
pub fn emit_report(r: &TheoremReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report fields are finite");
            s.push('\n');
            s
        }
        ReportFormat::Markdown => {
            let mut s = String::new();
            let verdict = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "# {verdict}: {} at {}x{}", r.theorem, r.dims.n, r.dims.m);
            let _ = writeln!(s);
            let _ = writeln!(s, "| field | value |");
            let _ = writeln!(s, "|---|---|");
            let _ = writeln!(s, "| schema | {} |", r.schema_version);
            let _ = writeln!(s, "| trials | {} |", r.trials);
            let _ = writeln!(s, "| seed | {} |", r.seed);
            let _ = writeln!(s, "| tol | {} |", fmt_num(r.tol));
            let _ = writeln!(s, "| checks | {} |", r.checks);
            let _ = writeln!(s, "| boundary | {} |", r.boundary);
            let _ = writeln!(s, "| failures | {} |", r.failures.len());
            let _ = writeln!(s, "| worst violation | {} |", fmt_num(r.worst_violation));
            let _ = writeln!(s);
            let _ = writeln!(s, "## Violation histogram");
            let _ = writeln!(s);
            let _ = writeln!(s, "| range | count |");
            let _ = writeln!(s, "|---|---|");
            for b in &r.histogram {
                let _ = writeln!(s, "| {} | {} |", b.label, b.count);
            }
            if !r.failures.is_empty() {
                let _ = writeln!(s);
                let _ = writeln!(s, "## Failures");
                let _ = writeln!(s);
                let _ = writeln!(s, "| trial | check | violation |");
                let _ = writeln!(s, "|---|---|---|");
                for f in &r.failures {
                    let _ = writeln!(s, "| {} | {} | {} |", f.trial, f.pair, fmt_num(f.violation));
                }
            }
            if !r.notes.is_empty() {
                let _ = writeln!(s);
                let _ = writeln!(s, "## Notes");
                let _ = writeln!(s);
                for n in &r.notes {
                    let _ = writeln!(s, "- {n}");
                }
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report(failures: Vec<Failure>) -> TheoremReport {
        let worst = failures.iter().map(|f| f.violation).fold(0.0, f64::max);
        TheoremReport {
            schema_version: REPORT_SCHEMA_VERSION,
            theorem: TheoremId::T13,
            dims: Dims::square(3).unwrap(),
            trials: 4,
            seed: 1,
            tol: 1e-9,
            checks: 8,
            boundary: 0,
            failures,
            worst_violation: worst,
            histogram: histogram(&[]),
            notes: vec!["note".into()],
            elapsed: Duration::from_millis(3),
        }
    }

    #[test]
    fn names_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.name().parse::<TheoremId>().unwrap(), id);
            assert_eq!(id.name().to_lowercase().parse::<TheoremId>().unwrap(), id);
        }
        assert!(matches!("T99".parse::<TheoremId>(), Err(Error::UnknownName(_))));
        assert!(matches!("xml".parse::<ReportFormat>(), Err(Error::UnknownName(_))));
    }

    #[test]
    fn pass_header_and_determinism() {
        let r = sample_report(vec![]);
        let md = emit_report(&r, ReportFormat::Markdown);
        assert!(md.starts_with("# PASS"));
        assert_eq!(md, emit_report(&r, ReportFormat::Markdown));
        let js = emit_report(&r, ReportFormat::Json);
        assert_eq!(js, emit_report(&r, ReportFormat::Json));
        assert!(!js.contains("elapsed"));
    }

    #[test]
    fn failure_round_trips_through_json() {
        let r = sample_report(vec![Failure {
            trial: 2,
            pair: "(i)-(ii)".into(),
            violation: 0.125,
        }]);
        assert!(emit_report(&r, ReportFormat::Markdown).starts_with("# FAIL"));
        let back: TheoremReport = serde_json::from_str(&emit_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(back.failures, r.failures);
        assert_eq!(back.worst_violation, 0.125);
    }

    #[test]
    fn check_classification() {
        assert_eq!(Check::at_least("x", -5e-9, 1e-9).outcome, Outcome::Boundary);
        assert_eq!(Check::at_least("x", -5e-8, 1e-9).outcome, Outcome::Fail);
        assert_eq!(Check::at_least("x", -5e-10, 1e-9).outcome, Outcome::Pass);
        assert_eq!(Check::identity("x", 2e-12, 1e-12).outcome, Outcome::Fail);
    }

    #[test]
    fn verify_rejects_bad_config() {
        let d = Dims::square(2).unwrap();
        assert!(verify(TheoremId::L4, d, 0, 1, 1e-9).is_err());
        assert!(verify(TheoremId::L4, d, 1, 1, -1.0).is_err());
    }
}
