//! Membership oracles for cones of maps and of composite operators.
//!
//! Map cones act on [`MapRep`](crate::MapRep) through the Choi matrix; operator
//! cones act on a [`CMatrix`] with [`Dims`]. Every oracle answers with a
//! [`Verdict`]; OUT always carries a certificate that can be re-checked
//! independently of the oracle that produced it.

mod blockpos;
mod dykstra;
mod nnls;
mod oracles;
mod separable;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Dims};
use crate::scalar::Real;

pub use blockpos::{is_block_positive, is_positive_map};
pub use dykstra::{
    dykstra_feasibility, in_e, is_decomposable, project_f, witness_search, DykstraOutcome,
    WitnessFound,
};
pub use oracles::{in_f, in_p, is_cop, is_cp, is_ppt_state, pm_k_membership};
pub use separable::{in_s, is_separable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    In,
    Out,
    Undecided,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::In => "IN",
            Status::Out => "OUT",
            Status::Undecided => "UNDECIDED",
        })
    }
}

/// The operator whose spectrum a [`Certificate::MinEigen`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spectrum {
    /// `x` itself (or `C_φ`).
    Direct,
    /// `(ι ⊗ t)(x)` (or `C_{t∘φ}` up to the block transpose).
    PartialTranspose,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T: Real = f64> {
    /// Minimal eigenvalue and its eigenvector.
    MinEigen {
        spectrum: Spectrum,
        min_eigenvalue: T,
        vector: Vec<Complex<T>>,
    },
    /// Minimal eigenvalues of `x` and `(ι ⊗ t)(x)`.
    PptSpectra { min_eigenvalue: T, pt_min_eigenvalue: T },
    /// `x ≈ A + (ι ⊗ t)(B)` with `A, B ⪰ 0`.
    Decomposition { a: CMatrix<T>, b: CMatrix<T>, residual: T },
    /// `w ∈ F`, `Tr w = 1`, `Tr(w x) = value < 0`.
    Witness { w: CMatrix<T>, value: T },
    /// `⟨ξ⊗η| x |ξ⊗η⟩ = value < 0`.
    ProductVectors {
        xi: Vec<Complex<T>>,
        eta: Vec<Complex<T>>,
        value: T,
    },
    /// `ρ ≈ Σ_k p_k |ξ_k⊗η_k⟩⟨ξ_k⊗η_k|`.
    SeparableDecomposition {
        weights: Vec<T>,
        terms: Vec<(Vec<Complex<T>>, Vec<Complex<T>>)>,
        residual: T,
    },
    /// A block-positive operator `w` with `Tr(w ρ) = value < 0`.
    EntanglementWitness { w: CMatrix<T>, value: T },
    /// `(ι ⊗ α_index)(x)` has a negative eigenvalue.
    SampleViolation {
        index: usize,
        min_eigenvalue: T,
        vector: Vec<Complex<T>>,
    },
    /// Record of an unsuccessful search for a violation.
    Search { restarts: usize, best_value: T },
}

impl<T: Real> Certificate<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::MinEigen { .. } => "min-eigen",
            Certificate::PptSpectra { .. } => "ppt-spectra",
            Certificate::Decomposition { .. } => "decomposition",
            Certificate::Witness { .. } => "witness",
            Certificate::ProductVectors { .. } => "product-vectors",
            Certificate::SeparableDecomposition { .. } => "separable-decomposition",
            Certificate::EntanglementWitness { .. } => "entanglement-witness",
            Certificate::SampleViolation { .. } => "sample-violation",
            Certificate::Search { .. } => "search",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T: Real = f64> {
    pub status: Status,
    pub certificate: Option<Certificate<T>>,
    /// IN established by a finite search or sample set rather than a proof.
    pub heuristic: bool,
}

impl<T: Real> Verdict<T> {
    pub fn inside(certificate: Option<Certificate<T>>) -> Self {
        Self {
            status: Status::In,
            certificate,
            heuristic: false,
        }
    }

    pub fn heuristic_inside(certificate: Option<Certificate<T>>) -> Self {
        Self {
            status: Status::In,
            certificate,
            heuristic: true,
        }
    }

    pub fn outside(certificate: Certificate<T>) -> Self {
        Self {
            status: Status::Out,
            certificate: Some(certificate),
            heuristic: false,
        }
    }

    pub fn undecided(certificate: Option<Certificate<T>>) -> Self {
        Self {
            status: Status::Undecided,
            certificate,
            heuristic: false,
        }
    }

    #[inline]
    pub fn is_in(&self) -> bool {
        self.status == Status::In
    }

    #[inline]
    pub fn is_out(&self) -> bool {
        self.status == Status::Out
    }

    #[inline]
    pub fn is_undecided(&self) -> bool {
        self.status == Status::Undecided
    }
}

/// Named cones. `Map*` apply to maps, `Op*` to composite operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConeId {
    MapCp,
    MapCop,
    MapP,
    MapD,
    MapS,
    MapPos,
    OpPsd,
    OpF,
    OpE,
    OpSep,
    OpBlockPos,
}

impl ConeId {
    pub const ALL: [ConeId; 11] = [
        ConeId::MapCp,
        ConeId::MapCop,
        ConeId::MapP,
        ConeId::MapD,
        ConeId::MapS,
        ConeId::MapPos,
        ConeId::OpPsd,
        ConeId::OpF,
        ConeId::OpE,
        ConeId::OpSep,
        ConeId::OpBlockPos,
    ];

    pub fn is_map_cone(self) -> bool {
        matches!(
            self,
            ConeId::MapCp | ConeId::MapCop | ConeId::MapP | ConeId::MapD | ConeId::MapS | ConeId::MapPos
        )
    }

    /// Short command-line name.
    pub fn name(self) -> &'static str {
        match self {
            ConeId::MapCp => "cp",
            ConeId::MapCop => "cop",
            ConeId::MapP => "p",
            ConeId::MapD => "d",
            ConeId::MapS => "s",
            ConeId::MapPos => "pos",
            ConeId::OpPsd => "psd",
            ConeId::OpF => "f",
            ConeId::OpE => "e",
            ConeId::OpSep => "sep",
            ConeId::OpBlockPos => "blockpos",
        }
    }
}

impl FromStr for ConeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ConeId::ALL
            .into_iter()
            .find(|c| c.name() == lower)
            .ok_or_else(|| Error::UnknownName(format!("cone `{s}`")))
    }
}

impl fmt::Display for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stopping policy for the alternating-projection engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DykstraConfig {
    /// Relative residual target.
    pub tol: f64,
    pub max_iters: usize,
    /// Iterations without residual improvement before giving up.
    pub stall_window: usize,
}

impl Default for DykstraConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 20_000,
            stall_window: 500,
        }
    }
}

impl DykstraConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// `tol·(1 + ‖x‖_F)`, the threshold used by every relative test.
pub(crate) fn rel_threshold<T: Real>(x: &CMatrix<T>, tol: f64) -> T {
    T::c(tol) * (T::one() + x.frobenius_norm())
}

pub(crate) fn check_operator<T: Real>(x: &CMatrix<T>, d: Dims) -> Result<()> {
    d.check(x)?;
    x.ensure_hermitian(crate::linalg::DEFAULT_TOL)
}
