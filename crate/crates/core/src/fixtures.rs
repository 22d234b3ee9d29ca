//! Shipped instances: the Choi map on `M_3` (positive, not decomposable) and a
//! PPT entangled state that exposes it.
//!
//! Choi map: `Φ(X) = D(X) − X` with `D(X) = diag(2x₁₁ + x₃₃, x₁₁ + 2x₂₂, x₂₂ + 2x₃₃)`.
//!
//! Witness state (`ψ = Σ_i |ii⟩`, basis `|ij⟩` at composite index `3i + j`):
//! `W = (2|ψ⟩⟨ψ| + Σ_{k∈{1,5,6}} |k⟩⟨k| + 4 Σ_{k∈{2,3,7}} |k⟩⟨k|) / 21`.
//! `W ⪰ 0`; its partial transpose splits into the `3 x 3` block `(2/21)·I` on
//! `{0, 4, 8}` and three `2 x 2` blocks `[[1, 2], [2, 4]]/21`, all PSD, so
//! `W ∈ F`. `Tr(C_Φ W) = (−3·2 + 3·1)/21 = −1/7`.
//!
//! Independent check recipe: run the decomposability feasibility on `C_Φ` at
//! `tol = 1e-11` from five seeds; all must report OUT.

use crate::choi::MapRep;
use crate::linalg::CMatrix;
use crate::mapfile::MapFile;

pub const CHOI_MAP_JSON: &str = include_str!("../fixtures/choi_map.json");
pub const CHOI_MAP_WITNESS_JSON: &str = include_str!("../fixtures/choi_map_witness.json");

/// `Tr(C_Φ W)` for the shipped pair.
pub const CHOI_MAP_WITNESS_VALUE: f64 = -1.0 / 7.0;

pub fn choi_map() -> MapRep<f64> {
    MapFile::parse(CHOI_MAP_JSON)
        .expect("shipped fixture parses")
        .to_map()
}

pub fn choi_map_witness() -> CMatrix<f64> {
    MapFile::parse(CHOI_MAP_WITNESS_JSON)
        .expect("shipped fixture parses")
        .choi
}
