//! Dense complex linear algebra on `M_n ⊗ M_m`.

mod eigen;
mod matrix;
mod tensor;

pub use eigen::{eig_hermitian, is_psd, project_psd, HermSpectrum, DEFAULT_TOL};
#[allow(unused_imports)]
pub(crate) use eigen::eig_unchecked;
pub use matrix::CMatrix;
pub use tensor::{
    both_transpose, conj_transpose, full_transpose, hs_inner, partial_trace, partial_transpose,
    tensor, tensor_vec, trace_pairing, Dims, Factor,
};
