//! Small dense complex linear algebra (orders 1 to 6).

mod cmat;
mod expm;
mod herm;
mod schur;
mod sqrt;

pub use cmat::{normalize, vdot, vec_norm, CMat, Lu};
pub use expm::matrix_exp;
pub use herm::{
    condition_number, imag_part, is_psd, min_singular_value, real_part, spectral_norm, HermMat,
    HERMITIAN_TOL,
};
pub use schur::{eigenvalues, Schur};
pub use sqrt::{
    on_branch_cut, principal_sqrt_eig, principal_sqrt_integral, principal_sqrt_schur,
    BRANCH_TOL, EIGVEC_COND_LIMIT,
};
pub(crate) use sqrt::check_branch;
