use alloc::vec::Vec;

use num_complex::Complex64;

use super::{condition_number, CMat, Schur};
use crate::quad::{integrate, QuadratureSpec};
use crate::{Error, Result};

/// Eigenvector condition number above which the diagonalization route
/// hands over to the triangular Schur recurrence.
pub const EIGVEC_COND_LIMIT: f64 = 1e8;

/// Half-width of the band around `]-inf, 0]` treated as the branch cut.
pub const BRANCH_TOL: f64 = 1e-12;

/// Whether `lambda` counts as lying on `]-inf, 0]`.
pub fn on_branch_cut(lambda: Complex64) -> bool {
    lambda.im.abs() <= BRANCH_TOL * (1.0 + lambda.norm()) && lambda.re <= BRANCH_TOL
}

pub(crate) fn check_branch(eigs: &[Complex64]) -> Result<()> {
    match eigs.iter().find(|&&l| on_branch_cut(l)) {
        Some(&eigenvalue) => Err(Error::BranchCut { eigenvalue }),
        None => Ok(()),
    }
}

/// Principal square root through the eigendecomposition `B = V D V^{-1}`.
///
/// When the eigenvector basis is ill-conditioned (condition number above
/// [`EIGVEC_COND_LIMIT`]) the square root of the triangular Schur factor is
/// computed by the substitution recurrence instead.
pub fn principal_sqrt_eig(b: &CMat) -> Result<CMat> {
    let schur = Schur::new(b)?;
    let eigs = schur.eigenvalues();
    check_branch(&eigs)?;
    let v = schur.eigenvectors();
    let cond = condition_number(&v).unwrap_or(f64::INFINITY);
    if cond > EIGVEC_COND_LIMIT {
        return Ok(sqrt_from_schur(&schur));
    }
    let roots: Vec<Complex64> = eigs.iter().map(|l| l.sqrt()).collect();
    let vd = &v * &CMat::from_diag(&roots);
    // Y = V D^{1/2} V^{-1}  <=>  Y V = V D^{1/2}
    let y = v.transpose().solve(&vd.transpose())?.transpose();
    Ok(y)
}

/// Principal square root by the Schur method (Bjorck-Hammarling recurrence).
pub fn principal_sqrt_schur(b: &CMat) -> Result<CMat> {
    let schur = Schur::new(b)?;
    check_branch(&schur.eigenvalues())?;
    Ok(sqrt_from_schur(&schur))
}

fn sqrt_from_schur(schur: &Schur) -> CMat {
    let t = &schur.t;
    let n = t.dim();
    let mut u = CMat::zeros(n);
    for i in 0..n {
        u[(i, i)] = t[(i, i)].sqrt();
    }
    for d in 1..n {
        for i in 0..n - d {
            let j = i + d;
            let s: Complex64 = (i + 1..j).map(|k| u[(i, k)] * u[(k, j)]).sum();
            u[(i, j)] = (t[(i, j)] - s) / (u[(i, i)] + u[(j, j)]);
        }
    }
    &(&schur.q * &u) * &schur.q.adjoint()
}

/// Principal square root from the Stieltjes-type integral
///
/// `B^{1/2} = (1/pi) int_0^inf B (sI + B)^{-1} s^{-1/2} ds`.
///
/// With `s = u^2 / (1-u)^2` the integrand becomes the smooth
/// `(2/pi) B (u^2 I + (1-u)^2 B)^{-1}` on `u in [0, 1]`.
pub fn principal_sqrt_integral(b: &CMat, quad: &QuadratureSpec) -> Result<CMat> {
    check_branch(&super::eigenvalues(b)?)?;
    let n = b.dim();
    let id = CMat::identity(n);
    let r = integrate(
        |u| {
            let w = 1.0 - u;
            let m = &id.scale_re(u * u) + &b.scale_re(w * w);
            // B m^{-1} = (m^T \ B^T)^T
            Ok(m.transpose().solve(&b.transpose())?.transpose())
        },
        0.0,
        1.0,
        quad,
    )?;
    Ok(r.value.scale_re(2.0 / core::f64::consts::PI))
}
