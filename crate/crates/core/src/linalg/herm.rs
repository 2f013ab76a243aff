use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::CMat;
use crate::{Error, Result};

/// Relative Hermitian tolerance accepted by [`HermMat::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A Hermitian matrix: `max |H - H^dag| <= 1e-12 max |H|` entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMat(CMat);

impl HermMat {
    pub fn new(m: CMat) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL * m.max_abs() {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self::symmetrized(&m))
    }

    /// `(M + M^dag) / 2`, Hermitian by construction.
    pub fn symmetrized(m: &CMat) -> Self {
        let n = m.dim();
        HermMat(CMat::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        }))
    }

    pub fn as_cmat(&self) -> &CMat {
        &self.0
    }

    pub fn into_cmat(self) -> CMat {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Eigenvalues in ascending order with the matching orthonormal
    /// eigenvectors stored as columns.
    pub fn eigh(&self) -> Result<(Vec<f64>, CMat)> {
        jacobi_eigh(&self.0)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.last().copied().unwrap_or(0.0))
    }
}

/// Hermitian imaginary part `(M - M^dag) / 2i`.
pub fn imag_part(m: &CMat) -> HermMat {
    let i2 = Complex64::new(0.0, 2.0);
    let raw = CMat::from_fn(m.dim(), |r, c| (m[(r, c)] - m[(c, r)].conj()) / i2);
    HermMat::symmetrized(&raw)
}

/// Hermitian real part `(M + M^dag) / 2`.
pub fn real_part(m: &CMat) -> HermMat {
    HermMat::symmetrized(m)
}

/// True iff the smallest eigenvalue of `h` is at least `-tol`.
pub fn is_psd(h: &HermMat, tol: f64) -> Result<bool> {
    Ok(h.min_eigenvalue()? >= -tol)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.dim() == 0 {
        return 0.0;
    }
    let scale = m.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    // Scaling keeps M^dag M away from overflow.
    let s = m.scale_re(1.0 / scale);
    let gram = HermMat::symmetrized(&(&s.adjoint() * &s));
    match gram.max_eigenvalue() {
        Ok(l) => l.max(0.0).sqrt() * scale,
        // Frobenius norm is a safe upper bound if Jacobi ever stalls.
        Err(_) => m.norm_fro(),
    }
}

/// Smallest singular value.
pub fn min_singular_value(m: &CMat) -> Result<f64> {
    let scale = m.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let s = m.scale_re(1.0 / scale);
    let gram = HermMat::symmetrized(&(&s.adjoint() * &s));
    Ok(gram.min_eigenvalue()?.max(0.0).sqrt() * scale)
}

/// 2-norm condition number.
pub fn condition_number(m: &CMat) -> Result<f64> {
    let smin = min_singular_value(m)?;
    if smin == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(spectral_norm(m) / smin)
}

const MAX_SWEEPS: usize = 60;

/// Cyclic complex Jacobi eigenvalue iteration for Hermitian input.
fn jacobi_eigh(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = h.dim();
    let mut a = HermMat::symmetrized(h).into_cmat();
    let mut v = CMat::identity(n);
    let total = a.norm_fro();
    if total == 0.0 {
        return Ok((alloc::vec![0.0; n], v));
    }

    let off = |a: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > 1e-15 * total {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Convergence {
                what: "Hermitian Jacobi eigensolver",
                iterations: sweeps,
                residual: off(&a) / total,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase rotation makes the (p, q) entry real, then a real
                // Jacobi rotation annihilates it.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U acting on (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let pc = phase.conj();
                let u00 = Complex64::new(c, 0.0);
                let u01 = Complex64::new(s, 0.0);
                let u10 = -pc * s;
                let u11 = pc * c;
                // A <- A U
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u00 + akq * u10;
                    a[(k, q)] = akp * u01 + akq * u11;
                }
                // A <- U^dag A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
                    a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u00 + vkq * u10;
                    v[(k, q)] = vkp * u01 + vkq * u11;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = CMat::from_fn(n, |r, c| v[(r, order[c])]);
    Ok((vals, vecs))
}
