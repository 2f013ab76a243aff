use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::{normalize, CMat};
use crate::{Error, Result};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

/// Complex Schur form `M = Q T Q^dag` with `Q` unitary and `T` upper
/// triangular.
#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMat,
    pub t: CMat,
}

impl Schur {
    pub fn new(m: &CMat) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let (mut h, mut q) = hessenberg(m);
        qr_iterate(&mut h, &mut q)?;
        Ok(Schur { q, t: h })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal()
    }

    /// Eigenvectors of `T` by back substitution (columns, unit norm).
    ///
    /// Nearly equal eigenvalues get a perturbed divisor, so for defective
    /// input the returned vectors are close to parallel; callers detect that
    /// through the condition number.
    pub fn triangular_eigenvectors(&self) -> CMat {
        let t = &self.t;
        let n = t.dim();
        let small = f64::EPSILON * t.max_abs().max(f64::MIN_POSITIVE);
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut x = alloc::vec![Complex64::new(0.0, 0.0); n];
            x[k] = Complex64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let s: Complex64 = (j + 1..=k).map(|l| t[(j, l)] * x[l]).sum();
                let mut d = t[(j, j)] - t[(k, k)];
                if d.norm() < small {
                    d = Complex64::new(small, 0.0);
                }
                x[j] = -s / d;
            }
            normalize(&mut x);
            cols.push(x);
        }
        CMat::from_columns(&cols)
    }

    /// Eigenvectors of the original matrix (columns, unit norm).
    pub fn eigenvectors(&self) -> CMat {
        let v = &self.q * &self.triangular_eigenvectors();
        let cols: Vec<Vec<Complex64>> = (0..v.dim())
            .map(|j| {
                let mut c = v.column(j);
                normalize(&mut c);
                c
            })
            .collect();
        CMat::from_columns(&cols)
    }
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    Ok(Schur::new(m)?.eigenvalues())
}

/// Householder reduction to upper Hessenberg form.
fn hessenberg(m: &CMat) -> (CMat, CMat) {
    let n = m.dim();
    let mut h = m.clone();
    let mut q = CMat::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = super::vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = super::vec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H <- P H P with P = I - 2 v v^dag acting on indices k+1..n
        for j in 0..n {
            let s: Complex64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * s * 2.0;
            }
        }
        for i in 0..n {
            let s: Complex64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
        }
        for i in 0..n {
            let s: Complex64 = (0..v.len()).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                q[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Rotation `W` with `W [a; b] = [r; 0]`, returned as `(u1, u2)` where
/// `W = [[conj u1, conj u2], [-u2, u1]]`.
fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    (a / r, b / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix, accumulating into `q`.
fn qr_iterate(h: &mut CMat, q: &mut CMat) -> Result<()> {
    let n = h.dim();
    if n == 0 {
        return Ok(());
    }
    let norm = h.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // locate the active unreduced block [lo, hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= eps * diag || sub <= eps * eps * norm {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(Error::Convergence {
                what: "complex Schur QR iteration",
                iterations: total,
                residual: h[(hi, hi - 1)].norm() / norm,
            });
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift breaks rare cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.4 * norm * eps.sqrt())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (u1, u2) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in lo..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = u1.conj() * x + u2.conj() * y;
                h[(k + 1, j)] = -u2 * x + u1 * y;
            }
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rots.push((k, u1, u2));
        }
        for &(k, u1, u2) in &rots {
            for i in 0..=hi {
                let p = h[(i, k)];
                let r = h[(i, k + 1)];
                h[(i, k)] = p * u1 + r * u2;
                h[(i, k + 1)] = -p * u2.conj() + r * u1.conj();
            }
            for i in 0..n {
                let p = q[(i, k)];
                let r = q[(i, k + 1)];
                q[(i, k)] = p * u1 + r * u2;
                q[(i, k + 1)] = -p * u2.conj() + r * u1.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_cmat, rng};

    #[test]
    fn schur_reconstructs_random_matrices() {
        let mut r = rng(1);
        for n in [1, 2, 3, 4, 6] {
            for _ in 0..40 {
                let m = random_cmat(&mut r, n);
                let s = Schur::new(&m).unwrap();
                let rec = &(&s.q * &s.t) * &s.q.adjoint();
                assert!((&rec - &m).max_abs() < 1e-12 * m.max_abs().max(1.0));
                let qq = &s.q.adjoint() * &s.q;
                assert!((&qq - &CMat::identity(n)).max_abs() < 1e-13);
                for i in 1..n {
                    for j in 0..i {
                        assert_eq!(s.t[(i, j)], Complex64::new(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn eigenvectors_satisfy_eigen_equation() {
        let mut r = rng(2);
        for _ in 0..50 {
            let m = random_cmat(&mut r, 3);
            let s = Schur::new(&m).unwrap();
            let v = s.eigenvectors();
            for (k, lam) in s.eigenvalues().into_iter().enumerate() {
                let x = v.column(k);
                let mx = m.mul_vec(&x);
                let res: f64 = mx
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - lam * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-12 * m.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn rotation_generator_eigenvalues() {
        let m = CMat::from_real(2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn jordan_block_converges() {
        let m = CMat::from_real(3, &[2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0]).unwrap();
        let ev = eigenvalues(&m).unwrap();
        for e in ev {
            assert!((e - 2.0).norm() < 1e-12);
        }
    }
}
