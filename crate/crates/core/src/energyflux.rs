//! Inhomogeneous plane waves and their time-averaged energy flux.
//!
//! Fields are `u(x, t) = Re[a exp(i k.x - i w t)]` with complex wavevector
//! `k = k_R + i k_I`; `k_I` is the attenuation vector. The flux density is
//! `Psi_l = -sigma_kl du_k/dt` and its period average at `x` is
//!
//! ```text
//! <Psi_l> = (w^2 / 2) exp(-2 k_I.x) Im[conj(a_k) G~_klmn(-i w) a_m k_n]
//!         = (w / 2)   exp(-2 k_I.x) Re[conj(a_k) Q_klmn(-i w) a_m k_n]
//! ```
//!
//! where `G~(p) = Q(p)/p` is the Laplace transform of the relaxation
//! modulus.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::linalg::{eigenvalues, vec_norm, CMat, HermMat};
use crate::medium::{voigt, voigt_pair, RelaxationModel};
use crate::planewave::{fix_phase, PlaneWaveMode};
use crate::{Error, Result};

/// Residual gate for accepted waves, relative to `rho w^2`.
pub const RESIDUAL_GATE: f64 = 1e-8;

/// A plane wave `a exp(i (k_R + i k_I).x - i w t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InhomogeneousWave {
    pub omega: f64,
    pub k_r: [f64; 3],
    pub k_i: [f64; 3],
    /// Unit amplitude, `a^dag a = 1`.
    pub amplitude: [Complex64; 3],
    /// Christoffel residual of `(k, a)`.
    pub residual: f64,
}

impl InhomogeneousWave {
    pub fn k(&self) -> [Complex64; 3] {
        [0, 1, 2].map(|i| Complex64::new(self.k_r[i], self.k_i[i]))
    }

    /// Whether the residual is within [`RESIDUAL_GATE`]` * rho w^2`.
    pub fn accepted(&self, model: &RelaxationModel) -> bool {
        self.residual <= RESIDUAL_GATE * model.rho() * self.omega * self.omega
    }
}

/// `|| Q_ijrs(-i w) k_j k_s a_r - rho w^2 a_i ||` for unit `a`.
pub fn christoffel_residual(
    model: &RelaxationModel,
    omega: f64,
    k: &[Complex64; 3],
    a: &[Complex64; 3],
) -> Result<f64> {
    let na = vec_norm(a);
    if na == 0.0 {
        return Err(Error::invalid("amplitude must be nonzero"));
    }
    let gamma = christoffel(model, omega, k)?;
    let ga = gamma.mul_vec(a);
    let rw2 = model.rho() * omega * omega;
    let r: Vec<Complex64> = ga.iter().zip(a).map(|(g, x)| g - x * rw2).collect();
    Ok(vec_norm(&r) / na)
}

fn christoffel(model: &RelaxationModel, omega: f64, k: &[Complex64; 3]) -> Result<CMat> {
    Ok(model.q_of_p(Complex64::new(0.0, -omega))?.contract(k))
}

/// The collinear wave `k = i kappa n` of a mode: `k_R = (w/c) n`,
/// `k_I = a n`.
pub fn collinear_wave(
    model: &RelaxationModel,
    n: &[f64; 3],
    omega: f64,
    mode: &PlaneWaveMode,
) -> Result<InhomogeneousWave> {
    let ik = Complex64::new(0.0, 1.0) * mode.kappa;
    let k_r = n.map(|x| ik.re * x);
    let k_i = n.map(|x| ik.im * x);
    let mut a = mode.polarization;
    let na = vec_norm(&a);
    for x in a.iter_mut() {
        *x /= na;
    }
    let k = [0, 1, 2].map(|i| Complex64::new(k_r[i], k_i[i]));
    let residual = christoffel_residual(model, omega, &k, &a)?;
    Ok(InhomogeneousWave {
        omega,
        k_r,
        k_i,
        amplitude: a,
        residual,
    })
}

const NEWTON_MAX_ITER: usize = 100;

/// Damped Newton on a complex defect of two real unknowns; returns the last
/// iterate with the error when the line search stalls.
fn newton2(
    mut defect: impl FnMut((f64, f64)) -> Result<Complex64>,
    seed: (f64, f64),
) -> core::result::Result<((f64, f64), usize), ((f64, f64), Error)> {
    let mut x = seed;
    let mut f = defect(x).map_err(|e| (x, e))?;
    let mut iter = 0;
    while f.norm() > 1e-14 {
        if iter == NEWTON_MAX_ITER {
            let e = Error::Convergence {
                what: "inhomogeneous wave Newton solve",
                iterations: iter,
                residual: f.norm(),
            };
            return Err((x, e));
        }
        iter += 1;
        let h = 1e-7 * (x.0.abs() + x.1.abs()).max(1e-300);
        let fa = defect((x.0 + h, x.1)).map_err(|e| (x, e))?;
        let fb = defect((x.0, x.1 + h)).map_err(|e| (x, e))?;
        let (j00, j10) = ((fa.re - f.re) / h, (fa.im - f.im) / h);
        let (j01, j11) = ((fb.re - f.re) / h, (fb.im - f.im) / h);
        let det = j00 * j11 - j01 * j10;
        if det == 0.0 || !det.is_finite() {
            let e = Error::Convergence {
                what: "inhomogeneous wave Newton solve (singular Jacobian)",
                iterations: iter,
                residual: f.norm(),
            };
            return Err((x, e));
        }
        let dx = -(j11 * f.re - j01 * f.im) / det;
        let dy = -(-j10 * f.re + j00 * f.im) / det;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = (x.0 + t * dx, x.1 + t * dy);
            let ft = defect(trial).map_err(|e| (x, e))?;
            if ft.norm() < f.norm() {
                x = trial;
                f = ft;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // no descent left: accept only if already at rounding level
            if f.norm() <= 1e-11 {
                break;
            }
            let e = Error::Convergence {
                what: "inhomogeneous wave Newton solve (line search)",
                iterations: iter,
                residual: f.norm(),
            };
            return Err((x, e));
        }
    }
    Ok((x, iter))
}

fn det3(m: &CMat) -> Complex64 {
    m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
}

/// Solves for real `(alpha, beta)` such that `k = alpha n + i beta m`
/// carries a plane wave, starting from `seed`.
///
/// The unknowns are first driven by the Christoffel eigenvalue nearest to
/// `rho w^2`, so that double roots (isotropic shear) keep Newton's quadratic
/// convergence. If that stalls, typically where two eigenvalues swap
/// places, the iteration continues on `det(Gamma - rho w^2) / (rho w^2)^3`,
/// which is smooth. Steps are halved until the defect decreases; the
/// Jacobian is a forward finite difference.
pub fn inhomogeneous_solve(
    model: &RelaxationModel,
    omega: f64,
    n: &[f64; 3],
    m: &[f64; 3],
    seed: (f64, f64),
) -> Result<InhomogeneousWave> {
    crate::medium::check_unit(n)?;
    crate::medium::check_unit(m)?;
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("frequency must be positive"));
    }
    let rw2 = model.rho() * omega * omega;
    let q = model.q_of_p(Complex64::new(0.0, -omega))?;
    let gamma = |x: (f64, f64)| {
        let k = [0, 1, 2].map(|i| Complex64::new(x.0 * n[i], x.1 * m[i]));
        &q.contract(&k) - &CMat::identity(3).scale_re(rw2)
    };
    let nearest = |x: (f64, f64)| -> Result<Complex64> {
        let ev = eigenvalues(&gamma(x))?;
        let best = ev
            .into_iter()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("three eigenvalues");
        Ok(best / rw2)
    };
    let det = |x: (f64, f64)| -> Result<Complex64> { Ok(det3(&gamma(x)) / (rw2 * rw2 * rw2)) };

    let (x, iter) = match newton2(nearest, seed) {
        Ok(r) => r,
        Err((last, _)) => newton2(det, last).map_err(|(_, e)| e)?,
    };
    if x.1 < -1e-12 * x.0.abs().max(1.0) {
        return Err(Error::Convergence {
            what: "inhomogeneous wave Newton solve (root grows along m)",
            iterations: iter,
            residual: x.1,
        });
    }
    let k = [0, 1, 2].map(|i| Complex64::new(x.0 * n[i], x.1 * m[i]));
    let shifted = &q.contract(&k) - &CMat::identity(3).scale_re(rw2);
    let (_, vecs) = HermMat::symmetrized(&(&shifted.adjoint() * &shifted)).eigh()?;
    let mut a = [vecs[(0, 0)], vecs[(1, 0)], vecs[(2, 0)]];
    fix_phase(&mut a);
    let residual = christoffel_residual(model, omega, &k, &a)?;
    Ok(InhomogeneousWave {
        omega,
        k_r: n.map(|v| x.0 * v),
        k_i: m.map(|v| x.1 * v),
        amplitude: a,
        residual,
    })
}

/// `cos(theta) n + sin(theta) t` for unit `n` and a unit `t` orthogonal to it.
pub fn tilt(n: &[f64; 3], t: &[f64; 3], theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    let v = [0, 1, 2].map(|i| c * n[i] + s * t[i]);
    crate::medium::unit(v)
}

/// Continues the collinear solution of `mode` to an attenuation vector
/// tilted by `theta` (radians) from `n` towards `t`, in `steps` increments.
/// A failed increment is retried with half the angle step, down to
/// `theta / (64 steps)`.
pub fn solve_tilted(
    model: &RelaxationModel,
    omega: f64,
    n: &[f64; 3],
    t: &[f64; 3],
    mode: &PlaneWaveMode,
    theta: f64,
    steps: usize,
) -> Result<InhomogeneousWave> {
    let mut seed = (omega * mode.inv_speed, mode.attenuation);
    let full = theta / steps.max(1) as f64;
    let min_step = full / 64.0;
    let mut step = full;
    let mut at = 0.0;
    let mut wave = None;
    while at < theta {
        let th = (at + step).min(theta);
        let m = tilt(n, t, th);
        match inhomogeneous_solve(model, omega, n, &m, seed) {
            Ok(w) => {
                let alpha = w.k_r.iter().zip(n).map(|(a, b)| a * b).sum::<f64>();
                let beta = w.k_i.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>();
                seed = (alpha, beta);
                at = th;
                wave = Some(w);
                step = (2.0 * step).min(full);
            }
            Err(e) if step <= min_step => return Err(e),
            Err(_) => step *= 0.5,
        }
    }
    match wave {
        Some(w) => Ok(w),
        None => inhomogeneous_solve(model, omega, n, n, seed),
    }
}

/// Some unit vector orthogonal to `n`.
pub fn orthogonal_to(n: &[f64; 3]) -> [f64; 3] {
    let e = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d: f64 = (0..3).map(|i| e[i] * n[i]).sum();
    crate::medium::unit([0, 1, 2].map(|i| e[i] - d * n[i]))
}

/// Time-averaged flux at `x = 0` and its relation to `k_I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxResult {
    pub mean_flux: [f64; 3],
    /// `<Psi> . k_I`.
    pub dot_ki: f64,
    /// Angle between `<Psi>` and `k_I` in degrees (90 when either vanishes).
    pub angle_deg: f64,
    /// The flux from `G~(-i w)` (`w^2/2 Im[...]`).
    pub flux_relaxation_form: [f64; 3],
    /// The flux from `Q(-i w)` (`w/2 Re[...]`).
    pub flux_modulus_form: [f64; 3],
}

impl FluxResult {
    /// `exp(-2 k_I.x) <Psi>(0)`.
    pub fn flux_at(&self, wave: &InhomogeneousWave, x: &[f64; 3]) -> [f64; 3] {
        let d: f64 = (0..3).map(|i| wave.k_i[i] * x[i]).sum();
        let f = (-2.0 * d).exp();
        self.mean_flux.map(|v| f * v)
    }
}

/// `v_l = conj(a_k) T_klmn a_m k_n` for a complex tensor in Voigt storage.
fn flux_contraction(t: &[[Complex64; 6]; 6], a: &[Complex64; 3], k: &[Complex64; 3]) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (l, o) in out.iter_mut().enumerate() {
        for kk in 0..3 {
            for mm in 0..3 {
                for nn in 0..3 {
                    *o += a[kk].conj() * t[voigt(kk, l)][voigt(mm, nn)] * a[mm] * k[nn];
                }
            }
        }
    }
    out
}

/// Time-averaged energy flux of `wave`, computed both from the transformed
/// relaxation modulus `G~(p) = G_inf/p + sum_k G_k/(p + r_k)` and from
/// `Q(p) = p G~(p)`.
pub fn mean_flux(model: &RelaxationModel, wave: &InhomogeneousWave) -> Result<FluxResult> {
    let w = wave.omega;
    let p = Complex64::new(0.0, -w);
    let a = &wave.amplitude;
    let k = wave.k();

    let mut gt = [[Complex64::new(0.0, 0.0); 6]; 6];
    for (x, g) in gt.iter_mut().flatten().zip(model.g_inf().voigt().iter().flatten()) {
        *x = *g / p;
    }
    for term in model.terms() {
        let f = (p + term.rate).inv();
        for (x, g) in gt.iter_mut().flatten().zip(term.modulus.voigt().iter().flatten()) {
            *x += f * g;
        }
    }
    let v3 = flux_contraction(&gt, a, &k);
    let flux3 = v3.map(|v| 0.5 * w * w * v.im);

    let q = model.q_of_p(p)?;
    let v4 = flux_contraction(q.voigt(), a, &k);
    let flux4 = v4.map(|v| 0.5 * w * v.re);

    let dot: f64 = (0..3).map(|i| flux3[i] * wave.k_i[i]).sum();
    let nf = flux3.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nk = wave.k_i.iter().map(|x| x * x).sum::<f64>().sqrt();
    let angle_deg = if nf > 0.0 && nk > 0.0 {
        (dot / (nf * nk)).clamp(-1.0, 1.0).acos() * 180.0 / PI
    } else {
        90.0
    };
    Ok(FluxResult {
        mean_flux: flux3,
        dot_ki: dot,
        angle_deg,
        flux_relaxation_form: flux3,
        flux_modulus_form: flux4,
    })
}

/// Default truncation horizon `40 / min r_k` (zero for elastic media).
pub fn default_t_max(model: &RelaxationModel) -> f64 {
    model.min_rate().map_or(0.0, |r| 40.0 / r)
}

/// Independent time-domain estimate of the mean flux at `x = 0`.
///
/// The stress is `sigma(t) = G_inf grad u(t) + int_0^{t_max} (G(s) - G_inf)
/// grad du/dt(t - s) ds` with `G(s)` from [`RelaxationModel::relaxation_at`]
/// and the trapezoidal rule of step `h = T / n_samples`, `T = 2 pi / w`.
/// The product `-sigma_kl du_k/dt` is then averaged over `n_periods`
/// periods on the same grid.
pub fn flux_time_oracle(
    model: &RelaxationModel,
    wave: &InhomogeneousWave,
    n_periods: usize,
    n_samples: usize,
    t_max: f64,
) -> Result<[f64; 3]> {
    let w = wave.omega;
    let period = 2.0 * PI / w;
    let h = period / n_samples as f64;
    let trap_err = (w * h).powi(2) / 12.0;
    if n_samples < 8 || n_periods == 0 || trap_err > 1e-2 {
        return Err(Error::Accuracy {
            estimate: trap_err,
            requested: 1e-2,
        });
    }
    if let Some(r) = model.min_rate() {
        let tail = (-r * t_max).exp();
        if !(tail <= 1e-8) {
            return Err(Error::Accuracy {
                estimate: tail,
                requested: 1e-8,
            });
        }
    }
    let a = wave.amplitude;
    let k = wave.k();
    let i = Complex64::new(0.0, 1.0);

    // sum_i w_i (G(s_i) - G_inf) exp(i w s_i): the rate history is harmonic,
    // so the convolution at every t reduces to this one sum.
    let steps = if model.is_elastic() {
        0
    } else {
        (t_max / h).ceil() as usize
    };
    let g_inf = model.g_inf().voigt();
    let mut kw = [[Complex64::new(0.0, 0.0); 6]; 6];
    for step in 0..=steps {
        if steps == 0 {
            break;
        }
        let s = step as f64 * h;
        let wt = if step == 0 || step == steps { 0.5 * h } else { h };
        let g = model.relaxation_at(s);
        let ph = (i * w * s).exp() * wt;
        for (x, (gs, gi)) in kw
            .iter_mut()
            .flatten()
            .zip(g.voigt().iter().flatten().zip(g_inf.iter().flatten()))
        {
            *x += ph * (gs - gi);
        }
    }

    // engineering strain in Voigt order from a displacement gradient
    let eng = |grad: &[[Complex64; 3]; 3]| -> [Complex64; 6] {
        [0, 1, 2, 3, 4, 5].map(|b| {
            let (m, n) = voigt_pair(b);
            if m == n {
                grad[m][n]
            } else {
                grad[m][n] + grad[n][m]
            }
        })
    };
    // complex amplitudes (times exp(-i w t)) of grad u, grad du/dt, du/dt
    let mut grad_u = [[Complex64::new(0.0, 0.0); 3]; 3];
    for m in 0..3 {
        for n in 0..3 {
            grad_u[m][n] = i * k[n] * a[m];
        }
    }
    let grad_v = grad_u.map(|row| row.map(|x| -i * w * x));
    let e_u = eng(&grad_u);
    let e_v = eng(&grad_v);
    let vel = a.map(|x| -i * w * x);

    // stress amplitudes: equilibrium part acts on grad u, memory on grad v
    let mut sig_eq = [Complex64::new(0.0, 0.0); 6];
    let mut sig_mem = [Complex64::new(0.0, 0.0); 6];
    for r in 0..6 {
        for c in 0..6 {
            sig_eq[r] += g_inf[r][c] * e_u[c];
            sig_mem[r] += kw[r][c] * e_v[c];
        }
    }

    let total = n_periods * n_samples;
    let mut acc = [0.0; 3];
    for j in 0..total {
        let t = j as f64 * h;
        let e = (-i * w * t).exp();
        let v = vel.map(|x| (x * e).re);
        let sig = [0, 1, 2, 3, 4, 5].map(|r| (sig_eq[r] * e).re + (sig_mem[r] * e).re);
        for (l, out) in acc.iter_mut().enumerate() {
            let mut s = 0.0;
            for (kk, vk) in v.iter().enumerate() {
                s -= sig[voigt(kk, l)] * vk;
            }
            *out += s;
        }
    }
    Ok(acc.map(|x| x / total as f64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcuteAngleReport {
    pub pass: bool,
    /// `<Psi> . k_I` per wave, in input order.
    pub dots: Vec<f64>,
    pub worst_dot: f64,
    pub worst_index: usize,
    /// Indices of waves that failed the residual gate and were skipped.
    pub rejected: Vec<usize>,
}

/// Checks `<Psi> . k_I >= -tol` for every wave that passes the residual
/// gate. Failures are reported, not raised.
pub fn acute_angle_check(
    model: &RelaxationModel,
    waves: &[InhomogeneousWave],
    tol: f64,
) -> Result<AcuteAngleReport> {
    let mut dots = Vec::with_capacity(waves.len());
    let mut rejected = Vec::new();
    let mut worst = f64::INFINITY;
    let mut worst_index = 0;
    for (idx, w) in waves.iter().enumerate() {
        if !w.accepted(model) {
            rejected.push(idx);
            dots.push(f64::NAN);
            continue;
        }
        let d = mean_flux(model, w)?.dot_ki;
        if d < worst {
            worst = d;
            worst_index = idx;
        }
        dots.push(d);
    }
    Ok(AcuteAngleReport {
        pass: worst >= -tol,
        dots,
        worst_dot: worst,
        worst_index,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planewave::modal_solve;
    use crate::reference::{elastic_isotropic, medium_a, medium_b};
    use crate::sampling::{rng, unit_vector};

    const E1: [f64; 3] = [1.0, 0.0, 0.0];
    const E2: [f64; 3] = [0.0, 1.0, 0.0];

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rel(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        let d = (0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt();
        d / b.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn residual_examples() {
        let el = elastic_isotropic();
        let w = 2.0;
        let k = [c(w / 3f64.sqrt()), c(0.0), c(0.0)];
        let a = [c(1.0), c(0.0), c(0.0)];
        assert!(christoffel_residual(&el, w, &k, &a).unwrap() < 1e-14);

        let mut r = rng(4);
        for _ in 0..10 {
            let v = unit_vector(&mut r, 12);
            let k = [0, 1, 2].map(|i| Complex64::new(v[i], v[i + 3]));
            let a = [0, 1, 2].map(|i| Complex64::new(v[i + 6], v[i + 9]));
            assert!(christoffel_residual(&medium_a(), 1.0, &k, &a).unwrap() > 1e-6);
        }
    }

    #[test]
    fn collinear_waves_satisfy_christoffel() {
        for model in [medium_a(), medium_b()] {
            let n = crate::medium::unit([0.2, -0.5, 0.9]);
            for w in [0.01, 1.0, 100.0] {
                for mode in modal_solve(&model, &n, w).unwrap() {
                    let wave = collinear_wave(&model, &n, w, &mode).unwrap();
                    assert!(wave.residual <= 1e-9 * model.rho() * w * w, "{}", wave.residual);
                }
            }
        }
    }

    #[test]
    fn newton_reproduces_collinear_root() {
        let model = medium_b();
        let n = crate::medium::unit([1.0, 0.3, 0.2]);
        let w = 1.5;
        for mode in modal_solve(&model, &n, w).unwrap() {
            let seed = (w * mode.inv_speed * 1.02, mode.attenuation * 0.9);
            let wave = inhomogeneous_solve(&model, w, &n, &n, seed).unwrap();
            let alpha: f64 = (0..3).map(|i| wave.k_r[i] * n[i]).sum();
            let beta: f64 = (0..3).map(|i| wave.k_i[i] * n[i]).sum();
            assert!((alpha - w / mode.phase_speed).abs() < 1e-9 * alpha);
            assert!((beta - mode.attenuation).abs() < 1e-9 * alpha);
        }
    }

    #[test]
    fn elastic_collinear_has_no_attenuation() {
        let el = elastic_isotropic();
        let wave = inhomogeneous_solve(&el, 1.0, &E1, &E1, (0.55, 0.01)).unwrap();
        assert!(wave.k_i.iter().all(|x| x.abs() < 1e-12));
        assert!((wave.k_r[0] - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tilted_wave_in_medium_a() {
        let model = medium_a();
        let modes = modal_solve(&model, &E1, 1.0).unwrap();
        for mode in &modes {
            let wave = solve_tilted(&model, 1.0, &E1, &E2, mode, PI / 6.0, 6).unwrap();
            assert!(wave.residual <= 1e-8, "{}", wave.residual);
            let m = tilt(&E1, &E2, PI / 6.0);
            let cos: f64 = (0..3).map(|i| wave.k_i[i] * m[i]).sum::<f64>()
                / wave.k_i.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((cos - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flux_forms_agree_and_point_forward() {
        let el = elastic_isotropic();
        let w = 2.0;
        let mode = &modal_solve(&el, &E1, w).unwrap()[2];
        let wave = collinear_wave(&el, &E1, w, mode).unwrap();
        let f = mean_flux(&el, &wave).unwrap();
        assert_eq!(f.dot_ki, 0.0);
        assert!(f.mean_flux[0] > 0.0);
        assert!(f.mean_flux[1].abs() < 1e-14 && f.mean_flux[2].abs() < 1e-14);
        // (w/2) (lambda + 2 mu) k with k = w / sqrt(3)
        assert!((f.mean_flux[0] - 0.5 * w * 3.0 * w / 3f64.sqrt()).abs() < 1e-12);

        let model = medium_b();
        let n = crate::medium::unit([0.4, 0.4, -0.8]);
        for mode in modal_solve(&model, &n, 0.7).unwrap() {
            let wave = collinear_wave(&model, &n, 0.7, &mode).unwrap();
            let f = mean_flux(&model, &wave).unwrap();
            assert!(rel(&f.flux_relaxation_form, &f.flux_modulus_form) < 1e-12);
            assert!(f.dot_ki > 0.0);
        }
    }

    #[test]
    fn spatial_decay_factor() {
        let model = medium_a();
        let mode = &modal_solve(&model, &E1, 1.0).unwrap()[0];
        let wave = collinear_wave(&model, &E1, 1.0, mode).unwrap();
        let f = mean_flux(&model, &wave).unwrap();
        for x in [[1.0, 0.0, 0.0], [0.5, 2.0, 0.0], [-1.0, 0.0, 3.0]] {
            let fx = f.flux_at(&wave, &x);
            let e = (-2.0 * wave.k_i[0] * x[0]).exp();
            for i in 0..3 {
                assert!((fx[i] - e * f.mean_flux[i]).abs() <= 1e-15 * fx[i].abs().max(1e-300));
            }
        }
    }

    #[test]
    fn time_oracle_matches_closed_form() {
        let el = elastic_isotropic();
        let mode = &modal_solve(&el, &E1, 1.0).unwrap()[2];
        let wave = collinear_wave(&el, &E1, 1.0, mode).unwrap();
        let f = mean_flux(&el, &wave).unwrap().mean_flux;
        let o = flux_time_oracle(&el, &wave, 1, 64, 0.0).unwrap();
        assert!(rel(&o, &f) < 1e-14);

        let model = medium_a();
        let n = crate::medium::unit([1.0, 1.0, 0.0]);
        for mode in modal_solve(&model, &n, 1.0).unwrap() {
            let wave = collinear_wave(&model, &n, 1.0, &mode).unwrap();
            let f = mean_flux(&model, &wave).unwrap().mean_flux;
            let o = flux_time_oracle(&model, &wave, 1, 2000, default_t_max(&model)).unwrap();
            assert!(rel(&o, &f) < 1e-6, "{}", rel(&o, &f));
        }
    }

    #[test]
    fn time_oracle_error_is_second_order() {
        let model = medium_a();
        let mode = &modal_solve(&model, &E1, 1.0).unwrap()[0];
        let wave = collinear_wave(&model, &E1, 1.0, mode).unwrap();
        let f = mean_flux(&model, &wave).unwrap().mean_flux;
        let t = default_t_max(&model);
        let e1 = rel(&flux_time_oracle(&model, &wave, 1, 100, t).unwrap(), &f);
        let e2 = rel(&flux_time_oracle(&model, &wave, 1, 200, t).unwrap(), &f);
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn time_oracle_rejects_short_horizon() {
        let model = medium_a();
        let mode = &modal_solve(&model, &E1, 1.0).unwrap()[0];
        let wave = collinear_wave(&model, &E1, 1.0, mode).unwrap();
        assert!(matches!(
            flux_time_oracle(&model, &wave, 1, 400, 5.0),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn acute_angle_examples() {
        let el = elastic_isotropic();
        let mut waves = Vec::new();
        for mode in modal_solve(&el, &E1, 1.0).unwrap() {
            waves.push(collinear_wave(&el, &E1, 1.0, &mode).unwrap());
        }
        let rep = acute_angle_check(&el, &waves, 1e-10).unwrap();
        assert!(rep.pass && rep.dots.iter().all(|&d| d == 0.0));

        let model = medium_a();
        let mut waves = Vec::new();
        for deg in [15.0, 30.0, 45.0, 60.0] {
            for mode in modal_solve(&model, &E1, 1.0).unwrap() {
                let th = deg * PI / 180.0;
                waves.push(solve_tilted(&model, 1.0, &E1, &E2, &mode, th, 12).unwrap());
            }
        }
        let rep = acute_angle_check(&model, &waves, 1e-10).unwrap();
        assert!(rep.pass && rep.rejected.is_empty(), "{:?}", rep);
    }
}
