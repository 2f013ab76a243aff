//! Plane waves along a fixed direction `n`.
//!
//! The wave operator is `K_n(p) = sqrt(rho) p Q_n(p)^{-1/2}`, so that a
//! displacement `a exp(p t - kappa n.x)` solves the equation of motion iff
//! `K_n(p)^2 a = kappa^2 a`. At `p = -i w`
//!
//! ```text
//! K_n(-i w) = -i w C_n(w) + A_n(w)
//! ```
//!
//! with `C_n` the inverse phase speed matrix and `A_n` the attenuation
//! matrix, both real symmetric positive semidefinite.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::bernstein::{verify_pick, PickReport, PickSense};
use crate::linalg::{
    matrix_exp, principal_sqrt_eig, real_part, spectral_norm, vdot, vec_norm, CMat, HermMat,
    Schur,
};
use crate::medium::{check_unit, RelaxationModel};
use crate::{Error, Result};

/// Convergence radius of the Zassenhaus product: `|y| ||w C + A|| <= 0.596705`.
pub const ZASSENHAUS_RADIUS: f64 = 0.596705;

/// Relative gap below which eigenvalues are grouped into one cluster.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Angle drift below which an eigenvector counts as frequency independent.
pub const CONSTANT_EIGVEC_TOL: f64 = 1e-8;

fn p_of_omega(omega: f64) -> Complex64 {
    Complex64::new(0.0, -omega)
}

/// `sqrt(rho) p Q^{-1/2}` for a given acoustic tensor `Q`.
pub fn k_from_acoustic(rho: f64, p: Complex64, q: &CMat) -> Result<CMat> {
    let root = principal_sqrt_eig(q)?;
    Ok(root.inverse()?.scale(p * rho.sqrt()))
}

/// `K_n(p) = sqrt(rho) p Q_n(p)^{-1/2}`.
pub fn k_matrix(model: &RelaxationModel, n: &[f64; 3], p: Complex64) -> Result<CMat> {
    let q = model.acoustic_tensor(n, p)?;
    k_from_acoustic(model.rho(), p, &q)
}

/// One root of the dispersion equation.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveMode {
    /// Eigenvalue of `K_n(-i w)`, with `Re kappa >= 0`.
    pub kappa: Complex64,
    pub polarization: [Complex64; 3],
    /// `Re kappa`.
    pub attenuation: f64,
    /// `-Im kappa / w`.
    pub inv_speed: f64,
    pub phase_speed: f64,
    /// Number of roots in this root's cluster.
    pub multiplicity: usize,
    /// Dimension of the (numerical) eigenspace of the cluster.
    pub eigenspace_dim: usize,
    /// `||(K^2 - kappa^2) a|| / ||K^2||`.
    pub residual: f64,
    /// `Re(a^dag K a)`, i.e. `a^dag A_n a`.
    pub rayleigh_attenuation: f64,
    /// `-Im(a^dag K a) / w`, i.e. `a^dag C_n a`.
    pub rayleigh_inv_speed: f64,
}

/// Roots of the dispersion equation at frequency `omega != 0`, sorted by
/// ascending phase speed.
pub fn modal_solve(model: &RelaxationModel, n: &[f64; 3], omega: f64) -> Result<Vec<PlaneWaveMode>> {
    if !(omega.is_finite() && omega != 0.0) {
        return Err(Error::invalid("frequency must be finite and nonzero"));
    }
    let k = k_matrix(model, n, p_of_omega(omega))?;
    modes_of(&k, omega)
}

fn modes_of(k: &CMat, omega: f64) -> Result<Vec<PlaneWaveMode>> {
    let schur = Schur::new(k)?;
    let mut kappas: Vec<Complex64> = schur
        .eigenvalues()
        .into_iter()
        .map(|l| if l.re < -1e-12 * l.norm() { -l } else { l })
        .collect();
    // ascending phase speed = descending inverse speed
    kappas.sort_by(|a, b| (-b.im / omega).total_cmp(&(-a.im / omega)));

    let knorm = spectral_norm(k);
    let k2 = k.pow2();
    let k2norm = spectral_norm(&k2).max(f64::MIN_POSITIVE);

    let mut modes = Vec::with_capacity(3);
    let mut i = 0;
    while i < kappas.len() {
        let mut j = i + 1;
        while j < kappas.len()
            && (kappas[j] - kappas[i]).norm() <= CLUSTER_TOL * kappas[i].norm().max(kappas[j].norm())
        {
            j += 1;
        }
        let cluster = &kappas[i..j];
        let mean: Complex64 = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
        // right singular vectors of K - mean I for the smallest singular values
        let shifted = k - &CMat::identity(3).scale(mean);
        let (vals, vecs) = HermMat::symmetrized(&(&shifted.adjoint() * &shifted)).eigh()?;
        let null_tol = (1e-6 * knorm).powi(2);
        let eigenspace_dim = vals.iter().filter(|&&v| v <= null_tol).count().max(1);
        for (slot, &kappa) in cluster.iter().enumerate() {
            let col = if slot < eigenspace_dim { slot } else { 0 };
            let mut a = [Complex64::new(0.0, 0.0); 3];
            for (r, x) in a.iter_mut().enumerate() {
                *x = vecs[(r, col)];
            }
            fix_phase(&mut a);
            let ka = k.mul_vec(&a);
            let k2a = k2.mul_vec(&a);
            let res: Vec<Complex64> = k2a.iter().zip(&a).map(|(x, y)| x - kappa * kappa * y).collect();
            let rq = vdot(&a, &ka);
            let inv_speed = -kappa.im / omega;
            modes.push(PlaneWaveMode {
                kappa,
                polarization: a,
                attenuation: kappa.re,
                inv_speed,
                phase_speed: 1.0 / inv_speed,
                multiplicity: cluster.len(),
                eigenspace_dim: eigenspace_dim.min(cluster.len()),
                residual: vec_norm(&res) / k2norm,
                rayleigh_attenuation: rq.re,
                rayleigh_inv_speed: -rq.im / omega,
            });
        }
        i = j;
    }
    Ok(modes)
}

/// Rotates a vector so that its largest component is real and positive.
pub fn fix_phase(a: &mut [Complex64]) {
    let big = a
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))
        .unwrap_or_default();
    if big.norm() > 0.0 {
        let ph = big.conj() / big.norm();
        for x in a.iter_mut() {
            *x *= ph;
        }
    }
}

/// The split `K_n(-i w) = -i w Cmat + Amat` at one frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixWaveDescriptor {
    pub omega: f64,
    pub n: [f64; 3],
    /// Inverse phase speed matrix `C_n(w)`.
    pub cmat: CMat,
    /// Attenuation matrix `A_n(w)`.
    pub amat: CMat,
    /// Smallest eigenvalue of `amat`.
    pub a0: f64,
    /// High-frequency limit `(G0_n / rho)^{-1/2}` of `cmat`.
    pub b_inf: CMat,
}

impl MatrixWaveDescriptor {
    /// `-i w Cmat + Amat`.
    pub fn k(&self) -> CMat {
        &self.cmat.scale(Complex64::new(0.0, -self.omega)) + &self.amat
    }

    /// Ascending eigenvalues of `cmat`.
    pub fn c_eigenvalues(&self) -> Result<Vec<f64>> {
        HermMat::symmetrized(&self.cmat).eigenvalues()
    }

    /// Ascending eigenvalues of `amat`.
    pub fn a_eigenvalues(&self) -> Result<Vec<f64>> {
        HermMat::symmetrized(&self.amat).eigenvalues()
    }
}

/// Computes `Amat = Re K_n(-i w)` and `Cmat = -Im K_n(-i w) / w`.
pub fn matrix_wave(model: &RelaxationModel, n: &[f64; 3], omega: f64) -> Result<MatrixWaveDescriptor> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::invalid("frequency must be positive"));
    }
    let k = k_matrix(model, n, p_of_omega(omega))?;
    let amat = real_part(&k.re()).into_cmat();
    let cmat = real_part(&k.im().scale_re(-1.0 / omega)).into_cmat();
    let a0 = HermMat::symmetrized(&amat).min_eigenvalue()?;
    Ok(MatrixWaveDescriptor {
        omega,
        n: *n,
        cmat,
        amat,
        a0,
        b_inf: wavefront_slowness(model, n)?,
    })
}

/// `B_n = (G0_n / rho)^{-1/2}`, the limit of `p^{-1} K_n(p)` as `p -> inf`.
pub fn wavefront_slowness(model: &RelaxationModel, n: &[f64; 3]) -> Result<CMat> {
    check_unit(n)?;
    let g = model.g_zero().contract(n);
    let m = CMat::from_fn(3, |i, j| Complex64::new(g[i][j] / model.rho(), 0.0));
    let root = principal_sqrt_eig(&m)?;
    Ok(real_part(&root.inverse()?.re()).into_cmat())
}

/// `exp(-y K_n(-i w))`.
pub fn propagator(desc: &MatrixWaveDescriptor, y: f64) -> Result<CMat> {
    if !(y.is_finite() && y >= 0.0) {
        return Err(Error::invalid("propagation distance must be non-negative"));
    }
    matrix_exp(&desc.k().scale_re(-y))
}

/// Product approximations of `exp(X + Y)` with `X = i w y C`, `Y = -y A`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZassenhausSplit {
    /// `||exp(X+Y) - exp(X) exp(Y) [exp(-[X,Y]/2)]||`.
    pub residual: f64,
    /// Same for `exp(Y) exp(X) [exp([X,Y]/2)]`.
    pub residual_reversed: f64,
    /// `(exp(X), exp(Y))`.
    pub factors: (CMat, CMat),
    /// Second-order correction factor, present for `order == 2`.
    pub correction: Option<CMat>,
    pub convergent: bool,
    pub exact: CMat,
}

pub fn zassenhaus_split(desc: &MatrixWaveDescriptor, y: f64, order: u8) -> Result<ZassenhausSplit> {
    if !(order == 1 || order == 2) {
        return Err(Error::invalid("Zassenhaus order must be 1 or 2"));
    }
    let exact = propagator(desc, y)?;
    let x = desc.cmat.scale(Complex64::new(0.0, desc.omega * y));
    let yy = desc.amat.scale_re(-y);
    let ex = matrix_exp(&x)?;
    let ey = matrix_exp(&yy)?;
    let mut forward = &ex * &ey;
    let mut backward = &ey * &ex;
    let mut correction = None;
    if order == 2 {
        let comm = x.commutator(&yy);
        let f = matrix_exp(&comm.scale_re(-0.5))?;
        let b = matrix_exp(&comm.scale_re(0.5))?;
        forward = &forward * &f;
        backward = &backward * &b;
        correction = Some(f);
    }
    let bound = &desc.cmat.scale_re(desc.omega) + &desc.amat;
    Ok(ZassenhausSplit {
        residual: spectral_norm(&(&exact - &forward)),
        residual_reversed: spectral_norm(&(&exact - &backward)),
        factors: (ex, ey),
        correction,
        convergent: y.abs() * spectral_norm(&bound) <= ZASSENHAUS_RADIUS,
        exact,
    })
}

/// An amplitude expanded in quasi-elastic modes (eigenvectors of `Cmat`)
/// and in attenuation modes (eigenvectors of `Amat`).
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiElasticExpansion {
    /// Eigenvalues of `Cmat` (inverse speeds of the quasi-elastic modes).
    pub inv_speeds: Vec<f64>,
    /// Eigenvectors of `Cmat` as columns.
    pub modes: CMat,
    pub coefficients: Vec<Complex64>,
    /// `Amat` in the quasi-elastic basis; off-diagonal entries couple modes.
    pub coupling: CMat,
    /// Eigenvalues of `Amat` (logarithmic attenuation rates).
    pub attenuation_rates: Vec<f64>,
    pub attenuation_modes: CMat,
    pub attenuation_coefficients: Vec<Complex64>,
    /// `exp(i w y C) exp(-y A) a`, propagated mode by mode.
    pub factored: Vec<Complex64>,
    /// `exp(-y K) a`.
    pub exact: Vec<Complex64>,
    pub reconstruction_error: f64,
    pub zassenhaus_residual: f64,
    /// Two `Cmat` eigenvalues closer than the cluster tolerance.
    pub degenerate: bool,
}

pub fn quasi_elastic_expand(
    desc: &MatrixWaveDescriptor,
    amplitude: &[Complex64; 3],
    y: f64,
) -> Result<QuasiElasticExpansion> {
    if vec_norm(amplitude) == 0.0 {
        return Err(Error::invalid("amplitude must be nonzero"));
    }
    let (inv_speeds, modes) = HermMat::symmetrized(&desc.cmat).eigh()?;
    let (attenuation_rates, attenuation_modes) = HermMat::symmetrized(&desc.amat).eigh()?;
    let coefficients = modes.adjoint().mul_vec(amplitude);
    let attenuation_coefficients = attenuation_modes.adjoint().mul_vec(amplitude);
    let coupling = &(&modes.adjoint() * &desc.amat) * &modes;

    let damped = matrix_exp(&desc.amat.scale_re(-y))?.mul_vec(amplitude);
    let mut c = modes.adjoint().mul_vec(&damped);
    for (cj, lj) in c.iter_mut().zip(&inv_speeds) {
        *cj *= Complex64::new(0.0, desc.omega * y * lj).exp();
    }
    let factored = modes.mul_vec(&c);
    let exact = propagator(desc, y)?.mul_vec(amplitude);
    let diff: Vec<Complex64> = exact.iter().zip(&factored).map(|(a, b)| a - b).collect();
    let scale = inv_speeds.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let degenerate = inv_speeds
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() <= CLUSTER_TOL * scale);
    Ok(QuasiElasticExpansion {
        inv_speeds,
        modes,
        coefficients,
        coupling,
        attenuation_rates,
        attenuation_modes,
        attenuation_coefficients,
        factored,
        exact,
        reconstruction_error: vec_norm(&diff),
        zassenhaus_residual: zassenhaus_split(desc, y, 1)?.residual,
        degenerate,
    })
}

/// A frequency-independent eigenvector `v` of `K_n` and its scalar channel
/// `kappa(p) = v^dag K_n(p) v`.
#[derive(Clone, Debug)]
pub struct ScalarChannel {
    pub vector: [Complex64; 3],
    /// Largest angle drift (sine) of `v` over the tested frequencies.
    pub drift: f64,
    pub pick: PickReport,
    /// `(w, 1/c, a)` per tested frequency.
    pub split: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct ConstantEigvecReport {
    /// Drift of every candidate eigenvector taken at the first frequency.
    pub drifts: Vec<f64>,
    pub channels: Vec<ScalarChannel>,
}

impl ConstantEigvecReport {
    pub fn has_constant_eigenvector(&self) -> bool {
        !self.channels.is_empty()
    }

    pub fn min_drift(&self) -> f64 {
        self.drifts.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `sin` of the angle between `v` and `M v`, normalized by `||M||`, zero
/// for exact eigenvectors.
fn eigvec_drift(m: &CMat, v: &[Complex64]) -> f64 {
    let mv = m.mul_vec(v);
    let lam = vdot(v, &mv);
    let r: Vec<Complex64> = mv.iter().zip(v).map(|(x, y)| x - lam * y).collect();
    vec_norm(&r) / spectral_norm(m).max(f64::MIN_POSITIVE)
}

/// `v^dag K_n(p) v`, with the value `0` at `p = 0`.
pub fn channel_value(model: &RelaxationModel, n: &[f64; 3], v: &[Complex64; 3], p: Complex64) -> Result<Complex64> {
    if p.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let k = k_matrix(model, n, p)?;
    Ok(vdot(v, &k.mul_vec(v)))
}

/// Looks for eigenvectors of `K_n(-i w)` that do not depend on `w`, and
/// Pick-tests the scalar channel of each one found.
pub fn constant_eigvec_check(
    model: &RelaxationModel,
    n: &[f64; 3],
    omegas: &[f64],
    pick_grid: &[Complex64],
) -> Result<ConstantEigvecReport> {
    if omegas.len() < 3 {
        return Err(Error::invalid("need at least three frequencies"));
    }
    let ks: Vec<CMat> = omegas
        .iter()
        .map(|&w| k_matrix(model, n, p_of_omega(w)))
        .collect::<Result<_>>()?;
    let candidates = Schur::new(&ks[0])?.eigenvectors();
    let mut drifts = Vec::new();
    let mut channels = Vec::new();
    for j in 0..3 {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for (r, x) in v.iter_mut().enumerate() {
            *x = candidates[(r, j)];
        }
        fix_phase(&mut v);
        let drift = ks.iter().map(|k| eigvec_drift(k, &v)).fold(0.0, f64::max);
        drifts.push(drift);
        if drift > CONSTANT_EIGVEC_TOL {
            continue;
        }
        let pick = verify_pick(
            |z| Ok(CMat::from_diag(&[channel_value(model, n, &v, z)?])),
            pick_grid,
            1e-9,
            PickSense::Cbf,
        )?;
        let split = omegas
            .iter()
            .zip(&ks)
            .map(|(&w, k)| {
                let kap = vdot(&v, &k.mul_vec(&v));
                (w, -kap.im / w, kap.re)
            })
            .collect();
        channels.push(ScalarChannel {
            vector: v,
            drift,
            pick,
            split,
        });
    }
    Ok(ConstantEigvecReport { drifts, channels })
}

/// Closed-form total mass and support of the measure of a scalar channel
/// `kappa(p) = sqrt(rho) p q(p)^{-1/2}` with
/// `q(p) = q_inf + sum_k g_k p / (p + r_k)`.
///
/// The mass is `lim (kappa(x) - x sqrt(rho / q0)) = sqrt(rho) sum g_k r_k / (2 q0^{3/2})`
/// with `q0 = q_inf + sum g_k`; the support lies in `[z1, r_max]` where `z1`
/// is the first zero of `q(-s)`.
pub fn channel_expected_mass(rho: f64, q_inf: f64, terms: &[(f64, f64)]) -> (f64, (f64, f64)) {
    let q0 = q_inf + terms.iter().map(|t| t.1).sum::<f64>();
    let mass = rho.sqrt() * terms.iter().map(|(r, g)| g * r).sum::<f64>() / (2.0 * q0.powf(1.5));
    let r_min = terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let r_max = terms.iter().map(|t| t.0).fold(0.0, f64::max);
    if terms.is_empty() {
        return (0.0, (0.0, 0.0));
    }
    // q(-s) decreases on ]0, r_min[ from q_inf to -inf: bisect for the zero
    let q = |s: f64| q_inf - terms.iter().map(|(r, g)| g * s / (r - s)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, r_min);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (mass, (0.5 * (lo + hi), r_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::default_pick_grid;
    use crate::medium::icosphere;
    use crate::reference::{elastic_isotropic, medium_a, medium_b};
    use crate::sampling::{rng, unit_vector3};
    use rand::Rng;

    const E1: [f64; 3] = [1.0, 0.0, 0.0];

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn k_matrix_elastic_is_diagonal() {
        let k = k_matrix(&elastic_isotropic(), &E1, c(2.0, 0.0)).unwrap();
        let expect = CMat::from_real_diag(&[2.0 / 3f64.sqrt(), 2.0, 2.0]);
        assert!((&k - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn k_matrix_high_frequency_limit() {
        let p = 1e8;
        let k = k_matrix(&medium_a(), &E1, c(p, 0.0)).unwrap().scale_re(1.0 / p);
        let expect = CMat::from_real_diag(&[0.5, 1.0 / 1.5f64.sqrt(), 1.0 / 1.5f64.sqrt()]);
        assert!((&k - &expect).max_abs() < 1e-6);
        let b = wavefront_slowness(&medium_a(), &E1).unwrap();
        assert!((&b - &expect).max_abs() < 1e-14);
    }

    #[test]
    fn k_matrix_passes_pick_test() {
        let grid = default_pick_grid();
        for model in [medium_a(), medium_b()] {
            for n in icosphere(0).iter().take(3) {
                let rep = verify_pick(|z| k_matrix(&model, n, z), &grid, 1e-9, PickSense::Cbf).unwrap();
                assert!(rep.pass, "worst {}", rep.worst);
            }
        }
    }

    #[test]
    fn k_squared_matches_eigenproblem() {
        // K^2 = rho p^2 Q_n^{-1}
        let model = medium_b();
        let n = crate::medium::unit([1.0, 2.0, -0.5]);
        let p = c(0.2, -1.3);
        let k = k_matrix(&model, &n, p).unwrap();
        let q = model.acoustic_tensor(&n, p).unwrap();
        let rhs = q.inverse().unwrap().scale(p * p * model.rho());
        assert!((&k.pow2() - &rhs).max_abs() < 1e-12 * rhs.max_abs());
        assert!((&k - &k.transpose()).max_abs() < 1e-12 * k.max_abs());
    }

    #[test]
    fn elastic_modes() {
        let modes = modal_solve(&elastic_isotropic(), &E1, 1.0).unwrap();
        assert_eq!(modes.len(), 3);
        let speeds: Vec<f64> = modes.iter().map(|m| m.phase_speed).collect();
        assert!((speeds[0] - 1.0).abs() < 1e-12);
        assert!((speeds[1] - 1.0).abs() < 1e-12);
        assert!((speeds[2] - 3f64.sqrt()).abs() < 1e-12);
        for m in &modes {
            assert!(m.attenuation.abs() < 1e-14);
        }
        assert_eq!(modes[0].multiplicity, 2);
        assert_eq!(modes[0].eigenspace_dim, 2);
        assert_eq!(modes[2].multiplicity, 1);
        // the two shear polarizations span the transverse plane
        let a = modes[0].polarization;
        let b = modes[1].polarization;
        assert!(vdot(&a, &b).norm() < 1e-12);
        assert!(a[0].norm() < 1e-12 && b[0].norm() < 1e-12);
    }

    #[test]
    fn medium_a_frequency_limits() {
        let m = medium_a();
        let low = modal_solve(&m, &E1, 1e-2).unwrap();
        let high = modal_solve(&m, &E1, 1e4).unwrap();
        let lo_expect = [1.0, 1.0, 3f64.sqrt()];
        let hi_expect = [1.5f64.sqrt(), 1.5f64.sqrt(), 2.0];
        for j in 0..3 {
            assert!((low[j].phase_speed - lo_expect[j]).abs() < 1e-3 * lo_expect[j]);
            assert!((high[j].phase_speed - hi_expect[j]).abs() < 1e-3 * hi_expect[j]);
        }
    }

    #[test]
    fn mode_invariants_on_random_directions() {
        let mut r = rng(3);
        for model in [medium_a(), medium_b()] {
            for _ in 0..20 {
                let n = unit_vector3(&mut r);
                let w = 10f64.powf(r.random_range(-2.0..3.0));
                for m in modal_solve(&model, &n, w).unwrap() {
                    assert!(m.residual <= 1e-9, "residual {}", m.residual);
                    assert!(m.attenuation >= -1e-10);
                    assert!(m.inv_speed > 0.0);
                    assert!(m.rayleigh_attenuation >= -1e-10);
                    assert!(m.rayleigh_inv_speed > 0.0);
                }
            }
        }
    }

    #[test]
    fn negative_frequency_gives_conjugate_roots() {
        let n = crate::medium::unit([0.3, -0.4, 0.8]);
        let model = medium_b();
        let pos = modal_solve(&model, &n, 1.7).unwrap();
        let neg = modal_solve(&model, &n, -1.7).unwrap();
        for (a, b) in pos.iter().zip(&neg) {
            assert!((a.kappa - b.kappa.conj()).norm() < 1e-12 * a.kappa.norm());
            assert!((a.phase_speed - b.phase_speed).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_wave_examples() {
        let el = matrix_wave(&elastic_isotropic(), &E1, 3.0).unwrap();
        assert!(el.amat.max_abs() < 1e-15);
        assert!((&el.cmat - &el.b_inf).max_abs() < 1e-15);

        let m = medium_a();
        let d1 = matrix_wave(&m, &E1, 0.5).unwrap();
        let d2 = matrix_wave(&m, &E1, 2.0).unwrap();
        let dc = HermMat::symmetrized(&(&d1.cmat - &d2.cmat)).min_eigenvalue().unwrap();
        let da = HermMat::symmetrized(&(&d2.amat - &d1.amat)).min_eigenvalue().unwrap();
        assert!(dc >= -1e-12 && da >= -1e-12);

        let hi = matrix_wave(&m, &E1, 1e4).unwrap();
        assert!((&hi.cmat - &hi.b_inf).max_abs() < 1e-3);
    }

    #[test]
    fn descriptor_reconstructs_operator() {
        let model = medium_b();
        let n = crate::medium::unit([1.0, 1.0, 1.0]);
        let d = matrix_wave(&model, &n, 0.8).unwrap();
        let k = k_matrix(&model, &n, c(0.0, -0.8)).unwrap();
        assert!((&d.k() - &k).max_abs() < 1e-12 * k.max_abs());
        assert!(d.c_eigenvalues().unwrap()[0] >= -1e-10);
        assert!(d.a0 >= -1e-10);
    }

    #[test]
    fn propagator_examples() {
        let d = matrix_wave(&medium_b(), &E1, 1.0).unwrap();
        assert!((&propagator(&d, 0.0).unwrap() - &CMat::identity(3)).max_abs() < 1e-15);
        let el = matrix_wave(&elastic_isotropic(), &E1, 2.0).unwrap();
        for y in [0.1, 1.0, 10.0] {
            assert!((spectral_norm(&propagator(&el, y).unwrap()) - 1.0).abs() < 1e-12);
        }
        assert!(propagator(&d, -1.0).is_err());
    }

    #[test]
    fn zassenhaus_commuting_case_is_exact() {
        let d = matrix_wave(&medium_a(), &E1, 1.3).unwrap();
        for y in [0.0, 0.1, 2.0, 10.0] {
            let z = zassenhaus_split(&d, y, 1).unwrap();
            assert!(z.residual <= 1e-12, "{}", z.residual);
        }
        assert_eq!(zassenhaus_split(&d, 0.0, 2).unwrap().residual, 0.0);
    }

    #[test]
    fn zassenhaus_orders() {
        let n = crate::medium::unit([1.0, 0.4, -0.7]);
        let d = matrix_wave(&medium_b(), &n, 1.0).unwrap();
        let y = 0.05;
        let r1 = zassenhaus_split(&d, y, 1).unwrap();
        let r1h = zassenhaus_split(&d, y / 2.0, 1).unwrap();
        let ratio = r1.residual / r1h.residual;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        assert!(r1.convergent);
        let r2 = zassenhaus_split(&d, y, 2).unwrap();
        let r2h = zassenhaus_split(&d, y / 2.0, 2).unwrap();
        let ratio2 = r2.residual / r2h.residual;
        assert!((7.0..=9.0).contains(&ratio2), "{ratio2}");
        assert!(r2.residual_reversed < r1.residual_reversed);
    }

    #[test]
    fn quasi_elastic_examples() {
        let d = matrix_wave(&medium_a(), &E1, 1.0).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let q = quasi_elastic_expand(&d, &[one, zero, zero], 0.7).unwrap();
        let nonzero = q.coefficients.iter().filter(|c| c.norm() > 1e-12).count();
        assert_eq!(nonzero, 1);
        assert!(q.reconstruction_error < 1e-13);

        let mut r = rng(8);
        let d = matrix_wave(&medium_b(), &crate::medium::unit([0.2, 0.9, 0.1]), 2.0).unwrap();
        for _ in 0..10 {
            let v = crate::sampling::unit_vector(&mut r, 6);
            let a = [c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5])];
            let y = r.random_range(0.0..0.3);
            let q = quasi_elastic_expand(&d, &a, y).unwrap();
            assert!(q.reconstruction_error <= 2.0 * q.zassenhaus_residual + 1e-15);
        }
        assert!(quasi_elastic_expand(&d, &[zero; 3], 1.0).is_err());
    }

    #[test]
    fn constant_eigenvectors() {
        let omegas = [0.1, 1.0, 10.0];
        let grid = crate::bernstein::pick_grid(8, 8, 1e-2, 1e2);
        let rep = constant_eigvec_check(&medium_a(), &E1, &omegas, &grid).unwrap();
        assert_eq!(rep.channels.len(), 3);
        for ch in &rep.channels {
            assert!(ch.pick.pass);
            for &(_, inv_c, a) in &ch.split {
                assert!(inv_c > 0.0 && a >= 0.0);
            }
        }
        let n = crate::medium::unit([0.3, 0.5, 0.8]);
        let rep = constant_eigvec_check(&medium_b(), &n, &omegas, &grid).unwrap();
        assert!(!rep.has_constant_eigenvector());
        assert!(rep.min_drift() > 1e-6);
        // proportional relaxation keeps the eigenvectors of G_inf_n
        let prop = crate::reference::medium_b_proportional();
        let rep = constant_eigvec_check(&prop, &n, &omegas, &grid).unwrap();
        assert_eq!(rep.channels.len(), 3);
        assert!(rep.channels.iter().all(|ch| ch.pick.pass));
    }

    #[test]
    fn expected_channel_mass_for_medium_a_shear() {
        let (mass, (z1, r)) = channel_expected_mass(1.0, 1.0, &[(1.0, 0.5)]);
        assert!((mass - 0.25 / 1.5f64.powf(1.5)).abs() < 1e-15);
        assert!((z1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r, 1.0);
    }
}
