//! Matrix-valued complete Bernstein functions (CBFs) and Stieltjes functions
//! with discrete measures.
//!
//! A matrix-valued CBF with a finite node list is
//!
//! ```text
//! A(z) = B + z C + sum_k z (z + s_k)^{-1} M_k
//! ```
//!
//! with `B`, `C`, `M_k` real symmetric positive semidefinite and `s_k > 0`.
//! Such functions are analytic off `]-inf, 0]` and satisfy the Pick
//! condition `Im z * Im A(z) >= 0`, where `Im M = (M - M^dag) / 2i`.
//! Stieltjes functions `B + C / z + sum_k (z + s_k)^{-1} M_k` satisfy the
//! reversed inequality.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use crate::linalg::{
    check_branch, condition_number, eigenvalues, imag_part, CMat, HermMat,
};
use crate::quad::{gauss_legendre, integrate, QuadratureSpec};
use crate::sampling::random_real_mat;
use crate::{Error, Result};

/// PSD tolerance for representation data.
pub const REP_PSD_TOL: f64 = 1e-10;

/// Condition number above which an inverse is refused.
pub const INVERSE_COND_LIMIT: f64 = 1e12;

/// One atom `M_k delta_{s_k}` of a discrete matrix measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub s: f64,
    pub m: CMat,
}

/// Discrete-measure representation `(B, C, {(s_k, M_k)})`.
#[derive(Clone, Debug, PartialEq)]
pub struct MvCbfRep {
    b: CMat,
    c: CMat,
    nodes: Vec<Node>,
}

/// The same data read as a Stieltjes function.
#[derive(Clone, Debug, PartialEq)]
pub struct StieltjesRep(MvCbfRep);

fn check_coefficient(m: &CMat, n: usize) -> Result<()> {
    if m.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.dim(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    if !m.is_real_symmetric(1e-12 * m.max_abs().max(1.0)) {
        return Err(Error::invalid("coefficient is not real symmetric"));
    }
    if HermMat::symmetrized(m).min_eigenvalue()? < -REP_PSD_TOL {
        return Err(Error::invalid("coefficient is not positive semidefinite"));
    }
    Ok(())
}

impl MvCbfRep {
    pub fn new(b: CMat, c: CMat, nodes: Vec<Node>) -> Result<Self> {
        let n = b.dim();
        check_coefficient(&b, n)?;
        check_coefficient(&c, n)?;
        for (k, node) in nodes.iter().enumerate() {
            if !(node.s.is_finite() && node.s > 0.0) {
                return Err(Error::invalid("node positions must be positive"));
            }
            if k > 0 && nodes[k - 1].s >= node.s {
                return Err(Error::invalid("node positions must be strictly increasing"));
            }
            check_coefficient(&node.m, n)?;
        }
        Ok(MvCbfRep { b, c, nodes })
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn c(&self) -> &CMat {
        &self.c
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Total mass `sum_k trace(M_k)` of the measure on `]a, b]`.
    pub fn mass_on(&self, a: f64, b: f64) -> CMat {
        let mut m = CMat::zeros(self.dim());
        for node in self.nodes.iter().filter(|n| n.s > a && n.s <= b) {
            m += &node.m;
        }
        m
    }

    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        eval_mvcbf(self, z)
    }
}

fn check_cbf_domain(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if z.norm() != 0.0 && PI - z.arg().abs() < 1e-9 {
        return Err(Error::Domain {
            z,
            reason: "argument on the negative real axis",
        });
    }
    Ok(())
}

/// `A(z) = B + zC + z sum_k (z + s_k)^{-1} M_k`.
///
/// Defined on the plane cut along `]-inf, 0[`; `A(0) = B`. Points with
/// `|arg z - pi| < 1e-9` are rejected.
pub fn eval_mvcbf(rep: &MvCbfRep, z: Complex64) -> Result<CMat> {
    check_cbf_domain(z)?;
    let mut a = &rep.b + &rep.c.scale(z);
    for node in &rep.nodes {
        a += &node.m.scale(z / (z + node.s));
    }
    Ok(a)
}

impl StieltjesRep {
    pub fn new(b: CMat, c: CMat, nodes: Vec<Node>) -> Result<Self> {
        Ok(StieltjesRep(MvCbfRep::new(b, c, nodes)?))
    }

    pub fn data(&self) -> &MvCbfRep {
        &self.0
    }

    /// `B + C/z + sum_k (z + s_k)^{-1} M_k`, for `z` off `]-inf, 0]`.
    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        check_cbf_domain(z)?;
        if z.norm() == 0.0 {
            return Err(Error::Domain {
                z,
                reason: "zero lies on the branch cut",
            });
        }
        let r = &self.0;
        let mut a = &r.b + &r.c.scale(z.inv());
        for node in &r.nodes {
            a += &node.m.scale((z + node.s).inv());
        }
        Ok(a)
    }
}

/// Scalar CBF `f(x) = a + b x + sum_k rho_k x / (x + s_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarCbfRep {
    a: f64,
    b: f64,
    nodes: Vec<(f64, f64)>,
}

impl ScalarCbfRep {
    pub fn new(a: f64, b: f64, nodes: Vec<(f64, f64)>) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !ok(a) || !ok(b) {
            return Err(Error::invalid("CBF coefficients must be non-negative"));
        }
        if nodes.iter().any(|&(s, r)| !(s.is_finite() && s > 0.0) || !ok(r)) {
            return Err(Error::invalid("CBF nodes need s > 0 and rho >= 0"));
        }
        Ok(ScalarCbfRep { a, b, nodes })
    }

    pub fn identity() -> Self {
        ScalarCbfRep {
            a: 0.0,
            b: 1.0,
            nodes: Vec::new(),
        }
    }

    pub fn constant(a: f64) -> Result<Self> {
        Self::new(a, 0.0, Vec::new())
    }

    /// `sqrt(x) = (1/pi) int_0^inf x/(x+s) s^{-1/2} ds` discretized with an
    /// `n`-point Gauss-Legendre rule after `s = u^2/(1-u)^2`.
    pub fn sqrt_discretized(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let nodes = x
            .iter()
            .zip(&w)
            .map(|(&x, &w)| {
                let u = 0.5 * (x + 1.0);
                let v = 1.0 - u;
                (u * u / (v * v), w / (PI * v * v))
            })
            .collect();
        ScalarCbfRep {
            a: 0.0,
            b: 0.0,
            nodes,
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_cbf_domain(z)?;
        let mut f = Complex64::new(self.a, 0.0) + z * self.b;
        for &(s, r) in &self.nodes {
            f += z * r / (z + s);
        }
        Ok(f)
    }
}

/// `f(B) = aI + bB + sum_k rho_k B (s_k I + B)^{-1}`.
pub fn cbf_of_matrix(f: &ScalarCbfRep, b: &CMat) -> Result<CMat> {
    check_branch(&eigenvalues(b)?)?;
    let n = b.dim();
    let id = CMat::identity(n);
    let mut out = &id.scale_re(f.a) + &b.scale_re(f.b);
    for &(s, r) in &f.nodes {
        let shifted = &id.scale_re(s) + b;
        // B and (sI + B) commute, so B (sI + B)^{-1} = (sI + B)^{-1} B
        let term = shifted.solve(b).map_err(|_| Error::Domain {
            z: Complex64::new(-s, 0.0),
            reason: "s I + B is singular",
        })?;
        out += &term.scale_re(r);
    }
    Ok(out)
}

/// Which half of the Pick inequality to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PickSense {
    /// `Im A(z) >= 0` for `Im z > 0`.
    Cbf,
    /// `Im A(z) <= 0` for `Im z > 0`.
    Stieltjes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PickReport {
    pub pass: bool,
    /// `(z, smallest eigenvalue of +-Im A(z))` per grid point.
    pub points: Vec<(Complex64, f64)>,
    pub worst: f64,
    pub worst_z: Complex64,
}

/// Evaluates `A` on `grid` (open upper half-plane) and records the smallest
/// eigenvalue of `Im A(z)` (negated for [`PickSense::Stieltjes`]); passes
/// iff every value is at least `-tol`.
pub fn verify_pick(
    mut evaluator: impl FnMut(Complex64) -> Result<CMat>,
    grid: &[Complex64],
    tol: f64,
    sense: PickSense,
) -> Result<PickReport> {
    if grid.is_empty() {
        return Err(Error::invalid("empty Pick grid"));
    }
    let mut points = Vec::with_capacity(grid.len());
    let mut worst = f64::INFINITY;
    let mut worst_z = grid[0];
    for &z in grid {
        if !(z.im > 0.0) {
            return Err(Error::Domain {
                z,
                reason: "Pick grid points must lie in the open upper half-plane",
            });
        }
        let mut h = imag_part(&evaluator(z)?).into_cmat();
        if sense == PickSense::Stieltjes {
            h = -h;
        }
        let l = HermMat::symmetrized(&h).min_eigenvalue()?;
        if l < worst {
            worst = l;
            worst_z = z;
        }
        points.push((z, l));
    }
    Ok(PickReport {
        pass: worst >= -tol,
        points,
        worst,
        worst_z,
    })
}

/// `n_r x n_theta` points `r e^{i theta}` with log-spaced radii in
/// `[r_min, r_max]` and angles `pi (j + 1/2) / n_theta`.
pub fn pick_grid(n_r: usize, n_theta: usize, r_min: f64, r_max: f64) -> Vec<Complex64> {
    let mut g = Vec::with_capacity(n_r * n_theta);
    let (l0, l1) = (r_min.ln(), r_max.ln());
    for i in 0..n_r {
        let t = if n_r == 1 {
            0.5
        } else {
            i as f64 / (n_r - 1) as f64
        };
        let r = (l0 + t * (l1 - l0)).exp();
        for j in 0..n_theta {
            let th = PI * (j as f64 + 0.5) / n_theta as f64;
            g.push(Complex64::from_polar(r, th));
        }
    }
    g
}

/// Default 20x20 grid over radii `[1e-3, 1e3]`.
pub fn default_pick_grid() -> Vec<Complex64> {
    pick_grid(20, 20, 1e-3, 1e3)
}

/// `z -> A(z)^{-1}` for a matrix-valued CBF `A`; a Stieltjes function
/// whenever the inverse exists.
#[derive(Clone, Debug)]
pub struct StieltjesInverse {
    rep: MvCbfRep,
}

impl StieltjesInverse {
    pub fn eval(&self, z: Complex64) -> Result<CMat> {
        let a = eval_mvcbf(&self.rep, z)?;
        let condition = condition_number(&a)?;
        if !(condition <= INVERSE_COND_LIMIT) {
            return Err(Error::Conditioning { z, condition });
        }
        a.inverse().map_err(|_| Error::Conditioning { z, condition })
    }
}

pub fn invert_to_stieltjes(rep: &MvCbfRep) -> StieltjesInverse {
    StieltjesInverse { rep: rep.clone() }
}

/// Settings for [`recover_density`].
#[derive(Clone, Debug, PartialEq)]
pub struct RecoverOptions {
    /// Decreasing sequence of distances from the cut.
    pub eps: Vec<f64>,
    pub quad: QuadratureSpec,
    /// Abscissae for the Richardson estimate of `C`.
    pub c_abscissae: (f64, f64),
    /// Endpoint shift applied when an atom sits on an endpoint.
    pub endpoint_shift: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        RecoverOptions {
            eps: alloc::vec![1e-2, 1e-3, 1e-4],
            quad: QuadratureSpec::default(),
            c_abscissae: (1e7, 1e8),
            endpoint_shift: 1e-6,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecoveredMass {
    /// Extrapolated mass `N(]a, b])`.
    pub mass: HermMat,
    /// `trace(mass)`, the scalar measure `mu(]a, b])`.
    pub trace: f64,
    /// Estimates at each `eps`.
    pub samples: Vec<(f64, HermMat)>,
    pub b_coef: CMat,
    pub c_coef: CMat,
    /// Interval actually integrated (after any endpoint shift).
    pub interval: (f64, f64),
}

/// Recovers the mass of the representing measure of `A` on `]a, b]` from
/// boundary values near the cut:
///
/// `N(]a, b]) = (1/pi) lim_{eps -> 0} int_a^b Im[A0(-s + i eps) / (s - i eps)] ds`
///
/// with `A0 = A - B - zC`, `B = A(0)` and `C` the Richardson estimate of
/// `lim A(x)/x`. The limit is taken by a least-squares line through the
/// `eps` samples.
pub fn recover_density(
    mut evaluator: impl FnMut(Complex64) -> Result<CMat>,
    a: f64,
    b: f64,
    opts: &RecoverOptions,
) -> Result<RecoveredMass> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::invalid("interval must satisfy 0 < a < b"));
    }
    if opts.eps.len() < 2 || opts.eps.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(Error::invalid("eps sequence must be positive and decreasing"));
    }
    let zero = Complex64::new(0.0, 0.0);
    let b_coef = match evaluator(zero) {
        Ok(m) => m,
        Err(Error::Domain { .. }) => evaluator(Complex64::new(1e-14, 0.0))?,
        Err(e) => return Err(e),
    };
    let (x1, x2) = opts.c_abscissae;
    let f1 = evaluator(Complex64::new(x1, 0.0))?;
    let f2 = evaluator(Complex64::new(x2, 0.0))?;
    // (x2 f(x2)/x2 - x1 f(x1)/x1) / (x2 - x1) removes the constant term
    let c_coef = (&f2 - &f1).scale_re(1.0 / (x2 - x1)).re();

    let mut reduced = |z: Complex64| -> Result<CMat> {
        let v = evaluator(z)?;
        Ok(&(&v - &b_coef) - &c_coef.scale(z))
    };

    // An atom at an endpoint makes Im A0 grow like 1/eps there. It is
    // estimated from eps * Im A0 at a tiny eps and removed analytically; the
    // endpoint is then moved by `endpoint_shift`, which decides membership
    // in the half-open interval.
    const ATOM_PROBE: f64 = 1e-8;
    let mut atom_at = |s: f64| -> Result<Option<CMat>> {
        let mut g = |e: f64| -> Result<CMat> {
            let z = Complex64::new(-s, e);
            Ok(imag_part(&reduced(z)?.scale(-z.inv())).into_cmat())
        };
        let g1 = g(1e-6)?;
        let g2 = g(ATOM_PROBE)?;
        if g2.norm_fro() > 10.0 * g1.norm_fro().max(f64::MIN_POSITIVE) {
            Ok(Some(g2.scale_re(ATOM_PROBE)))
        } else {
            Ok(None)
        }
    };
    let mut atoms: Vec<(f64, CMat)> = Vec::new();
    let mut lo = a;
    let mut hi = b;
    if let Some(m) = atom_at(a)? {
        atoms.push((a, m));
        lo = a + opts.endpoint_shift;
    }
    let mut included = CMat::zeros(b_coef.dim());
    if let Some(m) = atom_at(b)? {
        included = m.clone();
        atoms.push((b, m));
        hi = b + opts.endpoint_shift;
    }

    let mut samples = Vec::with_capacity(opts.eps.len());
    for &eps in &opts.eps {
        let r = integrate(
            |s| {
                let z = Complex64::new(-s, eps);
                let mut v = reduced(z)?;
                for (s0, m) in &atoms {
                    v -= &m.scale(z / (z + s0));
                }
                // A0(z) / (s - i eps) = -A0(z) / z
                let v = v.scale(-z.inv());
                Ok(imag_part(&v).into_cmat())
            },
            a,
            b,
            &opts.quad,
        )?;
        let total = &r.value.scale_re(1.0 / PI) + &included;
        samples.push((eps, HermMat::symmetrized(&total)));
    }

    // Successive differences must shrink for the limit to be trusted.
    let diffs: Vec<f64> = samples
        .windows(2)
        .map(|w| (w[1].1.as_cmat() - w[0].1.as_cmat()).norm_fro())
        .collect();
    let scale = samples
        .iter()
        .map(|s| s.1.as_cmat().norm_fro())
        .fold(0.0, f64::max);
    for w in diffs.windows(2) {
        if w[1] > w[0] && w[1] > 1e-9 * scale.max(1.0) {
            return Err(Error::Accuracy {
                estimate: w[1],
                requested: w[0],
            });
        }
    }

    let mass = linear_extrapolate(&samples);
    let trace = mass.as_cmat().trace().re;
    Ok(RecoveredMass {
        mass,
        trace,
        samples,
        b_coef,
        c_coef,
        interval: (lo, hi),
    })
}

/// Intercept of the least-squares line through `(eps_i, N_i)`.
fn linear_extrapolate(samples: &[(f64, HermMat)]) -> HermMat {
    let n = samples.len() as f64;
    let mean_e = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.0 - mean_e).powi(2)).sum();
    let dim = samples[0].1.dim();
    let mut out = CMat::zeros(dim);
    for (e, m) in samples {
        // intercept weights: 1/n - mean_e (e - mean_e) / sxx
        let w = 1.0 / n - mean_e * (e - mean_e) / sxx;
        out += &m.as_cmat().scale_re(w);
    }
    HermMat::symmetrized(&out)
}

/// Random representation with PSD rank-deficient coefficients, used by the
/// property tests.
pub fn random_rep(rng: &mut impl Rng, dim: usize, n_nodes: usize) -> MvCbfRep {
    fn psd(rng: &mut impl Rng, dim: usize) -> CMat {
        let v = random_real_mat(rng, dim);
        (&v.transpose() * &v).scale_re(1.0 / dim as f64)
    }
    let b = psd(rng, dim);
    let c = psd(rng, dim);
    let mut s: Vec<f64> = (0..n_nodes)
        .map(|_| 10f64.powf(rng.random_range(-2.0..2.0)))
        .collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    let nodes = s.into_iter().map(|s| Node { s, m: psd(rng, dim) }).collect();
    MvCbfRep::new(b, c, nodes).expect("PSD by construction")
}
