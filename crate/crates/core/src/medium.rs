//! Viscoelastic media with Prony-series relaxation tensors.
//!
//! Fourth-order tensors with the usual minor and major symmetries are stored
//! as 6x6 Voigt matrices using the factor-free mapping
//! `11 -> 0, 22 -> 1, 33 -> 2, 23 -> 3, 13 -> 4, 12 -> 5`, so
//! `G_ijkl = V[voigt(i, j)][voigt(k, l)]` with no factors of 2.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::linalg::{CMat, HermMat};
use crate::{Error, Result};

const VOIGT: [[usize; 3]; 3] = [[0, 5, 4], [5, 1, 3], [4, 3, 2]];

/// Voigt index of the symmetric index pair `(i, j)`.
pub fn voigt(i: usize, j: usize) -> usize {
    VOIGT[i][j]
}

/// The index pair `(i, j)` with `i <= j` of a Voigt index.
pub fn voigt_pair(a: usize) -> (usize, usize) {
    [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)][a]
}

pub type Full4 = [[[[f64; 3]; 3]; 3]; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Real fourth-order tensor with minor and major symmetries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymTensor4 {
    voigt: [[f64; 6]; 6],
}

impl SymTensor4 {
    /// Accepts a Voigt matrix that is symmetric to `1e-12` relative.
    pub fn new(voigt: [[f64; 6]; 6]) -> Result<Self> {
        let mut scale: f64 = 0.0;
        for row in &voigt {
            for x in row {
                if !x.is_finite() {
                    return Err(Error::NonFinite);
                }
                scale = scale.max(x.abs());
            }
        }
        let mut defect: f64 = 0.0;
        for (a, row) in voigt.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                defect = defect.max((x - voigt[b][a]).abs());
            }
        }
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian { defect });
        }
        let mut v = voigt;
        for a in 0..6 {
            for b in a + 1..6 {
                let m = 0.5 * (v[a][b] + v[b][a]);
                v[a][b] = m;
                v[b][a] = m;
            }
        }
        Ok(SymTensor4 { voigt: v })
    }

    pub fn zero() -> Self {
        SymTensor4 {
            voigt: [[0.0; 6]; 6],
        }
    }

    /// `G_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk)`.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        let mut v = [[0.0; 6]; 6];
        for (a, row) in v.iter_mut().enumerate().take(3) {
            for x in row.iter_mut().take(3) {
                *x = lambda;
            }
            row[a] += 2.0 * mu;
        }
        for (a, row) in v.iter_mut().enumerate().skip(3) {
            row[a] = mu;
        }
        SymTensor4 { voigt: v }
    }

    pub fn voigt(&self) -> &[[f64; 6]; 6] {
        &self.voigt
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.voigt[voigt(i, j)][voigt(k, l)]
    }

    pub fn to_full(&self) -> Full4 {
        let mut t = [[[[0.0; 3]; 3]; 3]; 3];
        for (i, ti) in t.iter_mut().enumerate() {
            for (j, tij) in ti.iter_mut().enumerate() {
                for (k, tijk) in tij.iter_mut().enumerate() {
                    for (l, x) in tijk.iter_mut().enumerate() {
                        *x = self.get(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// Inverse of [`to_full`](Self::to_full); fails when the full tensor
    /// lacks the index symmetries (tolerance `1e-12` relative).
    pub fn from_full(t: &Full4) -> Result<Self> {
        let mut scale: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        scale = scale.max(t[i][j][k][l].abs());
                    }
                }
            }
        }
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let x = t[i][j][k][l];
                        defect = defect
                            .max((x - t[j][i][k][l]).abs())
                            .max((x - t[i][j][l][k]).abs())
                            .max((x - t[k][l][i][j]).abs());
                    }
                }
            }
        }
        if defect > 1e-12 * scale {
            return Err(Error::NotHermitian { defect });
        }
        let mut v = [[0.0; 6]; 6];
        for (a, row) in v.iter_mut().enumerate() {
            let (i, j) = voigt_pair(a);
            for (b, x) in row.iter_mut().enumerate() {
                let (k, l) = voigt_pair(b);
                *x = t[i][j][k][l];
            }
        }
        Self::new(v)
    }

    /// `G'_ijkl = R_ia R_jb R_kc R_ld G_abcd`.
    pub fn rotate(&self, r: &Mat3) -> Self {
        let g = self.to_full();
        // contract one index at a time
        let mut t1 = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        t1[i][b][c][d] = (0..3).map(|a| r[i][a] * g[a][b][c][d]).sum();
                    }
                }
            }
        }
        let mut t2 = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        t2[i][j][c][d] = (0..3).map(|b| r[j][b] * t1[i][b][c][d]).sum();
                    }
                }
            }
        }
        let mut v = [[0.0; 6]; 6];
        for (x, row) in v.iter_mut().enumerate() {
            let (i, j) = voigt_pair(x);
            for (y, out) in row.iter_mut().enumerate() {
                let (k, l) = voigt_pair(y);
                let mut s = 0.0;
                for c in 0..3 {
                    for d in 0..3 {
                        s += r[k][c] * r[l][d] * t2[i][j][c][d];
                    }
                }
                *out = s;
            }
        }
        // symmetrize away rounding
        for a in 0..6 {
            for b in a + 1..6 {
                let m = 0.5 * (v[a][b] + v[b][a]);
                v[a][b] = m;
                v[b][a] = m;
            }
        }
        SymTensor4 { voigt: v }
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut v = self.voigt;
        for x in v.iter_mut().flatten() {
            *x *= c;
        }
        SymTensor4 { voigt: v }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.voigt;
        for (x, y) in v.iter_mut().flatten().zip(other.voigt.iter().flatten()) {
            *x += y;
        }
        SymTensor4 { voigt: v }
    }

    pub fn to_complex(&self) -> CSymTensor4 {
        let mut v = [[Complex64::new(0.0, 0.0); 6]; 6];
        for (x, y) in v.iter_mut().flatten().zip(self.voigt.iter().flatten()) {
            *x = Complex64::new(*y, 0.0);
        }
        CSymTensor4 { voigt: v }
    }

    /// The Voigt matrix as a (Hermitian) complex matrix.
    pub fn voigt_herm(&self) -> HermMat {
        HermMat::symmetrized(&CMat::from_fn(6, |a, b| Complex64::new(self.voigt[a][b], 0.0)))
    }

    /// Smallest eigenvalue of the Voigt matrix.
    pub fn min_voigt_eigenvalue(&self) -> Result<f64> {
        self.voigt_herm().min_eigenvalue()
    }

    /// `(G_n)_ir = G_ijrs n_j n_s`.
    pub fn contract(&self, n: &[f64; 3]) -> Mat3 {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (r, x) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for j in 0..3 {
                    for k in 0..3 {
                        s += self.get(i, j, r, k) * n[j] * n[k];
                    }
                }
                *x = s;
            }
        }
        m
    }
}

/// Complex fourth-order tensor with the symmetries of [`SymTensor4`]
/// (complex symmetric, not Hermitian, Voigt matrix).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CSymTensor4 {
    voigt: [[Complex64; 6]; 6],
}

impl CSymTensor4 {
    pub fn voigt(&self) -> &[[Complex64; 6]; 6] {
        &self.voigt
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.voigt[voigt(i, j)][voigt(k, l)]
    }

    pub fn real_part(&self) -> [[f64; 6]; 6] {
        let mut v = [[0.0; 6]; 6];
        for (x, y) in v.iter_mut().flatten().zip(self.voigt.iter().flatten()) {
            *x = y.re;
        }
        v
    }

    pub fn imag_part(&self) -> [[f64; 6]; 6] {
        let mut v = [[0.0; 6]; 6];
        for (x, y) in v.iter_mut().flatten().zip(self.voigt.iter().flatten()) {
            *x = y.im;
        }
        v
    }

    /// `M_ir = Q_ijrs k_j k_s` for a possibly complex vector `k`.
    pub fn contract(&self, k: &[Complex64; 3]) -> CMat {
        CMat::from_fn(3, |i, r| {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..3 {
                for l in 0..3 {
                    s += self.get(i, j, r, l) * k[j] * k[l];
                }
            }
            s
        })
    }

    pub fn contract_real(&self, n: &[f64; 3]) -> CMat {
        let k = n.map(|x| Complex64::new(x, 0.0));
        self.contract(&k)
    }
}

/// One Prony term `G_k exp(-r_k t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PronyTerm {
    pub rate: f64,
    pub modulus: SymTensor4,
}

/// Density and relaxation tensor `G(t) = G_inf + sum_k G_k exp(-r_k t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationModel {
    rho: f64,
    g_inf: SymTensor4,
    terms: Vec<PronyTerm>,
}

/// Tolerance for the per-term PSD test.
pub const PSD_TOL: f64 = 1e-10;

impl RelaxationModel {
    /// Checks the structural requirements: positive finite density and
    /// strictly positive, pairwise distinct rates. Terms are sorted by rate.
    ///
    /// Admissibility (PSD weights, strong ellipticity) is a separate check,
    /// see [`RelaxationModel::check_admissible`], so that inadmissible media
    /// can still be built and diagnosed.
    pub fn new(rho: f64, g_inf: SymTensor4, mut terms: Vec<PronyTerm>) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::invalid("density must be positive and finite"));
        }
        for t in &terms {
            if !(t.rate.is_finite() && t.rate > 0.0) {
                return Err(Error::invalid("relaxation rates must be positive and finite"));
            }
        }
        terms.sort_by(|a, b| a.rate.total_cmp(&b.rate));
        if terms.windows(2).any(|w| w[0].rate == w[1].rate) {
            return Err(Error::invalid("relaxation rates must be distinct"));
        }
        Ok(RelaxationModel { rho, g_inf, terms })
    }

    pub fn elastic(rho: f64, g: SymTensor4) -> Result<Self> {
        Self::new(rho, g, Vec::new())
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn g_inf(&self) -> &SymTensor4 {
        &self.g_inf
    }

    pub fn terms(&self) -> &[PronyTerm] {
        &self.terms
    }

    pub fn is_elastic(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_rate(&self) -> Option<f64> {
        self.terms.first().map(|t| t.rate)
    }

    /// Instantaneous modulus `G_inf + sum_k G_k`.
    pub fn g_zero(&self) -> SymTensor4 {
        self.terms
            .iter()
            .fold(self.g_inf, |acc, t| acc.add(&t.modulus))
    }

    /// `G(t)`; intended for `t >= 0`.
    pub fn relaxation_at(&self, t: f64) -> SymTensor4 {
        self.terms
            .iter()
            .fold(self.g_inf, |acc, k| acc.add(&k.modulus.scale((-k.rate * t).exp())))
    }

    /// `Q(p) = G_inf + sum_k G_k p / (p + r_k)`.
    pub fn q_of_p(&self, p: Complex64) -> Result<CSymTensor4> {
        check_off_cut(p)?;
        let mut v = self.g_inf.to_complex().voigt;
        for t in &self.terms {
            let den = p + t.rate;
            if den.norm() <= 1e-14 * (1.0 + t.rate) {
                return Err(Error::Domain {
                    z: p,
                    reason: "pole of the relaxation spectrum",
                });
            }
            let w = p / den;
            for (x, g) in v.iter_mut().flatten().zip(t.modulus.voigt.iter().flatten()) {
                *x += w * g;
            }
        }
        Ok(CSymTensor4 { voigt: v })
    }

    /// Acoustic tensor `(Q_n)_ir = Q_ijrs(p) n_j n_s`.
    pub fn acoustic_tensor(&self, n: &[f64; 3], p: Complex64) -> Result<CMat> {
        check_unit(n)?;
        Ok(self.q_of_p(p)?.contract_real(n))
    }

    /// The same model seen in a frame rotated by `r`.
    pub fn rotated(&self, r: &Mat3) -> Self {
        RelaxationModel {
            rho: self.rho,
            g_inf: self.g_inf.rotate(r),
            terms: self
                .terms
                .iter()
                .map(|t| PronyTerm {
                    rate: t.rate,
                    modulus: t.modulus.rotate(r),
                })
                .collect(),
        }
    }

    /// Per-term PSD test and strong ellipticity of `G_inf` over `directions`.
    pub fn check_admissible(&self, directions: &[[f64; 3]]) -> Result<Admissibility> {
        let mut term_min_eigenvalues = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            term_min_eigenvalues.push(t.modulus.min_voigt_eigenvalue()?);
        }
        let ellipticity = check_strong_ellipticity(self, directions)?;
        let terms_psd = term_min_eigenvalues.iter().all(|&l| l >= -PSD_TOL);
        Ok(Admissibility {
            pass: terms_psd && ellipticity.pass,
            term_min_eigenvalues,
            ellipticity,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Admissibility {
    pub pass: bool,
    pub term_min_eigenvalues: Vec<f64>,
    pub ellipticity: EllipticityReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticityReport {
    pub pass: bool,
    pub min_eigenvalue: f64,
    pub worst_direction: [f64; 3],
    pub directions_tested: usize,
}

/// Smallest eigenvalue of `G_inf_n` over the direction set; passes iff it
/// is strictly positive.
pub fn check_strong_ellipticity(
    model: &RelaxationModel,
    directions: &[[f64; 3]],
) -> Result<EllipticityReport> {
    if directions.is_empty() {
        return Err(Error::invalid("direction set is empty"));
    }
    let mut min = f64::INFINITY;
    let mut worst = directions[0];
    for n in directions {
        check_unit(n)?;
        let g = model.g_inf.contract(n);
        let m = CMat::from_fn(3, |i, j| Complex64::new(g[i][j], 0.0));
        let l = HermMat::symmetrized(&m).min_eigenvalue()?;
        if l < min {
            min = l;
            worst = *n;
        }
    }
    Ok(EllipticityReport {
        pass: min > 0.0,
        min_eigenvalue: min,
        worst_direction: worst,
        directions_tested: directions.len(),
    })
}

/// Rejects `z` on `]-inf, 0]`, including `|arg z - pi| < 1e-9`.
pub fn check_off_cut(z: Complex64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain {
            z,
            reason: "zero lies on the branch cut",
        });
    }
    if PI - z.arg().abs() < 1e-9 {
        return Err(Error::Domain {
            z,
            reason: "argument on the negative real axis",
        });
    }
    Ok(())
}

pub(crate) fn check_unit(n: &[f64; 3]) -> Result<()> {
    let norm2 = n.iter().map(|x| x * x).sum::<f64>();
    if !((norm2.sqrt() - 1.0).abs() <= 1e-12) {
        return Err(Error::invalid("direction is not a unit vector"));
    }
    Ok(())
}

/// Normalizes a nonzero vector.
pub fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Vertices of the icosahedron subdivided `level` times and projected to
/// the unit sphere: 12, 42, 162, 642, ... points in a fixed order.
pub fn icosphere(level: u32) -> Vec<[f64; 3]> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|&v| unit(v))
    .collect();
    let mut faces: Vec<[usize; 3]> = alloc::vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut cache: alloc::collections::BTreeMap<(usize, usize), usize> = Default::default();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    verts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_rotation, random_real_mat, rng, unit_vector3};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn medium_a() -> RelaxationModel {
        crate::reference::medium_a()
    }

    fn random_sym_tensor(seed: u64) -> SymTensor4 {
        let mut r = rng(seed);
        let m = random_real_mat(&mut r, 6);
        let mut v = [[0.0; 6]; 6];
        for a in 0..6 {
            for b in 0..6 {
                v[a][b] = m[(a, b)].re + m[(b, a)].re;
            }
        }
        SymTensor4::new(v).unwrap()
    }

    #[test]
    fn isotropic_components() {
        let g = SymTensor4::isotropic(1.0, 1.0);
        assert_eq!(g.get(0, 0, 0, 0), 3.0);
        assert_eq!(g.get(0, 0, 1, 1), 1.0);
        assert_eq!(g.get(1, 2, 1, 2), 1.0);
        assert_eq!(g.get(1, 2, 2, 1), 1.0);
        assert_eq!(g.get(0, 1, 1, 2), 0.0);
        // against the defining formula
        let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let (lam, mu) = (0.7, 1.3);
        let g = SymTensor4::isotropic(lam, mu);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let e = lam * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                        assert_eq!(g.get(i, j, k, l), e);
                    }
                }
            }
        }
    }

    #[test]
    fn voigt_round_trip_is_exact() {
        for seed in 0..10 {
            let g = random_sym_tensor(seed);
            let back = SymTensor4::from_full(&g.to_full()).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn asymmetric_voigt_is_rejected() {
        let mut v = [[0.0; 6]; 6];
        v[0][1] = 1.0;
        assert!(SymTensor4::new(v).is_err());
        let mut t = SymTensor4::isotropic(1.0, 1.0).to_full();
        t[0][1][2][2] += 0.5;
        assert!(SymTensor4::from_full(&t).is_err());
    }

    #[test]
    fn rotation_preserves_isotropy() {
        let mut r = rng(9);
        let g = SymTensor4::isotropic(2.0, 0.5);
        for _ in 0..5 {
            let rot = random_rotation(&mut r);
            let h = g.rotate(&rot);
            for (x, y) in h.voigt().iter().flatten().zip(g.voigt().iter().flatten()) {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn q_limits_and_reference_values() {
        let m = medium_a();
        let q0 = m.q_of_p(c(1e-12)).unwrap();
        let qinf = m.q_of_p(c(1e12)).unwrap();
        let g0 = m.g_zero();
        for a in 0..6 {
            for b in 0..6 {
                assert!((q0.voigt()[a][b] - m.g_inf().voigt()[a][b]).norm() < 1e-11);
                assert!((qinf.voigt()[a][b] - g0.voigt()[a][b]).norm() < 1e-11);
            }
        }
        let q1 = m.q_of_p(c(1.0)).unwrap();
        assert!((q1.get(1, 2, 1, 2) - 1.25).norm() < 1e-15);
        assert!((q1.get(0, 0, 0, 0) - 3.5).norm() < 1e-15);
    }

    #[test]
    fn q_rejects_cut_and_poles() {
        let m = medium_a();
        assert!(matches!(m.q_of_p(c(-1.0)), Err(Error::Domain { .. })));
        assert!(matches!(m.q_of_p(c(0.0)), Err(Error::Domain { .. })));
        assert!(m.q_of_p(Complex64::new(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn acoustic_tensor_examples() {
        let e1 = [1.0, 0.0, 0.0];
        let el = RelaxationModel::elastic(1.0, SymTensor4::isotropic(1.0, 1.0)).unwrap();
        let q = el.acoustic_tensor(&e1, c(2.0)).unwrap();
        assert!((&q - &CMat::from_real_diag(&[3.0, 1.0, 1.0])).max_abs() < 1e-15);

        let q = medium_a().acoustic_tensor(&e1, c(1.0)).unwrap();
        assert!((&q - &CMat::from_real_diag(&[3.5, 1.25, 1.25])).max_abs() < 1e-15);

        assert!(el.acoustic_tensor(&[1.0, 1.0, 0.0], c(1.0)).is_err());
    }

    #[test]
    fn acoustic_tensor_is_rotation_equivariant() {
        let mut r = rng(77);
        let model = crate::reference::medium_b();
        for _ in 0..10 {
            let rot = random_rotation(&mut r);
            let n = unit_vector3(&mut r);
            let p = Complex64::new(0.3, 1.7);
            let rn = [0, 1, 2].map(|i| (0..3).map(|j| rot[i][j] * n[j]).sum::<f64>());
            let lhs = model.rotated(&rot).acoustic_tensor(&rn, p).unwrap();
            let rm = CMat::from_fn(3, |i, j| c(rot[i][j]));
            let rhs = &(&rm * &model.acoustic_tensor(&n, p).unwrap()) * &rm.transpose();
            assert!((&lhs - &rhs).max_abs() < 1e-12 * rhs.max_abs());
        }
    }

    #[test]
    fn strong_ellipticity_examples() {
        let dirs = icosphere(1);
        let iso = RelaxationModel::elastic(1.0, SymTensor4::isotropic(1.0, 1.0)).unwrap();
        let rep = check_strong_ellipticity(&iso, &dirs).unwrap();
        assert!(rep.pass);
        assert!((rep.min_eigenvalue - 1.0).abs() < 1e-12);

        let deg = RelaxationModel::elastic(1.0, SymTensor4::isotropic(1.0, 0.0)).unwrap();
        assert!(!check_strong_ellipticity(&deg, &dirs).unwrap().pass);

        let rep = check_strong_ellipticity(&crate::reference::medium_b(), &icosphere(2)).unwrap();
        assert!(rep.pass && rep.min_eigenvalue > 0.1);
        assert_eq!(rep.directions_tested, 162);
    }

    #[test]
    fn relaxation_modulus_limits() {
        let m = medium_a();
        assert_eq!(m.relaxation_at(0.0), m.g_zero());
        let late = m.relaxation_at(1e3);
        assert_eq!(&late, m.g_inf());
    }

    #[test]
    fn icosphere_counts_and_norms() {
        for (level, count) in [(0, 12), (1, 42), (2, 162), (3, 642)] {
            let v = icosphere(level);
            assert_eq!(v.len(), count);
            for p in &v {
                let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
                assert!((n - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn model_structure_checks() {
        let g = SymTensor4::isotropic(1.0, 1.0);
        assert!(RelaxationModel::new(0.0, g, Vec::new()).is_err());
        let t = PronyTerm { rate: 1.0, modulus: g };
        assert!(RelaxationModel::new(1.0, g, alloc::vec![t, t]).is_err());
        let bad = PronyTerm { rate: -1.0, modulus: g };
        assert!(RelaxationModel::new(1.0, g, alloc::vec![bad]).is_err());
    }

    #[test]
    fn admissibility_flags_negative_weight() {
        let dirs = icosphere(1);
        assert!(medium_a().check_admissible(&dirs).unwrap().pass);
        let neg = crate::reference::negative_weight_medium();
        let rep = neg.check_admissible(&dirs).unwrap();
        assert!(!rep.pass);
        assert!(rep.term_min_eigenvalues[0] < 0.0);
    }
}
