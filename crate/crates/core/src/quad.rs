//! Adaptive Gauss-Kronrod quadrature for scalar and matrix integrands, and
//! Gauss-Legendre rules.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::linalg::CMat;
use crate::{Error, Result};

/// Values that can be integrated: a normed vector space over the reals.
pub trait QuadValue: Clone {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
    fn norm(&self) -> f64;
}

impl QuadValue for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
}

impl QuadValue for CMat {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn scale(&self, c: f64) -> Self {
        self.scale_re(c)
    }
    fn norm(&self) -> f64 {
        self.norm_fro()
    }
}

/// Accuracy request for [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub intervals: usize,
}

// Kronrod 15-point nodes (positive half) and weights; Gauss 7-point weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<T: QuadValue>(
    f: &mut impl FnMut(f64) -> Result<T>,
    a: f64,
    b: f64,
) -> Result<(T, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        let s = f1.add(&f2);
        kron = kron.add(&s.scale(WGK[j]));
        // Gauss nodes are the odd-indexed Kronrod nodes
        if j % 2 == 1 {
            gauss = gauss.add(&s.scale(WG[j / 2]));
        }
    }
    let kron = kron.scale(h);
    let gauss = gauss.scale(h);
    let err = kron.sub(&gauss).norm();
    Ok((kron, err))
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive 7/15-point Gauss-Kronrod integration over `[a, b]`.
///
/// Panels are bisected in order of decreasing error estimate until the total
/// estimate is below `max(abs_tol, rel_tol * |I|)`.
pub fn integrate<T: QuadValue>(
    mut f: impl FnMut(f64) -> Result<T>,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("integration limits must be finite"));
    }
    let (v0, e0) = gk15(&mut f, a, b)?;
    let mut total = v0.clone();
    let mut total_err = e0;
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v0,
        err: e0,
    });
    let mut count = 1;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * total.norm());
        if total_err <= target {
            break;
        }
        if count >= spec.max_intervals {
            return Err(Error::Accuracy {
                estimate: total_err,
                requested: target,
            });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.a + worst.b);
        let (vl, el) = gk15(&mut f, worst.a, mid)?;
        let (vr, er) = gk15(&mut f, mid, worst.b)?;
        total = total.sub(&worst.value).add(&vl).add(&vr);
        total_err += el + er - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: vl,
            err: el,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: vr,
            err: er,
        });
        count += 1;
        // rebuild the sum now and then to shed cancellation drift
        if count % 64 == 0 {
            let mut it = heap.iter();
            let first = it.next().expect("non-empty");
            let mut s = first.value.clone();
            let mut e = first.err;
            for p in it {
                s = s.add(&p.value);
                e += p.err;
            }
            total = s;
            total_err = e;
        }
    }
    Ok(QuadResult {
        value: total,
        error_estimate: total_err,
        intervals: count,
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let r = integrate(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert!((r.value - 0.0).abs() < 1e-14);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn resolves_a_narrow_lorentzian() {
        let eps = 1e-4;
        let r = integrate(
            |s: f64| Ok(eps / ((1.0 - s).powi(2) + eps * eps)),
            0.5,
            1.7,
            &QuadratureSpec::default(),
        )
        .unwrap();
        let exact = (0.5f64 / eps).atan() + (0.7f64 / eps).atan();
        assert!((r.value - exact).abs() < 1e-9);
    }

    #[test]
    fn reports_unreachable_accuracy() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 0.0,
            max_intervals: 5,
        };
        let r = integrate(|x: f64| Ok(x.abs().sqrt()), -1.0, 1.0, &spec);
        assert!(matches!(r, Err(Error::Accuracy { .. })));
    }

    #[test]
    fn gauss_legendre_weights_and_moments() {
        for n in [1, 2, 5, 16, 40] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // exact for degree 2n - 1
            let deg = 2 * n - 2;
            let moment: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((moment - 2.0 / (deg as f64 + 1.0)).abs() < 1e-12);
        }
    }
}
