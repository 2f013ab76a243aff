//! Causal positive definiteness of relaxation tensors.
//!
//! Two routes: a sufficient time-domain test (`<e, G(t) e>` non-negative,
//! non-increasing and convex along sampled strain directions), and the
//! frequency-domain condition that `Re G~(-i w) = sum_k G_k r_k/(r_k^2 + w^2)`
//! is PSD with `G_inf` PSD. The constant `G_inf` only contributes a point
//! mass at `w = 0` to the Fourier transform, so it is checked symbolically.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use crate::linalg::{CMat, HermMat};
use crate::medium::{PronyTerm, RelaxationModel, SymTensor4};
use crate::sampling::{random_orthogonal, rng, unit_vector, SeededRng};
use crate::{Error, Result};

/// Tolerance on values and first differences.
pub const CPD_TOL: f64 = 1e-10;
/// Tolerance on second divided differences.
pub const CONVEXITY_TOL: f64 = 1e-12;

const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum Probe {
    /// A Voigt strain direction and the time where the check failed.
    Strain { direction: [f64; 6], t: f64 },
    Frequency(f64),
    /// `G_inf` itself (the `w = 0` point mass).
    Equilibrium,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub probe: Probe,
    /// Signed margin; negative beyond the tolerance means failure.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpdReport {
    pub time_domain_pass: bool,
    pub freq_domain_pass: bool,
    pub worst_margin: f64,
    /// Failing probes, worst first; at most 16.
    pub witnesses: Vec<Witness>,
}

impl CpdReport {
    pub fn pass(&self) -> bool {
        self.time_domain_pass && self.freq_domain_pass
    }
}

fn quad_form(t: &SymTensor4, e: &[f64; 6]) -> f64 {
    let v = t.voigt();
    (0..6)
        .map(|a| (0..6).map(|b| e[a] * v[a][b] * e[b]).sum::<f64>())
        .sum()
}

fn sort_witnesses(w: &mut Vec<Witness>) {
    w.sort_by(|a, b| a.margin.total_cmp(&b.margin));
    w.truncate(MAX_WITNESSES);
}

/// Time-domain test along `v_samples` random unit directions of the Voigt
/// strain space, drawn from a generator seeded with `seed`.
///
/// On the grid `t_0 < t_1 < ...` the values must be `>= -1e-10`, first
/// differences `<= 1e-10` and slopes of consecutive intervals
/// non-decreasing to within `1e-12`. The report's `freq_domain_pass` is
/// left `true`; combine with [`check_cpd_freq`] via [`check_cpd`].
pub fn check_cpd_time(
    model: &RelaxationModel,
    v_samples: usize,
    t_grid: &[f64],
    seed: u64,
) -> Result<CpdReport> {
    if t_grid.len() < 3 || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("time grid needs at least three finite points"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time grid must be strictly increasing"));
    }
    let tensors: Vec<SymTensor4> = t_grid.iter().map(|&t| model.relaxation_at(t)).collect();
    let mut r = rng(seed);
    let mut worst = f64::INFINITY;
    let mut witnesses = Vec::new();
    let mut pass = true;
    for _ in 0..v_samples {
        let v = unit_vector(&mut r, 6);
        let e = [v[0], v[1], v[2], v[3], v[4], v[5]];
        let f: Vec<f64> = tensors.iter().map(|g| quad_form(g, &e)).collect();
        let mut record = |margin: f64, t: f64, tol: f64| {
            worst = worst.min(margin);
            if margin < -tol {
                pass = false;
                witnesses.push(Witness {
                    probe: Probe::Strain { direction: e, t },
                    margin,
                });
            }
        };
        for (i, &x) in f.iter().enumerate() {
            record(x, t_grid[i], CPD_TOL);
        }
        let slopes: Vec<f64> = (0..f.len() - 1)
            .map(|i| (f[i + 1] - f[i]) / (t_grid[i + 1] - t_grid[i]))
            .collect();
        for i in 0..f.len() - 1 {
            record(f[i] - f[i + 1], t_grid[i], CPD_TOL);
        }
        for i in 0..slopes.len() - 1 {
            record(slopes[i + 1] - slopes[i], t_grid[i + 1], CONVEXITY_TOL);
        }
    }
    sort_witnesses(&mut witnesses);
    Ok(CpdReport {
        time_domain_pass: pass,
        freq_domain_pass: true,
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
        witnesses,
    })
}

fn voigt_min_eigenvalue(v: &[[f64; 6]; 6]) -> Result<f64> {
    let flat: Vec<f64> = v.iter().flatten().copied().collect();
    HermMat::symmetrized(&CMat::from_real(6, &flat)?).min_eigenvalue()
}

/// Frequency-domain test: `G_inf` PSD and `sum_k G_k r_k/(r_k^2 + w^2)` PSD
/// at every `w` of `omega_grid`. The report's `time_domain_pass` is left
/// `true`.
pub fn check_cpd_freq(model: &RelaxationModel, omega_grid: &[f64]) -> Result<CpdReport> {
    if omega_grid.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::invalid("frequencies must be positive and finite"));
    }
    let mut witnesses = Vec::new();
    let eq = voigt_min_eigenvalue(model.g_inf().voigt())?;
    let mut worst = eq;
    if eq < -CPD_TOL {
        witnesses.push(Witness {
            probe: Probe::Equilibrium,
            margin: eq,
        });
    }
    for &w in omega_grid {
        let mut v = [[0.0; 6]; 6];
        for t in model.terms() {
            let f = t.rate / (t.rate * t.rate + w * w);
            for (x, g) in v.iter_mut().flatten().zip(t.modulus.voigt().iter().flatten()) {
                *x += f * g;
            }
        }
        let m = voigt_min_eigenvalue(&v)?;
        worst = worst.min(m);
        if m < -CPD_TOL {
            witnesses.push(Witness {
                probe: Probe::Frequency(w),
                margin: m,
            });
        }
    }
    sort_witnesses(&mut witnesses);
    Ok(CpdReport {
        time_domain_pass: true,
        freq_domain_pass: witnesses.is_empty(),
        worst_margin: worst,
        witnesses,
    })
}

/// Both checks, with witnesses merged.
pub fn check_cpd(
    model: &RelaxationModel,
    v_samples: usize,
    t_grid: &[f64],
    omega_grid: &[f64],
    seed: u64,
) -> Result<CpdReport> {
    let t = check_cpd_time(model, v_samples, t_grid, seed)?;
    let f = check_cpd_freq(model, omega_grid)?;
    let mut witnesses = t.witnesses;
    witnesses.extend(f.witnesses);
    sort_witnesses(&mut witnesses);
    Ok(CpdReport {
        time_domain_pass: t.time_domain_pass,
        freq_domain_pass: f.freq_domain_pass,
        worst_margin: t.worst_margin.min(f.worst_margin),
        witnesses,
    })
}

/// `n` points from 0 to `10 / min r_k` (to 1 for elastic media).
pub fn default_t_grid(model: &RelaxationModel, n: usize) -> Vec<f64> {
    let end = model.min_rate().map_or(1.0, |r| 10.0 / r);
    let n = n.max(3);
    (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect()
}

/// `n` log-spaced frequencies in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Kind of Prony weight drawn by [`random_model`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// PSD weights (completely monotone relaxation).
    Psd,
    /// One negative definite weight and no other terms.
    NegativeDefinite,
    /// One weight with three negative eigenvalues and no other terms.
    Indefinite,
}

fn spectral(r: &mut SeededRng, eig: &[f64; 6]) -> SymTensor4 {
    let d = random_orthogonal(r, 6);
    let mut v = [[0.0; 6]; 6];
    for (a, row) in v.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = (0..6).map(|k| d[(k, a)].re * eig[k] * d[(k, b)].re).sum();
        }
    }
    // symmetric up to rounding; average it out
    for a in 0..6 {
        for b in 0..a {
            let m = 0.5 * (v[a][b] + v[b][a]);
            v[a][b] = m;
            v[b][a] = m;
        }
    }
    SymTensor4::new(v).expect("symmetric")
}

/// A random Prony model with positive definite `G_inf` (Voigt eigenvalues
/// in `[0.5, 3]`) and 1 to 3 terms with rates in `[0.1, 10]`.
pub fn random_model(seed: u64, kind: WeightKind) -> RelaxationModel {
    let mut r = rng(seed);
    let eig = |r: &mut SeededRng, lo: f64, hi: f64| -> [f64; 6] {
        [0; 6].map(|_| lo + (hi - lo) * r.random::<f64>())
    };
    let ge = eig(&mut r, 0.5, 3.0);
    let g_inf = spectral(&mut r, &ge);
    let n_terms = match kind {
        WeightKind::Psd => r.random_range(1..=3),
        _ => 1,
    };
    let mut terms = Vec::new();
    let mut rates: Vec<f64> = Vec::new();
    while rates.len() < n_terms {
        let rate = (0.1f64.ln() + (100f64).ln() * r.random::<f64>()).exp();
        if rates.iter().all(|x| (x - rate).abs() > 1e-3) {
            rates.push(rate);
        }
    }
    for rate in rates {
        let mut e = eig(&mut r, 0.05, 1.0);
        match kind {
            WeightKind::Psd => {}
            WeightKind::NegativeDefinite => e.iter_mut().for_each(|x| *x = -0.4 * *x),
            WeightKind::Indefinite => e[..3].iter_mut().for_each(|x| *x = -*x),
        }
        terms.push(PronyTerm {
            rate,
            modulus: spectral(&mut r, &e),
        });
    }
    RelaxationModel::new(1.0, g_inf, terms).expect("valid structure")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{elastic_isotropic, medium_a, medium_b, negative_weight_medium};

    fn run(model: &RelaxationModel) -> CpdReport {
        check_cpd(
            model,
            64,
            &default_t_grid(model, 200),
            &log_grid(1e-3, 1e3, 30),
            7,
        )
        .unwrap()
    }

    #[test]
    fn reference_media_pass() {
        for m in [elastic_isotropic(), medium_a(), medium_b()] {
            let r = run(&m);
            assert!(r.pass(), "{r:?}");
            assert!(r.witnesses.is_empty());
            assert!(r.worst_margin.is_finite());
        }
    }

    #[test]
    fn elastic_margin_is_exact() {
        let r = check_cpd_time(&elastic_isotropic(), 10, &[0.0, 1.0, 2.0], 1).unwrap();
        assert!(r.time_domain_pass);
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn negative_weight_fails_both() {
        let r = run(&negative_weight_medium());
        assert!(!r.time_domain_pass && !r.freq_domain_pass);
        assert!(!r.witnesses.is_empty() && r.witnesses.len() <= MAX_WITNESSES);
        assert!(r.witnesses.windows(2).all(|w| w[0].margin <= w[1].margin));
        let f = check_cpd_freq(&negative_weight_medium(), &[1e-3]).unwrap();
        assert!(matches!(f.witnesses[0].probe, Probe::Frequency(_)));
    }

    #[test]
    fn bad_grids_are_rejected() {
        let m = medium_a();
        assert!(check_cpd_time(&m, 4, &[0.0, 1.0], 0).is_err());
        assert!(check_cpd_time(&m, 4, &[0.0, 2.0, 1.0], 0).is_err());
        assert!(check_cpd_freq(&m, &[1.0, -1.0]).is_err());
    }

    #[test]
    fn generated_models_respect_implication() {
        for seed in 0..12 {
            for kind in [WeightKind::Psd, WeightKind::NegativeDefinite, WeightKind::Indefinite] {
                let m = random_model(seed, kind);
                let r = run(&m);
                if r.time_domain_pass {
                    assert!(r.freq_domain_pass, "seed {seed} {kind:?}");
                }
                match kind {
                    WeightKind::Psd => assert!(r.pass()),
                    _ => assert!(!r.freq_domain_pass),
                }
            }
        }
    }
}
