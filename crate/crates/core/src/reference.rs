//! Reference media used throughout the tests and as CLI defaults.

use alloc::vec;

use crate::medium::{PronyTerm, RelaxationModel, SymTensor4};
use crate::sampling::{random_orthogonal, rng};

/// Seed of the orthogonal change of basis in [`medium_b`].
pub const MEDIUM_B_SEED: u64 = 20_190_611;

/// Isotropic elastic solid with `lambda = mu = rho = 1`.
pub fn elastic_isotropic() -> RelaxationModel {
    RelaxationModel::elastic(1.0, SymTensor4::isotropic(1.0, 1.0)).expect("valid model")
}

/// Isotropic standard linear solid: `lambda = 1` elastic,
/// `mu(t) = 1 + 0.5 exp(-t)`, `rho = 1`.
///
/// Shear channel `Q_s(p) = 1 + 0.5 p/(p+1)`, longitudinal channel
/// `Q_p(p) = 3 + p/(p+1)`.
pub fn medium_a() -> RelaxationModel {
    RelaxationModel::new(
        1.0,
        SymTensor4::isotropic(1.0, 1.0),
        vec![PronyTerm {
            rate: 1.0,
            modulus: SymTensor4::isotropic(0.0, 0.5),
        }],
    )
    .expect("valid model")
}

/// Seed of the second orthogonal basis used for the Prony weight of
/// [`medium_b`].
pub const MEDIUM_B_TERM_SEED: u64 = 20_190_612;

const MEDIUM_B_SPECTRUM: [f64; 6] = [3.0, 2.5, 2.0, 1.5, 1.0, 0.8];

/// `D^T diag(spectrum) D` for a seeded orthogonal `D`.
fn rotated_spectrum(seed: u64, scale: f64) -> SymTensor4 {
    let d = random_orthogonal(&mut rng(seed), 6);
    let mut v = [[0.0; 6]; 6];
    for (a, row) in v.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            *x = scale
                * (0..6)
                    .map(|k| d[(k, a)].re * MEDIUM_B_SPECTRUM[k] * d[(k, b)].re)
                    .sum::<f64>();
        }
    }
    SymTensor4::new(v).expect("symmetric by construction")
}

/// Triclinic solid: `G_inf = D^T diag(3, 2.5, 2, 1.5, 1, 0.8) D` in Voigt
/// form with a fixed orthogonal `D`, and one term at `r_1 = 2` whose weight
/// is `0.3 E^T diag(3, 2.5, 2, 1.5, 1, 0.8) E` for a second fixed orthogonal
/// `E`. Because the weight is not proportional to `G_inf`, the attenuation
/// and phase-speed matrices do not commute in generic directions.
pub fn medium_b() -> RelaxationModel {
    RelaxationModel::new(
        1.0,
        rotated_spectrum(MEDIUM_B_SEED, 1.0),
        vec![PronyTerm {
            rate: 2.0,
            modulus: rotated_spectrum(MEDIUM_B_TERM_SEED, 0.3),
        }],
    )
    .expect("valid model")
}

/// Variant of [`medium_b`] with the weight `0.3 G_inf`. Then
/// `Q(p) = (1 + 0.3 p/(p+2)) G_inf`, so every direction has
/// frequency-independent eigenvectors.
pub fn medium_b_proportional() -> RelaxationModel {
    let g_inf = rotated_spectrum(MEDIUM_B_SEED, 1.0);
    RelaxationModel::new(
        1.0,
        g_inf,
        vec![PronyTerm {
            rate: 2.0,
            modulus: g_inf.scale(0.3),
        }],
    )
    .expect("valid model")
}

/// Medium A's equilibrium tensor with a negative definite Prony weight
/// `-0.4 G_inf` at rate 1. Strongly elliptic, but not completely monotone.
pub fn negative_weight_medium() -> RelaxationModel {
    let g = SymTensor4::isotropic(1.0, 1.0);
    RelaxationModel::new(
        1.0,
        g,
        vec![PronyTerm {
            rate: 1.0,
            modulus: g.scale(-0.4),
        }],
    )
    .expect("valid model")
}
