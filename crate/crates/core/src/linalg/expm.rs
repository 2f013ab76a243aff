#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::CMat;
use crate::{Error, Result};

// Pade [13/13] coefficients and switch-over norm from Higham (2005),
// "The scaling and squaring method for the matrix exponential revisited".
const B13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;
const MAX_SQUARINGS: i32 = 1000;

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant.
pub fn matrix_exp(m: &CMat) -> Result<CMat> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.dim();
    let norm = m.norm_one();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(Error::Range);
    }
    let a = m.scale_re(0.5f64.powi(s));
    let id = CMat::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &B13;

    let lin = |c6: f64, c4: f64, c2: f64| -> CMat {
        &(&a6.scale_re(c6) + &a4.scale_re(c4)) + &a2.scale_re(c2)
    };
    let u_inner = &(&a6 * &lin(b[13], b[11], b[9])) + &lin(b[7], b[5], b[3]);
    let u = &a * &(&u_inner + &id.scale_re(b[1]));
    let v = &(&(&a6 * &lin(b[12], b[10], b[8])) + &lin(b[6], b[4], b[2])) + &id.scale_re(b[0]);

    let mut r = (&v - &u).solve(&(&v + &u)).map_err(|_| Error::Range)?;
    for _ in 0..s {
        r = &r * &r;
        if !r.is_finite() {
            return Err(Error::Range);
        }
    }
    if !r.is_finite() {
        return Err(Error::Range);
    }
    Ok(r)
}
