//! Length-restricted dynamic Shannon coding.
//!
//! Every weight `−⌈log x⌉` the dynamic coder would use is replaced by
//!
//! ```text
//! −⌈log(2^ℓ / ((2^ℓ − 1)/x + 1/N))⌉
//! ```
//!
//! which never goes below `−(⌈log N⌉ + ℓ)`. `N` is the alphabet size, or
//! `2(d + 1)` for `d` distinct characters seen so far in distinct mode. The
//! escape leaf disappears once the whole alphabet has occurred. The coder
//! itself is [`DynamicShannonCoder::restricted`](crate::dynamic_shannon::DynamicShannonCoder::restricted).

use crate::error::{Error, Result};
use crate::math::ceil_log2_ratio;

/// Largest supported `ℓ`.
pub const MAX_ELL: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RestrictedParams {
    pub ell: u32,
    pub distinct_mode: bool,
}

impl RestrictedParams {
    pub fn new(ell: u32, distinct_mode: bool) -> Result<Self> {
        if !(1..=MAX_ELL).contains(&ell) {
            return Err(Error::InvalidParameter(format!(
                "ell must be in 1..={MAX_ELL}, got {ell}"
            )));
        }
        Ok(Self { ell, distinct_mode })
    }

    /// The `N` used in weights: `n`, or `2(distinct + 1)` in distinct mode.
    pub fn effective_n(&self, n: u32, distinct: u64) -> u64 {
        if self.distinct_mode {
            2 * (distinct + 1)
        } else {
            n as u64
        }
    }

    /// Longest codeword a repeated character can get.
    pub fn cap(&self, n: u32, distinct: u64) -> u32 {
        if self.distinct_mode {
            crate::math::ceil_log2(distinct as u128 + 1) + self.ell + 1
        } else {
            crate::math::ceil_log2(n as u128) + self.ell
        }
    }
}

/// Smoothed weight for `x = p / q ≥ 1`, computed exactly.
pub fn smooth_weight(p: u64, q: u64, big_n: u64, ell: u32) -> Result<i32> {
    if q == 0 || p < q {
        return Err(Error::FractionOutOfRange {
            num: p as u128,
            den: q as u128,
        });
    }
    if !(1..=MAX_ELL).contains(&ell) || big_n == 0 {
        return Err(Error::InvalidParameter(format!(
            "bad smoothing parameters ell={ell}, N={big_n}"
        )));
    }
    let two_l = 1u128 << ell;
    let (p, q, nn) = (p as u128, q as u128, big_n as u128);
    // 2^ℓ / ((2^ℓ−1)q/p + 1/N) = 2^ℓ·p·N / ((2^ℓ−1)·q·N + p)
    let num = two_l * p * nn;
    let den = (two_l - 1) * q * nn + p;
    Ok(-(ceil_log2_ratio(num, den) as i32))
}
