//! Small exact-arithmetic helpers shared by the coders.

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: u128) -> u32 {
    assert!(x >= 1, "ceil_log2 of zero");
    if x == 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// `⌈log₂(num / den)⌉` for `num ≥ den ≥ 1` and `num < 2¹²⁷`, decided by integer comparison.
pub fn ceil_log2_ratio(num: u128, den: u128) -> u32 {
    assert!(den >= 1 && num >= den, "ratio {num}/{den} is below one");
    assert!(num < 1 << 127, "ratio numerator too large");
    let k = (128 - num.leading_zeros()) - (128 - den.leading_zeros());
    // den·2ᵏ has the bit length of num, so the answer is k or k + 1.
    if den << k >= num {
        k
    } else {
        k + 1
    }
}

/// Full 256-bit product `a·b` as `(high, low)` halves.
pub fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let low = (ll & MASK) | (mid << 64);
    let high = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (high, low)
}

/// `⌊w · frac / 2⁶⁴⌋` without overflow.
pub fn mul_frac(w: u128, frac: u64) -> u128 {
    let f = frac as u128;
    (w >> 64) * f + (((w & u64::MAX as u128) * f) >> 64)
}

/// Compensated (Neumaier) sum of an iterator of floats.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
