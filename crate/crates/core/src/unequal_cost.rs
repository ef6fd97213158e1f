//! Coding with unequal letter costs.
//!
//! Krause's construction: symbols sorted by non-increasing frequency get
//! points `f(a) = before(a) / m` in `[0, 1)`. Starting from `[0, 1)`, a `0`
//! keeps the first `e^(-cost0·C)` fraction of the interval and a `1` the last
//! `e^(-cost1·C)`; the codeword of `a` is the shortest walk towards `f(a)`
//! whose interval contains no other point.
//!
//! Interval endpoints are fixed point with 124 fractional bits. Encoder and
//! decoder run the same integer code, so rounding never desynchronises them;
//! membership of `f(a)` is decided exactly with 256-bit products.

use crate::bitio::{index_bits, index_width, BitSource, BitString};
use crate::codec::DynamicCoder;
use crate::error::{Error, Result};
use crate::math::{mul_frac, mul_wide};
use crate::partial_sums::FreqOrderList;

const SCALE_BITS: u32 = 124;
const ONE: u128 = 1 << SCALE_BITS;
/// Longest codeword the walk will produce before giving up.
pub const MAX_CODEWORD_BITS: usize = 1 << 14;

/// Letter costs and the matching channel capacity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    pub cost0: f64,
    pub cost1: f64,
    /// Largest real root of `e^(-cost0·x) + e^(-cost1·x) = 1`.
    pub capacity: f64,
    /// `e^(-cost0·C)` as a fraction of 2⁶⁴.
    p0: u64,
}

/// Largest real root of `e^(-cost0·x) + e^(-cost1·x) = 1`.
pub fn capacity_solve(cost0: f64, cost1: f64) -> Result<f64> {
    if !(cost0.is_finite() && cost1.is_finite() && cost0 > 0.0 && cost1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "letter costs must be positive, got ({cost0}, {cost1})"
        )));
    }
    let (c0, c1) = (cost0.min(cost1), cost0.max(cost1));
    let g = |x: f64| (-c0 * x).exp() + (-c1 * x).exp() - 1.0;
    let dg = |x: f64| -c0 * (-c0 * x).exp() - c1 * (-c1 * x).exp();
    // g decreases; g(ln2/c1) ≥ 0 ≥ g(ln2/c0)
    let (mut lo, mut hi) = (std::f64::consts::LN_2 / c1, std::f64::consts::LN_2 / c0);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x);
        if gx == 0.0 {
            return Ok(x);
        }
        if gx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - gx / dg(x);
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() < 1e-15 * x.max(1.0) || hi - lo < 1e-15 * x.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

impl CostModel {
    /// Requires `0 < cost0 ≤ cost1` and a split that is not absurdly lopsided.
    pub fn new(cost0: f64, cost1: f64) -> Result<Self> {
        if !(cost0 > 0.0 && cost0 <= cost1 && cost1.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < cost0 <= cost1, got ({cost0}, {cost1})"
            )));
        }
        let capacity = capacity_solve(cost0, cost1)?;
        let q0 = (-cost0 * capacity).exp();
        let p0 = (q0 * 2f64.powi(64)).round().clamp(1.0, u64::MAX as f64) as u64;
        let p_min = (p0 as f64).min(2f64.powi(64) - p0 as f64) / 2f64.powi(64);
        if p_min < 2f64.powi(-20) {
            return Err(Error::InvalidParameter(format!(
                "cost ratio {} is too extreme",
                cost1 / cost0
            )));
        }
        Ok(Self {
            cost0,
            cost1,
            capacity,
            p0,
        })
    }

    /// Total letter cost of a bit string.
    pub fn cost_of(&self, bits: &BitString) -> f64 {
        let ones = bits.iter().filter(|&b| b).count();
        ones as f64 * self.cost1 + (bits.len() - ones) as f64 * self.cost0
    }
}

/// Read access to symbols kept in the Krause order with cumulative counts.
pub trait CumulativeOrder {
    fn total(&self) -> u64;
    fn count_of(&self, a: u32) -> Result<u64>;
    /// Total count of the symbols ahead of `a`.
    fn before(&mut self, a: u32) -> Result<u64>;
    /// The last symbol whose `before` is at most `k`.
    fn select(&mut self, k: u64) -> Result<u32>;
}

impl CumulativeOrder for FreqOrderList {
    fn total(&self) -> u64 {
        FreqOrderList::total(self)
    }

    fn count_of(&self, a: u32) -> Result<u64> {
        self.freq_get(a)
    }

    fn before(&mut self, a: u32) -> Result<u64> {
        self.freq_before(a)
    }

    fn select(&mut self, k: u64) -> Result<u32> {
        self.freq_select(k)
    }
}

/// A frozen Krause ordering built directly from counts.
#[derive(Clone, Debug)]
pub struct SortedCounts {
    order: Vec<u32>,
    before: Vec<u64>,
    position: std::collections::HashMap<u32, usize>,
    counts: Vec<u64>,
    total: u64,
}

impl SortedCounts {
    /// `counts[a]` is the frequency of symbol `a`; zero counts are left out.
    pub fn new(counts: &[u64]) -> Self {
        let mut order: Vec<u32> = (0..counts.len() as u32)
            .filter(|&a| counts[a as usize] > 0)
            .collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(counts[a as usize]), a));
        let mut before = Vec::with_capacity(order.len());
        let mut acc = 0;
        for &a in &order {
            before.push(acc);
            acc += counts[a as usize];
        }
        let position = order.iter().enumerate().map(|(p, &a)| (a, p)).collect();
        Self {
            order,
            before,
            position,
            counts: counts.to_vec(),
            total: acc,
        }
    }

    pub fn symbols(&self) -> &[u32] {
        &self.order
    }

    fn pos(&self, a: u32) -> Result<usize> {
        self.position
            .get(&a)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("symbol {a} has no occurrences")))
    }

    /// `f(a)` as a numerator over [`CumulativeOrder::total`].
    pub fn f_numerator(&self, a: u32) -> Result<u64> {
        Ok(self.before[self.pos(a)?])
    }
}

impl CumulativeOrder for SortedCounts {
    fn total(&self) -> u64 {
        self.total
    }

    fn count_of(&self, a: u32) -> Result<u64> {
        self.pos(a).map(|_| self.counts[a as usize])
    }

    fn before(&mut self, a: u32) -> Result<u64> {
        self.f_numerator(a)
    }

    fn select(&mut self, k: u64) -> Result<u32> {
        if k >= self.total {
            return Err(Error::InvalidParameter(format!(
                "select({k}) beyond total {}",
                self.total
            )));
        }
        let p = self.before.partition_point(|&b| b <= k) - 1;
        Ok(self.order[p])
    }
}

/// Smallest integer `t` with `t · 2¹²⁴ ≥ v · m`, so `b / m ≥ v / 2¹²⁴` iff `b ≥ t`.
fn threshold(v: u128, m: u64) -> u64 {
    let (hi, lo) = mul_wide(v, m as u128);
    let q = (hi << (128 - SCALE_BITS)) | (lo >> SCALE_BITS);
    let exact = lo & (ONE - 1) == 0;
    (q + u128::from(!exact)) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Members {
    None,
    One(u32),
    Many,
}

/// Which symbols have `before` in `[lo, hi)`.
fn members<L: CumulativeOrder + ?Sized>(list: &mut L, lo: u64, hi: u64) -> Result<Members> {
    let total = list.total();
    if lo >= hi || lo >= total {
        return Ok(Members::None);
    }
    let a1 = list.select((hi - 1).min(total - 1))?;
    let b1 = list.before(a1)?;
    if b1 < lo {
        return Ok(Members::None);
    }
    if b1 == 0 {
        return Ok(Members::One(a1));
    }
    let a0 = list.select(b1 - 1)?;
    if list.before(a0)? >= lo {
        Ok(Members::Many)
    } else {
        Ok(Members::One(a1))
    }
}

/// One step of the walk: `(x, y)` after taking `bit`.
fn narrow(x: u128, y: u128, p0: u64, bit: bool) -> (u128, u128) {
    let split = x + mul_frac(y - x, p0);
    if bit {
        (split, y)
    } else {
        (x, split)
    }
}

/// Interval endpoints `(x, y)` reached by a bit string, scaled by 2¹²⁴.
pub fn interval_of(model: &CostModel, bits: &BitString) -> (u128, u128) {
    bits.iter()
        .fold((0, ONE), |(x, y), b| narrow(x, y, model.p0, b))
}

/// `ln(1 / (y − x))` for an interval from [`interval_of`].
pub fn interval_log_inverse_width(x: u128, y: u128) -> f64 {
    let w = y - x;
    SCALE_BITS as f64 * std::f64::consts::LN_2 - (w as f64).ln()
}

/// Krause codeword of a symbol present in `list`.
pub fn krause_codeword<L: CumulativeOrder + ?Sized>(
    list: &mut L,
    model: &CostModel,
    a: u32,
) -> Result<BitString> {
    let m = list.total();
    let b = list.before(a)?;
    let mut out = BitString::new();
    let (mut x, mut y) = (0u128, ONE);
    loop {
        match members(list, threshold(x, m), threshold(y, m))? {
            Members::One(s) if s == a => return Ok(out),
            Members::Many => {}
            other => unreachable!("walk lost its target: {other:?}"),
        }
        if out.len() >= MAX_CODEWORD_BITS || y - x < 2 {
            return Err(Error::InvalidParameter(
                "codeword exceeds the length limit".into(),
            ));
        }
        let split = x + mul_frac(y - x, model.p0);
        let bit = b >= threshold(split, m);
        out.push(bit);
        (x, y) = if bit { (split, y) } else { (x, split) };
    }
}

/// Reads one Krause codeword and returns its symbol.
pub fn krause_decode<L: CumulativeOrder + ?Sized>(
    list: &mut L,
    model: &CostModel,
    src: &mut dyn BitSource,
) -> Result<u32> {
    let m = list.total();
    let (mut x, mut y) = (0u128, ONE);
    let mut bits = 0;
    loop {
        match members(list, threshold(x, m), threshold(y, m))? {
            Members::One(s) => return Ok(s),
            Members::None => return Err(Error::Corrupt("codeword matches no symbol".into())),
            Members::Many => {}
        }
        if bits >= MAX_CODEWORD_BITS || y - x < 2 {
            return Err(Error::Corrupt("codeword exceeds the length limit".into()));
        }
        (x, y) = narrow(x, y, model.p0, src.read_bit()?);
        bits += 1;
    }
}

/// Dynamic Krause coder over the escape-prefixed history, computing only the
/// codeword it needs from a frequency-ordered list.
#[derive(Clone, Debug)]
pub struct KrauseCoder {
    model: CostModel,
    n: u32,
    list: FreqOrderList,
}

impl KrauseCoder {
    /// The escape is tracked as symbol `n` with a permanent count of one.
    pub fn new(n: u32, model: CostModel) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        let mut list = FreqOrderList::new(n as usize + 1);
        list.freq_increment(n)?;
        Ok(Self { model, n, list })
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    fn check(&self, s: u32) -> Result<()> {
        if s >= self.n {
            return Err(Error::SymbolOutOfRange {
                symbol: s as u64,
                alphabet: self.n as u64,
            });
        }
        Ok(())
    }
}

impl DynamicCoder for KrauseCoder {
    fn alphabet_size(&self) -> u32 {
        self.n
    }

    fn encode_symbol(&mut self, s: u32) -> Result<BitString> {
        self.check(s)?;
        let out = if self.list.contains(s) {
            krause_codeword(&mut self.list, &self.model, s)?
        } else {
            let mut out = krause_codeword(&mut self.list, &self.model, self.n)?;
            out.append(&index_bits(s as u64, self.n as u64)?);
            out
        };
        self.list.freq_increment(s)?;
        Ok(out)
    }

    fn decode_symbol(&mut self, src: &mut dyn BitSource) -> Result<u32> {
        let mut s = krause_decode(&mut self.list, &self.model, src)?;
        if s == self.n {
            s = src.read_uint(index_width(self.n as u64))? as u32;
            if s >= self.n || self.list.contains(s) {
                return Err(Error::Corrupt(format!(
                    "escape followed by invalid index {s}"
                )));
            }
        }
        self.list.freq_increment(s)?;
        Ok(s)
    }

    fn touches(&self) -> u64 {
        self.list.touches()
    }
}
