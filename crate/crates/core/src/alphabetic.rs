//! Alphabetic coding with Mehlhorn's construction.
//!
//! With counts `#` over a history of length `m` and alphabet `a₀ < ⋯ < a_{n−1}`,
//!
//! ```text
//! f(aⱼ) = (#aⱼ + 1) / 2(m+n) + Σ_{k<j} (#aₖ + 1) / (m+n)
//! ```
//!
//! and the codeword of `aⱼ` is the first `⌈log((m+n)/(#aⱼ+1))⌉ + 1` bits of
//! `f(aⱼ)`. Every f-value is a numerator over `2(m+n)`, so all arithmetic is
//! exact.

use crate::bitio::{fraction_prefix, BitSource, BitString};
use crate::codec::DynamicCoder;
use crate::error::{Error, Result};
use crate::math::{ceil_log2, ceil_log2_ratio};
use crate::partial_sums::AlphaSumTree;

/// Numerator of `f(a)` over `2(m+n)`, given the total count `cum` of the
/// symbols before `a`, the index of `a`, and its count.
pub fn mehlhorn_numerator(cum: u64, index: u64, count: u64) -> u128 {
    2 * (cum as u128 + index as u128) + count as u128 + 1
}

/// Codeword length for a symbol with `count` occurrences when `d = m + n`.
pub fn mehlhorn_length(d: u64, count: u64) -> u32 {
    ceil_log2_ratio(d as u128, count as u128 + 1) + 1
}

/// `f(a)` as `(numerator, denominator)`.
pub fn mehlhorn_f(counts: &[u64], a: u32) -> Result<(u128, u128)> {
    let n = counts.len() as u64;
    if a as u64 >= n {
        return Err(Error::SymbolOutOfRange {
            symbol: a as u64,
            alphabet: n,
        });
    }
    let m: u64 = counts.iter().sum();
    let cum: u64 = counts[..a as usize].iter().sum();
    Ok((
        mehlhorn_numerator(cum, a as u64, counts[a as usize]),
        2 * (m + n) as u128,
    ))
}

/// Mehlhorn codeword of `a` for the given counts (`n ≥ 2`).
pub fn mehlhorn_codeword(counts: &[u64], a: u32) -> Result<BitString> {
    if counts.len() < 2 {
        return Err(Error::InvalidParameter(
            "alphabetic codes need at least two symbols".into(),
        ));
    }
    let (num, den) = mehlhorn_f(counts, a)?;
    let d = (den / 2) as u64;
    fraction_prefix(num, den, mehlhorn_length(d, counts[a as usize]) as usize)
}

/// All `n` codewords for the given counts.
pub fn mehlhorn_code(counts: &[u64]) -> Result<Vec<BitString>> {
    (0..counts.len() as u32)
        .map(|a| mehlhorn_codeword(counts, a))
        .collect()
}

/// Dynamic alphabetic coder. A splay tree over the symbols seen so far gives
/// the partial sums, so only the codeword being sent is computed.
#[derive(Clone, Debug)]
pub struct AlphabeticCoder {
    n: u32,
    processed: u64,
    tree: AlphaSumTree,
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    symbol: u32,
    cum: u64,
    count: u64,
}

impl AlphabeticCoder {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "alphabetic codes need at least two symbols".into(),
            ));
        }
        Ok(Self {
            n,
            processed: 0,
            tree: AlphaSumTree::new(),
        })
    }

    /// `m + n` for the current context.
    fn d(&self) -> u64 {
        self.processed + self.n as u64
    }

    fn update(&mut self, s: u32) {
        self.tree.insert_or_increment(s);
        self.processed += 1;
    }

    /// First symbol (present or not) with `num · 2ᵏ ≥ target`.
    fn first_at_least(&mut self, target: u128, k: u32) -> Option<Candidate> {
        let num = |cum: u64, a: u32, c: u64| mehlhorn_numerator(cum, a as u64, c);
        let part = self
            .tree
            .partition(|e| num(e.before, e.symbol, e.count) << k < target);
        let (cum, lo) = part
            .last_true
            .map_or((0, 0), |e| (e.before + e.count, e.symbol as i128 + 1));
        let hi = part
            .first_false
            .map_or(self.n as i128, |e| e.symbol as i128);
        // absent symbols between the two: 2(cum + a) + 1 ≥ ⌈target / 2ᵏ⌉
        let need = target.div_ceil(1u128 << k) as i128;
        let a = (need - 2 * cum as i128).div_euclid(2).max(lo);
        if a < hi {
            return Some(Candidate {
                symbol: a as u32,
                cum,
                count: 0,
            });
        }
        part.first_false.map(|e| Candidate {
            symbol: e.symbol,
            cum: e.before,
            count: e.count,
        })
    }
}

impl DynamicCoder for AlphabeticCoder {
    fn alphabet_size(&self) -> u32 {
        self.n
    }

    fn encode_symbol(&mut self, s: u32) -> Result<BitString> {
        if s >= self.n {
            return Err(Error::SymbolOutOfRange {
                symbol: s as u64,
                alphabet: self.n as u64,
            });
        }
        let cum = self.tree.prefix_sum(s);
        let count = self.tree.count(s);
        let d = self.d();
        let out = fraction_prefix(
            mehlhorn_numerator(cum, s as u64, count),
            2 * d as u128,
            mehlhorn_length(d, count) as usize,
        )?;
        self.update(s);
        Ok(out)
    }

    fn decode_symbol(&mut self, src: &mut dyn BitSource) -> Result<u32> {
        let d = self.d();
        let den = 2 * d as u128;
        let max_len = ceil_log2(d as u128) + 1;
        let mut x = 0u128;
        for k in 1..=max_len {
            x = (x << 1) | src.read_bit()? as u128;
            let Some(c) = self.first_at_least(x * den, k) else {
                break;
            };
            let num = mehlhorn_numerator(c.cum, c.symbol as u64, c.count);
            if num << k < (x + 1) * den && mehlhorn_length(d, c.count) == k {
                self.update(c.symbol);
                return Ok(c.symbol);
            }
        }
        Err(Error::Corrupt("bits match no alphabetic codeword".into()))
    }

    fn touches(&self) -> u64 {
        self.tree.touches()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitio::BitCursor;

    #[test]
    fn two_symbol_examples() {
        let cw = mehlhorn_code(&[0, 0]).unwrap();
        assert_eq!(cw[0].to_string(), "01");
        assert_eq!(cw[1].to_string(), "11");
        let cw = mehlhorn_code(&[1, 0]).unwrap();
        assert_eq!(cw[0].to_string(), "01");
        assert_eq!(cw[1].to_string(), "110");
    }

    #[test]
    fn dynamic_matches_materialized_code() {
        let msg = [3u32, 3, 0, 7, 3, 1, 1, 7, 7, 7, 2, 0];
        let mut enc = AlphabeticCoder::new(8).unwrap();
        let mut dec = AlphabeticCoder::new(8).unwrap();
        let mut counts = vec![0u64; 8];
        let mut all = BitString::new();
        for &s in &msg {
            let cw = enc.encode_symbol(s).unwrap();
            assert_eq!(cw, mehlhorn_codeword(&counts, s).unwrap());
            counts[s as usize] += 1;
            all.append(&cw);
        }
        let mut cur = BitCursor::new(&all);
        for &s in &msg {
            assert_eq!(dec.decode_symbol(&mut cur).unwrap(), s);
        }
        assert_eq!(cur.remaining(), 0);
    }

    #[test]
    fn needs_two_symbols() {
        assert!(AlphabeticCoder::new(1).is_err());
        assert!(mehlhorn_codeword(&[4], 0).is_err());
    }
}
