//! Bit strings and MSB-first bit streams.
//!
//! Every codeword is a [`BitString`]. Streams pack bits most significant bit
//! first; the writer zero-pads the final partial byte only when it is
//! finished, so the reader must know how many symbols to expect.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::math::ceil_log2;

/// A growable sequence of bits. Ordering is lexicographic with `0 < 1` and a
/// proper prefix ordered before its extensions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bits: Vec::with_capacity(bits),
        }
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_value(value: u128, width: u32) -> Self {
        assert!(width <= 128);
        let bits = (0..width).rev().map(|i| (value >> i) & 1 == 1).collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn append(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    /// Interprets up to 128 bits as an unsigned integer.
    pub fn value(&self) -> u128 {
        assert!(self.len() <= 128, "bit string too long for an integer");
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as u128)
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// Bytes with the final partial byte zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                out[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!("not a bit: {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| Self { bits })
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self {
            bits: iter.into_iter().collect(),
        }
    }
}

/// Destination for coder output.
pub trait BitSink {
    fn put_bit(&mut self, bit: bool) -> Result<()>;

    fn put(&mut self, bits: &BitString) -> Result<()> {
        bits.iter().try_for_each(|b| self.put_bit(b))
    }
}

/// Source of coder input.
pub trait BitSource {
    fn read_bit(&mut self) -> Result<bool>;

    /// Reads the next `k` bits in write order.
    fn read_bits(&mut self, k: usize) -> Result<BitString> {
        let mut out = BitString::with_capacity(k);
        for read in 0..k {
            match self.read_bit() {
                Ok(b) => out.push(b),
                Err(Error::Truncated { .. }) => return Err(Error::Truncated { wanted: k - read }),
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// Reads `k ≤ 64` bits as an unsigned integer.
    fn read_uint(&mut self, k: u32) -> Result<u64> {
        assert!(k <= 64);
        let mut v = 0u64;
        for read in 0..k {
            let b = match self.read_bit() {
                Ok(b) => b,
                Err(Error::Truncated { .. }) => {
                    return Err(Error::Truncated {
                        wanted: (k - read) as usize,
                    })
                }
                Err(e) => return Err(e),
            };
            v = (v << 1) | b as u64;
        }
        Ok(v)
    }
}

impl BitSink for BitString {
    fn put_bit(&mut self, bit: bool) -> Result<()> {
        self.push(bit);
        Ok(())
    }
}

/// Reads bits back out of a [`BitString`].
#[derive(Debug)]
pub struct BitCursor<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> BitCursor<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl BitSource for BitCursor<'_> {
    fn read_bit(&mut self) -> Result<bool> {
        let b = self
            .bits
            .get(self.pos)
            .ok_or(Error::Truncated { wanted: 1 })?;
        self.pos += 1;
        Ok(b)
    }
}

/// MSB-first bit writer over a byte stream.
pub struct BitWriter<W: Write> {
    inner: W,
    acc: u8,
    filled: u8,
    bits_written: u64,
}

impl<W: Write> BitWriter<W> {
    pub fn new(inner: W) -> Self {
        Self {
            inner,
            acc: 0,
            filled: 0,
            bits_written: 0,
        }
    }

    pub fn bits_written(&self) -> u64 {
        self.bits_written
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn write_uint(&mut self, value: u64, width: u32) -> Result<()> {
        assert!(width <= 64);
        for i in (0..width).rev() {
            self.put_bit((value >> i) & 1 == 1)?;
        }
        Ok(())
    }

    /// Zero-pads the final partial byte and returns the underlying stream.
    pub fn finish(mut self) -> Result<W> {
        if self.filled > 0 {
            self.inner.write_all(&[self.acc])?;
        }
        self.inner.flush()?;
        Ok(self.inner)
    }
}

impl<W: Write> BitSink for BitWriter<W> {
    fn put_bit(&mut self, bit: bool) -> Result<()> {
        self.acc |= (bit as u8) << (7 - self.filled);
        self.filled += 1;
        self.bits_written += 1;
        if self.filled == 8 {
            self.inner.write_all(&[self.acc])?;
            self.acc = 0;
            self.filled = 0;
        }
        Ok(())
    }
}

/// MSB-first bit reader over a byte stream.
pub struct BitReader<R: Read> {
    inner: R,
    byte: u8,
    left: u8,
    bits_read: u64,
}

impl<R: Read> BitReader<R> {
    pub fn new(inner: R) -> Self {
        Self {
            inner,
            byte: 0,
            left: 0,
            bits_read: 0,
        }
    }

    pub fn bits_read(&self) -> u64 {
        self.bits_read
    }

    /// Whether the unread rest of the current byte is all zero.
    pub fn padding_is_zero(&self) -> bool {
        self.byte & ((1u16 << self.left) - 1) as u8 == 0
    }

    pub fn into_inner(self) -> R {
        self.inner
    }
}

impl<R: Read> BitSource for BitReader<R> {
    fn read_bit(&mut self) -> Result<bool> {
        if self.left == 0 {
            let mut buf = [0u8; 1];
            loop {
                match self.inner.read(&mut buf) {
                    Ok(0) => return Err(Error::Truncated { wanted: 1 }),
                    Ok(_) => break,
                    Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            self.byte = buf[0];
            self.left = 8;
        }
        self.left -= 1;
        self.bits_read += 1;
        Ok((self.byte >> self.left) & 1 == 1)
    }
}

/// Number of bits used for an alphabet index: `⌈log₂ n⌉`.
pub fn index_width(n: u64) -> u32 {
    ceil_log2(n.max(1) as u128)
}

/// The `⌈log₂ n⌉`-bit binary representation of symbol index `j`.
pub fn index_bits(j: u64, n: u64) -> Result<BitString> {
    if j >= n {
        return Err(Error::SymbolOutOfRange {
            symbol: j,
            alphabet: n,
        });
    }
    Ok(BitString::from_value(j as u128, index_width(n)))
}

/// The first `k` bits of the binary expansion of `p/q`, by repeated doubling.
pub fn fraction_prefix(p: u128, q: u128, k: usize) -> Result<BitString> {
    if q == 0 || p >= q || q > 1 << 126 {
        return Err(Error::FractionOutOfRange { num: p, den: q });
    }
    let mut rem = p;
    let mut out = BitString::with_capacity(k);
    for _ in 0..k {
        rem <<= 1;
        if rem >= q {
            out.push(true);
            rem -= q;
        } else {
            out.push(false);
        }
    }
    Ok(out)
}
