//! Algorithm selection and whole-message encoding.

use std::fmt;
use std::str::FromStr;

use crate::adaptive::{ShannonConstructor, SimpleCoder};
use crate::alphabetic::AlphabeticCoder;
use crate::bitio::{BitSink, BitSource, BitString};
use crate::dynamic_shannon::DynamicShannonCoder;
use crate::error::{Error, Result};
use crate::length_restricted::RestrictedParams;
use crate::static_codes::{decode_static_with, encode_static, StaticAlgorithm};
use crate::unequal_cost::{CostModel, KrauseCoder};

/// A coder that emits one codeword per symbol and updates its state so that
/// a decoder with the same history stays in lockstep.
pub trait DynamicCoder {
    fn alphabet_size(&self) -> u32;
    fn encode_symbol(&mut self, s: u32) -> Result<BitString>;
    fn decode_symbol(&mut self, src: &mut dyn BitSource) -> Result<u32>;
    /// Structure nodes visited so far.
    fn touches(&self) -> u64;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Algorithm {
    StaticShannon = 1,
    StaticHuffman = 2,
    SimpleDynamicShannon = 3,
    DynamicShannon = 4,
    LengthRestricted = 5,
    Alphabetic = 6,
    UnequalCost = 7,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::StaticShannon,
        Algorithm::StaticHuffman,
        Algorithm::SimpleDynamicShannon,
        Algorithm::DynamicShannon,
        Algorithm::LengthRestricted,
        Algorithm::Alphabetic,
        Algorithm::UnequalCost,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.id() == id)
            .ok_or_else(|| Error::MalformedPreface(format!("unknown algorithm id {id}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::StaticShannon => "static-shannon",
            Algorithm::StaticHuffman => "static-huffman",
            Algorithm::SimpleDynamicShannon => "simple-dynamic-shannon",
            Algorithm::DynamicShannon => "dynamic-shannon",
            Algorithm::LengthRestricted => "length-restricted",
            Algorithm::Alphabetic => "alphabetic",
            Algorithm::UnequalCost => "unequal-cost",
        }
    }

    pub fn is_static(self) -> bool {
        matches!(self, Algorithm::StaticShannon | Algorithm::StaticHuffman)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

/// Parameters shared by encoder and decoder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodecParams {
    pub alphabet: u32,
    pub ell: u16,
    pub distinct_mode: bool,
    pub cost0: f64,
    pub cost1: f64,
}

impl CodecParams {
    pub fn new(alphabet: u32) -> Self {
        Self {
            alphabet,
            ell: 2,
            distinct_mode: false,
            cost0: 1.0,
            cost1: 1.0,
        }
    }
}

/// A fresh per-symbol coder for a dynamic algorithm.
pub fn new_coder(algo: Algorithm, p: &CodecParams) -> Result<Box<dyn DynamicCoder>> {
    Ok(match algo {
        Algorithm::StaticShannon | Algorithm::StaticHuffman => {
            return Err(Error::InvalidParameter(format!(
                "{algo} is a two-pass code"
            )))
        }
        Algorithm::SimpleDynamicShannon => {
            Box::new(SimpleCoder::new(p.alphabet, ShannonConstructor::new())?)
        }
        Algorithm::DynamicShannon => Box::new(DynamicShannonCoder::new(p.alphabet)?),
        Algorithm::LengthRestricted => Box::new(DynamicShannonCoder::restricted(
            p.alphabet,
            RestrictedParams::new(p.ell as u32, p.distinct_mode)?,
        )?),
        Algorithm::Alphabetic => Box::new(AlphabeticCoder::new(p.alphabet)?),
        Algorithm::UnequalCost => Box::new(KrauseCoder::new(
            p.alphabet,
            CostModel::new(p.cost0, p.cost1)?,
        )?),
    })
}

/// Encodes a whole message; static codes emit their preface first.
pub fn encode_message(
    algo: Algorithm,
    p: &CodecParams,
    symbols: &[u32],
    out: &mut dyn BitSink,
) -> Result<()> {
    match algo {
        Algorithm::StaticShannon | Algorithm::StaticHuffman => {
            let which = if algo == Algorithm::StaticShannon {
                StaticAlgorithm::Shannon
            } else {
                StaticAlgorithm::Huffman
            };
            let (preface, body) = encode_static(symbols, p.alphabet, which)?;
            out.put(&preface)?;
            out.put(&body)
        }
        _ => {
            let mut coder = new_coder(algo, p)?;
            for &s in symbols {
                out.put(&coder.encode_symbol(s)?)?;
            }
            Ok(())
        }
    }
}

/// Decodes `m` symbols, calling `emit` as each one is recovered.
pub fn decode_message(
    algo: Algorithm,
    p: &CodecParams,
    src: &mut dyn BitSource,
    m: u64,
    emit: &mut dyn FnMut(u32) -> Result<()>,
) -> Result<()> {
    if algo.is_static() {
        return decode_static_with(src, p.alphabet, m, emit);
    }
    let mut coder = new_coder(algo, p)?;
    for _ in 0..m {
        emit(coder.decode_symbol(src)?)?;
    }
    Ok(())
}
