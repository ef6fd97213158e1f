//! The `DSC1` container: a fixed 35-byte header followed by the coded bits,
//! MSB-first, with the last byte zero-padded.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "DSC1"
//!      4     1  algorithm id
//!      5     4  alphabet size n        (big-endian)
//!      9     8  message length m       (big-endian)
//!     17     2  ell; top bit = distinct mode (big-endian)
//!     19     8  cost0, IEEE 754 double (big-endian)
//!     27     8  cost1, IEEE 754 double (big-endian)
//! ```
//!
//! Unused parameter fields are written as zero.

use std::io::{Read, Write};

use dynshannon::bitio::{BitReader, BitWriter};
use dynshannon::codec::{decode_message, encode_message};
use dynshannon::length_restricted::MAX_ELL;
use dynshannon::{Algorithm, CodecParams};
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"DSC1";
pub const HEADER_LEN: usize = 35;
/// Largest alphabet a container may declare.
pub const MAX_ALPHABET: u32 = 1 << 20;
/// Messages must be shorter than this.
pub const MAX_MESSAGE: u64 = 1 << 60;
const DISTINCT_FLAG: u16 = 0x8000;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("not a DSC1 container")]
    BadMagic,
    #[error("unknown algorithm id {0:#04x}")]
    UnknownAlgorithm(u8),
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("message of {m} symbols exceeds the decode limit {limit}")]
    TooLong { m: u64, limit: u64 },
    #[error("byte {0} is outside the declared alphabet")]
    OutsideAlphabet(u8),
    #[error("trailing data after the message")]
    TrailingData,
    #[error(transparent)]
    Codec(#[from] dynshannon::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ContainerError>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Header {
    pub algo: Algorithm,
    pub params: CodecParams,
    pub m: u64,
}

impl Header {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let p = &self.params;
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = self.algo.id();
        out[5..9].copy_from_slice(&p.alphabet.to_be_bytes());
        out[9..17].copy_from_slice(&self.m.to_be_bytes());
        if self.algo == Algorithm::LengthRestricted {
            let ell = p.ell | if p.distinct_mode { DISTINCT_FLAG } else { 0 };
            out[17..19].copy_from_slice(&ell.to_be_bytes());
        }
        if self.algo == Algorithm::UnequalCost {
            out[19..27].copy_from_slice(&p.cost0.to_be_bytes());
            out[27..35].copy_from_slice(&p.cost1.to_be_bytes());
        }
        out
    }

    pub fn parse(bytes: &[u8; HEADER_LEN]) -> Result<Self> {
        if bytes[..4] != MAGIC {
            return Err(ContainerError::BadMagic);
        }
        let algo =
            Algorithm::from_id(bytes[4]).map_err(|_| ContainerError::UnknownAlgorithm(bytes[4]))?;
        let n = u32::from_be_bytes(bytes[5..9].try_into().unwrap());
        let m = u64::from_be_bytes(bytes[9..17].try_into().unwrap());
        let ell = u16::from_be_bytes(bytes[17..19].try_into().unwrap());
        let cost0 = f64::from_be_bytes(bytes[19..27].try_into().unwrap());
        let cost1 = f64::from_be_bytes(bytes[27..35].try_into().unwrap());
        let mut params = CodecParams::new(n);
        if algo == Algorithm::LengthRestricted {
            params.ell = ell & !DISTINCT_FLAG;
            params.distinct_mode = ell & DISTINCT_FLAG != 0;
        }
        if algo == Algorithm::UnequalCost {
            params.cost0 = cost0;
            params.cost1 = cost1;
        }
        let header = Self { algo, params, m };
        header.validate()?;
        Ok(header)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if p.alphabet == 0 || p.alphabet > MAX_ALPHABET {
            return Err(ContainerError::BadHeader(format!(
                "alphabet size {}",
                p.alphabet
            )));
        }
        if self.m >= MAX_MESSAGE {
            return Err(ContainerError::BadHeader(format!(
                "message length {}",
                self.m
            )));
        }
        if self.algo == Algorithm::LengthRestricted && !(1..=MAX_ELL as u16).contains(&p.ell) {
            return Err(ContainerError::BadHeader(format!("ell {}", p.ell)));
        }
        Ok(())
    }
}

/// Bounds applied while decoding untrusted input.
#[derive(Clone, Copy, Debug)]
pub struct DecodeLimits {
    pub max_symbols: u64,
}

impl Default for DecodeLimits {
    fn default() -> Self {
        Self {
            max_symbols: MAX_MESSAGE - 1,
        }
    }
}

/// Writes header and body; returns the number of body bits.
pub fn encode_to<W: Write>(
    symbols: &[u32],
    algo: Algorithm,
    params: &CodecParams,
    mut out: W,
) -> Result<u64> {
    let header = Header {
        algo,
        params: *params,
        m: symbols.len() as u64,
    };
    header.validate()?;
    out.write_all(&header.to_bytes())?;
    let mut bits = BitWriter::new(out);
    encode_message(algo, params, symbols, &mut bits)?;
    let written = bits.bits_written();
    bits.finish()?;
    Ok(written)
}

/// Reads a container, handing each symbol to `emit` as soon as it is decoded.
pub fn decode_from<R: Read>(
    mut input: R,
    limits: DecodeLimits,
    emit: &mut dyn FnMut(u32) -> Result<()>,
) -> Result<Header> {
    let mut raw = [0u8; HEADER_LEN];
    input.read_exact(&mut raw).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => ContainerError::BadHeader("truncated header".into()),
        _ => e.into(),
    })?;
    let header = Header::parse(&raw)?;
    if header.m > limits.max_symbols {
        return Err(ContainerError::TooLong {
            m: header.m,
            limit: limits.max_symbols,
        });
    }
    let mut bits = BitReader::new(input);
    let mut failure = None;
    let outcome = decode_message(header.algo, &header.params, &mut bits, header.m, &mut |s| {
        emit(s).map_err(|e| {
            failure = Some(e);
            dynshannon::Error::Corrupt("output rejected".into())
        })
    });
    if let Some(e) = failure {
        return Err(e);
    }
    outcome?;
    if !bits.padding_is_zero() {
        return Err(ContainerError::TrailingData);
    }
    let mut rest = bits.into_inner();
    let mut probe = [0u8; 1];
    if rest.read(&mut probe)? != 0 {
        return Err(ContainerError::TrailingData);
    }
    Ok(header)
}

/// Encodes bytes as symbols of an alphabet of `params.alphabet ≤ 256`.
pub fn encode_bytes(data: &[u8], algo: Algorithm, params: &CodecParams) -> Result<Vec<u8>> {
    if params.alphabet > 256 {
        return Err(ContainerError::BadHeader(
            "byte input needs an alphabet of at most 256".into(),
        ));
    }
    let symbols = bytes_to_symbols(data, params.alphabet)?;
    let mut out = Vec::new();
    encode_to(&symbols, algo, params, &mut out)?;
    Ok(out)
}

/// Decodes a container whose symbols are bytes.
pub fn decode_bytes(container: &[u8], limits: DecodeLimits) -> Result<(Header, Vec<u8>)> {
    let mut out = Vec::new();
    let header = decode_from(container, limits, &mut |s| {
        let b = u8::try_from(s)
            .map_err(|_| ContainerError::BadHeader("alphabet too large for bytes".into()))?;
        out.push(b);
        Ok(())
    })?;
    Ok((header, out))
}

pub fn bytes_to_symbols(data: &[u8], alphabet: u32) -> Result<Vec<u32>> {
    data.iter()
        .map(|&b| {
            if (b as u32) < alphabet {
                Ok(b as u32)
            } else {
                Err(ContainerError::OutsideAlphabet(b))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_roundtrip() {
        let mut params = CodecParams::new(300);
        params.ell = 4;
        params.distinct_mode = true;
        let h = Header {
            algo: Algorithm::LengthRestricted,
            params,
            m: 12345,
        };
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..4], b"DSC1");
        assert_eq!(bytes[4], 5);
        assert_eq!(&bytes[17..19], &[0x80, 0x04]);
        let back = Header::parse(&bytes).unwrap();
        assert_eq!(back.params.ell, 4);
        assert!(back.params.distinct_mode);
        assert_eq!(back.m, 12345);
    }

    #[test]
    fn unused_fields_are_zero() {
        let h = Header {
            algo: Algorithm::DynamicShannon,
            params: CodecParams::new(256),
            m: 0,
        };
        assert!(h.to_bytes()[17..].iter().all(|&b| b == 0));
    }

    #[test]
    fn rejects_bad_headers() {
        let h = Header {
            algo: Algorithm::StaticShannon,
            params: CodecParams::new(256),
            m: 3,
        };
        let mut bytes = h.to_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            Header::parse(&bytes),
            Err(ContainerError::BadMagic)
        ));
        let mut bytes = h.to_bytes();
        bytes[4] = 0xFF;
        assert!(matches!(
            Header::parse(&bytes),
            Err(ContainerError::UnknownAlgorithm(0xFF))
        ));
        let mut bytes = h.to_bytes();
        bytes[5..9].copy_from_slice(&0u32.to_be_bytes());
        assert!(Header::parse(&bytes).is_err());
    }
}
