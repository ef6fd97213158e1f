//! Runs coders, measures their output, and checks it against the bounds.

use dynshannon::bitio::BitCursor;
use dynshannon::codec::{decode_message, new_coder};
use dynshannon::length_restricted::RestrictedParams;
use dynshannon::math::ceil_log2;
use dynshannon::static_codes::{encode_static, StaticAlgorithm};
use dynshannon::stats::{static_bound, theorem_rhs, Bound, BoundReport, Profile, Theorem};
use dynshannon::unequal_cost::CostModel;
use dynshannon::{Algorithm, BitString, CodecParams, Result};

/// One encoding of a message.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub algo: Algorithm,
    /// Everything written, preface included.
    pub output: BitString,
    /// Bits the bounds apply to: the body for static codes, everything otherwise.
    pub bits: u64,
    /// Letter cost of `output`; equals `bits` for unit costs.
    pub cost: f64,
    pub touches: u64,
    /// Codeword length per character (dynamic coders only).
    pub lengths: Vec<u32>,
}

pub fn measure(algo: Algorithm, p: &CodecParams, symbols: &[u32]) -> Result<Measurement> {
    let mut output = BitString::new();
    let mut lengths = Vec::new();
    let (bits, touches) = if algo.is_static() {
        let which = if algo == Algorithm::StaticShannon {
            StaticAlgorithm::Shannon
        } else {
            StaticAlgorithm::Huffman
        };
        let (preface, body) = encode_static(symbols, p.alphabet, which)?;
        output.append(&preface);
        output.append(&body);
        (body.len() as u64, 0)
    } else {
        let mut coder = new_coder(algo, p)?;
        lengths.reserve(symbols.len());
        for &s in symbols {
            let cw = coder.encode_symbol(s)?;
            lengths.push(cw.len() as u32);
            output.append(&cw);
        }
        (output.len() as u64, coder.touches())
    };
    let cost = if algo == Algorithm::UnequalCost {
        CostModel::new(p.cost0, p.cost1)?.cost_of(&output)
    } else {
        bits as f64
    };
    Ok(Measurement {
        algo,
        output,
        bits,
        cost,
        touches,
        lengths,
    })
}

/// Decodes `m.output` and compares it with `symbols`.
pub fn roundtrips(m: &Measurement, p: &CodecParams, symbols: &[u32]) -> bool {
    let mut src = BitCursor::new(&m.output);
    let mut back = Vec::with_capacity(symbols.len());
    let ok = decode_message(m.algo, p, &mut src, symbols.len() as u64, &mut |s| {
        back.push(s);
        Ok(())
    });
    ok.is_ok() && src.remaining() == 0 && back == symbols
}

pub fn theorem_for(algo: Algorithm, p: &CodecParams) -> Result<Option<Theorem>> {
    Ok(match algo {
        Algorithm::StaticShannon | Algorithm::StaticHuffman => None,
        Algorithm::SimpleDynamicShannon => Some(Theorem::SimpleShannon),
        Algorithm::DynamicShannon => Some(Theorem::DynamicShannon),
        Algorithm::LengthRestricted => Some(Theorem::LengthRestricted(RestrictedParams::new(
            p.ell as u32,
            p.distinct_mode,
        )?)),
        Algorithm::Alphabetic => Some(Theorem::Alphabetic),
        Algorithm::UnequalCost => Some(Theorem::UnequalCost(CostModel::new(p.cost0, p.cost1)?)),
    })
}

pub fn bound_for(algo: Algorithm, p: &CodecParams, profile: &Profile) -> Result<Bound> {
    match theorem_for(algo, p)? {
        None => Ok(static_bound(profile)),
        Some(t) => theorem_rhs(t, profile),
    }
}

/// Codeword-length caps of the length-restricted coder, checked per character.
pub fn restricted_lengths_ok(p: &CodecParams, profile: &Profile, lengths: &[u32]) -> Result<bool> {
    let r = RestrictedParams::new(p.ell as u32, p.distinct_mode)?;
    let index = ceil_log2(p.alphabet as u128);
    Ok(profile.steps.iter().zip(lengths).all(|(s, &len)| {
        let cap = r.cap(p.alphabet, s.distinct_before);
        if s.is_repeat() {
            len <= cap
        } else {
            len <= cap + index
        }
    }))
}

/// Every check for one algorithm on one message.
pub fn report(
    algo: Algorithm,
    p: &CodecParams,
    symbols: &[u32],
) -> Result<(Measurement, BoundReport)> {
    let profile = Profile::new(symbols, p.alphabet)?;
    let m = measure(algo, p, symbols)?;
    let bound = bound_for(algo, p, &profile)?;
    let mut r = BoundReport::with_bound(algo.name(), &profile, m.cost, &bound, m.touches);
    r.pass &= roundtrips(&m, p, symbols);
    if algo == Algorithm::LengthRestricted {
        r.pass &= restricted_lengths_ok(p, &profile, &m.lengths)?;
    }
    Ok((m, r))
}

/// Runs all seven algorithms. Huffman also has to beat Shannon on the body.
pub fn report_all(p: &CodecParams, symbols: &[u32]) -> Result<Vec<BoundReport>> {
    let mut out = Vec::with_capacity(Algorithm::ALL.len());
    let mut shannon_body = None;
    for algo in Algorithm::ALL {
        let (m, mut r) = report(algo, p, symbols)?;
        match algo {
            Algorithm::StaticShannon => shannon_body = Some(m.bits),
            Algorithm::StaticHuffman => r.pass &= shannon_body.is_none_or(|b| m.bits <= b),
            _ => {}
        }
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass_on_small_input() {
        let msg: Vec<u32> = b"abracadabra".iter().map(|&b| (b - b'a') as u32).collect();
        for r in report_all(&CodecParams::new(26), &msg).unwrap() {
            assert!(r.pass, "{r}");
        }
    }

    #[test]
    fn empty_message() {
        for r in report_all(&CodecParams::new(4), &[]).unwrap() {
            assert!(r.pass, "{r}");
            assert_eq!(r.measured, 0.0);
        }
    }
}
