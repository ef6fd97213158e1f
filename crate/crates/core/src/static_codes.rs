//! Two-pass static Shannon and Huffman coding.
//!
//! Both coders count symbol frequencies, build a code-tree, and send the
//! resulting codeword lengths as a preface. Codewords are then assigned
//! canonically from the lengths (sorted by length, then symbol index), so
//! the preface never has to carry the tree shape.
//!
//! Preface layout, MSB-first: alphabet size `n` (32 bits), number of distinct
//! symbols `d` (32 bits), then for each distinct symbol in ascending index
//! order its index (`⌈log₂ n⌉` bits) and codeword length (8 bits).

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::bitio::{index_width, BitSink, BitSource, BitString};
use crate::error::{Error, Result};
use crate::math::ceil_log2_ratio;
use crate::minimax::{Label, MinimaxTree};

/// Occurrence counts of each symbol of an alphabet `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Vec<u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn new(alphabet: usize) -> Self {
        Self {
            counts: vec![0; alphabet],
            total: 0,
        }
    }

    pub fn from_symbols(symbols: &[u32], alphabet: usize) -> Result<Self> {
        let mut t = Self::new(alphabet);
        for &s in symbols {
            t.add(s)?;
        }
        Ok(t)
    }

    pub fn add(&mut self, s: u32) -> Result<()> {
        let alphabet = self.counts.len() as u64;
        let slot = self
            .counts
            .get_mut(s as usize)
            .ok_or(Error::SymbolOutOfRange {
                symbol: s as u64,
                alphabet,
            })?;
        *slot += 1;
        self.total += 1;
        Ok(())
    }

    pub fn count(&self, s: u32) -> u64 {
        self.counts.get(s as usize).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    /// `(symbol, count)` for every symbol that occurs, ascending by symbol.
    pub fn present(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (s as u32, c))
    }

    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// A binary trie over codewords, used to decode any prefix-free code.
#[derive(Clone, Debug)]
pub struct PrefixTrie<T> {
    children: Vec<[u32; 2]>,
    values: Vec<Option<T>>,
}

const ABSENT: u32 = u32::MAX;

impl<T: Copy> PrefixTrie<T> {
    /// Fails if the codewords are not prefix-free.
    pub fn new<'a, I>(codes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, &'a BitString)>,
    {
        let mut trie = Self {
            children: vec![[ABSENT; 2]],
            values: vec![None],
        };
        for (value, code) in codes {
            let mut v = 0usize;
            for bit in code.iter() {
                if trie.values[v].is_some() {
                    return Err(Error::Corrupt("codeword set is not prefix-free".into()));
                }
                let next = trie.children[v][bit as usize];
                v = if next == ABSENT {
                    trie.children.push([ABSENT; 2]);
                    trie.values.push(None);
                    let id = trie.children.len() - 1;
                    trie.children[v][bit as usize] = id as u32;
                    id
                } else {
                    next as usize
                };
            }
            if trie.values[v].is_some() || trie.children[v] != [ABSENT; 2] {
                return Err(Error::Corrupt("codeword set is not prefix-free".into()));
            }
            trie.values[v] = Some(value);
        }
        Ok(trie)
    }

    pub fn decode(&self, src: &mut dyn BitSource) -> Result<T> {
        let mut v = 0usize;
        loop {
            if let Some(value) = self.values[v] {
                return Ok(value);
            }
            let next = self.children[v][src.read_bit()? as usize];
            if next == ABSENT {
                return Err(Error::Corrupt("bits match no codeword".into()));
            }
            v = next as usize;
        }
    }
}

/// Symbol → codeword map of a prefix-free code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeAssignment {
    codes: BTreeMap<u32, BitString>,
}

impl CodeAssignment {
    /// Canonical code for `(symbol, length)` pairs: sort by length then symbol,
    /// and hand out consecutive codewords.
    pub fn canonical(lengths: &[(u32, u32)]) -> Result<Self> {
        let mut order = lengths.to_vec();
        order.sort_by_key(|&(s, l)| (l, s));
        let mut codes = BTreeMap::new();
        let mut code: u128 = 0;
        let mut prev = order.first().map_or(0, |&(_, l)| l);
        for (i, &(s, l)) in order.iter().enumerate() {
            if l > 64 {
                return Err(Error::MalformedPreface(format!("codeword length {l}")));
            }
            if i > 0 {
                code += 1;
            }
            code <<= l - prev;
            prev = l;
            if code >> l != 0 {
                return Err(Error::MalformedPreface(
                    "codeword lengths violate the Kraft inequality".into(),
                ));
            }
            if codes.insert(s, BitString::from_value(code, l)).is_some() {
                return Err(Error::MalformedPreface(format!("symbol {s} listed twice")));
            }
        }
        Ok(Self { codes })
    }

    pub fn codeword(&self, s: u32) -> Option<&BitString> {
        self.codes.get(&s)
    }

    pub fn len_of(&self, s: u32) -> Option<usize> {
        self.codes.get(&s).map(BitString::len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BitString)> {
        self.codes.iter().map(|(&s, c)| (s, c))
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn trie(&self) -> Result<PrefixTrie<u32>> {
        PrefixTrie::new(self.iter())
    }

    /// `Σ 2^-len`, exact for lengths ≤ 64 up to float rounding of the sum.
    pub fn kraft_sum(&self) -> f64 {
        self.codes
            .values()
            .map(|c| (-(c.len() as f64)).exp2())
            .sum()
    }
}

/// `⌈log₂(m / #ₐ)⌉` for every symbol in the table.
pub fn shannon_lengths(f: &FrequencyTable) -> Vec<(u32, u32)> {
    let m = f.total() as u128;
    f.present()
        .map(|(s, c)| (s, ceil_log2_ratio(m, c as u128)))
        .collect()
}

/// Lengths bounded by the Shannon lengths, from a Golumbic minimax tree.
pub fn shannon_code(f: &FrequencyTable) -> Result<CodeAssignment> {
    let weights: Vec<(Label, i32)> = shannon_lengths(f)
        .into_iter()
        .map(|(s, l)| (Label::Symbol(s), -(l as i32)))
        .collect();
    if weights.is_empty() {
        return Ok(CodeAssignment {
            codes: BTreeMap::new(),
        });
    }
    let tree = MinimaxTree::build(&weights)?;
    let lengths: Vec<(u32, u32)> = tree
        .leaves()
        .into_iter()
        .map(|h| {
            let Label::Symbol(s) = tree.label(h).expect("live leaf") else {
                unreachable!("static trees have no escape leaf")
            };
            (s, tree.depth(h).expect("live leaf") as u32)
        })
        .collect();
    CodeAssignment::canonical(&lengths)
}

/// Huffman codeword lengths. Ties go to the earlier-created root; leaves are
/// created in ascending symbol order.
pub fn huffman_lengths(f: &FrequencyTable) -> Vec<(u32, u32)> {
    let present: Vec<(u32, u64)> = f.present().collect();
    let k = present.len();
    if k <= 1 {
        return present.into_iter().map(|(s, _)| (s, 0)).collect();
    }
    // parent links over leaves 0..k and internal nodes k..2k-1
    let mut parent = vec![usize::MAX; 2 * k - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = present
        .iter()
        .enumerate()
        .map(|(i, &(_, c))| Reverse((c, i)))
        .collect();
    let mut next = k;
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().expect("two roots");
        let Reverse((wb, b)) = heap.pop().expect("two roots");
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((wa + wb, next)));
        next += 1;
    }
    present
        .iter()
        .enumerate()
        .map(|(i, &(s, _))| {
            let mut d = 0;
            let mut v = i;
            while parent[v] != usize::MAX {
                v = parent[v];
                d += 1;
            }
            (s, d)
        })
        .collect()
}

pub fn huffman_code(f: &FrequencyTable) -> Result<CodeAssignment> {
    if f.total() == 0 {
        return Err(Error::EmptyWeights);
    }
    CodeAssignment::canonical(&huffman_lengths(f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StaticAlgorithm {
    Shannon,
    Huffman,
}

impl StaticAlgorithm {
    pub fn code(self, f: &FrequencyTable) -> Result<CodeAssignment> {
        match self {
            StaticAlgorithm::Shannon => shannon_code(f),
            StaticAlgorithm::Huffman if f.total() == 0 => CodeAssignment::canonical(&[]),
            StaticAlgorithm::Huffman => huffman_code(f),
        }
    }
}

pub fn write_preface(out: &mut dyn BitSink, code: &CodeAssignment, alphabet: u32) -> Result<()> {
    let width = index_width(alphabet as u64);
    out.put(&BitString::from_value(alphabet as u128, 32))?;
    out.put(&BitString::from_value(code.len() as u128, 32))?;
    for (s, c) in code.iter() {
        out.put(&BitString::from_value(s as u128, width))?;
        out.put(&BitString::from_value(c.len() as u128, 8))?;
    }
    Ok(())
}

/// Reads a preface; `expected_alphabet` must match the stored alphabet size.
pub fn read_preface(src: &mut dyn BitSource, expected_alphabet: u32) -> Result<CodeAssignment> {
    let n = src.read_uint(32)? as u32;
    if n != expected_alphabet {
        return Err(Error::MalformedPreface(format!(
            "alphabet size {n}, expected {expected_alphabet}"
        )));
    }
    let d = src.read_uint(32)?;
    if d > n as u64 {
        return Err(Error::MalformedPreface(format!(
            "{d} distinct symbols in alphabet {n}"
        )));
    }
    let width = index_width(n as u64);
    let mut lengths = Vec::with_capacity(d as usize);
    let mut last: Option<u32> = None;
    for _ in 0..d {
        let s = src.read_uint(width)? as u32;
        if s >= n || last.is_some_and(|p| s <= p) {
            return Err(Error::MalformedPreface(format!(
                "symbol index {s} out of order"
            )));
        }
        last = Some(s);
        let l = src.read_uint(8)? as u32;
        lengths.push((s, l));
    }
    CodeAssignment::canonical(&lengths)
}

/// Preface and body bits for `symbols`. An empty message has no preface.
pub fn encode_static(
    symbols: &[u32],
    alphabet: u32,
    algo: StaticAlgorithm,
) -> Result<(BitString, BitString)> {
    let f = FrequencyTable::from_symbols(symbols, alphabet as usize)?;
    if symbols.is_empty() {
        return Ok((BitString::new(), BitString::new()));
    }
    let code = algo.code(&f)?;
    let mut preface = BitString::new();
    write_preface(&mut preface, &code, alphabet)?;
    let mut body = BitString::new();
    for &s in symbols {
        body.append(
            code.codeword(s)
                .expect("every present symbol has a codeword"),
        );
    }
    Ok((preface, body))
}

/// Reads a preface followed by `m` codewords.
pub fn decode_static(src: &mut dyn BitSource, alphabet: u32, m: u64) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    decode_static_with(src, alphabet, m, &mut |s| {
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

/// Streaming form of [`decode_static`]: `emit` sees each symbol as it is decoded.
pub fn decode_static_with(
    src: &mut dyn BitSource,
    alphabet: u32,
    m: u64,
    emit: &mut dyn FnMut(u32) -> Result<()>,
) -> Result<()> {
    if m == 0 {
        return Ok(());
    }
    let code = read_preface(src, alphabet)?;
    if code.is_empty() {
        return Err(Error::MalformedPreface(
            "no codewords for a non-empty message".into(),
        ));
    }
    let trie = code.trie()?;
    for _ in 0..m {
        emit(trie.decode(src)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitio::BitCursor;

    fn table(s: &str) -> FrequencyTable {
        let syms: Vec<u32> = s.bytes().map(|b| (b - b'a') as u32).collect();
        FrequencyTable::from_symbols(&syms, 26).unwrap()
    }

    fn counts_table(counts: &[u64]) -> FrequencyTable {
        let mut syms = Vec::new();
        for (s, &c) in counts.iter().enumerate() {
            syms.extend(std::iter::repeat_n(s as u32, c as usize));
        }
        FrequencyTable::from_symbols(&syms, counts.len()).unwrap()
    }

    #[test]
    fn shannon_lengths_examples() {
        assert_eq!(shannon_lengths(&table("aab")), vec![(0, 1), (1, 2)]);
        assert_eq!(shannon_lengths(&table("aaaa")), vec![(0, 0)]);
        assert_eq!(
            shannon_lengths(&table("abcd")),
            vec![(0, 2), (1, 2), (2, 2), (3, 2)]
        );
    }

    #[test]
    fn shannon_code_examples() {
        // Golumbic places b at depth 1, inside its length budget of 2
        let c = shannon_code(&table("aab")).unwrap();
        assert_eq!(c.len_of(0), Some(1));
        assert_eq!(c.len_of(1), Some(1));
        assert!(shannon_code(&table("zzz"))
            .unwrap()
            .codeword(25)
            .unwrap()
            .is_empty());
        assert!(c.trie().is_ok());
    }

    #[test]
    fn huffman_examples() {
        let lens = |c: &[u64]| -> Vec<u32> {
            huffman_lengths(&counts_table(c))
                .into_iter()
                .map(|(_, l)| l)
                .collect()
        };
        assert_eq!(lens(&[1, 1]), vec![1, 1]);
        assert_eq!(lens(&[1, 1, 2]), vec![2, 2, 1]);
        let weighted: u64 = huffman_lengths(&counts_table(&[1, 1, 1, 1, 4]))
            .into_iter()
            .map(|(s, l)| [1, 1, 1, 1, 4][s as usize] * l as u64)
            .sum();
        // lengths (3,3,3,3,1); every other Kraft-feasible assignment costs more
        assert_eq!(weighted, 16);
        assert!(matches!(
            huffman_code(&FrequencyTable::new(4)),
            Err(Error::EmptyWeights)
        ));
    }

    #[test]
    fn canonical_codes_are_ordered() {
        let c = CodeAssignment::canonical(&[(2, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(c.codeword(2).unwrap().to_string(), "0");
        assert_eq!(c.codeword(0).unwrap().to_string(), "10");
        assert_eq!(c.codeword(1).unwrap().to_string(), "11");
        assert!(CodeAssignment::canonical(&[(0, 1), (1, 1), (2, 1)]).is_err());
    }

    #[test]
    fn static_examples() {
        let (_, body) = encode_static(&[], 4, StaticAlgorithm::Shannon).unwrap();
        assert!(body.is_empty());
        let (preface, body) = encode_static(&[0, 0, 1], 26, StaticAlgorithm::Shannon).unwrap();
        assert_eq!(body.len(), 3);
        // 32 + 32 + 2·(5 + 8)
        assert_eq!(preface.len(), 90);
    }

    #[test]
    fn preface_rejects_garbage() {
        let mut bits = BitString::new();
        bits.append(&BitString::from_value(4, 32));
        bits.append(&BitString::from_value(9, 32));
        let mut src = BitCursor::new(&bits);
        assert!(matches!(
            read_preface(&mut src, 4),
            Err(Error::MalformedPreface(_))
        ));

        let mut bits = BitString::new();
        bits.append(&BitString::from_value(4, 32));
        bits.append(&BitString::from_value(2, 32));
        bits.append(&"10".parse().unwrap());
        bits.append(&BitString::from_value(1, 8));
        bits.append(&"01".parse().unwrap());
        bits.append(&BitString::from_value(1, 8));
        let mut src = BitCursor::new(&bits);
        assert!(matches!(
            read_preface(&mut src, 4),
            Err(Error::MalformedPreface(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn roundtrip_both(syms in prop::collection::vec(0u32..12, 0..300), huff in any::<bool>()) {
                let algo = if huff { StaticAlgorithm::Huffman } else { StaticAlgorithm::Shannon };
                let (mut bits, body) = encode_static(&syms, 12, algo).unwrap();
                bits.append(&body);
                let mut src = BitCursor::new(&bits);
                let back = decode_static(&mut src, 12, syms.len() as u64).unwrap();
                prop_assert_eq!(back, syms);
                prop_assert_eq!(src.remaining(), 0);
            }

            #[test]
            fn shannon_depths_within_lengths(syms in prop::collection::vec(0u32..20, 1..400)) {
                let f = FrequencyTable::from_symbols(&syms, 20).unwrap();
                let code = shannon_code(&f).unwrap();
                prop_assert!(code.kraft_sum() <= 1.0);
                for (s, l) in shannon_lengths(&f) {
                    prop_assert!(code.len_of(s).unwrap() as u32 <= l);
                }
                let huff = huffman_code(&f).unwrap();
                let body = |c: &CodeAssignment| -> u64 {
                    f.present().map(|(s, n)| n * c.len_of(s).unwrap() as u64).sum()
                };
                prop_assert!(body(&huff) <= body(&code));
            }
        }
    }
}
