//! Dynamic Shannon coding on a dynamic minimax tree.
//!
//! After `s₁ ⋯ sᵢ` the leaf for `a` should have weight
//! `−⌈log((i + 1 + n) / #ₐ)⌉`, counts taken over the escape-prefixed history.
//! Only the leaf just coded is brought to its target in the foreground; one
//! more leaf, taken round-robin from a queue of every leaf, is refreshed in
//! the background. Each leaf therefore stays within
//!
//! ```text
//! −⌈log((i + n) / #ₐ)⌉ ≤ w ≤ −⌈log(max(i, n) / #ₐ)⌉
//! ```
//!
//! and every refresh is at most one increment or decrement. Within a step the
//! new leaf is inserted first, then the background leaf is refreshed, then the
//! foreground one, which keeps the leaf weights Kraft-feasible throughout.

use std::collections::VecDeque;

use crate::bitio::{index_bits, index_width, BitSource, BitString};
use crate::codec::DynamicCoder;
use crate::error::{Error, Result};
use crate::length_restricted::{smooth_weight, RestrictedParams};
use crate::math::ceil_log2_ratio;
use crate::minimax::{Label, LeafHandle, MinimaxTree};

/// Weight-update accounting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub foreground_steps: u64,
    pub background_steps: u64,
    pub background_idle: u64,
    /// Largest number of unit steps any single refresh needed.
    pub max_refresh_steps: u32,
    pub queue_ops: u64,
}

#[derive(Clone, Debug)]
pub struct DynamicShannonCoder {
    n: u32,
    restrict: Option<RestrictedParams>,
    tree: MinimaxTree,
    escape: Option<LeafHandle>,
    leaves: Vec<Option<LeafHandle>>,
    counts: Vec<u64>,
    processed: u64,
    distinct: u64,
    queue: VecDeque<Label>,
    /// Net weight change per leaf: (increments, decrements); escape last.
    moves: Vec<(u64, u64)>,
    insert_weights: Vec<i32>,
    stats: UpdateStats,
}

impl DynamicShannonCoder {
    pub fn new(n: u32) -> Result<Self> {
        Self::build(n, None)
    }

    /// Length-restricted variant.
    pub fn restricted(n: u32, params: RestrictedParams) -> Result<Self> {
        Self::build(n, Some(params))
    }

    fn build(n: u32, restrict: Option<RestrictedParams>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        let mut c = Self {
            n,
            restrict,
            tree: MinimaxTree::build(&[(Label::Escape, 0)])?,
            escape: None,
            leaves: vec![None; n as usize],
            counts: vec![0; n as usize],
            processed: 0,
            distinct: 0,
            queue: VecDeque::from([Label::Escape]),
            moves: vec![(0, 0); n as usize + 1],
            insert_weights: vec![0; n as usize + 1],
            stats: UpdateStats::default(),
        };
        let w = c.target(Label::Escape)?;
        c.tree = MinimaxTree::build(&[(Label::Escape, w)])?;
        c.escape = c.tree.leaf(Label::Escape);
        c.insert_weights[n as usize] = w;
        Ok(c)
    }

    pub fn tree(&self) -> &MinimaxTree {
        &self.tree
    }

    pub fn stats(&self) -> UpdateStats {
        self.stats
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn distinct(&self) -> u64 {
        self.distinct
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn has_escape(&self) -> bool {
        self.escape.is_some()
    }

    /// Count in the escape-prefixed history processed so far.
    pub fn count(&self, label: Label) -> u64 {
        match label {
            Label::Escape => u64::from(self.escape.is_some()),
            Label::Symbol(s) => self.counts[s as usize],
        }
    }

    fn slot(&self, label: Label) -> usize {
        match label {
            Label::Escape => self.n as usize,
            Label::Symbol(s) => s as usize,
        }
    }

    /// `(increments, decrements)` applied to a leaf over its lifetime.
    pub fn moves(&self, label: Label) -> (u64, u64) {
        self.moves[self.slot(label)]
    }

    /// Weight the leaf had when it was created.
    pub fn insert_weight(&self, label: Label) -> i32 {
        self.insert_weights[self.slot(label)]
    }

    fn handle(&self, label: Label) -> Option<LeafHandle> {
        match label {
            Label::Escape => self.escape,
            Label::Symbol(s) => self.leaves[s as usize],
        }
    }

    pub fn leaf_weight(&self, label: Label) -> Option<i32> {
        self.handle(label)
            .map(|h| self.tree.weight(h).expect("live leaf"))
    }

    /// Target weight for `label` given the history processed so far.
    pub fn target(&self, label: Label) -> Result<i32> {
        let c = match label {
            Label::Escape => 1,
            Label::Symbol(s) => self.counts[s as usize],
        };
        let i = self.processed;
        match self.restrict {
            None => Ok(-(ceil_log2_ratio((i + 1 + self.n as u64) as u128, c as u128) as i32)),
            Some(r) => {
                let big_n = r.effective_n(self.n, self.distinct);
                smooth_weight(i + 1 + big_n, c, big_n, r.ell)
            }
        }
    }

    fn refresh(&mut self, label: Label) -> Result<u32> {
        let Some(h) = self.handle(label) else {
            return Ok(0);
        };
        let target = self.target(label)?;
        let w = self.tree.weight(h)?;
        let steps = self.tree.move_weight(h, target)?;
        let slot = self.slot(label);
        if target > w {
            self.moves[slot].0 += steps as u64;
        } else {
            self.moves[slot].1 += steps as u64;
        }
        self.stats.max_refresh_steps = self.stats.max_refresh_steps.max(steps);
        Ok(steps)
    }

    fn update(&mut self, s: u32) -> Result<()> {
        self.counts[s as usize] += 1;
        self.processed += 1;
        let label = Label::Symbol(s);
        if self.counts[s as usize] == 1 {
            self.distinct += 1;
            let esc = self.escape.expect("unseen symbols imply an escape leaf");
            let completes = self.restrict.is_some() && self.distinct == self.n as u64;
            if completes {
                // the escape leaf becomes the last new symbol
                self.tree.relabel(esc, label)?;
                self.leaves[s as usize] = Some(esc);
                self.escape = None;
                let at = self
                    .queue
                    .iter()
                    .position(|&l| l == Label::Escape)
                    .expect("escape queued");
                self.queue[at] = label;
            } else {
                self.leaves[s as usize] = Some(self.tree.insert_leaf_like(esc, label)?);
                self.queue.push_back(label);
            }
            self.stats.queue_ops += 1;
            self.insert_weights[s as usize] = self
                .tree
                .weight(self.leaves[s as usize].expect("inserted"))?;
        }
        let a = self.queue.pop_front().expect("queue is never empty");
        let steps = self.refresh(a)?;
        self.queue.push_back(a);
        self.stats.queue_ops += 2;
        self.stats.background_steps += steps as u64;
        if steps == 0 {
            self.stats.background_idle += 1;
        }
        self.stats.foreground_steps += self.refresh(label)? as u64;
        Ok(())
    }

    /// Checks every leaf against its weight window for the next position.
    pub fn check_window(&self) -> std::result::Result<(), String> {
        if self.restrict.is_some() {
            return Err("the window applies to the unrestricted coder".into());
        }
        let i = self.processed + 1;
        let n = self.n as u64;
        for h in self.tree.leaves() {
            let label = self.tree.label(h).map_err(|e| e.to_string())?;
            let c = self.count(label) as u128;
            let w = self.tree.weight(h).map_err(|e| e.to_string())?;
            let lo = -(ceil_log2_ratio((i + n) as u128, c) as i32);
            let hi = -(ceil_log2_ratio(i.max(n) as u128, c) as i32);
            if w < lo || w > hi {
                return Err(format!(
                    "{label:?} has weight {w}, window [{lo}, {hi}] at i = {i}"
                ));
            }
        }
        if self.queue.len() != self.tree.leaf_count() {
            return Err("queue and tree disagree on the leaf set".into());
        }
        Ok(())
    }
}

impl DynamicCoder for DynamicShannonCoder {
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
        let out = match self.leaves[s as usize] {
            Some(h) => self.tree.codeword_of(h)?,
            None => {
                let esc = self.escape.expect("unseen symbols imply an escape leaf");
                let mut out = self.tree.codeword_of(esc)?;
                out.append(&index_bits(s as u64, self.n as u64)?);
                out
            }
        };
        self.update(s)?;
        Ok(out)
    }

    fn decode_symbol(&mut self, src: &mut dyn BitSource) -> Result<u32> {
        let s = match self.tree.decode_symbol(src)? {
            Label::Symbol(s) => s,
            Label::Escape => {
                let s = src.read_uint(index_width(self.n as u64))? as u32;
                if s >= self.n || self.leaves[s as usize].is_some() {
                    return Err(Error::Corrupt(format!(
                        "escape followed by invalid index {s}"
                    )));
                }
                s
            }
        };
        self.update(s)?;
        Ok(s)
    }

    fn touches(&self) -> u64 {
        self.tree.stats().touches + self.stats.queue_ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitio::BitCursor;

    #[test]
    fn first_symbol_example() {
        let mut c = DynamicShannonCoder::new(2).unwrap();
        assert_eq!(c.leaf_weight(Label::Escape), Some(-2));
        let out = c.encode_symbol(1).unwrap();
        // escape codeword is empty in a one-leaf tree, then one index bit
        assert_eq!(out.to_string(), "1");
        c.check_window().unwrap();
    }

    #[test]
    fn empty_input_roundtrips() {
        let c = DynamicShannonCoder::new(16).unwrap();
        assert_eq!(c.processed(), 0);
        assert_eq!(c.queue_len(), 1);
    }

    #[test]
    fn decoder_mirrors_encoder() {
        let msg = [1u32, 1, 0, 3, 1, 1, 2, 0, 0, 0, 1, 3, 3];
        let mut enc = DynamicShannonCoder::new(4).unwrap();
        let mut dec = DynamicShannonCoder::new(4).unwrap();
        for &s in &msg {
            let cw = enc.encode_symbol(s).unwrap();
            let mut cur = BitCursor::new(&cw);
            assert_eq!(dec.decode_symbol(&mut cur).unwrap(), s);
            assert_eq!(cur.remaining(), 0);
            assert_eq!(enc.tree().shape_digest(), dec.tree().shape_digest());
            enc.check_window().unwrap();
            assert!(enc.stats().max_refresh_steps <= 1);
        }
    }

    #[test]
    fn restricted_drops_escape_when_alphabet_completes() {
        let mut c =
            DynamicShannonCoder::restricted(3, RestrictedParams::new(1, false).unwrap()).unwrap();
        for s in [0, 1, 0] {
            c.encode_symbol(s).unwrap();
        }
        assert!(c.has_escape());
        c.encode_symbol(2).unwrap();
        assert!(!c.has_escape());
        assert_eq!(c.tree().leaf_count(), 3);
        assert_eq!(c.queue_len(), 3);
    }
}
