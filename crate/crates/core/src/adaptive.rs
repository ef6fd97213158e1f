//! The simple dynamic framework: before each character, build a static code
//! for the history seen so far (with one escape occurrence in front), emit the
//! character's codeword, or the escape's codeword and its alphabet index if
//! the character is new, then count it.
//!
//! With [`ShannonConstructor`] this is simple dynamic Shannon coding. The
//! Mehlhorn and Krause constructors give the straightforward versions of the
//! alphabetic and unequal-cost coders, used as references for the efficient
//! ones.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::alphabetic::{mehlhorn_codeword, mehlhorn_length, mehlhorn_numerator};
use crate::bitio::{index_bits, index_width, BitSource, BitString};
use crate::codec::DynamicCoder;
use crate::error::{Error, Result};
use crate::math::ceil_log2_ratio;
use crate::minimax::{Label, MinimaxTree};
use crate::unequal_cost::{krause_codeword, krause_decode, CostModel, SortedCounts};

/// Counts over the processed prefix `s₁ ⋯ s_{i−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    n: u32,
    counts: Vec<u64>,
    processed: u64,
}

impl Context {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            counts: vec![0; n as usize],
            processed: 0,
        }
    }

    pub fn alphabet_size(&self) -> u32 {
        self.n
    }

    /// `i`, the length of the escape-prefixed history.
    pub fn position(&self) -> u64 {
        self.processed + 1
    }

    /// Characters processed so far (`i − 1`).
    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Count in the escape-prefixed history; the escape always counts once.
    pub fn count(&self, label: Label) -> u64 {
        match label {
            Label::Escape => 1,
            Label::Symbol(s) => self.counts[s as usize],
        }
    }

    pub fn seen(&self, s: u32) -> bool {
        self.counts[s as usize] > 0
    }

    fn add(&mut self, s: u32) {
        self.counts[s as usize] += 1;
        self.processed += 1;
    }
}

/// A static code construction driven by the current context.
pub trait CodeConstructor {
    /// Whether unseen characters are sent as escape plus index.
    fn uses_escape(&self) -> bool {
        true
    }

    /// Called after `s` has been counted.
    fn observe(&mut self, _ctx: &Context, _s: u32) {}

    fn codeword(&mut self, ctx: &Context, target: Label) -> Result<BitString>;

    fn decode(&mut self, ctx: &Context, src: &mut dyn BitSource) -> Result<Label>;

    fn touches(&self) -> u64 {
        0
    }
}

/// Shannon's construction: a minimax tree over weights `−⌈log(i / #ₐ)⌉`.
///
/// The tree is rebuilt from scratch whenever any weight changes. Weights
/// only change when a count changes or when `i` passes `#ₐ·2ᵏ`, so the next
/// such position is kept in a heap per leaf.
#[derive(Clone, Debug, Default)]
pub struct ShannonConstructor {
    labels: Vec<Label>,
    slot: HashMap<Label, usize>,
    weights: Vec<i32>,
    versions: Vec<u64>,
    due: BinaryHeap<Reverse<(u64, usize, u64)>>,
    dirty: bool,
    tree: Option<MinimaxTree>,
    retired_touches: u64,
    rebuilds: u64,
}

impl ShannonConstructor {
    pub fn new() -> Self {
        let mut c = Self::default();
        c.add_label(Label::Escape);
        c
    }

    pub fn rebuilds(&self) -> u64 {
        self.rebuilds
    }

    /// The current tree, after bringing it up to date with `ctx`.
    pub fn tree(&mut self, ctx: &Context) -> Result<&mut MinimaxTree> {
        self.sync(ctx)?;
        Ok(self.tree.as_mut().expect("synced"))
    }

    fn add_label(&mut self, label: Label) {
        self.slot.insert(label, self.labels.len());
        self.labels.push(label);
        self.weights.push(i32::MIN);
        self.versions.push(0);
    }

    fn refresh(&mut self, ctx: &Context, slot: usize) {
        let c = ctx.count(self.labels[slot]);
        let i = ctx.position();
        let len = ceil_log2_ratio(i as u128, c as u128);
        let w = -(len as i32);
        if w != self.weights[slot] {
            self.weights[slot] = w;
            self.dirty = true;
        }
        self.versions[slot] += 1;
        self.due
            .push(Reverse(((c << len) + 1, slot, self.versions[slot])));
    }

    fn sync(&mut self, ctx: &Context) -> Result<()> {
        if self.weights[0] == i32::MIN {
            self.refresh(ctx, 0);
        }
        let i = ctx.position();
        while let Some(&Reverse((at, slot, version))) = self.due.peek() {
            if at > i {
                break;
            }
            self.due.pop();
            if version == self.versions[slot] {
                self.refresh(ctx, slot);
            }
        }
        if self.dirty || self.tree.is_none() {
            let weights: Vec<(Label, i32)> = self
                .labels
                .iter()
                .copied()
                .zip(self.weights.iter().copied())
                .collect();
            if let Some(old) = self.tree.take() {
                self.retired_touches += old.stats().touches;
            }
            self.retired_touches += weights.len() as u64;
            self.tree = Some(MinimaxTree::build(&weights)?);
            self.rebuilds += 1;
            self.dirty = false;
        }
        Ok(())
    }
}

impl CodeConstructor for ShannonConstructor {
    fn observe(&mut self, ctx: &Context, s: u32) {
        let label = Label::Symbol(s);
        if !self.slot.contains_key(&label) {
            self.add_label(label);
        }
        self.refresh(ctx, self.slot[&label]);
    }

    fn codeword(&mut self, ctx: &Context, target: Label) -> Result<BitString> {
        let tree = self.tree(ctx)?;
        let h = tree
            .leaf(target)
            .ok_or_else(|| Error::InvalidParameter(format!("{target:?} has no leaf")))?;
        tree.codeword_of(h)
    }

    fn decode(&mut self, ctx: &Context, src: &mut dyn BitSource) -> Result<Label> {
        self.tree(ctx)?.decode_symbol(src)
    }

    fn touches(&self) -> u64 {
        self.retired_touches + self.tree.as_ref().map_or(0, |t| t.stats().touches)
    }
}

/// Mehlhorn's alphabetic construction over all `n` symbols, recomputed by
/// linear scans. Needs no escape.
#[derive(Clone, Copy, Debug, Default)]
pub struct MehlhornConstructor;

impl CodeConstructor for MehlhornConstructor {
    fn uses_escape(&self) -> bool {
        false
    }

    fn codeword(&mut self, ctx: &Context, target: Label) -> Result<BitString> {
        match target {
            Label::Symbol(a) => mehlhorn_codeword(ctx.counts(), a),
            Label::Escape => Err(Error::InvalidParameter(
                "alphabetic codes have no escape".into(),
            )),
        }
    }

    fn decode(&mut self, ctx: &Context, src: &mut dyn BitSource) -> Result<Label> {
        let counts = ctx.counts();
        let n = counts.len() as u64;
        let d = ctx.processed() + n;
        let mut cum = 0u64;
        let table: Vec<(u128, u32)> = counts
            .iter()
            .enumerate()
            .map(|(a, &c)| {
                let entry = (mehlhorn_numerator(cum, a as u64, c), mehlhorn_length(d, c));
                cum += c;
                entry
            })
            .collect();
        let max_len = table.iter().map(|e| e.1).max().unwrap_or(0);
        let mut x = 0u128;
        for k in 1..=max_len {
            x = (x << 1) | src.read_bit()? as u128;
            // codeword of a is the first k bits of num / 2d
            let hit = table
                .iter()
                .position(|&(num, len)| len == k && (num << k) / (2 * d as u128) == x);
            if let Some(a) = hit {
                return Ok(Label::Symbol(a as u32));
            }
        }
        Err(Error::Corrupt("bits match no alphabetic codeword".into()))
    }
}

/// Krause's construction over the escape-prefixed counts, materialized from
/// scratch for every character. The escape is ordered as symbol `n`.
#[derive(Clone, Copy, Debug)]
pub struct KrauseConstructor {
    model: CostModel,
}

impl KrauseConstructor {
    pub fn new(model: CostModel) -> Self {
        Self { model }
    }

    fn sorted(ctx: &Context) -> SortedCounts {
        let mut counts = ctx.counts().to_vec();
        counts.push(1);
        SortedCounts::new(&counts)
    }
}

impl CodeConstructor for KrauseConstructor {
    fn codeword(&mut self, ctx: &Context, target: Label) -> Result<BitString> {
        let a = match target {
            Label::Escape => ctx.alphabet_size(),
            Label::Symbol(s) => s,
        };
        krause_codeword(&mut Self::sorted(ctx), &self.model, a)
    }

    fn decode(&mut self, ctx: &Context, src: &mut dyn BitSource) -> Result<Label> {
        let a = krause_decode(&mut Self::sorted(ctx), &self.model, src)?;
        Ok(if a == ctx.alphabet_size() {
            Label::Escape
        } else {
            Label::Symbol(a)
        })
    }
}

/// The generic simple dynamic coder.
#[derive(Clone, Debug)]
pub struct SimpleCoder<C> {
    ctx: Context,
    constructor: C,
}

impl<C: CodeConstructor> SimpleCoder<C> {
    pub fn new(n: u32, constructor: C) -> Result<Self> {
        let min = if constructor.uses_escape() { 1 } else { 2 };
        if n < min {
            return Err(Error::InvalidParameter(format!(
                "alphabet size must be at least {min}"
            )));
        }
        Ok(Self {
            ctx: Context::new(n),
            constructor,
        })
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn constructor_mut(&mut self) -> (&Context, &mut C) {
        (&self.ctx, &mut self.constructor)
    }

    fn update(&mut self, s: u32) {
        self.ctx.add(s);
        self.constructor.observe(&self.ctx, s);
    }
}

impl<C: CodeConstructor> DynamicCoder for SimpleCoder<C> {
    fn alphabet_size(&self) -> u32 {
        self.ctx.n
    }

    fn encode_symbol(&mut self, s: u32) -> Result<BitString> {
        if s >= self.ctx.n {
            return Err(Error::SymbolOutOfRange {
                symbol: s as u64,
                alphabet: self.ctx.n as u64,
            });
        }
        let out = if !self.constructor.uses_escape() || self.ctx.seen(s) {
            self.constructor.codeword(&self.ctx, Label::Symbol(s))?
        } else {
            let mut out = self.constructor.codeword(&self.ctx, Label::Escape)?;
            out.append(&index_bits(s as u64, self.ctx.n as u64)?);
            out
        };
        self.update(s);
        Ok(out)
    }

    fn decode_symbol(&mut self, src: &mut dyn BitSource) -> Result<u32> {
        let s = match self.constructor.decode(&self.ctx, src)? {
            Label::Symbol(s) => s,
            Label::Escape => {
                let s = src.read_uint(index_width(self.ctx.n as u64))? as u32;
                if s >= self.ctx.n || self.ctx.seen(s) {
                    return Err(Error::Corrupt(format!(
                        "escape followed by invalid index {s}"
                    )));
                }
                s
            }
        };
        self.update(s);
        Ok(s)
    }

    fn touches(&self) -> u64 {
        self.constructor.touches()
    }
}
