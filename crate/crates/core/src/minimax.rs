//! Minimax code-trees.
//!
//! A minimax tree over leaf weights `w₁ … wₖ` minimises `max(wᵢ + depthᵢ)`.
//! Golumbic's construction repeatedly merges the two lightest roots into a
//! parent of weight `max + 1`; with leaf weights `-dᵢ` taken from a
//! Kraft-feasible depth sequence, every node of the result sits at depth at
//! most the negative of its weight, which is exactly what a Shannon code-tree
//! needs.
//!
//! The tree is also maintained dynamically. Every internal node keeps
//! `weight = max(children) + 1`, so the depth bound holds everywhere as long
//! as the root weight is at most zero. Updates repair weights along the leaf's
//! root path; when a repair would push the root above zero the leaf is
//! detached and re-attached under a node with spare capacity, and if no such
//! node exists the tree is rebuilt from the leaf weights.

use std::collections::{HashMap, VecDeque};

use crate::bitio::{BitSource, BitString};
use crate::error::{Error, Result};
use crate::math::ceil_log2;

/// Leaf label: an alphabet symbol or the escape pseudo-symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Escape,
    Symbol(u32),
}

/// Smallest leaf weight accepted; depths beyond 64 never arise for supported inputs.
pub const MIN_WEIGHT: i32 = -64;
/// Largest leaf weight accepted by [`MinimaxTree::build`].
pub const MAX_WEIGHT: i32 = 63;

const NIL: u32 = u32::MAX;
const KRAFT_ONE: u128 = 1 << 64;

/// Stable reference to a leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LeafHandle {
    index: u32,
    generation: u32,
}

#[derive(Clone, Debug)]
struct Node {
    parent: u32,
    left: u32,
    right: u32,
    weight: i32,
    label: Option<Label>,
    seq: u64,
    generation: u32,
    live: bool,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.label.is_some()
    }
}

/// Operation counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TreeStats {
    /// Nodes visited or created by any operation.
    pub touches: u64,
    pub increments: u64,
    pub decrements: u64,
    pub local_repairs: u64,
    pub rebuilds: u64,
}

#[derive(Clone, Debug)]
pub struct MinimaxTree {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    /// Live leaves in creation order.
    leaves: Vec<u32>,
    by_label: HashMap<Label, u32>,
    /// Σ 2^(64 + w) over leaves, saturating.
    kraft: u128,
    next_seq: u64,
    stats: TreeStats,
}

fn kraft_term(w: i32) -> u128 {
    if w < MIN_WEIGHT {
        0
    } else {
        1u128 << (64 + w).min(127) as u32
    }
}

impl MinimaxTree {
    /// Golumbic's construction. Ties between equal-weight roots go to the
    /// earlier-created root, and leaves are created in list order.
    pub fn build(weights: &[(Label, i32)]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyWeights);
        }
        let mut tree = MinimaxTree {
            nodes: Vec::with_capacity(2 * weights.len()),
            free: Vec::new(),
            root: NIL,
            leaves: Vec::with_capacity(weights.len()),
            by_label: HashMap::with_capacity(weights.len()),
            kraft: 0,
            next_seq: 0,
            stats: TreeStats::default(),
        };
        for &(label, w) in weights {
            if !(MIN_WEIGHT..=MAX_WEIGHT).contains(&w) {
                return Err(Error::WeightOutOfRange(w as i64));
            }
            if tree.by_label.contains_key(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            let idx = tree.alloc(w, Some(label));
            tree.by_label.insert(label, idx);
            tree.leaves.push(idx);
            tree.kraft = tree.kraft.saturating_add(kraft_term(w));
        }
        tree.merge_all();
        Ok(tree)
    }

    fn alloc(&mut self, weight: i32, label: Option<Label>) -> u32 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.stats.touches += 1;
        if let Some(idx) = self.free.pop() {
            let n = &mut self.nodes[idx as usize];
            n.parent = NIL;
            n.left = NIL;
            n.right = NIL;
            n.weight = weight;
            n.label = label;
            n.seq = seq;
            n.live = true;
            idx
        } else {
            self.nodes.push(Node {
                parent: NIL,
                left: NIL,
                right: NIL,
                weight,
                label,
                seq,
                generation: 0,
                live: true,
            });
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, idx: u32) {
        let n = &mut self.nodes[idx as usize];
        n.live = false;
        n.label = None;
        n.generation = n.generation.wrapping_add(1);
        self.free.push(idx);
    }

    /// Golumbic merging over the current leaves, with a bucket queue per
    /// weight level. New roots are always the latest created, so appending
    /// to a level's FIFO keeps creation order within the level.
    fn merge_all(&mut self) {
        let k = self.leaves.len();
        let (mut lo, mut hi) = (i32::MAX, i32::MIN);
        for &l in &self.leaves {
            let w = self.nodes[l as usize].weight;
            lo = lo.min(w);
            hi = hi.max(w);
            self.nodes[l as usize].parent = NIL;
        }
        let span = (hi - lo) as usize + ceil_log2(k as u128) as usize + 2;
        let mut levels: Vec<VecDeque<u32>> = vec![VecDeque::new(); span];
        for &l in &self.leaves {
            levels[(self.nodes[l as usize].weight - lo) as usize].push_back(l);
        }
        let mut cursor = 0usize;
        let mut pop = |levels: &mut Vec<VecDeque<u32>>| -> u32 {
            while levels[cursor].is_empty() {
                cursor += 1;
            }
            levels[cursor].pop_front().expect("non-empty level")
        };
        for _ in 1..k {
            let a = pop(&mut levels);
            let b = pop(&mut levels);
            let w = self.nodes[a as usize]
                .weight
                .max(self.nodes[b as usize].weight)
                + 1;
            let p = self.alloc(w, None);
            self.nodes[p as usize].left = a;
            self.nodes[p as usize].right = b;
            self.nodes[a as usize].parent = p;
            self.nodes[b as usize].parent = p;
            levels[(w - lo) as usize].push_back(p);
            self.stats.touches += 2;
        }
        self.root = pop(&mut levels);
        self.nodes[self.root as usize].parent = NIL;
    }

    /// Discards all internal nodes and re-runs Golumbic's construction.
    fn rebuild(&mut self) {
        self.stats.rebuilds += 1;
        for idx in 0..self.nodes.len() as u32 {
            let n = &self.nodes[idx as usize];
            if n.live && !n.is_leaf() {
                self.release(idx);
            }
        }
        self.merge_all();
    }

    fn resolve(&self, h: LeafHandle) -> Result<u32> {
        match self.nodes.get(h.index as usize) {
            Some(n) if n.live && n.is_leaf() && n.generation == h.generation => Ok(h.index),
            _ => Err(Error::StaleHandle),
        }
    }

    fn handle(&self, idx: u32) -> LeafHandle {
        LeafHandle {
            index: idx,
            generation: self.nodes[idx as usize].generation,
        }
    }

    pub fn leaf(&self, label: Label) -> Option<LeafHandle> {
        self.by_label.get(&label).map(|&i| self.handle(i))
    }

    /// Leaf handles in creation order.
    pub fn leaves(&self) -> Vec<LeafHandle> {
        self.leaves.iter().map(|&i| self.handle(i)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn label(&self, h: LeafHandle) -> Result<Label> {
        Ok(self.nodes[self.resolve(h)? as usize].label.expect("leaf"))
    }

    pub fn weight(&self, h: LeafHandle) -> Result<i32> {
        Ok(self.nodes[self.resolve(h)? as usize].weight)
    }

    pub fn depth(&self, h: LeafHandle) -> Result<usize> {
        let mut v = self.resolve(h)?;
        let mut d = 0;
        while self.nodes[v as usize].parent != NIL {
            v = self.nodes[v as usize].parent;
            d += 1;
        }
        Ok(d)
    }

    pub fn root_weight(&self) -> i32 {
        self.nodes[self.root as usize].weight
    }

    pub fn stats(&self) -> TreeStats {
        self.stats
    }

    /// Σ 2^w over the leaves, scaled by 2⁶⁴ (saturating).
    pub fn kraft_scaled(&self) -> u128 {
        self.kraft
    }

    /// `max(weight + depth)` over the leaves, computed by traversal.
    pub fn minimax_cost(&self) -> i64 {
        let mut best = i64::MIN;
        let mut stack = vec![(self.root, 0i64)];
        while let Some((v, d)) = stack.pop() {
            let n = &self.nodes[v as usize];
            if n.is_leaf() {
                best = best.max(n.weight as i64 + d);
            } else {
                stack.push((n.left, d + 1));
                stack.push((n.right, d + 1));
            }
        }
        best
    }

    /// Root-to-leaf edge labels (left = 0, right = 1).
    pub fn codeword_of(&mut self, h: LeafHandle) -> Result<BitString> {
        let mut v = self.resolve(h)?;
        let mut rev = Vec::new();
        loop {
            self.stats.touches += 1;
            let p = self.nodes[v as usize].parent;
            if p == NIL {
                break;
            }
            rev.push(self.nodes[p as usize].right == v);
            v = p;
        }
        Ok(rev.into_iter().rev().collect())
    }

    /// Walks from the root consuming one bit per edge; returns the leaf reached.
    pub fn decode_leaf(&mut self, src: &mut dyn BitSource) -> Result<LeafHandle> {
        let mut v = self.root;
        loop {
            self.stats.touches += 1;
            let n = &self.nodes[v as usize];
            if n.is_leaf() {
                return Ok(self.handle(v));
            }
            v = if src.read_bit()? { n.right } else { n.left };
        }
    }

    pub fn decode_symbol(&mut self, src: &mut dyn BitSource) -> Result<Label> {
        let h = self.decode_leaf(src)?;
        self.label(h)
    }

    /// Recomputes `max(children) + 1` upward from `v` until nothing changes.
    fn propagate(&mut self, mut v: u32) {
        while v != NIL {
            self.stats.touches += 1;
            let n = &self.nodes[v as usize];
            let w = self.nodes[n.left as usize]
                .weight
                .max(self.nodes[n.right as usize].weight)
                + 1;
            if w == n.weight {
                break;
            }
            self.nodes[v as usize].weight = w;
            v = self.nodes[v as usize].parent;
        }
    }

    /// Unlinks leaf `v` from the tree; its sibling takes the parent's place.
    fn detach(&mut self, v: u32) {
        let p = self.nodes[v as usize].parent;
        debug_assert!(p != NIL, "cannot detach the root");
        let pn = &self.nodes[p as usize];
        let sibling = if pn.left == v { pn.right } else { pn.left };
        let g = pn.parent;
        self.nodes[sibling as usize].parent = g;
        if g == NIL {
            self.root = sibling;
        } else if self.nodes[g as usize].left == p {
            self.nodes[g as usize].left = sibling;
        } else {
            self.nodes[g as usize].right = sibling;
        }
        self.nodes[v as usize].parent = NIL;
        self.release(p);
        self.stats.touches += 2;
        self.propagate(g);
    }

    /// Replaces node `x` by a new internal node with children `x` and leaf `v`.
    fn splice(&mut self, x: u32, v: u32) -> u32 {
        let w = self.nodes[x as usize]
            .weight
            .max(self.nodes[v as usize].weight)
            + 1;
        let g = self.nodes[x as usize].parent;
        let u = self.alloc(w, None);
        self.nodes[u as usize].left = x;
        self.nodes[u as usize].right = v;
        self.nodes[u as usize].parent = g;
        self.nodes[x as usize].parent = u;
        self.nodes[v as usize].parent = u;
        if g == NIL {
            self.root = u;
        } else if self.nodes[g as usize].left == x {
            self.nodes[g as usize].left = u;
        } else {
            self.nodes[g as usize].right = u;
        }
        self.stats.touches += 2;
        self.propagate(g);
        u
    }

    /// Finds a node of weight ≤ `w` whose parent has weight ≥ `w + 2`;
    /// splicing a leaf of weight `w` there changes no other weight.
    fn find_slot(&mut self, w: i32) -> Option<u32> {
        let root = &self.nodes[self.root as usize];
        if root.weight <= w && w < 0 {
            return Some(self.root);
        }
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            self.stats.touches += 1;
            let n = &self.nodes[v as usize];
            if n.is_leaf() || n.weight < w + 2 {
                continue;
            }
            for c in [n.left, n.right] {
                if self.nodes[c as usize].weight <= w {
                    return Some(c);
                }
            }
            stack.push(n.right);
            stack.push(n.left);
        }
        None
    }

    /// Restores `root ≤ 0` after leaf `v`'s weight rose: move `v` into spare
    /// capacity if there is any, otherwise rebuild.
    fn repair_after_raise(&mut self, v: u32) {
        if self.root_weight() <= 0 {
            return;
        }
        if self.nodes[v as usize].parent != NIL {
            self.detach(v);
            let w = self.nodes[v as usize].weight;
            if let Some(x) = self.find_slot(w) {
                self.splice(x, v);
                if self.root_weight() <= 0 {
                    self.stats.local_repairs += 1;
                    return;
                }
            } else {
                // park the leaf anywhere; the rebuild below ignores shape
                let root = self.root;
                self.splice(root, v);
            }
        }
        self.rebuild();
    }

    fn check_kraft(&self, kraft: u128) -> Result<()> {
        if kraft > KRAFT_ONE {
            Err(Error::KraftInfeasible)
        } else {
            Ok(())
        }
    }

    pub fn increment_weight(&mut self, h: LeafHandle) -> Result<()> {
        let v = self.resolve(h)?;
        let w = self.nodes[v as usize].weight;
        let kraft = self.kraft - kraft_term(w) + kraft_term(w + 1);
        self.check_kraft(kraft)?;
        self.kraft = kraft;
        self.stats.increments += 1;
        self.nodes[v as usize].weight = w + 1;
        let p = self.nodes[v as usize].parent;
        self.propagate(p);
        self.repair_after_raise(v);
        Ok(())
    }

    pub fn decrement_weight(&mut self, h: LeafHandle) -> Result<()> {
        let v = self.resolve(h)?;
        let w = self.nodes[v as usize].weight;
        if w - 1 < MIN_WEIGHT {
            return Err(Error::WeightOutOfRange(w as i64 - 1));
        }
        self.kraft = self.kraft - kraft_term(w) + kraft_term(w - 1);
        self.stats.decrements += 1;
        self.nodes[v as usize].weight = w - 1;
        let p = self.nodes[v as usize].parent;
        self.propagate(p);
        Ok(())
    }

    /// Moves a leaf's weight to `target` one unit at a time; returns the number of steps.
    pub fn move_weight(&mut self, h: LeafHandle, target: i32) -> Result<u32> {
        let mut steps = 0;
        loop {
            let w = self.weight(h)?;
            match w.cmp(&target) {
                std::cmp::Ordering::Less => self.increment_weight(h)?,
                std::cmp::Ordering::Greater => self.decrement_weight(h)?,
                std::cmp::Ordering::Equal => return Ok(steps),
            }
            steps += 1;
        }
    }

    /// Adds a leaf labelled `label` with the same weight as `h`.
    pub fn insert_leaf_like(&mut self, h: LeafHandle, label: Label) -> Result<LeafHandle> {
        let v = self.resolve(h)?;
        if self.by_label.contains_key(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let w = self.nodes[v as usize].weight;
        let kraft = self.kraft.saturating_add(kraft_term(w));
        self.check_kraft(kraft)?;
        self.kraft = kraft;
        let leaf = self.alloc(w, Some(label));
        self.leaves.push(leaf);
        self.by_label.insert(label, leaf);
        self.splice(v, leaf);
        self.repair_after_raise(leaf);
        Ok(self.handle(leaf))
    }

    /// Removes a leaf. The last remaining leaf cannot be removed.
    pub fn delete_leaf(&mut self, h: LeafHandle) -> Result<()> {
        let v = self.resolve(h)?;
        if self.leaves.len() == 1 {
            return Err(Error::InvalidParameter(
                "cannot delete the only leaf".into(),
            ));
        }
        self.detach(v);
        let label = self.nodes[v as usize].label.expect("leaf");
        self.kraft -= kraft_term(self.nodes[v as usize].weight);
        self.by_label.remove(&label);
        self.leaves.retain(|&l| l != v);
        self.release(v);
        Ok(())
    }

    /// Gives a leaf a new label, keeping its position and weight.
    pub fn relabel(&mut self, h: LeafHandle, label: Label) -> Result<()> {
        let v = self.resolve(h)?;
        if self.by_label.contains_key(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        let old = self.nodes[v as usize].label.replace(label).expect("leaf");
        self.by_label.remove(&old);
        self.by_label.insert(label, v);
        Ok(())
    }

    /// All `(label, codeword)` pairs in leaf creation order.
    pub fn codewords(&mut self) -> Vec<(Label, BitString)> {
        self.leaves()
            .into_iter()
            .map(|h| {
                (
                    self.label(h).expect("live"),
                    self.codeword_of(h).expect("live"),
                )
            })
            .collect()
    }

    /// Checks parent/child links, two children per internal node, and
    /// `weight = max(children) + 1` at every internal node.
    pub fn check_structure(&self) -> std::result::Result<(), String> {
        let mut seen = 0usize;
        let mut stack = vec![self.root];
        if self.nodes[self.root as usize].parent != NIL {
            return Err("root has a parent".into());
        }
        while let Some(v) = stack.pop() {
            let n = &self.nodes[v as usize];
            if !n.live {
                return Err(format!("dead node {v} reachable"));
            }
            if n.is_leaf() {
                seen += 1;
                continue;
            }
            for c in [n.left, n.right] {
                if c == NIL {
                    return Err(format!("internal node {v} has a missing child"));
                }
                if self.nodes[c as usize].parent != v {
                    return Err(format!("child {c} does not point back to {v}"));
                }
                stack.push(c);
            }
            let expect = self.nodes[n.left as usize]
                .weight
                .max(self.nodes[n.right as usize].weight)
                + 1;
            if n.weight != expect {
                return Err(format!("node {v} weight {} != {expect}", n.weight));
            }
        }
        if seen != self.leaves.len() {
            return Err(format!(
                "{seen} reachable leaves, {} recorded",
                self.leaves.len()
            ));
        }
        Ok(())
    }

    /// Checks `depth ≤ -weight` at every node.
    pub fn check_depth_bound(&self) -> std::result::Result<(), String> {
        let mut stack = vec![(self.root, 0i64)];
        while let Some((v, d)) = stack.pop() {
            let n = &self.nodes[v as usize];
            if d > -(n.weight as i64) {
                return Err(format!("node {v} at depth {d} has weight {}", n.weight));
            }
            if !n.is_leaf() {
                stack.push((n.left, d + 1));
                stack.push((n.right, d + 1));
            }
        }
        Ok(())
    }

    /// A hash of the tree shape, labels and weights, for encoder/decoder comparison.
    pub fn shape_digest(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            let n = &self.nodes[v as usize];
            n.weight.hash(&mut h);
            n.label.hash(&mut h);
            if !n.is_leaf() {
                stack.push(n.right);
                stack.push(n.left);
            }
        }
        h.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitio::BitCursor;

    fn sym(i: u32) -> Label {
        Label::Symbol(i)
    }

    fn labelled(ws: &[i32]) -> Vec<(Label, i32)> {
        ws.iter()
            .enumerate()
            .map(|(i, &w)| (sym(i as u32), w))
            .collect()
    }

    #[test]
    fn golumbic_hand_example() {
        let mut t = MinimaxTree::build(&labelled(&[-1, -2, -2])).unwrap();
        assert_eq!(t.root_weight(), 0);
        assert_eq!(t.minimax_cost(), 0);
        let a = t.leaf(sym(0)).unwrap();
        let b = t.leaf(sym(1)).unwrap();
        let c = t.leaf(sym(2)).unwrap();
        assert_eq!(t.depth(a).unwrap(), 1);
        assert_eq!(t.depth(b).unwrap(), 2);
        assert_eq!(t.depth(c).unwrap(), 2);
        assert_eq!(t.codeword_of(a).unwrap().len(), 1);
        assert_eq!(t.codeword_of(b).unwrap().len(), 2);
        assert_eq!(t.codeword_of(c).unwrap().len(), 2);
        // a was created first, so it wins the tie at weight -1 and goes left
        assert_eq!(t.codeword_of(a).unwrap().to_string(), "0");
        assert_eq!(t.codeword_of(b).unwrap().to_string(), "10");
    }

    #[test]
    fn single_leaf_has_empty_codeword() {
        let mut t = MinimaxTree::build(&[(sym(0), 0)]).unwrap();
        assert_eq!(t.minimax_cost(), 0);
        let h = t.leaf(sym(0)).unwrap();
        assert!(t.codeword_of(h).unwrap().is_empty());
        let empty = BitString::new();
        let mut src = BitCursor::new(&empty);
        assert_eq!(t.decode_symbol(&mut src).unwrap(), sym(0));
        assert_eq!(src.position(), 0);

        let t = MinimaxTree::build(&[(sym(0), -7)]).unwrap();
        assert_eq!(t.minimax_cost(), -7);
    }

    #[test]
    fn cost_of_flat_weights() {
        assert_eq!(
            MinimaxTree::build(&labelled(&[0, 0, 0]))
                .unwrap()
                .minimax_cost(),
            2
        );
        assert_eq!(
            MinimaxTree::build(&labelled(&[0, 0, 0, 0]))
                .unwrap()
                .minimax_cost(),
            2
        );
    }

    #[test]
    fn left_left_leaf_decodes_from_00() {
        let mut t = MinimaxTree::build(&labelled(&[-2, -2, -2, -2])).unwrap();
        let h = t.leaf(sym(0)).unwrap();
        assert_eq!(t.codeword_of(h).unwrap().to_string(), "00");
        let bits: BitString = "0011".parse().unwrap();
        let mut src = BitCursor::new(&bits);
        assert_eq!(t.decode_symbol(&mut src).unwrap(), sym(0));
        assert_eq!(src.position(), 2);
    }

    #[test]
    fn decoding_runs_out_of_bits() {
        let mut t = MinimaxTree::build(&labelled(&[-2, -2, -2, -2])).unwrap();
        let bits: BitString = "0".parse().unwrap();
        let mut src = BitCursor::new(&bits);
        assert!(matches!(
            t.decode_symbol(&mut src),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn build_errors() {
        assert!(matches!(MinimaxTree::build(&[]), Err(Error::EmptyWeights)));
        assert!(matches!(
            MinimaxTree::build(&[(sym(0), -1), (sym(0), -1)]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            MinimaxTree::build(&[(sym(0), -65)]),
            Err(Error::WeightOutOfRange(_))
        ));
    }

    #[test]
    fn decrement_single_leaf() {
        let mut t = MinimaxTree::build(&[(Label::Escape, 0)]).unwrap();
        let h = t.leaf(Label::Escape).unwrap();
        t.decrement_weight(h).unwrap();
        assert_eq!(t.weight(h).unwrap(), -1);
        assert_eq!(t.depth(h).unwrap(), 0);
        t.check_depth_bound().unwrap();
    }

    #[test]
    fn decrement_keeps_depth_bound() {
        let mut t = MinimaxTree::build(&labelled(&[-1, -2, -2])).unwrap();
        let a = t.leaf(sym(0)).unwrap();
        t.decrement_weight(a).unwrap();
        t.check_structure().unwrap();
        t.check_depth_bound().unwrap();
        for h in t.leaves() {
            assert!(t.depth(h).unwrap() <= 2);
        }
    }

    #[test]
    fn increment_then_decrement_restores_weights() {
        let mut t = MinimaxTree::build(&labelled(&[-2, -3, -3, -3, -3, -4, -4])).unwrap();
        let h = t.leaf(sym(2)).unwrap();
        t.increment_weight(h).unwrap();
        t.check_structure().unwrap();
        t.check_depth_bound().unwrap();
        t.decrement_weight(h).unwrap();
        t.check_structure().unwrap();
        t.check_depth_bound().unwrap();
        let mut ws: Vec<i32> = t.leaves().iter().map(|&h| t.weight(h).unwrap()).collect();
        ws.sort();
        assert_eq!(ws, vec![-4, -4, -3, -3, -3, -3, -2]);
    }

    #[test]
    fn infeasible_increment_is_rejected() {
        let mut t = MinimaxTree::build(&labelled(&[-1, -1])).unwrap();
        let h = t.leaf(sym(0)).unwrap();
        assert!(matches!(t.increment_weight(h), Err(Error::KraftInfeasible)));
        // untouched on error
        assert_eq!(t.weight(h).unwrap(), -1);
        t.check_depth_bound().unwrap();
    }

    #[test]
    fn insert_like_single_escape() {
        let mut t = MinimaxTree::build(&[(Label::Escape, -1)]).unwrap();
        let esc = t.leaf(Label::Escape).unwrap();
        let a = t.insert_leaf_like(esc, sym(0)).unwrap();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.weight(a).unwrap(), -1);
        assert_eq!(t.depth(a).unwrap(), 1);
        assert_eq!(t.depth(esc).unwrap(), 1);
        assert!(matches!(
            t.insert_leaf_like(esc, sym(0)),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            t.insert_leaf_like(esc, sym(1)),
            Err(Error::KraftInfeasible)
        ));
    }

    #[test]
    fn delete_and_relabel() {
        let mut t = MinimaxTree::build(&labelled(&[-1, -2, -2])).unwrap();
        let b = t.leaf(sym(1)).unwrap();
        t.delete_leaf(b).unwrap();
        assert!(matches!(t.weight(b), Err(Error::StaleHandle)));
        assert_eq!(t.leaf_count(), 2);
        t.check_structure().unwrap();
        t.check_depth_bound().unwrap();
        let c = t.leaf(sym(2)).unwrap();
        t.relabel(c, Label::Escape).unwrap();
        assert_eq!(t.label(c).unwrap(), Label::Escape);
        assert!(t.leaf(sym(2)).is_none());
        let a = t.leaf(sym(0)).unwrap();
        t.delete_leaf(c).unwrap();
        assert!(t.delete_leaf(a).is_err());
    }

    #[test]
    fn stale_handle_after_rebuild_stays_valid() {
        let mut t = MinimaxTree::build(&labelled(&[-2, -2, -2, -2])).unwrap();
        let hs = t.leaves();
        // forces restructuring: -2,-2,-2,-2 is tight
        t.decrement_weight(hs[3]).unwrap();
        t.decrement_weight(hs[2]).unwrap();
        t.increment_weight(hs[0]).unwrap();
        for h in &hs {
            assert!(t.weight(*h).is_ok());
        }
        t.check_structure().unwrap();
        t.check_depth_bound().unwrap();
    }
}
