//! Cumulative-frequency structures for the coders that only compute the
//! codeword they need.
//!
//! [`AlphaSumTree`] keeps symbols in alphabetical order in a splay tree whose
//! nodes carry subtree frequency sums. [`FreqOrderList`] keeps symbols in
//! non-increasing frequency order (ties by ascending symbol) over a Fenwick
//! tree indexed by list position.

use crate::error::{Error, Result};

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct SplayNode {
    key: u32,
    count: u64,
    sum: u64,
    left: u32,
    right: u32,
    parent: u32,
}

/// A present symbol together with the total frequency of all smaller symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub symbol: u32,
    pub before: u64,
    pub count: u64,
}

/// Result of [`AlphaSumTree::partition`]: the last present symbol satisfying
/// the predicate and the first one that does not.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Partition {
    pub last_true: Option<Entry>,
    pub first_false: Option<Entry>,
}

/// Splay tree keyed by symbol, augmented with subtree frequency sums.
#[derive(Clone, Debug, Default)]
pub struct AlphaSumTree {
    nodes: Vec<SplayNode>,
    root: u32,
    touches: u64,
}

impl AlphaSumTree {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            root: NIL,
            touches: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.sum(self.root)
    }

    /// Nodes visited so far, splaying included.
    pub fn touches(&self) -> u64 {
        self.touches
    }

    fn sum(&self, v: u32) -> u64 {
        if v == NIL {
            0
        } else {
            self.nodes[v as usize].sum
        }
    }

    fn pull(&mut self, v: u32) {
        let n = &self.nodes[v as usize];
        let s = self.sum(n.left) + self.sum(n.right) + n.count;
        self.nodes[v as usize].sum = s;
    }

    fn rotate(&mut self, x: u32) {
        let p = self.nodes[x as usize].parent;
        let g = self.nodes[p as usize].parent;
        if self.nodes[p as usize].left == x {
            let b = self.nodes[x as usize].right;
            self.nodes[p as usize].left = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[x as usize].right = p;
        } else {
            let b = self.nodes[x as usize].left;
            self.nodes[p as usize].right = b;
            if b != NIL {
                self.nodes[b as usize].parent = p;
            }
            self.nodes[x as usize].left = p;
        }
        self.nodes[p as usize].parent = x;
        self.nodes[x as usize].parent = g;
        if g == NIL {
            self.root = x;
        } else if self.nodes[g as usize].left == p {
            self.nodes[g as usize].left = x;
        } else {
            self.nodes[g as usize].right = x;
        }
        self.pull(p);
        self.pull(x);
    }

    fn splay(&mut self, x: u32) {
        while self.nodes[x as usize].parent != NIL {
            self.touches += 1;
            let p = self.nodes[x as usize].parent;
            let g = self.nodes[p as usize].parent;
            if g != NIL {
                let zig_zig =
                    (self.nodes[g as usize].left == p) == (self.nodes[p as usize].left == x);
                if zig_zig {
                    self.rotate(p);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    /// Descends towards `key`; returns the matching node or the last node visited.
    fn descend(&mut self, key: u32) -> (u32, u64) {
        let mut v = self.root;
        let mut last = NIL;
        let mut before = 0;
        while v != NIL {
            self.touches += 1;
            last = v;
            let n = &self.nodes[v as usize];
            if key == n.key {
                return (v, before + self.sum(n.left));
            }
            if key < n.key {
                v = n.left;
            } else {
                before += self.sum(n.left) + n.count;
                v = n.right;
            }
        }
        (last, before)
    }

    /// Total frequency of all symbols smaller than `a`.
    pub fn prefix_sum(&mut self, a: u32) -> u64 {
        if self.root == NIL {
            return 0;
        }
        let (v, before) = self.descend(a);
        self.splay(v);
        before
    }

    /// Frequency of `a` (zero when absent).
    pub fn count(&mut self, a: u32) -> u64 {
        if self.root == NIL {
            return 0;
        }
        let (v, _) = self.descend(a);
        self.splay(v);
        let n = &self.nodes[v as usize];
        if n.key == a {
            n.count
        } else {
            0
        }
    }

    /// Adds one occurrence of `a`, inserting it if absent, and splays it to the root.
    pub fn insert_or_increment(&mut self, a: u32) {
        let (v, _) = if self.root == NIL {
            (NIL, 0)
        } else {
            self.descend(a)
        };
        let target = if v != NIL && self.nodes[v as usize].key == a {
            self.nodes[v as usize].count += 1;
            v
        } else {
            self.nodes.push(SplayNode {
                key: a,
                count: 1,
                sum: 1,
                left: NIL,
                right: NIL,
                parent: v,
            });
            let x = (self.nodes.len() - 1) as u32;
            if v == NIL {
                self.root = x;
            } else if a < self.nodes[v as usize].key {
                self.nodes[v as usize].left = x;
            } else {
                self.nodes[v as usize].right = x;
            }
            x
        };
        let mut u = self.nodes[target as usize].parent;
        if self.nodes[target as usize].count > 1 {
            self.nodes[target as usize].sum += 1;
        }
        while u != NIL {
            self.nodes[u as usize].sum += 1;
            u = self.nodes[u as usize].parent;
        }
        self.splay(target);
    }

    /// Splits the present symbols by a predicate on `(symbol, before, count)`
    /// that holds for a (possibly empty) prefix of the symbols in order.
    pub fn partition<F>(&mut self, pred: F) -> Partition
    where
        F: Fn(Entry) -> bool,
    {
        let mut out = Partition {
            last_true: None,
            first_false: None,
        };
        let mut v = self.root;
        let mut last = NIL;
        let mut acc = 0;
        while v != NIL {
            self.touches += 1;
            last = v;
            let n = &self.nodes[v as usize];
            let e = Entry {
                symbol: n.key,
                before: acc + self.sum(n.left),
                count: n.count,
            };
            if pred(e) {
                out.last_true = Some(e);
                acc = e.before + e.count;
                v = n.right;
            } else {
                out.first_false = Some(e);
                v = n.left;
            }
        }
        if last != NIL {
            self.splay(last);
        }
        out
    }

    /// Checks subtree sums, parent links and in-order key order.
    pub fn check(&self) -> std::result::Result<(), String> {
        fn walk(t: &AlphaSumTree, v: u32, lo: Option<u32>, hi: Option<u32>) -> Result<u64, String> {
            if v == NIL {
                return Ok(0);
            }
            let n = &t.nodes[v as usize];
            if lo.is_some_and(|l| n.key <= l) || hi.is_some_and(|h| n.key >= h) {
                return Err(format!("key {} out of order", n.key));
            }
            for c in [n.left, n.right] {
                if c != NIL && t.nodes[c as usize].parent != v {
                    return Err(format!("broken parent link under {}", n.key));
                }
            }
            let s =
                walk(t, n.left, lo, Some(n.key))? + walk(t, n.right, Some(n.key), hi)? + n.count;
            if s != n.sum {
                return Err(format!("sum at {} is {}, expected {s}", n.key, n.sum));
            }
            Ok(s)
        }
        walk(self, self.root, None, None).map(|_| ())
    }
}

/// Symbols in non-increasing frequency order, ties by ascending symbol, with
/// prefix sums over list positions.
#[derive(Clone, Debug)]
pub struct FreqOrderList {
    order: Vec<u32>,
    pos: Vec<u32>,
    freq: Vec<u64>,
    /// 1-based Fenwick tree over positions.
    fenwick: Vec<u64>,
    total: u64,
    touches: u64,
}

impl FreqOrderList {
    /// A list over symbols `0..capacity`, initially empty.
    pub fn new(capacity: usize) -> Self {
        Self {
            order: Vec::with_capacity(capacity),
            pos: vec![NIL; capacity],
            freq: vec![0; capacity],
            fenwick: vec![0; capacity + 1],
            total: 0,
            touches: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn touches(&self) -> u64 {
        self.touches
    }

    /// Symbols in list order.
    pub fn symbols(&self) -> &[u32] {
        &self.order
    }

    pub fn contains(&self, a: u32) -> bool {
        self.pos.get(a as usize).is_some_and(|&p| p != NIL)
    }

    fn position(&self, a: u32) -> Result<usize> {
        match self.pos.get(a as usize) {
            Some(&p) if p != NIL => Ok(p as usize),
            _ => Err(Error::InvalidParameter(format!(
                "symbol {a} is not in the list"
            ))),
        }
    }

    fn precedes(&self, a: u32, b: u32) -> bool {
        let (fa, fb) = (self.freq[a as usize], self.freq[b as usize]);
        fa > fb || (fa == fb && a < b)
    }

    fn fenwick_add(&mut self, position: usize, delta: i64) {
        let mut i = position + 1;
        while i < self.fenwick.len() {
            self.touches += 1;
            self.fenwick[i] = self.fenwick[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of frequencies at positions `< position`.
    fn fenwick_prefix(&mut self, position: usize) -> u64 {
        let mut i = position;
        let mut s = 0;
        while i > 0 {
            self.touches += 1;
            s += self.fenwick[i];
            i &= i - 1;
        }
        s
    }

    pub fn freq_get(&self, a: u32) -> Result<u64> {
        Ok(self.freq[self.position(a).map(|_| a as usize)?])
    }

    /// Total frequency of the symbols ahead of `a` in the list.
    pub fn freq_before(&mut self, a: u32) -> Result<u64> {
        let p = self.position(a)?;
        Ok(self.fenwick_prefix(p))
    }

    /// The last symbol whose preceding total is at most `k`.
    pub fn freq_select(&mut self, k: u64) -> Result<u32> {
        if k >= self.total {
            return Err(Error::InvalidParameter(format!(
                "select({k}) with total frequency {}",
                self.total
            )));
        }
        let size = self.fenwick.len() - 1;
        let mut step = if size == 0 {
            0
        } else {
            1usize << (usize::BITS - 1 - size.leading_zeros())
        };
        let mut t = 0usize;
        let mut rem = k;
        while step > 0 {
            self.touches += 1;
            if t + step <= size && self.fenwick[t + step] <= rem {
                t += step;
                rem -= self.fenwick[t];
            }
            step >>= 1;
        }
        Ok(self.order[t])
    }

    /// Adds one occurrence of `a` (inserting it with frequency one if absent)
    /// and moves it to its place in the order.
    pub fn freq_increment(&mut self, a: u32) -> Result<()> {
        if a as usize >= self.pos.len() {
            return Err(Error::SymbolOutOfRange {
                symbol: a as u64,
                alphabet: self.pos.len() as u64,
            });
        }
        let fa = self.freq[a as usize] + 1;
        let old = if self.contains(a) {
            self.pos[a as usize] as usize
        } else {
            self.order.push(a);
            self.pos[a as usize] = (self.order.len() - 1) as u32;
            self.order.len() - 1
        };
        // first position whose symbol no longer precedes a
        let (mut lo, mut hi) = (0usize, old);
        while lo < hi {
            self.touches += 1;
            let mid = (lo + hi) / 2;
            let x = self.order[mid];
            let fx = self.freq[x as usize];
            if fx > fa || (fx == fa && x < a) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let new = lo;
        let before: Vec<u64> = (new..=old)
            .map(|p| self.freq[self.order[p] as usize])
            .collect();
        self.freq[a as usize] = fa;
        self.total += 1;
        self.order[new..=old].rotate_right(1);
        for (i, p) in (new..=old).enumerate() {
            let s = self.order[p];
            self.pos[s as usize] = p as u32;
            let delta = self.freq[s as usize] as i64 - before[i] as i64;
            if delta != 0 {
                self.fenwick_add(p, delta);
            }
        }
        Ok(())
    }

    /// Checks order, positions and prefix sums against a linear scan.
    pub fn check(&mut self) -> std::result::Result<(), String> {
        let mut running = 0;
        for p in 0..self.order.len() {
            let a = self.order[p];
            if self.pos[a as usize] as usize != p {
                return Err(format!("position of {a} is stale"));
            }
            if p > 0 && !self.precedes(self.order[p - 1], a) {
                return Err(format!("order violated at position {p}"));
            }
            if self.fenwick_prefix(p) != running {
                return Err(format!("prefix sum at {p} is wrong"));
            }
            running += self.freq[a as usize];
        }
        if running != self.total {
            return Err("total mismatch".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn alpha_tree_examples() {
        let mut t = AlphaSumTree::new();
        assert_eq!(t.prefix_sum(5), 0);
        t.insert_or_increment(7);
        assert_eq!(t.len(), 1);
        assert_eq!(t.total(), 1);

        let mut t = AlphaSumTree::new();
        for a in [0, 0, 1, 2, 2, 2] {
            t.insert_or_increment(a);
        }
        assert_eq!(t.prefix_sum(2), 3);
        assert_eq!(t.prefix_sum(0), 0);
        assert_eq!(t.count(0), 2);
        assert_eq!(t.count(9), 0);
        t.check().unwrap();

        let mut t = AlphaSumTree::new();
        for _ in 0..3 {
            t.insert_or_increment(4);
        }
        assert_eq!(t.count(4), 3);
    }

    #[test]
    fn alpha_tree_matches_flat_array() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 17, 256] {
            let mut t = AlphaSumTree::new();
            let mut flat = vec![0u64; n];
            for _ in 0..20_000 {
                let a = rng.random_range(0..n) as u32;
                match rng.random_range(0..3) {
                    0 => {
                        t.insert_or_increment(a);
                        flat[a as usize] += 1;
                    }
                    1 => assert_eq!(t.prefix_sum(a), flat[..a as usize].iter().sum::<u64>()),
                    _ => assert_eq!(t.count(a), flat[a as usize]),
                }
            }
            t.check().unwrap();
            assert_eq!(t.total(), flat.iter().sum::<u64>());
        }
    }

    #[test]
    fn partition_finds_boundary() {
        let mut t = AlphaSumTree::new();
        for a in [3, 3, 5, 9, 9, 9] {
            t.insert_or_increment(a);
        }
        let p = t.partition(|e| e.before + e.count <= 3);
        assert_eq!(p.last_true.map(|e| e.symbol), Some(5));
        assert_eq!(
            p.first_false,
            Some(Entry {
                symbol: 9,
                before: 3,
                count: 3
            })
        );
        let p = t.partition(|_| false);
        assert_eq!(p.last_true, None);
        assert_eq!(p.first_false.map(|e| e.symbol), Some(3));
        let p = t.partition(|_| true);
        assert_eq!(p.last_true.map(|e| (e.symbol, e.before)), Some((9, 3)));
        assert_eq!(p.first_false, None);
    }

    #[test]
    fn freq_list_examples() {
        let mut l = FreqOrderList::new(2);
        for a in [0, 0, 0, 1] {
            l.freq_increment(a).unwrap();
        }
        assert_eq!(l.freq_before(1).unwrap(), 3);
        assert_eq!(l.freq_select(0).unwrap(), 0);
        assert_eq!(l.freq_select(3).unwrap(), 1);

        let mut l = FreqOrderList::new(2);
        l.freq_increment(0).unwrap();
        l.freq_increment(1).unwrap();
        assert_eq!(l.symbols(), &[0, 1]);
        l.freq_increment(1).unwrap();
        assert_eq!(l.symbols(), &[1, 0]);
        l.check().unwrap();

        let mut l = FreqOrderList::new(4);
        l.freq_increment(2).unwrap();
        l.freq_increment(2).unwrap();
        assert_eq!(l.freq_before(2).unwrap(), 0);
        assert_eq!(l.freq_select(0).unwrap(), 2);
        assert_eq!(l.freq_select(1).unwrap(), 2);
        assert!(l.freq_select(2).is_err());
        assert!(l.freq_get(3).is_err());
        assert!(l.freq_before(3).is_err());
        assert!(l.freq_increment(4).is_err());
    }

    fn oracle_order(freq: &[u64]) -> Vec<u32> {
        let mut v: Vec<u32> = (0..freq.len() as u32)
            .filter(|&a| freq[a as usize] > 0)
            .collect();
        v.sort_by_key(|&a| (std::cmp::Reverse(freq[a as usize]), a));
        v
    }

    #[test]
    fn freq_list_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 3, 40, 256] {
            let mut l = FreqOrderList::new(n);
            let mut freq = vec![0u64; n];
            for step in 0..100_000 {
                // skewed so frequencies spread out
                let a = (rng.random_range(0..n * n) as f64).sqrt() as u32;
                l.freq_increment(a).unwrap();
                freq[a as usize] += 1;
                if step % 97 == 0 {
                    let order = oracle_order(&freq);
                    assert_eq!(l.symbols(), order.as_slice());
                    let mut before = 0;
                    for &s in &order {
                        assert_eq!(l.freq_before(s).unwrap(), before);
                        assert_eq!(l.freq_get(s).unwrap(), freq[s as usize]);
                        assert_eq!(l.freq_select(before).unwrap(), s);
                        before += freq[s as usize];
                    }
                    let k = rng.random_range(0..l.total());
                    let expect = *order
                        .iter()
                        .rev()
                        .find(|&&s| l.freq_before(s).unwrap() <= k)
                        .unwrap();
                    assert_eq!(l.freq_select(k).unwrap(), expect);
                }
            }
            l.check().unwrap();
        }
    }
}
