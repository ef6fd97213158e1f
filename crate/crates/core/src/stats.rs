//! Empirical entropy and the explicit right-hand sides of the bit-count bounds.
//!
//! Every `O(·)` term is replaced by the exact additive sum that appears in the
//! corresponding argument, so measured output can be compared against a
//! number. Positions `i` are 1-based; for dynamic coders `i` is also the
//! length of the escape-prefixed history `esc s₁ ⋯ s_{i−1}`.

use std::fmt;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::length_restricted::{smooth_weight, RestrictedParams};
use crate::math::{ceil_log2, ceil_log2_ratio, neumaier_sum};
use crate::unequal_cost::CostModel;

/// Largest argument for which `log₂ x!` is summed term by term.
const EXACT_FACTORIAL_LIMIT: u64 = 100_000;

/// Relative slack used when comparing integer bit counts with float bounds.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// `H = Σ (#ₐ/m) log₂(m/#ₐ)`; zero for an empty string.
pub fn empirical_entropy(counts: &[u64]) -> f64 {
    let m: u64 = counts.iter().sum();
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    neumaier_sum(
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| (c as f64 / m) * (m / c as f64).log2()),
    )
}

/// `log₂ x!`.
pub fn log2_factorial(x: u64) -> f64 {
    if x <= EXACT_FACTORIAL_LIMIT {
        neumaier_sum((2..=x).map(|k| (k as f64).log2()))
    } else {
        ln_gamma(x as f64 + 1.0) / std::f64::consts::LN_2
    }
}

/// `measured ≤ bound`, allowing for float rounding in the bound.
pub fn within(measured: f64, bound: f64) -> bool {
    measured <= bound + BOUND_TOLERANCE * bound.abs().max(1.0)
}

/// One character position as seen by a dynamic coder.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    /// 1-based position.
    pub i: u64,
    pub symbol: u32,
    /// Occurrences of the symbol in `s₁ ⋯ s_{i−1}`.
    pub prior: u64,
    /// Distinct characters in `s₁ ⋯ s_{i−1}`.
    pub distinct_before: u64,
}

impl Step {
    pub fn is_repeat(&self) -> bool {
        self.prior > 0
    }
}

/// Everything the bounds need to know about a string.
#[derive(Clone, Debug)]
pub struct Profile {
    pub n: u32,
    pub m: u64,
    pub counts: Vec<u64>,
    pub entropy: f64,
    pub steps: Vec<Step>,
}

/// Values along the chain `L ≤ log m! − Σ log #ₐ! + Σ log #ₐ ≤ Hm + Σ log #ₐ ≤ Hm + d log m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyChain {
    pub lhs: f64,
    pub factorials: f64,
    pub entropy_form: f64,
    pub coarse: f64,
}

impl EntropyChain {
    pub fn values(&self) -> [f64; 4] {
        [self.lhs, self.factorials, self.entropy_form, self.coarse]
    }

    pub fn holds(&self) -> bool {
        self.values().windows(2).all(|w| within(w[0], w[1]))
    }
}

impl Profile {
    pub fn new(symbols: &[u32], n: u32) -> Result<Self> {
        let mut counts = vec![0u64; n as usize];
        let mut steps = Vec::with_capacity(symbols.len());
        let mut distinct = 0;
        for (k, &s) in symbols.iter().enumerate() {
            let c = counts.get_mut(s as usize).ok_or(Error::SymbolOutOfRange {
                symbol: s as u64,
                alphabet: n as u64,
            })?;
            steps.push(Step {
                i: k as u64 + 1,
                symbol: s,
                prior: *c,
                distinct_before: distinct,
            });
            if *c == 0 {
                distinct += 1;
            }
            *c += 1;
        }
        Ok(Self {
            n,
            m: symbols.len() as u64,
            entropy: empirical_entropy(&counts),
            counts,
            steps,
        })
    }

    pub fn distinct(&self) -> u64 {
        self.counts.iter().filter(|&&c| c > 0).count() as u64
    }

    pub fn repeats(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| s.is_repeat())
    }

    pub fn firsts(&self) -> impl Iterator<Item = &Step> {
        self.steps.iter().filter(|s| !s.is_repeat())
    }

    pub fn max_repeat(&self) -> Option<u64> {
        self.repeats().map(|s| s.i).max()
    }

    /// `Σₐ log₂ #ₐ`.
    pub fn sum_log_counts(&self) -> f64 {
        neumaier_sum(
            self.counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| (c as f64).log2()),
        )
    }

    /// `Σₐ log₂ #ₐ!`.
    pub fn sum_log_count_factorials(&self) -> f64 {
        neumaier_sum(self.counts.iter().map(|&c| log2_factorial(c)))
    }

    /// `Σ_{i∈R} log₂((i + extra) / #)`.
    pub fn repeat_log_sum(&self, extra: u64) -> f64 {
        neumaier_sum(
            self.repeats()
                .map(|s| ((s.i + extra) as f64 / s.prior as f64).log2()),
        )
    }

    pub fn entropy_chain(&self) -> EntropyChain {
        let lhs = self.repeat_log_sum(0);
        let slc = self.sum_log_counts();
        let m = self.m as f64;
        EntropyChain {
            lhs,
            factorials: log2_factorial(self.m) - self.sum_log_count_factorials() + slc,
            entropy_form: self.entropy * m + slc,
            coarse: self.entropy * m + self.distinct() as f64 * m.max(1.0).log2(),
        }
    }

    /// `(Σ_{i∈R} log((i+n)/#), Σ_{i∈R} log(i/#) + n log(max R + n))` for a given `n`.
    pub fn offset_sides(&self, n: u64) -> (f64, f64) {
        let lhs = self.repeat_log_sum(n);
        let extra = self
            .max_repeat()
            .map_or(0.0, |r| n as f64 * ((r + n) as f64).log2());
        (lhs, self.repeat_log_sum(0) + extra)
    }

    /// `(Σₐ log #ₐ, (H + 1) m)`; the first is strictly smaller when `m ≥ 1`.
    pub fn log_count_side_note(&self) -> (f64, f64) {
        (self.sum_log_counts(), (self.entropy + 1.0) * self.m as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Theorem {
    /// Simple dynamic Shannon coding.
    SimpleShannon,
    /// Dynamic Shannon coding.
    DynamicShannon,
    LengthRestricted(RestrictedParams),
    Alphabetic,
    UnequalCost(CostModel),
}

/// A bound at three levels of coarseness. `per_step` adds up the per-character
/// guarantees, `proof` is the first closed expression the argument reaches, and
/// `headline` is the entropy form. Each is at most the next.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub per_step: f64,
    pub proof: f64,
    pub headline: f64,
}

impl Bound {
    pub fn levels(&self) -> [f64; 3] {
        [self.per_step, self.proof, self.headline]
    }

    /// The measured value is within every level.
    pub fn admits(&self, measured: f64) -> bool {
        self.levels().iter().all(|&b| within(measured, b))
    }
}

fn clog(x: u64) -> f64 {
    ceil_log2(x.max(1) as u128) as f64
}

pub fn theorem_rhs(theorem: Theorem, p: &Profile) -> Result<Bound> {
    let m = p.m as f64;
    let n = p.n as u64;
    let h = p.entropy;
    let slc = p.sum_log_counts();
    let index = clog(n);
    Ok(match theorem {
        Theorem::SimpleShannon => {
            let per_step = p
                .repeats()
                .map(|s| ceil_log2_ratio(s.i as u128, s.prior as u128) as f64)
                .sum::<f64>()
                + p.firsts().map(|s| clog(s.i) + index).sum::<f64>();
            let firsts: f64 = p.firsts().map(|s| clog(s.i) + index).sum();
            Bound {
                per_step,
                proof: m + p.repeat_log_sum(0) + firsts,
                headline: (h + 1.0) * m + slc + firsts,
            }
        }
        Theorem::DynamicShannon => {
            let firsts: f64 = p.firsts().map(|s| clog(s.i + n) + index).sum();
            let per_step = p
                .repeats()
                .map(|s| ceil_log2_ratio((s.i + n) as u128, s.prior as u128) as f64)
                .sum::<f64>()
                + firsts;
            let (_, offset) = p.offset_sides(n);
            Bound {
                per_step,
                proof: m + p.repeat_log_sum(n) + firsts,
                headline: h * m + m + (offset - p.repeat_log_sum(0)) + slc + firsts,
            }
        }
        Theorem::LengthRestricted(r) => {
            let delta = 1.0 / (((1u64 << r.ell) - 1) as f64 * std::f64::consts::LN_2);
            let big_n = |s: &Step| r.effective_n(p.n, s.distinct_before);
            let mut firsts = 0.0;
            for s in p.firsts() {
                firsts += -smooth_weight(s.i + big_n(s), 1, big_n(s), r.ell)? as f64 + index;
            }
            let mut per_step = firsts;
            let mut proof = firsts + (1.0 + delta) * m;
            for s in p.repeats() {
                let nn = big_n(s);
                per_step += -smooth_weight(s.i + nn, s.prior, nn, r.ell)? as f64;
                proof += ((s.i + nn) as f64 / s.prior as f64).log2();
            }
            let n_max = p.steps.iter().map(big_n).max().unwrap_or(0);
            let offset = p
                .max_repeat()
                .map_or(0.0, |mr| n_max as f64 * ((mr + n_max) as f64).log2());
            Bound {
                per_step,
                proof,
                headline: (h + 1.0 + delta) * m + slc + offset + firsts,
            }
        }
        Theorem::Alphabetic => {
            let per_step: f64 = p
                .steps
                .iter()
                .map(|s| (ceil_log2_ratio((s.i - 1 + n) as u128, s.prior as u128 + 1) + 1) as f64)
                .sum();
            let identity = 2.0 * m + log2_factorial(p.m + n - 1)
                - log2_factorial(n - 1)
                - p.sum_log_count_factorials();
            Bound {
                per_step,
                proof: identity,
                headline: (h + 2.0) * m + (n - 1) as f64 * ((p.m + n - 1) as f64).log2(),
            }
        }
        Theorem::UnequalCost(model) => {
            let c = model.capacity;
            let ln2 = std::f64::consts::LN_2;
            let firsts: f64 = p
                .firsts()
                .map(|s| (s.i as f64).ln() / c + model.cost1 + index * model.cost1)
                .sum();
            let per_step = p
                .repeats()
                .map(|s| (s.i as f64 / s.prior as f64).ln() / c + model.cost1)
                .sum::<f64>()
                + firsts;
            let chain = p.entropy_chain();
            Bound {
                per_step,
                proof: model.cost1 * m + ln2 / c * chain.lhs + firsts,
                headline: (h * ln2 / c + model.cost1) * m + ln2 / c * slc + firsts,
            }
        }
    })
}

/// Bound for a two-pass static code: `Σₐ #ₐ⌈log(m/#ₐ)⌉ ≤ (H + 1) m`.
pub fn static_bound(p: &Profile) -> Bound {
    let per_step = p
        .counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| c as f64 * ceil_log2_ratio(p.m as u128, c as u128) as f64)
        .sum();
    let headline = (p.entropy + 1.0) * p.m as f64;
    Bound {
        per_step,
        proof: headline,
        headline,
    }
}

/// One verification row.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub algo: String,
    pub m: u64,
    pub n: u32,
    pub entropy: f64,
    /// Bits, or total letter cost for unequal costs.
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub ops: u64,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "algo,m,n,H,bits,bound,pass,ops";

    pub fn new(algo: &str, p: &Profile, measured: f64, bound: f64, ops: u64) -> Self {
        Self {
            algo: algo.to_string(),
            m: p.m,
            n: p.n,
            entropy: p.entropy,
            measured,
            bound,
            pass: within(measured, bound),
            ops,
        }
    }

    /// Row against the headline bound, passing only if every level admits `measured`.
    pub fn with_bound(algo: &str, p: &Profile, measured: f64, bound: &Bound, ops: u64) -> Self {
        Self {
            pass: bound.admits(measured),
            ..Self::new(algo, p, measured, bound.headline, ops)
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.9},{},{:.6},{},{}",
            self.algo, self.m, self.n, self.entropy, self.measured, self.bound, self.pass, self.ops
        )
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: m={} n={} H={:.4} measured={} bound={:.2} {}",
            self.algo,
            self.m,
            self.n,
            self.entropy,
            self.measured,
            self.bound,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}
