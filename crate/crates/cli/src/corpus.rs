//! Synthetic inputs.

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Source {
    Uniform,
    /// Zipf over the alphabet with the given exponent.
    Zipf(f64),
    /// One character repeated.
    Single,
    /// `0, 1, …` wrapping around the alphabet.
    AllDistinct,
}

impl Source {
    pub fn name(&self) -> String {
        match self {
            Source::Uniform => "uniform".into(),
            Source::Zipf(s) => format!("zipf{s}"),
            Source::Single => "single".into(),
            Source::AllDistinct => "distinct".into(),
        }
    }
}

pub fn generate<R: Rng + ?Sized>(source: Source, n: u32, m: usize, rng: &mut R) -> Vec<u32> {
    assert!(n >= 1);
    match source {
        Source::Uniform => {
            let d = Uniform::new(0, n).expect("nonempty range");
            (0..m).map(|_| d.sample(rng)).collect()
        }
        Source::Zipf(s) => {
            let d = Zipf::new(n as f64, s).expect("valid zipf parameters");
            (0..m).map(|_| d.sample(rng) as u32 - 1).collect()
        }
        Source::Single => vec![rng.random_range(0..n); m],
        Source::AllDistinct => (0..m).map(|k| (k % n as usize) as u32).collect(),
    }
}

/// A named synthetic input.
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: String,
    pub n: u32,
    pub symbols: Vec<u32>,
}

/// The fixed synthetic set `dsc verify` always runs.
pub fn synthetic_suite(seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plan = [
        (Source::Uniform, 256, 100_000),
        (Source::Zipf(1.2), 256, 10_000),
        (Source::Single, 256, 10_000),
        (Source::AllDistinct, 256, 256),
        (Source::Uniform, 2, 5_000),
        (Source::Zipf(1.2), 16, 5_000),
    ];
    plan.iter()
        .map(|&(src, n, m)| Sample {
            name: format!("{}-n{n}-m{m}", src.name()),
            n,
            symbols: generate(src, n, m, &mut rng),
        })
        .collect()
}
