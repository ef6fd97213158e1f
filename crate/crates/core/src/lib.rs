//! Dynamic Shannon coding.
//!
//! Prefix-free coders that assign codewords from the statistics of the
//! prefix seen so far, so no preface is needed and the decoder recovers each
//! symbol as soon as its codeword arrives:
//!
//! - [`static_codes`]: two-pass Shannon and Huffman baselines with a canonical preface.
//! - [`adaptive`]: the simple framework that rebuilds a static code after every symbol.
//! - [`dynamic_shannon`]: the efficient coder on a dynamic [`minimax`] tree with a
//!   background refresh queue.
//! - [`length_restricted`]: smoothed weights that cap every codeword length.
//! - [`alphabetic`]: order-preserving codewords from cumulative-frequency midpoints.
//! - [`unequal_cost`]: interval codewords for a channel whose two letters cost differently.
//!
//! [`stats`] evaluates the bit-count bounds that each coder is checked against,
//! and [`codec`] ties the algorithms together behind one interface.

pub mod adaptive;
pub mod alphabetic;
pub mod bitio;
pub mod codec;
pub mod dynamic_shannon;
pub mod error;
pub mod length_restricted;
pub mod math;
pub mod minimax;
pub mod partial_sums;
pub mod static_codes;
pub mod stats;
pub mod unequal_cost;

pub use bitio::{BitSink, BitSource, BitString};
pub use codec::{Algorithm, CodecParams, DynamicCoder};
pub use error::{Error, Result};
pub use minimax::{Label, LeafHandle, MinimaxTree};
