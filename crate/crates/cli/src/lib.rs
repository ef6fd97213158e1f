//! File codec and verification harness for the `dynshannon` coders.

pub mod container;
pub mod corpus;
pub mod harness;
