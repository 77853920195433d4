//! A keyed hash function built from discrete chaotic iterations.
//!
//! A message is normalized into a carrier bit string `D` and an initial
//! `n`-bit configuration `x⁰`. Eight rotation passes over `D` produce a byte
//! stream from which the update strategy is derived, and each strategy term
//! negates one bit of the configuration. The final configuration, rendered
//! in hexadecimal, is the digest.
//!
//! ```
//! use cihash::{hash, Encoding, HashParams};
//!
//! let params = HashParams::default().with_encoding(Encoding::Ascii7);
//! let digest = hash(b"The original text", &params).unwrap();
//! assert!(digest.hex().starts_with("63A88CB6"));
//! ```
//!
//! Beyond the hash itself the crate carries the metric used to reason about
//! the iterations ([`topology`]) and the statistics harness used to measure
//! diffusion, uniformity and cost ([`statlab`]).

pub mod bits;
pub mod dynamics;
pub mod error;
pub mod hasher;
pub mod keystream;
pub mod preprocess;
pub mod statlab;
pub mod topology;

pub use bits::{BitString, Configuration};
pub use dynamics::Point;
pub use error::{Error, Result};
pub use hasher::{hash, hash_bits, hash_file, Digest, HashRun};
pub use keystream::{Profile, Strategy, UStream};
pub use preprocess::{Encoding, HashParams, KeyMode, NormalizedInput};
pub use statlab::{AvalancheReport, BenchReport, UniformityReport};
pub use topology::DistanceValue;
