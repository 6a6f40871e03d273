//! Glyph-perturbation text steganography.
//!
//! Every letter of a document is drawn with one of several nearly identical
//! glyphs, and the glyph choice carries an integer. Runs of letters form
//! blocks protected by a Chinese Remainder code so that misrecognized letters
//! can be corrected, with likelihood-based decoding when recognition
//! probabilities are available.

pub mod channel;
pub mod clique;
pub mod codebook;
pub mod crc;
pub mod crypto;
pub mod error;
pub mod fixtures;
pub(crate) mod format;
pub mod outline;
pub mod perceptual;
pub mod pipeline;
pub mod reliability;
pub(crate) mod rng;

pub use error::{Error, Result};
