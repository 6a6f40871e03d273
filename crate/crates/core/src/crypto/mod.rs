//! Permutation-key encryption and segment signatures.

mod key;
mod signature;

pub use key::{key_space_bits, Direction, PermutationKey};
pub use signature::{
    segments, sign_scheme1, sign_scheme2, verify, Credential, HashId, SegmentReport, SegmentStatus,
    SignatureConfig, Signer, ToyRsaPrivate, ToyRsaPublic, VerificationReport, Verifier,
    DEFAULT_SEGMENT_MIN_LETTERS,
};
