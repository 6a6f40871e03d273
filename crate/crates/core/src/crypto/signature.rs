//! Per-segment document signatures with tamper localization.
//!
//! The letters of a document are cut into consecutive segments of at least
//! `segment_min_letters` letters. Each segment carries, in its own glyphs,
//! either the hash of its letters embedded under a secret permutation key
//! (scheme 1) or an asymmetric signature over that hash embedded with the
//! public codebook (scheme 2).

use std::fmt;
use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::codebook::Codebook;
use crate::crc::mod_inverse;
use crate::error::{Error, Result};
use crate::format::{self, Lines};
use crate::pipeline::{
    decode_layout, encode_layout, letter_sequence, CodecOptions, EncodedDocument, Layout, Letter,
    Observations,
};
use crate::rng;

use super::key::PermutationKey;

pub const DEFAULT_SEGMENT_MIN_LETTERS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashId {
    /// First 128 bits of SHA-256.
    #[default]
    Sha256Trunc128,
    Sha256,
}

impl HashId {
    pub fn as_str(&self) -> &'static str {
        match self {
            HashId::Sha256Trunc128 => "sha256-128",
            HashId::Sha256 => "sha256",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sha256-128" => Ok(HashId::Sha256Trunc128),
            "sha256" => Ok(HashId::Sha256),
            _ => Err(Error::UnknownHash(s.to_string())),
        }
    }

    pub fn bits(&self) -> usize {
        match self {
            HashId::Sha256Trunc128 => 128,
            HashId::Sha256 => 256,
        }
    }

    pub fn digest(&self, data: &[u8]) -> Vec<u8> {
        let full = Sha256::digest(data);
        full[..self.bits() / 8].to_vec()
    }
}

fn to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|b| (0..8).rev().map(move |i| b >> i & 1 == 1))
        .collect()
}

fn from_bits(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
        .collect()
}

/// Produces signatures of a fixed, declared length.
pub trait Signer: Sync {
    fn signature_bits(&self) -> usize;
    fn sign(&self, digest: &[u8]) -> Result<Vec<u8>>;
}

pub trait Verifier: Sync {
    fn signature_bits(&self) -> usize;
    fn verify(&self, digest: &[u8], signature: &[u8]) -> bool;
}

/// Textbook RSA over a 64-bit modulus. Deterministic and insecure; it exists
/// to exercise the scheme 2 plumbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyRsaPublic {
    pub n: u64,
    pub e: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToyRsaPrivate {
    pub public: ToyRsaPublic,
    pub d: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const RSA_E: u64 = 65537;

impl ToyRsaPrivate {
    /// Key pair from two random 32-bit primes with the top bit set.
    pub fn generate(seed: u64) -> Self {
        let mut rng = rng::stream(seed, 0x0072_7361);
        loop {
            let mut prime = || loop {
                let c = rng.random::<u32>() as u64 | 0x8000_0001;
                if is_prime(c) && !(c - 1).is_multiple_of(RSA_E) {
                    break c;
                }
            };
            let (p, q) = (prime(), prime());
            if p == q {
                continue;
            }
            let phi = (p - 1) * (q - 1);
            if let Some(d) = mod_inverse(RSA_E, phi) {
                return Self {
                    public: ToyRsaPublic { n: p * q, e: RSA_E },
                    d,
                };
            }
        }
    }

    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = "glyphcrt-rsa-private 1\n".to_string();
        format::write_header(&mut out, header);
        out.push_str(&format!(
            "n {}\ne {}\nd {}\nend\n",
            self.public.n, self.public.e, self.d
        ));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        format::check_magic(&mut lines, "glyphcrt-rsa-private 1")?;
        let public = read_public(&mut lines)?;
        let (l, rest) = lines.keyed("d")?;
        let d = format::parse(rest, l, "private exponent")?;
        let (l, rest) = lines.expect("end")?;
        if rest != "end" {
            return Err(Error::format(l, "expected \"end\""));
        }
        Ok(Self { public, d })
    }
}

fn read_public(lines: &mut Lines<'_>) -> Result<ToyRsaPublic> {
    let (l, rest) = lines.keyed("n")?;
    let n: u64 = format::parse(rest, l, "modulus")?;
    let (l, rest) = lines.keyed("e")?;
    let e = format::parse(rest, l, "public exponent")?;
    if n < 3 {
        return Err(Error::format(l, "modulus too small"));
    }
    Ok(ToyRsaPublic { n, e })
}

impl ToyRsaPublic {
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = "glyphcrt-rsa-public 1\n".to_string();
        format::write_header(&mut out, header);
        out.push_str(&format!("n {}\ne {}\nend\n", self.n, self.e));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        format::check_magic(&mut lines, "glyphcrt-rsa-public 1")?;
        read_public(&mut lines)
    }

    fn message(&self, digest: &[u8]) -> u64 {
        let mut v = [0u8; 8];
        let k = digest.len().min(8);
        v[..k].copy_from_slice(&digest[..k]);
        u64::from_be_bytes(v) % self.n
    }
}

impl Signer for ToyRsaPrivate {
    fn signature_bits(&self) -> usize {
        64
    }

    fn sign(&self, digest: &[u8]) -> Result<Vec<u8>> {
        let h = self.public.message(digest);
        Ok(pow_mod(h, self.d, self.public.n).to_be_bytes().to_vec())
    }
}

impl Verifier for ToyRsaPublic {
    fn signature_bits(&self) -> usize {
        64
    }

    fn verify(&self, digest: &[u8], signature: &[u8]) -> bool {
        let Ok(s) = <[u8; 8]>::try_from(signature) else {
            return false;
        };
        let s = u64::from_be_bytes(s);
        s < self.n && pow_mod(s, self.e, self.n) == self.message(digest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureConfig {
    pub hash: HashId,
    pub segment_min_letters: usize,
    pub codec: CodecOptions,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        Self {
            hash: HashId::default(),
            segment_min_letters: DEFAULT_SEGMENT_MIN_LETTERS,
            codec: CodecOptions::default(),
        }
    }
}

/// Letter-index ranges of the segments: consecutive runs of `min` letters,
/// the last one absorbing the remainder.
pub fn segments(letters: usize, min: usize) -> Vec<Range<usize>> {
    let min = min.max(1);
    let count = (letters / min).max(1);
    (0..count)
        .map(|i| {
            let end = if i + 1 == count {
                letters
            } else {
                (i + 1) * min
            };
            i * min..end
        })
        .collect()
}

fn segment_content(letters: &[Letter]) -> Vec<u8> {
    letters
        .iter()
        .map(|l| l.character)
        .collect::<String>()
        .into_bytes()
}

struct Segment {
    range: Range<usize>,
    layout: Layout,
    digest: Vec<u8>,
}

fn prepare(text: &str, codebook: &Codebook, config: &SignatureConfig) -> Result<Vec<Segment>> {
    let letters = letter_sequence(text, codebook)?;
    segments(letters.len(), config.segment_min_letters)
        .into_iter()
        .map(|range| {
            let slice = letters[range.clone()].to_vec();
            let digest = config.hash.digest(&segment_content(&slice));
            let layout = Layout::new(slice, config.codec.n, config.codec.k)?;
            Ok(Segment {
                range,
                layout,
                digest,
            })
        })
        .collect()
}

fn sign_with(
    text: &str,
    codebook: &Codebook,
    config: &SignatureConfig,
    key: Option<&PermutationKey>,
    payload: impl Fn(&[u8]) -> Result<Vec<bool>> + Sync,
) -> Result<EncodedDocument> {
    let segs = prepare(text, codebook, config)?;
    let total: usize = segs.iter().map(|s| s.range.len()).sum();
    let parts: Vec<Vec<u32>> = segs
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            let bits = payload(&s.digest)?;
            let available = s.layout.total_bits();
            if bits.len() as u64 > available {
                return Err(Error::SegmentCapacity {
                    segment: t,
                    needed: bits.len() as u64,
                    available,
                });
            }
            encode_layout(&s.layout, &bits, key)
        })
        .collect::<Result<_>>()?;
    let mut glyph_indices = Vec::with_capacity(total);
    for p in parts {
        glyph_indices.extend(p);
    }
    Ok(EncodedDocument {
        codebook_id: codebook.id(),
        text: text.to_string(),
        glyph_indices,
    })
}

/// Scheme 1: each segment carries its own hash under the secret key.
pub fn sign_scheme1(
    text: &str,
    codebook: &Codebook,
    key: &PermutationKey,
    config: &SignatureConfig,
) -> Result<EncodedDocument> {
    key.check_codebook(codebook)?;
    sign_with(text, codebook, config, Some(key), |d| Ok(to_bits(d)))
}

/// Scheme 2: each segment carries a signature over its hash, embedded with
/// the public (identity) glyph order.
pub fn sign_scheme2(
    text: &str,
    codebook: &Codebook,
    signer: &dyn Signer,
    config: &SignatureConfig,
) -> Result<EncodedDocument> {
    sign_with(text, codebook, config, None, |d| {
        let sig = signer.sign(d)?;
        let mut bits = to_bits(&sig);
        bits.truncate(signer.signature_bits());
        if bits.len() != signer.signature_bits() {
            return Err(Error::Provider(format!(
                "signature has {} bits, provider declared {}",
                bits.len(),
                signer.signature_bits()
            )));
        }
        Ok(bits)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentStatus {
    Match,
    Mismatch,
}

impl SegmentStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SegmentStatus::Match => "match",
            SegmentStatus::Mismatch => "mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentReport {
    /// Letter indices covered by the segment.
    pub letters: Range<usize>,
    pub status: SegmentStatus,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub segments: Vec<SegmentReport>,
}

impl VerificationReport {
    pub fn overall(&self) -> SegmentStatus {
        if self
            .segments
            .iter()
            .all(|s| s.status == SegmentStatus::Match)
        {
            SegmentStatus::Match
        } else {
            SegmentStatus::Mismatch
        }
    }

    pub fn mismatched(&self) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.status == SegmentStatus::Mismatch)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "overall {}", self.overall().as_str())?;
        for (i, s) in self.segments.iter().enumerate() {
            write!(
                f,
                "segment {i} letters {}..{} {}",
                s.letters.start,
                s.letters.end,
                s.status.as_str()
            )?;
            if let Some(n) = &s.note {
                write!(f, " ({n})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// What the verifier holds.
#[derive(Clone, Copy)]
pub enum Credential<'a> {
    /// Scheme 1 secret key.
    Key(&'a PermutationKey),
    /// Scheme 2 public key.
    Public(&'a dyn Verifier),
}

/// Recomputes every segment hash from the current text and compares it with
/// what the segment's glyphs carry.
pub fn verify(
    doc: &EncodedDocument,
    codebook: &Codebook,
    credential: Credential<'_>,
    config: &SignatureConfig,
) -> Result<VerificationReport> {
    let segs = prepare(&doc.text, codebook, config)?;
    let total: usize = segs.iter().map(|s| s.range.len()).sum();
    if total != doc.glyph_indices.len() {
        return Err(Error::LengthMismatch {
            left: doc.glyph_indices.len(),
            right: total,
        });
    }
    let key = match credential {
        Credential::Key(k) => Some(k),
        Credential::Public(_) => None,
    };
    let payload_bits = match credential {
        Credential::Key(_) => config.hash.bits(),
        Credential::Public(v) => v.signature_bits(),
    };
    let segments = segs
        .par_iter()
        .map(|s| {
            let observed = &doc.glyph_indices[s.range.clone()];
            let extracted = decode_layout(
                &s.layout,
                Observations::Indices(observed),
                codebook,
                key,
                &config.codec,
            )
            .and_then(|r| r.raw_bits(payload_bits));
            let (status, note) = match extracted {
                Err(e) => (
                    SegmentStatus::Mismatch,
                    Some(format!("extraction failed: {e}")),
                ),
                Ok(bits) => {
                    let ok = match credential {
                        Credential::Key(_) => from_bits(&bits) == s.digest,
                        Credential::Public(v) => v.verify(&s.digest, &from_bits(&bits)),
                    };
                    if ok {
                        (SegmentStatus::Match, None)
                    } else {
                        (SegmentStatus::Mismatch, None)
                    }
                }
            };
            SegmentReport {
                letters: s.range.clone(),
                status,
                note,
            }
        })
        .collect();
    Ok(VerificationReport { segments })
}
