//! Plain messages, length framing, and per-block chunking.

use std::fmt;

use crate::error::{Error, Result};

pub const LENGTH_PREFIX_BITS: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlainMessage {
    pub bits: Vec<bool>,
}

impl PlainMessage {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Bytes, most significant bit first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            bits: bytes
                .iter()
                .flat_map(|b| (0..8).rev().map(move |i| b >> i & 1 == 1))
                .collect(),
        }
    }

    /// `None` unless the length is a whole number of bytes.
    pub fn to_bytes(&self) -> Option<Vec<u8>> {
        if !self.bits.len().is_multiple_of(8) {
            return None;
        }
        Some(
            self.bits
                .chunks(8)
                .map(|c| c.iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
                .collect(),
        )
    }

    /// Parses a string of `0` and `1`.
    pub fn from_bit_string(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidArgument(format!("{c:?} is not a bit"))),
            })
            .collect::<Result<_>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for PlainMessage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(str_bit(b))?;
        }
        Ok(())
    }
}

fn str_bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub(crate) fn push_bits(out: &mut Vec<bool>, value: u64, width: u32) {
    for i in (0..width).rev() {
        out.push(value >> i & 1 == 1);
    }
}

pub(crate) fn read_bits(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| acc << 1 | b as u64)
}

/// 32-bit big-endian payload length in bits, then the payload.
pub fn frame_message(message: &PlainMessage) -> Result<Vec<bool>> {
    let len = u32::try_from(message.len()).map_err(|_| Error::CapacityExceeded {
        needed: message.len() as u64,
        available: u32::MAX as u64,
    })?;
    let mut out = Vec::with_capacity(LENGTH_PREFIX_BITS + message.len());
    push_bits(&mut out, len as u64, LENGTH_PREFIX_BITS as u32);
    out.extend_from_slice(&message.bits);
    Ok(out)
}

/// Inverse of [`frame_message`]; trailing padding is ignored.
pub fn unframe(bits: &[bool]) -> Result<PlainMessage> {
    if bits.len() < LENGTH_PREFIX_BITS {
        return Err(Error::CorruptFrame(format!(
            "{} bits cannot hold the length prefix",
            bits.len()
        )));
    }
    let len = read_bits(&bits[..LENGTH_PREFIX_BITS]) as usize;
    let end = LENGTH_PREFIX_BITS
        .checked_add(len)
        .filter(|&e| e <= bits.len())
        .ok_or_else(|| {
            Error::CorruptFrame(format!(
                "length prefix {len} exceeds the {} available bits",
                bits.len() - LENGTH_PREFIX_BITS
            ))
        })?;
    Ok(PlainMessage::new(bits[LENGTH_PREFIX_BITS..end].to_vec()))
}

/// Cuts `bits` into consecutive big-endian integers of the given widths,
/// padding with zeros.
pub fn chunk_message(bits: &[bool], widths: &[u32]) -> Result<Vec<u64>> {
    let available: u64 = widths.iter().map(|&w| w as u64).sum();
    if bits.len() as u64 > available {
        return Err(Error::CapacityExceeded {
            needed: bits.len() as u64,
            available,
        });
    }
    let mut out = Vec::with_capacity(widths.len());
    let mut at = 0;
    for &w in widths {
        let mut v = 0u64;
        for i in 0..w as usize {
            v = v << 1 | bits.get(at + i).copied().unwrap_or(false) as u64;
        }
        at += w as usize;
        out.push(v);
    }
    Ok(out)
}
