//! Embedding capacity of texts and of frequency-sampled letter streams.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::codebook::Codebook;
use crate::crc::floor_log2;
use crate::error::{Error, Result};
use crate::rng;

use super::layout::{Layout, Partitioner};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    pub letters: usize,
    pub blocks: usize,
    pub total_bits: u64,
    pub bits_per_letter: f64,
    /// Letters needed for a 128-bit payload at this rate (no framing).
    pub letters_for_128_bits: Option<u64>,
}

pub fn letters_for_bits(bits: u64, bits_per_letter: f64) -> Option<u64> {
    (bits_per_letter > 0.0).then(|| (bits as f64 / bits_per_letter).ceil() as u64)
}

impl CapacityReport {
    fn new(letters: usize, blocks: usize, total_bits: u64) -> Self {
        let bits_per_letter = if letters == 0 {
            0.0
        } else {
            total_bits as f64 / letters as f64
        };
        Self {
            letters,
            blocks,
            total_bits,
            bits_per_letter,
            letters_for_128_bits: letters_for_bits(128, bits_per_letter),
        }
    }

    pub fn render(&self) -> String {
        format!(
            "letters {}\nblocks {}\ntotal_bits {}\nbits_per_letter {:.6}\nletters_for_128_bits {}\n",
            self.letters,
            self.blocks,
            self.total_bits,
            self.bits_per_letter,
            self.letters_for_128_bits
                .map_or_else(|| "-".to_string(), |v| v.to_string())
        )
    }
}

/// Capacity of `text`: the sum of block widths over its layout.
pub fn capacity_report(
    text: &str,
    codebook: &Codebook,
    n: usize,
    k: usize,
) -> Result<CapacityReport> {
    let layout = Layout::of_text(text, codebook, n, k)?;
    Ok(CapacityReport::new(
        layout.letters.len(),
        layout.blocks.len(),
        layout.total_bits(),
    ))
}

/// Streams letters drawn from `frequencies` through the partitioner until
/// `blocks` blocks have formed. Bits per letter counts every letter consumed,
/// including skipped ones.
pub fn monte_carlo_capacity(
    codebook: &Codebook,
    frequencies: &[(char, f64)],
    blocks: usize,
    n: usize,
    k: usize,
    seed: u64,
) -> Result<CapacityReport> {
    let mut caps = Vec::with_capacity(frequencies.len());
    for &(c, _) in frequencies {
        caps.push(codebook.capacity(c).ok_or(Error::UnknownCharacter(c))?);
    }
    let dist = WeightedIndex::new(frequencies.iter().map(|&(_, f)| f))
        .map_err(|e| Error::InvalidArgument(format!("frequency table: {e}")))?;
    let mut rng = rng::stream(seed, 0);
    let mut partitioner = Partitioner::new(n, k)?;
    let mut stream: Vec<usize> = Vec::new();
    let mut target = blocks * n + blocks / 4 + n;
    let limit = 64 * (blocks * n + n);
    loop {
        while stream.len() < target {
            stream.push(caps[dist.sample(&mut rng)]);
        }
        let layout = partitioner.partition(&stream);
        if layout.len() >= blocks {
            let used = &layout[..blocks];
            let consumed = used.last().map_or(0, |b| b.members[n - 1] + 1);
            let bits = used.iter().map(|b| b.bit_width() as u64).sum();
            return Ok(CapacityReport::new(consumed, blocks, bits));
        }
        if target > limit {
            return Err(Error::InvalidArgument(format!(
                "{} of {blocks} blocks formed from {} letters",
                layout.len(),
                stream.len()
            )));
        }
        target = target * 2 + n;
    }
}

/// Per-block capacity of a linear block code over the same letters:
/// `sum floor(log2 s_i) - 2 ceil(log2 max s_i)`, which may be negative.
pub fn linear_code_baseline(capacities: &[usize]) -> i64 {
    let max = capacities.iter().copied().max().unwrap_or(1) as u64;
    let ceil_log2 = if max <= 1 {
        0
    } else {
        floor_log2(max - 1) as i64 + 1
    };
    capacities
        .iter()
        .map(|&s| floor_log2(s as u64) as i64)
        .sum::<i64>()
        - 2 * ceil_log2
}
