//! Block decoding success as a function of per-letter accuracy.
//!
//! Two families of curves are provided. The "printed" forms count only the
//! event of exactly `t` errors in a block, `C(n, t) P^(n-t) (1-P)^t`; the
//! cumulative forms count every error pattern with at most `t` errors. The
//! printed Hamming (`t = 1`) and ML (`t = 2`) forms for `n = 5` cross at
//! `P = 2/3`, so above that point the printed ML curve lies below the printed
//! Hamming curve. The cumulative forms never cross.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{conditioned, ChannelParams};
use crate::codebook::Codebook;
use crate::crc::{encode_phi, hamming_decode, ml_decode, CodeVector, LikelihoodTable, MlScope};
use crate::error::{Error, Result};
use crate::fixtures::english_letter;
use crate::outline::GlyphOutline;
use crate::pipeline::Partitioner;
use crate::rng;

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability of exactly `t` errors among `n` letters.
pub fn printed_form(p: f64, n: u64, t: u64) -> f64 {
    binomial(n, t) * p.powi((n - t) as i32) * (1.0 - p).powi(t as i32)
}

/// Probability of at most `t` errors among `n` letters.
pub fn cumulative_form(p: f64, n: u64, t: u64) -> f64 {
    (0..=t.min(n)).map(|e| printed_form(p, n, e)).sum()
}

/// `5 P^4 (1 - P)`.
pub fn printed_hamming(p: f64) -> f64 {
    printed_form(p, 5, 1)
}

/// `10 P^3 (1 - P)^2`.
pub fn printed_ml(p: f64) -> f64 {
    printed_form(p, 5, 2)
}

pub fn cumulative_hamming(p: f64) -> f64 {
    cumulative_form(p, 5, 1)
}

pub fn cumulative_ml(p: f64) -> f64 {
    cumulative_form(p, 5, 2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSuccess {
    pub accuracy: f64,
    pub blocks: usize,
    pub hamming: f64,
    pub ml: f64,
}

/// Empirical block success at per-letter accuracy `p1`.
///
/// Each block draws five English-frequency letters from `codebook` (redrawn
/// until they admit moduli), a uniform payload, and independently misreads
/// each letter with probability `1 - p1` through the channel. The same
/// observation feeds both decoders.
pub fn simulate_block_success(
    codebook: &Codebook,
    p1: f64,
    blocks: usize,
    params: &ChannelParams,
) -> Result<BlockSuccess> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidArgument(format!(
            "accuracy {p1} outside [0, 1]"
        )));
    }
    let n = 5;
    let outcomes: Vec<(bool, bool)> = (0..blocks)
        .into_par_iter()
        .map_init(
            || Partitioner::new(n, 3).expect("valid shape"),
            |part, b| {
                let mut rng = rng::stream(params.seed, b as u64);
                let (letters, moduli) = loop {
                    let letters: Vec<char> = (0..n).map(|_| english_letter(&mut rng)).collect();
                    let caps: Vec<usize> = letters
                        .iter()
                        .map(|&c| codebook.capacity(c).ok_or(Error::UnknownCharacter(c)))
                        .collect::<Result<_>>()?;
                    if let Some(p) = part.choose(&caps) {
                        break (letters, p);
                    }
                };
                let m = rng.random_range(0..moduli.payload_bound());
                let cw = encode_phi(m, &moduli)?;
                let mut cv = Vec::with_capacity(n);
                let mut rows = Vec::with_capacity(n);
                for (j, &c) in letters.iter().enumerate() {
                    let q = moduli.moduli()[j] as usize;
                    let glyphs: Vec<&GlyphOutline> = codebook.entry(c).expect("checked").glyphs
                        [..q]
                        .iter()
                        .map(|g| &g.outline)
                        .collect();
                    let wrong = rng.random::<f64>() >= p1;
                    let r = conditioned(cw.0[j] as usize, &glyphs, params, wrong, &mut rng)?;
                    cv.push(r.argmax_index as u32);
                    rows.push(r.probabilities);
                }
                let cv = CodeVector(cv);
                let h = hamming_decode(&cv, &moduli)?.value == Some(m);
                let table = LikelihoodTable::new(rows)?;
                let ml = ml_decode(&cv, &moduli, &table, MlScope::ListDecode)?.value == Some(m);
                Ok((h, ml))
            },
        )
        .collect::<Result<_>>()?;
    let count = |f: fn(&(bool, bool)) -> bool| {
        outcomes.iter().filter(|o| f(o)).count() as f64 / blocks.max(1) as f64
    };
    Ok(BlockSuccess {
        accuracy: p1,
        blocks,
        hamming: count(|o| o.0),
        ml: count(|o| o.1),
    })
}
