//! Letter sequences, moduli search, and block partitioning.

use std::collections::HashMap;

use crate::codebook::Codebook;
use crate::crc::{gcd, ModuliSet};
use crate::error::{Error, Result};

pub const DEFAULT_N: usize = 5;
pub const DEFAULT_K: usize = 3;

/// A text symbol that carries a glyph choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Letter {
    /// Index of the symbol in the text, counted in `char`s.
    pub position: usize,
    pub character: char,
    pub capacity: usize,
}

/// Letters of `text` in order. A symbol is a letter when the codebook has an
/// entry for it; alphabetic symbols without an entry are an error, anything
/// else (spaces, punctuation) is passed over.
pub fn letter_sequence(text: &str, codebook: &Codebook) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for (position, c) in text.chars().enumerate() {
        match codebook.capacity(c) {
            Some(capacity) => out.push(Letter {
                position,
                character: c,
                capacity,
            }),
            None if c.is_alphabetic() => return Err(Error::UnknownCharacter(c)),
            None => {}
        }
    }
    Ok(out)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "block shape needs 1 <= k < n and n >= 2, got n={n} k={k}"
        )));
    }
    Ok(())
}

fn k_smallest_product(values: &[u64], k: usize) -> u128 {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.iter().take(k).map(|&x| x as u128).product()
}

struct Dfs<'a> {
    caps: &'a [u64],
    k: usize,
    chosen: Vec<u64>,
    best: u128,
    best_set: Option<Vec<u64>>,
}

impl Dfs<'_> {
    fn bound(&self) -> u128 {
        let mut v = self.chosen.clone();
        v.extend_from_slice(&self.caps[self.chosen.len()..]);
        k_smallest_product(&v, self.k)
    }

    fn run(&mut self) {
        let i = self.chosen.len();
        if i == self.caps.len() {
            let v = k_smallest_product(&self.chosen, self.k);
            if v > self.best {
                self.best = v;
                self.best_set = Some(self.chosen.clone());
            }
            return;
        }
        if self.bound() <= self.best {
            return;
        }
        for p in (2..=self.caps[i]).rev() {
            if self.chosen.iter().all(|&q| gcd(p, q) == 1) {
                self.chosen.push(p);
                self.run();
                self.chosen.pop();
                if self.bound() <= self.best {
                    return;
                }
            }
        }
    }
}

/// Pairwise-coprime moduli `p_i <= capacities[i]`, all at least 2, that
/// maximize the product of the `k` smallest. Among optimal assignments the
/// lexicographically largest is returned. `None` when no assignment exists.
pub fn choose_moduli(capacities: &[usize], k: usize) -> Result<Option<ModuliSet>> {
    check_nk(capacities.len(), k)?;
    if capacities.contains(&0) {
        return Err(Error::InvalidArgument("capacity must be at least 1".into()));
    }
    let caps: Vec<u64> = capacities
        .iter()
        .map(|&c| (c as u64).min(u32::MAX as u64))
        .collect();
    let mut dfs = Dfs {
        caps: &caps,
        k,
        chosen: Vec::with_capacity(caps.len()),
        best: 0,
        best_set: None,
    };
    dfs.run();
    match dfs.best_set {
        None => Ok(None),
        Some(p) => ModuliSet::new(p.into_iter().map(|v| v as u32).collect(), k).map(Some),
    }
}

/// One coding block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    /// Indices into the letter sequence of the `n` coded letters.
    pub members: Vec<usize>,
    /// Letters dropped while forming this block.
    pub skipped: Vec<usize>,
    pub moduli: ModuliSet,
}

impl Block {
    pub fn bit_width(&self) -> u32 {
        self.moduli.bit_width()
    }
}

/// Memoizing block partitioner.
#[derive(Debug, Clone)]
pub struct Partitioner {
    n: usize,
    k: usize,
    cache: HashMap<Vec<usize>, Option<ModuliSet>>,
}

impl Partitioner {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Ok(Self {
            n,
            k,
            cache: HashMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn choose(&mut self, capacities: &[usize]) -> Option<ModuliSet> {
        if let Some(hit) = self.cache.get(capacities) {
            return hit.clone();
        }
        let p = choose_moduli(capacities, self.k).expect("shape checked at construction");
        self.cache.insert(capacities.to_vec(), p.clone());
        p
    }

    /// Greedy left-to-right partition. When the next `n` letters admit no
    /// moduli, the lowest-capacity one (earliest on ties) is skipped for good
    /// and the following letter is pulled in. Letters left over at the end
    /// carry no payload.
    pub fn partition(&mut self, capacities: &[usize]) -> Vec<Block> {
        let mut blocks = Vec::new();
        let mut window: Vec<usize> = Vec::with_capacity(self.n);
        let mut skipped = Vec::new();
        let mut next = 0;
        loop {
            while window.len() < self.n && next < capacities.len() {
                window.push(next);
                next += 1;
            }
            if window.len() < self.n {
                break;
            }
            let caps: Vec<usize> = window.iter().map(|&i| capacities[i]).collect();
            match self.choose(&caps) {
                Some(moduli) => {
                    blocks.push(Block {
                        members: std::mem::take(&mut window),
                        skipped: std::mem::take(&mut skipped),
                        moduli,
                    });
                }
                None => {
                    let mut drop = 0;
                    for (i, &c) in caps.iter().enumerate() {
                        if c < caps[drop] {
                            drop = i;
                        }
                    }
                    skipped.push(window.remove(drop));
                }
            }
        }
        blocks
    }
}

pub fn partition_blocks(capacities: &[usize], n: usize, k: usize) -> Result<Vec<Block>> {
    Ok(Partitioner::new(n, k)?.partition(capacities))
}

/// Block layout of a letter sequence, recomputable from text and codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub letters: Vec<Letter>,
    pub blocks: Vec<Block>,
}

impl Layout {
    pub fn new(letters: Vec<Letter>, n: usize, k: usize) -> Result<Self> {
        let caps: Vec<usize> = letters.iter().map(|l| l.capacity).collect();
        let blocks = partition_blocks(&caps, n, k)?;
        Ok(Self { letters, blocks })
    }

    pub fn of_text(text: &str, codebook: &Codebook, n: usize, k: usize) -> Result<Self> {
        Self::new(letter_sequence(text, codebook)?, n, k)
    }

    pub fn widths(&self) -> Vec<u32> {
        self.blocks.iter().map(Block::bit_width).collect()
    }

    pub fn total_bits(&self) -> u64 {
        self.widths().iter().map(|&w| w as u64).sum()
    }

    /// Text rendering of the layout, one line per block.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        for (t, b) in self.blocks.iter().enumerate() {
            let pos = |v: &[usize]| {
                v.iter()
                    .map(|&i| self.letters[i].position.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            out.push_str(&format!(
                "block {t} members={} skipped={} moduli={} width={}\n",
                pos(&b.members),
                pos(&b.skipped),
                b.moduli
                    .moduli()
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
                b.bit_width()
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moduli(caps: &[usize]) -> Option<Vec<u32>> {
        choose_moduli(caps, 3).unwrap().map(|p| p.moduli().to_vec())
    }

    #[test]
    fn coprime_capacities_used_directly() {
        let p = choose_moduli(&[2, 3, 5, 7, 11], 3).unwrap().unwrap();
        assert_eq!(p.moduli(), &[2, 3, 5, 7, 11]);
        assert_eq!(p.payload_bound(), 30);
    }

    #[test]
    fn all_fours_fail() {
        assert_eq!(moduli(&[4, 4, 4, 4, 4]), None);
    }

    #[test]
    fn capacity_one_never_fits() {
        assert_eq!(moduli(&[1, 30, 30, 30, 30]), None);
    }

    #[test]
    fn shape_is_validated() {
        assert!(choose_moduli(&[5, 7, 9], 3).is_err());
        assert!(choose_moduli(&[5], 0).is_err());
        assert!(choose_moduli(&[5, 0, 7], 1).is_err());
    }

    #[test]
    fn lexicographically_largest_among_optima() {
        // Product of the 3 smallest is the same for several orders; the DFS
        // tries larger values first at earlier positions.
        let p = moduli(&[13, 13, 13, 13, 13]).unwrap();
        let mut sorted = p.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(p, sorted);
    }

    #[test]
    fn partition_skips_low_capacity_letter() {
        // Four letters capped at 2 cannot be pairwise coprime, so the first
        // window fails and the earliest 2 is dropped.
        let blocks = partition_blocks(&[2, 2, 5, 7, 11, 3], 5, 3).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].members, vec![1, 2, 3, 4, 5]);
        assert_eq!(blocks[0].skipped, vec![0]);
    }

    #[test]
    fn partition_leaves_remainder_uncoded() {
        let caps = [13usize; 12];
        let blocks = partition_blocks(&caps, 5, 3).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].members, vec![5, 6, 7, 8, 9]);
    }
}
