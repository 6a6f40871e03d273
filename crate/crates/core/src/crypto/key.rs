//! Permutation keys over per-character glyph lists.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::codebook::{CharacterEntry, Codebook};
use crate::error::{Error, Result};
use crate::format::{self, Lines};
use crate::rng;

const MAGIC: &str = "glyphcrt-key 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Integer to glyph, used when embedding.
    Forward,
    /// Glyph to integer, used when extracting.
    Inverse,
}

/// Per-character bijection on glyph indices. Embedding integer `i` into
/// character `c` uses glyph `perm[c][i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationKey {
    key_id: String,
    forward: BTreeMap<char, Vec<u32>>,
    inverse: BTreeMap<char, Vec<u32>>,
}

fn invert(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&v| {
        let ok = (v as usize) < p.len() && !seen[v as usize];
        if ok {
            seen[v as usize] = true;
        }
        ok
    })
}

impl PermutationKey {
    pub fn new(key_id: impl Into<String>, perms: BTreeMap<char, Vec<u32>>) -> Result<Self> {
        for (c, p) in &perms {
            if !is_permutation(p) {
                return Err(Error::InvalidArgument(format!(
                    "mapping for {c:?} is not a permutation"
                )));
            }
        }
        let inverse = perms.iter().map(|(&c, p)| (c, invert(p))).collect();
        Ok(Self {
            key_id: key_id.into(),
            forward: perms,
            inverse,
        })
    }

    /// The key that leaves every glyph list in canonical order.
    pub fn identity(codebook: &Codebook) -> Self {
        let perms = codebook
            .entries()
            .map(|e| (e.character, (0..e.capacity() as u32).collect()))
            .collect();
        Self::new("identity", perms).expect("identity is a permutation")
    }

    /// Seeded Fisher-Yates shuffle of every glyph list.
    pub fn generate(codebook: &Codebook, seed: u64) -> Self {
        let perms: BTreeMap<char, Vec<u32>> = codebook
            .entries()
            .map(|e| {
                let mut p: Vec<u32> = (0..e.capacity() as u32).collect();
                p.shuffle(&mut rng::stream(seed, e.character as u64));
                (e.character, p)
            })
            .collect();
        let digest = rng::hash_reals(perms.iter().flat_map(|(&c, p)| {
            std::iter::once(c as u32 as f64).chain(p.iter().map(|&v| v as f64))
        }));
        Self::new(format!("key-{digest:016x}"), perms).expect("shuffle is a permutation")
    }

    pub fn key_id(&self) -> &str {
        &self.key_id
    }

    pub fn permutation(&self, c: char) -> Option<&[u32]> {
        self.forward.get(&c).map(Vec::as_slice)
    }

    pub fn apply(&self, c: char, index: u32, direction: Direction) -> Result<u32> {
        let table = match direction {
            Direction::Forward => &self.forward,
            Direction::Inverse => &self.inverse,
        };
        let p = table
            .get(&c)
            .ok_or_else(|| Error::KeyMismatch(format!("key has no mapping for {c:?}")))?;
        p.get(index as usize).copied().ok_or_else(|| {
            Error::KeyMismatch(format!(
                "index {index} outside the {}-glyph mapping for {c:?}",
                p.len()
            ))
        })
    }

    pub fn inverse(&self) -> Self {
        Self {
            key_id: format!("{}^-1", self.key_id),
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
        }
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &PermutationKey) -> Result<Self> {
        let mut perms = BTreeMap::new();
        for (&c, p) in &first.forward {
            let q = self.forward.get(&c).ok_or_else(|| {
                Error::KeyMismatch(format!("second key has no mapping for {c:?}"))
            })?;
            if q.len() != p.len() {
                return Err(Error::KeyMismatch(format!(
                    "mapping sizes differ for {c:?}"
                )));
            }
            perms.insert(c, p.iter().map(|&i| q[i as usize]).collect());
        }
        Self::new(format!("{}*{}", self.key_id, first.key_id), perms)
    }

    pub fn is_identity(&self) -> bool {
        self.forward
            .values()
            .all(|p| p.iter().enumerate().all(|(i, &v)| i as u32 == v))
    }

    /// Checks that the key covers `c` with a mapping of the codebook's size.
    pub fn check_entry(&self, entry: &CharacterEntry) -> Result<()> {
        match self.forward.get(&entry.character) {
            Some(p) if p.len() == entry.capacity() => Ok(()),
            Some(p) => Err(Error::KeyMismatch(format!(
                "key maps {} glyphs for {:?}, codebook has {}",
                p.len(),
                entry.character,
                entry.capacity()
            ))),
            None => Err(Error::KeyMismatch(format!(
                "key has no mapping for {:?}",
                entry.character
            ))),
        }
    }

    pub fn check_codebook(&self, codebook: &Codebook) -> Result<()> {
        codebook.entries().try_for_each(|e| self.check_entry(e))
    }

    /// The codebook whose glyph list `i` holds glyph `perm[i]` of the
    /// original, so that embedding with it equals embedding under the key.
    pub fn apply_to_codebook(&self, codebook: &Codebook) -> Result<Codebook> {
        self.check_codebook(codebook)?;
        let entries = codebook.entries().map(|e| {
            let p = &self.forward[&e.character];
            let mut e2 = e.clone();
            e2.glyphs = p
                .iter()
                .enumerate()
                .map(|(i, &src)| {
                    let mut g = e.glyphs[src as usize].clone();
                    g.index = i;
                    g
                })
                .collect();
            e2
        });
        Codebook::new(
            codebook.font_id(),
            format!("{}+{}", codebook.version(), self.key_id),
            codebook.resample_count(),
            entries,
        )
    }

    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = format!("{MAGIC}\n");
        format::write_header(&mut out, header);
        out.push_str(&format!("key_id {}\n", format::quote(&self.key_id)));
        out.push_str(&format!("characters {}\n", self.forward.len()));
        for (c, p) in &self.forward {
            out.push_str(&format!(
                "char {} {}",
                format::quote(&c.to_string()),
                p.len()
            ));
            for v in p {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        format::check_magic(&mut lines, MAGIC)?;
        let (n, rest) = lines.keyed("key_id")?;
        let key_id = format::unquote(rest, n)?;
        let (n, rest) = lines.keyed("characters")?;
        let count: usize = format::parse(rest, n, "character count")?;
        let mut perms = BTreeMap::new();
        for _ in 0..count {
            let (n, rest) = lines.keyed("char")?;
            // Split after the closing quote; the numbers that follow have none.
            let close = rest
                .rfind("\" ")
                .ok_or_else(|| Error::format(n, "expected: char <quoted> <len> <values>"))?;
            let s = format::unquote(&rest[..=close], n)?;
            let mut chars = s.chars();
            let c = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(Error::format(n, "character must be a single symbol")),
            };
            let mut nums = rest[close + 2..].split(' ');
            let len: usize = format::parse(nums.next().unwrap_or(""), n, "mapping length")?;
            let p: Vec<u32> = nums
                .map(|v| format::parse(v, n, "mapping value"))
                .collect::<Result<_>>()?;
            if p.len() != len {
                return Err(Error::format(
                    n,
                    format!("{} values, expected {len}", p.len()),
                ));
            }
            if perms.insert(c, p).is_some() {
                return Err(Error::format(n, "duplicate character"));
            }
        }
        let (n, l) = lines.expect("end")?;
        if l != "end" {
            return Err(Error::format(n, "expected \"end\""));
        }
        Self::new(key_id, perms).map_err(|e| Error::format(n, e.to_string()))
    }
}

/// `log2` of the number of distinct keys, `sum_c log2(N_c!)`.
pub fn key_space_bits(codebook: &Codebook) -> f64 {
    codebook
        .entries()
        .map(|e| (2..=e.capacity()).map(|i| (i as f64).log2()).sum::<f64>())
        .sum()
}
