//! Chinese Remainder code over per-letter glyph alphabets.
//!
//! A block of `n` letters carries one integer `m < M`, where `M` is the product
//! of the `k` smallest moduli. The codeword is the residue vector
//! `(m mod p_1, ..., m mod p_n)`; the `n - k` surplus residues are redundancy
//! that gives a minimum Hamming distance of `n - k + 1`.
//!
//! Decoding first tries plain CRT reconstruction. When the reconstructed value
//! falls outside `[0, M)` the code vector carries recognition errors and the
//! decoder searches `[0, M)` exhaustively for the nearest codewords. Ties (and,
//! by default, every codeword within one step beyond the unique-decoding
//! radius) are resolved with per-glyph recognition likelihoods.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Pairwise-coprime moduli for one block, in letter order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuliSet {
    moduli: Vec<u32>,
    k: usize,
    payload_bound: u64,
    product: u64,
}

impl ModuliSet {
    pub fn new(moduli: Vec<u32>, k: usize) -> Result<Self> {
        let n = moduli.len();
        if n == 0 || k == 0 || k > n {
            return Err(Error::InvalidModuli(format!(
                "need 1 <= k <= n, got n={n} k={k}"
            )));
        }
        if let Some(&p) = moduli.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidModuli(format!("modulus {p} is below 2")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if gcd(moduli[i] as u64, moduli[j] as u64) != 1 {
                    return Err(Error::NotCoprime {
                        a: moduli[i],
                        b: moduli[j],
                    });
                }
            }
        }
        let product = moduli
            .iter()
            .try_fold(1u64, |acc, &p| acc.checked_mul(p as u64))
            .ok_or_else(|| Error::InvalidModuli("product of moduli overflows u64".into()))?;
        let mut sorted = moduli.clone();
        sorted.sort_unstable();
        let payload_bound = sorted[..k].iter().map(|&p| p as u64).product();
        Ok(Self {
            moduli,
            k,
            payload_bound,
            product,
        })
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn n(&self) -> usize {
        self.moduli.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `M`: product of the `k` smallest moduli. Payloads live in `[0, M)`.
    pub fn payload_bound(&self) -> u64 {
        self.payload_bound
    }

    /// `P`: product of all moduli.
    pub fn product(&self) -> u64 {
        self.product
    }

    /// Payload bits per block, `floor(log2 M)`.
    pub fn bit_width(&self) -> u32 {
        floor_log2(self.payload_bound)
    }

    /// Errors correctable by nearest-codeword decoding, `floor((n - k) / 2)`.
    pub fn correctable(&self) -> usize {
        (self.n() - self.k) / 2
    }
}

/// A valid residue vector `phi(m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword(pub Vec<u32>);

/// A recognized residue vector, possibly containing errors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeVector(pub Vec<u32>);

impl From<Codeword> for CodeVector {
    fn from(c: Codeword) -> Self {
        CodeVector(c.0)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn floor_log2(v: u64) -> u32 {
    if v == 0 {
        0
    } else {
        63 - v.leading_zeros()
    }
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = extended_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

/// CRT reconstruction over arbitrary moduli: the unique `m` in `[0, P)` with
/// `m mod p_i = r_i`. Fails if the moduli are not pairwise coprime.
pub fn crt(residues: &[u32], moduli: &[u32]) -> Result<u64> {
    if residues.len() != moduli.len() {
        return Err(Error::LengthMismatch {
            left: residues.len(),
            right: moduli.len(),
        });
    }
    let product = moduli
        .iter()
        .try_fold(1u64, |acc, &p| acc.checked_mul(p as u64))
        .ok_or_else(|| Error::InvalidModuli("product of moduli overflows u64".into()))?;
    let mut acc: u128 = 0;
    for (i, (&r, &p)) in residues.iter().zip(moduli).enumerate() {
        if p == 0 {
            return Err(Error::InvalidModuli("zero modulus".into()));
        }
        let cofactor = product / p as u64;
        let b = mod_inverse(cofactor % p as u64, p as u64).ok_or_else(|| {
            let other = moduli
                .iter()
                .enumerate()
                .find(|&(j, &q)| j != i && gcd(p as u64, q as u64) != 1)
                .map(|(_, &q)| q)
                .unwrap_or(p);
            Error::NotCoprime { a: p, b: other }
        })?;
        // (r * b mod p) * P/p < P, so the sum of n terms fits comfortably in u128.
        let coeff = (r as u64 % p as u64) * b % p as u64;
        acc += coeff as u128 * cofactor as u128;
    }
    Ok((acc % product as u128) as u64)
}

pub fn crt_reconstruct(residues: &[u32], p: &ModuliSet) -> Result<u64> {
    crt(residues, p.moduli())
}

pub fn encode_phi(m: u64, p: &ModuliSet) -> Result<Codeword> {
    if m >= p.payload_bound() {
        return Err(Error::OutOfRange {
            value: m,
            bound: p.payload_bound(),
        });
    }
    Ok(Codeword(
        p.moduli().iter().map(|&q| (m % q as u64) as u32).collect(),
    ))
}

pub fn hamming_distance(u: &[u32], v: &[u32]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Exact,
    Corrected,
    CorrectedMl,
    AmbiguousFail,
}

impl DecodeStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecodeStatus::Exact => "exact",
            DecodeStatus::Corrected => "corrected",
            DecodeStatus::CorrectedMl => "corrected-ml",
            DecodeStatus::AmbiguousFail => "ambiguous-fail",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "exact" => DecodeStatus::Exact,
            "corrected" => DecodeStatus::Corrected,
            "corrected-ml" => DecodeStatus::CorrectedMl,
            "ambiguous-fail" => DecodeStatus::AmbiguousFail,
            _ => return None,
        })
    }

    pub fn is_success(&self) -> bool {
        !matches!(self, DecodeStatus::AmbiguousFail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub value: Option<u64>,
    /// Smallest Hamming distance from the code vector to any codeword.
    pub min_hamming: usize,
    /// Number of codewords the final decision was made among.
    pub candidate_count: usize,
}

impl fmt::Display for DecodeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "status={}", self.status.as_str())?;
        match self.value {
            Some(m) => write!(f, " m={m}")?,
            None => write!(f, " m=-")?,
        }
        write!(
            f,
            " min_hamming={} candidates={}",
            self.min_hamming, self.candidate_count
        )
    }
}

fn check_vector(cv: &CodeVector, p: &ModuliSet) -> Result<()> {
    if cv.0.len() != p.n() {
        return Err(Error::LengthMismatch {
            left: cv.0.len(),
            right: p.n(),
        });
    }
    for (&r, &q) in cv.0.iter().zip(p.moduli()) {
        if r >= q {
            return Err(Error::OutOfRange {
                value: r as u64,
                bound: q as u64,
            });
        }
    }
    Ok(())
}

/// Result of one exhaustive pass over `[0, M)`.
struct Scan {
    min: usize,
    minimizers: Vec<u64>,
    /// `(m, distance)` for every codeword within the requested radius.
    within: Vec<(u64, usize)>,
}

fn scan(cv: &CodeVector, p: &ModuliSet, radius: usize) -> Scan {
    let moduli = p.moduli();
    let target = &cv.0;
    let mut residues = vec![0u32; moduli.len()];
    let mut min = usize::MAX;
    let mut minimizers = Vec::new();
    let mut within = Vec::new();
    for m in 0..p.payload_bound() {
        let d = residues.iter().zip(target).filter(|(a, b)| a != b).count();
        if d < min {
            min = d;
            minimizers.clear();
        }
        if d == min {
            minimizers.push(m);
        }
        if d <= radius {
            within.push((m, d));
        }
        for (r, &q) in residues.iter_mut().zip(moduli) {
            *r += 1;
            if *r == q {
                *r = 0;
            }
        }
    }
    Scan {
        min,
        minimizers,
        within,
    }
}

/// Nearest-codeword decoding with the CRT fast path.
pub fn hamming_decode(cv: &CodeVector, p: &ModuliSet) -> Result<DecodeOutcome> {
    check_vector(cv, p)?;
    let m = crt_reconstruct(&cv.0, p)?;
    if m < p.payload_bound() {
        return Ok(DecodeOutcome {
            status: DecodeStatus::Exact,
            value: Some(m),
            min_hamming: 0,
            candidate_count: 1,
        });
    }
    let s = scan(cv, p, 0);
    Ok(from_minimizers(s.min, &s.minimizers))
}

fn from_minimizers(min: usize, minimizers: &[u64]) -> DecodeOutcome {
    if minimizers.len() == 1 {
        DecodeOutcome {
            status: DecodeStatus::Corrected,
            value: Some(minimizers[0]),
            min_hamming: min,
            candidate_count: 1,
        }
    } else {
        DecodeOutcome {
            status: DecodeStatus::AmbiguousFail,
            value: None,
            min_hamming: min,
            candidate_count: minimizers.len(),
        }
    }
}

/// Per-position glyph likelihoods `g(u, f)` for one block.
///
/// Row `j` covers every glyph of letter `j`, so its length is the letter's
/// capacity, which is at least the block modulus at that position.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodTable {
    rows: Vec<Vec<f64>>,
}

impl LikelihoodTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        for (j, row) in rows.iter().enumerate() {
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "likelihood row {j} has a negative or non-finite entry"
                )));
            }
            if row.iter().sum::<f64>() <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "likelihood row {j} sums to zero"
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Uninformative table: every glyph equally likely.
    pub fn uniform(capacities: &[usize]) -> Self {
        Self {
            rows: capacities
                .iter()
                .map(|&s| vec![1.0 / s as f64; s])
                .collect(),
        }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.rows
    }

    /// `ln P(cv | codeword)`: sum over mismatched positions of
    /// `ln(g(u_j, f_j) / sum_k g(u_k, f_j))`.
    pub fn log_likelihood(&self, cv: &[u32], codeword: &[u32]) -> f64 {
        let mut total = 0.0;
        for (j, (&seen, &r)) in cv.iter().zip(codeword).enumerate() {
            if seen == r {
                continue;
            }
            let row = &self.rows[j];
            let norm: f64 = row.iter().sum();
            let g = row.get(r as usize).copied().unwrap_or(0.0);
            total += (g / norm).ln();
        }
        total
    }
}

/// Which codewords compete in maximum-likelihood decoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MlScope {
    /// Only the tied Hamming minimizers, and only when there is a tie.
    TiedMinimizers,
    /// Every codeword within `floor((n - k) / 2) + 1` of the code vector.
    #[default]
    ListDecode,
    /// Every codeword within the given Hamming radius.
    Radius(usize),
}

impl MlScope {
    fn radius(&self, p: &ModuliSet) -> Option<usize> {
        match *self {
            MlScope::TiedMinimizers => None,
            MlScope::ListDecode => Some(p.correctable() + 1),
            MlScope::Radius(r) => Some(r),
        }
    }

    pub fn as_str(&self) -> String {
        match self {
            MlScope::TiedMinimizers => "ties".into(),
            MlScope::ListDecode => "list".into(),
            MlScope::Radius(r) => format!("radius:{r}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ties" => Some(MlScope::TiedMinimizers),
            "list" => Some(MlScope::ListDecode),
            _ => s
                .strip_prefix("radius:")
                .and_then(|r| r.parse().ok())
                .map(MlScope::Radius),
        }
    }
}

/// Hamming decoding with likelihood-based disambiguation.
pub fn ml_decode(
    cv: &CodeVector,
    p: &ModuliSet,
    g: &LikelihoodTable,
    scope: MlScope,
) -> Result<DecodeOutcome> {
    check_vector(cv, p)?;
    if g.rows().len() != p.n() {
        return Err(Error::LengthMismatch {
            left: g.rows().len(),
            right: p.n(),
        });
    }
    for (row, &q) in g.rows().iter().zip(p.moduli()) {
        if row.len() < q as usize {
            return Err(Error::InvalidArgument(format!(
                "likelihood row has {} entries, modulus is {q}",
                row.len()
            )));
        }
    }

    let m = crt_reconstruct(&cv.0, p)?;
    if m < p.payload_bound() {
        return Ok(DecodeOutcome {
            status: DecodeStatus::Exact,
            value: Some(m),
            min_hamming: 0,
            candidate_count: 1,
        });
    }

    let radius = scope.radius(p);
    let s = scan(cv, p, radius.unwrap_or(0));
    let candidates: Vec<u64> = match radius {
        None => {
            if s.minimizers.len() == 1 {
                return Ok(from_minimizers(s.min, &s.minimizers));
            }
            s.minimizers.clone()
        }
        Some(r) if s.min > r => s.minimizers.clone(),
        Some(_) => s.within.iter().map(|&(m, _)| m).collect(),
    };
    if candidates.len() == 1 {
        return Ok(from_minimizers(s.min, &candidates));
    }

    let mut best: Option<(u64, f64)> = None;
    for &m in &candidates {
        let cw: Vec<u32> = p.moduli().iter().map(|&q| (m % q as u64) as u32).collect();
        let ll = g.log_likelihood(&cv.0, &cw);
        if ll == f64::NEG_INFINITY || ll.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if ll <= b => {}
            _ => best = Some((m, ll)),
        }
    }
    // Agreeing with a unique nearest codeword is an ordinary correction.
    let nearest = (s.minimizers.len() == 1).then(|| s.minimizers[0]);
    Ok(match best {
        Some((m, _)) => DecodeOutcome {
            status: if nearest == Some(m) {
                DecodeStatus::Corrected
            } else {
                DecodeStatus::CorrectedMl
            },
            value: Some(m),
            min_hamming: s.min,
            candidate_count: candidates.len(),
        },
        None => DecodeOutcome {
            status: DecodeStatus::AmbiguousFail,
            value: None,
            min_hamming: s.min,
            candidate_count: candidates.len(),
        },
    })
}

/// Minimum pairwise Hamming distance over all codewords `phi(m)`, `m < M`,
/// by exhaustive comparison of every pair.
pub fn min_distance(p: &ModuliSet) -> usize {
    let bound = p.payload_bound();
    if bound < 2 {
        return p.n();
    }
    let codewords: Vec<Vec<u32>> = (0..bound)
        .map(|m| p.moduli().iter().map(|&q| (m % q as u64) as u32).collect())
        .collect();
    (0..codewords.len())
        .into_par_iter()
        .map(|i| {
            let a = &codewords[i];
            codewords[i + 1..]
                .iter()
                .map(|b| a.iter().zip(b).filter(|(x, y)| x != y).count())
                .min()
                .unwrap_or(usize::MAX)
        })
        .min()
        .unwrap_or(p.n())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: &[u32], k: usize) -> ModuliSet {
        ModuliSet::new(p.to_vec(), k).unwrap()
    }

    /// Scan `[0, P)` for the value with the given residues.
    fn brute_crt(r: &[u32], p: &[u32]) -> u64 {
        let total: u64 = p.iter().map(|&q| q as u64).product();
        (0..total)
            .find(|m| r.iter().zip(p).all(|(&ri, &pi)| m % pi as u64 == ri as u64))
            .unwrap()
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt(&[0, 0, 0], &[3, 5, 7]).unwrap(), 0);
        assert_eq!(brute_crt(&[2, 3, 2], &[3, 5, 7]), 23);
        assert_eq!(crt(&[2, 3, 2], &[3, 5, 7]).unwrap(), 23);
        assert_eq!(brute_crt(&[1, 2, 2, 3, 6], &[2, 3, 5, 7, 11]), 17);
        assert_eq!(crt(&[1, 2, 2, 3, 6], &[2, 3, 5, 7, 11]).unwrap(), 17);
    }

    #[test]
    fn crt_rejects_shared_factor() {
        assert!(matches!(
            crt(&[1, 1], &[4, 6]),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            ModuliSet::new(vec![4, 6, 7], 2),
            Err(Error::NotCoprime { a: 4, b: 6 })
        ));
    }

    #[test]
    fn moduli_set_bounds() {
        let p = set(&[11, 2, 7, 3, 5], 3);
        assert_eq!(p.payload_bound(), 30);
        assert_eq!(p.product(), 2310);
        assert_eq!(p.bit_width(), 4);
        assert!(ModuliSet::new(vec![3, 5], 3).is_err());
        assert!(ModuliSet::new(vec![1, 5], 1).is_err());
    }

    #[test]
    fn phi_examples() {
        let p = set(&[2, 3, 5, 7, 11], 3);
        assert_eq!(encode_phi(0, &p).unwrap().0, vec![0; 5]);
        assert_eq!(encode_phi(17, &p).unwrap().0, vec![1, 2, 2, 3, 6]);
        assert_eq!(encode_phi(29, &p).unwrap().0, vec![1, 2, 4, 1, 7]);
        assert_eq!(
            encode_phi(30, &p),
            Err(Error::OutOfRange {
                value: 30,
                bound: 30
            })
        );
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(
            hamming_distance(&[2, 3, 1, 0, 6], &[2, 0, 1, 0, 7]).unwrap(),
            2
        );
        assert_eq!(hamming_distance(&[4, 4], &[4, 4]).unwrap(), 0);
        assert_eq!(hamming_distance(&[0, 0, 0], &[1, 1, 1]).unwrap(), 3);
        assert!(hamming_distance(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn decode_clean_is_exact() {
        let p = set(&[2, 3, 5, 7, 11], 3);
        let cv = encode_phi(17, &p).unwrap().into();
        let out = hamming_decode(&cv, &p).unwrap();
        assert_eq!(out.status, DecodeStatus::Exact);
        assert_eq!(out.value, Some(17));
        assert_eq!(out.min_hamming, 0);
    }

    #[test]
    fn decode_corrects_single_error() {
        let p = set(&[2, 3, 5, 7, 11], 3);
        let mut cv = encode_phi(17, &p).unwrap().0;
        cv[4] = 9;
        let out = hamming_decode(&CodeVector(cv), &p).unwrap();
        assert_eq!(out.status, DecodeStatus::Corrected);
        assert_eq!(out.value, Some(17));
        assert_eq!(out.min_hamming, 1);
    }

    #[test]
    fn decode_reports_tie_on_two_errors() {
        let p = set(&[2, 3, 5, 7, 11], 3);
        let clean = encode_phi(17, &p).unwrap().0;
        // Search corruption pairs until a tie shows up.
        let mut found = None;
        'outer: for a in 0..5 {
            for b in a + 1..5 {
                for va in 0..p.moduli()[a] {
                    for vb in 0..p.moduli()[b] {
                        if va == clean[a] || vb == clean[b] {
                            continue;
                        }
                        let mut cv = clean.clone();
                        cv[a] = va;
                        cv[b] = vb;
                        let out = hamming_decode(&CodeVector(cv.clone()), &p).unwrap();
                        if out.status == DecodeStatus::AmbiguousFail {
                            found = Some(out);
                            break 'outer;
                        }
                    }
                }
            }
        }
        let out = found.expect("a tie exists for two errors");
        assert!(out.candidate_count >= 2);
        assert_eq!(out.value, None);
    }

    #[test]
    fn ml_matches_hamming_when_unambiguous() {
        let p = set(&[2, 3, 5, 7, 11], 3);
        let mut cv = encode_phi(17, &p).unwrap().0;
        cv[2] = 0;
        let cv = CodeVector(cv);
        let g = LikelihoodTable::uniform(&[2, 3, 5, 7, 11]);
        let ml = ml_decode(&cv, &p, &g, MlScope::TiedMinimizers).unwrap();
        assert_eq!(ml, hamming_decode(&cv, &p).unwrap());
    }

    #[test]
    fn ml_resolves_two_errors_with_informative_table() {
        let p = set(&[7, 8, 9, 11, 13], 3);
        let m = 321;
        let clean = encode_phi(m, &p).unwrap().0;
        let mut cv = clean.clone();
        cv[0] = (clean[0] + 1) % 7;
        cv[3] = (clean[3] + 1) % 11;
        // Observed glyph most likely, true glyph second at both corrupted
        // positions, everything else small.
        let rows: Vec<Vec<f64>> = p
            .moduli()
            .iter()
            .enumerate()
            .map(|(j, &q)| {
                let mut row = vec![0.01; q as usize];
                row[cv[j] as usize] = 0.6;
                if cv[j] != clean[j] {
                    row[clean[j] as usize] = 0.3;
                }
                row
            })
            .collect();
        let g = LikelihoodTable::new(rows).unwrap();
        let cv = CodeVector(cv);
        let out = ml_decode(&cv, &p, &g, MlScope::ListDecode).unwrap();
        assert_eq!(out.status, DecodeStatus::CorrectedMl);
        assert_eq!(out.value, Some(m));
    }

    #[test]
    fn uniform_table_prefers_errors_at_small_moduli() {
        // With uniform rows a mismatch at modulus q costs ln(1/q), so among
        // tied minimizers the one whose mismatches sit at the smallest moduli
        // wins; the smallest m breaks exact ties.
        let p = set(&[2, 3, 5, 7, 11], 3);
        let g = LikelihoodTable::uniform(&[2, 3, 5, 7, 11]);
        let mut checked = 0;
        for m in 0..30 {
            let clean = encode_phi(m, &p).unwrap().0;
            let mut cv = clean.clone();
            cv[3] = (cv[3] + 1) % 7;
            cv[4] = (cv[4] + 2) % 11;
            let cv = CodeVector(cv);
            let ham = hamming_decode(&cv, &p).unwrap();
            if ham.status != DecodeStatus::AmbiguousFail {
                continue;
            }
            let cost = |x: u64| -> f64 {
                p.moduli()
                    .iter()
                    .zip(&cv.0)
                    .filter(|(&q, &r)| (x % q as u64) as u32 != r)
                    .map(|(&q, _)| (q as f64).ln())
                    .sum()
            };
            let s = scan(&cv, &p, 0);
            let mut want = s.minimizers[0];
            for &x in &s.minimizers {
                if cost(x) < cost(want) - 1e-12 {
                    want = x;
                }
            }
            let ml = ml_decode(&cv, &p, &g, MlScope::TiedMinimizers).unwrap();
            assert_eq!(ml.value, Some(want));
            checked += 1;
        }
        assert!(checked > 0);
    }

    #[test]
    fn zero_likelihoods_fail() {
        let p = set(&[2, 3, 5, 7, 11], 3);
        let mut cv = encode_phi(5, &p).unwrap().0;
        cv[3] = (cv[3] + 1) % 7;
        cv[4] = (cv[4] + 1) % 11;
        let rows: Vec<Vec<f64>> = p
            .moduli()
            .iter()
            .enumerate()
            .map(|(j, &q)| {
                let mut row = vec![0.0; q as usize];
                row[cv[j] as usize] = 1.0;
                row
            })
            .collect();
        let g = LikelihoodTable::new(rows).unwrap();
        let out = ml_decode(&CodeVector(cv), &p, &g, MlScope::ListDecode).unwrap();
        assert_eq!(out.status, DecodeStatus::AmbiguousFail);
    }

    #[test]
    fn min_distance_examples() {
        assert_eq!(min_distance(&set(&[2, 3, 5, 7, 11], 3)), 3);
        assert_eq!(min_distance(&set(&[3, 5], 1)), 2);
        assert_eq!(min_distance(&set(&[2, 3, 5], 3)), 1);
    }

    #[test]
    fn scope_round_trips_through_text() {
        for s in [
            MlScope::TiedMinimizers,
            MlScope::ListDecode,
            MlScope::Radius(3),
        ] {
            assert_eq!(MlScope::parse(&s.as_str()), Some(s));
        }
    }

    #[test]
    fn outcome_dump_is_stable() {
        let out = DecodeOutcome {
            status: DecodeStatus::CorrectedMl,
            value: Some(17),
            min_hamming: 2,
            candidate_count: 3,
        };
        assert_eq!(
            out.to_string(),
            "status=corrected-ml m=17 min_hamming=2 candidates=3"
        );
    }
}
