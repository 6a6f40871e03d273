//! Embedding messages into documents and extracting them back.

use std::fmt;

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::channel::{self, ChannelParams, RecognitionResult};
use crate::codebook::Codebook;
use crate::crc::{
    encode_phi, ml_decode, CodeVector, DecodeOutcome, DecodeStatus, LikelihoodTable, MlScope,
};
use crate::crypto::{Direction, PermutationKey};
use crate::error::{Error, Result};
use crate::outline::GlyphOutline;
use crate::rng;

use super::document::{check_count, ChannelTrace, EncodedDocument};
use super::layout::{Layout, DEFAULT_K, DEFAULT_N};
use super::message::{chunk_message, frame_message, push_bits, PlainMessage, LENGTH_PREFIX_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecOptions {
    pub n: usize,
    pub k: usize,
    /// Candidate set for likelihood decoding of probability observations.
    pub scope: MlScope,
}

impl Default for CodecOptions {
    fn default() -> Self {
        Self {
            n: DEFAULT_N,
            k: DEFAULT_K,
            scope: MlScope::default(),
        }
    }
}

fn glyph_for(key: Option<&PermutationKey>, c: char, value: u32) -> Result<u32> {
    match key {
        Some(k) => k.apply(c, value, Direction::Forward),
        None => Ok(value),
    }
}

fn value_for(key: Option<&PermutationKey>, c: char, glyph: u32) -> Result<u32> {
    match key {
        Some(k) => k.apply(c, glyph, Direction::Inverse),
        None => Ok(glyph),
    }
}

fn check_key(key: Option<&PermutationKey>, layout: &Layout, codebook: &Codebook) -> Result<()> {
    if let Some(k) = key {
        for l in &layout.letters {
            k.check_entry(
                codebook
                    .entry(l.character)
                    .expect("letters come from the codebook"),
            )?;
        }
    }
    Ok(())
}

/// Glyph indices for every letter of `layout` carrying the given raw bits,
/// which must fit the layout's capacity. Unused blocks carry zero.
pub(crate) fn encode_layout(
    layout: &Layout,
    bits: &[bool],
    key: Option<&PermutationKey>,
) -> Result<Vec<u32>> {
    let values = chunk_message(bits, &layout.widths())?;
    let mut glyphs = vec![0u32; layout.letters.len()];
    let per_block: Vec<Vec<(usize, u32)>> = layout
        .blocks
        .par_iter()
        .zip(&values)
        .map(|(b, &m)| {
            let cw = encode_phi(m, &b.moduli)?;
            b.members
                .iter()
                .zip(&cw.0)
                .map(|(&i, &r)| Ok((i, glyph_for(key, layout.letters[i].character, r)?)))
                .collect()
        })
        .collect::<Result<_>>()?;
    for (i, g) in per_block.into_iter().flatten() {
        glyphs[i] = g;
    }
    Ok(glyphs)
}

/// Embeds `message` into `text`. With a key, integer `i` of character `c` is
/// written with glyph `key[c][i]`.
pub fn embed(
    text: &str,
    codebook: &Codebook,
    message: &PlainMessage,
    key: Option<&PermutationKey>,
    options: &CodecOptions,
) -> Result<EncodedDocument> {
    let layout = Layout::of_text(text, codebook, options.n, options.k)?;
    if layout.blocks.is_empty() {
        return Err(Error::DocumentTooSmall);
    }
    check_key(key, &layout, codebook)?;
    let framed = frame_message(message)?;
    let glyph_indices = encode_layout(&layout, &framed, key)?;
    Ok(EncodedDocument {
        codebook_id: codebook.id(),
        text: text.to_string(),
        glyph_indices,
    })
}

/// What the extractor saw for each letter.
#[derive(Debug, Clone, Copy)]
pub enum Observations<'a> {
    /// Hard glyph decisions, e.g. read from a vector document.
    Indices(&'a [u32]),
    /// Per-letter probability vectors over the letter's whole glyph list.
    Probabilities(&'a [RecognitionResult]),
}

impl Observations<'_> {
    fn len(&self) -> usize {
        match self {
            Observations::Indices(v) => v.len(),
            Observations::Probabilities(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub moduli: Vec<u32>,
    pub width: u32,
    pub outcome: DecodeOutcome,
}

/// Per-block decoding results of one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractReport {
    pub blocks: Vec<BlockReport>,
}

impl ExtractReport {
    pub fn all_exact(&self) -> bool {
        self.blocks
            .iter()
            .all(|b| b.outcome.status == DecodeStatus::Exact)
    }

    pub fn count(&self, status: DecodeStatus) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.outcome.status == status)
            .count()
    }

    pub fn capacity(&self) -> u64 {
        self.blocks.iter().map(|b| b.width as u64).sum()
    }

    /// The first `len` decoded bits. Fails with the index of the first block
    /// in that range that could not be decoded.
    pub fn raw_bits(&self, len: usize) -> Result<Vec<bool>> {
        if len as u64 > self.capacity() {
            return Err(Error::CapacityExceeded {
                needed: len as u64,
                available: self.capacity(),
            });
        }
        let mut out = Vec::with_capacity(len);
        for (t, b) in self.blocks.iter().enumerate() {
            if out.len() >= len {
                break;
            }
            let m = b.outcome.value.ok_or(Error::PartialDecode { block: t })?;
            push_bits(&mut out, m, b.width);
        }
        out.truncate(len);
        Ok(out)
    }

    /// Unframes the decoded bit stream.
    pub fn message(&self) -> Result<PlainMessage> {
        let capacity = self.capacity() as usize;
        if capacity < LENGTH_PREFIX_BITS {
            return Err(Error::CorruptFrame(format!(
                "{capacity} bits cannot hold the length prefix"
            )));
        }
        let prefix = self.raw_bits(LENGTH_PREFIX_BITS).map_err(|e| match e {
            Error::PartialDecode { block } => {
                Error::CorruptFrame(format!("length prefix lost in block {block}"))
            }
            e => e,
        })?;
        let len = prefix.iter().fold(0u64, |a, &b| a << 1 | b as u64);
        let end = LENGTH_PREFIX_BITS as u64 + len;
        if end > capacity as u64 {
            return Err(Error::CorruptFrame(format!(
                "length prefix {len} exceeds the {} available bits",
                capacity - LENGTH_PREFIX_BITS
            )));
        }
        let end = end as usize;
        // Decode through the end of the block holding the last payload bit,
        // so that its padding can be checked.
        let mut through = 0usize;
        for b in &self.blocks {
            through += b.width as usize;
            if through >= end {
                break;
            }
        }
        let bits = self.raw_bits(through)?;
        if bits[end..].iter().any(|&b| b) {
            return Err(Error::CorruptFrame(
                "nonzero padding after the payload".into(),
            ));
        }
        Ok(PlainMessage::new(bits[LENGTH_PREFIX_BITS..end].to_vec()))
    }
}

impl fmt::Display for ExtractReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, b) in self.blocks.iter().enumerate() {
            let p: Vec<String> = b.moduli.iter().map(u32::to_string).collect();
            writeln!(
                f,
                "block {t} moduli={} width={} {}",
                p.join(","),
                b.width,
                b.outcome
            )?;
        }
        Ok(())
    }
}

/// Restricts a glyph-space probability row to the integers `0..q` through
/// the key, renormalizing. A row with no mass there becomes uniform.
fn restrict_row(row: &[f64], q: u32, c: char, key: Option<&PermutationKey>) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(q as usize);
    for i in 0..q {
        let g = glyph_for(key, c, i)? as usize;
        out.push(row.get(g).copied().unwrap_or(0.0));
    }
    let total: f64 = out.iter().sum();
    if total > 0.0 && total.is_finite() {
        for v in &mut out {
            *v /= total;
        }
    } else {
        out = vec![1.0 / q as f64; q as usize];
    }
    Ok(out)
}

/// Decodes every block of `layout` from the observations.
///
/// Hard decisions carry no likelihood information, so they are decoded with
/// ties-only disambiguation over uniform rows, which is plain nearest-codeword
/// decoding. Probability observations use `options.scope`.
pub fn decode_layout(
    layout: &Layout,
    observations: Observations<'_>,
    codebook: &Codebook,
    key: Option<&PermutationKey>,
    options: &CodecOptions,
) -> Result<ExtractReport> {
    check_count(layout.letters.len(), observations.len())?;
    check_key(key, layout, codebook)?;
    let blocks = layout
        .blocks
        .par_iter()
        .map(|b| {
            let mut cv = Vec::with_capacity(b.members.len());
            let mut rows = Vec::with_capacity(b.members.len());
            for (&i, &q) in b.members.iter().zip(b.moduli.moduli()) {
                let letter = &layout.letters[i];
                let c = letter.character;
                match observations {
                    Observations::Indices(v) => {
                        let g = v[i];
                        if g as usize >= letter.capacity {
                            return Err(Error::OutOfRange {
                                value: g as u64,
                                bound: letter.capacity as u64,
                            });
                        }
                        let r = value_for(key, c, g)?;
                        cv.push(if r < q { r } else { 0 });
                        rows.push(vec![1.0 / q as f64; q as usize]);
                    }
                    Observations::Probabilities(v) => {
                        let p = &v[i].probabilities;
                        if p.len() != letter.capacity {
                            return Err(Error::LengthMismatch {
                                left: p.len(),
                                right: letter.capacity,
                            });
                        }
                        let row = restrict_row(p, q, c, key)?;
                        cv.push(channel::argmax(&row) as u32);
                        rows.push(row);
                    }
                }
            }
            let scope = match observations {
                Observations::Indices(_) => MlScope::TiedMinimizers,
                Observations::Probabilities(_) => options.scope,
            };
            let outcome = ml_decode(
                &CodeVector(cv),
                &b.moduli,
                &LikelihoodTable::new(rows)?,
                scope,
            )?;
            Ok(BlockReport {
                moduli: b.moduli.moduli().to_vec(),
                width: b.bit_width(),
                outcome,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ExtractReport { blocks })
}

fn check_codebook_id(id: &str, codebook: &Codebook) -> Result<()> {
    if id != codebook.id() {
        return Err(Error::InvalidArgument(format!(
            "document was written with codebook {id:?}, got {:?}",
            codebook.id()
        )));
    }
    Ok(())
}

/// Per-block report for an encoded (or vector-recognized) document.
pub fn extract_report(
    doc: &EncodedDocument,
    codebook: &Codebook,
    key: Option<&PermutationKey>,
    options: &CodecOptions,
) -> Result<ExtractReport> {
    check_codebook_id(&doc.codebook_id, codebook)?;
    let layout = Layout::of_text(&doc.text, codebook, options.n, options.k)?;
    decode_layout(
        &layout,
        Observations::Indices(&doc.glyph_indices),
        codebook,
        key,
        options,
    )
}

/// Per-block report for a channel trace.
pub fn extract_trace_report(
    trace: &ChannelTrace,
    codebook: &Codebook,
    key: Option<&PermutationKey>,
    options: &CodecOptions,
) -> Result<ExtractReport> {
    check_codebook_id(&trace.codebook_id, codebook)?;
    let layout = Layout::of_text(&trace.text, codebook, options.n, options.k)?;
    decode_layout(
        &layout,
        Observations::Probabilities(&trace.results),
        codebook,
        key,
        options,
    )
}

pub fn extract(
    doc: &EncodedDocument,
    codebook: &Codebook,
    key: Option<&PermutationKey>,
    options: &CodecOptions,
) -> Result<PlainMessage> {
    extract_report(doc, codebook, key, options)?.message()
}

pub fn extract_trace(
    trace: &ChannelTrace,
    codebook: &Codebook,
    key: Option<&PermutationKey>,
    options: &CodecOptions,
) -> Result<PlainMessage> {
    extract_trace_report(trace, codebook, key, options)?.message()
}

fn outlines(codebook: &Codebook, c: char) -> Vec<&GlyphOutline> {
    codebook
        .entry(c)
        .expect("letters come from the codebook")
        .glyphs
        .iter()
        .map(|g| &g.outline)
        .collect()
}

/// Passes every letter of `doc` through the noisy channel. Letter `i` uses
/// the stream `(params.seed, i)`.
pub fn simulate_document(
    doc: &EncodedDocument,
    codebook: &Codebook,
    params: &ChannelParams,
) -> Result<ChannelTrace> {
    let letters = super::layout::letter_sequence(&doc.text, codebook)?;
    check_count(letters.len(), doc.glyph_indices.len())?;
    let results = letters
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            let glyphs = outlines(codebook, l.character);
            let mut r = rng::stream(params.seed, i as u64);
            channel::simulate_with_rng(doc.glyph_indices[i] as usize, &glyphs, params, &mut r)
        })
        .collect::<Result<_>>()?;
    Ok(ChannelTrace {
        codebook_id: doc.codebook_id.clone(),
        text: doc.text.clone(),
        results,
    })
}

/// Channel trace of `doc` with exactly `errors[t]` misrecognized letters in
/// block `t`; blocks past the end of `errors`, and letters outside blocks,
/// are recognized correctly.
///
/// Inside a block a letter is recognized among the glyphs that carry its
/// residue range, so an error lands on another valid residue. The resulting
/// row is written back over the whole glyph list.
pub fn simulate_block_errors(
    doc: &EncodedDocument,
    codebook: &Codebook,
    key: Option<&PermutationKey>,
    errors: &[usize],
    params: &ChannelParams,
    options: &CodecOptions,
) -> Result<ChannelTrace> {
    let layout = Layout::of_text(&doc.text, codebook, options.n, options.k)?;
    check_count(layout.letters.len(), doc.glyph_indices.len())?;
    check_key(key, &layout, codebook)?;
    if let Some(&e) = errors.iter().find(|&&e| e > options.n) {
        return Err(Error::InvalidArgument(format!(
            "cannot inject {e} errors into blocks of {}",
            options.n
        )));
    }
    let mut results: Vec<Option<RecognitionResult>> = vec![None; layout.letters.len()];
    for (t, b) in layout.blocks.iter().enumerate() {
        let count = errors.get(t).copied().unwrap_or(0);
        let mut rng = rng::stream(params.seed, 1 << 32 | t as u64);
        let mut wrong = vec![false; b.members.len()];
        for j in sample(&mut rng, b.members.len(), count) {
            wrong[j] = true;
        }
        for (j, (&i, &q)) in b.members.iter().zip(b.moduli.moduli()).enumerate() {
            let l = &layout.letters[i];
            let all = outlines(codebook, l.character);
            let map: Vec<u32> = (0..q)
                .map(|v| glyph_for(key, l.character, v))
                .collect::<Result<_>>()?;
            let alphabet: Vec<&GlyphOutline> = map.iter().map(|&g| all[g as usize]).collect();
            let truth = value_for(key, l.character, doc.glyph_indices[i])?;
            let r = channel::conditioned(truth as usize, &alphabet, params, wrong[j], &mut rng)?;
            let mut row = vec![0.0; l.capacity];
            for (v, &g) in map.iter().enumerate() {
                row[g as usize] = r.probabilities[v];
            }
            results[i] = Some(RecognitionResult {
                probabilities: row,
                argmax_index: map[r.argmax_index] as usize,
                true_index: Some(doc.glyph_indices[i] as usize),
            });
        }
    }
    let results = results
        .into_iter()
        .enumerate()
        .map(|(i, r)| match r {
            Some(r) => Ok(r),
            None => {
                let l = &layout.letters[i];
                let glyphs = outlines(codebook, l.character);
                let truth = doc.glyph_indices[i] as usize;
                if glyphs.len() < 2 {
                    return Ok(RecognitionResult {
                        probabilities: vec![1.0],
                        argmax_index: 0,
                        true_index: Some(truth),
                    });
                }
                let mut rng = rng::stream(params.seed, i as u64);
                channel::conditioned(truth, &glyphs, params, false, &mut rng)
            }
        })
        .collect::<Result<_>>()?;
    Ok(ChannelTrace {
        codebook_id: doc.codebook_id.clone(),
        text: doc.text.clone(),
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn doc(letters: usize, message: &PlainMessage, seed: u64) -> (Codebook, EncodedDocument) {
        let cb = fixtures::calibrated_codebook();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = fixtures::english_text(letters, &mut rng);
        let d = embed(&text, &cb, message, None, &CodecOptions::default()).unwrap();
        (cb, d)
    }

    #[test]
    fn empty_message_round_trip() {
        let (cb, d) = doc(40, &PlainMessage::default(), 1);
        let report = extract_report(&d, &cb, None, &CodecOptions::default()).unwrap();
        assert!(report.all_exact());
        assert!(report.message().unwrap().is_empty());
    }

    #[test]
    fn too_small_document() {
        let cb = fixtures::calibrated_codebook();
        let r = embed(
            "abc",
            &cb,
            &PlainMessage::default(),
            None,
            &CodecOptions::default(),
        );
        assert!(matches!(r, Err(Error::DocumentTooSmall)));
    }

    #[test]
    fn unknown_character() {
        let cb = fixtures::codebook_with_capacities(&[('a', 5)]);
        let r = embed(
            "ab",
            &cb,
            &PlainMessage::default(),
            None,
            &CodecOptions::default(),
        );
        assert!(matches!(r, Err(Error::UnknownCharacter('b'))));
    }

    #[test]
    fn capacity_exceeded() {
        let m = PlainMessage::new(vec![true; 4000]);
        let cb = fixtures::calibrated_codebook();
        let r = embed(
            "the quick brown fox jumps",
            &cb,
            &m,
            None,
            &CodecOptions::default(),
        );
        assert!(matches!(r, Err(Error::CapacityExceeded { .. })));
    }

    #[test]
    fn keyed_round_trip_and_wrong_key() {
        let m = PlainMessage::from_bytes(b"key test");
        let cb = fixtures::calibrated_codebook();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let text = fixtures::english_text(120, &mut rng);
        let key = PermutationKey::generate(&cb, 11);
        let opts = CodecOptions::default();
        let d = embed(&text, &cb, &m, Some(&key), &opts).unwrap();
        assert_eq!(extract(&d, &cb, Some(&key), &opts).unwrap(), m);
        assert_ne!(extract(&d, &cb, None, &opts).ok(), Some(m));
    }

    #[test]
    fn clean_trace_decodes_exactly() {
        let m = PlainMessage::from_bytes(b"hi");
        let (cb, d) = doc(80, &m, 4);
        let params = ChannelParams::new(0.0, 0).unwrap();
        let trace = simulate_document(&d, &cb, &params).unwrap();
        let report = extract_trace_report(&trace, &cb, None, &CodecOptions::default()).unwrap();
        assert!(report.all_exact());
        assert_eq!(report.message().unwrap(), m);
    }

    #[test]
    fn single_errors_are_corrected() {
        let m = PlainMessage::from_bytes(b"ok");
        let (cb, d) = doc(80, &m, 5);
        let params = ChannelParams::new(channel::DEFAULT_SIGMA, 3).unwrap();
        let opts = CodecOptions::default();
        let ones = vec![1; 64];
        let trace = simulate_block_errors(&d, &cb, None, &ones, &params, &opts).unwrap();
        let report = extract_trace_report(&trace, &cb, None, &opts).unwrap();
        assert_eq!(report.count(DecodeStatus::Corrected), report.blocks.len());
        assert_eq!(report.message().unwrap(), m);
    }

    #[test]
    fn lost_block_is_reported() {
        let m = PlainMessage::new(vec![true; 30]);
        let (cb, d) = doc(60, &m, 6);
        let layout = Layout::of_text(&d.text, &cb, 5, 3).unwrap();
        let opts = CodecOptions::default();
        let mut report = extract_report(&d, &cb, None, &opts).unwrap();
        let last_needed = {
            let mut acc = 0;
            layout
                .widths()
                .iter()
                .position(|&w| {
                    acc += w as usize;
                    acc >= 62
                })
                .unwrap()
        };
        report.blocks[last_needed].outcome.value = None;
        report.blocks[last_needed].outcome.status = DecodeStatus::AmbiguousFail;
        match report.message() {
            Err(Error::PartialDecode { block }) => assert_eq!(block, last_needed),
            Err(Error::CorruptFrame(_)) => {
                assert!(layout.widths()[..last_needed].iter().sum::<u32>() < 32)
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
