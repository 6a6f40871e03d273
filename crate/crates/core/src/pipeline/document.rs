//! Encoded, vector, and channel-trace documents and their text formats.

use crate::channel::{recognize_vector, RecognitionResult};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::format::{self, Lines};
use crate::outline::GlyphOutline;

use super::layout::letter_sequence;

const DOCUMENT_MAGIC: &str = "glyphcrt-document 1";
const VECTOR_MAGIC: &str = "glyphcrt-vector 1";
const TRACE_MAGIC: &str = "glyphcrt-trace 1";

/// Text plus the glyph chosen for every letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedDocument {
    pub codebook_id: String,
    pub text: String,
    /// One glyph index per letter of `text`, in letter order.
    pub glyph_indices: Vec<u32>,
}

/// Text plus the outline drawn for every letter.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorDocument {
    pub codebook_id: String,
    pub text: String,
    pub outlines: Vec<GlyphOutline>,
}

/// Text plus a recognition result for every letter.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTrace {
    pub codebook_id: String,
    pub text: String,
    pub results: Vec<RecognitionResult>,
}

fn write_preamble(
    out: &mut String,
    magic: &str,
    header: &[String],
    id: &str,
    text: &str,
    n: usize,
) {
    out.push_str(magic);
    out.push('\n');
    format::write_header(out, header);
    out.push_str(&format!("codebook {}\n", format::quote(id)));
    out.push_str(&format!("text {}\n", format::quote(text)));
    out.push_str(&format!("letters {n}\n"));
}

fn read_preamble(lines: &mut Lines<'_>, magic: &str) -> Result<(String, String, usize)> {
    format::check_magic(lines, magic)?;
    let (n, rest) = lines.keyed("codebook")?;
    let id = format::unquote(rest, n)?;
    let (n, rest) = lines.keyed("text")?;
    let text = format::unquote(rest, n)?;
    let (n, rest) = lines.keyed("letters")?;
    let count = format::parse(rest, n, "letter count")?;
    Ok((id, text, count))
}

fn read_end(lines: &mut Lines<'_>) -> Result<()> {
    let (n, l) = lines.expect("end")?;
    if l != "end" {
        return Err(Error::format(n, "expected \"end\""));
    }
    Ok(())
}

impl EncodedDocument {
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        write_preamble(
            &mut out,
            DOCUMENT_MAGIC,
            header,
            &self.codebook_id,
            &self.text,
            self.glyph_indices.len(),
        );
        out.push_str("indices");
        for i in &self.glyph_indices {
            out.push_str(&format!(" {i}"));
        }
        out.push_str("\nend\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (codebook_id, body, count) = read_preamble(&mut lines, DOCUMENT_MAGIC)?;
        let (n, rest) = lines.keyed("indices")?;
        let glyph_indices: Vec<u32> = rest
            .split(' ')
            .filter(|s| !s.is_empty())
            .map(|v| format::parse(v, n, "glyph index"))
            .collect::<Result<_>>()?;
        if glyph_indices.len() != count {
            return Err(Error::format(
                n,
                format!("{} indices for {count} letters", glyph_indices.len()),
            ));
        }
        read_end(&mut lines)?;
        Ok(Self {
            codebook_id,
            text: body,
            glyph_indices,
        })
    }

    /// Draws every letter with its chosen glyph outline.
    pub fn render(&self, codebook: &Codebook) -> Result<VectorDocument> {
        let letters = letter_sequence(&self.text, codebook)?;
        check_count(letters.len(), self.glyph_indices.len())?;
        let outlines = letters
            .iter()
            .zip(&self.glyph_indices)
            .map(|(l, &g)| {
                let entry = codebook
                    .entry(l.character)
                    .expect("letters come from the codebook");
                entry
                    .glyphs
                    .get(g as usize)
                    .map(|g| g.outline.clone())
                    .ok_or(Error::OutOfRange {
                        value: g as u64,
                        bound: entry.capacity() as u64,
                    })
            })
            .collect::<Result<_>>()?;
        Ok(VectorDocument {
            codebook_id: self.codebook_id.clone(),
            text: self.text.clone(),
            outlines,
        })
    }
}

pub(crate) fn check_count(letters: usize, observed: usize) -> Result<()> {
    if letters != observed {
        return Err(Error::LengthMismatch {
            left: observed,
            right: letters,
        });
    }
    Ok(())
}

impl VectorDocument {
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        write_preamble(
            &mut out,
            VECTOR_MAGIC,
            header,
            &self.codebook_id,
            &self.text,
            self.outlines.len(),
        );
        for o in &self.outlines {
            out.push('v');
            for v in o.vertices() {
                out.push_str(&format!(" {},{}", format::fixed(v[0]), format::fixed(v[1])));
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (codebook_id, body, count) = read_preamble(&mut lines, VECTOR_MAGIC)?;
        let mut outlines = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, rest) = lines.keyed("v")?;
            let vertices = rest
                .split(' ')
                .map(|tok| {
                    let (a, b) = tok
                        .split_once(',')
                        .ok_or_else(|| Error::format(n, format!("bad vertex {tok:?}")))?;
                    Ok([
                        format::parse_finite(a, n, "vertex x")?,
                        format::parse_finite(b, n, "vertex y")?,
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            outlines
                .push(GlyphOutline::new(vertices).map_err(|e| Error::format(n, e.to_string()))?);
        }
        read_end(&mut lines)?;
        Ok(Self {
            codebook_id,
            text: body,
            outlines,
        })
    }

    /// Nearest-glyph recognition of every outline.
    pub fn recognize(&self, codebook: &Codebook) -> Result<ChannelTrace> {
        let letters = letter_sequence(&self.text, codebook)?;
        check_count(letters.len(), self.outlines.len())?;
        let results = letters
            .iter()
            .zip(&self.outlines)
            .map(|(l, f)| {
                let entry = codebook
                    .entry(l.character)
                    .expect("letters come from the codebook");
                recognize_vector(f, entry)
            })
            .collect::<Result<_>>()?;
        Ok(ChannelTrace {
            codebook_id: self.codebook_id.clone(),
            text: self.text.clone(),
            results,
        })
    }
}

impl ChannelTrace {
    /// Probabilities are written in shortest round-trip form, so reading a
    /// trace back reproduces every value exactly.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        write_preamble(
            &mut out,
            TRACE_MAGIC,
            header,
            &self.codebook_id,
            &self.text,
            self.results.len(),
        );
        for r in &self.results {
            out.push_str(&format!("r {} ", r.argmax_index));
            match r.true_index {
                Some(t) => out.push_str(&t.to_string()),
                None => out.push('-'),
            }
            for p in &r.probabilities {
                out.push_str(&format!(" {p}"));
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (codebook_id, body, count) = read_preamble(&mut lines, TRACE_MAGIC)?;
        let mut results = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, rest) = lines.keyed("r")?;
            let mut f = rest.split(' ');
            let argmax_index = format::parse(f.next().unwrap_or(""), n, "argmax")?;
            let true_index = match f.next() {
                Some("-") => None,
                Some(t) => Some(format::parse(t, n, "true index")?),
                None => return Err(Error::format(n, "missing true index")),
            };
            let probabilities: Vec<f64> = f
                .map(|v| format::parse_finite(v, n, "probability"))
                .collect::<Result<_>>()?;
            if probabilities.is_empty() || probabilities.iter().any(|&p| p < 0.0) {
                return Err(Error::format(
                    n,
                    "probabilities must be non-empty and non-negative",
                ));
            }
            if argmax_index >= probabilities.len() {
                return Err(Error::format(n, "argmax outside the probability vector"));
            }
            results.push(RecognitionResult {
                probabilities,
                argmax_index,
                true_index,
            });
        }
        read_end(&mut lines)?;
        Ok(Self {
            codebook_id,
            text: body,
            results,
        })
    }
}
