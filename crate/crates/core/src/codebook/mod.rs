//! Glyph codebooks: for every character, the ordered list of perturbed glyphs
//! whose list index is the integer a letter carries.

mod build;

use std::collections::BTreeMap;

pub use build::{
    build_character, build_codebook, confusion_test, BuildParams, BuildReport, Candidate,
    ChannelOracle, CharacterBuild, DistinguishabilityOracle,
};

use crate::error::{Error, Result};
use crate::format::{self, Lines};
use crate::outline::{quantize, GlyphOutline, ManifoldPoint};

pub const DEFAULT_RESAMPLE_COUNT: usize = 64;
const MAGIC: &str = "glyphcrt-codebook 1";

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedGlyph {
    pub index: usize,
    pub point: ManifoldPoint,
    pub outline: GlyphOutline,
    /// Estimated recognition accuracy in `[0, 1]`.
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterEntry {
    pub character: char,
    pub original: PerturbedGlyph,
    pub glyphs: Vec<PerturbedGlyph>,
}

impl CharacterEntry {
    pub fn capacity(&self) -> usize {
        self.glyphs.len()
    }

    fn validate(&self, resample: usize) -> Result<()> {
        if self.glyphs.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "character {:?} has no glyphs",
                self.character
            )));
        }
        for (i, g) in self.glyphs.iter().enumerate() {
            if g.index != i {
                return Err(Error::InvalidArgument(format!(
                    "character {:?}: glyph at position {i} has index {}",
                    self.character, g.index
                )));
            }
        }
        for g in self.glyphs.iter().chain(std::iter::once(&self.original)) {
            if g.outline.vertex_count() != resample {
                return Err(Error::VertexCountMismatch {
                    left: g.outline.vertex_count(),
                    right: resample,
                });
            }
            if !(0.0..=1.0).contains(&g.accuracy) {
                return Err(Error::InvalidArgument(format!(
                    "accuracy {} outside [0, 1]",
                    g.accuracy
                )));
            }
        }
        Ok(())
    }
}

/// Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    font_id: String,
    version: String,
    resample_count: usize,
    entries: BTreeMap<char, CharacterEntry>,
}

impl Codebook {
    pub fn new(
        font_id: impl Into<String>,
        version: impl Into<String>,
        resample_count: usize,
        entries: impl IntoIterator<Item = CharacterEntry>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in entries {
            e.validate(resample_count)?;
            if map.insert(e.character, e).is_some() {
                return Err(Error::InvalidArgument("duplicate character entry".into()));
            }
        }
        Ok(Self {
            font_id: font_id.into(),
            version: version.into(),
            resample_count,
            entries: map,
        })
    }

    pub fn font_id(&self) -> &str {
        &self.font_id
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// `font_id@version`, the reference stored in encoded documents.
    pub fn id(&self) -> String {
        format!("{}@{}", self.font_id, self.version)
    }

    pub fn resample_count(&self) -> usize {
        self.resample_count
    }

    pub fn entry(&self, c: char) -> Option<&CharacterEntry> {
        self.entries.get(&c)
    }

    pub fn contains(&self, c: char) -> bool {
        self.entries.contains_key(&c)
    }

    pub fn capacity(&self, c: char) -> Option<usize> {
        self.entries.get(&c).map(CharacterEntry::capacity)
    }

    pub fn entries(&self) -> impl Iterator<Item = &CharacterEntry> {
        self.entries.values()
    }

    pub fn characters(&self) -> impl Iterator<Item = char> + '_ {
        self.entries.keys().copied()
    }

    /// Serializes to the codebook text format. Coordinates are written with
    /// six decimals; a codebook read back from this text writes identical
    /// bytes.
    pub fn to_text(&self, header: &[String]) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        format::write_header(&mut out, header);
        out.push_str(&format!("font_id {}\n", format::quote(&self.font_id)));
        out.push_str(&format!("version {}\n", format::quote(&self.version)));
        out.push_str(&format!("resample {}\n", self.resample_count));
        out.push_str(&format!("characters {}\n", self.entries.len()));
        for e in self.entries.values() {
            out.push_str(&format!(
                "char {} {}\n",
                format::quote(&e.character.to_string()),
                e.glyphs.len()
            ));
            out.push_str("original ");
            write_glyph_fields(&mut out, &e.original);
            for g in &e.glyphs {
                out.push_str(&format!("glyph {} ", g.index));
                write_glyph_fields(&mut out, g);
            }
        }
        out.push_str("end\n");
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        format::check_magic(&mut lines, MAGIC)?;
        let (n, rest) = lines.keyed("font_id")?;
        let font_id = format::unquote(rest, n)?;
        let (n, rest) = lines.keyed("version")?;
        let version = format::unquote(rest, n)?;
        let (n, rest) = lines.keyed("resample")?;
        let resample: usize = format::parse(rest, n, "resample count")?;
        let (n, rest) = lines.keyed("characters")?;
        let count: usize = format::parse(rest, n, "character count")?;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, rest) = lines.keyed("char")?;
            let (quoted, glyph_count) = rest
                .rsplit_once(' ')
                .ok_or_else(|| Error::format(n, "expected: char <quoted> <count>"))?;
            let s = format::unquote(quoted, n)?;
            let mut chars = s.chars();
            let character = match (chars.next(), chars.next()) {
                (Some(c), None) => c,
                _ => return Err(Error::format(n, "character must be a single symbol")),
            };
            let glyph_count: usize = format::parse(glyph_count, n, "glyph count")?;
            let (n, rest) = lines.keyed("original")?;
            let original = read_glyph_fields(rest, n, 0, resample)?;
            let mut glyphs = Vec::with_capacity(glyph_count);
            for i in 0..glyph_count {
                let (n, rest) = lines.keyed("glyph")?;
                let (idx, rest) = rest
                    .split_once(' ')
                    .ok_or_else(|| Error::format(n, "expected glyph index"))?;
                let idx: usize = format::parse(idx, n, "glyph index")?;
                if idx != i {
                    return Err(Error::format(n, format!("glyph index {idx}, expected {i}")));
                }
                glyphs.push(read_glyph_fields(rest, n, idx, resample)?);
            }
            entries.push(CharacterEntry {
                character,
                original,
                glyphs,
            });
        }
        let (n, l) = lines.expect("end")?;
        if l != "end" {
            return Err(Error::format(n, "expected \"end\""));
        }
        Codebook::new(font_id, version, resample, entries)
            .map_err(|e| Error::format(n, e.to_string()))
    }
}

fn write_glyph_fields(out: &mut String, g: &PerturbedGlyph) {
    out.push_str(&format!(
        "{} {} {}",
        format::fixed(g.point.x),
        format::fixed(g.point.y),
        format::fixed(g.accuracy)
    ));
    for v in g.outline.vertices() {
        out.push_str(&format!(" {},{}", format::fixed(v[0]), format::fixed(v[1])));
    }
    out.push('\n');
}

fn read_glyph_fields(
    rest: &str,
    n: usize,
    index: usize,
    resample: usize,
) -> Result<PerturbedGlyph> {
    let mut parts = rest.split(' ');
    let mut next = |what: &str| {
        parts
            .next()
            .ok_or_else(|| Error::format(n, format!("missing {what}")))
    };
    let x = format::parse_finite(next("x")?, n, "x")?;
    let y = format::parse_finite(next("y")?, n, "y")?;
    let accuracy = format::parse_finite(next("accuracy")?, n, "accuracy")?;
    let mut vertices = Vec::with_capacity(resample);
    for tok in parts {
        let (a, b) = tok
            .split_once(',')
            .ok_or_else(|| Error::format(n, format!("bad vertex {tok:?}")))?;
        vertices.push([
            format::parse_finite(a, n, "vertex x")?,
            format::parse_finite(b, n, "vertex y")?,
        ]);
    }
    if vertices.len() != resample {
        return Err(Error::format(
            n,
            format!("{} vertices, expected {resample}", vertices.len()),
        ));
    }
    let outline = GlyphOutline::new(vertices).map_err(|e| Error::format(n, e.to_string()))?;
    Ok(PerturbedGlyph {
        index,
        point: ManifoldPoint::new(x, y).map_err(|e| Error::format(n, e.to_string()))?,
        outline,
        accuracy,
    })
}

/// Rounds every stored real to the text precision so that in-memory values
/// equal what a round trip through the file would produce.
pub(crate) fn quantize_glyph(g: &mut PerturbedGlyph) {
    g.point = ManifoldPoint {
        x: quantize(g.point.x),
        y: quantize(g.point.y),
    };
    g.accuracy = quantize(g.accuracy);
    g.outline = g.outline.quantized();
}
