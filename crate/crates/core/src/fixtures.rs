//! Synthetic glyphs, candidate sets, texts, and the calibrated codebook used
//! by the tests, the benchmark, and the CLI's synthetic workflows.
//!
//! A character's glyphs live on a 2D manifold. The point `(x, y)` modulates
//! the character's base contour radially by `x sin 3t + y cos 5t`, so nearby
//! manifold points give nearby outlines.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::channel::{entry_accuracy, ChannelParams};
use crate::codebook::{
    quantize_glyph, Candidate, CharacterEntry, Codebook, PerturbedGlyph, DEFAULT_RESAMPLE_COUNT,
};
use crate::outline::{BoundingBox, GlyphOutline, ManifoldPoint};
use crate::rng;

/// Radial displacement per unit of manifold distance.
pub const PERTURBATION: f64 = 0.02;

pub const ENGLISH_FREQUENCIES: [(char, f64); 26] = [
    ('a', 8.167),
    ('b', 1.492),
    ('c', 2.782),
    ('d', 4.253),
    ('e', 12.702),
    ('f', 2.228),
    ('g', 2.015),
    ('h', 6.094),
    ('i', 6.966),
    ('j', 0.153),
    ('k', 0.772),
    ('l', 4.025),
    ('m', 2.406),
    ('n', 6.749),
    ('o', 7.507),
    ('p', 1.929),
    ('q', 0.095),
    ('r', 5.987),
    ('s', 6.327),
    ('t', 9.056),
    ('u', 2.758),
    ('v', 0.978),
    ('w', 2.360),
    ('x', 0.150),
    ('y', 1.974),
    ('z', 0.074),
];

/// Glyph counts per lowercase letter, tuned so that English-frequency text
/// averages 1.77 embedded bits per letter with `(n, k) = (5, 3)` blocks.
pub const CALIBRATED_CAPACITIES: [(char, usize); 26] = [
    ('a', 12),
    ('b', 10),
    ('c', 11),
    ('d', 11),
    ('e', 13),
    ('f', 10),
    ('g', 10),
    ('h', 12),
    ('i', 12),
    ('j', 9),
    ('k', 9),
    ('l', 11),
    ('m', 11),
    ('n', 12),
    ('o', 13),
    ('p', 10),
    ('q', 9),
    ('r', 12),
    ('s', 12),
    ('t', 13),
    ('u', 11),
    ('v', 9),
    ('w', 10),
    ('x', 9),
    ('y', 10),
    ('z', 9),
];

fn char_harmonics(c: char) -> [(f64, f64); 3] {
    let mut h = rng::mix(c as u64 ^ 0x6c79_7068);
    let mut out = [(0.0, 0.0); 3];
    for slot in &mut out {
        let amp = (h & 0xffff) as f64 / 65535.0 * 0.12;
        let phase = ((h >> 16) & 0xffff) as f64 / 65535.0 * TAU;
        *slot = (amp, phase);
        h = rng::mix(h);
    }
    out
}

/// Outline of character `c` at manifold location `point`, fitted to the unit
/// square.
pub fn synthetic_outline(c: char, point: ManifoldPoint, vertices: usize) -> GlyphOutline {
    let harmonics = char_harmonics(c);
    let pts = (0..vertices)
        .map(|v| {
            let t = TAU * v as f64 / vertices as f64;
            let mut r = 1.0;
            for (h, &(amp, phase)) in harmonics.iter().enumerate() {
                r += amp * ((h + 2) as f64 * t + phase).cos();
            }
            r += PERTURBATION * (point.x * (3.0 * t).sin() + point.y * (5.0 * t).cos());
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    GlyphOutline::new(pts)
        .expect("synthetic contour is non-degenerate")
        .fit_to_box(&BoundingBox {
            min: [0.0, 0.0],
            max: [1.0, 1.0],
        })
}

/// The `count` integer lattice points closest to the origin, ordered by
/// radius and then by angle.
pub fn lattice_points(count: usize) -> Vec<ManifoldPoint> {
    let mut radius = 1i64;
    loop {
        let mut pts: Vec<(i64, i64)> = (-radius..=radius)
            .flat_map(|x| (-radius..=radius).map(move |y| (x, y)))
            .filter(|&(x, y)| x * x + y * y <= radius * radius)
            .collect();
        if pts.len() >= count {
            pts.sort_by(|a, b| {
                let ra = a.0 * a.0 + a.1 * a.1;
                let rb = b.0 * b.0 + b.1 * b.1;
                ra.cmp(&rb).then_with(|| angle(*a).total_cmp(&angle(*b)))
            });
            return pts
                .into_iter()
                .take(count)
                .map(|(x, y)| ManifoldPoint {
                    x: x as f64,
                    y: y as f64,
                })
                .collect();
        }
        radius += 1;
    }
}

fn angle((x, y): (i64, i64)) -> f64 {
    (y as f64).atan2(x as f64).rem_euclid(TAU)
}

/// Character entry whose glyphs sit on the first `count` lattice points.
/// Accuracies are estimated with `params`.
pub fn lattice_entry(c: char, count: usize, params: &ChannelParams) -> CharacterEntry {
    let glyph = |index: usize, point: ManifoldPoint| {
        let mut g = PerturbedGlyph {
            index,
            point,
            outline: synthetic_outline(c, point, DEFAULT_RESAMPLE_COUNT),
            accuracy: 1.0,
        };
        quantize_glyph(&mut g);
        g
    };
    let glyphs: Vec<PerturbedGlyph> = lattice_points(count)
        .into_iter()
        .enumerate()
        .map(|(i, p)| glyph(i, p))
        .collect();
    let mut entry = CharacterEntry {
        character: c,
        original: glyph(0, ManifoldPoint { x: 0.0, y: 0.0 }),
        glyphs,
    };
    if entry.glyphs.len() > 1 {
        let acc = entry_accuracy(&entry, params);
        for (g, a) in entry.glyphs.iter_mut().zip(acc) {
            g.accuracy = a;
            quantize_glyph(g);
        }
    }
    entry
}

/// Lowercase codebook with [`CALIBRATED_CAPACITIES`] glyphs per letter.
pub fn calibrated_codebook() -> Codebook {
    static CODEBOOK: OnceLock<Codebook> = OnceLock::new();
    CODEBOOK
        .get_or_init(|| {
            let params = ChannelParams::default();
            let entries = CALIBRATED_CAPACITIES
                .iter()
                .map(|&(c, n)| lattice_entry(c, n, &params));
            Codebook::new("synthetic-lattice", "1", DEFAULT_RESAMPLE_COUNT, entries)
                .expect("fixture codebook is valid")
        })
        .clone()
}

/// Codebook with caller-chosen capacities over the same synthetic glyphs.
pub fn codebook_with_capacities(capacities: &[(char, usize)]) -> Codebook {
    let params = ChannelParams::default();
    let entries = capacities
        .iter()
        .map(|&(c, n)| lattice_entry(c, n, &params));
    Codebook::new(
        "synthetic-lattice",
        "custom",
        DEFAULT_RESAMPLE_COUNT,
        entries,
    )
    .expect("fixture codebook is valid")
}

/// `count` manifold points drawn uniformly from a disk of the given radius.
pub fn random_points<R: Rng + ?Sized>(
    count: usize,
    radius: f64,
    rng: &mut R,
) -> Vec<ManifoldPoint> {
    (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let t = TAU * rng.random::<f64>();
            ManifoldPoint {
                x: r * t.cos(),
                y: r * t.sin(),
            }
        })
        .collect()
}

/// Build candidates for `c` at the given manifold points; ids follow the
/// point order.
pub fn candidates(c: char, points: &[ManifoldPoint]) -> Vec<Candidate> {
    points
        .iter()
        .enumerate()
        .map(|(id, &point)| Candidate {
            id,
            point,
            outline: synthetic_outline(c, point, DEFAULT_RESAMPLE_COUNT),
        })
        .collect()
}

/// Letter drawn from English frequencies.
pub fn english_letter<R: Rng + ?Sized>(rng: &mut R) -> char {
    static DIST: OnceLock<WeightedIndex<f64>> = OnceLock::new();
    let dist = DIST.get_or_init(|| {
        WeightedIndex::new(ENGLISH_FREQUENCIES.iter().map(|&(_, f)| f)).expect("positive weights")
    });
    ENGLISH_FREQUENCIES[dist.sample(rng)].0
}

/// Text of exactly `letters` lowercase letters in space-separated words of
/// 1 to 8 letters.
pub fn english_text<R: Rng + ?Sized>(letters: usize, rng: &mut R) -> String {
    let mut out = String::new();
    let mut left = letters;
    while left > 0 {
        if !out.is_empty() {
            out.push(' ');
        }
        let w = rng.random_range(1..=8).min(left);
        for _ in 0..w {
            out.push(english_letter(rng));
        }
        left -= w;
    }
    out
}

/// Letter count of the benchmark document.
pub const BENCH_LETTERS: usize = 176;

/// The benchmark document's text.
pub fn bench_text() -> String {
    english_text(BENCH_LETTERS, &mut rng::stream(176, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_order() {
        let p = lattice_points(5);
        assert_eq!((p[0].x, p[0].y), (0.0, 0.0));
        assert_eq!((p[1].x, p[1].y), (1.0, 0.0));
        assert_eq!((p[2].x, p[2].y), (0.0, 1.0));
        assert_eq!(lattice_points(13).len(), 13);
    }

    #[test]
    fn text_has_requested_letters() {
        let mut r = rng::stream(4, 0);
        let t = english_text(500, &mut r);
        assert_eq!(t.chars().filter(|c| c.is_alphabetic()).count(), 500);
    }

    #[test]
    fn fixture_accuracy_meets_floor() {
        let cb = calibrated_codebook();
        for e in cb.entries() {
            for g in &e.glyphs {
                assert!(
                    g.accuracy >= 0.9,
                    "{} glyph {}: {}",
                    e.character,
                    g.index,
                    g.accuracy
                );
            }
        }
    }
}
