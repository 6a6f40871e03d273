//! Iterative confusion testing and maximum-clique selection of perturbed
//! glyphs.

use std::collections::{BTreeSet, HashMap};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use super::{quantize_glyph, CharacterEntry, Codebook, PerturbedGlyph};
use crate::channel::{accuracy_with_keys, glyph_key, ChannelParams};
use crate::clique::{max_clique, ConfusionGraph};
use crate::error::{Error, Result};
use crate::outline::{quantize, resample_outline, GlyphOutline, ManifoldPoint};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub id: usize,
    pub point: ManifoldPoint,
    pub outline: GlyphOutline,
}

/// Input for one character: its original glyph and the perceptually similar
/// candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterBuild {
    pub character: char,
    pub original: Candidate,
    pub candidates: Vec<Candidate>,
}

/// Stand-in for a trained classifier's accuracy on a set of glyphs.
pub trait DistinguishabilityOracle: Sync {
    /// Accuracy of telling `a` and `b` apart, in `[0, 1]`.
    fn pair_accuracy(&self, a: &Candidate, b: &Candidate) -> f64;

    /// Per-glyph accuracy of recognition among all of `set`.
    fn set_accuracy(&self, set: &[&Candidate]) -> Vec<f64>;
}

/// Nearest-outline classification of noisy channel observations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelOracle {
    pub params: ChannelParams,
}

impl DistinguishabilityOracle for ChannelOracle {
    fn pair_accuracy(&self, a: &Candidate, b: &Candidate) -> f64 {
        let acc = self.set_accuracy(&[a, b]);
        (acc[0] + acc[1]) / 2.0
    }

    fn set_accuracy(&self, set: &[&Candidate]) -> Vec<f64> {
        if set.len() < 2 {
            return vec![1.0; set.len()];
        }
        let glyphs: Vec<&GlyphOutline> = set.iter().map(|c| &c.outline).collect();
        let keys: Vec<u64> = glyphs.iter().map(|g| glyph_key(g)).collect();
        accuracy_with_keys(&glyphs, &keys, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildParams {
    pub font_id: String,
    pub version: String,
    pub resample_count: usize,
    /// Pairs tested per iteration.
    pub pair_count: usize,
    pub pair_threshold: f64,
    pub final_threshold: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for BuildParams {
    fn default() -> Self {
        Self {
            font_id: "synthetic".into(),
            version: "1".into(),
            resample_count: super::DEFAULT_RESAMPLE_COUNT,
            pair_count: 100,
            pair_threshold: 0.95,
            final_threshold: 0.9,
            max_iterations: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BuildReport {
    /// `(character, iterations, warning)` per character.
    pub characters: Vec<(char, usize, Option<String>)>,
}

impl BuildReport {
    pub fn max_iterations(&self) -> usize {
        self.characters.iter().map(|c| c.1).max().unwrap_or(0)
    }
}

/// Tests up to `pair_count` distinct random pairs of `candidates` and returns
/// the `(id, id)` pairs, smaller id first, whose accuracy is below
/// `threshold`.
pub fn confusion_test<R: Rng + ?Sized>(
    candidates: &[Candidate],
    oracle: &dyn DistinguishabilityOracle,
    pair_count: usize,
    threshold: f64,
    rng: &mut R,
) -> Result<BTreeSet<(usize, usize)>> {
    if candidates.len() < 2 {
        return Err(Error::InvalidArgument(
            "confusion test needs at least two candidates".into(),
        ));
    }
    let mut sorted: Vec<&Candidate> = candidates.iter().collect();
    sorted.sort_by_key(|c| c.id);
    let all: Vec<(usize, usize)> = (0..sorted.len())
        .flat_map(|i| (i + 1..sorted.len()).map(move |j| (i, j)))
        .collect();
    let chosen: Vec<(usize, usize)> = sample(rng, all.len(), pair_count.min(all.len()))
        .into_iter()
        .map(|i| all[i])
        .collect();
    Ok(chosen
        .par_iter()
        .filter(|&&(i, j)| oracle.pair_accuracy(sorted[i], sorted[j]) < threshold)
        .map(|&(i, j)| (sorted[i].id, sorted[j].id))
        .collect())
}

fn prepare(c: &Candidate, resample: usize) -> Result<Candidate> {
    let outline = if c.outline.vertex_count() == resample {
        c.outline.clone()
    } else {
        resample_outline(&c.outline, resample)?
    };
    Ok(Candidate {
        id: c.id,
        point: ManifoldPoint {
            x: quantize(c.point.x),
            y: quantize(c.point.y),
        },
        outline: outline.quantized(),
    })
}

fn to_glyph(index: usize, c: &Candidate, accuracy: f64) -> PerturbedGlyph {
    let mut g = PerturbedGlyph {
        index,
        point: c.point,
        outline: c.outline.clone(),
        accuracy,
    };
    quantize_glyph(&mut g);
    g
}

/// Runs the confusion-test loop for one character. Returns the entry and the
/// number of iterations used.
///
/// Each iteration tests pairs of the current set that have not been tested
/// yet, drops every failing pair from the distinguishability graph, and keeps
/// a maximum clique. The loop ends once the set is unchanged and every pair in
/// it has been tested, so every retained pair is known to pass.
pub fn build_character(
    input: &CharacterBuild,
    oracle: &dyn DistinguishabilityOracle,
    params: &BuildParams,
) -> Result<(CharacterEntry, usize, Option<String>)> {
    let resample = params.resample_count;
    let original = prepare(&input.original, resample)?;
    let mut cands: Vec<Candidate> = input
        .candidates
        .iter()
        .map(|c| prepare(c, resample))
        .collect::<Result<_>>()?;
    cands.sort_by_key(|c| c.id);
    if cands.windows(2).any(|w| w[0].id == w[1].id) {
        return Err(Error::InvalidArgument(format!(
            "duplicate candidate id for {:?}",
            input.character
        )));
    }
    if cands.is_empty() {
        let entry = CharacterEntry {
            character: input.character,
            original: to_glyph(0, &original, 1.0),
            glyphs: vec![to_glyph(0, &original, 1.0)],
        };
        return Ok((entry, 0, Some("no candidates; original glyph only".into())));
    }

    let pos: HashMap<usize, usize> = cands.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
    let mut rng = rng::stream(params.seed, input.character as u64);
    let mut tested: HashMap<(usize, usize), bool> = HashMap::new();
    let mut current: Vec<usize> = cands.iter().map(|c| c.id).collect();
    let mut iterations = 0;
    loop {
        if iterations == params.max_iterations {
            return Err(Error::NonConvergence { iterations });
        }
        iterations += 1;
        let mut untested: Vec<(usize, usize)> = (0..current.len())
            .flat_map(|i| (i + 1..current.len()).map(move |j| (i, j)))
            .map(|(i, j)| (current[i], current[j]))
            .filter(|p| !tested.contains_key(p))
            .collect();
        untested.shuffle(&mut rng);
        untested.truncate(params.pair_count);
        let results: Vec<((usize, usize), bool)> = untested
            .par_iter()
            .map(|&(a, b)| {
                let acc = oracle.pair_accuracy(&cands[pos[&a]], &cands[pos[&b]]);
                ((a, b), acc >= params.pair_threshold)
            })
            .collect();
        tested.extend(results);

        let mut graph = ConfusionGraph::complete(current.iter().copied());
        for (&(a, b), &ok) in &tested {
            if !ok {
                graph.remove_edge(a, b);
            }
        }
        let next = max_clique(&graph);
        let settled = (0..next.len())
            .all(|i| (i + 1..next.len()).all(|j| tested.contains_key(&(next[i], next[j]))));
        let unchanged = next == current;
        current = next;
        if unchanged && settled {
            break;
        }
    }

    let mut kept: Vec<&Candidate> = current.iter().map(|id| &cands[pos[id]]).collect();
    let acc = oracle.set_accuracy(&kept);
    let before = kept.len();
    let mut accuracies: Vec<f64> = Vec::new();
    kept = kept
        .into_iter()
        .zip(&acc)
        .filter(|(_, &a)| a >= params.final_threshold)
        .map(|(c, &a)| {
            accuracies.push(a);
            c
        })
        .collect();
    if kept.len() != before {
        // Fewer alternatives can only help the survivors.
        accuracies = oracle.set_accuracy(&kept);
    }
    let mut warning = None;
    let glyphs = if kept.is_empty() {
        warning = Some("no glyph survived the accuracy filter; original glyph only".into());
        vec![to_glyph(0, &original, 1.0)]
    } else {
        kept.iter()
            .zip(&accuracies)
            .enumerate()
            .map(|(i, (c, &a))| to_glyph(i, c, a))
            .collect()
    };
    let entry = CharacterEntry {
        character: input.character,
        original: to_glyph(0, &original, 1.0),
        glyphs,
    };
    Ok((entry, iterations, warning))
}

pub fn build_codebook(
    inputs: &[CharacterBuild],
    oracle: &dyn DistinguishabilityOracle,
    params: &BuildParams,
) -> Result<(Codebook, BuildReport)> {
    let mut entries = Vec::with_capacity(inputs.len());
    let mut report = BuildReport::default();
    for input in inputs {
        let (entry, iterations, warning) = build_character(input, oracle, params)?;
        report
            .characters
            .push((input.character, iterations, warning));
        entries.push(entry);
    }
    let cb = Codebook::new(
        params.font_id.clone(),
        params.version.clone(),
        params.resample_count,
        entries,
    )?;
    Ok((cb, report))
}

impl CharacterBuild {
    /// The candidates a finished entry corresponds to, for rebuilding.
    pub fn from_entry(entry: &CharacterEntry) -> Self {
        let as_candidate = |g: &PerturbedGlyph| Candidate {
            id: g.index,
            point: g.point,
            outline: g.outline.clone(),
        };
        Self {
            character: entry.character,
            original: as_candidate(&entry.original),
            candidates: entry.glyphs.iter().map(as_candidate).collect(),
        }
    }
}
