//! Glyph recognition from outlines and a seeded noisy-recognition channel.
//!
//! The channel perturbs every vertex of the true glyph outline with isotropic
//! Gaussian noise of scale `sigma` and then recognizes the noisy observation by
//! outline distance. Its probability vectors stand in for classifier softmax
//! outputs and feed maximum-likelihood decoding.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::codebook::CharacterEntry;
use crate::crc::{CodeVector, Codeword, LikelihoodTable};
use crate::error::{Error, Result};
use crate::outline::{distance_to_box, GlyphOutline};
use crate::rng;

/// Calibrated so that every glyph of the fixture codebook is recognized with
/// accuracy of at least 0.9.
pub const DEFAULT_SIGMA: f64 = 0.004;
pub const DEFAULT_TRIALS: usize = 200;
const RESAMPLE_CAP: usize = 1000;

/// How distances to the candidate glyphs become probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbabilityLaw {
    /// `1/d`, normalized.
    InverseDistance,
    /// `exp(-d^2 / (2 sigma^2))`, normalized: the posterior under the channel's
    /// own noise model.
    #[default]
    Gaussian,
}

impl ProbabilityLaw {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProbabilityLaw::InverseDistance => "inverse-distance",
            ProbabilityLaw::Gaussian => "gaussian",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "inverse-distance" => Some(ProbabilityLaw::InverseDistance),
            "gaussian" => Some(ProbabilityLaw::Gaussian),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub sigma: f64,
    pub seed: u64,
    /// Observations per glyph when estimating accuracy.
    pub trials: usize,
    pub law: ProbabilityLaw,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_SIGMA,
            seed: 0,
            trials: DEFAULT_TRIALS,
            law: ProbabilityLaw::default(),
        }
    }
}

impl ChannelParams {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(Self {
            sigma,
            seed,
            ..Self::default()
        })
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials.max(1);
        self
    }

    pub fn with_law(mut self, law: ProbabilityLaw) -> Self {
        self.law = law;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionResult {
    pub probabilities: Vec<f64>,
    pub argmax_index: usize,
    pub true_index: Option<usize>,
}

impl RecognitionResult {
    pub fn is_correct(&self) -> Option<bool> {
        self.true_index.map(|t| t == self.argmax_index)
    }
}

/// Index of the largest value; the smallest index wins ties.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Distances from the observation, normalized to the unit box, to every
/// candidate glyph.
fn distances(f: &GlyphOutline, glyphs: &[&GlyphOutline]) -> Result<Vec<f64>> {
    if glyphs.is_empty() {
        return Err(Error::InvalidArgument("no candidate glyphs".into()));
    }
    let f = f.normalized();
    let fb = f.bounding_box();
    glyphs
        .iter()
        .map(|u| {
            if u.vertex_count() != f.vertex_count() {
                return Err(Error::VertexCountMismatch {
                    left: f.vertex_count(),
                    right: u.vertex_count(),
                });
            }
            Ok(distance_to_box(&f, u, &fb))
        })
        .collect()
}

fn probabilities(d: &[f64], law: ProbabilityLaw, sigma: f64) -> Vec<f64> {
    let zero = d.iter().position(|&v| v == 0.0);
    let mut p: Vec<f64> = match (zero, law) {
        (Some(z), _) => (0..d.len())
            .map(|i| if i == z { 1.0 } else { 0.0 })
            .collect(),
        (None, ProbabilityLaw::InverseDistance) => d.iter().map(|v| 1.0 / v).collect(),
        (None, ProbabilityLaw::Gaussian) if sigma > 0.0 => {
            let min = d.iter().fold(f64::INFINITY, |a, &b| a.min(b * b));
            d.iter()
                .map(|v| (-(v * v - min) / (2.0 * sigma * sigma)).exp())
                .collect()
        }
        (None, ProbabilityLaw::Gaussian) => {
            let z = argmin(d);
            (0..d.len())
                .map(|i| if i == z { 1.0 } else { 0.0 })
                .collect()
        }
    };
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

/// Recognizes an observed outline against a candidate glyph list.
pub fn recognize(
    f: &GlyphOutline,
    glyphs: &[&GlyphOutline],
    law: ProbabilityLaw,
    sigma: f64,
) -> Result<RecognitionResult> {
    let d = distances(f, glyphs)?;
    let result = RecognitionResult {
        argmax_index: argmin(&d),
        probabilities: probabilities(&d, law, sigma),
        true_index: None,
    };
    Ok(result)
}

/// Nearest-glyph recognition of a vector outline with `1/d` probabilities.
pub fn recognize_vector(f: &GlyphOutline, entry: &CharacterEntry) -> Result<RecognitionResult> {
    let glyphs: Vec<&GlyphOutline> = entry.glyphs.iter().map(|g| &g.outline).collect();
    recognize(f, &glyphs, ProbabilityLaw::InverseDistance, 0.0)
}

/// A noisy observation of `outline`.
pub fn observe<R: Rng + ?Sized>(outline: &GlyphOutline, sigma: f64, rng: &mut R) -> GlyphOutline {
    if sigma == 0.0 {
        return outline.clone();
    }
    let vertices = outline
        .vertices()
        .iter()
        .map(|v| {
            let dx: f64 = rng.sample(StandardNormal);
            let dy: f64 = rng.sample(StandardNormal);
            [v[0] + sigma * dx, v[1] + sigma * dy]
        })
        .collect();
    GlyphOutline::from_vertices_unchecked(vertices)
}

/// One channel use over an explicit glyph list.
pub fn simulate_with_rng<R: Rng + ?Sized>(
    true_index: usize,
    glyphs: &[&GlyphOutline],
    params: &ChannelParams,
    rng: &mut R,
) -> Result<RecognitionResult> {
    let truth = glyphs.get(true_index).ok_or(Error::OutOfRange {
        value: true_index as u64,
        bound: glyphs.len() as u64,
    })?;
    let f = observe(truth, params.sigma, rng);
    let mut r = recognize(&f, glyphs, params.law, params.sigma)?;
    r.true_index = Some(true_index);
    Ok(r)
}

/// One channel use for glyph `true_index` of `entry`, seeded by `params.seed`.
pub fn simulate_recognition(
    true_index: usize,
    entry: &CharacterEntry,
    params: &ChannelParams,
) -> Result<RecognitionResult> {
    let glyphs: Vec<&GlyphOutline> = entry.glyphs.iter().map(|g| &g.outline).collect();
    let mut rng = rng::stream(params.seed, true_index as u64);
    simulate_with_rng(true_index, &glyphs, params, &mut rng)
}

/// Stable identity of a glyph for seeding its observation noise. Depends only
/// on the outline, so a glyph sees the same noise in every subset it is
/// evaluated in.
pub(crate) fn glyph_key(outline: &GlyphOutline) -> u64 {
    rng::hash_reals(outline.vertices().iter().flatten().copied())
}

/// Per-glyph nearest-neighbor accuracy within `glyphs`. Trial `t` of glyph `i`
/// uses noise derived from `(params.seed, keys[i], t)`.
pub(crate) fn accuracy_with_keys(
    glyphs: &[&GlyphOutline],
    keys: &[u64],
    params: &ChannelParams,
) -> Vec<f64> {
    let trials = params.trials.max(1);
    (0..glyphs.len())
        .into_par_iter()
        .map(|i| {
            let seed = rng::derive(params.seed, keys[i]);
            let hits = (0..trials)
                .filter(|&t| {
                    let mut r = rng::stream(seed, t as u64);
                    let f = observe(glyphs[i], params.sigma, &mut r);
                    distances(&f, glyphs)
                        .map(|d| argmin(&d) == i)
                        .unwrap_or(false)
                })
                .count();
            hits as f64 / trials as f64
        })
        .collect()
}

/// Empirical accuracy of the channel restricted to `glyphs`, averaged over
/// the glyphs.
pub fn accuracy_oracle(glyphs: &[&GlyphOutline], params: &ChannelParams) -> Result<f64> {
    if glyphs.len() < 2 {
        return Err(Error::InvalidArgument(
            "accuracy needs at least two glyphs".into(),
        ));
    }
    let keys: Vec<u64> = glyphs.iter().map(|g| glyph_key(g)).collect();
    let acc = accuracy_with_keys(glyphs, &keys, params);
    Ok(acc.iter().sum::<f64>() / acc.len() as f64)
}

/// Per-glyph accuracies of a whole character entry.
pub fn entry_accuracy(entry: &CharacterEntry, params: &ChannelParams) -> Vec<f64> {
    let glyphs: Vec<&GlyphOutline> = entry.glyphs.iter().map(|g| &g.outline).collect();
    let keys: Vec<u64> = glyphs.iter().map(|g| glyph_key(g)).collect();
    accuracy_with_keys(&glyphs, &keys, params)
}

/// Repeats channel uses until the recognition is (or is not) correct. When
/// the channel will not produce the wanted outcome, the top two probabilities
/// of the last observation are swapped to force it.
pub(crate) fn conditioned<R: Rng + ?Sized>(
    true_index: usize,
    glyphs: &[&GlyphOutline],
    params: &ChannelParams,
    want_error: bool,
    rng: &mut R,
) -> Result<RecognitionResult> {
    if want_error && glyphs.len() < 2 {
        return Err(Error::InvalidArgument(
            "cannot misrecognize a single-glyph alphabet".into(),
        ));
    }
    let mut last = None;
    for _ in 0..RESAMPLE_CAP {
        let r = simulate_with_rng(true_index, glyphs, params, rng)?;
        if (r.argmax_index != true_index) == want_error {
            return Ok(r);
        }
        last = Some(r);
    }
    let mut r = last.expect("resample cap is positive");
    let other = if want_error {
        let mut best: Option<usize> = None;
        for i in (0..r.probabilities.len()).filter(|&i| i != true_index) {
            if best.is_none_or(|b| r.probabilities[i] > r.probabilities[b]) {
                best = Some(i);
            }
        }
        best.expect("alphabet has another glyph")
    } else {
        r.argmax_index
    };
    r.probabilities.swap(true_index, other);
    r.argmax_index = if want_error { other } else { true_index };
    Ok(r)
}

/// Corrupts exactly `count` distinct positions of `codeword` through the
/// channel and returns the recognized code vector with its likelihood table.
///
/// `alphabets[j]` lists the glyph outlines that position `j` may take, indexed
/// by residue value. Error positions are resampled until misrecognized; the
/// remaining positions until recognized correctly.
pub fn inject_errors<R: Rng + ?Sized>(
    codeword: &Codeword,
    alphabets: &[Vec<&GlyphOutline>],
    count: usize,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<(CodeVector, LikelihoodTable)> {
    let n = codeword.0.len();
    if alphabets.len() != n {
        return Err(Error::LengthMismatch {
            left: alphabets.len(),
            right: n,
        });
    }
    if count > n {
        return Err(Error::InvalidArgument(format!(
            "cannot inject {count} errors into {n} positions"
        )));
    }
    let mut wrong = vec![false; n];
    for j in sample(rng, n, count) {
        wrong[j] = true;
    }
    let mut cv = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let r = conditioned(codeword.0[j] as usize, &alphabets[j], params, wrong[j], rng)?;
        cv.push(r.argmax_index as u32);
        rows.push(r.probabilities);
    }
    Ok((CodeVector(cv), LikelihoodTable::new(rows)?))
}
