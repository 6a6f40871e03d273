//! Bradley-Terry fitting of perceptual similarity scores and rater
//! reliabilities from two-alternative forced-choice responses.
//!
//! The choice model is `p(q = 1) = 1 / (1 + exp(r_u (s_i - s_j)))`, used exactly
//! in this form. With `s` meaning similarity to the original glyph, a rater
//! who reliably picks the more similar glyph has a negative `r_u`; the fit
//! learns the sign from the data.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::format::{self, Lines};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Response {
    pub glyph_i: usize,
    pub glyph_j: usize,
    pub rater: usize,
    /// True when the rater judged `glyph_i` closer to the original.
    pub q: bool,
}

/// `p(q | s_i, s_j, r_u)`.
pub fn choice_likelihood(q: bool, s_i: f64, s_j: f64, r_u: f64) -> f64 {
    let p1 = 1.0 / (1.0 + (r_u * (s_i - s_j)).exp());
    if q {
        p1
    } else {
        1.0 - p1
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub initial_score: f64,
    pub initial_reliability: f64,
    pub regularization: f64,
    pub max_iterations: usize,
    /// Stop when the relative objective change falls below this.
    pub tolerance: f64,
    pub initial_step: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            initial_score: 0.5,
            initial_reliability: -1.0,
            regularization: 1e-6,
            max_iterations: 2000,
            tolerance: 1e-9,
            initial_step: 1.0,
        }
    }
}

/// Responses re-indexed onto dense glyph and rater indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub glyphs: Vec<usize>,
    pub raters: Vec<usize>,
    /// `(i, j, u, q)` over dense indices.
    items: Vec<(usize, usize, usize, bool)>,
}

impl Problem {
    pub fn new(responses: &[Response]) -> Result<Self> {
        if responses.is_empty() {
            return Err(Error::InvalidArgument("no responses".into()));
        }
        let glyphs: Vec<usize> = responses
            .iter()
            .flat_map(|r| [r.glyph_i, r.glyph_j])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let raters: Vec<usize> = responses
            .iter()
            .map(|r| r.rater)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let gi = |g: usize| glyphs.binary_search(&g).expect("glyph collected");
        let ri = |u: usize| raters.binary_search(&u).expect("rater collected");
        let mut items = Vec::with_capacity(responses.len());
        for r in responses {
            if r.glyph_i == r.glyph_j {
                return Err(Error::InvalidArgument(format!(
                    "response compares glyph {} with itself",
                    r.glyph_i
                )));
            }
            items.push((gi(r.glyph_i), gi(r.glyph_j), ri(r.rater), r.q));
        }
        Ok(Self {
            glyphs,
            raters,
            items,
        })
    }

    /// Negative log-likelihood plus `lambda (|s|^2 + |r|^2)`.
    pub fn objective(&self, s: &[f64], r: &[f64], lambda: f64) -> f64 {
        let nll: f64 = self
            .items
            .iter()
            .map(|&(i, j, u, q)| {
                let z = r[u] * (s[i] - s[j]);
                if q {
                    softplus(z)
                } else {
                    softplus(-z)
                }
            })
            .sum();
        nll + lambda * (s.iter().map(|v| v * v).sum::<f64>() + r.iter().map(|v| v * v).sum::<f64>())
    }

    /// Analytic gradient of [`Problem::objective`] with respect to `(s, r)`.
    pub fn gradient(&self, s: &[f64], r: &[f64], lambda: f64) -> (Vec<f64>, Vec<f64>) {
        let mut gs: Vec<f64> = s.iter().map(|v| 2.0 * lambda * v).collect();
        let mut gr: Vec<f64> = r.iter().map(|v| 2.0 * lambda * v).collect();
        for &(i, j, u, q) in &self.items {
            let d = s[i] - s[j];
            let z = r[u] * d;
            let dz = sigmoid(z) - if q { 0.0 } else { 1.0 };
            gs[i] += dz * r[u];
            gs[j] -= dz * r[u];
            gr[u] += dz * d;
        }
        (gs, gr)
    }

    /// Connected components of the comparison graph, as glyph ids.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.glyphs.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(i, j, _, _) in &self.items {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for g in 0..n {
            let root = find(&mut parent, g);
            groups.entry(root).or_default().push(self.glyphs[g]);
        }
        groups.into_values().collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Normalized similarity scores in `[0, 1]`, by glyph id.
    pub scores: BTreeMap<usize, f64>,
    /// Fitted reliabilities, by rater id.
    pub reliabilities: BTreeMap<usize, f64>,
    /// More than one entry means scores are only comparable within a
    /// component.
    pub components: Vec<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every accepted step, starting with the initial value.
    pub objective_trace: Vec<f64>,
}

/// Min-max normalization onto `[0, 1]`; all-equal scores map to 0.5.
pub fn normalize_scores(s: &[f64]) -> Vec<f64> {
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        return vec![0.5; s.len()];
    }
    s.iter()
        .map(|v| ((v - min) / span).clamp(0.0, 1.0))
        .collect()
}

/// Full-batch gradient descent with backtracking line search.
pub fn fit(responses: &[Response], config: &FitConfig) -> Result<FitResult> {
    let problem = Problem::new(responses)?;
    let lambda = config.regularization;
    let mut s = vec![config.initial_score; problem.glyphs.len()];
    let mut r = vec![config.initial_reliability; problem.raters.len()];
    let mut f = problem.objective(&s, &r, lambda);
    let mut trace = vec![f];
    let mut step = config.initial_step;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let (gs, gr) = problem.gradient(&s, &r, lambda);
        let norm2: f64 = gs.iter().chain(&gr).map(|g| g * g).sum();
        if norm2 == 0.0 {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut t = step;
        for _ in 0..60 {
            let s2: Vec<f64> = s.iter().zip(&gs).map(|(v, g)| v - t * g).collect();
            let r2: Vec<f64> = r.iter().zip(&gr).map(|(v, g)| v - t * g).collect();
            let f2 = problem.objective(&s2, &r2, lambda);
            if f2 <= f - 1e-4 * t * norm2 {
                accepted = Some((s2, r2, f2));
                break;
            }
            t *= 0.5;
        }
        let Some((s2, r2, f2)) = accepted else {
            converged = true;
            break;
        };
        let change = (f - f2).abs() / f.abs().max(1e-300);
        s = s2;
        r = r2;
        f = f2;
        trace.push(f);
        step = t * 2.0;
        if change < config.tolerance {
            converged = true;
            break;
        }
    }
    let norm = normalize_scores(&s);
    Ok(FitResult {
        scores: problem.glyphs.iter().copied().zip(norm).collect(),
        reliabilities: problem.raters.iter().copied().zip(r).collect(),
        components: problem.components(),
        iterations,
        converged,
        objective_trace: trace,
    })
}

/// Glyphs whose normalized score is strictly above `threshold`.
pub fn select_candidates(scores: &BTreeMap<usize, f64>, threshold: f64) -> BTreeSet<usize> {
    scores
        .iter()
        .filter(|(_, &s)| s > threshold)
        .map(|(&g, _)| g)
        .collect()
}

/// Regular questions and control pairs per rater in synthetic studies.
pub const QUESTIONS_PER_RATER: usize = 16;
const CONTROL_PAIRS: usize = 2;

/// Samples a 2AFC study from the choice model. Rater `u` answers
/// `questions_per_rater` random pairs plus two control pairs asked in both
/// orders; raters with more than one inconsistent control pair are rejected.
/// Only the regular answers of accepted raters are returned.
pub fn synth_responses(
    planted_s: &[f64],
    planted_r: &[f64],
    questions_per_rater: usize,
    seed: u64,
) -> Result<Vec<Response>> {
    if planted_s.len() < 2 {
        return Err(Error::InvalidArgument("need at least two glyphs".into()));
    }
    if planted_s.iter().chain(planted_r).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "planted values must be finite".into(),
        ));
    }
    let n = planted_s.len();
    let mut out = Vec::with_capacity(planted_r.len() * questions_per_rater);
    for (u, &ru) in planted_r.iter().enumerate() {
        let mut rng = rng::stream(seed, u as u64);
        let answer = |i: usize, j: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            rng.random::<f64>() < choice_likelihood(true, planted_s[i], planted_s[j], ru)
        };
        let pair = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v = sample(rng, n, 2);
            (v.index(0), v.index(1))
        };
        let mut inconsistent = 0;
        for _ in 0..CONTROL_PAIRS {
            let (i, j) = pair(&mut rng);
            let a = answer(i, j, &mut rng);
            let b = answer(j, i, &mut rng);
            // Consistent raters pick the same glyph both times.
            if a == b {
                inconsistent += 1;
            }
        }
        let mut mine = Vec::with_capacity(questions_per_rater);
        for _ in 0..questions_per_rater {
            let (i, j) = pair(&mut rng);
            let q = answer(i, j, &mut rng);
            mine.push(Response {
                glyph_i: i,
                glyph_j: j,
                rater: u,
                q,
            });
        }
        if inconsistent <= 1 {
            out.extend(mine);
        }
    }
    Ok(out)
}

const RESPONSES_MAGIC: &str = "glyphcrt-responses 1";
const SCORES_MAGIC: &str = "glyphcrt-scores 1";

pub fn responses_to_text(responses: &[Response], header: &[String]) -> String {
    let mut out = format!("{RESPONSES_MAGIC}\n");
    format::write_header(&mut out, header);
    out.push_str(&format!("responses {}\n", responses.len()));
    for r in responses {
        out.push_str(&format!(
            "{} {} {} {}\n",
            r.glyph_i, r.glyph_j, r.rater, r.q as u8
        ));
    }
    out.push_str("end\n");
    out
}

pub fn responses_from_text(text: &str) -> Result<Vec<Response>> {
    let mut lines = Lines::new(text);
    format::check_magic(&mut lines, RESPONSES_MAGIC)?;
    let (n, rest) = lines.keyed("responses")?;
    let count: usize = format::parse(rest, n, "response count")?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, l) = lines.expect("response")?;
        let f: Vec<&str> = l.split(' ').collect();
        if f.len() != 4 {
            return Err(Error::format(n, "expected: glyph_i glyph_j rater q"));
        }
        let q: u8 = format::parse(f[3], n, "q")?;
        if q > 1 {
            return Err(Error::format(n, "q must be 0 or 1"));
        }
        let r = Response {
            glyph_i: format::parse(f[0], n, "glyph_i")?,
            glyph_j: format::parse(f[1], n, "glyph_j")?,
            rater: format::parse(f[2], n, "rater")?,
            q: q == 1,
        };
        if r.glyph_i == r.glyph_j {
            return Err(Error::format(n, "glyph compared with itself"));
        }
        out.push(r);
    }
    let (n, l) = lines.expect("end")?;
    if l != "end" {
        return Err(Error::format(n, "expected \"end\""));
    }
    Ok(out)
}

pub fn scores_to_text(fit: &FitResult, header: &[String]) -> String {
    let mut out = format!("{SCORES_MAGIC}\n");
    format::write_header(&mut out, header);
    out.push_str(&format!("glyphs {}\n", fit.scores.len()));
    for (g, s) in &fit.scores {
        out.push_str(&format!("glyph {g} {}\n", format::fixed(*s)));
    }
    out.push_str(&format!("raters {}\n", fit.reliabilities.len()));
    for (u, r) in &fit.reliabilities {
        out.push_str(&format!("rater {u} {}\n", format::fixed(*r)));
    }
    out.push_str(&format!("components {}\n", fit.components.len()));
    out.push_str("end\n");
    out
}

/// Reads the glyph scores of a scores file.
pub fn scores_from_text(text: &str) -> Result<BTreeMap<usize, f64>> {
    let mut lines = Lines::new(text);
    format::check_magic(&mut lines, SCORES_MAGIC)?;
    let (n, rest) = lines.keyed("glyphs")?;
    let count: usize = format::parse(rest, n, "glyph count")?;
    let mut scores = BTreeMap::new();
    for _ in 0..count {
        let (n, rest) = lines.keyed("glyph")?;
        let (g, s) = rest
            .split_once(' ')
            .ok_or_else(|| Error::format(n, "expected: glyph <id> <score>"))?;
        scores.insert(
            format::parse(g, n, "glyph id")?,
            format::parse_finite(s, n, "score")?,
        );
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn likelihood_examples() {
        assert_eq!(choice_likelihood(true, 0.3, 0.3, 4.0), 0.5);
        assert_eq!(choice_likelihood(true, 0.9, 0.1, 0.0), 0.5);
        let expected = 1.0 / (1.0 + 1f64.exp());
        assert!((choice_likelihood(true, 1.0, 0.0, 1.0) - expected).abs() < 1e-15);
        assert!((expected - 0.2689).abs() < 1e-4);
    }

    #[test]
    fn complementary_probabilities() {
        for &(a, b, r) in &[(0.1, 0.7, 3.0), (2.0, -1.0, -0.5), (0.0, 0.0, 9.0)] {
            let total = choice_likelihood(true, a, b, r) + choice_likelihood(false, a, b, r);
            assert!((total - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dominance_orders_scores() {
        let mut responses = Vec::new();
        for u in 0..20 {
            responses.push(Response {
                glyph_i: 0,
                glyph_j: 1,
                rater: u,
                q: true,
            });
        }
        let f = fit(&responses, &FitConfig::default()).unwrap();
        assert!(f.scores[&0] > f.scores[&1]);
    }

    #[test]
    fn objective_never_increases() {
        let s: Vec<f64> = (0..10).map(|i| i as f64 / 9.0).collect();
        let r = vec![-5.0; 40];
        let responses = synth_responses(&s, &r, 16, 3).unwrap();
        let f = fit(&responses, &FitConfig::default()).unwrap();
        assert!(f.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn normalization_is_shift_invariant() {
        let s = [0.3, -1.2, 4.0, 0.0];
        let shifted: Vec<f64> = s.iter().map(|v| v + 17.5).collect();
        let (a, b) = (normalize_scores(&s), normalize_scores(&shifted));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(normalize_scores(&[2.0, 2.0]), vec![0.5, 0.5]);
    }

    #[test]
    fn selection_is_strict() {
        let scores: BTreeMap<usize, f64> = [(0, 0.95), (1, 0.85), (2, 0.84), (3, 0.2)]
            .into_iter()
            .collect();
        assert_eq!(select_candidates(&scores, 0.85), [0].into_iter().collect());
        let norm: BTreeMap<usize, f64> = [(0, 1.0), (1, 0.0), (2, 0.4)].into_iter().collect();
        assert!(select_candidates(&norm, 1.0).is_empty());
        assert_eq!(select_candidates(&norm, 0.0), [0, 2].into_iter().collect());
    }

    #[test]
    fn disconnected_components_are_flagged() {
        let responses = [
            Response {
                glyph_i: 0,
                glyph_j: 1,
                rater: 0,
                q: true,
            },
            Response {
                glyph_i: 5,
                glyph_j: 7,
                rater: 0,
                q: false,
            },
        ];
        let f = fit(&responses, &FitConfig::default()).unwrap();
        assert_eq!(f.components, vec![vec![0, 1], vec![5, 7]]);
    }

    #[test]
    fn zero_reliability_answers_at_chance() {
        let s: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let r = vec![0.0; 900];
        let responses = synth_responses(&s, &r, 16, 11).unwrap();
        assert!(responses.len() >= 10_000);
        let rate = responses.iter().filter(|r| r.q).count() as f64 / responses.len() as f64;
        assert!((rate - 0.5).abs() <= 0.02, "{rate}");
    }

    #[test]
    fn equal_scores_are_at_chance_per_pair() {
        let s = vec![0.4; 3];
        let r = vec![-6.0; 4000];
        let responses = synth_responses(&s, &r, 16, 2).unwrap();
        let mut counts: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for x in &responses {
            let e = counts.entry((x.glyph_i, x.glyph_j)).or_default();
            e.0 += x.q as usize;
            e.1 += 1;
        }
        for ((i, j), (ones, total)) in counts {
            let rate = ones as f64 / total as f64;
            assert!((rate - 0.5).abs() < 0.05, "pair ({i},{j}): {rate}");
        }
    }

    #[test]
    fn synthesis_is_reproducible() {
        let s = [0.1, 0.5, 0.9, 0.3];
        let r = [-3.0, -1.0, 2.0];
        let a = responses_to_text(&synth_responses(&s, &r, 16, 8).unwrap(), &[]);
        let b = responses_to_text(&synth_responses(&s, &r, 16, 8).unwrap(), &[]);
        assert_eq!(a, b);
        assert_eq!(responses_to_text(&responses_from_text(&a).unwrap(), &[]), a);
    }
}
