//! Parse scoring, 1-best and n-best evaluation, and paired permutation
//! tests with Bonferroni correction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parse::{Head, Parse, UndirectedEdge};
use crate::parsers::{Example, Parser};
use crate::sense::SenseIndex;

/// Label-only, undirected unlabelled and undirected labelled attachment
/// scores, in percent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub los: f64,
    pub uuas: f64,
    pub ulas: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Los,
    Uuas,
    Ulas,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Los, Metric::Uuas, Metric::Ulas];

    pub fn of(self, s: &Scores) -> f64 {
        match self {
            Metric::Los => s.los,
            Metric::Uuas => s.uuas,
            Metric::Ulas => s.ulas,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Los => "LOS",
            Metric::Uuas => "UUAS",
            Metric::Ulas => "ULAS",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "los" => Ok(Metric::Los),
            "uuas" => Ok(Metric::Uuas),
            "ulas" => Ok(Metric::Ulas),
            other => Err(Error::malformed("metric", format!("unknown metric `{other}`"))),
        }
    }
}

fn attachment(p: &Parse, i: usize) -> UndirectedEdge {
    UndirectedEdge::new(Head::Sense(p.ids[i]), p.head(i))
}

/// Scores `pred` against `gold`. Every sense contributes one attachment
/// (the root counts as a node).
pub fn score_parse(pred: &Parse, gold: &Parse) -> Result<Scores> {
    let pred_ids: BTreeSet<SenseIndex> = pred.ids.iter().copied().collect();
    let gold_ids: BTreeSet<SenseIndex> = gold.ids.iter().copied().collect();
    if pred_ids != gold_ids || pred.ids.len() != gold.ids.len() {
        return Err(Error::MismatchedSenses(gold.word.clone()));
    }
    let gold_edges: BTreeSet<UndirectedEdge> = (0..gold.len()).map(|i| attachment(gold, i)).collect();
    let gold_label: BTreeMap<SenseIndex, _> = gold.ids.iter().copied().zip(gold.kinds.iter().copied()).collect();
    let (mut labels, mut edges, mut both) = (0, 0, 0);
    for i in 0..pred.len() {
        let label_ok = pred.kinds[i] == gold_label[&pred.ids[i]];
        let edge_ok = gold_edges.contains(&attachment(pred, i));
        labels += label_ok as usize;
        edges += edge_ok as usize;
        both += (label_ok && edge_ok) as usize;
    }
    let pct = |x: usize| 100.0 * x as f64 / pred.len() as f64;
    Ok(Scores {
        los: pct(labels),
        uuas: pct(edges),
        ulas: pct(both),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    OneBest,
    /// Oracle selection: per word, the alternative with the best UUAS
    /// against gold.
    NBest,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::OneBest => "1-best",
            Protocol::NBest => "n-best",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordScore {
    pub word: String,
    #[serde(flatten)]
    pub scores: Scores,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub model: String,
    pub protocol: Protocol,
    /// Macro-averages over words.
    pub mean: Scores,
    pub words: Vec<WordScore>,
}

impl EvalResult {
    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.words.iter().map(|w| metric.of(&w.scores)).collect()
    }
}

/// Among `candidates`, the first with maximal UUAS against `gold`.
pub fn select_by_uuas(candidates: &[Parse], gold: &Parse) -> Result<Scores> {
    let mut best: Option<Scores> = None;
    for c in candidates {
        let s = score_parse(c, gold)?;
        if best.is_none_or(|b| s.uuas > b.uuas) {
            best = Some(s);
        }
    }
    best.ok_or(Error::NoSenses)
}

pub fn evaluate<P: Parser + Sync + ?Sized>(
    model: &str,
    parser: &P,
    examples: &[Example],
    protocol: Protocol,
) -> Result<EvalResult> {
    let words = examples
        .par_iter()
        .map(|e| {
            let scores = match protocol {
                Protocol::OneBest => score_parse(&parser.predict(&e.input)?, &e.gold)?,
                Protocol::NBest => select_by_uuas(&parser.n_best(&e.input)?, &e.gold)?,
            };
            Ok(WordScore {
                word: e.gold.word.clone(),
                scores,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = words.len().max(1) as f64;
    let mean = Scores {
        los: words.iter().map(|w| w.scores.los).sum::<f64>() / n,
        uuas: words.iter().map(|w| w.scores.uuas).sum::<f64>() / n,
        ulas: words.iter().map(|w| w.scores.ulas).sum::<f64>() / n,
    };
    Ok(EvalResult {
        model: model.to_string(),
        protocol,
        mean,
        words,
    })
}

fn mean_difference(a: &[f64], b: &[f64], flips: impl Fn(usize) -> bool) -> f64 {
    let sum: f64 = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (x, y))| if flips(i) { y - x } else { x - y })
        .sum();
    sum / a.len() as f64
}

fn at_least(resampled: f64, observed: f64) -> bool {
    resampled.abs() >= observed - 1e-12 * observed.max(1.0)
}

/// Two-sided paired permutation test. Each resample swaps each pair with
/// probability ½; `p = (hits + 1) / (r + 1)`. Resample `i` draws from its
/// own ChaCha stream, so the result does not depend on thread count.
pub fn permutation_test(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if resamples == 0 || a.is_empty() {
        return Err(Error::TooFew {
            needed: 1,
            got: resamples.min(a.len()),
        });
    }
    let observed = mean_difference(a, b, |_| false).abs();
    let hits: usize = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let flips: Vec<bool> = (0..a.len()).map(|_| rng.gen_bool(0.5)).collect();
            at_least(mean_difference(a, b, |i| flips[i]), observed) as usize
        })
        .sum();
    Ok((hits + 1) as f64 / (resamples + 1) as f64)
}

/// The exact permutation distribution's tail mass, over all 2ⁿ swaps.
pub fn exact_permutation_p(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() > 24 {
        return Err(Error::CeilingExceeded { n: a.len(), ceiling: 24 });
    }
    let observed = mean_difference(a, b, |_| false).abs();
    let total = 1usize << a.len();
    let hits = (0..total)
        .filter(|mask| at_least(mean_difference(a, b, |i| mask >> i & 1 == 1), observed))
        .count();
    Ok(hits as f64 / total as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    pub model_a: String,
    pub model_b: String,
    pub metric: Metric,
    pub p_value: f64,
    pub resamples: usize,
    pub alpha: f64,
    /// Number of comparisons the threshold is divided by.
    pub comparisons: usize,
    pub threshold: f64,
    pub significant: bool,
}

/// Tests every pair of results on every metric, Bonferroni-corrected over
/// all pairs × metrics. Results are paired by word.
pub fn significance(
    results: &[EvalResult],
    metrics: &[Metric],
    resamples: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<SignificanceResult>> {
    let pairs: Vec<(usize, usize)> = (0..results.len())
        .flat_map(|i| (i + 1..results.len()).map(move |j| (i, j)))
        .collect();
    let comparisons = (pairs.len() * metrics.len()).max(1);
    let threshold = alpha / comparisons as f64;
    let mut out = Vec::new();
    for (n, &(i, j)) in pairs.iter().enumerate() {
        let (ra, rb) = (&results[i], &results[j]);
        let by_word: BTreeMap<&str, &Scores> = rb.words.iter().map(|w| (w.word.as_str(), &w.scores)).collect();
        if by_word.len() != ra.words.len() || ra.words.iter().any(|w| !by_word.contains_key(w.word.as_str())) {
            return Err(Error::MismatchedSenses(format!(
                "word lists of {} and {} differ",
                ra.model, rb.model
            )));
        }
        for (m, &metric) in metrics.iter().enumerate() {
            let a: Vec<f64> = ra.words.iter().map(|w| metric.of(&w.scores)).collect();
            let b: Vec<f64> = ra.words.iter().map(|w| metric.of(by_word[w.word.as_str()])).collect();
            let p = permutation_test(&a, &b, resamples, seed.wrapping_add((n * metrics.len() + m) as u64))?;
            out.push(SignificanceResult {
                model_a: ra.model.clone(),
                model_b: rb.model.clone(),
                metric,
                p_value: p,
                resamples,
                alpha,
                comparisons,
                threshold,
                significant: p < threshold,
            });
        }
    }
    Ok(out)
}

/// Rows of models and protocols, columns LOS, UUAS and ULAS.
pub fn render_table(results: &[EvalResult]) -> String {
    let name = |r: &EvalResult| match r.protocol {
        Protocol::OneBest => r.model.clone(),
        Protocol::NBest => format!("{} (n-best)", r.model),
    };
    let width = results.iter().map(|r| name(r).len()).max().unwrap_or(5).max(5);
    let mut out = format!("{:<width$}  {:>6}  {:>6}  {:>6}\n", "Model", "LOS", "UUAS", "ULAS");
    for r in results {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6.1}  {:>6.1}  {:>6.1}",
            name(r),
            r.mean.los,
            r.mean.uuas,
            r.mean.ulas
        );
    }
    out
}

pub fn render_significance(results: &[SignificanceResult]) -> String {
    let mut out = String::new();
    for s in results {
        let _ = writeln!(
            out,
            "{} vs {} [{}]: p = {:.4} ({} at {:.2e}, {} comparisons)",
            s.model_a,
            s.model_b,
            s.metric.as_str(),
            s.p_value,
            if s.significant { "significant" } else { "not significant" },
            s.threshold,
            s.comparisons
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SenseKind::{self, Metaphor as M, Metonymy as Me, Prototype as P};

    fn parse(kinds: &[SenseKind], parents: &[Option<usize>]) -> Parse {
        Parse::new(
            "w",
            (1..=kinds.len() as u32).map(SenseIndex::Plain).collect(),
            kinds.to_vec(),
            parents.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn scoring_examples() {
        let gold = parse(&[P, M, Me, M], &[None, Some(0), Some(0), Some(2)]);
        let s = score_parse(&gold, &gold).unwrap();
        assert_eq!((s.los, s.uuas, s.ulas), (100.0, 100.0, 100.0));
        let one_off = parse(&[P, M, Me, M], &[None, Some(0), Some(0), Some(1)]);
        let s = score_parse(&one_off, &gold).unwrap();
        assert_eq!((s.los, s.uuas, s.ulas), (100.0, 75.0, 75.0));
        let other = parse(&[P, M], &[None, Some(0)]);
        assert!(score_parse(&other, &gold).is_err());
    }

    #[test]
    fn reversed_edge_counts_for_uuas_only() {
        let gold = parse(&[P, Me], &[None, Some(0)]);
        let pred = parse(&[Me, P], &[Some(1), None]);
        let s = score_parse(&pred, &gold).unwrap();
        assert_eq!((s.los, s.uuas, s.ulas), (0.0, 50.0, 0.0));
    }

    #[test]
    fn identical_vectors_give_p_one() {
        let a = [50.0, 60.0, 70.0, 10.0];
        assert_eq!(permutation_test(&a, &a, 1000, 1).unwrap(), 1.0);
        assert!(permutation_test(&a, &a[..3], 10, 1).is_err());
    }

    #[test]
    fn monte_carlo_approaches_exact() {
        let a = [3.0, 1.0, 4.0];
        let b = [1.0, 1.0, 2.0];
        let exact = exact_permutation_p(&a, &b).unwrap();
        // differences (2, 0, 2): the tail is every swap keeping both nonzero signs equal
        assert_eq!(exact, 0.5);
        let mc = permutation_test(&a, &b, 100_000, 7).unwrap();
        assert!((mc - exact).abs() < 0.01, "{mc}");
    }

    #[test]
    fn permutation_is_reproducible() {
        let a: Vec<f64> = (0..30).map(|i| (i * 7 % 11) as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| (i * 5 % 13) as f64).collect();
        assert_eq!(
            permutation_test(&a, &b, 2000, 3).unwrap(),
            permutation_test(&a, &b, 2000, 3).unwrap()
        );
    }
}
