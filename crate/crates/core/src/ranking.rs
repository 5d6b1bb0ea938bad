//! Semantic-incongruity ranking. Each retrieved context is the NLI
//! premise and the reversed sentence the hypothesis; candidates are ordered
//! by contradiction probability.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::AntonymLexicon;
use crate::retrieval::RetrievedContext;
use crate::text::{is_negation, is_punct, noun_lemma, split_tokens, StopwordSet};

pub const SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NliScores {
    pub entailment: f64,
    pub neutral: f64,
    pub contradiction: f64,
}

impl NliScores {
    pub fn new(entailment: f64, neutral: f64, contradiction: f64) -> Result<Self> {
        let s = NliScores {
            entailment,
            neutral,
            contradiction,
        };
        s.validate()?;
        Ok(s)
    }

    /// Each probability in [0, 1] and the three summing to 1 within 1e-6.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("entailment", self.entailment),
            ("neutral", self.neutral),
            ("contradiction", self.contradiction),
        ] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::BackendMalformed(format!(
                    "{name} = {v} outside [0, 1]"
                )));
            }
        }
        let sum = self.entailment + self.neutral + self.contradiction;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::BackendMalformed(format!(
                "scores sum to {sum}, not 1"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub context: RetrievedContext,
    pub scores: NliScores,
}

/// Three-way natural language inference.
pub trait NliBackend: Send + Sync {
    fn scores(&self, premise: &str, hypothesis: &str) -> Result<NliScores>;
}

pub fn nli_scores(client: &dyn NliBackend, premise: &str, hypothesis: &str) -> Result<NliScores> {
    if premise.trim().is_empty() || hypothesis.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    let s = client.scores(premise, hypothesis)?;
    s.validate()?;
    Ok(s)
}

/// Total order: contradiction descending, then shorter sentence, then
/// lexicographic sentence, then lower source id.
pub fn incongruity_order(a: &RankedCandidate, b: &RankedCandidate) -> Ordering {
    b.scores
        .contradiction
        .total_cmp(&a.scores.contradiction)
        .then_with(|| {
            a.context
                .sentence
                .chars()
                .count()
                .cmp(&b.context.sentence.chars().count())
        })
        .then_with(|| a.context.sentence.cmp(&b.context.sentence))
        .then_with(|| a.context.source_id.cmp(&b.context.source_id))
}

/// Scores every context once (concurrently) and sorts by [`incongruity_order`].
pub fn rank_by_incongruity(
    client: &dyn NliBackend,
    contexts: &[RetrievedContext],
    hypothesis: &str,
) -> Result<Vec<RankedCandidate>> {
    if contexts.is_empty() {
        return Err(Error::NoContext);
    }
    let mut ranked = contexts
        .par_iter()
        .map(|c| {
            nli_scores(client, &c.sentence, hypothesis).map(|scores| RankedCandidate {
                context: c.clone(),
                scores,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(incongruity_order);
    Ok(ranked)
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Lexical stand-in for a trained NLI model, for tests and degraded mode.
///
/// `x = antonym pairs + negation mismatch - shared content lemmas`;
/// contradiction is `0.8 * sigmoid(x)`, neutral is fixed at `0.2`, and
/// entailment takes the rest. It makes no claim of NLI accuracy.
#[derive(Debug, Clone)]
pub struct HeuristicNli {
    antonyms: Arc<AntonymLexicon>,
    stopwords: Arc<StopwordSet>,
}

pub const HEURISTIC_NEUTRAL_PRIOR: f64 = 0.2;

impl HeuristicNli {
    pub fn new(antonyms: Arc<AntonymLexicon>, stopwords: Arc<StopwordSet>) -> Self {
        HeuristicNli {
            antonyms,
            stopwords,
        }
    }

    fn content(&self, text: &str) -> (BTreeSet<String>, bool) {
        let tokens = split_tokens(text);
        let negated = tokens.iter().any(|t| is_negation(t));
        let words = tokens
            .iter()
            .filter(|t| !is_punct(t) && !self.stopwords.contains(t) && !is_negation(t))
            .map(|t| noun_lemma(t))
            .collect();
        (words, negated)
    }

    /// The raw evidence score before the sigmoid.
    pub fn evidence(&self, premise: &str, hypothesis: &str) -> f64 {
        let (p, p_neg) = self.content(premise);
        let (h, h_neg) = self.content(hypothesis);
        let pairs = p
            .iter()
            .flat_map(|a| h.iter().map(move |b| (a, b)))
            .filter(|(a, b)| {
                self.antonyms.antonyms_any(a).contains(&b.as_str())
                    || self.antonyms.antonyms_any(b).contains(&a.as_str())
            })
            .count();
        let shared = p.intersection(&h).count();
        pairs as f64 + f64::from(u8::from(p_neg != h_neg)) - shared as f64
    }
}

impl NliBackend for HeuristicNli {
    fn scores(&self, premise: &str, hypothesis: &str) -> Result<NliScores> {
        let c = sigmoid(self.evidence(premise, hypothesis));
        let rest = 1.0 - HEURISTIC_NEUTRAL_PRIOR;
        NliScores::new(rest * (1.0 - c), HEURISTIC_NEUTRAL_PRIOR, rest * c)
    }
}

/// Offline NLI: TSV `premise hypothesis entailment neutral contradiction`.
/// Pairs missing from the file go to the fallback, or fail as unavailable.
#[derive(Default)]
pub struct FixtureNli {
    map: BTreeMap<(String, String), NliScores>,
    fallback: Option<Box<dyn NliBackend>>,
}

impl std::fmt::Debug for FixtureNli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FixtureNli")
            .field("entries", &self.map.len())
            .field("fallback", &self.fallback.is_some())
            .finish()
    }
}

impl FixtureNli {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad = || {
                Error::Config(format!(
                    "nli fixture line {}: expected premise, hypothesis and 3 scores",
                    i + 1
                ))
            };
            if cols.len() != 5 {
                return Err(bad());
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            let scores = NliScores::new(num(cols[2])?, num(cols[3])?, num(cols[4])?)
                .map_err(|e| Error::Config(format!("nli fixture line {}: {e}", i + 1)))?;
            map.insert((cols[0].to_string(), cols[1].to_string()), scores);
        }
        Ok(FixtureNli {
            map,
            fallback: None,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = ((String, String), NliScores)>,
    {
        FixtureNli {
            map: pairs.into_iter().collect(),
            fallback: None,
        }
    }

    pub fn with_fallback(mut self, fallback: Box<dyn NliBackend>) -> Self {
        self.fallback = Some(fallback);
        self
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl NliBackend for FixtureNli {
    fn scores(&self, premise: &str, hypothesis: &str) -> Result<NliScores> {
        if let Some(s) = self.map.get(&(premise.to_string(), hypothesis.to_string())) {
            return Ok(*s);
        }
        match &self.fallback {
            Some(f) => f.scores(premise, hypothesis),
            None => Err(Error::BackendUnavailable(format!(
                "no fixture entry for premise {premise:?} / hypothesis {hypothesis:?}"
            ))),
        }
    }
}
