//! Commonsense concept lookup through a causes-relation backend, and the
//! post-processing that turns its candidates into one clean phrase.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{content_lemma, is_punct, split_tokens, StopwordSet, Tagger, Utterance};

pub const DEFAULT_K: usize = 5;

pub const DEFAULT_FILLERS: [&str; 4] = ["you to be", "you to get", "person will be", "you have"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptCandidate {
    pub phrase: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptPhrase {
    pub text: String,
    pub tokens: Vec<String>,
    pub source_candidate: ConceptCandidate,
    pub nouns: Vec<String>,
}

/// A model that maps input terms to probable consequences ("causes").
pub trait CausesBackend: Send + Sync {
    fn causes(&self, terms: &[String], k: usize) -> Result<Vec<ConceptCandidate>>;
}

/// Returns at most `k` candidates in descending score order.
pub fn query_causes(
    client: &dyn CausesBackend,
    terms: &[String],
    k: usize,
) -> Result<Vec<ConceptCandidate>> {
    if terms.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut cands = client.causes(terms, k)?;
    for c in &cands {
        if c.phrase.trim().is_empty() {
            return Err(Error::BackendMalformed("empty candidate phrase".into()));
        }
        if !c.score.is_finite() {
            return Err(Error::BackendMalformed(format!(
                "non-finite score for {:?}",
                c.phrase
            )));
        }
    }
    cands.sort_by(|a, b| b.score.total_cmp(&a.score));
    cands.truncate(k);
    Ok(cands)
}

/// Offline causes backend: a JSON object mapping `term1|term2|...` to candidate lists.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FixtureCauses {
    map: BTreeMap<String, Vec<ConceptCandidate>>,
}

impl FixtureCauses {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("causes fixture: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn key(terms: &[String]) -> String {
        terms.join("|")
    }
}

impl CausesBackend for FixtureCauses {
    fn causes(&self, terms: &[String], k: usize) -> Result<Vec<ConceptCandidate>> {
        let mut out = self.map.get(&Self::key(terms)).cloned().unwrap_or_default();
        out.sort_by(|a, b| b.score.total_cmp(&a.score));
        out.truncate(k);
        Ok(out)
    }
}

/// Phrases stripped from the front of a candidate before it is used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FillerList {
    // tokenized, lowercase, longest first
    prefixes: Vec<Vec<String>>,
}

impl Default for FillerList {
    fn default() -> Self {
        FillerList::new(DEFAULT_FILLERS)
    }
}

impl FillerList {
    pub fn new<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut prefixes: Vec<Vec<String>> = phrases
            .into_iter()
            .map(|p| split_tokens(&p.as_ref().to_lowercase()))
            .filter(|t| !t.is_empty())
            .collect();
        prefixes.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        prefixes.dedup();
        FillerList { prefixes }
    }

    pub fn parse(text: &str) -> Self {
        FillerList::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    /// Adds phrases on top of the current list.
    pub fn extend<I, S>(&mut self, phrases: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut all: Vec<String> = self.prefixes.iter().map(|p| p.join(" ")).collect();
        all.extend(phrases.into_iter().map(|p| p.as_ref().to_string()));
        *self = FillerList::new(all);
    }

    /// Strips the longest matching filler prefix, if any.
    fn strip<'a>(&self, tokens: &'a [String]) -> &'a [String] {
        for p in &self.prefixes {
            if tokens.len() >= p.len() && tokens[..p.len()] == p[..] {
                return &tokens[p.len()..];
            }
        }
        tokens
    }
}

/// Filler and leading-stopword stripping for one candidate phrase.
pub fn clean_phrase(phrase: &str, stop: &StopwordSet, fillers: &FillerList) -> Vec<String> {
    let tokens = split_tokens(&phrase.to_lowercase());
    let mut rest = fillers.strip(&tokens);
    while let Some(first) = rest.first() {
        if stop.contains(first) || is_punct(first) {
            rest = &rest[1..];
        } else {
            break;
        }
    }
    while let Some(last) = rest.last() {
        if is_punct(last) {
            rest = &rest[..rest.len() - 1];
        } else {
            break;
        }
    }
    rest.to_vec()
}

/// Content lemmas of the input used for the overlap test.
pub fn input_lemmas(input: &Utterance, stop: &StopwordSet) -> BTreeSet<String> {
    input
        .tokens
        .iter()
        .zip(&input.tags)
        .filter(|(t, tag)| tag.is_content() && !stop.contains(t))
        .map(|(t, tag)| content_lemma(t, *tag))
        .collect()
}

/// Walks the candidates in order and returns the first that, after
/// cleaning, shares no content lemma with the input.
pub fn select_concept(
    cands: &[ConceptCandidate],
    input: &Utterance,
    stop: &StopwordSet,
    fillers: &FillerList,
    tagger: &dyn Tagger,
) -> Result<ConceptPhrase> {
    let taken = input_lemmas(input, stop);
    for cand in cands {
        let tokens = clean_phrase(&cand.phrase, stop, fillers);
        if tokens.is_empty() {
            continue;
        }
        let tags = tagger.tag(&tokens);
        let overlaps = tokens
            .iter()
            .zip(&tags)
            .filter(|(t, _)| !stop.contains(t) && !is_punct(t))
            .any(|(t, tag)| taken.contains(&content_lemma(t, *tag)));
        if overlaps {
            continue;
        }
        let nouns = tokens
            .iter()
            .zip(&tags)
            .filter(|(_, tag)| **tag == crate::text::Pos::Noun)
            .map(|(t, _)| t.clone())
            .collect();
        return Ok(ConceptPhrase {
            text: tokens.join(" "),
            tokens,
            source_candidate: cand.clone(),
            nouns,
        });
    }
    Err(Error::NoConcept)
}
