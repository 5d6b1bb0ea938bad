//! Tokenization, detokenization, coarse POS tagging and stopword handling.
//!
//! Everything downstream works on [`Utterance`]: the surface string, its
//! tokens, and one coarse tag per token. Contractions ending in `n't` stay
//! whole so the reversal stage can see them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{AntonymLexicon, SentimentLexicon};

static TOKEN_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[\p{L}\p{N}]+(?:['’\-][\p{L}\p{N}]+)*|[^\s\p{L}\p{N}]").unwrap());

/// Coarse part-of-speech tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
    Pron,
    Other,
}

impl Pos {
    /// Open-class tags that carry lexical content.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::Noun | Pos::Verb | Pos::Adj | Pos::Adv)
    }

    /// Parses a SentiWordNet POS letter (`a`, `s`, `n`, `v`, `r`) or a tag name.
    pub fn parse(s: &str) -> Option<Pos> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "s" | "adj" => Some(Pos::Adj),
            "n" | "noun" => Some(Pos::Noun),
            "v" | "verb" => Some(Pos::Verb),
            "r" | "adv" => Some(Pos::Adv),
            "pron" => Some(Pos::Pron),
            "other" => Some(Pos::Other),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adj => "ADJ",
            Pos::Adv => "ADV",
            Pos::Pron => "PRON",
            Pos::Other => "OTHER",
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tokenized, tagged sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub surface: String,
    pub tokens: Vec<String>,
    pub tags: Vec<Pos>,
}

impl Utterance {
    pub fn new(surface: impl Into<String>, tokens: Vec<String>, tags: Vec<Pos>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput);
        }
        assert_eq!(tokens.len(), tags.len(), "one tag per token");
        assert!(tokens.iter().all(|t| !t.is_empty()), "tokens are non-empty");
        Ok(Utterance {
            surface: surface.into(),
            tokens,
            tags,
        })
    }

    /// Builds an utterance from already-edited tokens, re-deriving the surface.
    pub fn from_tokens(tokens: Vec<String>, tags: Vec<Pos>) -> Result<Self> {
        let surface = detokenize(&tokens)?;
        Utterance::new(surface, tokens, tags)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of tokens that are not pure punctuation.
    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| !is_punct(t)).count()
    }

    /// Normalized surface form.
    pub fn text(&self) -> String {
        detokenize(&self.tokens).expect("utterance has tokens")
    }
}

/// Assigns one coarse tag per token.
pub trait Tagger: Send + Sync {
    fn tag(&self, tokens: &[String]) -> Vec<Pos>;
}

/// Splits `text` into tokens without tagging.
pub fn split_tokens(text: &str) -> Vec<String> {
    TOKEN_RE
        .find_iter(text)
        .map(|m| m.as_str().to_string())
        .collect()
}

pub fn tokenize(text: &str, tagger: &dyn Tagger) -> Result<Utterance> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptyInput);
    }
    let tokens = split_tokens(trimmed);
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let tags = tagger.tag(&tokens);
    debug_assert_eq!(tags.len(), tokens.len());
    Utterance::new(trimmed, tokens, tags)
}

const NO_SPACE_BEFORE: &[&str] = &[
    ".", "...", ",", "!", "?", ";", ":", ")", "]", "}", "%", "'", "\"", "’", "”", "…",
];
const NO_SPACE_AFTER: &[&str] = &["(", "[", "{", "$", "“", "‘"];
const TERMINALS: &[&str] = &[".", "!", "?", "…"];
const TRAILING_CLOSERS: &[&str] = &[")", "]", "}", "'", "\"", "’", "”"];

pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> Result<String> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for tok in tokens {
        let tok = tok.as_ref();
        if let Some(p) = prev {
            if !NO_SPACE_BEFORE.contains(&tok) && !NO_SPACE_AFTER.contains(&p) {
                out.push(' ');
            }
        }
        out.push_str(tok);
        prev = Some(tok);
    }

    let mut chars = out.chars();
    let mut result: String = match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => return Err(Error::EmptyInput),
    };

    let last_meaningful = tokens
        .iter()
        .map(|t| t.as_ref())
        .rev()
        .find(|t| !TRAILING_CLOSERS.contains(t));
    if !last_meaningful.is_some_and(|t| TERMINALS.contains(&t)) {
        result.push('.');
    }
    Ok(result)
}

/// True when the token contains no letter or digit.
pub fn is_punct(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

/// `not` or any token ending in `n't`.
pub fn is_negation(token: &str) -> bool {
    let lower = token.to_lowercase();
    lower == "not" || lower.ends_with("n't") || lower.ends_with("n’t")
}

/// Lowercases and strips a trailing plural `s` (not `ss`) from words longer than three letters.
pub fn noun_lemma(token: &str) -> String {
    let lower = token.to_lowercase();
    if lower.chars().count() > 3 && lower.ends_with('s') && !lower.ends_with("ss") {
        lower[..lower.len() - 1].to_string()
    } else {
        lower
    }
}

/// Lemma used for overlap tests: nouns get the plural strip, everything else is lowercased.
pub fn content_lemma(token: &str, tag: Pos) -> String {
    if tag == Pos::Noun {
        noun_lemma(token)
    } else {
        token.to_lowercase()
    }
}

/// Candidate dictionary forms for an inflected word, most literal first.
pub fn lemma_candidates(word: &str) -> Vec<String> {
    let w = word.to_lowercase();
    let mut out = vec![w.clone()];
    let mut push = |s: String| {
        if s.len() >= 2 && !out.contains(&s) {
            out.push(s);
        }
    };
    if let Some(stem) = w.strip_suffix("ies") {
        push(format!("{stem}y"));
    }
    if let Some(stem) = w.strip_suffix("es") {
        push(stem.to_string());
    }
    if w.ends_with('s') && !w.ends_with("ss") {
        push(w[..w.len() - 1].to_string());
    }
    for suffix in ["ing", "ed"] {
        if let Some(stem) = w.strip_suffix(suffix) {
            push(stem.to_string());
            push(format!("{stem}e"));
            let b = stem.as_bytes();
            if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                push(stem[..stem.len() - 1].to_string());
            }
            if let Some(s) = stem.strip_suffix('i') {
                push(format!("{s}y"));
            }
        }
    }
    out
}

/// Case-insensitive stopword set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordSet {
    words: BTreeSet<String>,
}

impl StopwordSet {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopwordSet {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    pub fn parse(text: &str) -> Self {
        StopwordSet::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(StopwordSet::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Content-bearing tokens (NOUN/VERB/ADJ/ADV, not stopwords), lowercased,
/// deduplicated keeping first occurrence.
pub fn content_terms(u: &Utterance, stop: &StopwordSet) -> Vec<String> {
    let mut seen = BTreeSet::new();
    u.tokens
        .iter()
        .zip(&u.tags)
        .filter(|(tok, tag)| tag.is_content() && !stop.contains(tok))
        .map(|(tok, _)| tok.to_lowercase())
        .filter(|t| seen.insert(t.clone()))
        .collect()
}

pub(crate) const PRONOUNS: &[&str] = &[
    "i",
    "me",
    "my",
    "mine",
    "myself",
    "we",
    "us",
    "our",
    "ours",
    "ourselves",
    "you",
    "your",
    "yours",
    "yourself",
    "yourselves",
    "he",
    "him",
    "his",
    "himself",
    "she",
    "her",
    "hers",
    "herself",
    "it",
    "its",
    "itself",
    "they",
    "them",
    "their",
    "theirs",
    "themselves",
];

/// Tagger backed by the lexicon files.
///
/// Closed-class pronouns get PRON and negations OTHER. Any other word whose
/// lemma appears in the sentiment lexicon takes the POS with the most senses
/// there (ties go ADJ, VERB, NOUN, ADV). Antonym-file lemmas are a fallback.
#[derive(Debug, Clone, Default)]
pub struct DictionaryTagger {
    lemma_pos: BTreeMap<String, Pos>,
}

impl DictionaryTagger {
    pub fn from_lexicons(sentiment: &SentimentLexicon, antonyms: &AntonymLexicon) -> Self {
        const PREFERENCE: [Pos; 4] = [Pos::Adj, Pos::Verb, Pos::Noun, Pos::Adv];
        let mut counts: BTreeMap<String, BTreeMap<Pos, usize>> = BTreeMap::new();
        for (lemma, pos, senses) in sentiment.sense_counts() {
            *counts
                .entry(lemma.to_string())
                .or_default()
                .entry(pos)
                .or_default() += senses;
        }
        let mut lemma_pos = BTreeMap::new();
        for (lemma, by_pos) in counts {
            let best = PREFERENCE
                .iter()
                .copied()
                .filter(|p| by_pos.contains_key(p))
                .max_by_key(|p| {
                    (
                        by_pos[p],
                        std::cmp::Reverse(PREFERENCE.iter().position(|q| q == p)),
                    )
                })
                .expect("lemma has at least one sense");
            lemma_pos.insert(lemma, best);
        }
        for (lemma, pos) in antonyms.keys() {
            lemma_pos.entry(lemma.to_string()).or_insert(pos);
        }
        DictionaryTagger { lemma_pos }
    }

    fn tag_one(&self, token: &str) -> Pos {
        if is_punct(token) || is_negation(token) {
            return Pos::Other;
        }
        let lower = token.to_lowercase();
        if PRONOUNS.contains(&lower.as_str()) {
            return Pos::Pron;
        }
        lemma_candidates(&lower)
            .iter()
            .find_map(|l| self.lemma_pos.get(l).copied())
            .unwrap_or(Pos::Other)
    }
}

impl Tagger for DictionaryTagger {
    fn tag(&self, tokens: &[String]) -> Vec<Pos> {
        tokens.iter().map(|t| self.tag_one(t)).collect()
    }
}
