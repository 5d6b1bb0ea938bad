//! Sentence corpus index and context retrieval.
//!
//! A context qualifies when the concept phrase sits at the very beginning
//! or very end of the sentence (one leading or trailing punctuation token
//! is tolerated) and the sentence has fewer than twice as many tokens as
//! the input. When no sentence holds the whole phrase, each noun of the
//! phrase is tried instead and the matched noun is replaced by the phrase.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commonsense::ConceptPhrase;
use crate::error::{Error, Result};
use crate::text::{detokenize, is_punct, noun_lemma, split_tokens};

pub const DEFAULT_MAX_OUT: usize = 20;

const CACHE_MAGIC: &[u8; 8] = b"SGIDX\0\0\0";
const CACHE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSentence {
    pub text: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusIndex {
    sentences: Vec<CorpusSentence>,
    // noun_lemma(token) -> ascending sentence ids
    postings: BTreeMap<String, Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ConceptPosition {
    Begin,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievedContext {
    pub sentence: String,
    pub source_id: usize,
    pub concept_position: ConceptPosition,
    pub substituted: bool,
    pub substituted_noun: Option<String>,
}

impl CorpusIndex {
    /// One sentence per non-blank line; ids count non-blank lines from 0.
    pub fn from_text(text: &str) -> Self {
        let mut sentences = Vec::new();
        let mut postings: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let id = sentences.len() as u32;
            let tokens = split_tokens(line);
            for tok in tokens.iter().filter(|t| !is_punct(t)) {
                let list = postings.entry(noun_lemma(tok)).or_default();
                if list.last() != Some(&id) {
                    list.push(id);
                }
            }
            sentences.push(CorpusSentence {
                text: line.to_string(),
                tokens,
            });
        }
        CorpusIndex {
            sentences,
            postings,
        }
    }

    pub fn from_bytes(bytes: &[u8], origin: impl AsRef<Path>) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::CorpusParse {
            path: origin.as_ref().to_path_buf(),
            line: bytes[..e.valid_up_to()]
                .iter()
                .filter(|b| **b == b'\n')
                .count()
                + 1,
        })?;
        Ok(Self::from_text(text))
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentence(&self, id: usize) -> Option<&CorpusSentence> {
        self.sentences.get(id)
    }

    pub fn sentences(&self) -> &[CorpusSentence] {
        &self.sentences
    }

    pub fn postings(&self, key: &str) -> &[u32] {
        self.postings.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> + '_ {
        self.postings.keys().map(String::as_str)
    }
}

pub fn build_index(corpus_path: impl AsRef<Path>) -> Result<CorpusIndex> {
    let path = corpus_path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    CorpusIndex::from_bytes(&bytes, path)
}

/// Span boundaries after tolerating one leading and one trailing punctuation token.
fn bounds(tokens: &[String]) -> (usize, usize) {
    let n = tokens.len();
    let start = usize::from(n > 0 && is_punct(&tokens[0]));
    let end = if n > start && is_punct(&tokens[n - 1]) {
        n - 1
    } else {
        n
    };
    (start, end.max(start))
}

fn eq_seq(a: &[String], b: &[String]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.to_lowercase() == y.to_lowercase())
}

/// Where `phrase` sits in `tokens`, BEGIN preferred when both apply.
pub fn phrase_position(tokens: &[String], phrase: &[String]) -> Option<ConceptPosition> {
    let m = phrase.len();
    let (start, end) = bounds(tokens);
    if m == 0 || end - start < m {
        return None;
    }
    if eq_seq(&tokens[start..start + m], phrase) {
        Some(ConceptPosition::Begin)
    } else if eq_seq(&tokens[end - m..end], phrase) {
        Some(ConceptPosition::End)
    } else {
        None
    }
}

/// Position and index of a single noun (lemma-level) at the beginning or end.
fn noun_position(tokens: &[String], noun: &str) -> Option<(ConceptPosition, usize)> {
    let (start, end) = bounds(tokens);
    if end <= start {
        return None;
    }
    let target = noun_lemma(noun);
    if noun_lemma(&tokens[start]) == target {
        Some((ConceptPosition::Begin, start))
    } else if noun_lemma(&tokens[end - 1]) == target {
        Some((ConceptPosition::End, end - 1))
    } else {
        None
    }
}

fn phrase_tokens(concept: &ConceptPhrase) -> Vec<String> {
    let toks = if concept.tokens.is_empty() {
        split_tokens(&concept.text)
    } else {
        concept.tokens.clone()
    };
    toks.into_iter()
        .filter(|t| !is_punct(t))
        .map(|t| t.to_lowercase())
        .collect()
}

pub fn retrieve_contexts(
    idx: &CorpusIndex,
    concept: &ConceptPhrase,
    input_len: usize,
    max_out: usize,
) -> Vec<RetrievedContext> {
    let phrase = phrase_tokens(concept);
    let limit = 2 * input_len;
    let short_enough = |id: u32| idx.sentences[id as usize].tokens.len() < limit;

    let mut out = Vec::new();
    if !phrase.is_empty() {
        // the rarest phrase token bounds the candidate set
        let seed = phrase
            .iter()
            .map(|t| idx.postings(&noun_lemma(t)))
            .min_by_key(|p| p.len())
            .unwrap_or(&[]);
        for &id in seed {
            if !short_enough(id) {
                continue;
            }
            let s = &idx.sentences[id as usize];
            if let Some(pos) = phrase_position(&s.tokens, &phrase) {
                out.push(RetrievedContext {
                    sentence: s.text.clone(),
                    source_id: id as usize,
                    concept_position: pos,
                    substituted: false,
                    substituted_noun: None,
                });
            }
        }
    }
    if !out.is_empty() {
        out.truncate(max_out);
        return out;
    }

    // first noun (phrase order) that matches wins for each sentence
    let mut hits: BTreeMap<u32, (ConceptPosition, usize, &str)> = BTreeMap::new();
    for noun in &concept.nouns {
        for &id in idx.postings(&noun_lemma(noun)) {
            if hits.contains_key(&id) || !short_enough(id) {
                continue;
            }
            if let Some((pos, at)) = noun_position(&idx.sentences[id as usize].tokens, noun) {
                hits.insert(id, (pos, at, noun.as_str()));
            }
        }
    }
    for (id, (pos, at, noun)) in hits.into_iter().take(max_out) {
        let s = &idx.sentences[id as usize];
        let mut tokens = s.tokens[..at].to_vec();
        tokens.extend(phrase.iter().cloned());
        tokens.extend_from_slice(&s.tokens[at + 1..]);
        out.push(RetrievedContext {
            sentence: detokenize(&tokens).expect("non-empty"),
            source_id: id as usize,
            concept_position: pos,
            substituted: true,
            substituted_noun: Some(noun.to_string()),
        });
    }
    out
}

/// Whether a cache file was reused or rebuilt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Fresh,
    Rebuilt,
}

pub fn corpus_hash(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

/// Versioned on-disk index keyed by the corpus content hash.
#[derive(Debug, Clone)]
pub struct IndexCache {
    path: PathBuf,
}

impl IndexCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        IndexCache { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Reads the cache if it exists, matches this version and `hash`.
    pub fn read(&self, hash: &[u8; 32]) -> Option<CorpusIndex> {
        let mut f = std::fs::File::open(&self.path).ok()?;
        let mut header = [0u8; 8 + 4 + 32];
        f.read_exact(&mut header).ok()?;
        if &header[..8] != CACHE_MAGIC
            || header[8..12] != CACHE_VERSION.to_le_bytes()
            || &header[12..] != hash
        {
            return None;
        }
        bincode::deserialize_from(std::io::BufReader::new(f)).ok()
    }

    pub fn write(&self, hash: &[u8; 32], index: &CorpusIndex) -> Result<()> {
        let io = |e| Error::io(&self.path, e);
        let mut f = std::io::BufWriter::new(std::fs::File::create(&self.path).map_err(io)?);
        f.write_all(CACHE_MAGIC).map_err(io)?;
        f.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io)?;
        f.write_all(hash).map_err(io)?;
        bincode::serialize_into(&mut f, index)
            .map_err(|e| Error::io(&self.path, std::io::Error::other(e)))?;
        f.flush().map_err(io)
    }

    /// Loads the index for `corpus`, rebuilding and rewriting the cache on a miss.
    pub fn load_or_build(&self, corpus: impl AsRef<Path>) -> Result<(CorpusIndex, CacheStatus)> {
        let corpus = corpus.as_ref();
        let bytes = std::fs::read(corpus).map_err(|e| Error::io(corpus, e))?;
        let hash = corpus_hash(&bytes);
        if let Some(index) = self.read(&hash) {
            return Ok((index, CacheStatus::Fresh));
        }
        let index = CorpusIndex::from_bytes(&bytes, corpus)?;
        self.write(&hash, &index)?;
        Ok((index, CacheStatus::Rebuilt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commonsense::ConceptCandidate;

    fn concept(text: &str, nouns: &[&str]) -> ConceptPhrase {
        ConceptPhrase {
            text: text.into(),
            tokens: text.split(' ').map(String::from).collect(),
            source_candidate: ConceptCandidate {
                phrase: text.into(),
                score: 1.0,
            },
            nouns: nouns.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn postings_match_full_scan() {
        let idx =
            CorpusIndex::from_text("The cat sat.\nCats purr loudly.\nA dog barked at the cat.\n");
        assert_eq!(idx.len(), 3);
        for key in idx.keys() {
            let scan: Vec<u32> = idx
                .sentences()
                .iter()
                .enumerate()
                .filter(|(_, s)| {
                    s.tokens
                        .iter()
                        .any(|t| !is_punct(t) && noun_lemma(t) == key)
                })
                .map(|(i, _)| i as u32)
                .collect();
            assert_eq!(idx.postings(key), scan.as_slice(), "key {key}");
        }
        assert_eq!(idx.postings("cat"), [0, 1, 2]);
    }

    #[test]
    fn blank_lines_skipped_and_empty_corpus() {
        let idx = CorpusIndex::from_text("First one.\n\n   \nSecond one.\n");
        assert_eq!(idx.len(), 2);
        assert_eq!(idx.sentence(1).unwrap().text, "Second one.");

        let empty = CorpusIndex::from_text("");
        assert!(empty.is_empty());
        assert!(retrieve_contexts(&empty, &concept("accident", &["accident"]), 8, 20).is_empty());
    }

    #[test]
    fn duplicates_keep_distinct_ids() {
        let idx = CorpusIndex::from_text("Same line.\nSame line.\n");
        assert_eq!(idx.len(), 2);
        let got = retrieve_contexts(&idx, &concept("same line", &[]), 5, 20);
        assert_eq!(got.iter().map(|c| c.source_id).collect::<Vec<_>>(), [0, 1]);
    }

    #[test]
    fn begin_and_end_positions() {
        let idx = CorpusIndex::from_text(
            "Stomach ache is just an additional side effect.\n\
             I ate too much and got a terrible stomach ache.\n\
             A stomach ache kept me home.\n",
        );
        let got = retrieve_contexts(&idx, &concept("stomach ache", &["stomach"]), 8, 20);
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].concept_position, ConceptPosition::Begin);
        assert_eq!(
            got[0].sentence,
            "Stomach ache is just an additional side effect."
        );
        assert_eq!(got[1].concept_position, ConceptPosition::End);
        assert!(got.iter().all(|c| !c.substituted));
    }

    #[test]
    fn mid_sentence_excluded() {
        let idx = CorpusIndex::from_text("The accident happened at noon.\n");
        assert!(retrieve_contexts(&idx, &concept("accident", &["accident"]), 8, 20).is_empty());
    }

    #[test]
    fn length_bound_is_strict() {
        // 6 tokens; input_len 3 gives limit 6, which excludes it
        let idx = CorpusIndex::from_text("Accident on the main road.\n");
        assert!(retrieve_contexts(&idx, &concept("accident", &[]), 3, 20).is_empty());
        assert_eq!(
            retrieve_contexts(&idx, &concept("accident", &[]), 4, 20).len(),
            1
        );
    }

    #[test]
    fn punctuation_tolerance() {
        let idx = CorpusIndex::from_text("\"Accident again\"\n");
        let got = retrieve_contexts(&idx, &concept("accident", &[]), 8, 20);
        assert_eq!(got[0].concept_position, ConceptPosition::Begin);
        let got = retrieve_contexts(&idx, &concept("again", &[]), 8, 20);
        assert_eq!(got[0].concept_position, ConceptPosition::End);
    }

    #[test]
    fn noun_fallback_substitutes() {
        let idx =
            CorpusIndex::from_text("I never eat spoiled food.\nThe food court was busy today.\n");
        let got = retrieve_contexts(&idx, &concept("food to spoil", &["food"]), 6, 20);
        assert_eq!(got.len(), 1);
        let c = &got[0];
        assert_eq!(c.sentence, "I never eat spoiled food to spoil.");
        assert!(c.substituted);
        assert_eq!(c.substituted_noun.as_deref(), Some("food"));
        assert_eq!(c.concept_position, ConceptPosition::End);
    }

    #[test]
    fn fallback_matches_plural_forms() {
        let idx = CorpusIndex::from_text("Accidents happen.\n");
        let got = retrieve_contexts(&idx, &concept("car accident", &["car", "accident"]), 4, 20);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].sentence, "Car accident happen.");
    }

    #[test]
    fn truncates_to_max_out() {
        let text = (0..30)
            .map(|i| format!("Rain again {i}."))
            .collect::<Vec<_>>()
            .join("\n");
        let idx = CorpusIndex::from_text(&text);
        let got = retrieve_contexts(&idx, &concept("rain", &[]), 5, 7);
        assert_eq!(got.len(), 7);
        assert_eq!(got.last().unwrap().source_id, 6);
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let bytes = b"ok line\nsecond\n\xff bad\n";
        match CorpusIndex::from_bytes(bytes, "c.txt") {
            Err(Error::CorpusParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cache_round_trip_and_invalidation() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("corpus.txt");
        std::fs::write(&corpus, "One line.\nTwo lines.\n").unwrap();
        let cache = IndexCache::new(dir.path().join("idx.bin"));

        let (a, s1) = cache.load_or_build(&corpus).unwrap();
        assert_eq!(s1, CacheStatus::Rebuilt);
        let (b, s2) = cache.load_or_build(&corpus).unwrap();
        assert_eq!(s2, CacheStatus::Fresh);
        assert_eq!(a, b);

        std::fs::write(&corpus, "Changed.\n").unwrap();
        let (c, s3) = cache.load_or_build(&corpus).unwrap();
        assert_eq!(s3, CacheStatus::Rebuilt);
        assert_eq!(c.len(), 1);

        std::fs::write(cache.path(), b"garbage").unwrap();
        let (_, s4) = cache.load_or_build(&corpus).unwrap();
        assert_eq!(s4, CacheStatus::Rebuilt);
    }
}
