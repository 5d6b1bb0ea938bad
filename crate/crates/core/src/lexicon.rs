//! Sentiment and antonym lexicons.
//!
//! The sentiment lexicon uses the SentiWordNet 3.0 column layout
//! (`POS ID PosScore NegScore SynsetTerms Gloss`). Word-level scores are
//! the per-sense scores averaged with weight `1/rank`.
//!
//! The antonym lexicon is a four-column TSV: `lemma pos antonym rank`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::Pos;

const SCORE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentEntry {
    pub pos: Pos,
    pub pos_score: f64,
    pub neg_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sense {
    pos_score: f64,
    neg_score: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SentimentLexicon {
    // (lemma, pos) -> rank -> scores
    senses: BTreeMap<(String, Pos), BTreeMap<u32, Sense>>,
    entries: BTreeMap<(String, Pos), SentimentEntry>,
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::LexiconParse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_score(raw: &str, what: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("{what} {raw:?} is not a number")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(parse_err(path, line, format!("{what} {v} outside [0, 1]")));
    }
    Ok(v)
}

impl SentimentLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses lexicon text; `origin` only labels error messages.
    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let path = origin.as_ref();
        let mut senses: BTreeMap<(String, Pos), BTreeMap<u32, Sense>> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() < 5 {
                return Err(parse_err(
                    path,
                    line_no,
                    format!(
                        "expected at least 5 tab-separated columns, found {}",
                        cols.len()
                    ),
                ));
            }
            let pos = match cols[0].trim() {
                "a" | "s" => Pos::Adj,
                "n" => Pos::Noun,
                "v" => Pos::Verb,
                "r" => Pos::Adv,
                other => return Err(parse_err(path, line_no, format!("unknown POS {other:?}"))),
            };
            if cols[1].trim().is_empty() {
                return Err(parse_err(path, line_no, "missing synset id"));
            }
            let pos_score = parse_score(cols[2], "PosScore", path, line_no)?;
            let neg_score = parse_score(cols[3], "NegScore", path, line_no)?;
            if pos_score + neg_score > 1.0 + SCORE_EPS {
                return Err(parse_err(path, line_no, "PosScore + NegScore exceeds 1"));
            }
            let terms: Vec<&str> = cols[4].split_whitespace().collect();
            if terms.is_empty() {
                return Err(parse_err(path, line_no, "empty SynsetTerms"));
            }
            for term in terms {
                let (lemma, rank) = term.rsplit_once('#').ok_or_else(|| {
                    parse_err(path, line_no, format!("term {term:?} lacks #rank"))
                })?;
                let rank: u32 = rank.parse().ok().filter(|r| *r > 0).ok_or_else(|| {
                    parse_err(path, line_no, format!("bad sense rank in {term:?}"))
                })?;
                if lemma.is_empty() {
                    return Err(parse_err(path, line_no, format!("empty lemma in {term:?}")));
                }
                senses
                    .entry((lemma.to_lowercase(), pos))
                    .or_default()
                    .insert(
                        rank,
                        Sense {
                            pos_score,
                            neg_score,
                        },
                    );
            }
        }

        let entries = senses
            .iter()
            .map(|((lemma, pos), by_rank)| {
                let (mut w, mut p, mut n) = (0.0, 0.0, 0.0);
                for (rank, s) in by_rank {
                    let weight = 1.0 / f64::from(*rank);
                    w += weight;
                    p += weight * s.pos_score;
                    n += weight * s.neg_score;
                }
                (
                    (lemma.clone(), *pos),
                    SentimentEntry {
                        pos: *pos,
                        pos_score: p / w,
                        neg_score: n / w,
                    },
                )
            })
            .collect();

        Ok(SentimentLexicon { senses, entries })
    }

    pub fn entry(&self, lemma: &str, pos: Pos) -> Option<&SentimentEntry> {
        self.entries.get(&(lemma.to_lowercase(), pos))
    }

    /// `(pos_score, neg_score)`, or `(0, 0)` for unknown keys.
    pub fn scores(&self, lemma: &str, pos: Pos) -> (f64, f64) {
        self.entry(lemma, pos)
            .map_or((0.0, 0.0), |e| (e.pos_score, e.neg_score))
    }

    pub fn negative_score(&self, lemma: &str, pos: Pos) -> f64 {
        self.scores(lemma, pos).1
    }

    pub fn positive_score(&self, lemma: &str, pos: Pos) -> f64 {
        self.scores(lemma, pos).0
    }

    pub fn contains(&self, lemma: &str, pos: Pos) -> bool {
        self.entry(lemma, pos).is_some()
    }

    /// `(lemma, pos, number of senses)` for every key.
    pub fn sense_counts(&self) -> impl Iterator<Item = (&str, Pos, usize)> + '_ {
        self.senses
            .iter()
            .map(|((lemma, pos), s)| (lemma.as_str(), *pos, s.len()))
    }

    /// Highest per-sense negative score recorded for a key.
    pub fn max_sense_negative(&self, lemma: &str, pos: Pos) -> Option<f64> {
        self.senses
            .get(&(lemma.to_lowercase(), pos))
            .map(|s| s.values().map(|x| x.neg_score).fold(0.0, f64::max))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Default)]
pub struct AntonymLexicon {
    map: BTreeMap<(String, Pos), Vec<String>>,
}

impl AntonymLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let path: PathBuf = origin.as_ref().to_path_buf();
        let mut ranked: BTreeMap<(String, Pos), BTreeMap<u32, String>> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(parse_err(
                    &path,
                    line_no,
                    format!("expected 4 tab-separated columns, found {}", cols.len()),
                ));
            }
            let lemma = cols[0].to_lowercase();
            let antonym = cols[2].to_lowercase();
            if lemma.is_empty() || antonym.is_empty() {
                return Err(parse_err(&path, line_no, "empty lemma or antonym"));
            }
            let pos = Pos::parse(cols[1])
                .filter(|p| p.is_content())
                .ok_or_else(|| parse_err(&path, line_no, format!("unknown POS {:?}", cols[1])))?;
            let rank: u32 = cols[3].parse().ok().filter(|r| *r > 0).ok_or_else(|| {
                parse_err(
                    &path,
                    line_no,
                    format!("rank {:?} is not a positive integer", cols[3]),
                )
            })?;
            if lemma == antonym {
                return Err(parse_err(
                    &path,
                    line_no,
                    format!("{lemma:?} listed as its own antonym"),
                ));
            }
            let slot = ranked.entry((lemma.clone(), pos)).or_default();
            if slot.insert(rank, antonym).is_some() {
                return Err(parse_err(
                    &path,
                    line_no,
                    format!("duplicate rank {rank} for ({lemma}, {pos})"),
                ));
            }
        }

        let map = ranked
            .into_iter()
            .map(|(k, by_rank)| (k, by_rank.into_values().collect()))
            .collect();
        Ok(AntonymLexicon { map })
    }

    /// Antonyms ordered by rank; empty when the key is unknown.
    pub fn antonyms(&self, lemma: &str, pos: Pos) -> &[String] {
        self.map
            .get(&(lemma.to_lowercase(), pos))
            .map_or(&[], Vec::as_slice)
    }

    /// Antonyms under any POS, deduplicated, in POS order then rank.
    pub fn antonyms_any(&self, lemma: &str) -> Vec<&str> {
        let lemma = lemma.to_lowercase();
        let mut out: Vec<&str> = Vec::new();
        for pos in [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv] {
            for a in self.antonyms(&lemma, pos) {
                if !out.contains(&a.as_str()) {
                    out.push(a);
                }
            }
        }
        out
    }

    pub fn keys(&self) -> impl Iterator<Item = (&str, Pos)> + '_ {
        self.map.keys().map(|(l, p)| (l.as_str(), *p))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}
