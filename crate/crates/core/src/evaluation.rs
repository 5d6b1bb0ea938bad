//! Human-rating bookkeeping: per-system means, pairwise games and Pearson
//! correlation.
//!
//! Ratings are a TSV of `item_id system criterion r1 [r2 ...]`, scores in
//! `1..=5`. Blank lines and `#` comments are ignored.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Criterion {
    Sarcasticness,
    Creativity,
    Humor,
    Grammaticality,
}

impl Criterion {
    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Sarcasticness => "SARCASTICNESS",
            Criterion::Creativity => "CREATIVITY",
            Criterion::Humor => "HUMOR",
            Criterion::Grammaticality => "GRAMMATICALITY",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "SARCASTICNESS" => Ok(Criterion::Sarcasticness),
            "CREATIVITY" => Ok(Criterion::Creativity),
            "HUMOR" | "HUMOUR" => Ok(Criterion::Humor),
            "GRAMMATICALITY" => Ok(Criterion::Grammaticality),
            _ => Err(Error::Config(format!("unknown criterion {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub item_id: String,
    pub system: String,
    pub criterion: Criterion,
    pub scores: Vec<u8>,
}

impl RatingRecord {
    pub fn mean(&self) -> f64 {
        self.scores.iter().map(|&s| f64::from(s)).sum::<f64>() / self.scores.len() as f64
    }
}

pub fn parse_ratings(text: &str, origin: impl AsRef<Path>) -> Result<Vec<RatingRecord>> {
    let origin = origin.as_ref();
    let fail = |line: usize, message: String| Error::RatingsParse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        if cols.len() < 4 {
            return Err(fail(
                line_no,
                format!("expected at least 4 columns, found {}", cols.len()),
            ));
        }
        if cols[0].is_empty() || cols[1].is_empty() {
            return Err(fail(line_no, "empty item id or system".into()));
        }
        let criterion = cols[2]
            .parse::<Criterion>()
            .map_err(|e| fail(line_no, e.to_string()))?;
        let scores = cols[3..]
            .iter()
            .map(|c| match c.parse::<u8>() {
                Ok(s @ 1..=5) => Ok(s),
                _ => Err(fail(
                    line_no,
                    format!("score {c:?} is not an integer in 1..=5"),
                )),
            })
            .collect::<Result<Vec<u8>>>()?;
        let key = (cols[0].to_string(), cols[1].to_string(), criterion);
        if !seen.insert(key) {
            return Err(fail(
                line_no,
                format!("duplicate rating row for item {}", cols[0]),
            ));
        }
        out.push(RatingRecord {
            item_id: cols[0].to_string(),
            system: cols[1].to_string(),
            criterion,
            scores,
        });
    }
    Ok(out)
}

pub fn load_ratings(path: impl AsRef<Path>) -> Result<Vec<RatingRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ratings(&text, path)
}

/// Scores per item for one system and criterion. System names compare
/// case-insensitively.
pub fn scores_for(
    records: &[RatingRecord],
    system: &str,
    criterion: Criterion,
) -> BTreeMap<String, Vec<u8>> {
    records
        .iter()
        .filter(|r| r.criterion == criterion && r.system.eq_ignore_ascii_case(system))
        .map(|r| (r.item_id.clone(), r.scores.clone()))
        .collect()
}

/// Mean rating of every system under `criterion`, averaged over items.
pub fn system_means(records: &[RatingRecord], criterion: Criterion) -> BTreeMap<String, f64> {
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.criterion == criterion) {
        let e = acc.entry(r.system.clone()).or_default();
        e.0 += r.mean();
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(s, (sum, n))| (s, sum / n as f64))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameResult {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    pub win_pct: f64,
    pub lose_pct: f64,
    pub tie_pct: f64,
}

impl GameResult {
    pub fn total(&self) -> usize {
        self.wins + self.losses + self.ties
    }
}

impl fmt::Display for GameResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "win {:.1}% ({})  lose {:.1}% ({})  tie {:.1}% ({})",
            self.win_pct, self.wins, self.lose_pct, self.losses, self.tie_pct, self.ties
        )
    }
}

fn compare_means(a: &[u8], b: &[u8]) -> Ordering {
    // mean(a) vs mean(b) without rounding: sum(a) * |b| vs sum(b) * |a|
    let sa: u64 = a.iter().map(|&s| u64::from(s)).sum();
    let sb: u64 = b.iter().map(|&s| u64::from(s)).sum();
    (sa * b.len() as u64).cmp(&(sb * a.len() as u64))
}

/// Per item, `a` wins when its mean rating is strictly higher. Percentages
/// are over all items, ties included.
pub fn pairwise_game(
    a: &BTreeMap<String, Vec<u8>>,
    b: &BTreeMap<String, Vec<u8>>,
) -> Result<GameResult> {
    if !a.keys().eq(b.keys()) {
        let only_a: Vec<&str> = a
            .keys()
            .filter(|k| !b.contains_key(*k))
            .map(String::as_str)
            .collect();
        let only_b: Vec<&str> = b
            .keys()
            .filter(|k| !a.contains_key(*k))
            .map(String::as_str)
            .collect();
        return Err(Error::ItemMismatch(format!(
            "only in first: {only_a:?}; only in second: {only_b:?}"
        )));
    }
    if a.is_empty() {
        return Err(Error::DegenerateInput("no items to compare".into()));
    }
    if let Some((id, _)) = a.iter().chain(b).find(|(_, s)| s.is_empty()) {
        return Err(Error::DegenerateInput(format!("item {id} has no scores")));
    }
    let (mut wins, mut losses, mut ties) = (0, 0, 0);
    for (id, sa) in a {
        match compare_means(sa, &b[id]) {
            Ordering::Greater => wins += 1,
            Ordering::Less => losses += 1,
            Ordering::Equal => ties += 1,
        }
    }
    let total = a.len() as f64;
    let pct = |n: usize| 100.0 * n as f64 / total;
    Ok(GameResult {
        wins,
        losses,
        ties,
        win_pct: pct(wins),
        lose_pct: pct(losses),
        tie_pct: pct(ties),
    })
}

/// Product-moment correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateInput(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateInput("need at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson correlation between mean item ratings and a per-item score
/// (for example the chosen context's contradiction probability).
pub fn correlate(
    ratings: &BTreeMap<String, Vec<u8>>,
    scores: &BTreeMap<String, f64>,
) -> Result<f64> {
    if !ratings.keys().eq(scores.keys()) {
        return Err(Error::ItemMismatch(format!(
            "{} rated items vs {} scored items",
            ratings.len(),
            scores.len()
        )));
    }
    let xs: Vec<f64> = ratings
        .values()
        .map(|s| s.iter().map(|&v| f64::from(v)).sum::<f64>() / s.len() as f64)
        .collect();
    let ys: Vec<f64> = scores.values().copied().collect();
    pearson(&xs, &ys)
}
