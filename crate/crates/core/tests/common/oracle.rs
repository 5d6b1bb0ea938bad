//! Independent reference implementations used to check the library.

use std::cmp::Ordering;

pub fn is_punct(tok: &str) -> bool {
    !tok.chars().any(char::is_alphanumeric)
}

/// Lowercase, then drop one trailing "s" from words longer than three
/// letters that do not end in "ss".
pub fn noun_lemma(tok: &str) -> String {
    let w = tok.to_lowercase();
    if w.chars().count() > 3 && w.ends_with('s') && !w.ends_with("ss") {
        w[..w.len() - 1].to_string()
    } else {
        w
    }
}

/// Levenshtein distance over tokens.
pub fn token_edit_distance(a: &[String], b: &[String]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hit {
    pub id: usize,
    pub tokens: Vec<String>,
    pub begin: bool,
    pub substituted_noun: Option<String>,
}

/// Span left after ignoring one punctuation token at each end.
fn core(tokens: &[String]) -> &[String] {
    let mut s = tokens;
    if s.first().is_some_and(|t| is_punct(t)) {
        s = &s[1..];
    }
    if s.last().is_some_and(|t| is_punct(t)) {
        s = &s[..s.len() - 1];
    }
    s
}

fn same(a: &[String], b: &[String]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.to_lowercase() == y.to_lowercase())
}

/// Linear scan over every sentence applying the position and length rules,
/// then the noun fallback when nothing matched.
pub fn brute_retrieve(
    sentences: &[Vec<String>],
    phrase: &[String],
    nouns: &[String],
    input_len: usize,
    max_out: usize,
) -> Vec<Hit> {
    let phrase: Vec<String> = phrase
        .iter()
        .filter(|t| !is_punct(t))
        .map(|t| t.to_lowercase())
        .collect();
    let mut out = Vec::new();
    for (id, toks) in sentences.iter().enumerate() {
        if toks.len() >= 2 * input_len || phrase.is_empty() {
            continue;
        }
        let c = core(toks);
        let m = phrase.len();
        if c.len() < m {
            continue;
        }
        if same(&c[..m], &phrase) {
            out.push(Hit {
                id,
                tokens: toks.clone(),
                begin: true,
                substituted_noun: None,
            });
        } else if same(&c[c.len() - m..], &phrase) {
            out.push(Hit {
                id,
                tokens: toks.clone(),
                begin: false,
                substituted_noun: None,
            });
        }
    }
    if !out.is_empty() {
        out.truncate(max_out);
        return out;
    }
    for (id, toks) in sentences.iter().enumerate() {
        if toks.len() >= 2 * input_len {
            continue;
        }
        let lead = usize::from(toks.first().is_some_and(|t| is_punct(t)));
        let c = core(toks);
        if c.is_empty() {
            continue;
        }
        for noun in nouns {
            let n = noun_lemma(noun);
            let at = if noun_lemma(&c[0]) == n {
                Some((true, lead))
            } else if noun_lemma(&c[c.len() - 1]) == n {
                Some((false, lead + c.len() - 1))
            } else {
                None
            };
            if let Some((begin, at)) = at {
                let mut t = toks[..at].to_vec();
                t.extend(phrase.iter().cloned());
                t.extend_from_slice(&toks[at + 1..]);
                out.push(Hit {
                    id,
                    tokens: t,
                    begin,
                    substituted_noun: Some(noun.clone()),
                });
                break;
            }
        }
        if out.len() == max_out {
            break;
        }
    }
    out
}

/// Candidate ordering: contradiction descending, then fewer characters,
/// then lexicographic text, then lower id.
pub fn better(a: (f64, &str, usize), b: (f64, &str, usize)) -> bool {
    let key = |x: (f64, &str, usize)| (x.1.chars().count(), x.1.to_string(), x.2);
    match a.0.partial_cmp(&b.0).unwrap() {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => key(a) < key(b),
    }
}

/// Pearson r from raw sums.
pub fn pearson_closed_form(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt()
}
