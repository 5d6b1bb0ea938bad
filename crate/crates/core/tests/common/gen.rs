//! Seeded generators for randomized suites.

use rand::seq::SliceRandom;
use rand::Rng;

/// Evaluative adjectives that have an antonym.
pub const EVAL_ADJ: &[&str] = &[
    "awful",
    "gross",
    "ugly",
    "terrible",
    "bad",
    "sick",
    "sad",
    "boring",
    "dirty",
    "stupid",
    "annoying",
    "difficult",
    "unfavorable",
    "late",
    "cold",
];
/// Evaluative verbs (base, past) that have an antonym.
pub const EVAL_VERB: &[(&str, &str)] = &[
    ("hate", "hated"),
    ("dislike", "disliked"),
    ("fail", "failed"),
];
/// Evaluative nouns without an antonym.
pub const EVAL_NOUN_NO_ANTONYM: &[&str] = &["torment", "accident"];
pub const NEUTRAL_ADJ: &[&str] = &["blue", "fast", "lovely", "great", "fun", "happy"];
pub const NEUTRAL_VERB: &[&str] = &["watched", "cooked", "visited", "washed", "painted"];
pub const NOUNS: &[&str] = &[
    "weather", "movie", "traffic", "party", "car", "phone", "exam", "job", "food", "rain",
];
pub const SUBJECTS: &[&str] = &["I", "We", "They", "You"];

#[derive(Debug, Clone)]
pub struct ReversalCase {
    pub text: String,
    /// Token index of the evaluative word and whether it has an antonym.
    pub evaluative: Option<(usize, bool)>,
    pub negation: Option<usize>,
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

pub fn reversal_case<R: Rng>(rng: &mut R) -> ReversalCase {
    let negated = rng.gen_bool(0.5);
    let noun = pick(rng, NOUNS);
    match rng.gen_range(0..3) {
        // The N is|was [not] ADJ.
        0 => {
            let eval = rng.gen_bool(0.6);
            let adj = if eval {
                pick(rng, EVAL_ADJ)
            } else {
                pick(rng, NEUTRAL_ADJ)
            };
            let copula = pick(rng, &["is", "was"]);
            let (mid, neg) = match (negated, rng.gen_bool(0.5)) {
                (false, _) => (vec![copula.to_string()], None),
                (true, true) => (vec![copula.to_string(), "not".into()], Some(3)),
                (true, false) => (vec![format!("{copula}n't")], Some(2)),
            };
            let mut toks = vec!["The".to_string(), noun.to_string()];
            toks.extend(mid);
            let at = toks.len();
            toks.push(adj.into());
            ReversalCase {
                text: format!("{}.", toks.join(" ")),
                evaluative: eval.then_some((at, true)),
                negation: neg,
            }
        }
        // S [did not|didn't] VERB the N.
        1 => {
            let eval = rng.gen_bool(0.6);
            let subj = pick(rng, SUBJECTS);
            let (base, past) = if eval {
                *EVAL_VERB.choose(rng).unwrap()
            } else {
                let v = pick(rng, NEUTRAL_VERB);
                (v, v)
            };
            let mut toks = vec![subj.to_string()];
            let neg = if negated {
                if rng.gen_bool(0.5) {
                    toks.extend(["did".to_string(), "not".to_string()]);
                    Some(2)
                } else {
                    toks.push(pick(rng, &["didn't", "don't"]).into());
                    Some(1)
                }
            } else {
                None
            };
            let at = toks.len();
            toks.push(
                if negated || rng.gen_bool(0.5) {
                    base
                } else {
                    past
                }
                .into(),
            );
            toks.extend(["the".to_string(), noun.to_string()]);
            ReversalCase {
                text: format!("{}.", toks.join(" ")),
                evaluative: eval.then_some((at, true)),
                negation: neg,
            }
        }
        // It is|was [not] a N  /  It is [not] torment.
        _ => {
            let eval = rng.gen_bool(0.5);
            let n = if eval {
                pick(rng, EVAL_NOUN_NO_ANTONYM)
            } else {
                noun
            };
            let mut toks = vec!["It".to_string(), "was".to_string()];
            let neg = negated.then(|| {
                toks.push("not".into());
                2
            });
            toks.push("an".into());
            let at = toks.len();
            toks.push(n.into());
            ReversalCase {
                text: format!("{}.", toks.join(" ")),
                evaluative: eval.then_some((at, false)),
                negation: neg,
            }
        }
    }
}

const CORPUS_WORDS: &[&str] = &[
    "cat", "cats", "dog", "dogs", "rain", "stomach", "ache", "aches", "glass", "bus", "the", "a",
    "is", "was", "on", "and", "arrest", "arrests", "news",
];
const CORPUS_PUNCT: &[&str] = &[".", ",", "!", "\"", "?"];

/// Token lists for a random corpus; words are sometimes capitalized and
/// sentences sometimes start or end with punctuation.
pub fn random_corpus<R: Rng>(rng: &mut R, max_sentences: usize) -> Vec<Vec<String>> {
    let n = rng.gen_range(1..=max_sentences);
    (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=14);
            let mut toks: Vec<String> = (0..len)
                .map(|_| {
                    let w = pick(rng, CORPUS_WORDS);
                    if rng.gen_bool(0.2) {
                        let mut c = w.chars();
                        c.next().unwrap().to_uppercase().chain(c).collect()
                    } else {
                        w.to_string()
                    }
                })
                .collect();
            if rng.gen_bool(0.2) {
                toks.insert(0, pick(rng, CORPUS_PUNCT).into());
            }
            if rng.gen_bool(0.7) {
                toks.push(pick(rng, CORPUS_PUNCT).into());
            }
            toks
        })
        .collect()
}

/// A random concept phrase (1 to 3 words) and the subset of its words
/// flagged as nouns, in phrase order.
pub fn random_concept<R: Rng>(rng: &mut R) -> (Vec<String>, Vec<String>) {
    let len = rng.gen_range(1..=3);
    let words: Vec<String> = (0..len)
        .map(|_| pick(rng, CORPUS_WORDS).to_string())
        .collect();
    let nouns = words
        .iter()
        .filter(|_| rng.gen_bool(0.6))
        .cloned()
        .collect();
    (words, nouns)
}
