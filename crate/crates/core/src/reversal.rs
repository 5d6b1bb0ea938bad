//! Valence reversal: swap the most negative evaluative word for its
//! antonym, or failing that drop a negation. Exactly one edit is made.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{AntonymLexicon, SentimentLexicon};
use crate::text::{is_negation, lemma_candidates, Pos, Utterance};

pub const DEFAULT_TAU: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    AntonymSwap,
    NegationRemoval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversalResult {
    pub reversed: Utterance,
    pub strategy: Strategy,
    pub edit_index: usize,
    pub original_token: String,
    pub replacement_token: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluativeWord {
    pub index: usize,
    pub lemma: String,
    pub score: f64,
}

/// Dictionary form of `token` under `pos`, falling back to the lowercased token.
pub fn resolve_lemma(token: &str, pos: Pos, lex: &SentimentLexicon) -> String {
    let candidates = lemma_candidates(token);
    candidates
        .iter()
        .find(|c| lex.contains(c, pos))
        .cloned()
        .unwrap_or_else(|| candidates[0].clone())
}

/// Leftmost token with the highest negative score, provided that score is
/// at least `tau` and beats the word's positive score.
pub fn find_evaluative_word(
    u: &Utterance,
    lex: &SentimentLexicon,
    tau: f64,
) -> Option<EvaluativeWord> {
    let mut best: Option<EvaluativeWord> = None;
    for (index, (tok, &tag)) in u.tokens.iter().zip(&u.tags).enumerate() {
        if !tag.is_content() || is_negation(tok) {
            continue;
        }
        let lemma = resolve_lemma(tok, tag, lex);
        let (pos_score, neg_score) = lex.scores(&lemma, tag);
        if neg_score < tau || neg_score <= pos_score {
            continue;
        }
        if best.as_ref().is_none_or(|b| neg_score > b.score) {
            best = Some(EvaluativeWord {
                index,
                lemma,
                score: neg_score,
            });
        }
    }
    best
}

fn match_case(template: &str, word: &str) -> String {
    let letters: Vec<char> = template.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.len() > 1 && letters.iter().all(|c| c.is_uppercase()) {
        return word.to_uppercase();
    }
    if template.chars().next().is_some_and(char::is_uppercase) {
        let mut chars = word.chars();
        return match chars.next() {
            Some(c) => c.to_uppercase().chain(chars).collect(),
            None => String::new(),
        };
    }
    word.to_string()
}

/// Carries a regular inflectional suffix over from `token` to `antonym`
/// (`hated` with lemma `hate` gives `loved`).
fn inflect_like(token: &str, lemma: &str, antonym: &str) -> String {
    let lower = token.to_lowercase();
    match lower.strip_prefix(lemma) {
        Some(suffix) if !suffix.is_empty() && !antonym.contains(' ') => {
            let suffix = if suffix.starts_with('e') && antonym.ends_with('e') {
                &suffix[1..]
            } else {
                suffix
            };
            format!("{antonym}{suffix}")
        }
        _ => antonym.to_string(),
    }
}

fn strip_negation(token: &str) -> Option<String> {
    let lower = token.to_lowercase().replace('’', "'");
    let stem = lower.strip_suffix("n't")?;
    let base = match lower.as_str() {
        "can't" => "can",
        "won't" => "will",
        "shan't" => "shall",
        "ain't" => "is",
        _ => stem,
    };
    if base.is_empty() {
        return None;
    }
    Some(match_case(token, base))
}

pub fn reverse_valence(
    u: &Utterance,
    sentiment: &SentimentLexicon,
    antonyms: &AntonymLexicon,
    tau: f64,
) -> Result<ReversalResult> {
    let evaluative = find_evaluative_word(u, sentiment, tau);

    if let Some(ev) = &evaluative {
        let tag = u.tags[ev.index];
        if let Some(first) = antonyms.antonyms(&ev.lemma, tag).first() {
            let original = &u.tokens[ev.index];
            let bare = first.replace('_', " ");
            let replacement = match_case(original, &inflect_like(original, &ev.lemma, &bare));
            let mut tokens = u.tokens.clone();
            tokens[ev.index] = replacement.clone();
            return Ok(ReversalResult {
                reversed: Utterance::from_tokens(tokens, u.tags.clone())?,
                strategy: Strategy::AntonymSwap,
                edit_index: ev.index,
                original_token: original.clone(),
                replacement_token: Some(replacement),
            });
        }
    }

    if let Some(index) = u.tokens.iter().position(|t| is_negation(t)) {
        let original = u.tokens[index].clone();
        let mut tokens = u.tokens.clone();
        let mut tags = u.tags.clone();
        if original.eq_ignore_ascii_case("not") {
            tokens.remove(index);
            tags.remove(index);
        } else {
            match strip_negation(&original) {
                Some(base) => tokens[index] = base,
                None => {
                    tokens.remove(index);
                    tags.remove(index);
                }
            }
        }
        return Ok(ReversalResult {
            reversed: Utterance::from_tokens(tokens, tags)?,
            strategy: Strategy::NegationRemoval,
            edit_index: index,
            original_token: original,
            replacement_token: None,
        });
    }

    match evaluative {
        Some(ev) => Err(Error::AntonymMissing {
            word: u.tokens[ev.index].clone(),
        }),
        None => Err(Error::NoReversalTarget),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{tokenize, DictionaryTagger};

    const SENTI: &str = "\
v\t1\t0\t0.75\thate#1\tg
v\t2\t0.625\t0\tlove#1\tg
a\t3\t0\t0.8\tawful#1\tg
a\t4\t0\t0.6\tgross#1\tg
a\t5\t0\t0.125\tburnt#1\tg
n\t6\t0\t0\tpopcorn#1\tg
n\t7\t0\t0\tsky#1\tg
a\t8\t0\t0\tblue#1\tg
a\t9\t0.5\t0\tfun#1\tg
a\t10\t0\t0.5\tdreadful#1\tg
";
    const ANT: &str = "\
hate\tv\tlove\t1
awful\ta\twonderful\t1
gross\ta\tlovely\t1
";

    fn setup() -> (SentimentLexicon, AntonymLexicon, DictionaryTagger) {
        let s = SentimentLexicon::parse(SENTI, "s").unwrap();
        let a = AntonymLexicon::parse(ANT, "a").unwrap();
        let t = DictionaryTagger::from_lexicons(&s, &a);
        (s, a, t)
    }

    #[test]
    fn picks_strongest_negative_word() {
        let (s, _, t) = setup();
        let u = tokenize("The awful burnt popcorn is gross.", &t).unwrap();
        let ev = find_evaluative_word(&u, &s, DEFAULT_TAU).unwrap();
        assert_eq!(u.tokens[ev.index], "awful");
        let u = tokenize("The sky is blue.", &t).unwrap();
        assert!(find_evaluative_word(&u, &s, DEFAULT_TAU).is_none());
    }

    #[test]
    fn ties_go_leftmost() {
        let s = SentimentLexicon::parse("a\t1\t0\t0.5\tbad#1\tg\na\t2\t0\t0.5\tsad#1\tg\n", "s")
            .unwrap();
        let t = DictionaryTagger::from_lexicons(&s, &AntonymLexicon::default());
        let u = tokenize("sad and bad", &t).unwrap();
        assert_eq!(find_evaluative_word(&u, &s, 0.3).unwrap().index, 0);
    }

    #[test]
    fn antonym_swap() {
        let (s, a, t) = setup();
        let u = tokenize("I hate popcorn.", &t).unwrap();
        let r = reverse_valence(&u, &s, &a, DEFAULT_TAU).unwrap();
        assert_eq!(r.strategy, Strategy::AntonymSwap);
        assert_eq!(r.reversed.text(), "I love popcorn.");
        assert_eq!(r.edit_index, 1);
        assert_eq!(r.replacement_token.as_deref(), Some("love"));
    }

    #[test]
    fn swap_keeps_inflection_and_case() {
        let (s, a, t) = setup();
        let u = tokenize("Awful popcorn.", &t).unwrap();
        assert_eq!(
            reverse_valence(&u, &s, &a, 0.3).unwrap().reversed.tokens[0],
            "Wonderful"
        );
        let u = tokenize("I hated popcorn.", &t).unwrap();
        assert_eq!(
            reverse_valence(&u, &s, &a, 0.3).unwrap().reversed.tokens[1],
            "loved"
        );
    }

    #[test]
    fn negation_removal() {
        let (s, a, t) = setup();
        let u = tokenize("It is not fun.", &t).unwrap();
        let r = reverse_valence(&u, &s, &a, DEFAULT_TAU).unwrap();
        assert_eq!(r.strategy, Strategy::NegationRemoval);
        assert_eq!(r.reversed.text(), "It is fun.");
        assert_eq!(r.replacement_token, None);

        let u = tokenize("It isn't fun.", &t).unwrap();
        let r = reverse_valence(&u, &s, &a, DEFAULT_TAU).unwrap();
        assert_eq!(r.reversed.tokens, ["It", "is", "fun", "."]);

        let u = tokenize("I can't sleep.", &t).unwrap();
        assert_eq!(
            reverse_valence(&u, &s, &a, 0.3).unwrap().reversed.tokens[1],
            "can"
        );
    }

    #[test]
    fn only_leftmost_negation_is_removed() {
        let (s, a, t) = setup();
        let u = tokenize("It is not fun and not blue.", &t).unwrap();
        let r = reverse_valence(&u, &s, &a, DEFAULT_TAU).unwrap();
        assert_eq!(r.reversed.text(), "It is fun and not blue.");
    }

    #[test]
    fn antonym_swap_wins_over_negation() {
        let (s, a, t) = setup();
        let u = tokenize("I do not hate popcorn.", &t).unwrap();
        let r = reverse_valence(&u, &s, &a, DEFAULT_TAU).unwrap();
        assert_eq!(r.strategy, Strategy::AntonymSwap);
        assert!(r.reversed.tokens.iter().any(|t| t == "not"));
    }

    #[test]
    fn error_paths() {
        let (s, a, t) = setup();
        let u = tokenize("The sky is blue.", &t).unwrap();
        assert!(matches!(
            reverse_valence(&u, &s, &a, 0.3),
            Err(Error::NoReversalTarget)
        ));
        let u = tokenize("The dreadful sky.", &t).unwrap();
        assert!(matches!(
            reverse_valence(&u, &s, &a, 0.3),
            Err(Error::AntonymMissing { word }) if word == "dreadful"
        ));
        // a missing antonym still lets the negation branch fire
        let u = tokenize("The dreadful sky is not blue.", &t).unwrap();
        assert_eq!(
            reverse_valence(&u, &s, &a, 0.3).unwrap().strategy,
            Strategy::NegationRemoval
        );
    }

    #[test]
    fn symmetric_fixture_round_trip_depends_on_tau() {
        // cruel <-> harsh, both negative; harsh scores 0.5
        let s =
            SentimentLexicon::parse("a\t1\t0\t0.7\tcruel#1\tg\na\t2\t0\t0.5\tharsh#1\tg\n", "s")
                .unwrap();
        let a = AntonymLexicon::parse("cruel\ta\tharsh\t1\nharsh\ta\tcruel\t1\n", "a").unwrap();
        let t = DictionaryTagger::from_lexicons(&s, &a);
        let u = tokenize("A cruel winter.", &t).unwrap();

        let once = reverse_valence(&u, &s, &a, 0.4).unwrap();
        let twice = reverse_valence(&once.reversed, &s, &a, 0.4).unwrap();
        assert_eq!(twice.reversed.tokens, u.tokens);

        let once = reverse_valence(&u, &s, &a, 0.6).unwrap();
        assert!(matches!(
            reverse_valence(&once.reversed, &s, &a, 0.6),
            Err(Error::NoReversalTarget)
        ));
    }
}
