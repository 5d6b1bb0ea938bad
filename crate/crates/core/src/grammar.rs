//! Point-of-view harmonization for retrieved contexts and the grammatical
//! error correction (GEC) backend contract.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{is_punct, Pos, Utterance, PRONOUNS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Person {
    First,
    Second,
    Third,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PronounProfile {
    pub person: Person,
    pub pronouns: Vec<String>,
}

/// Subject and possessive forms a context is rewritten to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Target {
    person: Person,
    subject: &'static str,
    possessive: &'static str,
}

fn person_of(pronoun: &str) -> Person {
    match pronoun {
        "i" | "me" | "my" | "mine" | "myself" | "we" | "us" | "our" | "ours" | "ourselves" => {
            Person::First
        }
        "you" | "your" | "yours" | "yourself" | "yourselves" => Person::Second,
        _ if PRONOUNS.contains(&pronoun) => Person::Third,
        _ => Person::None,
    }
}

fn target_for(profile: &PronounProfile) -> Target {
    let first = profile.pronouns.first().map(String::as_str).unwrap_or("i");
    let (subject, possessive) = match first {
        "we" | "us" | "our" | "ours" | "ourselves" => ("we", "our"),
        "you" | "your" | "yours" | "yourself" | "yourselves" => ("you", "your"),
        "he" | "him" | "his" | "himself" => ("he", "his"),
        "she" | "her" | "hers" | "herself" => ("she", "her"),
        "it" | "its" | "itself" => ("it", "its"),
        "they" | "them" | "their" | "theirs" | "themselves" => ("they", "their"),
        _ => ("i", "my"),
    };
    Target {
        person: if profile.person == Person::None {
            Person::First
        } else {
            profile.person
        },
        subject,
        possessive,
    }
}

/// Pronouns of `u` in order; the first one decides the person.
pub fn pronoun_profile(u: &Utterance) -> PronounProfile {
    let pronouns: Vec<String> = u
        .tokens
        .iter()
        .map(|t| t.to_lowercase())
        .filter(|t| PRONOUNS.contains(&t.as_str()))
        .collect();
    let person = pronouns.first().map_or(Person::None, |p| person_of(p));
    PronounProfile { person, pronouns }
}

const SUBJECTS: &[&str] = &["i", "we", "you", "he", "she", "they"];
const POSSESSIVES: &[&str] = &["my", "our", "your", "his", "her", "their"];

// "her" is read as possessive only before something noun-like
const NOT_AFTER_POSSESSIVE: &[&str] = &[
    "to", "and", "or", "but", "in", "on", "at", "for", "with", "from", "of", "the", "a", "an",
    "that", "this", "as", "if", "so", "because", "when", "while", "again", "too", "up", "down",
    "out", "off", "away", "back", "about",
];

fn looks_possessive(next: Option<(&String, &Pos)>) -> bool {
    match next {
        Some((tok, tag)) => {
            if is_punct(tok) {
                return false;
            }
            match tag {
                Pos::Noun | Pos::Adj => true,
                Pos::Other => !NOT_AFTER_POSSESSIVE.contains(&tok.to_lowercase().as_str()),
                _ => false,
            }
        }
        None => false,
    }
}

fn agree(verb: &str, subject: &str) -> Option<&'static str> {
    let sing3 = matches!(subject, "he" | "she" | "it");
    let first = subject == "i";
    Some(match verb {
        "am" | "is" | "are" => {
            if first {
                "am"
            } else if sing3 {
                "is"
            } else {
                "are"
            }
        }
        "was" | "were" => {
            if first || sing3 {
                "was"
            } else {
                "were"
            }
        }
        "has" | "have" => {
            if sing3 {
                "has"
            } else {
                "have"
            }
        }
        "does" | "do" => {
            if sing3 {
                "does"
            } else {
                "do"
            }
        }
        "isn't" | "aren't" => {
            if first {
                return None;
            } else if sing3 {
                "isn't"
            } else {
                "aren't"
            }
        }
        "wasn't" | "weren't" => {
            if first || sing3 {
                "wasn't"
            } else {
                "weren't"
            }
        }
        "hasn't" | "haven't" => {
            if sing3 {
                "hasn't"
            } else {
                "haven't"
            }
        }
        "doesn't" | "don't" => {
            if sing3 {
                "doesn't"
            } else {
                "don't"
            }
        }
        _ => return None,
    })
}

fn is_agreement_verb(tok: &str) -> bool {
    agree(&tok.to_lowercase(), "they").is_some()
}

fn cased_like(template: &str, word: &str) -> String {
    if word == "i" {
        return "I".into();
    }
    if template.chars().next().is_some_and(char::is_uppercase) {
        let mut c = word.chars();
        c.next()
            .map(|f| f.to_uppercase().chain(c).collect())
            .unwrap_or_default()
    } else {
        word.to_string()
    }
}

fn reinflect(tokens: &mut [String], at: usize, subject: &str) {
    if let Some(next) = tokens.get(at + 1) {
        if let Some(form) = agree(&next.to_lowercase(), subject) {
            tokens[at + 1] = cased_like(next, form);
        }
    }
}

/// Rewrites subject/possessive pronouns (and capitalized subject names)
/// whose person disagrees with the input, re-inflecting a following
/// be/have/do. Token count never changes.
pub fn harmonize_pronouns(context: &Utterance, input: &PronounProfile) -> Utterance {
    let target = target_for(input);
    let rewrite_all = input.person == Person::None;
    let mut tokens = context.tokens.clone();
    let mut tags = context.tags.clone();

    let mut i = 0;
    while i < tokens.len() {
        let lower = tokens[i].to_lowercase();
        let person = person_of(&lower);
        let mismatched = if rewrite_all {
            lower != "i" && lower != "my"
        } else {
            person != target.person
        };

        if SUBJECTS.contains(&lower.as_str()) && mismatched {
            tokens[i] = cased_like(&tokens[i], target.subject);
            reinflect(&mut tokens, i, target.subject);
            i += 1;
            continue;
        }
        if POSSESSIVES.contains(&lower.as_str())
            && mismatched
            && (lower != "her" || looks_possessive(tokens.get(i + 1).zip(tags.get(i + 1))))
        {
            tokens[i] = cased_like(&tokens[i], target.possessive);
            i += 1;
            continue;
        }

        // a capitalized non-initial name directly before be/have/do acts as a subject
        let is_name = i > 0
            && matches!(tags[i], Pos::Noun | Pos::Other)
            && person == Person::None
            && !is_punct(&tokens[i])
            && tokens[i].chars().all(char::is_alphabetic)
            && tokens[i].chars().next().is_some_and(char::is_uppercase)
            && tokens.get(i + 1).is_some_and(|n| is_agreement_verb(n));
        if is_name && target.person != Person::Third {
            tokens[i] = cased_like(&tokens[i], target.subject);
            tags[i] = Pos::Pron;
            reinflect(&mut tokens, i, target.subject);
            i += 1;
            continue;
        }
        i += 1;
    }

    if tokens == context.tokens {
        return context.clone();
    }
    Utterance::from_tokens(tokens, tags).expect("token count unchanged")
}

pub trait GecBackend: Send + Sync {
    fn correct(&self, sentence: &str) -> Result<String>;
}

/// Runs the configured GEC backend, or returns the sentence unchanged when none is set.
pub fn correct_grammar(client: Option<&dyn GecBackend>, sentence: &str) -> Result<String> {
    if sentence.trim().is_empty() {
        return Err(Error::EmptyInput);
    }
    match client {
        Some(c) => c.correct(sentence),
        None => Ok(sentence.to_string()),
    }
}

/// Offline GEC: TSV of `sentence<TAB>corrected`; unknown sentences pass through.
#[derive(Debug, Clone, Default)]
pub struct FixtureGec {
    map: BTreeMap<String, String>,
}

impl FixtureGec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (src, dst) = line.split_once('\t').ok_or_else(|| {
                Error::Config(format!("gec fixture line {}: expected two columns", i + 1))
            })?;
            map.insert(src.to_string(), dst.to_string());
        }
        Ok(FixtureGec { map })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

impl GecBackend for FixtureGec {
    fn correct(&self, sentence: &str) -> Result<String> {
        Ok(self
            .map
            .get(sentence)
            .cloned()
            .unwrap_or_else(|| sentence.to_string()))
    }
}
