//! End-to-end generation for the four systems.
//!
//! * `FM`: reversal, concept, retrieval, editing, contradiction ranking,
//!   then reversed sentence followed by the top context.
//! * `RV`: reversal only.
//! * `NORV`: the FM context branch, ranked against the original input;
//!   emits the context alone.
//! * `NSI`: FM with a seeded uniform choice in place of ranking.
//!
//! Every run produces a [`Trace`]; the JSON layout is described by
//! `schema/trace.schema.json`.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commonsense::{
    query_causes, select_concept, CausesBackend, ConceptCandidate, ConceptPhrase, FillerList,
    DEFAULT_K,
};
use crate::error::{Error, Result};
use crate::grammar::{
    correct_grammar, harmonize_pronouns, pronoun_profile, GecBackend, PronounProfile,
};
use crate::http::{HttpCauses, HttpGec, HttpNli};
use crate::lexicon::{AntonymLexicon, SentimentLexicon};
use crate::ranking::{rank_by_incongruity, HeuristicNli, NliBackend, RankedCandidate};
use crate::retrieval::{
    build_index, retrieve_contexts, CorpusIndex, IndexCache, RetrievedContext, DEFAULT_MAX_OUT,
};
use crate::reversal::{reverse_valence, ReversalResult, DEFAULT_TAU};
use crate::rng::SplitMix64;
use crate::text::{content_terms, tokenize, DictionaryTagger, StopwordSet, Utterance};

/// Inputs longer than this many words get a warning in the trace.
pub const RECOMMENDED_MAX_WORDS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum System {
    #[serde(rename = "FM")]
    Fm,
    #[serde(rename = "RV")]
    Rv,
    #[serde(rename = "NORV")]
    NoRv,
    #[serde(rename = "NSI")]
    Nsi,
}

impl System {
    pub const ALL: [System; 4] = [System::Fm, System::Rv, System::NoRv, System::Nsi];

    pub fn as_str(self) -> &'static str {
        match self {
            System::Fm => "FM",
            System::Rv => "RV",
            System::NoRv => "NORV",
            System::Nsi => "NSI",
        }
    }

    pub fn reverses(self) -> bool {
        self != System::NoRv
    }

    pub fn retrieves(self) -> bool {
        self != System::Rv
    }

    pub fn ranks(self) -> bool {
        matches!(self, System::Fm | System::NoRv)
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "FM" => Ok(System::Fm),
            "RV" => Ok(System::Rv),
            "NORV" => Ok(System::NoRv),
            "NSI" => Ok(System::Nsi),
            _ => Err(Error::Config(format!(
                "unknown system {s:?} (expected FM, RV, NoRV or NSI)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub system: System,
    pub tau: f64,
    pub k: usize,
    pub max_out: usize,
    pub seed: Option<u64>,
    pub causes_url: Option<String>,
    pub nli_url: Option<String>,
    pub gec_url: Option<String>,
    pub nli_heuristic: bool,
}

impl SystemConfig {
    pub fn new(system: System) -> Self {
        SystemConfig {
            system,
            tau: DEFAULT_TAU,
            k: DEFAULT_K,
            max_out: DEFAULT_MAX_OUT,
            seed: None,
            causes_url: None,
            nli_url: None,
            gec_url: None,
            nli_heuristic: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn for_system(&self, system: System) -> Self {
        SystemConfig {
            system,
            ..self.clone()
        }
    }

    /// Checks the parameters that do not depend on which backends are wired.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Config(format!(
                "tau must be in [0, 1], got {}",
                self.tau
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if self.max_out == 0 {
            return Err(Error::Config("max_out must be positive".into()));
        }
        if self.system == System::Nsi && self.seed.is_none() {
            return Err(Error::Config("NSI requires a seed".into()));
        }
        Ok(())
    }
}

/// File locations for [`Resources::load`].
#[derive(Debug, Clone, Default)]
pub struct ResourcePaths {
    pub sentiment: PathBuf,
    pub antonyms: PathBuf,
    pub stopwords: PathBuf,
    pub corpus: Option<PathBuf>,
    pub fillers: Option<PathBuf>,
    pub index_cache: Option<PathBuf>,
}

/// Immutable lexical resources shared by every run.
#[derive(Debug, Clone)]
pub struct Resources {
    pub sentiment: Arc<SentimentLexicon>,
    pub antonyms: Arc<AntonymLexicon>,
    pub stopwords: Arc<StopwordSet>,
    pub fillers: FillerList,
    pub index: Arc<CorpusIndex>,
    pub tagger: DictionaryTagger,
}

impl Resources {
    pub fn new(
        sentiment: SentimentLexicon,
        antonyms: AntonymLexicon,
        stopwords: StopwordSet,
        index: CorpusIndex,
    ) -> Self {
        let tagger = DictionaryTagger::from_lexicons(&sentiment, &antonyms);
        Resources {
            sentiment: Arc::new(sentiment),
            antonyms: Arc::new(antonyms),
            stopwords: Arc::new(stopwords),
            fillers: FillerList::default(),
            index: Arc::new(index),
            tagger,
        }
    }

    /// Loads every file; without a corpus the index is empty.
    pub fn load(paths: &ResourcePaths) -> Result<Self> {
        let sentiment = SentimentLexicon::load(&paths.sentiment)?;
        let antonyms = AntonymLexicon::load(&paths.antonyms)?;
        let stopwords = StopwordSet::load(&paths.stopwords)?;
        let index = match (&paths.corpus, &paths.index_cache) {
            (Some(corpus), Some(cache)) => IndexCache::new(cache).load_or_build(corpus)?.0,
            (Some(corpus), None) => build_index(corpus)?,
            (None, _) => CorpusIndex::default(),
        };
        let mut res = Resources::new(sentiment, antonyms, stopwords, index);
        if let Some(f) = &paths.fillers {
            res.fillers = FillerList::load(f)?;
        }
        Ok(res)
    }
}

/// Model backends; any may be absent.
#[derive(Clone, Default)]
pub struct Backends {
    pub causes: Option<Arc<dyn CausesBackend>>,
    pub nli: Option<Arc<dyn NliBackend>>,
    pub gec: Option<Arc<dyn GecBackend>>,
}

impl Backends {
    /// HTTP clients for the configured endpoints, plus the heuristic NLI
    /// scorer when enabled and no NLI endpoint is given.
    pub fn from_config(cfg: &SystemConfig, res: &Resources) -> Self {
        let nli: Option<Arc<dyn NliBackend>> = match (&cfg.nli_url, cfg.nli_heuristic) {
            (Some(url), _) => Some(Arc::new(HttpNli::new(url))),
            (None, true) => Some(Arc::new(HeuristicNli::new(
                Arc::clone(&res.antonyms),
                Arc::clone(&res.stopwords),
            ))),
            (None, false) => None,
        };
        Backends {
            causes: cfg
                .causes_url
                .as_deref()
                .map(|u| Arc::new(HttpCauses::new(u)) as Arc<dyn CausesBackend>),
            nli,
            gec: cfg
                .gec_url
                .as_deref()
                .map(|u| Arc::new(HttpGec::new(u)) as Arc<dyn GecBackend>),
        }
    }

    /// Fails with a configuration error when `system` lacks a backend it needs.
    pub fn check(&self, system: System) -> Result<()> {
        if system.retrieves() && self.causes.is_none() {
            return Err(Error::Config(format!("{system} needs a causes backend")));
        }
        if system.ranks() && self.nli.is_none() {
            return Err(Error::Config(format!(
                "{system} needs an NLI backend or the heuristic scorer"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Tokenize,
    Reversal,
    ContentTerms,
    Causes,
    Concept,
    Retrieval,
    Grammar,
    Ranking,
    RandomChoice,
    Output,
}

/// One retrieved context through pronoun harmonization and GEC.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEdit {
    pub source_id: usize,
    pub retrieved: String,
    pub harmonized: String,
    pub corrected: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceError {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub input: String,
    pub system: System,
    pub stages: Vec<Stage>,
    pub warnings: Vec<String>,
    pub reversal: Option<ReversalResult>,
    pub content_terms: Option<Vec<String>>,
    pub candidates: Option<Vec<ConceptCandidate>>,
    pub concept: Option<ConceptPhrase>,
    pub contexts: Option<Vec<RetrievedContext>>,
    pub edits: Option<Vec<ContextEdit>>,
    pub ranked: Option<Vec<RankedCandidate>>,
    pub random_index: Option<usize>,
    pub chosen: Option<RetrievedContext>,
    pub output: Option<String>,
    pub error: Option<TraceError>,
}

impl Trace {
    fn new(input: &str, system: System) -> Self {
        Trace {
            input: input.to_string(),
            system,
            stages: Vec::new(),
            warnings: Vec::new(),
            reversal: None,
            content_terms: None,
            candidates: None,
            concept: None,
            contexts: None,
            edits: None,
            ranked: None,
            random_index: None,
            chosen: None,
            output: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SarcasmOutput {
    pub output: String,
    pub system: System,
    pub trace: Trace,
}

/// A failed run with the trace recorded up to and including the failing stage.
#[derive(Debug, Clone)]
pub struct GenerateError {
    pub error: Error,
    pub trace: Box<Trace>,
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.trace.system, self.error)
    }
}

impl std::error::Error for GenerateError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Stage results computed at most once per input, shared between systems.
struct Shared<'a> {
    input: &'a str,
    res: &'a Resources,
    backends: &'a Backends,
    k: usize,
    tau: f64,
    max_out: usize,
    utterance: OnceCell<Result<Utterance>>,
    reversal: OnceCell<Result<ReversalResult>>,
    terms: OnceCell<Vec<String>>,
    candidates: OnceCell<Result<Vec<ConceptCandidate>>>,
    concept: OnceCell<Result<ConceptPhrase>>,
    contexts: OnceCell<Result<Vec<RetrievedContext>>>,
    edits: OnceCell<Result<Vec<ContextEdit>>>,
    ranked_vs_reversed: OnceCell<Result<Vec<RankedCandidate>>>,
    ranked_vs_input: OnceCell<Result<Vec<RankedCandidate>>>,
}

impl<'a> Shared<'a> {
    fn new(input: &'a str, cfg: &SystemConfig, res: &'a Resources, backends: &'a Backends) -> Self {
        Shared {
            input,
            res,
            backends,
            k: cfg.k,
            tau: cfg.tau,
            max_out: cfg.max_out,
            utterance: OnceCell::new(),
            reversal: OnceCell::new(),
            terms: OnceCell::new(),
            candidates: OnceCell::new(),
            concept: OnceCell::new(),
            contexts: OnceCell::new(),
            edits: OnceCell::new(),
            ranked_vs_reversed: OnceCell::new(),
            ranked_vs_input: OnceCell::new(),
        }
    }

    fn utterance(&self) -> Result<&Utterance> {
        self.utterance
            .get_or_init(|| tokenize(self.input, &self.res.tagger))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn reversal(&self) -> Result<&ReversalResult> {
        let u = self.utterance()?;
        self.reversal
            .get_or_init(|| reverse_valence(u, &self.res.sentiment, &self.res.antonyms, self.tau))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn terms(&self) -> Result<&[String]> {
        let u = self.utterance()?;
        Ok(self
            .terms
            .get_or_init(|| content_terms(u, &self.res.stopwords)))
    }

    fn candidates(&self) -> Result<&[ConceptCandidate]> {
        let terms = self.terms()?;
        self.candidates
            .get_or_init(|| {
                let client = self
                    .backends
                    .causes
                    .as_deref()
                    .ok_or(Error::Config("no causes backend".into()))?;
                query_causes(client, terms, self.k)
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    fn concept(&self) -> Result<&ConceptPhrase> {
        let u = self.utterance()?;
        let cands = self.candidates()?;
        self.concept
            .get_or_init(|| {
                select_concept(
                    cands,
                    u,
                    &self.res.stopwords,
                    &self.res.fillers,
                    &self.res.tagger,
                )
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn contexts(&self) -> Result<&[RetrievedContext]> {
        let u = self.utterance()?;
        let concept = self.concept()?;
        self.contexts
            .get_or_init(|| {
                let found = retrieve_contexts(&self.res.index, concept, u.len(), self.max_out);
                if found.is_empty() {
                    Err(Error::NoContext)
                } else {
                    Ok(found)
                }
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    fn edits(&self) -> Result<&[ContextEdit]> {
        let u = self.utterance()?;
        let contexts = self.contexts()?;
        self.edits
            .get_or_init(|| {
                let profile = pronoun_profile(u);
                contexts
                    .par_iter()
                    .map(|c| edit_context(c, &profile, self.res, self.backends.gec.as_deref()))
                    .collect()
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// Retrieved contexts with their sentences replaced by the edited text.
    fn edited_contexts(&self) -> Result<Vec<RetrievedContext>> {
        let contexts = self.contexts()?;
        let edits = self.edits()?;
        Ok(contexts
            .iter()
            .zip(edits)
            .map(|(c, e)| RetrievedContext {
                sentence: e.corrected.clone(),
                ..c.clone()
            })
            .collect())
    }

    fn ranked(&self, against_input: bool) -> Result<&[RankedCandidate]> {
        let hypothesis = if against_input {
            self.utterance()?.text()
        } else {
            self.reversal()?.reversed.surface.clone()
        };
        let edited = self.edited_contexts()?;
        let cell = if against_input {
            &self.ranked_vs_input
        } else {
            &self.ranked_vs_reversed
        };
        cell.get_or_init(|| {
            let client = self
                .backends
                .nli
                .as_deref()
                .ok_or(Error::Config("no NLI backend".into()))?;
            rank_by_incongruity(client, &edited, &hypothesis)
        })
        .as_deref()
        .map_err(Clone::clone)
    }
}

fn edit_context(
    c: &RetrievedContext,
    profile: &PronounProfile,
    res: &Resources,
    gec: Option<&dyn GecBackend>,
) -> Result<ContextEdit> {
    let utt = tokenize(&c.sentence, &res.tagger)?;
    let harmonized = harmonize_pronouns(&utt, profile).surface;
    let corrected = correct_grammar(gec, &harmonized)?;
    Ok(ContextEdit {
        source_id: c.source_id,
        retrieved: c.sentence.clone(),
        harmonized,
        corrected,
    })
}

/// Records `stage` in the trace, then runs it.
fn stage<T>(trace: &mut Trace, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    trace.stages.push(stage);
    f()
}

fn run(
    system: System,
    seed: Option<u64>,
    shared: &Shared<'_>,
    trace: &mut Trace,
) -> Result<String> {
    let u = stage(trace, Stage::Tokenize, || shared.utterance())?;
    if u.word_count() > RECOMMENDED_MAX_WORDS {
        trace.warnings.push(format!(
            "input has {} words; at most {RECOMMENDED_MAX_WORDS} are recommended",
            u.word_count()
        ));
    }

    let reversed = if system.reverses() {
        let r = stage(trace, Stage::Reversal, || shared.reversal())?;
        trace.reversal = Some(r.clone());
        Some(r.reversed.surface.clone())
    } else {
        None
    };

    if !system.retrieves() {
        trace.stages.push(Stage::Output);
        return Ok(reversed.expect("RV reverses"));
    }

    let terms = stage(trace, Stage::ContentTerms, || shared.terms())?;
    trace.content_terms = Some(terms.to_vec());
    let cands = stage(trace, Stage::Causes, || shared.candidates())?;
    trace.candidates = Some(cands.to_vec());
    let concept = stage(trace, Stage::Concept, || shared.concept())?;
    trace.concept = Some(concept.clone());
    let contexts = stage(trace, Stage::Retrieval, || shared.contexts())?;
    trace.contexts = Some(contexts.to_vec());
    let edits = stage(trace, Stage::Grammar, || shared.edits())?;
    trace.edits = Some(edits.to_vec());

    let chosen = if system.ranks() {
        let ranked = stage(trace, Stage::Ranking, || {
            shared.ranked(system == System::NoRv)
        })?;
        trace.ranked = Some(ranked.to_vec());
        ranked[0].context.clone()
    } else {
        let edited = stage(trace, Stage::RandomChoice, || shared.edited_contexts())?;
        let seed = seed.ok_or(Error::Config("NSI requires a seed".into()))?;
        let i = SplitMix64::new(seed).index(edited.len());
        trace.random_index = Some(i);
        edited[i].clone()
    };
    trace.chosen = Some(chosen.clone());
    trace.stages.push(Stage::Output);

    Ok(match reversed {
        Some(r) => format!("{r} {}", chosen.sentence),
        None => chosen.sentence,
    })
}

fn finish(
    system: System,
    mut trace: Trace,
    result: Result<String>,
) -> std::result::Result<SarcasmOutput, GenerateError> {
    match result {
        Ok(output) => {
            trace.output = Some(output.clone());
            Ok(SarcasmOutput {
                output,
                system,
                trace,
            })
        }
        Err(error) => {
            trace.error = Some(TraceError {
                kind: error.kind().to_string(),
                message: error.to_string(),
            });
            Err(GenerateError {
                error,
                trace: Box::new(trace),
            })
        }
    }
}

fn generate_shared(
    input: &str,
    cfg: &SystemConfig,
    shared: &Shared<'_>,
    backends: &Backends,
) -> std::result::Result<SarcasmOutput, GenerateError> {
    let mut trace = Trace::new(input, cfg.system);
    let result = cfg
        .validate()
        .and_then(|_| backends.check(cfg.system))
        .and_then(|_| run(cfg.system, cfg.seed, shared, &mut trace));
    finish(cfg.system, trace, result)
}

/// Runs one system on one input. Deterministic for fixed resources,
/// backends and configuration; safe to call concurrently.
pub fn generate(
    input: &str,
    cfg: &SystemConfig,
    res: &Resources,
    backends: &Backends,
) -> std::result::Result<SarcasmOutput, GenerateError> {
    let shared = Shared::new(input, cfg, res, backends);
    generate_shared(input, cfg, &shared, backends)
}

/// Runs all four systems, computing each shared stage once. A system that
/// fails (including NSI without a seed) is reported in its own entry.
pub fn run_ablation(
    input: &str,
    base: &SystemConfig,
    res: &Resources,
    backends: &Backends,
) -> BTreeMap<System, std::result::Result<SarcasmOutput, GenerateError>> {
    let shared = Shared::new(input, base, res, backends);
    System::ALL
        .iter()
        .map(|&s| {
            (
                s,
                generate_shared(input, &base.for_system(s), &shared, backends),
            )
        })
        .collect()
}
