#![allow(dead_code)]

pub mod gen;
pub mod oracle;

use std::path::PathBuf;
use std::sync::Arc;

use sarcgen::commonsense::FixtureCauses;
use sarcgen::grammar::FixtureGec;
use sarcgen::ranking::FixtureNli;
use sarcgen::{Backends, ResourcePaths, Resources};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn resource_paths() -> ResourcePaths {
    ResourcePaths {
        sentiment: data("sentiment_lexicon.tsv"),
        antonyms: data("antonyms.tsv"),
        stopwords: data("stopwords.txt"),
        corpus: Some(data("corpus.txt")),
        fillers: Some(data("fillers.txt")),
        index_cache: None,
    }
}

pub fn resources() -> Resources {
    Resources::load(&resource_paths()).expect("fixture resources load")
}

/// Fixture causes and NLI, identity GEC.
pub fn fixture_backends() -> Backends {
    Backends {
        causes: Some(Arc::new(
            FixtureCauses::load(data("causes_fixture.json")).unwrap(),
        )),
        nli: Some(Arc::new(FixtureNli::load(data("nli_fixture.tsv")).unwrap())),
        gec: None,
    }
}

pub fn fixture_gec() -> FixtureGec {
    FixtureGec::load(data("gec_fixture.tsv")).unwrap()
}
