//! Sarcasm generation by retrieve-and-edit.
//!
//! A negative literal sentence has its valence reversed, a commonsense
//! consequence of the situation is looked up, a corpus sentence mentioning
//! that consequence is retrieved and edited, and the candidate that most
//! contradicts the reversed sentence is appended to it.
//!
//! Neural components (commonsense inference, NLI, grammar correction) sit
//! behind traits with HTTP clients in [`http`] and offline fixtures next to
//! each trait.

pub mod commonsense;
pub mod error;
pub mod evaluation;
pub mod grammar;
pub mod http;
pub mod lexicon;
pub mod pipeline;
pub mod ranking;
pub mod retrieval;
pub mod reversal;
pub mod rng;
pub mod stub;
pub mod text;

pub use error::{Error, Result};
pub use pipeline::{
    generate, run_ablation, Backends, ResourcePaths, Resources, SarcasmOutput, System,
    SystemConfig, Trace,
};
