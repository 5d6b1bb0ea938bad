use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("{path}:{line}: {message}")]
    LexiconParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: {message}")]
    RatingsParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: corpus is not valid UTF-8")]
    CorpusParse { path: PathBuf, line: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),

    #[error("malformed backend response: {0}")]
    BackendMalformed(String),

    #[error("no evaluative word or negation to reverse")]
    NoReversalTarget,

    #[error("evaluative word {word:?} has no antonym and no negation is present")]
    AntonymMissing { word: String },

    #[error("no commonsense concept survived selection")]
    NoConcept,

    #[error("no context sentence retrieved")]
    NoContext,

    #[error("item sets differ: {0}")]
    ItemMismatch(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Clone for Error {
    fn clone(&self) -> Self {
        match self {
            Error::EmptyInput => Error::EmptyInput,
            Error::LexiconParse {
                path,
                line,
                message,
            } => Error::LexiconParse {
                path: path.clone(),
                line: *line,
                message: message.clone(),
            },
            Error::RatingsParse {
                path,
                line,
                message,
            } => Error::RatingsParse {
                path: path.clone(),
                line: *line,
                message: message.clone(),
            },
            Error::CorpusParse { path, line } => Error::CorpusParse {
                path: path.clone(),
                line: *line,
            },
            // io::Error is not Clone; keep its kind and message
            Error::Io { path, source } => Error::Io {
                path: path.clone(),
                source: std::io::Error::new(source.kind(), source.to_string()),
            },
            Error::BackendUnavailable(m) => Error::BackendUnavailable(m.clone()),
            Error::BackendMalformed(m) => Error::BackendMalformed(m.clone()),
            Error::NoReversalTarget => Error::NoReversalTarget,
            Error::AntonymMissing { word } => Error::AntonymMissing { word: word.clone() },
            Error::NoConcept => Error::NoConcept,
            Error::NoContext => Error::NoContext,
            Error::ItemMismatch(m) => Error::ItemMismatch(m.clone()),
            Error::DegenerateInput(m) => Error::DegenerateInput(m.clone()),
            Error::Config(m) => Error::Config(m.clone()),
        }
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable name, used in traces and CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "EmptyInput",
            Error::LexiconParse { .. } => "LexiconParseError",
            Error::RatingsParse { .. } => "RatingsParseError",
            Error::CorpusParse { .. } => "CorpusParseError",
            Error::Io { .. } => "Io",
            Error::BackendUnavailable(_) => "BackendUnavailable",
            Error::BackendMalformed(_) => "BackendMalformed",
            Error::NoReversalTarget => "NoReversalTarget",
            Error::AntonymMissing { .. } => "AntonymMissing",
            Error::NoConcept => "NoConcept",
            Error::NoContext => "NoContext",
            Error::ItemMismatch(_) => "ItemMismatch",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::Config(_) => "ConfigError",
        }
    }
}
