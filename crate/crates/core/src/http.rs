//! JSON-over-HTTP clients for the causes, NLI and GEC backends.
//!
//! | endpoint       | request                               | response |
//! |----------------|---------------------------------------|----------|
//! | `POST /v1/causes` | `{"terms": [..], "k": n}`          | `{"candidates": [{"phrase", "score"}..]}` |
//! | `POST /v1/nli`    | `{"premise": s, "hypothesis": s}`  | `{"entailment", "neutral", "contradiction"}` |
//! | `POST /v1/gec`    | `{"sentence": s}`                  | `{"corrected": s}` |
//!
//! Any status other than 200, or a transport failure, is
//! `BackendUnavailable`. A 200 whose body does not fit the schema is
//! `BackendMalformed`.

use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::commonsense::{CausesBackend, ConceptCandidate};
use crate::error::{Error, Result};
use crate::grammar::GecBackend;
use crate::ranking::{NliBackend, NliScores};

pub const CAUSES_PATH: &str = "/v1/causes";
pub const NLI_PATH: &str = "/v1/nli";
pub const GEC_PATH: &str = "/v1/gec";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausesRequest {
    pub terms: Vec<String>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausesResponse {
    pub candidates: Vec<ConceptCandidate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliRequest {
    pub premise: String,
    pub hypothesis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GecRequest {
    pub sentence: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GecResponse {
    pub corrected: String,
}

pub fn decode_causes_body(body: &str) -> Result<Vec<ConceptCandidate>> {
    let r: CausesResponse = decode(body)?;
    if let Some(c) = r
        .candidates
        .iter()
        .find(|c| c.phrase.trim().is_empty() || !c.score.is_finite())
    {
        return Err(Error::BackendMalformed(format!("invalid candidate {c:?}")));
    }
    Ok(r.candidates)
}

pub fn decode_nli_body(body: &str) -> Result<NliScores> {
    let s: NliScores = decode(body)?;
    s.validate()?;
    Ok(s)
}

pub fn decode_gec_body(body: &str) -> Result<String> {
    let r: GecResponse = decode(body)?;
    Ok(r.corrected)
}

fn decode<T: DeserializeOwned>(body: &str) -> Result<T> {
    let malformed = |e: serde_json::Error| Error::BackendMalformed(e.to_string());
    let value: serde_json::Value = serde_json::from_str(body).map_err(malformed)?;
    // serde would otherwise accept a positional array for a struct
    if !value.is_object() {
        return Err(Error::BackendMalformed(
            "response body is not a JSON object".into(),
        ));
    }
    serde_json::from_value(value).map_err(malformed)
}

/// Shared transport; cheap to clone and safe to use from many threads.
#[derive(Debug, Clone)]
pub struct HttpTransport {
    agent: ureq::Agent,
    base: String,
}

impl HttpTransport {
    pub fn new(base_url: &str) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout_connect(Duration::from_secs(10))
            .timeout(Duration::from_secs(60))
            .build();
        HttpTransport {
            agent,
            base: base_url.trim_end_matches('/').to_string(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn post<B: Serialize>(&self, path: &str, body: &B) -> Result<String> {
        let url = format!("{}{}", self.base, path);
        match self.agent.post(&url).send_json(body) {
            Ok(resp) if resp.status() == 200 => resp
                .into_string()
                .map_err(|e| Error::BackendUnavailable(format!("{url}: {e}"))),
            Ok(resp) => Err(Error::BackendUnavailable(format!(
                "{url}: HTTP {}",
                resp.status()
            ))),
            Err(ureq::Error::Status(code, _)) => {
                Err(Error::BackendUnavailable(format!("{url}: HTTP {code}")))
            }
            Err(ureq::Error::Transport(t)) => Err(Error::BackendUnavailable(format!("{url}: {t}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HttpCauses(HttpTransport);

impl HttpCauses {
    pub fn new(base_url: &str) -> Self {
        HttpCauses(HttpTransport::new(base_url))
    }
}

impl CausesBackend for HttpCauses {
    fn causes(&self, terms: &[String], k: usize) -> Result<Vec<ConceptCandidate>> {
        let body = self.0.post(
            CAUSES_PATH,
            &CausesRequest {
                terms: terms.to_vec(),
                k,
            },
        )?;
        decode_causes_body(&body)
    }
}

#[derive(Debug, Clone)]
pub struct HttpNli(HttpTransport);

impl HttpNli {
    pub fn new(base_url: &str) -> Self {
        HttpNli(HttpTransport::new(base_url))
    }
}

impl NliBackend for HttpNli {
    fn scores(&self, premise: &str, hypothesis: &str) -> Result<NliScores> {
        let body = self.0.post(
            NLI_PATH,
            &NliRequest {
                premise: premise.into(),
                hypothesis: hypothesis.into(),
            },
        )?;
        decode_nli_body(&body)
    }
}

#[derive(Debug, Clone)]
pub struct HttpGec(HttpTransport);

impl HttpGec {
    pub fn new(base_url: &str) -> Self {
        HttpGec(HttpTransport::new(base_url))
    }
}

impl GecBackend for HttpGec {
    fn correct(&self, sentence: &str) -> Result<String> {
        let body = self.0.post(
            GEC_PATH,
            &GecRequest {
                sentence: sentence.into(),
            },
        )?;
        decode_gec_body(&body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_valid_bodies() {
        let c = decode_causes_body(r#"{"candidates": [{"phrase": "accident", "score": 0.5}]}"#)
            .unwrap();
        assert_eq!(c[0].phrase, "accident");
        let s = decode_nli_body(r#"{"entailment": 0.1, "neutral": 0.2, "contradiction": 0.7}"#)
            .unwrap();
        assert_eq!(s.contradiction, 0.7);
        assert_eq!(
            decode_gec_body(r#"{"corrected": "Fine."}"#).unwrap(),
            "Fine."
        );
    }

    #[test]
    fn schema_violations_are_malformed() {
        for body in [
            "",
            "not json",
            r#"{"candidates": "x"}"#,
            r#"{"candidates": [{"phrase": "", "score": 1}]}"#,
            r#"{"candidates": [{"phrase": "a"}]}"#,
        ] {
            assert!(
                matches!(decode_causes_body(body), Err(Error::BackendMalformed(_))),
                "{body}"
            );
        }
        assert!(matches!(
            decode_gec_body(r#"{"fixed": "x"}"#),
            Err(Error::BackendMalformed(_))
        ));
        assert!(matches!(
            decode_nli_body(r#"{"entailment": 0.7, "neutral": 0.2, "contradiction": 0.5}"#),
            Err(Error::BackendMalformed(_))
        ));
    }

    #[test]
    fn unreachable_server_is_unavailable() {
        // port 9 (discard) on localhost is essentially never served
        let nli = HttpNli::new("http://127.0.0.1:9");
        assert!(matches!(
            nli.scores("p", "h"),
            Err(Error::BackendUnavailable(_))
        ));
    }
}
