//! A small in-process HTTP server speaking the backend wire protocol,
//! backed by any local [`CausesBackend`], [`NliBackend`] or [`GecBackend`].
//! Used for offline integration tests and local development.

use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use serde::Serialize;
use tiny_http::{Header, Method, Request, Response, Server};

use crate::commonsense::CausesBackend;
use crate::error::{Error, Result};
use crate::grammar::GecBackend;
use crate::http::{
    CausesRequest, CausesResponse, GecRequest, GecResponse, NliRequest, CAUSES_PATH, GEC_PATH,
    NLI_PATH,
};
use crate::ranking::NliBackend;

#[derive(Clone, Default)]
pub struct StubBackends {
    pub causes: Option<Arc<dyn CausesBackend>>,
    pub nli: Option<Arc<dyn NliBackend>>,
    pub gec: Option<Arc<dyn GecBackend>>,
}

pub struct StubServer {
    server: Arc<Server>,
    addr: SocketAddr,
    worker: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Binds `addr` (use port 0 for an ephemeral port) and starts serving.
    pub fn start(addr: &str, backends: StubBackends) -> Result<Self> {
        let server =
            Server::http(addr).map_err(|e| Error::Config(format!("cannot bind {addr}: {e}")))?;
        let addr = server
            .server_addr()
            .to_ip()
            .ok_or_else(|| Error::Config("stub server is not bound to an IP address".into()))?;
        let server = Arc::new(server);
        let backends = Arc::new(backends);
        let worker = {
            let server = Arc::clone(&server);
            std::thread::spawn(move || {
                for request in server.incoming_requests() {
                    let backends = Arc::clone(&backends);
                    std::thread::spawn(move || handle(request, &backends));
                }
            })
        };
        Ok(StubServer {
            server,
            addr,
            worker: Some(worker),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Blocks until the server stops.
    pub fn wait(mut self) {
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(w) = self.worker.take() {
            let _ = w.join();
        }
    }
}

fn json_response<T: Serialize>(status: u16, body: &T) -> Response<std::io::Cursor<Vec<u8>>> {
    let bytes = serde_json::to_vec(body).expect("serializable");
    Response::from_data(bytes)
        .with_status_code(status)
        .with_header(Header::from_bytes("Content-Type", "application/json").unwrap())
}

fn error_body(status: u16, message: String) -> Response<std::io::Cursor<Vec<u8>>> {
    json_response(status, &serde_json::json!({ "error": message }))
}

fn dispatch(path: &str, body: &str, backends: &StubBackends) -> Response<std::io::Cursor<Vec<u8>>> {
    macro_rules! parse {
        ($t:ty) => {
            match serde_json::from_str::<$t>(body) {
                Ok(v) => v,
                Err(e) => return error_body(400, e.to_string()),
            }
        };
    }
    let failed = |e: Error| error_body(503, e.to_string());

    match path {
        CAUSES_PATH => {
            let Some(b) = &backends.causes else {
                return error_body(404, "no causes backend".into());
            };
            let req = parse!(CausesRequest);
            match b.causes(&req.terms, req.k) {
                Ok(mut candidates) => {
                    candidates.sort_by(|a, b| b.score.total_cmp(&a.score));
                    json_response(200, &CausesResponse { candidates })
                }
                Err(e) => failed(e),
            }
        }
        NLI_PATH => {
            let Some(b) = &backends.nli else {
                return error_body(404, "no nli backend".into());
            };
            let req = parse!(NliRequest);
            match b.scores(&req.premise, &req.hypothesis) {
                Ok(s) => json_response(200, &s),
                Err(e) => failed(e),
            }
        }
        GEC_PATH => {
            let Some(b) = &backends.gec else {
                return error_body(404, "no gec backend".into());
            };
            let req = parse!(GecRequest);
            match b.correct(&req.sentence) {
                Ok(corrected) => json_response(200, &GecResponse { corrected }),
                Err(e) => failed(e),
            }
        }
        other => error_body(404, format!("unknown endpoint {other}")),
    }
}

fn handle(mut request: Request, backends: &StubBackends) {
    let response = if *request.method() != Method::Post {
        error_body(405, "only POST is supported".into())
    } else {
        let mut body = String::new();
        match request.as_reader().read_to_string(&mut body) {
            Ok(_) => {
                let path = request.url().split('?').next().unwrap_or("").to_string();
                dispatch(&path, &body, backends)
            }
            Err(e) => error_body(400, e.to_string()),
        }
    };
    let _ = request.respond(response);
}
