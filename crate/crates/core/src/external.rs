//! Optional JSON-over-HTTP services (statement parser, multiple-choice
//! selector). Nothing in the offline pipeline requires them.

use std::collections::BTreeMap;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde_json::Value;
use thiserror::Error;

pub const PARSER_URL_VAR: &str = "REFGROUND_PARSER_URL";
pub const PARSER_KEY_VAR: &str = "REFGROUND_PARSER_KEY";
pub const MCQA_URL_VAR: &str = "REFGROUND_MCQA_URL";
pub const MCQA_KEY_VAR: &str = "REFGROUND_MCQA_KEY";

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum ExternalError {
    #[error("endpoint not configured: set {0}")]
    NotConfigured(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("invalid response: {0}")]
    InvalidResponse(String),
}

pub trait JsonEndpoint: Send + Sync {
    fn post(&self, body: &Value) -> Result<Value, ExternalError>;
}

/// Counting gate bounding concurrent in-flight requests.
struct Gate {
    in_flight: Mutex<usize>,
    freed: Condvar,
    limit: usize,
}

impl Gate {
    fn acquire(&self) -> GatePass<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.limit {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        GatePass(self)
    }
}

struct GatePass<'a>(&'a Gate);

impl Drop for GatePass<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

pub struct HttpEndpoint {
    url: String,
    key: Option<String>,
    client: reqwest::blocking::Client,
    gate: Gate,
}

impl HttpEndpoint {
    pub fn new(
        url: &str,
        key: Option<String>,
        timeout: Duration,
        max_in_flight: usize,
    ) -> Result<Self, ExternalError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ExternalError::Transport(e.to_string()))?;
        Ok(HttpEndpoint {
            url: url.to_string(),
            key,
            client,
            gate: Gate {
                in_flight: Mutex::new(0),
                freed: Condvar::new(),
                limit: max_in_flight.max(1),
            },
        })
    }

    /// Endpoint from `url_var` (required) and `key_var` (optional bearer token).
    pub fn from_env(url_var: &str, key_var: &str) -> Result<Self, ExternalError> {
        let url = std::env::var(url_var)
            .map_err(|_| ExternalError::NotConfigured(url_var.to_string()))?;
        let key = std::env::var(key_var).ok();
        HttpEndpoint::new(&url, key, DEFAULT_TIMEOUT, DEFAULT_MAX_IN_FLIGHT)
    }
}

impl JsonEndpoint for HttpEndpoint {
    fn post(&self, body: &Value) -> Result<Value, ExternalError> {
        let _pass = self.gate.acquire();
        let mut request = self.client.post(&self.url).json(body);
        if let Some(key) = &self.key {
            request = request.bearer_auth(key);
        }
        let classify = |e: reqwest::Error| {
            if e.is_timeout() {
                ExternalError::Timeout
            } else {
                ExternalError::Transport(e.to_string())
            }
        };
        let response = request.send().map_err(classify)?;
        let status = response.status();
        if !status.is_success() {
            return Err(ExternalError::Transport(format!("HTTP {status}")));
        }
        let text = response.text().map_err(classify)?;
        serde_json::from_str(&text).map_err(|e| ExternalError::InvalidResponse(e.to_string()))
    }
}

/// Answers from recorded responses keyed by the request's `statement`.
#[derive(Debug, Clone, Default)]
pub struct ReplayEndpoint {
    responses: BTreeMap<String, Value>,
}

impl ReplayEndpoint {
    pub fn new(responses: BTreeMap<String, Value>) -> Self {
        ReplayEndpoint { responses }
    }

    /// Loads `{"<statement>": <response>, ...}`.
    pub fn from_json_str(text: &str) -> Result<Self, ExternalError> {
        serde_json::from_str(text)
            .map(ReplayEndpoint::new)
            .map_err(|e| ExternalError::InvalidResponse(e.to_string()))
    }
}

impl JsonEndpoint for ReplayEndpoint {
    fn post(&self, body: &Value) -> Result<Value, ExternalError> {
        let statement = body
            .get("statement")
            .and_then(Value::as_str)
            .ok_or_else(|| ExternalError::Transport("request has no statement".into()))?;
        self.responses.get(statement).cloned().ok_or_else(|| {
            ExternalError::Transport(format!("no recorded response for '{statement}'"))
        })
    }
}
