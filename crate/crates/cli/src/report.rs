//! The report envelope and exit codes.

use std::fmt::Write as _;

use ipstar::search::{SearchStats, SearchStatus};
use ipstar::Error;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Found,
    Exhausted,
    BudgetExceeded,
    Refuted,
    ConsistentAtScale,
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Found | Status::Refuted | Status::Pass => 0,
            Status::Exhausted | Status::ConsistentAtScale | Status::Fail => 1,
            Status::Error => 2,
            Status::BudgetExceeded => 3,
        }
    }
}

impl From<SearchStatus> for Status {
    fn from(s: SearchStatus) -> Self {
        match s {
            SearchStatus::Found => Status::Found,
            SearchStatus::Exhausted => Status::Exhausted,
            SearchStatus::BudgetExceeded => Status::BudgetExceeded,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub status: Status,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SearchStats>,
}

impl Report {
    pub fn new(command: &str, status: Status, result: Value) -> Self {
        Report {
            tool: "ipstar",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            status,
            result,
            certificate: None,
            stats: None,
        }
    }

    pub fn error(command: &str, e: &Error) -> Self {
        let kind = match e {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::UnsupportedQuery(_) => "unsupported_query",
            Error::Malformed(_) => "malformed",
        };
        Report::new(command, Status::Error, serde_json::json!({ "error": kind, "message": e.to_string() }))
    }

    pub fn with_certificate(mut self, c: Option<Value>) -> Self {
        self.certificate = c;
        self
    }

    pub fn with_stats(mut self, s: SearchStats) -> Self {
        self.stats = Some(s);
        self
    }

    pub fn machine(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let status = serde_json::to_value(self.status).expect("status serializes");
        let _ = writeln!(out, "{}: {}", self.command, status.as_str().unwrap_or_default());
        match &self.result {
            Value::Object(map) => {
                for (k, v) in map {
                    let _ = writeln!(out, "  {k}: {}", plain(v));
                }
            }
            Value::Null => {}
            other => {
                let _ = writeln!(out, "  {}", plain(other));
            }
        }
        if let Some(s) = &self.stats {
            let _ = writeln!(out, "  nodes: {}, elapsed: {} ms", s.nodes, s.millis);
        }
        if self.certificate.is_some() {
            let _ = writeln!(out, "  certificate: attached (use --format machine or --cert-out to keep it)");
        }
        out
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
