//! The JSON report document written by `superwitt report`.

use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verifier::Report;

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub version: String,
    pub timestamp: String,
    pub seed: u64,
    pub checks: Vec<Report>,
}

/// `SOURCE_DATE_EPOCH` as RFC 3339, if set and valid.
fn source_date() -> Option<String> {
    let secs: i64 = std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()?;
    let t = DateTime::<Utc>::from_timestamp(secs, 0)?;
    Some(t.to_rfc3339_opts(SecondsFormat::Secs, true))
}

impl ReportDocument {
    /// Sorts the reports by check id, then parameters. In stable mode the
    /// timestamp is `SOURCE_DATE_EPOCH` (or the epoch) and timings are
    /// zeroed, so equal inputs give byte-identical documents.
    pub fn new(mut checks: Vec<Report>, seed: u64, stable: bool) -> Self {
        let key = |r: &Report| (r.id, serde_json::to_string(&r.params).unwrap_or_default());
        checks.sort_by_cached_key(key);
        let timestamp = match (stable, source_date()) {
            (_, Some(t)) => t,
            (true, None) => "1970-01-01T00:00:00Z".into(),
            (false, None) => Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        };
        if stable {
            for r in &mut checks {
                r.elapsed_ms = 0;
            }
        }
        ReportDocument {
            version: REPORT_VERSION.into(),
            timestamp,
            seed,
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Report::passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReportDocument =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid report: {e}")))?;
        for r in &doc.checks {
            if r.status == crate::verifier::Status::Fail && r.counterexample.is_none() {
                return Err(Error::Config(format!(
                    "report for {} fails without a counterexample",
                    r.id
                )));
            }
        }
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document() {
        let doc = ReportDocument::new(Vec::new(), 3, true);
        let text = doc.to_json();
        assert_eq!(ReportDocument::from_json(&text).unwrap(), doc);
        assert!(doc.all_passed());
    }
}
