//! Pass/fail reports with counterexample witnesses.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub case: String,
    pub detail: String,
}

/// Outcome of a verification run. A failing report always carries at least
/// one witness. Timing is kept out of the serialized form so that output is
/// byte-stable across runs with the same seed.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub name: String,
    pub status: Status,
    pub cases: usize,
    pub witnesses: Vec<Witness>,
    pub params: BTreeMap<String, String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Report {
            name: name.into(),
            status: Status::Pass,
            cases: 0,
            witnesses: Vec::new(),
            params: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn record_case(&mut self) {
        self.cases += 1;
    }

    pub fn fail(&mut self, case: impl Into<String>, detail: impl Into<String>) {
        self.status = Status::Fail;
        self.witnesses.push(Witness {
            case: case.into(),
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds a sub-report in, prefixing its witnesses.
    pub fn absorb(&mut self, sub: Report) {
        self.cases += sub.cases;
        if !sub.passed() {
            self.status = Status::Fail;
            for w in sub.witnesses {
                self.witnesses.push(Witness {
                    case: format!("{}: {}", sub.name, w.case),
                    detail: w.detail,
                });
            }
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} cases)",
            self.name,
            match self.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            },
            self.cases
        )?;
        for w in &self.witnesses {
            write!(f, "\n  witness [{}]: {}", w.case, w.detail)?;
        }
        Ok(())
    }
}
