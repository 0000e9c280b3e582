//! Text and line-delimited JSON rendering. Field order of every machine
//! record is the declaration order of its struct; see docs/cli-output.md.

use std::io::Write;

use serde::Serialize;

use crate::Format;

/// Something printable as one line of either format.
pub trait Record: Serialize {
    fn text(&self) -> String;
    /// `Some(pass)` for records that are checks.
    fn verdict(&self) -> Option<bool> {
        None
    }
}

pub struct Printer {
    format: Format,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct Summary {
    record: &'static str,
    passed: usize,
    failed: usize,
}

impl Printer {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            passed: 0,
            failed: 0,
        }
    }

    pub fn print<R: Record>(&mut self, r: &R) {
        match r.verdict() {
            Some(true) => self.passed += 1,
            Some(false) => self.failed += 1,
            None => {}
        }
        let line = match self.format {
            Format::Text => r.text(),
            Format::Machine => serde_json::to_string(r).expect("records serialize"),
        };
        let mut stdout = std::io::stdout().lock();
        // a closed pipe is not worth a panic
        let _ = writeln!(stdout, "{line}");
    }

    /// Totals, when anything was checked.
    pub fn summary(&mut self) {
        if self.passed + self.failed == 0 {
            return;
        }
        let line = match self.format {
            Format::Text => format!("{} passed, {} failed", self.passed, self.failed),
            Format::Machine => serde_json::to_string(&Summary {
                record: "summary",
                passed: self.passed,
                failed: self.failed,
            })
            .expect("records serialize"),
        };
        let _ = writeln!(std::io::stdout().lock(), "{line}");
    }

    /// An unstructured line; text format only.
    pub fn raw(&mut self, line: &str) {
        if self.is_text() {
            let _ = writeln!(std::io::stdout().lock(), "{line}");
        }
    }

    pub fn is_text(&self) -> bool {
        self.format == Format::Text
    }

    pub fn failed(&self) -> usize {
        self.failed
    }
}

pub fn mark(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
