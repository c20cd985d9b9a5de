//! Line-delimited JSON run reports.
//!
//! Every record is one JSON object whose first key is `record`. Field
//! order follows the struct declarations, so reports diff cleanly. The
//! final `timing` record is the only part that varies between runs.

use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
struct Run<'a> {
    record: &'static str,
    command: &'a str,
    args: &'a [String],
    version: &'static str,
}

#[derive(Serialize)]
struct Input<'a> {
    record: &'static str,
    name: &'a str,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Output<'a, T: Serialize> {
    record: &'static str,
    name: &'a str,
    value: &'a T,
}

#[derive(Serialize)]
struct Check<'a> {
    record: &'static str,
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

#[derive(Serialize)]
struct Timing {
    record: &'static str,
    wall_seconds: f64,
    checks: usize,
    failed: usize,
}

pub struct Report {
    lines: Vec<String>,
    start: Instant,
    checks: usize,
    failed: usize,
}

fn line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report records serialize")
}

impl Report {
    pub fn new(command: &str, args: &[String]) -> Self {
        let run = Run {
            record: "run",
            command,
            args,
            version: env!("CARGO_PKG_VERSION"),
        };
        Self {
            lines: vec![line(&run)],
            start: Instant::now(),
            checks: 0,
            failed: 0,
        }
    }

    pub fn input(&mut self, name: &str, contents: &[u8]) {
        let digest = Sha256::digest(contents);
        self.lines.push(line(&Input {
            record: "input",
            name,
            sha256: format!("{digest:x}"),
            bytes: contents.len(),
        }));
    }

    pub fn output<T: Serialize>(&mut self, name: &str, value: &T) {
        self.lines.push(line(&Output {
            record: "output",
            name,
            value,
        }));
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: &str) {
        self.checks += 1;
        if !passed {
            self.failed += 1;
        }
        self.lines.push(line(&Check {
            record: "check",
            name,
            passed,
            detail,
        }));
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn failed(&self) -> usize {
        self.failed
    }

    /// The report text, ending with the timing record.
    pub fn finish(mut self) -> String {
        self.lines.push(line(&Timing {
            record: "timing",
            wall_seconds: self.start.elapsed().as_secs_f64(),
            checks: self.checks,
            failed: self.failed,
        }));
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}
