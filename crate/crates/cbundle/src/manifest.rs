//! Self-describing headers for every CSV and report.

use std::fmt::Write as _;
use std::time::Duration;

use cbundle_core::arith::int::MR_ROUNDS_BIG;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the input file or form string.
    pub input_digest: Option<String>,
    pub parameters: Vec<(String, String)>,
    pub versions: String,
    pub wall_time: Duration,
    pub workers: usize,
}

impl RunManifest {
    pub fn new(command: &str, input: Option<&[u8]>, workers: usize) -> Self {
        RunManifest {
            command: command.to_string(),
            input_digest: input.map(sha256_hex),
            parameters: Vec::new(),
            versions: format!("cbundle {} / cbundle-core {}", env!("CARGO_PKG_VERSION"), cbundle_core::VERSION),
            wall_time: Duration::ZERO,
            workers,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    /// `# key: value` lines.
    pub fn header(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# command: {}", self.command).unwrap();
        if let Some(d) = &self.input_digest {
            writeln!(out, "# input_sha256: {d}").unwrap();
        }
        for (k, v) in &self.parameters {
            writeln!(out, "# param {k}: {v}").unwrap();
        }
        writeln!(out, "# versions: {}", self.versions).unwrap();
        writeln!(out, "# primality: Miller-Rabin, deterministic below 2^64, {MR_ROUNDS_BIG} fixed prime bases above").unwrap();
        writeln!(out, "# workers: {}", self.workers).unwrap();
        writeln!(out, "# wall_time_s: {:.3}", self.wall_time.as_secs_f64()).unwrap();
        out
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

/// The lines of a CSV that are not `#` comments.
pub fn csv_body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).fold(String::new(), |mut s, l| {
        s.push_str(l);
        s.push('\n');
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn header_lines_are_comments() {
        let m = RunManifest::new("count", Some(b"x"), 2).param("B", "1000 10000");
        let h = m.header();
        assert!(h.lines().all(|l| l.starts_with("# ")));
        assert!(h.contains("# param B: 1000 10000"));
        assert!(h.contains("# primality: "));
        assert_eq!(csv_body(&format!("{h}a,b\n1,2\n")), "a,b\n1,2\n");
    }
}
