//! Check manifests.
//!
//! One check per line:
//!
//! ```text
//! name: <command> anchor=<label> expect: <outcome>
//! ```
//!
//! `<command>` is any command except `verify`, in shell quoting. Blank
//! lines and `#` comments are ignored, and `@identities <path>` loads an
//! identity file (relative to the manifest) for the checks that follow.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;

use crate::args::{Command, Outcome};
use crate::ids::Ids;
use crate::report::{CheckRecord, Report};
use crate::run::{execute, parse_command, quote, replay_command, validate};
use crate::CliError;

pub const BUILTIN: &str = include_str!("../manifests/claims.manifest");

#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub line: usize,
    pub tokens: Vec<String>,
    pub command: Command,
    pub anchor: String,
    pub expect: Outcome,
    pub ids: Ids,
}

#[derive(Debug, Clone, Default)]
pub struct Manifest {
    pub entries: Vec<Entry>,
}

fn strip_comment(line: &str) -> &str {
    // `#` only starts a comment outside quotes.
    let mut quote = None;
    for (i, c) in line.char_indices() {
        match (c, quote) {
            ('\'' | '"', None) => quote = Some(c),
            (c, Some(q)) if c == q => quote = None,
            ('#', None) => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse(text: &str, base: Option<&Path>) -> Result<Manifest, CliError> {
    let mut entries: Vec<Entry> = Vec::new();
    let mut ids = Ids::builtin();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| CliError::Manifest { line, message };
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        if let Some(path) = body.strip_prefix("@identities") {
            let path = PathBuf::from(path.trim());
            let path = match base {
                Some(b) if path.is_relative() => b.join(path),
                _ => path,
            };
            ids.load(&path).map_err(|e| err(e.to_string()))?;
            continue;
        }
        let (name, rest) = body.split_once(':').ok_or_else(|| err("expected `name: <command> anchor=<label> expect: <outcome>`".into()))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            return Err(err(format!("bad check name {name:?}")));
        }
        if let Some(first) = seen.insert(name.to_string(), line) {
            return Err(err(format!("duplicate check {name:?} (first on line {first})")));
        }
        let (command, expect) = rest.rsplit_once("expect:").ok_or_else(|| err("missing `expect: <outcome>`".into()))?;
        let expect = Outcome::from_str(expect.trim(), false).map_err(|_| {
            let names: Vec<&str> = Outcome::value_variants().iter().map(|o| o.as_str()).collect();
            err(format!("unknown outcome {:?}, expected one of {}", expect.trim(), names.join(", ")))
        })?;
        let words = shlex::split(command).ok_or_else(|| err("unbalanced quotes".into()))?;
        let (anchors, tokens): (Vec<String>, Vec<String>) = words.into_iter().partition(|w| w.starts_with("anchor="));
        let anchor = match anchors.as_slice() {
            [a] if a.len() > "anchor=".len() => a["anchor=".len()..].to_string(),
            [] => return Err(err(format!("check {name:?} has no anchor"))),
            _ => return Err(err(format!("check {name:?} must have exactly one anchor"))),
        };
        if let Some(t) = tokens.iter().find(|t| ["--expect", "--json", "--ids", "--no-timings"].iter().any(|f| t.starts_with(f))) {
            return Err(err(format!("{t} is not allowed inside a manifest")));
        }
        let parsed = parse_command(&tokens).map_err(|e| err(e.to_string()))?;
        validate(&parsed, &ids).map_err(|e| err(e.to_string()))?;
        entries.push(Entry {
            name: name.to_string(),
            line,
            tokens,
            command: parsed,
            anchor,
            expect,
            ids: ids.clone(),
        });
    }
    Ok(Manifest { entries })
}

pub fn load(path: &Path) -> Result<Manifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, path.parent())
}

fn run_entry(e: &Entry, timings: bool) -> CheckRecord {
    let start = Instant::now();
    let mut record = execute(&e.command, &e.tokens, &e.ids).unwrap_or_else(|err| {
        let mut r = CheckRecord::new(e.name.clone(), "error");
        r.input("command", quote(&e.tokens));
        r.notes.push(err.to_string());
        r
    });
    record.millis = if timings { start.elapsed().as_millis() as u64 } else { 0 };
    record.check = e.name.clone();
    record.claim_anchor = Some(e.anchor.clone());
    record.expect(Some(e.expect.as_str()));
    record.replay = (!record.passed).then(|| replay_command(&e.tokens, e.ids.paths(), Some(e.expect.as_str())));
    record
}

/// Runs every check (concurrently); records keep manifest order.
pub fn run(manifest: &Manifest, timings: bool) -> Report {
    let mut warnings = Vec::new();
    if manifest.entries.is_empty() {
        warnings.push("manifest contains no checks".to_string());
    }
    let checks: Vec<CheckRecord> = manifest.entries.par_iter().map(|e| run_entry(e, timings)).collect();
    Report::new(checks, warnings)
}
