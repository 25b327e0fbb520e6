//! Comparing computed factors with a file of expected expressions.
//!
//! An expected file has one line per singular fiber:
//!
//! ```text
//! j=5 Z2[4,5] ^ Z2[3,4] ; Z2[5,6]
//! ```
//!
//! Several factors for one fiber are separated by `;` and matched in any
//! order. Halftwist expressions (`Z`) are compared as braids with `equal`;
//! path expressions (`z`) compare the underlying paths only.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::braid::{Band, BraidError};
use crate::engine::Factor;
use crate::notation::{parse, to_band_flagged, DecoratedExpr, Kind, LabelMap, NotationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Notation { line: usize, source: NotationError },
    #[error(transparent)]
    Braid(#[from] BraidError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExpectedRow {
    pub j: usize,
    pub line: usize,
    pub exprs: Vec<DecoratedExpr>,
}

impl fmt::Display for ExpectedRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exprs.iter().map(|e| e.render()).collect();
        write!(f, "j={} {}", self.j, parts.join(" ; "))
    }
}

/// Blank lines and `#` comments are skipped; labels are resolved later.
pub fn parse_expected(text: &str, labels: &LabelMap) -> Result<Vec<ExpectedRow>, CheckError> {
    let mut out: Vec<ExpectedRow> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap().trim();
        if l.is_empty() {
            continue;
        }
        let perr = |msg: String| CheckError::Parse { line, msg };
        let rest = l.strip_prefix("j=").ok_or_else(|| perr("expected `j=`".into()))?;
        let (num, body) = rest.split_once(char::is_whitespace).ok_or_else(|| perr("row has no expression".into()))?;
        let j: usize = num.parse().map_err(|_| perr(format!("bad j `{num}`")))?;
        if out.iter().any(|r| r.j == j) {
            return Err(perr(format!("j={j} listed twice")));
        }
        let exprs = body
            .split(';')
            .map(|s| parse(s.trim(), labels).map_err(|source| CheckError::Notation { line, source }))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(ExpectedRow { j, line, exprs });
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Match,
    Mismatch,
    /// No computed factor carries this `j`.
    Missing,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RowReport {
    pub j: usize,
    pub verdict: Verdict,
    /// Some expression relied on the plain-letter convention.
    pub defaulted: bool,
    pub detail: String,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Report {
    pub rows: Vec<RowReport>,
    /// Computed rows that no expected line mentions.
    pub unlisted: Vec<usize>,
}

impl Report {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Match)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RowReport> {
        self.rows.iter().filter(|r| r.verdict != Verdict::Match)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |v: Verdict| match v {
            Verdict::Match => "ok",
            Verdict::Mismatch => "MISMATCH",
            Verdict::Missing => "MISSING",
        };
        for r in self.rows.iter().filter(|r| !r.defaulted) {
            writeln!(f, "j={} {}{}", r.j, verdict(r.verdict), r.detail)?;
        }
        let defaulted: Vec<&RowReport> = self.rows.iter().filter(|r| r.defaulted).collect();
        if !defaulted.is_empty() {
            writeln!(f, "# rows read with the plain-letter convention")?;
            for r in defaulted {
                writeln!(f, "j={} {}{}", r.j, verdict(r.verdict), r.detail)?;
            }
        }
        if !self.unlisted.is_empty() {
            let js: Vec<String> = self.unlisted.iter().map(|j| j.to_string()).collect();
            writeln!(f, "# not in expected file: j={}", js.join(","))?;
        }
        let bad = self.failures().count();
        write!(f, "{} rows, {} failed", self.rows.len(), bad)
    }
}

fn agrees(kind: Kind, band: &Band, exponent: i32, f: &Factor) -> Result<bool, BraidError> {
    match kind {
        Kind::Path => band.same_path(&f.band),
        Kind::Halftwist => {
            if exponent != f.epsilon {
                return Ok(false);
            }
            band.halftwist().power(exponent).equal(&f.braid())
        }
    }
}

/// Compare factors, grouped by their row, with the expected rows.
pub fn compare(factors: &[Factor], expected: &[ExpectedRow], labels: &LabelMap) -> Result<Report, CheckError> {
    let mut by_j: BTreeMap<usize, Vec<&Factor>> = BTreeMap::new();
    for f in factors {
        by_j.entry(f.origin_j).or_default().push(f);
    }
    let mut report = Report::default();
    for row in expected {
        let mut defaulted = false;
        let mut resolved = Vec::new();
        for e in &row.exprs {
            let r = to_band_flagged(e, labels).map_err(|source| CheckError::Notation { line: row.line, source })?;
            defaulted |= r.defaulted;
            resolved.push((e.kind, r.band, r.exponent));
        }
        let Some(group) = by_j.get(&row.j) else {
            report.rows.push(RowReport { j: row.j, verdict: Verdict::Missing, defaulted, detail: String::new() });
            continue;
        };
        let mut verdict = Verdict::Match;
        let mut detail = String::new();
        if group.len() != resolved.len() {
            verdict = Verdict::Mismatch;
            detail = format!(": {} factors computed, {} expected", group.len(), resolved.len());
        } else {
            let mut used = vec![false; group.len()];
            for (idx, (kind, band, exponent)) in resolved.iter().enumerate() {
                let mut hit = None;
                for (i, f) in group.iter().enumerate() {
                    if !used[i] && agrees(*kind, band, *exponent, f)? {
                        hit = Some(i);
                        break;
                    }
                }
                match hit {
                    Some(i) => used[i] = true,
                    None => {
                        verdict = Verdict::Mismatch;
                        detail = format!(": `{}` not found", row.exprs[idx].render());
                        break;
                    }
                }
            }
        }
        report.rows.push(RowReport { j: row.j, verdict, defaulted, detail });
    }
    report.unlisted = by_j.keys().copied().filter(|j| !expected.iter().any(|r| r.j == *j)).collect();
    Ok(report)
}
