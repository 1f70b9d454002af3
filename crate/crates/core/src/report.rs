//! TSV report files.
//!
//! Every file starts with one `#` line naming the crate version, a hash of the
//! run configuration and the homophone rule, followed by a column header.

use std::io::{self, BufRead, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::evaluation::EvaluationReport;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "strategy",
    "direction",
    "mode",
    "root",
    "words_pct",
    "phones_pct",
    "silenced",
    "wall_ms",
];

pub const DETAIL_COLUMNS: [&str; 9] = [
    "word",
    "reference",
    "outputs",
    "tie_size",
    "correct",
    "word_credit",
    "phone_credit",
    "silenced",
    "diagnostic",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("missing or malformed `#` header line")]
    Header,
    #[error("line {line}: {reason}")]
    Row { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// First 16 hex digits of the SHA-256 of a canonical config description.
pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportHeader {
    pub version: String,
    pub config_hash: String,
    pub homophones: String,
}

impl ReportHeader {
    pub fn new(canonical_config: &str, homophones: &str) -> Self {
        Self {
            version: VERSION.to_string(),
            config_hash: config_hash(canonical_config),
            homophones: homophones.to_string(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "# pba {}\tconfig={}\thomophones={}",
            self.version, self.config_hash, self.homophones
        )
    }

    pub fn parse(line: &str) -> Option<Self> {
        let rest = line.strip_prefix("# pba ")?;
        let mut it = rest.split('\t');
        let version = it.next()?.to_string();
        let config_hash = it.next()?.strip_prefix("config=")?.to_string();
        let homophones = it.next()?.strip_prefix("homophones=")?.to_string();
        Some(Self {
            version,
            config_hash,
            homophones,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub strategy: String,
    pub direction: String,
    pub mode: String,
    pub root: String,
    pub words_pct: f64,
    pub phones_pct: f64,
    pub silenced: usize,
    pub wall_ms: u128,
}

impl SummaryRow {
    /// `timing: false` writes 0 for wall time so reruns are byte-identical.
    pub fn from_report(report: &EvaluationReport, timing: bool) -> Self {
        Self {
            strategy: report.strategy.clone(),
            direction: report.direction.as_str().to_string(),
            mode: report.mode.to_string(),
            root: report.root.clone(),
            words_pct: report.word_accuracy,
            phones_pct: report.phoneme_accuracy,
            silenced: report.silenced,
            wall_ms: if timing { report.wall_ms } else { 0 },
        }
    }

    /// Identifies a grid point; used to skip finished rows when resuming.
    pub fn key(&self) -> (&str, &str, &str, &str) {
        (&self.strategy, &self.direction, &self.mode, &self.root)
    }

    pub fn to_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{}\t{}",
            self.strategy,
            self.direction,
            self.mode,
            self.root,
            self.words_pct,
            self.phones_pct,
            self.silenced,
            self.wall_ms
        )
    }

    fn parse(line: &str, line_no: usize) -> Result<Self, ReportError> {
        let bad = |reason: String| ReportError::Row {
            line: line_no,
            reason,
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != SUMMARY_COLUMNS.len() {
            return Err(bad(format!("expected 8 fields, found {}", f.len())));
        }
        let num = |i: usize| -> Result<f64, ReportError> {
            f[i].parse()
                .map_err(|_| bad(format!("bad {}: {:?}", SUMMARY_COLUMNS[i], f[i])))
        };
        Ok(Self {
            strategy: f[0].to_string(),
            direction: f[1].to_string(),
            mode: f[2].to_string(),
            root: f[3].to_string(),
            words_pct: num(4)?,
            phones_pct: num(5)?,
            silenced: f[6]
                .parse()
                .map_err(|_| bad(format!("bad silenced: {:?}", f[6])))?,
            wall_ms: f[7]
                .parse()
                .map_err(|_| bad(format!("bad wall_ms: {:?}", f[7])))?,
        })
    }
}

pub fn write_summary<W: Write>(
    mut out: W,
    header: &ReportHeader,
    rows: &[SummaryRow],
) -> io::Result<()> {
    writeln!(out, "{}", header.line())?;
    writeln!(out, "{}", SUMMARY_COLUMNS.join("\t"))?;
    for r in rows {
        writeln!(out, "{}", r.to_line())?;
    }
    out.flush()
}

/// Reads a summary written by [`write_summary`]. A truncated last line (from
/// an interrupted run) is dropped with a warning.
pub fn read_summary<R: BufRead>(input: R) -> Result<(ReportHeader, Vec<SummaryRow>), ReportError> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(l) => ReportHeader::parse(&l?).ok_or(ReportError::Header)?,
        None => return Err(ReportError::Header),
    };
    match lines.next() {
        Some(l)
            if l.as_ref()
                .map(|s| s == &SUMMARY_COLUMNS.join("\t"))
                .unwrap_or(false) => {}
        _ => return Err(ReportError::Header),
    }
    let raw: Vec<String> = lines.collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for (i, l) in raw.iter().enumerate() {
        if l.is_empty() {
            continue;
        }
        match SummaryRow::parse(l, i + 3) {
            Ok(r) => rows.push(r),
            Err(e) if i + 1 == raw.len() => log::warn!("dropping incomplete last row: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok((header, rows))
}

/// One line per word, in lexicon order.
pub fn write_detail<W: Write>(
    mut out: W,
    header: &ReportHeader,
    report: &EvaluationReport,
) -> io::Result<()> {
    writeln!(out, "{}", header.line())?;
    writeln!(out, "{}", DETAIL_COLUMNS.join("\t"))?;
    for w in &report.words {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}\t{}",
            w.word,
            w.reference,
            w.outputs.join(","),
            w.tie_set_size,
            w.correct_in_tie,
            w.word_credit,
            w.phoneme_credit,
            u8::from(w.silenced),
            w.diagnostic.as_deref().unwrap_or("")
        )?;
    }
    out.flush()
}
