//! NETtalk lexicon parsing, filtering and direction handling.
//!
//! Entries are stored boundary-padded: the letter and phoneme sequences both
//! start and end with [`BOUNDARY`]. NETtalk itself uses `#` as a phoneme
//! (/gz/ as in "examine"), so the padding symbol is a sentinel byte that never
//! occurs in corpus text and is only *rendered* as `#`.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

/// Padding symbol placed at both ends of every letter and phoneme sequence.
pub const BOUNDARY: u8 = 0;

/// Null phoneme used by NETtalk to keep the alignment one-to-one.
pub const NULL_PHONEME: u8 = b'-';

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus contains no entries")]
    Empty,
    #[error("word {word:?} and pronunciation {pronunciation:?} differ in length")]
    LengthMismatch { word: String, pronunciation: String },
    #[error("entry {0:?} is empty")]
    EmptyEntry(String),
    #[error("entry {0:?} contains a non-ASCII or control symbol")]
    BadSymbol(String),
    #[error("i/o error reading corpus: {0}")]
    Io(#[from] std::io::Error),
}

/// Transduction direction. Speech-to-text swaps words and pronunciations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    TextToSpeech,
    SpeechToText,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::TextToSpeech => "tts",
            Direction::SpeechToText => "stt",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tts" | "text-to-speech" => Ok(Direction::TextToSpeech),
            "stt" | "speech-to-text" => Ok(Direction::SpeechToText),
            other => Err(format!("unknown direction {other:?} (expected tts or stt)")),
        }
    }
}

/// A word/pronunciation pair aligned one symbol per letter, boundary-padded.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlignedEntry {
    letters: Vec<u8>,
    phonemes: Vec<u8>,
}

impl AlignedEntry {
    /// Builds a padded entry from an unpadded word and its aligned pronunciation.
    /// Letters are lowercased; phonemes are kept as given.
    pub fn new(word: &str, pronunciation: &str) -> Result<Self, CorpusError> {
        if word.is_empty() {
            return Err(CorpusError::EmptyEntry(word.to_string()));
        }
        if word.len() != pronunciation.len() {
            return Err(CorpusError::LengthMismatch {
                word: word.to_string(),
                pronunciation: pronunciation.to_string(),
            });
        }
        let ok = |s: &str| s.bytes().all(|b| b.is_ascii_graphic());
        if !ok(word) || !ok(pronunciation) {
            return Err(CorpusError::BadSymbol(word.to_string()));
        }
        Ok(Self {
            letters: pad(word.to_ascii_lowercase().as_bytes()),
            phonemes: pad(pronunciation.as_bytes()),
        })
    }

    /// Padded letter sequence.
    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    /// Padded phoneme sequence.
    pub fn phonemes(&self) -> &[u8] {
        &self.phonemes
    }

    /// Padded length.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.len() <= 2
    }

    /// Letters without padding.
    pub fn inner_letters(&self) -> &[u8] {
        &self.letters[1..self.letters.len() - 1]
    }

    /// Phonemes without padding.
    pub fn inner_phonemes(&self) -> &[u8] {
        &self.phonemes[1..self.phonemes.len() - 1]
    }

    pub fn word(&self) -> String {
        String::from_utf8_lossy(self.inner_letters()).into_owned()
    }

    pub fn pronunciation(&self) -> String {
        String::from_utf8_lossy(self.inner_phonemes()).into_owned()
    }

    /// Exchanges letters and phonemes (speech-to-text orientation).
    pub fn swap_direction(&self) -> AlignedEntry {
        AlignedEntry {
            letters: self.phonemes.clone(),
            phonemes: self.letters.clone(),
        }
    }
}

impl fmt::Display for AlignedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", render(&self.letters), render(&self.phonemes))
    }
}

fn pad(inner: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(inner.len() + 2);
    v.push(BOUNDARY);
    v.extend_from_slice(inner);
    v.push(BOUNDARY);
    v
}

/// Renders a symbol string for display, showing the boundary as `#`.
pub fn render(symbols: &[u8]) -> String {
    symbols
        .iter()
        .map(|&b| if b == BOUNDARY { '#' } else { b as char })
        .collect()
}

/// Strips padding and null phonemes, leaving what is compared at evaluation.
pub fn strip_nulls(symbols: &[u8]) -> Vec<u8> {
    symbols
        .iter()
        .copied()
        .filter(|&b| b != BOUNDARY && b != NULL_PHONEME)
        .collect()
}

/// A data line that could not be turned into an entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineRejection {
    pub line_number: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub entries: Vec<AlignedEntry>,
    pub rejected: Vec<LineRejection>,
}

/// Parses the NETtalk plain-text format: one entry per line, whitespace
/// separated `word pronunciation [stress] [flag]`. Blank lines and lines
/// starting with `;` are skipped; malformed lines are rejected individually.
pub fn parse_nettalk<R: BufRead>(reader: R) -> Result<ParsedCorpus, CorpusError> {
    let mut out = ParsedCorpus::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(word), Some(pron)) = (fields.next(), fields.next()) else {
            out.rejected.push(LineRejection {
                line_number: i + 1,
                reason: "fewer than two fields".into(),
            });
            continue;
        };
        match AlignedEntry::new(word, pron) {
            Ok(e) => out.entries.push(e),
            Err(e) => {
                log::debug!("line {}: {e}", i + 1);
                out.rejected.push(LineRejection {
                    line_number: i + 1,
                    reason: e.to_string(),
                });
            }
        }
    }
    if out.entries.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(out)
}

pub fn parse_nettalk_str(text: &str) -> Result<ParsedCorpus, CorpusError> {
    parse_nettalk(text.as_bytes())
}

/// Formats an entry back into a NETtalk data line (text-to-speech orientation).
pub fn serialize_entry(entry: &AlignedEntry) -> String {
    format!("{}\t{}", entry.word(), entry.pronunciation())
}

/// How members of a clash group (identical target strings) are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HomophoneRule {
    /// Keep the first occurrence in file order.
    KeepFirst,
    /// Drop every member of the group.
    DropGroup,
}

impl HomophoneRule {
    pub fn as_str(self) -> &'static str {
        match self {
            HomophoneRule::KeepFirst => "keep-first",
            HomophoneRule::DropGroup => "drop-group",
        }
    }
}

impl std::str::FromStr for HomophoneRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "keep-first" => Ok(HomophoneRule::KeepFirst),
            "drop-group" => Ok(HomophoneRule::DropGroup),
            other => Err(format!("unknown homophone rule {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FilterOptions {
    pub rule: HomophoneRule,
    /// Compare target strings with null phonemes removed.
    pub ignore_nulls: bool,
}

impl Default for FilterOptions {
    fn default() -> Self {
        Self {
            rule: HomophoneRule::KeepFirst,
            ignore_nulls: false,
        }
    }
}

impl FilterOptions {
    /// Short label recorded in report headers.
    pub fn label(&self) -> String {
        format!(
            "{}{}",
            self.rule.as_str(),
            if self.ignore_nulls {
                "/no-nulls"
            } else {
                "/with-nulls"
            }
        )
    }
}

/// A filtered lexicon oriented for one direction. Entries are stored in
/// that orientation: for speech-to-text the "letters" are phonemes.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<AlignedEntry>,
    direction: Direction,
}

impl Lexicon {
    /// Wraps already-oriented entries without filtering.
    pub fn from_entries(entries: Vec<AlignedEntry>, direction: Direction) -> Self {
        Self { entries, direction }
    }

    pub fn entries(&self) -> &[AlignedEntry] {
        &self.entries
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Set of non-boundary input symbols.
    pub fn alphabet(&self) -> HashSet<u8> {
        self.entries
            .iter()
            .flat_map(|e| e.inner_letters().iter().copied())
            .collect()
    }
}

/// Orients entries for `direction`, drops one-letter words and resolves clash
/// groups on the target side (homophones for TTS, homographs for STT).
pub fn filter_corpus(
    entries: &[AlignedEntry],
    direction: Direction,
    options: &FilterOptions,
) -> Lexicon {
    let oriented: Vec<AlignedEntry> = entries
        .iter()
        .filter(|e| e.inner_letters().len() != 1)
        .map(|e| match direction {
            Direction::TextToSpeech => e.clone(),
            Direction::SpeechToText => e.swap_direction(),
        })
        .collect();

    let key = |e: &AlignedEntry| -> Vec<u8> {
        if options.ignore_nulls {
            strip_nulls(e.phonemes())
        } else {
            e.inner_phonemes().to_vec()
        }
    };

    let mut counts: std::collections::HashMap<Vec<u8>, usize> = Default::default();
    for e in &oriented {
        *counts.entry(key(e)).or_default() += 1;
    }

    let mut seen = HashSet::new();
    let kept: Vec<AlignedEntry> = oriented
        .into_iter()
        .filter(|e| {
            let k = key(e);
            match options.rule {
                HomophoneRule::KeepFirst => seen.insert(k),
                HomophoneRule::DropGroup => counts[&k] == 1,
            }
        })
        .collect();

    if kept.is_empty() {
        log::warn!("filtering left an empty lexicon");
    }
    Lexicon {
        entries: kept,
        direction,
    }
}
