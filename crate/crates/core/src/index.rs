//! Full-matching substring index.
//!
//! Every substring `(x_a..x_b, y_a..y_b)` of every padded entry is counted
//! once per occurrence. Lookups go through [`CountSource`], implemented by the
//! full index and by the subtractive [`LeaveOneOutView`].

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::AlignedEntry;

/// An exact non-negative fraction `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: u64,
    pub den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Self {
        debug_assert!(den > 0);
        Self { num, den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Pronunciation counts observed for one letter string.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PronunciationDistribution {
    // sorted by pronunciation, counts > 0
    entries: Vec<(Box<[u8]>, u32)>,
    total: u64,
}

impl PronunciationDistribution {
    pub fn from_counts<I, P>(counts: I) -> Self
    where
        I: IntoIterator<Item = (P, u32)>,
        P: Into<Box<[u8]>>,
    {
        let mut merged: HashMap<Box<[u8]>, u32> = HashMap::new();
        for (p, c) in counts {
            if c > 0 {
                *merged.entry(p.into()).or_default() += c;
            }
        }
        let mut entries: Vec<_> = merged.into_iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let total = entries.iter().map(|e| e.1 as u64).sum();
        Self { entries, total }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct pronunciations.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn count(&self, pronunciation: &[u8]) -> u32 {
        self.entries
            .binary_search_by(|e| (*e.0).cmp(pronunciation))
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], u32)> + '_ {
        self.entries.iter().map(|(p, c)| (&**p, *c))
    }

    /// Total count of pronunciations that agree with `fixed` at every
    /// assigned position.
    pub fn agreeing_total(&self, fixed: &[Option<u8>]) -> u64 {
        self.iter()
            .filter(|(p, _)| agrees(p, fixed))
            .map(|(_, c)| c as u64)
            .sum()
    }

    fn subtract(&mut self, pronunciation: &[u8], count: u32) {
        if let Ok(i) = self.entries.binary_search_by(|e| (*e.0).cmp(pronunciation)) {
            let c = &mut self.entries[i].1;
            debug_assert!(*c >= count, "leave-one-out would go negative");
            *c = c.saturating_sub(count);
            self.total -= count as u64;
            if *c == 0 {
                self.entries.remove(i);
            }
        }
    }
}

fn agrees(pronunciation: &[u8], fixed: &[Option<u8>]) -> bool {
    pronunciation
        .iter()
        .zip(fixed)
        .all(|(p, f)| f.is_none_or(|f| f == *p))
}

/// Substring -> pronunciation -> count, while building.
type CountMap = HashMap<Box<[u8]>, HashMap<Box<[u8]>, u32>>;
/// Substring -> (pronunciation, count) pairs.
type TallyMap = HashMap<Box<[u8]>, Vec<(Box<[u8]>, u32)>>;

/// Read access to substring pronunciation counts.
pub trait CountSource: Sync {
    fn distribution(&self, letters: &[u8]) -> Option<Cow<'_, PronunciationDistribution>>;
}

/// Raw count of `(letters, pronunciation)`; the arc frequency of a segment.
pub fn arc_count<S: CountSource + ?Sized>(source: &S, letters: &[u8], pronunciation: &[u8]) -> u32 {
    source
        .distribution(letters)
        .map_or(0, |d| d.count(pronunciation))
}

/// `count(x, y) / (total(x) + 1)`, zero when `x` or `y` is unseen.
pub fn estimated_probability<S: CountSource + ?Sized>(
    source: &S,
    letters: &[u8],
    pronunciation: &[u8],
) -> Fraction {
    match source.distribution(letters) {
        Some(d) => dist_estimated(&d, pronunciation),
        None => Fraction::ZERO,
    }
}

/// Conditional estimate given phonemes fixed at some positions of `letters`.
///
/// Zero if `pronunciation` disagrees with `fixed`; one if `fixed` covers every
/// position and agrees; otherwise the count divided by the agreeing mass plus one.
pub fn conditional_probability<S: CountSource + ?Sized>(
    source: &S,
    letters: &[u8],
    pronunciation: &[u8],
    fixed: &[Option<u8>],
) -> Fraction {
    match source.distribution(letters) {
        Some(d) => dist_conditional(&d, pronunciation, fixed),
        None => Fraction::ZERO,
    }
}

pub(crate) fn dist_estimated(d: &PronunciationDistribution, pronunciation: &[u8]) -> Fraction {
    Fraction::new(d.count(pronunciation) as u64, d.total() + 1)
}

pub(crate) fn dist_conditional(
    d: &PronunciationDistribution,
    pronunciation: &[u8],
    fixed: &[Option<u8>],
) -> Fraction {
    if !agrees(pronunciation, fixed) {
        return Fraction::ZERO;
    }
    if fixed.len() >= pronunciation.len() && fixed.iter().all(Option::is_some) {
        return Fraction::ONE;
    }
    Fraction::new(d.count(pronunciation) as u64, d.agreeing_total(fixed) + 1)
}

/// Substring → pronunciation-count table over a whole lexicon.
#[derive(Debug, Clone, Default)]
pub struct SubstringIndex {
    table: HashMap<Box<[u8]>, PronunciationDistribution>,
    max_len: Option<usize>,
}

impl SubstringIndex {
    /// Counts every substring of every entry.
    pub fn build(entries: &[AlignedEntry]) -> Self {
        Self::build_with_max_len(entries, None)
    }

    /// As [`SubstringIndex::build`], optionally ignoring substrings longer
    /// than `max_len`. The cap changes results and is meant for quick runs only.
    pub fn build_with_max_len(entries: &[AlignedEntry], max_len: Option<usize>) -> Self {
        let mut raw: CountMap = HashMap::new();
        for e in entries {
            for_each_substring(e, max_len, |x, y| {
                let slot = match raw.get_mut(x) {
                    Some(s) => s,
                    None => raw.entry(x.into()).or_default(),
                };
                match slot.get_mut(y) {
                    Some(c) => *c += 1,
                    None => {
                        slot.insert(y.into(), 1);
                    }
                }
            });
        }
        let table = raw
            .into_iter()
            .map(|(k, v)| (k, PronunciationDistribution::from_counts(v)))
            .collect();
        Self { table, max_len }
    }

    /// Builds a table directly from `(letters, pronunciation, count)` triples.
    pub fn from_counts<I, L, P>(counts: I) -> Self
    where
        I: IntoIterator<Item = (L, P, u32)>,
        L: Into<Box<[u8]>>,
        P: Into<Box<[u8]>>,
    {
        let mut raw: TallyMap = HashMap::new();
        for (l, p, c) in counts {
            raw.entry(l.into()).or_default().push((p.into(), c));
        }
        let table = raw
            .into_iter()
            .map(|(k, v)| (k, PronunciationDistribution::from_counts(v)))
            .filter(|(_, d)| !d.is_empty())
            .collect();
        Self {
            table,
            max_len: None,
        }
    }

    pub fn max_len(&self) -> Option<usize> {
        self.max_len
    }

    /// Number of distinct letter strings.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, letters: &[u8]) -> Option<&PronunciationDistribution> {
        self.table.get(letters)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u8], &PronunciationDistribution)> + '_ {
        self.table.iter().map(|(k, v)| (&**k, v))
    }

    /// A view of this index with `excluded`'s own substrings removed.
    pub fn leave_one_out<'a>(&'a self, excluded: &AlignedEntry) -> LeaveOneOutView<'a> {
        let mut delta: TallyMap = HashMap::new();
        for_each_substring(excluded, self.max_len, |x, y| {
            let v = delta.entry(x.into()).or_default();
            match v.iter_mut().find(|(p, _)| &**p == y) {
                Some((_, c)) => *c += 1,
                None => v.push((y.into(), 1)),
            }
        });
        LeaveOneOutView { base: self, delta }
    }

    /// Writes the versioned, checksummed binary form described in
    /// [`SubstringIndex::read_from`].
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), IndexIoError> {
        let mut keys: Vec<&Box<[u8]>> = self.table.keys().collect();
        keys.sort();
        let mut body = Vec::new();
        body.extend_from_slice(&(self.max_len.map_or(0, |m| m as u64)).to_le_bytes());
        body.extend_from_slice(&(keys.len() as u64).to_le_bytes());
        for k in keys {
            let d = &self.table[k];
            put_bytes(&mut body, k);
            body.extend_from_slice(&(d.entries.len() as u32).to_le_bytes());
            for (p, c) in &d.entries {
                put_bytes(&mut body, p);
                body.extend_from_slice(&c.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&body);
        w.write_all(INDEX_MAGIC)?;
        w.write_all(&INDEX_VERSION.to_le_bytes())?;
        w.write_all(&body)?;
        w.write_all(&digest)?;
        Ok(())
    }

    /// Reads an index file.
    ///
    /// Layout (little endian): magic `PBAIDX\0\0`, `u32` version, `u64` length
    /// cap (0 = none), `u64` key count, then per key a length-prefixed letter
    /// string, `u32` pronunciation count and `(bytes, u32 count)` pairs; the
    /// file ends with the SHA-256 of everything between version and digest.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self, IndexIoError> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() < INDEX_MAGIC.len() + 4 + 32 || &buf[..8] != INDEX_MAGIC {
            return Err(IndexIoError::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(buf[8..12].try_into().unwrap());
        if version != INDEX_VERSION {
            return Err(IndexIoError::Version(version));
        }
        let (body, digest) = buf[12..].split_at(buf.len() - 12 - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(IndexIoError::Checksum);
        }
        let mut cur = Cursor { buf: body, pos: 0 };
        let max_len = match cur.u64()? {
            0 => None,
            m => Some(m as usize),
        };
        let n = cur.u64()? as usize;
        let mut table = HashMap::with_capacity(n);
        for _ in 0..n {
            let k: Box<[u8]> = cur.bytes()?.into();
            let m = cur.u32()? as usize;
            let mut entries = Vec::with_capacity(m);
            for _ in 0..m {
                let p: Box<[u8]> = cur.bytes()?.into();
                entries.push((p, cur.u32()?));
            }
            table.insert(k, PronunciationDistribution::from_counts(entries));
        }
        Ok(Self { table, max_len })
    }
}

impl CountSource for SubstringIndex {
    fn distribution(&self, letters: &[u8]) -> Option<Cow<'_, PronunciationDistribution>> {
        self.table.get(letters).map(Cow::Borrowed)
    }
}

const INDEX_MAGIC: &[u8; 8] = b"PBAIDX\0\0";
const INDEX_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IndexIoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed index file: {0}")]
    Format(String),
    #[error("unsupported index version {0}")]
    Version(u32),
    #[error("index checksum mismatch")]
    Checksum,
}

fn put_bytes(out: &mut Vec<u8>, b: &[u8]) {
    out.extend_from_slice(&(b.len() as u32).to_le_bytes());
    out.extend_from_slice(b);
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexIoError> {
        let end = self.pos + n;
        if end > self.buf.len() {
            return Err(IndexIoError::Format("truncated".into()));
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, IndexIoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexIoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn bytes(&mut self) -> Result<&'a [u8], IndexIoError> {
        let n = self.u32()? as usize;
        self.take(n)
    }
}

fn for_each_substring(e: &AlignedEntry, max_len: Option<usize>, mut f: impl FnMut(&[u8], &[u8])) {
    let (x, y) = (e.letters(), e.phonemes());
    let cap = max_len.unwrap_or(usize::MAX);
    for a in 0..x.len() {
        for b in a + 1..=x.len().min(a.saturating_add(cap)) {
            f(&x[a..b], &y[a..b]);
        }
    }
}

/// The index with one entry's contribution subtracted on lookup.
#[derive(Debug, Clone)]
pub struct LeaveOneOutView<'a> {
    base: &'a SubstringIndex,
    delta: TallyMap,
}

impl CountSource for LeaveOneOutView<'_> {
    fn distribution(&self, letters: &[u8]) -> Option<Cow<'_, PronunciationDistribution>> {
        let base = self.base.table.get(letters)?;
        match self.delta.get(letters) {
            None => Some(Cow::Borrowed(base)),
            Some(sub) => {
                let mut d = base.clone();
                for (p, c) in sub {
                    d.subtract(p, *c);
                }
                (!d.is_empty()).then_some(Cow::Owned(d))
            }
        }
    }
}
