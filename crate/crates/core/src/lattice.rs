//! Segmentations with the minimum number of segments, and their expansion
//! into pronunciation candidates.
//!
//! Two lattices are supported. In [`SegmentationMode::OverlapOne`] adjacent
//! segments share one letter whose phoneme must agree; in
//! [`SegmentationMode::NonOverlap`] segments meet at junctures between letters.
//! Enumeration is a shortest-path search over `(position, phoneme)` states, so
//! a segmentation is only returned when at least one overlap-consistent
//! pronunciation exists for it.
//!
//! When no overlap-one path exists (the "silence" case), the search is
//! repeated allowing exactly one zero-overlap junction anywhere in the word.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::corpus::{render, BOUNDARY};
use crate::index::{CountSource, PronunciationDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum SegmentationMode {
    #[default]
    OverlapOne,
    NonOverlap,
}

impl SegmentationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentationMode::OverlapOne => "overlap1",
            SegmentationMode::NonOverlap => "nonoverlap",
        }
    }
}

impl fmt::Display for SegmentationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SegmentationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "overlap1" | "overlap-one" => Ok(SegmentationMode::OverlapOne),
            "nonoverlap" | "non-overlap" => Ok(SegmentationMode::NonOverlap),
            other => Err(format!(
                "unknown mode {other:?} (expected overlap1 or nonoverlap)"
            )),
        }
    }
}

/// Which zero-overlap junction placements survive when the fallback is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FallbackPolicy {
    #[default]
    AllPlacements,
    Leftmost,
}

impl FallbackPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            FallbackPolicy::AllPlacements => "all",
            FallbackPolicy::Leftmost => "leftmost",
        }
    }
}

impl std::str::FromStr for FallbackPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(FallbackPolicy::AllPlacements),
            "leftmost" => Ok(FallbackPolicy::Leftmost),
            other => Err(format!("unknown fallback policy {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LatticeOptions {
    pub fallback: FallbackPolicy,
    /// Refuse words with more candidates than this. `None` = unlimited.
    pub candidate_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("no pronunciation: no feasible segmentation of {0}")]
    NoPronunciation(String),
    #[error("{word} has more than {limit} candidates")]
    CandidateLimit { word: String, limit: usize },
    #[error("{0:?} is not a boundary-padded word")]
    NotPadded(String),
}

/// Inclusive range of padded-word positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segmentation {
    pub spans: Vec<Span>,
    pub mode: SegmentationMode,
    /// Index `k` of the zero-overlap junction between `spans[k]` and `spans[k + 1]`.
    pub fallback_junction: Option<usize>,
}

impl Segmentation {
    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Whether segments `k` and `k + 1` share a letter.
    pub fn overlaps_at(&self, k: usize) -> bool {
        self.mode == SegmentationMode::OverlapOne && self.fallback_junction != Some(k)
    }

    /// `#lon+nge+evity#`-style rendering.
    pub fn render(&self, word: &[u8]) -> String {
        self.spans
            .iter()
            .map(|s| render(&word[s.start..=s.end]))
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// One pronunciation per segment, agreeing on every overlap letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Candidate {
    /// Index into the segmentation list the candidate was expanded from.
    pub segmentation: usize,
    pub pronunciations: Vec<Box<[u8]>>,
    /// Arc frequency of each segment pronunciation.
    pub counts: Vec<u32>,
    /// Full padded pronunciation.
    pub assembled: Vec<u8>,
}

/// Distributions of every substring of one word, looked up once.
#[derive(Debug, Clone)]
pub struct SpanTable {
    len: usize,
    cells: Vec<Option<PronunciationDistribution>>,
}

impl SpanTable {
    pub fn new<S: CountSource + ?Sized>(word: &[u8], source: &S) -> Self {
        let len = word.len();
        let mut cells = vec![None; len * len];
        for a in 0..len {
            for b in a..len {
                cells[a * len + b] = source.distribution(&word[a..=b]).map(|c| c.into_owned());
            }
        }
        Self { len, cells }
    }

    pub fn get(&self, span: Span) -> Option<&PronunciationDistribution> {
        self.cells[span.start * self.len + span.end].as_ref()
    }

    fn at(&self, a: usize, b: usize) -> Option<&PronunciationDistribution> {
        self.cells[a * self.len + b].as_ref()
    }
}

const UNREACHABLE: usize = usize::MAX;

fn check_padded(word: &[u8]) -> Result<(), LatticeError> {
    let ok = word.len() >= 3
        && word[0] == BOUNDARY
        && word[word.len() - 1] == BOUNDARY
        && !word[1..word.len() - 1].contains(&BOUNDARY);
    if ok {
        Ok(())
    } else {
        Err(LatticeError::NotPadded(render(word)))
    }
}

/// All feasible segmentations of `word` with the minimum segment count, in
/// lexicographic order of their spans.
pub fn enumerate_segmentations<S: CountSource + ?Sized>(
    word: &[u8],
    source: &S,
    mode: SegmentationMode,
    policy: FallbackPolicy,
) -> Result<Vec<Segmentation>, LatticeError> {
    check_padded(word)?;
    let table = SpanTable::new(word, source);
    segmentations_from_table(word, &table, mode, policy)
}

fn segmentations_from_table(
    word: &[u8],
    table: &SpanTable,
    mode: SegmentationMode,
    policy: FallbackPolicy,
) -> Result<Vec<Segmentation>, LatticeError> {
    let mut out = match mode {
        SegmentationMode::NonOverlap => NonOverlapSearch::new(table).run(),
        SegmentationMode::OverlapOne => {
            let strict = OverlapSearch::new(table, false).run();
            if strict.is_empty() {
                let mut relaxed = OverlapSearch::new(table, true).run();
                if policy == FallbackPolicy::Leftmost {
                    let junction_pos =
                        |s: &Segmentation| s.fallback_junction.map(|k| s.spans[k].end);
                    if let Some(first) = relaxed.iter().filter_map(junction_pos).min() {
                        relaxed.retain(|s| junction_pos(s) == Some(first));
                    }
                }
                relaxed
            } else {
                strict
            }
        }
    };
    if out.is_empty() {
        return Err(LatticeError::NoPronunciation(render(word)));
    }
    out.sort();
    Ok(out)
}

struct NonOverlapSearch<'t> {
    table: &'t SpanTable,
    // minimum segments covering positions p..len
    rest: Vec<usize>,
}

impl<'t> NonOverlapSearch<'t> {
    fn new(table: &'t SpanTable) -> Self {
        let n = table.len;
        let mut rest = vec![UNREACHABLE; n + 1];
        rest[n] = 0;
        for p in (0..n).rev() {
            for b in p..n {
                if table.at(p, b).is_some() && rest[b + 1] != UNREACHABLE {
                    rest[p] = rest[p].min(1 + rest[b + 1]);
                }
            }
        }
        Self { table, rest }
    }

    fn run(&self) -> Vec<Segmentation> {
        let mut out = Vec::new();
        if self.rest[0] == UNREACHABLE {
            return out;
        }
        let mut spans = Vec::new();
        self.walk(0, &mut spans, &mut out);
        out
    }

    fn walk(&self, p: usize, spans: &mut Vec<Span>, out: &mut Vec<Segmentation>) {
        let n = self.table.len;
        if p == n {
            out.push(Segmentation {
                spans: spans.clone(),
                mode: SegmentationMode::NonOverlap,
                fallback_junction: None,
            });
            return;
        }
        for b in p..n {
            if self.table.at(p, b).is_some() && self.rest[b + 1] == self.rest[p] - 1 {
                spans.push(Span::new(p, b));
                self.walk(b + 1, spans, out);
                spans.pop();
            }
        }
    }
}

struct OverlapSearch<'t> {
    table: &'t SpanTable,
    fallback: bool,
    memo: HashMap<(usize, u8, bool), usize>,
}

impl<'t> OverlapSearch<'t> {
    fn new(table: &'t SpanTable, fallback: bool) -> Self {
        Self {
            table,
            fallback,
            memo: HashMap::new(),
        }
    }

    fn last(&self) -> usize {
        self.table.len - 1
    }

    /// Whether `(a, b)` may follow a zero-overlap junction. One-letter spans
    /// are only useful at the word edges.
    fn after_junction_ok(&self, a: usize, b: usize) -> bool {
        b > a || b == self.last()
    }

    /// Minimum number of further segments after a segment ended at `p` with
    /// phoneme `ph`.
    fn rest(&mut self, p: usize, ph: u8, used: bool) -> usize {
        if p == self.last() {
            return 0;
        }
        if let Some(&r) = self.memo.get(&(p, ph, used)) {
            return r;
        }
        let mut best = UNREACHABLE;
        let table = self.table;
        for b in p + 1..table.len {
            if let Some(d) = table.at(p, b) {
                for (y, _) in d.iter() {
                    if y[0] == ph {
                        best = best.min(self.rest(b, y[y.len() - 1], used).saturating_add(1));
                    }
                }
            }
        }
        if self.fallback && !used {
            best = best.min(self.rest_after_junction(p + 1));
        }
        self.memo.insert((p, ph, used), best);
        best
    }

    /// Segments needed when the next segment starts at `a` after the junction.
    fn rest_after_junction(&mut self, a: usize) -> usize {
        let table = self.table;
        let mut best = UNREACHABLE;
        for b in a..table.len {
            if !self.after_junction_ok(a, b) {
                continue;
            }
            if let Some(d) = table.at(a, b) {
                for (y, _) in d.iter() {
                    best = best.min(self.rest(b, y[y.len() - 1], true).saturating_add(1));
                }
            }
        }
        best
    }

    fn run(&mut self) -> Vec<Segmentation> {
        let table = self.table;
        let mut total = UNREACHABLE;
        let mut firsts: Vec<(usize, Vec<u8>)> = Vec::new();
        for b in 1..table.len {
            if let Some(d) = table.at(0, b) {
                let ends = end_set(d.iter().map(|(y, _)| y));
                let r = ends
                    .iter()
                    .map(|&ph| self.rest(b, ph, false))
                    .min()
                    .unwrap_or(UNREACHABLE);
                total = total.min(r.saturating_add(1));
                firsts.push((b, ends));
            }
        }
        // a lone leading boundary, only usable before the junction
        let lone_start = self.fallback && table.at(0, 0).is_some();
        if lone_start {
            total = total.min(self.rest_after_junction(1).saturating_add(1));
        }
        let mut out = Vec::new();
        if total == UNREACHABLE {
            return out;
        }
        let mut spans = Vec::new();
        for (b, ends) in firsts {
            spans.push(Span::new(0, b));
            self.walk(b, &ends, false, None, total, &mut spans, &mut out);
            spans.pop();
        }
        if lone_start {
            spans.push(Span::new(0, 0));
            self.walk_after_junction(1, Some(0), total, &mut spans, &mut out);
            spans.pop();
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &mut self,
        p: usize,
        phones: &[u8],
        used: bool,
        junction: Option<usize>,
        total: usize,
        spans: &mut Vec<Span>,
        out: &mut Vec<Segmentation>,
    ) {
        let depth = spans.len();
        if p == self.last() {
            if depth == total {
                out.push(Segmentation {
                    spans: spans.clone(),
                    mode: SegmentationMode::OverlapOne,
                    fallback_junction: junction,
                });
            }
            return;
        }
        let table = self.table;
        for b in p + 1..table.len {
            let Some(d) = table.at(p, b) else { continue };
            let next = end_set(d.iter().map(|(y, _)| y).filter(|y| phones.contains(&y[0])));
            if next.is_empty() {
                continue;
            }
            let r = next
                .iter()
                .map(|&ph| self.rest(b, ph, used))
                .min()
                .unwrap_or(UNREACHABLE);
            if r != UNREACHABLE && depth + 1 + r == total {
                spans.push(Span::new(p, b));
                self.walk(b, &next, used, junction, total, spans, out);
                spans.pop();
            }
        }
        if self.fallback && !used {
            let r = self.rest_after_junction(p + 1);
            if r != UNREACHABLE && depth + r == total {
                self.walk_after_junction(p + 1, Some(depth - 1), total, spans, out);
            }
        }
    }

    fn walk_after_junction(
        &mut self,
        a: usize,
        junction: Option<usize>,
        total: usize,
        spans: &mut Vec<Span>,
        out: &mut Vec<Segmentation>,
    ) {
        let depth = spans.len();
        let table = self.table;
        for b in a..table.len {
            if !self.after_junction_ok(a, b) {
                continue;
            }
            let Some(d) = table.at(a, b) else { continue };
            let next = end_set(d.iter().map(|(y, _)| y));
            let r = next
                .iter()
                .map(|&ph| self.rest(b, ph, true))
                .min()
                .unwrap_or(UNREACHABLE);
            if r != UNREACHABLE && depth + 1 + r == total {
                spans.push(Span::new(a, b));
                self.walk(b, &next, true, junction, total, spans, out);
                spans.pop();
            }
        }
    }
}

fn end_set<'a>(prons: impl Iterator<Item = &'a [u8]>) -> Vec<u8> {
    let mut v: Vec<u8> = prons.map(|y| y[y.len() - 1]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Expands each segmentation into its overlap-consistent candidates, in
/// segmentation order and then lexicographic order of segment pronunciations.
pub fn expand_candidates<S: CountSource + ?Sized>(
    word: &[u8],
    segmentations: &[Segmentation],
    source: &S,
    limit: Option<usize>,
) -> Result<Vec<Candidate>, LatticeError> {
    let table = SpanTable::new(word, source);
    expand_from_table(word, segmentations, &table, limit)
}

fn expand_from_table(
    word: &[u8],
    segmentations: &[Segmentation],
    table: &SpanTable,
    limit: Option<usize>,
) -> Result<Vec<Candidate>, LatticeError> {
    let mut out = Vec::new();
    let mut exceeded = false;
    for (i, seg) in segmentations.iter().enumerate() {
        let dists: Option<Vec<&PronunciationDistribution>> =
            seg.spans.iter().map(|&s| table.get(s)).collect();
        let Some(dists) = dists else { continue };
        let mut chosen: Vec<(&[u8], u32)> = Vec::with_capacity(seg.len());
        expand_one(seg, &dists, &mut chosen, &mut |chosen| {
            if limit.is_some_and(|l| out.len() >= l) {
                exceeded = true;
                return false;
            }
            let mut assembled = vec![0u8; word.len()];
            for (span, (y, _)) in seg.spans.iter().zip(chosen) {
                assembled[span.start..=span.end].copy_from_slice(y);
            }
            out.push(Candidate {
                segmentation: i,
                pronunciations: chosen.iter().map(|(y, _)| Box::from(*y)).collect(),
                counts: chosen.iter().map(|(_, c)| *c).collect(),
                assembled,
            });
            true
        });
        if exceeded {
            return Err(LatticeError::CandidateLimit {
                word: render(word),
                limit: limit.unwrap_or_default(),
            });
        }
    }
    Ok(out)
}

/// Receives each complete choice of (pronunciation, count) per segment; `false` stops.
type Emit<'e, 'd> = dyn FnMut(&[(&'d [u8], u32)]) -> bool + 'e;

fn expand_one<'d>(
    seg: &Segmentation,
    dists: &[&'d PronunciationDistribution],
    chosen: &mut Vec<(&'d [u8], u32)>,
    emit: &mut Emit<'_, 'd>,
) -> bool {
    let k = chosen.len();
    if k == dists.len() {
        return emit(chosen);
    }
    for (y, c) in dists[k].iter() {
        if k > 0 && seg.overlaps_at(k - 1) {
            let prev = chosen[k - 1].0;
            if prev[prev.len() - 1] != y[0] {
                continue;
            }
        }
        chosen.push((y, c));
        let go_on = expand_one(seg, dists, chosen, emit);
        chosen.pop();
        if !go_on {
            return false;
        }
    }
    true
}

/// Everything needed to score one word: its minimal segmentations,
/// their candidates and the distributions of the segments involved.
#[derive(Debug, Clone)]
pub struct WordLattice {
    word: Vec<u8>,
    mode: SegmentationMode,
    table: SpanTable,
    segmentations: Vec<Segmentation>,
    candidates: Vec<Candidate>,
}

impl WordLattice {
    pub fn build<S: CountSource + ?Sized>(
        word: &[u8],
        source: &S,
        mode: SegmentationMode,
        options: &LatticeOptions,
    ) -> Result<Self, LatticeError> {
        check_padded(word)?;
        let table = SpanTable::new(word, source);
        let segmentations = segmentations_from_table(word, &table, mode, options.fallback)?;
        let candidates = expand_from_table(word, &segmentations, &table, options.candidate_limit)?;
        if candidates.is_empty() {
            return Err(LatticeError::NoPronunciation(render(word)));
        }
        Ok(Self {
            word: word.to_vec(),
            mode,
            table,
            segmentations,
            candidates,
        })
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn mode(&self) -> SegmentationMode {
        self.mode
    }

    pub fn segmentations(&self) -> &[Segmentation] {
        &self.segmentations
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn segmentation_of(&self, c: &Candidate) -> &Segmentation {
        &self.segmentations[c.segmentation]
    }

    /// Distribution of a segment's letter string (present for every span used
    /// by a candidate).
    pub fn distribution(&self, span: Span) -> &PronunciationDistribution {
        self.table
            .get(span)
            .expect("lattice spans always have a distribution")
    }

    /// Minimum segment count shared by all candidates.
    pub fn segment_count(&self) -> usize {
        self.segmentations[0].len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BOUNDARY;
    use crate::index::SubstringIndex;

    fn k(s: &str) -> Vec<u8> {
        s.bytes()
            .map(|b| if b == b'#' { BOUNDARY } else { b })
            .collect()
    }

    fn longevity_source() -> SubstringIndex {
        let rows: &[(&str, &[(&str, u32)])] = &[
            ("#longe", &[("#lcGg-", 1)]),
            ("#long", &[("#lcG-", 4), ("#lanJ", 2), ("#lcGg", 1)]),
            ("#lon", &[("#lcG", 5), ("#lan", 2), ("#lon", 1)]),
            (
                "nge",
                &[
                    ("nJ-", 54),
                    ("nJx", 18),
                    ("Gg-", 12),
                    ("nJE", 9),
                    ("nJi", 9),
                ],
            ),
            ("ge", &[("J-", 284), ("JE", 80), ("gE", 11), ("-x", 8)]),
            ("ev", &[("Ev", 83), ("-v", 24)]),
            ("evi", &[("-vI", 2), ("-v-", 1), ("Evi", 1)]),
            ("evity#", &[("Evxti#", 2)]),
            ("vity#", &[("vxti#", 22)]),
            ("ity#", &[("xti#", 421), ("Iti#", 2)]),
        ];
        SubstringIndex::from_counts(
            rows.iter()
                .flat_map(|(x, ys)| ys.iter().map(move |(y, c)| (k(x), k(y), *c))),
        )
    }

    #[test]
    fn longevity_segmentations_partial_table() {
        let src = longevity_source();
        let segs = enumerate_segmentations(
            &k("#longevity#"),
            &src,
            SegmentationMode::OverlapOne,
            FallbackPolicy::AllPlacements,
        )
        .unwrap();
        let word = k("#longevity#");
        let mut got: Vec<_> = segs.iter().map(|s| s.render(&word)).collect();
        got.sort();
        assert_eq!(
            got,
            [
                "#lon+nge+evity#",
                "#long+ge+evity#",
                "#longe+ev+vity#",
                "#longe+evi+ity#"
            ]
        );
        assert!(segs.iter().all(|s| s.fallback_junction.is_none()));
    }

    #[test]
    fn whole_word_in_index_gives_one_segment() {
        let src = SubstringIndex::from_counts([(k("#ab#"), k("#xy#"), 1), (k("#a"), k("#x"), 1)]);
        for mode in [SegmentationMode::OverlapOne, SegmentationMode::NonOverlap] {
            let segs =
                enumerate_segmentations(&k("#ab#"), &src, mode, FallbackPolicy::AllPlacements)
                    .unwrap();
            assert_eq!(segs.len(), 1);
            assert_eq!(segs[0].spans, vec![Span::new(0, 3)]);
        }
    }

    #[test]
    fn fallback_engages_when_no_overlap_path() {
        // "#ac" and "cd#" never share c's pronunciation context through "cd"
        let src = SubstringIndex::from_counts([
            (k("#ac"), k("#@k"), 3),
            (k("d#"), k("d#"), 4),
            (k("#"), k("#"), 8),
        ]);
        let word = k("#acd#");
        let segs = enumerate_segmentations(
            &word,
            &src,
            SegmentationMode::OverlapOne,
            FallbackPolicy::AllPlacements,
        )
        .unwrap();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].render(&word), "#ac+d#");
        assert_eq!(segs[0].fallback_junction, Some(0));
        let cands = expand_candidates(&word, &segs, &src, None).unwrap();
        assert_eq!(cands.len(), 1);
        assert_eq!(render(&cands[0].assembled), "#@kd#");
    }

    #[test]
    fn fallback_policies() {
        // junction possible after "#a" or after "#ab"
        let src = SubstringIndex::from_counts([
            (k("#a"), k("#a"), 1),
            (k("#ab"), k("#ab"), 1),
            (k("bc#"), k("Bc#"), 1),
            (k("c#"), k("c#"), 1),
        ]);
        let word = k("#abc#");
        let all = enumerate_segmentations(
            &word,
            &src,
            SegmentationMode::OverlapOne,
            FallbackPolicy::AllPlacements,
        )
        .unwrap();
        let rendered: Vec<_> = all.iter().map(|s| s.render(&word)).collect();
        assert_eq!(rendered, ["#a+bc#", "#ab+c#"]);
        let left = enumerate_segmentations(
            &word,
            &src,
            SegmentationMode::OverlapOne,
            FallbackPolicy::Leftmost,
        )
        .unwrap();
        assert_eq!(left.len(), 1);
        assert_eq!(left[0].render(&word), "#a+bc#");
    }

    #[test]
    fn silence_when_nothing_fits() {
        let src = SubstringIndex::from_counts([(k("#a"), k("#a"), 1)]);
        let err = enumerate_segmentations(
            &k("#ab#"),
            &src,
            SegmentationMode::OverlapOne,
            FallbackPolicy::AllPlacements,
        )
        .unwrap_err();
        assert!(matches!(err, LatticeError::NoPronunciation(_)));
    }

    #[test]
    fn singleton_pronunciations_give_one_candidate_each() {
        let src = SubstringIndex::from_counts([
            (k("#a"), k("#x"), 2),
            (k("ab"), k("xy"), 3),
            (k("b#"), k("y#"), 5),
            (k("#ab"), k("#xy"), 1),
        ]);
        let word = k("#ab#");
        let lat = WordLattice::build(
            &word,
            &src,
            SegmentationMode::OverlapOne,
            &LatticeOptions::default(),
        )
        .unwrap();
        assert_eq!(lat.segment_count(), 2);
        assert_eq!(lat.candidates().len(), lat.segmentations().len());
    }

    #[test]
    fn candidate_limit_is_reported() {
        let src = SubstringIndex::from_counts([
            (k("#a"), k("#x"), 1),
            (k("#a"), k("#y"), 1),
            (k("a#"), k("x#"), 1),
            (k("a#"), k("y#"), 1),
        ]);
        let word = k("#a#");
        let opts = LatticeOptions {
            candidate_limit: Some(1),
            ..Default::default()
        };
        let err = WordLattice::build(&word, &src, SegmentationMode::OverlapOne, &opts).unwrap_err();
        assert!(matches!(err, LatticeError::CandidateLimit { limit: 1, .. }));
        let opts = LatticeOptions {
            candidate_limit: Some(2),
            ..Default::default()
        };
        assert_eq!(
            WordLattice::build(&word, &src, SegmentationMode::OverlapOne, &opts)
                .unwrap()
                .candidates()
                .len(),
            2
        );
    }

    #[test]
    fn rejects_unpadded_words() {
        let src = SubstringIndex::default();
        assert!(matches!(
            enumerate_segmentations(
                b"ab",
                &src,
                SegmentationMode::NonOverlap,
                Default::default()
            ),
            Err(LatticeError::NotPadded(_))
        ));
    }
}
