//! Leave-one-out evaluation.
//!
//! Each word is pronounced from an index view that excludes it. Null phonemes
//! and padding are stripped from both the output and the reference before
//! comparison. When several pronunciations share the best score the word gets
//! fractional credit: the share of the tie set that is correct.

use std::time::Instant;

use rayon::prelude::*;

use crate::corpus::{render, strip_nulls, AlignedEntry, Direction, Lexicon};
use crate::index::{CountSource, SubstringIndex};
use crate::lattice::{LatticeError, LatticeOptions, SegmentationMode, WordLattice};
use crate::strategies::{canonical_sum, rank_pronunciations, StrategySpec};

/// Unit-cost edit distance.
pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// How per-word phoneme errors are turned into a corpus percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhoneAggregation {
    /// Mean of per-word `max(0, 1 - distance / length)`.
    #[default]
    PerWord,
    /// `1 - total distance / total reference length`.
    Corpus,
}

impl PhoneAggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            PhoneAggregation::PerWord => "perword",
            PhoneAggregation::Corpus => "corpus",
        }
    }
}

impl std::str::FromStr for PhoneAggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "perword" => Ok(PhoneAggregation::PerWord),
            "corpus" => Ok(PhoneAggregation::Corpus),
            other => Err(format!("unknown phone aggregation {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvalOptions {
    pub mode: SegmentationMode,
    pub lattice: LatticeOptions,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
    pub phone_agg: PhoneAggregation,
}

/// What picks the winning pronunciations of a word.
#[derive(Debug, Clone, PartialEq)]
pub enum Selector {
    Strategy(StrategySpec),
    /// Every distinct candidate pronunciation ties.
    LowerBound,
    /// The candidates closest to the reference in edit distance.
    UpperBound,
}

impl Selector {
    pub fn label(&self) -> String {
        match self {
            Selector::Strategy(
                s @ (StrategySpec::Product { collate: false, .. }
                | StrategySpec::Probabilistic { collate: false, .. }),
            ) => format!("{s}/nocollate"),
            Selector::Strategy(s) => s.to_string(),
            Selector::LowerBound => "LOWER".into(),
            Selector::UpperBound => "UPPER".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordResult {
    /// Input word, unpadded.
    pub word: String,
    /// Reference with nulls stripped.
    pub reference: String,
    /// Stripped pronunciations of the best-scoring tie set.
    pub outputs: Vec<String>,
    pub tie_set_size: usize,
    pub correct_in_tie: usize,
    pub word_credit: f64,
    /// Edit distance averaged over the tie set.
    pub edit_distance: f64,
    pub reference_len: usize,
    pub phoneme_credit: f64,
    pub silenced: bool,
    pub diagnostic: Option<String>,
}

impl WordResult {
    fn silenced(entry: &AlignedEntry, reference: Vec<u8>, diagnostic: String) -> Self {
        Self {
            word: render(entry.inner_letters()),
            reference: render(&reference),
            outputs: Vec::new(),
            tie_set_size: 0,
            correct_in_tie: 0,
            word_credit: 0.0,
            edit_distance: reference.len() as f64,
            reference_len: reference.len(),
            phoneme_credit: 0.0,
            silenced: true,
            diagnostic: Some(diagnostic),
        }
    }
}

/// Credits a tie set of assembled pronunciations against the reference.
fn credit(entry: &AlignedEntry, reference: Vec<u8>, tie: Vec<Vec<u8>>) -> WordResult {
    let outputs: Vec<Vec<u8>> = tie.iter().map(|p| strip_nulls(p)).collect();
    let n = outputs.len();
    let correct = outputs.iter().filter(|o| **o == reference).count();
    let len = reference.len();
    let dists: Vec<usize> = outputs.iter().map(|o| levenshtein(o, &reference)).collect();
    let per_credit = |d: usize| {
        if len == 0 {
            f64::from(u8::from(d == 0))
        } else {
            (1.0 - d as f64 / len as f64).max(0.0)
        }
    };
    WordResult {
        word: render(entry.inner_letters()),
        reference: render(&reference),
        outputs: outputs.iter().map(|o| render(o)).collect(),
        tie_set_size: n,
        correct_in_tie: correct,
        word_credit: correct as f64 / n as f64,
        edit_distance: dists.iter().sum::<usize>() as f64 / n as f64,
        reference_len: len,
        phoneme_credit: dists.iter().map(|&d| per_credit(d)).sum::<f64>() / n as f64,
        silenced: false,
        diagnostic: None,
    }
}

/// Scores one word against `view`, which must not contain the word itself
/// for a leave-one-out result.
pub fn score_word<S: CountSource + ?Sized>(
    entry: &AlignedEntry,
    view: &S,
    selector: &Selector,
    options: &EvalOptions,
) -> WordResult {
    let reference = strip_nulls(entry.phonemes());
    let mode = match selector {
        Selector::Strategy(s) => s.required_mode().unwrap_or(options.mode),
        _ => options.mode,
    };
    let lattice = match WordLattice::build(entry.letters(), view, mode, &options.lattice) {
        Ok(l) => l,
        Err(e) => {
            if matches!(e, LatticeError::CandidateLimit { .. }) {
                log::warn!("{e}");
            }
            return WordResult::silenced(entry, reference, e.to_string());
        }
    };
    let mut distinct: Vec<Vec<u8>> = lattice
        .candidates()
        .iter()
        .map(|c| c.assembled.clone())
        .collect();
    distinct.sort();
    distinct.dedup();
    let tie = match selector {
        Selector::Strategy(spec) => match rank_pronunciations(&lattice, spec) {
            Ok(r) => r.best().iter().map(|(p, _)| p.clone()).collect(),
            Err(e) => return WordResult::silenced(entry, reference, e.to_string()),
        },
        Selector::LowerBound => distinct,
        Selector::UpperBound => {
            let d: Vec<usize> = distinct
                .iter()
                .map(|p| levenshtein(&strip_nulls(p), &reference))
                .collect();
            let best = *d.iter().min().unwrap();
            distinct
                .into_iter()
                .zip(d)
                .filter(|(_, x)| *x == best)
                .map(|(p, _)| p)
                .collect()
        }
    };
    credit(entry, reference, tie)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub direction: Direction,
    pub strategy: String,
    pub mode: SegmentationMode,
    pub root: String,
    pub collate: bool,
    pub phone_agg: PhoneAggregation,
    pub word_accuracy: f64,
    /// Phoneme accuracy (letter accuracy for speech-to-text), percent.
    pub phoneme_accuracy: f64,
    pub silenced: usize,
    pub words: Vec<WordResult>,
    pub wall_ms: u128,
}

impl EvaluationReport {
    /// Same report with timing cleared, for equality checks.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_ms: 0,
            ..self.clone()
        }
    }
}

fn aggregate(words: &[WordResult], agg: PhoneAggregation) -> (f64, f64) {
    // summing in sorted order makes the totals independent of word order
    let sum = |f: &dyn Fn(&WordResult) -> f64| canonical_sum(words.iter().map(f).collect());
    let n = words.len().max(1) as f64;
    let word_acc = 100.0 * sum(&|w| w.word_credit) / n;
    let phone_acc = match agg {
        PhoneAggregation::PerWord => 100.0 * sum(&|w| w.phoneme_credit) / n,
        PhoneAggregation::Corpus => {
            let len = sum(&|w| w.reference_len as f64);
            if len == 0.0 {
                0.0
            } else {
                100.0 * (1.0 - sum(&|w| w.edit_distance) / len)
            }
        }
    };
    (word_acc, phone_acc)
}

fn run_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    if jobs == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(e) => {
            log::warn!("could not build a {jobs}-thread pool ({e}); using the global pool");
            f()
        }
    }
}

/// Leave-one-out evaluation of every lexicon entry against a prebuilt index
/// of the whole lexicon.
pub fn evaluate_with_index(
    lexicon: &Lexicon,
    index: &SubstringIndex,
    selector: &Selector,
    options: &EvalOptions,
) -> EvaluationReport {
    let start = Instant::now();
    let words: Vec<WordResult> = run_pool(options.jobs, || {
        lexicon
            .entries()
            .par_iter()
            .map(|e| score_word(e, &index.leave_one_out(e), selector, options))
            .collect()
    });
    let (word_accuracy, phoneme_accuracy) = aggregate(&words, options.phone_agg);
    let (mode, root, collate) = match selector {
        Selector::Strategy(s) => (
            s.required_mode().unwrap_or(options.mode),
            s.root().to_string(),
            s.collates(),
        ),
        _ => (options.mode, "1".to_string(), false),
    };
    EvaluationReport {
        direction: lexicon.direction(),
        strategy: selector.label(),
        mode,
        root,
        collate,
        phone_agg: options.phone_agg,
        word_accuracy,
        phoneme_accuracy,
        silenced: words.iter().filter(|w| w.silenced).count(),
        words,
        wall_ms: start.elapsed().as_millis(),
    }
}

/// Builds the index and runs [`evaluate_with_index`] for one strategy.
pub fn evaluate_corpus(
    lexicon: &Lexicon,
    strategy: &StrategySpec,
    options: &EvalOptions,
) -> EvaluationReport {
    let index = SubstringIndex::build(lexicon.entries());
    evaluate_with_index(
        lexicon,
        &index,
        &Selector::Strategy(strategy.clone()),
        options,
    )
}

/// Lower (random tie-breaking) and upper (edit-distance oracle) accuracy
/// bounds under the shortest-path restriction.
pub fn bounds(
    lexicon: &Lexicon,
    index: &SubstringIndex,
    options: &EvalOptions,
) -> (EvaluationReport, EvaluationReport) {
    (
        evaluate_with_index(lexicon, index, &Selector::LowerBound, options),
        evaluate_with_index(lexicon, index, &Selector::UpperBound, options),
    )
}
