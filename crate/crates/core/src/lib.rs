//! Pronunciation by analogy.
//!
//! A lexicon of letter/phoneme-aligned words is indexed by every substring.
//! An unseen word is segmented into the fewest pieces found in the index,
//! each piece contributes its observed pronunciations, and a scoring rule
//! picks among the assembled candidates.
//!
//! * [`corpus`] parses and filters NETtalk-format lexicons.
//! * [`index`] counts substring pronunciations and serves leave-one-out views.
//! * [`lattice`] finds minimal segmentations and expands candidates.
//! * [`strategies`] holds the classic arc-frequency heuristics and their
//!   rank combination.
//! * [`probscore`] holds the estimated-probability rules.
//! * [`evaluation`] runs leave-one-out accuracy and bound computations.
//! * [`report`] writes and reads the TSV outputs.

pub mod corpus;
pub mod evaluation;
pub mod index;
pub mod lattice;
pub mod probscore;
pub mod report;
pub mod strategies;

pub use corpus::{AlignedEntry, Direction, FilterOptions, HomophoneRule, Lexicon};
pub use evaluation::{EvalOptions, EvaluationReport, PhoneAggregation, Selector, WordResult};
pub use index::{
    CountSource, Fraction, LeaveOneOutView, PronunciationDistribution, SubstringIndex,
};
pub use lattice::{Candidate, LatticeOptions, Segmentation, SegmentationMode, WordLattice};
pub use probscore::ProbRule;
pub use strategies::{Component, Ranking, Root, StrategySpec};
