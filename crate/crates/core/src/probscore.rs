//! Estimated-probability scoring rules.
//!
//! Every candidate receives a mass that is a product of per-segment estimated
//! probabilities; masses of candidates assembling to the same pronunciation
//! are summed (uniform prior over minimal segmentations) and the highest
//! total wins.
//!
//! For overlap-one candidates a segment's estimate may be conditioned on the
//! phonemes of overlap letters already fixed by neighbouring segments. Which
//! neighbours count as "already fixed" depends on the order in which segments
//! are assigned:
//!
//! | rule    | order                                        |
//! |---------|----------------------------------------------|
//! | PROD    | no conditioning                              |
//! | CONDR   | left to right                                |
//! | CONDL   | right to left                                |
//! | CONDRL  | mean of CONDR and CONDL                      |
//! | CONDALL | mean over all `n!` orders                    |
//! | CONDF   | every overlap fixed for every segment        |
//!
//! A zero-overlap fallback junction never conditions either side.

use std::fmt::Write as _;

use thiserror::Error;

use crate::corpus::render;
use crate::index::{dist_conditional, Fraction};
use crate::lattice::{Candidate, SegmentationMode, WordLattice};
use crate::strategies::{apply_root, canonical_product, collate, Ranking, Root};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbError {
    #[error("no pronunciation candidates")]
    NoPronunciation,
    #[error("{rule} is defined on {needed} segmentations")]
    WrongMode {
        rule: &'static str,
        needed: SegmentationMode,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbRule {
    /// Non-overlapping segments, product of estimated probabilities.
    Prob,
    /// Overlapping segments, product of unconditional estimates.
    Prod,
    CondR,
    CondL,
    CondRL,
    CondAll,
    CondF,
}

impl ProbRule {
    pub const ALL: [ProbRule; 7] = [
        ProbRule::Prob,
        ProbRule::Prod,
        ProbRule::CondR,
        ProbRule::CondL,
        ProbRule::CondRL,
        ProbRule::CondAll,
        ProbRule::CondF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProbRule::Prob => "PROB",
            ProbRule::Prod => "PROD",
            ProbRule::CondR => "CONDR",
            ProbRule::CondL => "CONDL",
            ProbRule::CondRL => "CONDRL",
            ProbRule::CondAll => "CONDALL",
            ProbRule::CondF => "CONDF",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "CONDLR" => Some(ProbRule::CondRL),
            _ => Self::ALL.into_iter().find(|r| r.name() == s),
        }
    }

    pub fn required_mode(self) -> SegmentationMode {
        match self {
            ProbRule::Prob => SegmentationMode::NonOverlap,
            _ => SegmentationMode::OverlapOne,
        }
    }
}

/// Collated probability mass per assembled pronunciation (nulls retained),
/// sorted by pronunciation.
#[derive(Debug, Clone, PartialEq)]
pub struct PronunciationPosterior {
    pub masses: Vec<(Vec<u8>, f64)>,
}

impl PronunciationPosterior {
    fn from_candidates(cands: &[Candidate], masses: &[f64]) -> Self {
        let mut masses: Vec<(Vec<u8>, f64)> = collate(cands, masses)
            .into_iter()
            .map(|(k, v)| (k.to_vec(), v))
            .collect();
        masses.sort_by(|a, b| a.0.cmp(&b.0));
        Self { masses }
    }

    pub fn mass(&self, pronunciation: &[u8]) -> f64 {
        self.masses
            .iter()
            .find(|(p, _)| p == pronunciation)
            .map_or(0.0, |(_, m)| *m)
    }
}

/// Estimate for segment `k` of `cand` with its left and/or right overlap
/// letter fixed.
pub fn segment_factor(
    lattice: &WordLattice,
    cand: &Candidate,
    k: usize,
    left_fixed: bool,
    right_fixed: bool,
) -> Fraction {
    let span = lattice.segmentation_of(cand).spans[k];
    let y = &cand.pronunciations[k];
    let mut fixed = vec![None; y.len()];
    if left_fixed {
        fixed[0] = Some(y[0]);
    }
    if right_fixed {
        fixed[y.len() - 1] = Some(y[y.len() - 1]);
    }
    dist_conditional(lattice.distribution(span), y, &fixed)
}

/// Which of segment `k`'s overlaps can be conditioned on at all.
fn overlap_sides(lattice: &WordLattice, cand: &Candidate, k: usize) -> (bool, bool) {
    let seg = lattice.segmentation_of(cand);
    let n = seg.len();
    (
        k > 0 && seg.overlaps_at(k - 1),
        k + 1 < n && seg.overlaps_at(k),
    )
}

/// Factors of one fixed assignment order (`Prod`, `CondR`, `CondL`, `CondF`).
pub fn ordered_factors(rule: ProbRule, lattice: &WordLattice, cand: &Candidate) -> Vec<Fraction> {
    (0..cand.pronunciations.len())
        .map(|k| {
            let (l, r) = overlap_sides(lattice, cand, k);
            let (l, r) = match rule {
                ProbRule::Prob | ProbRule::Prod => (false, false),
                ProbRule::CondR => (l, false),
                ProbRule::CondL => (false, r),
                ProbRule::CondF => (l, r),
                ProbRule::CondRL | ProbRule::CondAll => {
                    panic!("{} averages several orders", rule.name())
                }
            };
            segment_factor(lattice, cand, k, l, r)
        })
        .collect()
}

fn rooted_product(factors: &[Fraction], root: Root) -> f64 {
    let p = canonical_product(factors.iter().map(|f| f.to_f64()).collect());
    apply_root(p, root, factors.len())
}

/// Mean over all assignment orders of the rooted product of conditional
/// estimates.
///
/// A segment's factor depends only on whether each overlapping neighbour was
/// assigned before it, i.e. on the up/down pattern of consecutive assignment
/// times. The dynamic program walks segments left to right tracking the rank
/// of the current segment's time among those seen so far; each permutation
/// corresponds to exactly one rank sequence.
#[allow(clippy::needless_range_loop)] // the DP reads clearer with explicit ranks
pub fn condall_mass(lattice: &WordLattice, cand: &Candidate, root: Root) -> f64 {
    let n = cand.pronunciations.len();
    let d = root.degree(n);
    // f[k][left as usize][right as usize]
    let f: Vec<[[f64; 2]; 2]> = (0..n)
        .map(|k| {
            let (lo, ro) = overlap_sides(lattice, cand, k);
            let mut t = [[0.0; 2]; 2];
            for l in [false, true] {
                for r in [false, true] {
                    let v = segment_factor(lattice, cand, k, l && lo, r && ro).to_f64();
                    t[l as usize][r as usize] = if d == 1.0 { v } else { v.powf(1.0 / d) };
                }
            }
            t
        })
        .collect();

    // w[r][up]: weight with segment i at rank r, `up` = segment i-1 came first
    let mut w = vec![[0.0f64; 2]; n];
    w[0][0] = 1.0;
    for i in 0..n - 1 {
        let mut next = vec![[0.0f64; 2]; n];
        for r in 0..=i {
            for up_prev in 0..2 {
                let cur = w[r][up_prev];
                if cur == 0.0 {
                    continue;
                }
                // segment i+1 after segment i: its left overlap is fixed, i's right is free
                let after = cur * f[i][up_prev][0];
                for slot in next.iter_mut().take(i + 2).skip(r + 1) {
                    slot[1] += after;
                }
                // segment i+1 before segment i: i's right overlap is fixed
                let before = cur * f[i][up_prev][1];
                for slot in next.iter_mut().take(r + 1) {
                    slot[0] += before;
                }
            }
        }
        w = next;
    }
    let total: f64 = w
        .iter()
        .map(|s| s[0] * f[n - 1][0][0] + s[1] * f[n - 1][1][0])
        .sum();
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    total / factorial
}

/// Per-candidate mass under `rule` with the root applied before any
/// averaging or collation.
pub fn candidate_mass(rule: ProbRule, lattice: &WordLattice, cand: &Candidate, root: Root) -> f64 {
    match rule {
        ProbRule::CondRL => {
            let r = rooted_product(&ordered_factors(ProbRule::CondR, lattice, cand), root);
            let l = rooted_product(&ordered_factors(ProbRule::CondL, lattice, cand), root);
            (r + l) / 2.0
        }
        ProbRule::CondAll => condall_mass(lattice, cand, root),
        _ => rooted_product(&ordered_factors(rule, lattice, cand), root),
    }
}

pub fn candidate_masses(rule: ProbRule, lattice: &WordLattice, root: Root) -> Vec<f64> {
    lattice
        .candidates()
        .iter()
        .map(|c| candidate_mass(rule, lattice, c, root))
        .collect()
}

fn check(rule: ProbRule, lattice: &WordLattice) -> Result<(), ProbError> {
    if lattice.candidates().is_empty() {
        return Err(ProbError::NoPronunciation);
    }
    if lattice.mode() != rule.required_mode() {
        return Err(ProbError::WrongMode {
            rule: rule.name(),
            needed: rule.required_mode(),
        });
    }
    Ok(())
}

/// PROB: collated products of estimated probabilities over non-overlapping
/// candidates.
pub fn prob_score(lattice: &WordLattice, root: Root) -> Result<PronunciationPosterior, ProbError> {
    check(ProbRule::Prob, lattice)?;
    let m = candidate_masses(ProbRule::Prob, lattice, root);
    Ok(PronunciationPosterior::from_candidates(
        lattice.candidates(),
        &m,
    ))
}

/// PROD and the conditional rules over overlap-one candidates.
pub fn cond_score(
    rule: ProbRule,
    lattice: &WordLattice,
    root: Root,
) -> Result<PronunciationPosterior, ProbError> {
    check(rule, lattice)?;
    let m = candidate_masses(rule, lattice, root);
    Ok(PronunciationPosterior::from_candidates(
        lattice.candidates(),
        &m,
    ))
}

/// Orders pronunciations by collated mass; ties stay together.
pub fn decide(posterior: &PronunciationPosterior) -> Ranking {
    Ranking::from_scores(posterior.masses.clone())
}

/// Text trace of every candidate's factors and the collated masses.
pub fn explain(rule: ProbRule, lattice: &WordLattice, root: Root) -> String {
    let mut out = String::new();
    let word = lattice.word();
    let _ = writeln!(
        out,
        "rule {} root {} word {}",
        rule.name(),
        root,
        render(word)
    );
    for c in lattice.candidates() {
        let seg = lattice.segmentation_of(c);
        let prons: Vec<String> = c.pronunciations.iter().map(|p| render(p)).collect();
        let _ = write!(out, "  {}  {}  ", seg.render(word), prons.join("+"));
        let join = |fs: &[Fraction]| {
            fs.iter()
                .map(|f| format!("({f})"))
                .collect::<Vec<_>>()
                .join("")
        };
        match rule {
            ProbRule::CondRL => {
                let r = ordered_factors(ProbRule::CondR, lattice, c);
                let mut l = ordered_factors(ProbRule::CondL, lattice, c);
                l.reverse();
                let _ = write!(out, "R {}  L {}  ", join(&r), join(&l));
            }
            ProbRule::CondL => {
                // in assignment order, rightmost segment first
                let mut l = ordered_factors(rule, lattice, c);
                l.reverse();
                let _ = write!(out, "{}  ", join(&l));
            }
            ProbRule::CondAll => {
                let _ = write!(
                    out,
                    "mean over {} orders  ",
                    (1..=c.counts.len()).product::<usize>()
                );
            }
            _ => {
                let _ = write!(out, "{}  ", join(&ordered_factors(rule, lattice, c)));
            }
        }
        let _ = writeln!(out, "= {:.6}", candidate_mass(rule, lattice, c, root));
    }
    let m = candidate_masses(rule, lattice, root);
    let ranking = decide(&PronunciationPosterior::from_candidates(
        lattice.candidates(),
        &m,
    ));
    let _ = writeln!(out, "collated:");
    for (p, v) in &ranking.entries {
        let _ = writeln!(out, "  {}  {:.6}", render(p), v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::BOUNDARY;
    use crate::index::SubstringIndex;
    use crate::lattice::LatticeOptions;

    fn k(s: &str) -> Vec<u8> {
        s.bytes()
            .map(|b| if b == b'#' { BOUNDARY } else { b })
            .collect()
    }

    #[test]
    fn two_segments_condall_equals_condrl() {
        let src = SubstringIndex::from_counts([
            (k("#ab"), k("#xy"), 3),
            (k("#ab"), k("#xz"), 2),
            (k("b#"), k("y#"), 4),
            (k("b#"), k("z#"), 1),
            (k("b#"), k("w#"), 7),
        ]);
        let lat = WordLattice::build(
            &k("#ab#"),
            &src,
            SegmentationMode::OverlapOne,
            &LatticeOptions::default(),
        )
        .unwrap();
        for c in lat.candidates() {
            for root in [Root::Degree(1.0), Root::Degree(3.0), Root::Segments] {
                let all = candidate_mass(ProbRule::CondAll, &lat, c, root);
                let rl = candidate_mass(ProbRule::CondRL, &lat, c, root);
                assert!((all - rl).abs() < 1e-12 * rl.max(1e-300), "{all} vs {rl}");
            }
        }
    }

    #[test]
    fn mode_is_checked() {
        let src = SubstringIndex::from_counts([(k("#a#"), k("#x#"), 1)]);
        let lat = WordLattice::build(
            &k("#a#"),
            &src,
            SegmentationMode::NonOverlap,
            &LatticeOptions::default(),
        )
        .unwrap();
        assert!(prob_score(&lat, Root::default()).is_ok());
        assert_eq!(
            cond_score(ProbRule::CondF, &lat, Root::default()).unwrap_err(),
            ProbError::WrongMode {
                rule: "CONDF",
                needed: SegmentationMode::OverlapOne
            }
        );
        let post = prob_score(&lat, Root::default()).unwrap();
        assert_eq!(post.masses.len(), 1);
        assert_eq!(post.masses[0].1, 0.5);
        let ranking = decide(&post);
        assert_eq!(ranking.best().len(), 1);
    }
}
