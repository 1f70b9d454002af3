//! Candidate scoring strategies built on arc frequencies.
//!
//! The eleven component strategies rank candidates; a multi-component
//! strategy awards `N - rank + 1` points per component and multiplies (or
//! adds) them. The product family scores each candidate by a product of
//! per-segment factors, optionally rooted and collated.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::lattice::{Candidate, SegmentationMode, WordLattice};
use crate::probscore::{self, ProbRule};

/// Relative tolerance under which two scores count as tied.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("no candidates to score")]
    NoCandidates,
    #[error("invalid strategy {0:?}: {1}")]
    Parse(String, String),
    #[error("{rule} needs {needed} segmentation, got {got}")]
    WrongMode {
        rule: String,
        needed: SegmentationMode,
        got: SegmentationMode,
    },
}

/// Compares two scores, treating values within [`TIE_EPSILON`] as equal.
pub fn tolerant_cmp(a: f64, b: f64) -> Ordering {
    let scale = a.abs().max(b.abs());
    if (a - b).abs() <= TIE_EPSILON * scale {
        Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
}

/// Product of factors taken in ascending order, so that equal multisets give
/// bit-identical results.
pub fn canonical_product(mut factors: Vec<f64>) -> f64 {
    factors.sort_by(f64::total_cmp);
    factors.into_iter().product()
}

/// Sum of terms in ascending order.
pub fn canonical_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Pf,
    Sdps,
    Fsp,
    Nds,
    Wl,
    Wpf,
    Sf,
    Sl,
    Sln,
    Sspf,
    Pfsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimum {
    Max,
    Min,
}

impl Component {
    /// Listing order; bit `i` of a strategy bitstring selects `ALL[i]`.
    pub const ALL: [Component; 11] = [
        Component::Pf,
        Component::Sdps,
        Component::Fsp,
        Component::Nds,
        Component::Wl,
        Component::Wpf,
        Component::Sf,
        Component::Sl,
        Component::Sln,
        Component::Sspf,
        Component::Pfsp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Pf => "PF",
            Component::Sdps => "SDPS",
            Component::Fsp => "FSP",
            Component::Nds => "NDS",
            Component::Wl => "WL",
            Component::Wpf => "WPF",
            Component::Sf => "SF",
            Component::Sl => "SL",
            Component::Sln => "SLN",
            Component::Sspf => "SSPF",
            Component::Pfsp => "PFSP",
        }
    }

    pub fn optimum(self) -> Optimum {
        match self {
            Component::Sdps | Component::Nds => Optimum::Min,
            _ => Optimum::Max,
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// A component score; `secondary` only breaks ties (used by SLN).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentScore {
    pub primary: f64,
    pub secondary: f64,
}

impl ComponentScore {
    fn single(v: f64) -> Self {
        Self {
            primary: v,
            secondary: 0.0,
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        tolerant_cmp(self.primary, other.primary)
            .then_with(|| tolerant_cmp(self.secondary, other.secondary))
    }
}

/// Per-position phoneme frequencies over all candidates' assembled pronunciations.
fn position_frequencies(cands: &[Candidate]) -> Vec<HashMap<u8, usize>> {
    let len = cands.first().map_or(0, |c| c.assembled.len());
    let mut freq = vec![HashMap::new(); len];
    for c in cands {
        for (p, &ph) in c.assembled.iter().enumerate() {
            *freq[p].entry(ph).or_insert(0) += 1;
        }
    }
    freq
}

fn class_sizes(cands: &[Candidate]) -> HashMap<&[u8], usize> {
    let mut m: HashMap<&[u8], usize> = HashMap::new();
    for c in cands {
        *m.entry(&c.assembled[..]).or_insert(0) += 1;
    }
    m
}

/// Raw scores of one component strategy for every candidate of the lattice.
pub fn score_component(
    component: Component,
    lattice: &WordLattice,
) -> Result<Vec<ComponentScore>, StrategyError> {
    let cands = lattice.candidates();
    if cands.is_empty() {
        return Err(StrategyError::NoCandidates);
    }
    let counts = |c: &Candidate| c.counts.iter().map(|&k| k as f64).collect::<Vec<_>>();
    let scores = match component {
        Component::Pf => cands
            .iter()
            .map(|c| ComponentScore::single(canonical_product(counts(c))))
            .collect(),
        Component::Sdps => cands
            .iter()
            .map(|c| {
                let lens: Vec<f64> = lattice
                    .segmentation_of(c)
                    .spans
                    .iter()
                    .map(|s| s.len() as f64)
                    .collect();
                let mean = lens.iter().sum::<f64>() / lens.len() as f64;
                let var = lens.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / lens.len() as f64;
                ComponentScore::single(var.sqrt())
            })
            .collect(),
        Component::Fsp => {
            let sizes = class_sizes(cands);
            cands
                .iter()
                .map(|c| ComponentScore::single(sizes[&c.assembled[..]] as f64))
                .collect()
        }
        Component::Nds => {
            let freq = position_frequencies(cands);
            let n = cands.len();
            cands
                .iter()
                .map(|c| {
                    let d: usize = c
                        .assembled
                        .iter()
                        .enumerate()
                        .map(|(p, ph)| n - freq[p][ph])
                        .sum();
                    ComponentScore::single(d as f64)
                })
                .collect()
        }
        Component::Wl => cands
            .iter()
            .map(|c| ComponentScore::single(*c.counts.iter().min().unwrap() as f64))
            .collect(),
        Component::Wpf => cands
            .iter()
            .map(|c| {
                let spans = &lattice.segmentation_of(c).spans;
                let f = spans
                    .iter()
                    .zip(&c.counts)
                    .map(|(s, &k)| k as f64 / lattice.distribution(*s).len() as f64)
                    .collect();
                ComponentScore::single(canonical_product(f))
            })
            .collect(),
        Component::Sf => cands
            .iter()
            .map(|c| ComponentScore::single(c.counts[0] as f64))
            .collect(),
        Component::Sl => cands
            .iter()
            .map(|c| ComponentScore::single(*c.counts.last().unwrap() as f64))
            .collect(),
        Component::Sln => cands
            .iter()
            .map(|c| {
                let longest = lattice
                    .segmentation_of(c)
                    .spans
                    .iter()
                    .map(|s| s.len())
                    .max()
                    .unwrap();
                ComponentScore {
                    primary: longest as f64,
                    secondary: *c.counts.iter().max().unwrap() as f64,
                }
            })
            .collect(),
        Component::Sspf => {
            let freq = position_frequencies(cands);
            let last = lattice.word().len() - 1;
            cands
                .iter()
                .map(|c| {
                    let spans = &lattice.segmentation_of(c).spans;
                    let mut total = 0.0;
                    for (s, &k) in spans.iter().zip(&c.counts) {
                        for p in s.start..=s.end {
                            if p == 0 || p == last {
                                continue;
                            }
                            let others = freq[p][&c.assembled[p]] - 1;
                            total += others as f64 * k as f64;
                        }
                    }
                    ComponentScore::single(total)
                })
                .collect()
        }
        Component::Pfsp => {
            let per: Vec<f64> = cands
                .iter()
                .map(|c| apply_root(canonical_product(counts(c)), Root::Segments, c.counts.len()))
                .collect();
            let sums = collate(cands, &per);
            cands
                .iter()
                .map(|c| ComponentScore::single(sums[&c.assembled[..]]))
                .collect()
        }
    };
    Ok(scores)
}

/// 1-based ranks; tied candidates share the better rank.
pub fn rank(scores: &[ComponentScore], optimum: Optimum) -> Vec<usize> {
    scores
        .iter()
        .map(|s| {
            1 + scores
                .iter()
                .filter(|o| match optimum {
                    Optimum::Max => o.cmp(s) == Ordering::Greater,
                    Optimum::Min => o.cmp(s) == Ordering::Less,
                })
                .count()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CombinationRule {
    #[default]
    Product,
    Sum,
}

/// Combines per-component ranks into one score per candidate (higher wins).
/// Each component awards `N - rank + 1` points.
pub fn combine_ranks(ranks: &[Vec<usize>], rule: CombinationRule) -> Vec<f64> {
    let Some(first) = ranks.first() else {
        return Vec::new();
    };
    let n = first.len();
    (0..n)
        .map(|i| {
            let points = ranks.iter().map(|r| (n - r[i] + 1) as f64);
            match rule {
                CombinationRule::Product => points.product(),
                CombinationRule::Sum => points.sum(),
            }
        })
        .collect()
}

/// Degree of the root taken of a candidate's product before collation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Root {
    Degree(f64),
    /// The candidate's own segment count.
    Segments,
}

impl Default for Root {
    fn default() -> Self {
        Root::Degree(1.0)
    }
}

impl Root {
    pub fn degree(self, n_segments: usize) -> f64 {
        match self {
            Root::Degree(d) => d,
            Root::Segments => n_segments as f64,
        }
    }

    pub fn is_identity(self) -> bool {
        self == Root::Degree(1.0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Degree(d) => write!(f, "{d}"),
            Root::Segments => f.write_str("n"),
        }
    }
}

impl std::str::FromStr for Root {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "n" {
            return Ok(Root::Segments);
        }
        match s.parse::<f64>() {
            Ok(d) if d >= 1.0 && d.is_finite() => Ok(Root::Degree(d)),
            _ => Err(format!("invalid root {s:?} (expected a number >= 1 or n)")),
        }
    }
}

pub fn apply_root(score: f64, root: Root, n_segments: usize) -> f64 {
    let d = root.degree(n_segments);
    if d == 1.0 {
        score
    } else {
        score.powf(1.0 / d)
    }
}

/// How a segment's arc frequency becomes a factor in a product score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorKind {
    /// Raw count.
    Absolute,
    /// `count / total`.
    Normalized,
    /// `count / (total + 1)`.
    Estimated,
}

impl FactorKind {
    fn tag(self) -> &'static str {
        match self {
            FactorKind::Absolute => "ABS",
            FactorKind::Normalized => "NORM",
            FactorKind::Estimated => "EST",
        }
    }
}

/// Per-candidate `(product of factors)^(1/d)`.
pub fn product_scores(lattice: &WordLattice, factor: FactorKind, root: Root) -> Vec<f64> {
    lattice
        .candidates()
        .iter()
        .map(|c| {
            let spans = &lattice.segmentation_of(c).spans;
            let factors = spans
                .iter()
                .zip(&c.counts)
                .map(|(s, &k)| {
                    let total = lattice.distribution(*s).total() as f64;
                    match factor {
                        FactorKind::Absolute => k as f64,
                        FactorKind::Normalized => k as f64 / total,
                        FactorKind::Estimated => k as f64 / (total + 1.0),
                    }
                })
                .collect();
            apply_root(canonical_product(factors), root, c.counts.len())
        })
        .collect()
}

/// Sums per-candidate values over identical assembled pronunciations.
pub fn collate<'c>(cands: &'c [Candidate], values: &[f64]) -> HashMap<&'c [u8], f64> {
    let mut terms: HashMap<&[u8], Vec<f64>> = HashMap::new();
    for (c, &v) in cands.iter().zip(values) {
        terms.entry(&c.assembled[..]).or_default().push(v);
    }
    terms
        .into_iter()
        .map(|(k, v)| (k, canonical_sum(v)))
        .collect()
}

/// TP (or WTP when `weighted`): per distinct pronunciation, the sum over its
/// candidates of the product of arc frequencies (divided by the product of
/// segment lengths for WTP). Sorted by pronunciation.
pub fn tp_wtp_score(lattice: &WordLattice, weighted: bool) -> Vec<(Vec<u8>, f64)> {
    let cands = lattice.candidates();
    let per: Vec<f64> = cands
        .iter()
        .map(|c| {
            let spans = &lattice.segmentation_of(c).spans;
            let factors = spans
                .iter()
                .zip(&c.counts)
                .map(|(s, &k)| {
                    if weighted {
                        k as f64 / s.len() as f64
                    } else {
                        k as f64
                    }
                })
                .collect();
            canonical_product(factors)
        })
        .collect();
    let mut out: Vec<(Vec<u8>, f64)> = collate(cands, &per)
        .into_iter()
        .map(|(k, v)| (k.to_vec(), v))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// A complete decision rule for choosing among a word's candidates.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    /// One or more component strategies combined by rank points.
    Combination {
        components: Vec<Component>,
        rule: CombinationRule,
    },
    TotalProduct {
        weighted: bool,
    },
    /// Product of per-segment factors, rooted, optionally collated.
    Product {
        factor: FactorKind,
        root: Root,
        collate: bool,
    },
    /// The estimated-probability rules.
    Probabilistic {
        rule: ProbRule,
        root: Root,
        collate: bool,
    },
}

impl StrategySpec {
    /// Parses a strategy name (`PF`, `TP`, `PROB`, `CONDF`, `PRODUCT-ABS`, …)
    /// or a 5- or 11-character component bitstring.
    pub fn parse(s: &str) -> Result<Self, StrategyError> {
        let err = |m: &str| StrategyError::Parse(s.to_string(), m.to_string());
        let upper = s.trim().to_ascii_uppercase();
        if !upper.is_empty() && upper.bytes().all(|b| b == b'0' || b == b'1') {
            if upper.len() != 5 && upper.len() != 11 {
                return Err(err("bitstrings must have length 5 or 11"));
            }
            let components: Vec<_> = upper
                .bytes()
                .zip(Component::ALL)
                .filter(|(b, _)| *b == b'1')
                .map(|(_, c)| c)
                .collect();
            if components.is_empty() {
                return Err(err("at least one component must be selected"));
            }
            return Ok(StrategySpec::Combination {
                components,
                rule: CombinationRule::Product,
            });
        }
        if let Some(c) = Component::from_name(&upper) {
            return Ok(StrategySpec::Combination {
                components: vec![c],
                rule: CombinationRule::Product,
            });
        }
        let product = |factor| StrategySpec::Product {
            factor,
            root: Root::default(),
            collate: true,
        };
        Ok(match upper.as_str() {
            "TP" => StrategySpec::TotalProduct { weighted: false },
            "WTP" => StrategySpec::TotalProduct { weighted: true },
            "PRODUCT-ABS" => product(FactorKind::Absolute),
            "PRODUCT-NORM" => product(FactorKind::Normalized),
            "PRODUCT-EST" => product(FactorKind::Estimated),
            other => match ProbRule::from_name(other) {
                Some(rule) => StrategySpec::Probabilistic {
                    rule,
                    root: Root::default(),
                    collate: true,
                },
                None => return Err(err("unknown strategy name")),
            },
        })
    }

    /// Sets the root degree where it applies.
    pub fn with_root(mut self, new_root: Root) -> Self {
        match &mut self {
            StrategySpec::Product { root, .. } | StrategySpec::Probabilistic { root, .. } => {
                *root = new_root
            }
            _ => {}
        }
        self
    }

    /// Sets collation where it applies.
    pub fn with_collate(mut self, on: bool) -> Self {
        match &mut self {
            StrategySpec::Product { collate, .. } | StrategySpec::Probabilistic { collate, .. } => {
                *collate = on
            }
            _ => {}
        }
        self
    }

    pub fn with_rule(mut self, new_rule: CombinationRule) -> Self {
        if let StrategySpec::Combination { rule, .. } = &mut self {
            *rule = new_rule;
        }
        self
    }

    pub fn root(&self) -> Root {
        match self {
            StrategySpec::Product { root, .. } | StrategySpec::Probabilistic { root, .. } => *root,
            _ => Root::default(),
        }
    }

    pub fn collates(&self) -> bool {
        match self {
            StrategySpec::Product { collate, .. } | StrategySpec::Probabilistic { collate, .. } => {
                *collate
            }
            StrategySpec::TotalProduct { .. } => true,
            StrategySpec::Combination { .. } => false,
        }
    }

    /// Segmentation mode this strategy is defined on, if it is restricted.
    pub fn required_mode(&self) -> Option<SegmentationMode> {
        match self {
            StrategySpec::Probabilistic { rule, .. } => Some(rule.required_mode()),
            _ => None,
        }
    }

    /// Bitstring for combinations of several components.
    pub fn bitstring(&self) -> Option<String> {
        let StrategySpec::Combination { components, .. } = self else {
            return None;
        };
        let width = if components.iter().all(|c| (*c as usize) < 5) {
            5
        } else {
            11
        };
        Some(
            Component::ALL[..width]
                .iter()
                .map(|c| if components.contains(c) { '1' } else { '0' })
                .collect(),
        )
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Combination { components, rule } => {
                if components.len() == 1 {
                    f.write_str(components[0].name())
                } else {
                    f.write_str(&self.bitstring().unwrap())?;
                    if *rule == CombinationRule::Sum {
                        f.write_str("+sum")?;
                    }
                    Ok(())
                }
            }
            StrategySpec::TotalProduct { weighted } => {
                f.write_str(if *weighted { "WTP" } else { "TP" })
            }
            StrategySpec::Product { factor, .. } => write!(f, "PRODUCT-{}", factor.tag()),
            StrategySpec::Probabilistic { rule, .. } => f.write_str(rule.name()),
        }
    }
}

impl std::str::FromStr for StrategySpec {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategySpec::parse(s)
    }
}

/// Distinct pronunciations ordered by score, best first. Pronunciations with
/// equal score keep lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub entries: Vec<(Vec<u8>, f64)>,
}

impl Ranking {
    /// Builds a ranking from per-pronunciation scores (higher is better).
    pub fn from_scores(mut entries: Vec<(Vec<u8>, f64)>) -> Self {
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        // near-equal scores at the top are one tie set; keep it in byte order
        let n = Self::tie_len(&entries);
        entries[..n].sort_by(|a, b| a.0.cmp(&b.0));
        Self { entries }
    }

    /// Per-candidate scores, keeping each pronunciation's best candidate.
    pub fn from_candidates(cands: &[Candidate], scores: &[f64]) -> Self {
        let mut best: HashMap<&[u8], f64> = HashMap::new();
        for (c, &s) in cands.iter().zip(scores) {
            best.entry(&c.assembled[..])
                .and_modify(|b| *b = b.max(s))
                .or_insert(s);
        }
        Self::from_scores(best.into_iter().map(|(k, v)| (k.to_vec(), v)).collect())
    }

    /// Per-candidate values summed over identical pronunciations.
    pub fn collated(cands: &[Candidate], values: &[f64]) -> Self {
        Self::from_scores(
            collate(cands, values)
                .into_iter()
                .map(|(k, v)| (k.to_vec(), v))
                .collect(),
        )
    }

    /// All pronunciations tied with the best score.
    pub fn best(&self) -> &[(Vec<u8>, f64)] {
        &self.entries[..Self::tie_len(&self.entries)]
    }

    fn tie_len(entries: &[(Vec<u8>, f64)]) -> usize {
        let Some(top) = entries.first() else {
            return 0;
        };
        entries
            .iter()
            .take_while(|e| tolerant_cmp(e.1, top.1) == Ordering::Equal)
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Scores a word's lattice under `spec`.
pub fn rank_pronunciations(
    lattice: &WordLattice,
    spec: &StrategySpec,
) -> Result<Ranking, StrategyError> {
    let cands = lattice.candidates();
    if cands.is_empty() {
        return Err(StrategyError::NoCandidates);
    }
    match spec {
        StrategySpec::Combination { components, rule } => {
            let ranks = components
                .iter()
                .map(|&c| score_component(c, lattice).map(|s| rank(&s, c.optimum())))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Ranking::from_candidates(
                cands,
                &combine_ranks(&ranks, *rule),
            ))
        }
        StrategySpec::TotalProduct { weighted } => {
            Ok(Ranking::from_scores(tp_wtp_score(lattice, *weighted)))
        }
        StrategySpec::Product {
            factor,
            root,
            collate,
        } => {
            let per = product_scores(lattice, *factor, *root);
            Ok(if *collate {
                Ranking::collated(cands, &per)
            } else {
                Ranking::from_candidates(cands, &per)
            })
        }
        StrategySpec::Probabilistic {
            rule,
            root,
            collate,
        } => {
            let needed = rule.required_mode();
            if lattice.mode() != needed {
                return Err(StrategyError::WrongMode {
                    rule: rule.name().to_string(),
                    needed,
                    got: lattice.mode(),
                });
            }
            let masses = probscore::candidate_masses(*rule, lattice, *root);
            Ok(if *collate {
                Ranking::collated(cands, &masses)
            } else {
                Ranking::from_candidates(cands, &masses)
            })
        }
    }
}
