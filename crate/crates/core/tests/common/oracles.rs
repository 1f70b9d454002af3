//! Slow, obviously-correct restatements used as test oracles.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_rational::Ratio;
use pba_core::probscore::{candidate_mass, segment_factor};
use pba_core::{AlignedEntry, Candidate, CountSource, ProbRule, Root, Segmentation, WordLattice};

pub type Table = BTreeMap<Vec<u8>, BTreeMap<Vec<u8>, u32>>;

/// Counts every positional substring occurrence directly.
pub fn naive_counts(entries: &[AlignedEntry]) -> Table {
    let mut t = Table::new();
    for e in entries {
        let (x, y) = (e.letters(), e.phonemes());
        for a in 0..x.len() {
            for b in a..x.len() {
                *t.entry(x[a..=b].to_vec())
                    .or_default()
                    .entry(y[a..=b].to_vec())
                    .or_default() += 1;
            }
        }
    }
    t
}

pub fn table_of<S: CountSource + ?Sized>(src: &S, keys: impl Iterator<Item = Vec<u8>>) -> Table {
    let mut t = Table::new();
    for k in keys {
        if let Some(d) = src.distribution(&k) {
            let m: BTreeMap<_, _> = d.iter().map(|(p, c)| (p.to_vec(), c)).collect();
            if !m.is_empty() {
                t.insert(k, m);
            }
        }
    }
    t
}

/// Every (segmentation, segment pronunciations) pair from the full Cartesian
/// product that agrees on shared letters.
pub fn cartesian_candidates<S: CountSource + ?Sized>(
    word: &[u8],
    segs: &[Segmentation],
    src: &S,
) -> BTreeSet<(usize, Vec<Vec<u8>>)> {
    let mut out = BTreeSet::new();
    for (i, seg) in segs.iter().enumerate() {
        let mut combos: Vec<Vec<Vec<u8>>> = vec![vec![]];
        for s in &seg.spans {
            let opts: Vec<Vec<u8>> = src
                .distribution(&word[s.start..=s.end])
                .map(|d| d.iter().map(|(p, _)| p.to_vec()).collect())
                .unwrap_or_default();
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    opts.iter().map(move |p| {
                        let mut c = c.clone();
                        c.push(p.clone());
                        c
                    })
                })
                .collect();
        }
        for c in combos {
            let ok = (0..c.len().saturating_sub(1))
                .all(|k| !seg.overlaps_at(k) || c[k].last() == c[k + 1].first());
            if ok {
                out.insert((i, c));
            }
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Mean over explicit assignment orders, in exact arithmetic.
pub fn condall_exact(l: &WordLattice, c: &Candidate) -> Ratio<u128> {
    let n = c.pronunciations.len();
    let seg = l.segmentation_of(c);
    // perm[k] = time at which segment k is assigned
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Ratio::from_integer(0u128);
    let mut count = 0u128;
    loop {
        let mut prod = Ratio::from_integer(1u128);
        for k in 0..n {
            let left = k > 0 && seg.overlaps_at(k - 1) && perm[k - 1] < perm[k];
            let right = k + 1 < n && seg.overlaps_at(k) && perm[k + 1] < perm[k];
            let f = segment_factor(l, c, k, left, right);
            prod *= Ratio::new(f.num as u128, f.den as u128);
        }
        total += prod;
        count += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    total / count
}

pub fn levenshtein(a: &[u8], b: &[u8]) -> usize {
    match (a.split_first(), b.split_first()) {
        (None, _) => b.len(),
        (_, None) => a.len(),
        (Some((x, ra)), Some((y, rb))) => {
            let sub = levenshtein(ra, rb) + usize::from(x != y);
            sub.min(levenshtein(ra, b) + 1).min(levenshtein(a, rb) + 1)
        }
    }
}

pub fn reversed(e: &AlignedEntry) -> AlignedEntry {
    let w: String = e.word().chars().rev().collect();
    let p: String = e.pronunciation().chars().rev().collect();
    AlignedEntry::new(&w, &p).unwrap()
}

/// Collated masses keyed by assembled pronunciation (reversed if asked).
pub fn masses_by_pronunciation(
    l: &WordLattice,
    rule: ProbRule,
    reverse: bool,
) -> HashMap<Vec<u8>, f64> {
    let mut m = HashMap::new();
    for c in l.candidates() {
        let mut y = c.assembled.clone();
        if reverse {
            y.reverse();
        }
        *m.entry(y).or_insert(0.0) += candidate_mass(rule, l, c, Root::default());
    }
    m
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}
