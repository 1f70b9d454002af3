#![allow(dead_code)]

pub mod oracles;

use pba_core::corpus::BOUNDARY;
use pba_core::SubstringIndex;

/// Writes `#` as the boundary sentinel.
pub fn k(s: &str) -> Vec<u8> {
    s.bytes()
        .map(|b| if b == b'#' { BOUNDARY } else { b })
        .collect()
}

/// Segment counts for `longevity` with the word itself held out.
pub const LONGEVITY_TABLE: &[(&str, &[(&str, u32)])] = &[
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
            ("G--", 6),
            ("NJ-", 3),
            ("Ggx", 1),
            ("n-i", 1),
        ],
    ),
    (
        "ge",
        &[
            ("J-", 284),
            ("Jx", 105),
            ("JE", 80),
            ("Ji", 40),
            ("Z-", 26),
            ("g-", 19),
            ("--", 16),
            ("gE", 11),
            ("-x", 8),
            ("gx", 6),
            ("JI", 4),
            ("gA", 3),
            ("gi", 3),
            ("Ze", 2),
            ("-i", 1),
            ("Ja", 1),
            ("Za", 1),
            ("gI", 1),
            ("gY", 1),
            ("ge", 1),
        ],
    ),
    (
        "ev",
        &[
            ("Ev", 83),
            ("Iv", 50),
            ("iv", 36),
            ("-v", 24),
            ("xv", 15),
            ("Ef", 1),
        ],
    ),
    (
        "evi",
        &[
            ("ivi", 10),
            ("Evx", 8),
            ("IvA", 7),
            ("Ev-", 3),
            ("IvI", 3),
            ("ivA", 3),
            ("xvI", 3),
            ("-vI", 2),
            ("iv-", 2),
            ("ivI", 2),
            ("-v-", 1),
            ("Evi", 1),
            ("IvY", 1),
            ("ivY", 1),
            ("ivy", 1),
            ("xvA", 1),
            ("xvY", 1),
        ],
    ),
    ("evity#", &[("Evxti#", 2)]),
    ("vity#", &[("vxti#", 22)]),
    ("ity#", &[("xti#", 421), ("Iti#", 2)]),
];

pub fn longevity_source() -> SubstringIndex {
    SubstringIndex::from_counts(
        LONGEVITY_TABLE
            .iter()
            .flat_map(|(x, ys)| ys.iter().map(move |(y, c)| (k(x), k(y), *c))),
    )
}

use pba_core::AlignedEntry;
use proptest::prelude::*;

/// A word over a three-letter alphabet with a random aligned pronunciation.
pub fn entry() -> impl Strategy<Value = AlignedEntry> {
    prop::collection::vec((0usize..3, 0usize..4), 2..=5).prop_map(|v| {
        let w: String = v.iter().map(|&(l, _)| b"abc"[l] as char).collect();
        let p: String = v.iter().map(|&(_, p)| b"xyz-"[p] as char).collect();
        AlignedEntry::new(&w, &p).unwrap()
    })
}

pub fn lexicon(max: usize) -> impl Strategy<Value = Vec<AlignedEntry>> {
    prop::collection::vec(entry(), 1..=max)
}

pub fn padded_word() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0usize..3, 1..=5).prop_map(|v| {
        let mut w = vec![pba_core::corpus::BOUNDARY];
        w.extend(v.iter().map(|&l| b"abc"[l]));
        w.push(pba_core::corpus::BOUNDARY);
        w
    })
}

/// A word from the lexicon or a fresh one, so lattices are usually non-empty.
pub fn lexicon_and_word(max: usize) -> impl Strategy<Value = (Vec<AlignedEntry>, Vec<u8>)> {
    (
        lexicon(max),
        padded_word(),
        any::<prop::sample::Index>(),
        any::<bool>(),
    )
        .prop_map(|(lex, fresh, i, pick)| {
            let w = if pick {
                lex[i.index(lex.len())].letters().to_vec()
            } else {
                fresh
            };
            (lex, w)
        })
}
