mod common;

use common::oracles::cartesian_candidates;

use std::collections::BTreeSet;

use pba_core::lattice::{enumerate_segmentations, expand_candidates, FallbackPolicy, Span};
use pba_core::{Segmentation, SegmentationMode, SubstringIndex, WordLattice};
use proptest::prelude::*;

/// All strict (no fallback) segmentations with a consistent pronunciation,
/// grouped by segment count.
fn strict_segmentations(
    word: &[u8],
    src: &SubstringIndex,
    mode: SegmentationMode,
) -> Vec<Vec<Span>> {
    fn rec(
        word: &[u8],
        src: &SubstringIndex,
        mode: SegmentationMode,
        start: usize,
        acc: &mut Vec<Span>,
        out: &mut Vec<Vec<Span>>,
    ) {
        let last = word.len() - 1;
        let min_end = if mode == SegmentationMode::OverlapOne {
            start + 1
        } else {
            start
        };
        for end in min_end..=last {
            if src.get(&word[start..=end]).is_none() {
                continue;
            }
            acc.push(Span::new(start, end));
            if end == last {
                out.push(acc.clone());
            } else {
                let next = if mode == SegmentationMode::OverlapOne {
                    end
                } else {
                    end + 1
                };
                rec(word, src, mode, next, acc, out);
            }
            acc.pop();
        }
    }
    let mut all = Vec::new();
    rec(word, src, mode, 0, &mut Vec::new(), &mut all);
    all.into_iter()
        .filter(|spans| {
            let seg = Segmentation {
                spans: spans.clone(),
                mode,
                fallback_junction: None,
            };
            !cartesian_candidates(word, &[seg], src).is_empty()
        })
        .collect()
}

fn modes() -> impl Strategy<Value = SegmentationMode> {
    prop_oneof![
        Just(SegmentationMode::OverlapOne),
        Just(SegmentationMode::NonOverlap)
    ]
}

proptest! {
    #[test]
    fn expansion_equals_cartesian_filter((lex, word) in common::lexicon_and_word(12), mode in modes()) {
        let idx = SubstringIndex::build(&lex);
        let Ok(segs) = enumerate_segmentations(&word, &idx, mode, FallbackPolicy::AllPlacements) else {
            return Ok(());
        };
        let cands = expand_candidates(&word, &segs, &idx, None).unwrap();
        let got: BTreeSet<_> = cands
            .iter()
            .map(|c| (c.segmentation, c.pronunciations.iter().map(|p| p.to_vec()).collect::<Vec<_>>()))
            .collect();
        prop_assert_eq!(got.len(), cands.len(), "duplicate candidates");
        prop_assert_eq!(got, cartesian_candidates(&word, &segs, &idx));
        for c in &cands {
            let seg = &segs[c.segmentation];
            for (s, (y, n)) in seg.spans.iter().zip(c.pronunciations.iter().zip(&c.counts)) {
                prop_assert_eq!(&c.assembled[s.start..=s.end], &y[..]);
                prop_assert_eq!(idx.get(&word[s.start..=s.end]).unwrap().count(y), *n);
            }
        }
    }

    #[test]
    fn minimal_strict_segmentations_match_oracle((lex, word) in common::lexicon_and_word(12), mode in modes()) {
        let idx = SubstringIndex::build(&lex);
        let strict = strict_segmentations(&word, &idx, mode);
        let got = enumerate_segmentations(&word, &idx, mode, FallbackPolicy::AllPlacements);
        match strict.iter().map(Vec::len).min() {
            Some(n) => {
                let want: BTreeSet<Vec<Span>> = strict.into_iter().filter(|s| s.len() == n).collect();
                let segs = got.unwrap();
                prop_assert!(segs.iter().all(|s| s.fallback_junction.is_none()));
                let have: BTreeSet<Vec<Span>> = segs.into_iter().map(|s| s.spans).collect();
                prop_assert_eq!(have, want);
            }
            None => {
                if let Ok(segs) = got {
                    prop_assert!(mode == SegmentationMode::OverlapOne);
                    prop_assert!(segs.iter().all(|s| s.fallback_junction.is_some()));
                }
            }
        }
    }

    #[test]
    fn segmentation_shape((lex, word) in common::lexicon_and_word(12), mode in modes()) {
        let idx = SubstringIndex::build(&lex);
        let Ok(l) = WordLattice::build(&word, &idx, mode, &Default::default()) else {
            return Ok(());
        };
        let n = l.segment_count();
        for s in l.segmentations() {
            prop_assert_eq!(s.len(), n);
            let total: usize = s.spans.iter().map(|sp| sp.len()).sum();
            let expect = match mode {
                SegmentationMode::NonOverlap => word.len(),
                SegmentationMode::OverlapOne => {
                    word.len() + n - 1 - usize::from(s.fallback_junction.is_some())
                }
            };
            prop_assert_eq!(total, expect);
        }
        let again = WordLattice::build(&word, &idx, mode, &Default::default()).unwrap();
        prop_assert_eq!(again.segmentations(), l.segmentations());
        prop_assert_eq!(again.candidates(), l.candidates());
    }
}
