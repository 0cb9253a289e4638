use mbrkit::lexical::{LexicalMetric, PairwiseScorer};
use proptest::prelude::*;

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop::sample::select(vec![
            "the", "The", "cat", "sat", "on", "mat", "dog", "3.5", "1,000", "co-op", "(a)", "b.",
            "x!", "Straße", "ü", "&amp;", "—", "日本",
        ]),
        1..15,
    )
    .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn scores_stay_in_range(h in sentence(), r in sentence()) {
        for metric in [LexicalMetric::SentBleu, LexicalMetric::Chrf, LexicalMetric::ChrfPlusPlus] {
            let s = metric.score(&h, &r).unwrap();
            prop_assert!((0.0..=100.0).contains(&s), "{metric} = {s}");
        }
        prop_assert!(LexicalMetric::Ter.score(&h, &r).unwrap() >= 0.0);
    }

    #[test]
    fn self_scores_are_exact(r in sentence()) {
        for metric in LexicalMetric::ALL {
            prop_assert_eq!(metric.score(&r, &r).unwrap(), metric.self_score());
        }
    }

    #[test]
    fn ter_ignores_case_and_spacing(h in sentence(), r in sentence()) {
        let a = LexicalMetric::Ter.score(&h, &r).unwrap();
        let spaced = format!("  {}  ", h.to_ascii_uppercase().replace(' ', "   "));
        prop_assert_eq!(a, LexicalMetric::Ter.score(&spaced, &r).unwrap());
    }

    #[test]
    fn chrf_ignores_spacing_between_words(h in sentence(), r in sentence()) {
        let a = LexicalMetric::Chrf.score(&h, &r).unwrap();
        prop_assert_eq!(a, LexicalMetric::Chrf.score(&h.replace(' ', "  "), &r).unwrap());
    }

    #[test]
    fn pooled_scoring_agrees_with_single_pairs(texts in prop::collection::vec(sentence(), 2..6)) {
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        for metric in LexicalMetric::ALL {
            let pool = PairwiseScorer::new(metric, &refs);
            for i in 0..refs.len() {
                for j in 0..refs.len() {
                    prop_assert_eq!(pool.score(i, j), metric.score(refs[i], refs[j]).unwrap());
                }
            }
        }
    }
}
