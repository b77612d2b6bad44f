use proptest::prelude::*;

use sew_core::corpus::{
    split_indices, split_train_test, tokenize, truncation_fraction, CorpusStats,
};

proptest! {
    #[test]
    fn coverage_is_monotone_and_complete(counts in prop::collection::vec(0usize..120, 1..200)) {
        let points: Vec<usize> = (0..=130).collect();
        let stats = CorpusStats::from_counts(&counts, &points).unwrap();
        let values: Vec<f64> = stats.coverage.values().copied().collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert_eq!(stats.coverage[&stats.max_words], 1.0);
        prop_assert_eq!(stats.histogram.values().sum::<usize>(), counts.len());
        for &k in &points {
            let t = truncation_fraction(&counts, k).unwrap();
            prop_assert_eq!(t + stats.coverage[&k], 1.0);
        }
    }

    #[test]
    fn split_partitions(n in 2usize..300, ratio in 0.01f64..0.99, seed in any::<u64>()) {
        let (train, test) = split_indices(n, ratio, seed).unwrap();
        prop_assert_eq!(train.len(), (ratio * n as f64).round() as usize);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!((train, test), split_indices(n, ratio, seed).unwrap());
    }

    #[test]
    fn tokens_are_trimmed_lowercase(text in "[ a-zA-Z0-9,.!?'\\-]{0,80}") {
        for token in tokenize(&text) {
            prop_assert!(!token.is_empty());
            prop_assert!(token.chars().next().unwrap().is_alphanumeric());
            prop_assert!(token.chars().last().unwrap().is_alphanumeric());
            prop_assert_eq!(token.to_lowercase(), token.clone());
            prop_assert!(!token.contains(char::is_whitespace));
        }
    }
}

#[test]
fn split_keeps_items() {
    let items: Vec<String> = (0..10).map(|i| format!("s{i}")).collect();
    let (train, test) = split_train_test(&items, 0.8, 3).unwrap();
    assert_eq!((train.len(), test.len()), (8, 2));
    let mut all = [train, test].concat();
    all.sort();
    let mut expected = items.clone();
    expected.sort();
    assert_eq!(all, expected);
}
