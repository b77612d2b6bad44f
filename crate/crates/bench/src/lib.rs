//! Shared inputs for the criterion benches.

/// The running example used throughout the docs and golden tests.
pub const EXAMPLE_SENTENCE: &str =
    "Last month my son got his first trophy in the tennis match and \
i was very happy and he was very excited to see me his trophy and i took him out for dinner \
and spend the evening happily with him.";

/// `n` pseudo-words of varying length, deterministic.
pub fn synthetic_words(n: usize) -> Vec<String> {
    const LETTERS: &[u8] = b"etaoinshrdlucmfwypvbgkqjxz";
    (0..n)
        .map(|i| {
            let len = 1 + (i * 7 + 3) % 12;
            (0..len)
                .map(|j| LETTERS[(i * 31 + j * 17) % LETTERS.len()] as char)
                .collect()
        })
        .collect()
}
