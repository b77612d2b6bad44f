use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no glyph for character {0:?}")]
    UnsupportedGlyph(char),

    #[error(
        "square of side {side}px cannot hold {letters} letters on a {grid}x{grid} letter grid"
    )]
    SquareTooSmall {
        side: u32,
        letters: usize,
        grid: u32,
    },

    #[error("{count} attention blocks of scale {scale} do not fit in a {n}x{n} grid")]
    BlueprintOverflow { n: u32, count: u32, scale: u32 },

    #[error("word {word:?} has {len} characters but a row holds only {chars_per_row}")]
    WordTooLong {
        word: String,
        len: usize,
        chars_per_row: u32,
    },

    #[error("invalid blueprint: {0}")]
    Blueprint(String),

    #[error("invalid {field}: {value:?}")]
    Normalization { field: &'static str, value: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("cannot split a corpus of {0} samples")]
    Split(usize),

    #[error("training error: {0}")]
    Train(String),

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("malformed image: {0}")]
    Decode(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
