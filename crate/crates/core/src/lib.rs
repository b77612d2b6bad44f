//! Squared English Word (SEW) glyph images.
//!
//! Text is turned into a single square image in which every word occupies
//! its own square cell, with the word's letters tiled inside that cell. The
//! crate covers the whole pipeline needed to produce and sanity-check such
//! images:
//!
//! * [`glyphfont`]: an embedded bitmap font with nearest-neighbor scaling.
//! * [`layout`]: draw-command planning for the six layout schemes.
//! * [`render`]: rasterizing plans and encoding PGM / PNG.
//! * [`profile`]: structured profile fields as short drawable tokens.
//! * [`corpus`]: CSV/TSV loading, tokenization, statistics and splits.
//! * [`dataset`]: batch rendering with a JSON Lines manifest.
//! * [`evalkit`]: a logistic-regression baseline over pooled pixels.

pub mod corpus;
pub mod dataset;
mod error;
pub mod evalkit;
pub mod glyphfont;
pub mod layout;
pub mod profile;
pub mod render;

pub use error::{Error, Result};

pub use corpus::{CorpusSample, CorpusStats};
pub use glyphfont::GlyphBitmap;
pub use layout::{BlueprintGrid, DrawCommand, LayoutPlan, RenderConfig, Scheme, SquareRegion};
pub use profile::ProfileRecord;
pub use render::ImageBuffer;
