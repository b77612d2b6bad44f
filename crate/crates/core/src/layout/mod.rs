//! Layout planning: turns token sequences into ordered draw commands.
//!
//! Six schemes are supported:
//!
//! | scheme             | what is drawn                                             |
//! |--------------------|-----------------------------------------------------------|
//! | `raw`              | characters flowed left to right, wrapping mid-word        |
//! | `raw-linewrap`     | as `raw`, but words never straddle a row boundary         |
//! | `sew`              | one word per grid square, row-major                       |
//! | `sew-attn`         | first words enlarged in centered attention squares        |
//! | `sew-profile`      | profile tokens in the first squares, text after           |
//! | `sew-attn-profile` | profile tokens in the attention squares, text in the flow |
//!
//! All planners are pure functions of their inputs.

mod blueprint;
mod raw;
mod sew;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use blueprint::{attention_blueprint, BlueprintGrid};
pub use raw::raw_sc_plan;
pub use sew::{
    compose_profile_plan, sew_attention_plan, sew_grid_plan, word_square_plan, ProfileMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Raw,
    RawLinewrap,
    Sew,
    SewAttn,
    SewProfile,
    SewAttnProfile,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Raw,
        Scheme::RawLinewrap,
        Scheme::Sew,
        Scheme::SewAttn,
        Scheme::SewProfile,
        Scheme::SewAttnProfile,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Raw => "raw",
            Scheme::RawLinewrap => "raw-linewrap",
            Scheme::Sew => "sew",
            Scheme::SewAttn => "sew-attn",
            Scheme::SewProfile => "sew-profile",
            Scheme::SewAttnProfile => "sew-attn-profile",
        }
    }

    pub fn uses_attention(self) -> bool {
        matches!(self, Scheme::SewAttn | Scheme::SewAttnProfile)
    }

    pub fn uses_profile(self) -> bool {
        matches!(self, Scheme::SewProfile | Scheme::SewAttnProfile)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme {s:?}")))
    }
}

/// Square pixel area owned by one word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquareRegion {
    pub x: u32,
    pub y: u32,
    pub side: u32,
}

impl SquareRegion {
    pub fn new(x: u32, y: u32, side: u32) -> Self {
        SquareRegion { x, y, side }
    }

    /// Whether the `cell_px` cell at (`x`, `y`) lies inside this square.
    pub fn contains_cell(&self, x: u32, y: u32, cell_px: u32) -> bool {
        x >= self.x
            && y >= self.y
            && x + cell_px <= self.x + self.side
            && y + cell_px <= self.y + self.side
    }
}

/// One character drawn into the `cell_px` square whose top-left is (`x`, `y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DrawCommand {
    pub character: char,
    pub x: u32,
    pub y: u32,
    pub cell_px: u32,
}

/// Where one input token ended up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedWord {
    /// Position of the token in the planner's input sequence.
    pub index: usize,
    pub token: String,
    /// Owning square for SEW schemes; `None` for the raw schemes.
    pub region: Option<SquareRegion>,
    /// The token's letters are `commands[first_command..first_command + command_count]`.
    pub first_command: usize,
    pub command_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutPlan {
    pub scheme: Scheme,
    pub commands: Vec<DrawCommand>,
    pub words: Vec<PlacedWord>,
    pub words_placed: usize,
    pub words_truncated: usize,
}

impl LayoutPlan {
    pub(crate) fn empty(scheme: Scheme) -> Self {
        LayoutPlan {
            scheme,
            commands: Vec::new(),
            words: Vec::new(),
            words_placed: 0,
            words_truncated: 0,
        }
    }

    /// Reads the placed tokens back off the draw commands, in input order.
    pub fn recovered_tokens(&self) -> Vec<String> {
        let mut words: Vec<&PlacedWord> = self.words.iter().collect();
        words.sort_by_key(|w| w.index);
        words
            .into_iter()
            .map(|w| {
                self.commands[w.first_command..w.first_command + w.command_count]
                    .iter()
                    .map(|c| c.character)
                    .collect()
            })
            .collect()
    }
}

/// Rendering and layout parameters shared by every scheme.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RenderConfig {
    /// Side of the square output image.
    pub image_px: u32,
    /// Word squares per row and per column (SEW schemes).
    pub grid_n: u32,
    /// Maximum number of words drawn (SEW schemes).
    pub cut_length: u32,
    /// Number of enlarged words (attention schemes).
    pub attn_count: u32,
    /// Side multiplier of an attention square, in grid cells.
    pub attn_scale: u32,
    /// Character cells per row (raw schemes).
    pub chars_per_row: u32,
    pub margin_px: u32,
    /// Draw a filled box for characters missing from the font instead of failing.
    pub glyph_fallback: bool,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            image_px: 224,
            grid_n: 6,
            cut_length: 36,
            attn_count: 4,
            attn_scale: 2,
            chars_per_row: 28,
            margin_px: 0,
            glyph_fallback: true,
        }
    }
}

impl RenderConfig {
    /// Defaults for `scheme`: a 6x6 grid with cut-length 36 for plain SEW,
    /// an 8x8 grid with four double-size words for the attention schemes.
    pub fn for_scheme(scheme: Scheme) -> Self {
        let mut config = RenderConfig::default();
        if scheme.uses_attention() {
            config.grid_n = 8;
            config.cut_length = 64;
        }
        config
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.image_px == 0 {
            return fail("image_px must be at least 1");
        }
        if self.grid_n == 0 {
            return fail("grid_n must be at least 1");
        }
        if self.cut_length == 0 {
            return fail("cut_length must be at least 1");
        }
        if self.attn_scale == 0 {
            return fail("attn_scale must be at least 1");
        }
        if self.chars_per_row == 0 {
            return fail("chars_per_row must be at least 1");
        }
        if 2 * self.margin_px >= self.image_px {
            return fail("margins leave no drawable area");
        }
        if self.usable_px() < self.grid_n {
            return fail("grid cells would be smaller than one pixel");
        }
        Ok(())
    }

    pub(crate) fn usable_px(&self) -> u32 {
        self.image_px.saturating_sub(2 * self.margin_px)
    }

    /// Side of one grid square.
    pub fn cell_side(&self) -> u32 {
        self.usable_px() / self.grid_n
    }

    /// Pixel offset of the grid's top-left corner; the leftover pixels are
    /// split between both margins, the extra pixel going right and bottom.
    pub fn grid_origin(&self) -> u32 {
        let slack = self.usable_px() - self.cell_side() * self.grid_n;
        self.margin_px + slack / 2
    }

    /// Square for grid cell (`row`, `col`) spanning `span` cells per side.
    pub(crate) fn grid_square(&self, row: u32, col: u32, span: u32) -> SquareRegion {
        let side = self.cell_side();
        let origin = self.grid_origin();
        SquareRegion::new(origin + col * side, origin + row * side, span * side)
    }
}

/// Plans `words` under `scheme`.
///
/// Raw schemes draw the words joined by single spaces. Profile schemes use
/// `profile_tokens`; the others ignore it. Attention schemes use `blueprint`
/// when given, otherwise one built from the config.
pub fn plan_scheme<S: AsRef<str>, P: AsRef<str>>(
    scheme: Scheme,
    words: &[S],
    profile_tokens: &[P],
    config: &RenderConfig,
    blueprint: Option<&BlueprintGrid>,
) -> Result<LayoutPlan> {
    let attention = || match blueprint {
        Some(grid) => Ok(grid.clone()),
        None => attention_blueprint(config.grid_n, config.attn_count, config.attn_scale),
    };
    match scheme {
        Scheme::Raw | Scheme::RawLinewrap => {
            let text = words
                .iter()
                .map(AsRef::as_ref)
                .collect::<Vec<_>>()
                .join(" ");
            raw_sc_plan(&text, config, scheme == Scheme::RawLinewrap)
        }
        Scheme::Sew => sew_grid_plan(words, config),
        Scheme::SewAttn => sew_attention_plan(words, &attention()?, config),
        Scheme::SewProfile => {
            compose_profile_plan(words, profile_tokens, ProfileMode::Uniform, config)
        }
        Scheme::SewAttnProfile => {
            sew::compose_attended_profile(words, profile_tokens, &attention()?, config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for scheme in Scheme::ALL {
            assert_eq!(scheme.as_str().parse::<Scheme>().unwrap(), scheme);
        }
        assert!("sew-attention".parse::<Scheme>().is_err());
    }

    #[test]
    fn default_grid_geometry() {
        let config = RenderConfig::default();
        // 224 / 6 = 37 remainder 2, one spare pixel on each side.
        assert_eq!(config.cell_side(), 37);
        assert_eq!(config.grid_origin(), 1);
        let attn = RenderConfig::for_scheme(Scheme::SewAttn);
        assert_eq!(attn.cell_side(), 28);
        assert_eq!(attn.grid_origin(), 0);
    }

    #[test]
    fn invalid_configs() {
        let base = RenderConfig::default();
        let cases = [
            RenderConfig {
                cut_length: 0,
                ..base.clone()
            },
            RenderConfig {
                grid_n: 0,
                ..base.clone()
            },
            RenderConfig {
                attn_scale: 0,
                ..base.clone()
            },
            RenderConfig {
                chars_per_row: 0,
                ..base.clone()
            },
            RenderConfig {
                margin_px: 112,
                ..base.clone()
            },
            RenderConfig {
                image_px: 5,
                ..base.clone()
            },
        ];
        for config in cases {
            assert!(
                matches!(config.validate(), Err(Error::Config(_))),
                "{config:?}"
            );
        }
        base.validate().unwrap();
    }
}
