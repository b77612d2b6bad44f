//! Embedded monospaced bitmap font.
//!
//! Every printable ASCII character (U+0020..=U+007E) has a 16x16 monochrome
//! bitmap. The bitmaps are the public-domain 8x8 VGA-derived font, each
//! pixel doubled into a 2x2 block, so the font data is small and identical on
//! every platform. Scaling to other cell sizes is nearest-neighbor and never
//! produces intermediate gray values.

mod font8x8;

use crate::{Error, Result};

use font8x8::FONT8X8_PRINTABLE;

/// Side length of every base glyph bitmap, in pixels.
pub const BASE_RESOLUTION: usize = 16;

const SOURCE_RESOLUTION: usize = 8;
const FIRST_PRINTABLE: char = ' ';
const LAST_PRINTABLE: char = '~';

/// A base-resolution glyph; every pixel is 0 (background) or 1 (ink).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlyphBitmap {
    pub codepoint: char,
    pub pixels: [[u8; BASE_RESOLUTION]; BASE_RESOLUTION],
}

impl GlyphBitmap {
    pub fn ink_count(&self) -> usize {
        self.pixels
            .iter()
            .map(|row| row.iter().filter(|&&p| p == 1).count())
            .sum()
    }
}

/// A square binary pixel block produced by scaling a glyph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelBlock {
    pub side: u32,
    /// Row-major, `side * side` values in {0, 1}.
    pub pixels: Vec<u8>,
}

impl PixelBlock {
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.side + x) as usize]
    }

    pub fn ink_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == 1).count()
    }
}

pub fn is_supported(ch: char) -> bool {
    (FIRST_PRINTABLE..=LAST_PRINTABLE).contains(&ch)
}

/// Characters with a glyph in the font, in code point order.
pub fn supported_chars() -> impl Iterator<Item = char> {
    FIRST_PRINTABLE..=LAST_PRINTABLE
}

/// Returns the base bitmap for `ch`.
pub fn glyph_bitmap(ch: char) -> Result<GlyphBitmap> {
    if !is_supported(ch) {
        return Err(Error::UnsupportedGlyph(ch));
    }
    let rows = &FONT8X8_PRINTABLE[(ch as u32 - FIRST_PRINTABLE as u32) as usize];
    let factor = BASE_RESOLUTION / SOURCE_RESOLUTION;
    let mut pixels = [[0u8; BASE_RESOLUTION]; BASE_RESOLUTION];
    for (y, row) in pixels.iter_mut().enumerate() {
        let bits = rows[y / factor];
        for (x, px) in row.iter_mut().enumerate() {
            *px = (bits >> (x / factor)) & 1;
        }
    }
    Ok(GlyphBitmap {
        codepoint: ch,
        pixels,
    })
}

/// Substitute glyph for characters outside the font: a filled box inset by
/// two pixels on each side.
pub fn fallback_glyph() -> GlyphBitmap {
    let mut pixels = [[0u8; BASE_RESOLUTION]; BASE_RESOLUTION];
    for row in &mut pixels[2..BASE_RESOLUTION - 2] {
        for px in &mut row[2..BASE_RESOLUTION - 2] {
            *px = 1;
        }
    }
    GlyphBitmap {
        codepoint: '\u{FFFD}',
        pixels,
    }
}

/// Base bitmap for `ch`, or the fallback box when `ch` is not in the font.
pub fn glyph_or_fallback(ch: char) -> GlyphBitmap {
    glyph_bitmap(ch).unwrap_or_else(|_| fallback_glyph())
}

/// Scales the glyph for `ch` to a `cell_px` x `cell_px` block.
pub fn rasterize_scaled(ch: char, cell_px: u32) -> Result<PixelBlock> {
    let glyph = glyph_bitmap(ch)?;
    scale_bitmap(&glyph, cell_px)
}

/// Nearest-neighbor scaling of a base bitmap.
///
/// Output pixel `i` samples source index `floor((2i + 1) * base / (2 * cell_px))`,
/// i.e. the source pixel under the output pixel's center. For `cell_px = k * base`
/// this reduces to `floor(i / k)`, so integer upscales are exact Kronecker
/// expansions.
pub fn scale_bitmap(glyph: &GlyphBitmap, cell_px: u32) -> Result<PixelBlock> {
    if cell_px == 0 {
        return Err(Error::Config("cell size must be at least 1 pixel".into()));
    }
    let side = cell_px as usize;
    let index: Vec<usize> = (0..side)
        .map(|i| (2 * i + 1) * BASE_RESOLUTION / (2 * side))
        .collect();
    let mut pixels = Vec::with_capacity(side * side);
    for &sy in &index {
        let row = &glyph.pixels[sy];
        pixels.extend(index.iter().map(|&sx| row[sx]));
    }
    Ok(PixelBlock {
        side: cell_px,
        pixels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_required_characters() {
        let required = ('a'..='z').chain('A'..='Z').chain('0'..='9');
        for ch in required {
            let g = glyph_bitmap(ch).unwrap();
            assert!(g.ink_count() > 0, "{ch:?} has no ink");
        }
        assert_eq!(supported_chars().count(), 95);
    }

    #[test]
    fn space_is_blank() {
        assert_eq!(glyph_bitmap(' ').unwrap().ink_count(), 0);
    }

    #[test]
    fn non_ascii_is_unsupported() {
        assert!(matches!(
            glyph_bitmap('\u{e9}'),
            Err(Error::UnsupportedGlyph('\u{e9}'))
        ));
        assert!(rasterize_scaled('\n', 4).is_err());
    }

    #[test]
    fn repeated_calls_agree() {
        assert_eq!(glyph_bitmap('a').unwrap(), glyph_bitmap('a').unwrap());
    }

    #[test]
    fn identity_scale() {
        let g = glyph_bitmap('x').unwrap();
        let block = rasterize_scaled('x', BASE_RESOLUTION as u32).unwrap();
        for y in 0..BASE_RESOLUTION {
            for x in 0..BASE_RESOLUTION {
                assert_eq!(block.get(x as u32, y as u32), g.pixels[y][x]);
            }
        }
    }

    #[test]
    fn double_scale_is_block_expansion() {
        let g = glyph_bitmap('x').unwrap();
        let block = rasterize_scaled('x', 2 * BASE_RESOLUTION as u32).unwrap();
        for y in 0..2 * BASE_RESOLUTION {
            for x in 0..2 * BASE_RESOLUTION {
                assert_eq!(block.get(x as u32, y as u32), g.pixels[y / 2][x / 2]);
            }
        }
    }

    #[test]
    fn single_pixel_samples_center() {
        // One output pixel samples source index (2*0+1)*16/2 = 8 on both axes.
        // Base pixel (8, 8) of 'x' is source pixel (4, 4) of the 8x8 glyph,
        // row 0x1C, bit 4 -> ink.
        let block = rasterize_scaled('x', 1).unwrap();
        assert_eq!(block.pixels, vec![1]);
        assert_eq!(glyph_bitmap('x').unwrap().pixels[8][8], 1);
        // 'a' row 4 is 0x3E: bit 4 is 1.
        assert_eq!(rasterize_scaled('a', 1).unwrap().pixels, vec![1]);
        assert_eq!(rasterize_scaled(' ', 1).unwrap().pixels, vec![0]);
    }

    #[test]
    fn zero_cell_rejected() {
        assert!(matches!(rasterize_scaled('a', 0), Err(Error::Config(_))));
    }

    #[test]
    fn fallback_is_filled_box() {
        let g = fallback_glyph();
        assert_eq!(g.ink_count(), 12 * 12);
        assert_eq!(glyph_or_fallback('\u{e9}'), g);
    }
}
