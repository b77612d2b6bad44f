//! Rasterizing layout plans and encoding the result.
//!
//! Images are 8-bit grayscale with a binary palette: ink is 0, background 255.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::io::Cursor;

use crate::glyphfont::{self, PixelBlock};
use crate::layout::{LayoutPlan, RenderConfig};
use crate::{Error, Result};

pub const INK: u8 = 0;
pub const BACKGROUND: u8 = 255;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: u32,
    pub height: u32,
    /// Row-major grayscale values.
    pub pixels: Vec<u8>,
}

impl ImageBuffer {
    pub fn blank(width: u32, height: u32) -> Self {
        ImageBuffer {
            width,
            height,
            pixels: vec![BACKGROUND; (width * height) as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[(y * self.width + x) as usize]
    }

    pub fn ink_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == INK).count()
    }
}

/// Draws every command of `plan` onto a blank `image_px` square.
pub fn render(plan: &LayoutPlan, config: &RenderConfig) -> Result<ImageBuffer> {
    let side = config.image_px;
    let mut image = ImageBuffer::blank(side, side);
    let mut cache: HashMap<(char, u32), PixelBlock> = HashMap::new();
    for cmd in &plan.commands {
        if cmd.x + cmd.cell_px > side || cmd.y + cmd.cell_px > side {
            return Err(Error::Config(format!(
                "command for {:?} at ({}, {}) leaves the {side}px image",
                cmd.character, cmd.x, cmd.y
            )));
        }
        let key = (cmd.character, cmd.cell_px);
        let block = match cache.entry(key) {
            Entry::Occupied(slot) => slot.into_mut(),
            Entry::Vacant(slot) => {
                let glyph = match glyphfont::glyph_bitmap(cmd.character) {
                    Ok(glyph) => glyph,
                    Err(_) if config.glyph_fallback => glyphfont::fallback_glyph(),
                    Err(e) => return Err(e),
                };
                slot.insert(glyphfont::scale_bitmap(&glyph, cmd.cell_px)?)
            }
        };
        for dy in 0..block.side {
            let row = ((cmd.y + dy) * side + cmd.x) as usize;
            let src = &block.pixels[(dy * block.side) as usize..((dy + 1) * block.side) as usize];
            for (dst, &ink) in image.pixels[row..row + block.side as usize]
                .iter_mut()
                .zip(src)
            {
                if ink == 1 {
                    *dst = INK;
                }
            }
        }
    }
    Ok(image)
}

/// Binary PGM (P5, maxval 255, no comments).
pub fn encode_pgm(image: &ImageBuffer) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    out
}

/// Reads a binary PGM with maxval 255. Comment lines in the header are accepted.
pub fn decode_pgm(bytes: &[u8]) -> Result<ImageBuffer> {
    let bad = |msg: &str| Error::Decode(format!("PGM: {msg}"));
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("not a binary graymap"));
    }
    let parse = |s: &str| s.parse::<u32>().map_err(|_| bad("bad header number"));
    let (width, height, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let len = (width as usize) * (height as usize);
    let raster = bytes
        .get(pos..pos + len)
        .ok_or_else(|| bad("raster shorter than width * height"))?;
    Ok(ImageBuffer {
        width,
        height,
        pixels: raster.to_vec(),
    })
}

/// 8-bit grayscale PNG.
pub fn encode_png(image: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, image.width, image.height);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| Error::Decode(format!("PNG encode: {e}")))?;
        writer
            .write_image_data(&image.pixels)
            .map_err(|e| Error::Decode(format!("PNG encode: {e}")))?;
    }
    Ok(out)
}

pub fn decode_png(bytes: &[u8]) -> Result<ImageBuffer> {
    let err = |e: png::DecodingError| Error::Decode(format!("PNG: {e}"));
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(err)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Decode("PNG: image too large".into()))?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(err)?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Decode(format!(
            "PNG: expected 8-bit grayscale, found {:?} {:?}",
            info.color_type, info.bit_depth
        )));
    }
    buf.truncate(info.buffer_size());
    Ok(ImageBuffer {
        width: info.width,
        height: info.height,
        pixels: buf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageFormat {
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Png => "png",
        }
    }

    pub fn encode(self, image: &ImageBuffer) -> Result<Vec<u8>> {
        match self {
            ImageFormat::Pgm => Ok(encode_pgm(image)),
            ImageFormat::Png => encode_png(image),
        }
    }

    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "pgm" => Some(ImageFormat::Pgm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }
}

impl std::str::FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ImageFormat::from_extension(s)
            .ok_or_else(|| Error::Config(format!("unknown image format {s:?}")))
    }
}

/// Decodes PGM or PNG by sniffing the magic bytes.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    if bytes.starts_with(b"P5") {
        decode_pgm(bytes)
    } else {
        decode_png(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{DrawCommand, Scheme};

    fn plan_of(commands: Vec<DrawCommand>) -> LayoutPlan {
        LayoutPlan {
            scheme: Scheme::Sew,
            commands,
            words: Vec::new(),
            words_placed: 0,
            words_truncated: 0,
        }
    }

    #[test]
    fn empty_plan_is_blank() {
        let img = render(&plan_of(Vec::new()), &RenderConfig::default()).unwrap();
        assert_eq!((img.width, img.height), (224, 224));
        assert!(img.pixels.iter().all(|&p| p == BACKGROUND));
    }

    #[test]
    fn single_glyph_fills_image() {
        let cmd = DrawCommand {
            character: 'i',
            x: 0,
            y: 0,
            cell_px: 224,
        };
        let img = render(&plan_of(vec![cmd]), &RenderConfig::default()).unwrap();
        let block = glyphfont::rasterize_scaled('i', 224).unwrap();
        for y in 0..224 {
            for x in 0..224 {
                let want = if block.get(x, y) == 1 {
                    INK
                } else {
                    BACKGROUND
                };
                assert_eq!(img.get(x, y), want);
            }
        }
    }

    #[test]
    fn unsupported_glyph_without_fallback() {
        let cmd = DrawCommand {
            character: '\u{e9}',
            x: 0,
            y: 0,
            cell_px: 16,
        };
        let strict = RenderConfig {
            glyph_fallback: false,
            ..RenderConfig::default()
        };
        assert!(matches!(
            render(&plan_of(vec![cmd]), &strict),
            Err(Error::UnsupportedGlyph('\u{e9}'))
        ));
        let img = render(&plan_of(vec![cmd]), &RenderConfig::default()).unwrap();
        assert_eq!(img.ink_count(), 144);
    }

    #[test]
    fn out_of_bounds_command_rejected() {
        let cmd = DrawCommand {
            character: 'a',
            x: 220,
            y: 0,
            cell_px: 8,
        };
        assert!(render(&plan_of(vec![cmd]), &RenderConfig::default()).is_err());
    }

    #[test]
    fn pgm_bytes() {
        let blank = ImageBuffer::blank(2, 2);
        assert_eq!(
            encode_pgm(&blank),
            b"P5\n2 2\n255\n\xff\xff\xff\xff".to_vec()
        );
        let ink = ImageBuffer {
            width: 1,
            height: 1,
            pixels: vec![INK],
        };
        assert_eq!(encode_pgm(&ink), b"P5\n1 1\n255\n\x00".to_vec());
    }

    #[test]
    fn pgm_decode_handles_comments() {
        let img = decode_pgm(b"P5\n# made by hand\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!(img.pixels, vec![0, 255]);
        assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
        assert!(decode_pgm(b"P5\n2 2\n255\n\x00").is_err());
    }

    #[test]
    fn png_round_trip() {
        let ink = ImageBuffer {
            width: 1,
            height: 1,
            pixels: vec![INK],
        };
        let cmd = DrawCommand {
            character: 'i',
            x: 0,
            y: 0,
            cell_px: 224,
        };
        let glyph = render(&plan_of(vec![cmd]), &RenderConfig::default()).unwrap();
        for img in [ImageBuffer::blank(2, 2), ink, glyph] {
            let bytes = encode_png(&img).unwrap();
            assert_eq!(decode_png(&bytes).unwrap(), img);
            assert_eq!(decode_image(&bytes).unwrap(), img);
        }
        let blank = decode_png(&encode_png(&ImageBuffer::blank(224, 224)).unwrap()).unwrap();
        assert!(blank.pixels.iter().all(|&p| p == 255));
    }
}
