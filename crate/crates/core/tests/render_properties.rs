use proptest::prelude::*;

use sew_core::glyphfont::{self, BASE_RESOLUTION};
use sew_core::layout::{sew_grid_plan, RenderConfig};
use sew_core::render::{decode_png, encode_pgm, encode_png, render, ImageBuffer};

/// Minimal P5 reader written against the format description, kept separate
/// from the library decoder.
fn read_p5(bytes: &[u8]) -> (u32, u32, Vec<u8>) {
    let text_end = {
        // header is four whitespace-separated fields
        let mut fields = 0;
        let mut i = 0;
        let mut in_field = false;
        while fields < 4 {
            let ws = bytes[i].is_ascii_whitespace();
            if !ws && !in_field {
                in_field = true;
            } else if ws && in_field {
                in_field = false;
                fields += 1;
            }
            i += 1;
        }
        i
    };
    let header = std::str::from_utf8(&bytes[..text_end]).unwrap();
    let parts: Vec<&str> = header.split_ascii_whitespace().collect();
    assert_eq!(parts[0], "P5");
    assert_eq!(parts[3], "255");
    let w: u32 = parts[1].parse().unwrap();
    let h: u32 = parts[2].parse().unwrap();
    (w, h, bytes[text_end..].to_vec())
}

fn image_strategy() -> impl Strategy<Value = ImageBuffer> {
    (1u32..40, 1u32..40).prop_flat_map(|(w, h)| {
        prop::collection::vec(any::<u8>(), (w * h) as usize).prop_map(move |pixels| ImageBuffer {
            width: w,
            height: h,
            pixels,
        })
    })
}

proptest! {
    #[test]
    fn pgm_round_trip(img in image_strategy()) {
        let (w, h, raster) = read_p5(&encode_pgm(&img));
        prop_assert_eq!((w, h), (img.width, img.height));
        prop_assert_eq!(&raster, &img.pixels);
        prop_assert_eq!(sew_core::render::decode_pgm(&encode_pgm(&img)).unwrap(), img);
    }

    #[test]
    fn png_round_trip(img in image_strategy()) {
        prop_assert_eq!(decode_png(&encode_png(&img).unwrap()).unwrap(), img);
    }

    #[test]
    fn integer_upscale_is_kronecker(ch in 0x20u8..0x7f, k in 1u32..6) {
        let ch = ch as char;
        let base = glyphfont::glyph_bitmap(ch).unwrap();
        let block = glyphfont::rasterize_scaled(ch, k * BASE_RESOLUTION as u32).unwrap();
        for y in 0..block.side {
            for x in 0..block.side {
                prop_assert_eq!(block.get(x, y), base.pixels[(y / k) as usize][(x / k) as usize]);
            }
        }
    }

    #[test]
    fn scaling_is_binary_and_blank_stays_blank(ch in 0x20u8..0x7f, cell in 1u32..80) {
        let block = glyphfont::rasterize_scaled(ch as char, cell).unwrap();
        prop_assert!(block.pixels.iter().all(|&p| p <= 1));
        if ch == b' ' {
            prop_assert_eq!(block.ink_count(), 0);
        }
        prop_assert_eq!(block.clone(), glyphfont::rasterize_scaled(ch as char, cell).unwrap());
    }

    #[test]
    fn ink_is_conserved(words in prop::collection::vec("[a-zA-Z0-9]{1,10}", 0..40)) {
        let config = RenderConfig::default();
        let plan = sew_grid_plan(&words, &config).unwrap();
        let img = render(&plan, &config).unwrap();
        let expected: usize = plan
            .commands
            .iter()
            .map(|c| glyphfont::rasterize_scaled(c.character, c.cell_px).unwrap().ink_count())
            .sum();
        prop_assert_eq!(img.ink_count(), expected);
        prop_assert!(img.pixels.iter().all(|&p| p == 0 || p == 255));
    }
}

#[test]
fn rendered_png_is_binary() {
    let words: Vec<String> = "last month my son got his first trophy"
        .split(' ')
        .map(String::from)
        .collect();
    let config = RenderConfig::default();
    let img = render(&sew_grid_plan(&words, &config).unwrap(), &config).unwrap();
    let decoded = decode_png(&encode_png(&img).unwrap()).unwrap();
    let mut histogram = [0usize; 256];
    for &p in &decoded.pixels {
        histogram[p as usize] += 1;
    }
    let used: Vec<usize> = (0..256).filter(|&v| histogram[v] > 0).collect();
    assert_eq!(used, vec![0, 255]);
}
