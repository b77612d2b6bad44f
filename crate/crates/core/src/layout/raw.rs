use super::{DrawCommand, LayoutPlan, PlacedWord, RenderConfig, Scheme};
use crate::{Error, Result};

/// Character-level layout: the whitespace-separated words of `text` are
/// flowed left to right with one blank cell between words.
///
/// Cells are `floor(usable / chars_per_row)` pixels and the block of rows is
/// centered in the image. With `preserve_words` a word that would straddle a
/// row boundary moves to the next row, and a separator that would open a row
/// is dropped. Once the rows are used up, the words not yet started are
/// counted as truncated. Cut-length does not apply here; the image capacity
/// is the only limit.
pub fn raw_sc_plan(text: &str, config: &RenderConfig, preserve_words: bool) -> Result<LayoutPlan> {
    config.validate()?;
    let scheme = if preserve_words {
        Scheme::RawLinewrap
    } else {
        Scheme::Raw
    };
    let cols = config.chars_per_row;
    let usable = config.usable_px();
    let cell = usable / cols;
    if cell == 0 {
        return Err(Error::Config(format!(
            "{cols} characters per row do not fit in {usable} pixels"
        )));
    }
    let rows = usable / cell;
    let left = config.margin_px + (usable - cols * cell) / 2;
    let top = config.margin_px + (usable - rows * cell) / 2;
    let capacity = (rows * cols) as usize;

    let words: Vec<&str> = text.split_whitespace().collect();
    if preserve_words {
        if let Some(word) = words.iter().find(|w| w.chars().count() > cols as usize) {
            return Err(Error::WordTooLong {
                word: word.to_string(),
                len: word.chars().count(),
                chars_per_row: cols,
            });
        }
    }

    let at = |pos: usize, character: char| DrawCommand {
        character,
        x: left + (pos as u32 % cols) * cell,
        y: top + (pos as u32 / cols) * cell,
        cell_px: cell,
    };

    let mut plan = LayoutPlan::empty(scheme);
    let mut pos = 0usize;
    for (index, word) in words.iter().enumerate() {
        if index > 0 {
            let opens_row = pos.is_multiple_of(cols as usize);
            if !(preserve_words && opens_row) {
                if pos >= capacity {
                    break;
                }
                plan.commands.push(at(pos, ' '));
                pos += 1;
            }
        }
        let len = word.chars().count();
        if preserve_words {
            let col = pos % cols as usize;
            if col + len > cols as usize {
                pos += cols as usize - col;
            }
        }
        if pos >= capacity {
            break;
        }
        let first_command = plan.commands.len();
        for ch in word.chars().take(capacity - pos) {
            plan.commands.push(at(pos, ch));
            pos += 1;
        }
        plan.words.push(PlacedWord {
            index,
            token: word.to_string(),
            region: None,
            first_command,
            command_count: plan.commands.len() - first_command,
        });
    }
    plan.words_placed = plan.words.len();
    plan.words_truncated = words.len() - plan.words_placed;
    Ok(plan)
}
