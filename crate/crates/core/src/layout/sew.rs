use super::blueprint::{attention_blueprint, ceil_sqrt, BlueprintGrid, ANCHOR, FLOW};
use super::{DrawCommand, LayoutPlan, PlacedWord, RenderConfig, Scheme, SquareRegion};
use crate::{Error, Result};

/// Lays the letters of `word` out inside `square`.
///
/// A word of `L` letters gets a `c`x`c` letter grid with `c = ceil(sqrt(L))`
/// and letter cells of `floor(side / c)` pixels. Letters fill the grid
/// row-major from the square's top-left corner.
pub fn word_square_plan(word: &str, square: SquareRegion) -> Result<Vec<DrawCommand>> {
    let letters = word.chars().count();
    if letters == 0 {
        return Ok(Vec::new());
    }
    let grid = ceil_sqrt(letters as u32);
    if square.side < grid {
        return Err(Error::SquareTooSmall {
            side: square.side,
            letters,
            grid,
        });
    }
    let step = square.side / grid;
    Ok(word
        .chars()
        .enumerate()
        .map(|(i, character)| {
            let i = i as u32;
            DrawCommand {
                character,
                x: square.x + (i % grid) * step,
                y: square.y + (i / grid) * step,
                cell_px: step,
            }
        })
        .collect())
}

/// One word per grid square, row-major, at most `min(cut_length, grid_n²)` words.
pub fn sew_grid_plan<S: AsRef<str>>(words: &[S], config: &RenderConfig) -> Result<LayoutPlan> {
    config.validate()?;
    let capacity = (config.cut_length as usize).min((config.grid_n * config.grid_n) as usize);
    let mut plan = LayoutPlan::empty(Scheme::Sew);
    for (index, word) in words.iter().take(capacity).enumerate() {
        let cell = index as u32;
        let square = config.grid_square(cell / config.grid_n, cell % config.grid_n, 1);
        place_word(&mut plan, index, word.as_ref(), square)?;
    }
    plan.words_placed = plan.words.len();
    plan.words_truncated = words.len() - plan.words_placed;
    Ok(plan)
}

/// Walks `blueprint` row-major: anchors take the first `anchor_count` words
/// enlarged, flow cells take the remaining words in order, covered cells are skipped.
pub fn sew_attention_plan<S: AsRef<str>>(
    words: &[S],
    blueprint: &BlueprintGrid,
    config: &RenderConfig,
) -> Result<LayoutPlan> {
    let attended = blueprint.anchor_count().min(words.len());
    let (head, tail) = words.split_at(attended);
    let mut plan = blueprint_plan(head, tail, blueprint, config)?;
    plan.scheme = Scheme::SewAttn;
    Ok(plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    /// Profile tokens take the first grid squares at normal size.
    Uniform,
    /// Profile tokens take the attention squares.
    Attended,
}

/// Combines profile tokens and text on one grid.
///
/// In attended mode the blueprint is built from the config's `grid_n`,
/// `attn_count` and `attn_scale`.
pub fn compose_profile_plan<S: AsRef<str>, P: AsRef<str>>(
    words: &[S],
    profile_tokens: &[P],
    mode: ProfileMode,
    config: &RenderConfig,
) -> Result<LayoutPlan> {
    match mode {
        ProfileMode::Uniform => {
            let combined: Vec<&str> = profile_tokens
                .iter()
                .map(AsRef::as_ref)
                .chain(words.iter().map(AsRef::as_ref))
                .collect();
            let mut plan = sew_grid_plan(&combined, config)?;
            plan.scheme = Scheme::SewProfile;
            Ok(plan)
        }
        ProfileMode::Attended => {
            let blueprint =
                attention_blueprint(config.grid_n, config.attn_count, config.attn_scale)?;
            compose_attended_profile(words, profile_tokens, &blueprint, config)
        }
    }
}

/// Attended-profile composition against an explicit blueprint.
pub(crate) fn compose_attended_profile<S: AsRef<str>, P: AsRef<str>>(
    words: &[S],
    profile_tokens: &[P],
    blueprint: &BlueprintGrid,
    config: &RenderConfig,
) -> Result<LayoutPlan> {
    if profile_tokens.len() > blueprint.anchor_count() {
        return Err(Error::Config(format!(
            "{} profile tokens but only {} attention squares",
            profile_tokens.len(),
            blueprint.anchor_count()
        )));
    }
    let mut plan = blueprint_plan(profile_tokens, words, blueprint, config)?;
    plan.scheme = Scheme::SewAttnProfile;
    Ok(plan)
}

/// Places `attended` in anchor squares and `flow` in flow cells. Input
/// indices count `attended` first, then `flow`; the cut-length budget is
/// spent in the same order.
fn blueprint_plan<A: AsRef<str>, F: AsRef<str>>(
    attended: &[A],
    flow: &[F],
    blueprint: &BlueprintGrid,
    config: &RenderConfig,
) -> Result<LayoutPlan> {
    config.validate()?;
    if blueprint.n() != config.grid_n {
        return Err(Error::Config(format!(
            "blueprint is {0}x{0} but grid_n is {1}",
            blueprint.n(),
            config.grid_n
        )));
    }
    let budget = config.cut_length as usize;
    let attended_budget = attended.len().min(budget);
    let flow_budget = flow.len().min(budget - attended_budget);

    let mut plan = LayoutPlan::empty(Scheme::SewAttn);
    let (mut next_attended, mut next_flow) = (0, 0);
    let n = blueprint.n();
    for row in 0..n {
        for col in 0..n {
            match blueprint.get(row, col) {
                ANCHOR if next_attended < attended_budget => {
                    let square = config.grid_square(row, col, blueprint.scale());
                    let word = attended[next_attended].as_ref();
                    place_word(&mut plan, next_attended, word, square)?;
                    next_attended += 1;
                }
                FLOW if next_flow < flow_budget => {
                    let square = config.grid_square(row, col, 1);
                    let word = flow[next_flow].as_ref();
                    place_word(&mut plan, attended.len() + next_flow, word, square)?;
                    next_flow += 1;
                }
                _ => {}
            }
        }
    }
    plan.words_placed = plan.words.len();
    plan.words_truncated = attended.len() + flow.len() - plan.words_placed;
    Ok(plan)
}

fn place_word(plan: &mut LayoutPlan, index: usize, word: &str, square: SquareRegion) -> Result<()> {
    let commands = word_square_plan(word, square)?;
    plan.words.push(PlacedWord {
        index,
        token: word.to_string(),
        region: Some(square),
        first_command: plan.commands.len(),
        command_count: commands.len(),
    });
    plan.commands.extend(commands);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn positions(cmds: &[DrawCommand]) -> Vec<(u32, u32)> {
        cmds.iter().map(|c| (c.x, c.y)).collect()
    }

    fn words(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("w{i}")).collect()
    }

    #[test]
    fn two_letter_word() {
        let cmds = word_square_plan("me", SquareRegion::new(0, 0, 60)).unwrap();
        assert_eq!(positions(&cmds), vec![(0, 0), (30, 0)]);
        assert!(cmds.iter().all(|c| c.cell_px == 30));
        assert_eq!(cmds[0].character, 'm');
        assert_eq!(cmds[1].character, 'e');
    }

    #[test]
    fn five_letter_word_wraps_after_three() {
        let cmds = word_square_plan("happy", SquareRegion::new(0, 0, 60)).unwrap();
        assert_eq!(
            positions(&cmds),
            vec![(0, 0), (20, 0), (40, 0), (0, 20), (20, 20)]
        );
        assert!(cmds.iter().all(|c| c.cell_px == 20));
    }

    #[test]
    fn single_letter_fills_square() {
        let cmds = word_square_plan("i", SquareRegion::new(7, 9, 60)).unwrap();
        assert_eq!(
            cmds,
            vec![DrawCommand {
                character: 'i',
                x: 7,
                y: 9,
                cell_px: 60
            }]
        );
    }

    #[test]
    fn empty_word_and_tiny_square() {
        assert!(word_square_plan("", SquareRegion::new(0, 0, 1))
            .unwrap()
            .is_empty());
        assert!(matches!(
            word_square_plan("happy", SquareRegion::new(0, 0, 2)),
            Err(Error::SquareTooSmall { grid: 3, .. })
        ));
        assert_eq!(
            word_square_plan("happy", SquareRegion::new(0, 0, 3))
                .unwrap()
                .len(),
            5
        );
    }

    #[test]
    fn full_grid() {
        let plan = sew_grid_plan(&words(36), &RenderConfig::default()).unwrap();
        assert_eq!((plan.words_placed, plan.words_truncated), (36, 0));
        let last = plan.words.last().unwrap().region.unwrap();
        assert_eq!((last.x, last.y, last.side), (1 + 5 * 37, 1 + 5 * 37, 37));
    }

    #[test]
    fn cut_length_truncates() {
        let plan = sew_grid_plan(&words(40), &RenderConfig::default()).unwrap();
        assert_eq!((plan.words_placed, plan.words_truncated), (36, 4));
        assert_eq!(plan.recovered_tokens(), words(36));
    }

    #[test]
    fn grid_smaller_than_cut_length() {
        let config = RenderConfig {
            grid_n: 3,
            ..RenderConfig::default()
        };
        let plan = sew_grid_plan(&words(12), &config).unwrap();
        assert_eq!((plan.words_placed, plan.words_truncated), (9, 3));
    }

    #[test]
    fn empty_input() {
        let plan = sew_grid_plan::<&str>(&[], &RenderConfig::default()).unwrap();
        assert!(plan.commands.is_empty());
        assert_eq!((plan.words_placed, plan.words_truncated), (0, 0));
    }

    fn attn_config() -> RenderConfig {
        RenderConfig::for_scheme(Scheme::SewAttn)
    }

    #[test]
    fn twenty_words_with_attention() {
        let config = attn_config();
        let bp = attention_blueprint(8, 4, 2).unwrap();
        let input = words(20);
        let plan = sew_attention_plan(&input, &bp, &config).unwrap();
        assert_eq!((plan.words_placed, plan.words_truncated), (20, 0));
        for w in &plan.words[..] {
            let r = w.region.unwrap();
            if w.index < 4 {
                assert_eq!(r.side, 56, "{w:?}");
                assert!(r.x >= 56 && r.y >= 56 && r.x + r.side <= 168 && r.y + r.side <= 168);
            } else {
                assert_eq!(r.side, 28);
            }
        }
        // words 5..20 occupy the first 16 flow cells: the top two rows.
        let flow: Vec<_> = plan.words.iter().filter(|w| w.index >= 4).collect();
        assert_eq!(flow.len(), 16);
        for (k, w) in flow.iter().enumerate() {
            assert_eq!(w.index, 4 + k);
            let r = w.region.unwrap();
            assert_eq!((r.x, r.y), ((k as u32 % 8) * 28, (k as u32 / 8) * 28));
        }
        assert_eq!(plan.recovered_tokens(), input);
    }

    #[test]
    fn short_input_leaves_anchor_blank() {
        let bp = attention_blueprint(8, 4, 2).unwrap();
        let plan = sew_attention_plan(&words(3), &bp, &attn_config()).unwrap();
        assert_eq!(plan.words_placed, 3);
        assert!(plan.words.iter().all(|w| w.region.unwrap().side == 56));
    }

    #[test]
    fn attention_capacity() {
        let bp = attention_blueprint(8, 4, 2).unwrap();
        let plan = sew_attention_plan(&words(64), &bp, &attn_config()).unwrap();
        assert_eq!((plan.words_placed, plan.words_truncated), (52, 12));
    }

    #[test]
    fn blueprint_must_match_grid() {
        let bp = attention_blueprint(6, 4, 2).unwrap();
        assert!(matches!(
            sew_attention_plan(&words(5), &bp, &attn_config()),
            Err(Error::Config(_))
        ));
    }

    const PROFILE: [&str; 4] = ["36", "IND", "m", "m"];

    #[test]
    fn uniform_profile_leads_grid() {
        let text = words(10);
        let plan = compose_profile_plan(
            &text,
            &PROFILE,
            ProfileMode::Uniform,
            &RenderConfig::default(),
        )
        .unwrap();
        assert_eq!(plan.scheme, Scheme::SewProfile);
        for (k, w) in plan.words.iter().take(5).enumerate() {
            let r = w.region.unwrap();
            assert_eq!((r.x, r.y), (1 + 37 * k as u32, 1));
        }
        assert_eq!(
            plan.words[..4]
                .iter()
                .map(|w| w.token.as_str())
                .collect::<Vec<_>>(),
            PROFILE
        );
        assert_eq!(plan.words[4].token, "w0");
    }

    #[test]
    fn attended_profile_in_anchors() {
        let text = words(10);
        let plan =
            compose_profile_plan(&text, &PROFILE, ProfileMode::Attended, &attn_config()).unwrap();
        assert_eq!(plan.scheme, Scheme::SewAttnProfile);
        let big: Vec<&str> = {
            let mut v: Vec<_> = plan
                .words
                .iter()
                .filter(|w| w.region.unwrap().side == 56)
                .collect();
            v.sort_by_key(|w| w.index);
            v.iter().map(|w| w.token.as_str()).collect()
        };
        assert_eq!(big, PROFILE);
        assert_eq!(plan.words_placed, 14);
    }

    #[test]
    fn attended_profile_short_record_keeps_text_in_flow() {
        let plan = compose_profile_plan(
            &words(5),
            &["0", "N"],
            ProfileMode::Attended,
            &attn_config(),
        )
        .unwrap();
        let big = plan
            .words
            .iter()
            .filter(|w| w.region.unwrap().side == 56)
            .count();
        assert_eq!(big, 2);
        assert_eq!(plan.words_placed, 7);
    }

    #[test]
    fn too_many_attended_profile_tokens() {
        let config = RenderConfig {
            attn_count: 2,
            ..attn_config()
        };
        assert!(compose_profile_plan(&words(3), &PROFILE, ProfileMode::Attended, &config).is_err());
    }

    #[test]
    fn empty_uniform_profile_matches_plain_grid() {
        let text = words(12);
        let config = RenderConfig::default();
        let plain = sew_grid_plan(&text, &config).unwrap();
        let profiled =
            compose_profile_plan::<_, &str>(&text, &[], ProfileMode::Uniform, &config).unwrap();
        assert_eq!(plain.commands, profiled.commands);
    }
}
