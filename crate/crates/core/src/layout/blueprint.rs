use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

pub const FLOW: i8 = 0;
pub const ANCHOR: i8 = 1;
pub const COVERED: i8 = -1;

/// Square grid describing where enlarged attention words go.
///
/// `0` marks a normal flow cell, `1` the top-left anchor of an attention
/// square and `-1` the other cells covered by that square.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlueprintGrid {
    n: u32,
    scale: u32,
    cells: Vec<i8>,
}

/// Builds an `n`x`n` blueprint with `count` attention squares of
/// `scale`x`scale` cells.
///
/// The squares are arranged `ceil(sqrt(count))` per row, filled row-major,
/// and the whole arrangement is centered in the grid with the top-left offset
/// rounded down.
pub fn attention_blueprint(n: u32, count: u32, scale: u32) -> Result<BlueprintGrid> {
    if n == 0 || scale == 0 {
        return Err(Error::Config(
            "blueprint dimension and scale must be at least 1".into(),
        ));
    }
    let mut cells = vec![FLOW; (n * n) as usize];
    if count > 0 {
        let per_row = ceil_sqrt(count);
        let rows = count.div_ceil(per_row);
        let width = per_row * scale;
        let height = rows * scale;
        if width > n || height > n {
            return Err(Error::BlueprintOverflow { n, count, scale });
        }
        let left = (n - width) / 2;
        let top = (n - height) / 2;
        for k in 0..count {
            let row0 = top + (k / per_row) * scale;
            let col0 = left + (k % per_row) * scale;
            for dr in 0..scale {
                for dc in 0..scale {
                    let idx = ((row0 + dr) * n + col0 + dc) as usize;
                    cells[idx] = if dr == 0 && dc == 0 { ANCHOR } else { COVERED };
                }
            }
        }
    }
    Ok(BlueprintGrid { n, scale, cells })
}

pub(crate) fn ceil_sqrt(value: u32) -> u32 {
    let mut root = (value as f64).sqrt() as u32;
    while root * root < value {
        root += 1;
    }
    while root > 0 && (root - 1) * (root - 1) >= value {
        root -= 1;
    }
    root
}

impl BlueprintGrid {
    /// Validates `cells` (row-major, `n * n` values) and infers the square size.
    pub fn from_cells(n: u32, cells: Vec<i8>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Blueprint("dimension must be at least 1".into()));
        }
        if cells.len() != (n * n) as usize {
            return Err(Error::Blueprint(format!(
                "expected {} cells, found {}",
                n * n,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|v| ![FLOW, ANCHOR, COVERED].contains(v)) {
            return Err(Error::Blueprint(format!(
                "cell value {bad} not in {{-1, 0, 1}}"
            )));
        }
        let anchors = cells.iter().filter(|&&v| v == ANCHOR).count();
        if anchors == 0 {
            if cells.contains(&COVERED) {
                return Err(Error::Blueprint("covered cells without an anchor".into()));
            }
            return Ok(BlueprintGrid { n, scale: 1, cells });
        }
        for scale in 1..=n {
            if let Some(painted) = paint_blocks(n, scale, &cells) {
                if painted == cells {
                    return Ok(BlueprintGrid { n, scale, cells });
                }
            }
        }
        Err(Error::Blueprint(
            "anchors and covered cells do not form equal, disjoint squares".into(),
        ))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Side of every attention square in cells (1 when there are none).
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn cells(&self) -> &[i8] {
        &self.cells
    }

    pub fn get(&self, row: u32, col: u32) -> i8 {
        self.cells[(row * self.n + col) as usize]
    }

    pub fn count(&self, value: i8) -> usize {
        self.cells.iter().filter(|&&v| v == value).count()
    }

    pub fn anchor_count(&self) -> usize {
        self.count(ANCHOR)
    }

    pub fn flow_count(&self) -> usize {
        self.count(FLOW)
    }

    /// Plain-text form: `n` on the first line, then `n` rows of space-separated values.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }
}

/// Paints a `scale` block of -1 with a 1 in the corner at every anchor of
/// `cells`. `None` if blocks leave the grid or overlap.
fn paint_blocks(n: u32, scale: u32, cells: &[i8]) -> Option<Vec<i8>> {
    let mut painted = vec![FLOW; cells.len()];
    for (idx, _) in cells.iter().enumerate().filter(|(_, &v)| v == ANCHOR) {
        let row = idx as u32 / n;
        let col = idx as u32 % n;
        if row + scale > n || col + scale > n {
            return None;
        }
        for dr in 0..scale {
            for dc in 0..scale {
                let target = &mut painted[((row + dr) * n + col + dc) as usize];
                if *target != FLOW {
                    return None;
                }
                *target = if dr == 0 && dc == 0 { ANCHOR } else { COVERED };
            }
        }
    }
    Some(painted)
}

impl fmt::Display for BlueprintGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for row in self.cells.chunks(self.n as usize) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for BlueprintGrid {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Blueprint("empty input".into()))?;
        let n: u32 = header
            .parse()
            .map_err(|_| Error::Blueprint(format!("bad dimension line {header:?}")))?;
        let mut cells = Vec::with_capacity((n * n) as usize);
        let mut rows = 0;
        for line in lines {
            rows += 1;
            let before = cells.len();
            for tok in line.split_whitespace() {
                let v: i8 = tok
                    .parse()
                    .map_err(|_| Error::Blueprint(format!("bad cell {tok:?} on row {rows}")))?;
                cells.push(v);
            }
            if cells.len() - before != n as usize {
                return Err(Error::Blueprint(format!(
                    "row {rows} has {} values, expected {n}",
                    cells.len() - before
                )));
            }
        }
        if rows != n {
            return Err(Error::Blueprint(format!("expected {n} rows, found {rows}")));
        }
        BlueprintGrid::from_cells(n, cells)
    }
}
