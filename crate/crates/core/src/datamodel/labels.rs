use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::HyperCube;

/// Per-pixel class map. `0` marks unlabeled pixels; labeled pixels carry ids
/// `1..=C` with no gaps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    height: usize,
    width: usize,
    labels: Vec<usize>,
    classes: usize,
}

impl LabelGrid {
    pub fn new(height: usize, width: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != height * width {
            return Err(Error::Labels(format!(
                "{height}x{width} grid needs {} labels, got {}",
                height * width,
                labels.len()
            )));
        }
        let present: BTreeSet<usize> = labels.iter().copied().filter(|&l| l != 0).collect();
        let classes = present.iter().next_back().copied().unwrap_or(0);
        let missing: Vec<usize> = (1..=classes).filter(|c| !present.contains(c)).collect();
        if !missing.is_empty() {
            let list = missing
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::Labels(format!(
                "class ids must be contiguous 1..={classes}; missing class id(s) {list}"
            )));
        }
        Ok(Self {
            height,
            width,
            labels,
            classes,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of classes `C`.
    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, row: usize, col: usize) -> usize {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes];
        for &l in self.labels.iter().filter(|&&l| l != 0) {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Labeled pixel positions of each class, in raster order.
    pub fn positions_by_class(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.classes];
        for (i, &l) in self.labels.iter().enumerate() {
            if l != 0 {
                out[l - 1].push((i / self.width, i % self.width));
            }
        }
        out
    }

    pub fn check_aligned(&self, cube: &HyperCube) -> Result<()> {
        if (self.height, self.width) != (cube.height(), cube.width()) {
            return Err(Error::DimensionMismatch(format!(
                "label grid is {}x{}, cube is {}x{}",
                self.height,
                self.width,
                cube.height(),
                cube.width()
            )));
        }
        Ok(())
    }
}

/// Parses a CSV integer grid with `height` rows of `width` values.
pub fn parse_labels(text: &str, height: usize, width: usize) -> Result<LabelGrid> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    if rows.len() != height {
        return Err(Error::Labels(format!(
            "expected {height} rows, found {}",
            rows.len()
        )));
    }
    let mut labels = Vec::with_capacity(height * width);
    for (r, row) in rows.iter().enumerate() {
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(Error::Labels(format!(
                "row {} has {} columns, expected {width}",
                r + 1,
                fields.len()
            )));
        }
        for (c, f) in fields.iter().enumerate() {
            let v: i64 = f.parse().map_err(|_| {
                Error::Labels(format!("row {}, column {}: '{f}' is not an integer", r + 1, c + 1))
            })?;
            if v < 0 {
                return Err(Error::Labels(format!(
                    "row {}, column {}: negative label {v}",
                    r + 1,
                    c + 1
                )));
            }
            labels.push(v as usize);
        }
    }
    LabelGrid::new(height, width, labels)
}

pub fn load_labels(path: impl AsRef<Path>, height: usize, width: usize) -> Result<LabelGrid> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, height, width)
}

pub fn write_labels(grid: &LabelGrid, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for row in grid.labels.chunks(grid.width) {
        let line: Vec<String> = row.iter().map(|l| l.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_grid() {
        let g = parse_labels("0,1\n2,2", 2, 2).unwrap();
        assert_eq!(g.classes(), 2);
        assert_eq!(g.labels().iter().filter(|&&l| l == 0).count(), 1);
        assert_eq!(g.class_counts(), vec![1, 2]);
    }

    #[test]
    fn all_unlabeled_is_valid() {
        let g = parse_labels("0,0\n0,0", 2, 2).unwrap();
        assert_eq!(g.classes(), 0);
    }

    #[test]
    fn gap_in_class_ids_is_reported() {
        let err = parse_labels("1,3\n1,1", 2, 2).unwrap_err().to_string();
        assert!(err.contains("missing class id(s) 2"), "{err}");
    }

    #[test]
    fn ragged_and_negative_rows_fail() {
        assert!(parse_labels("1,1\n1", 2, 2).is_err());
        assert!(parse_labels("1,-1\n1,1", 2, 2).is_err());
        assert!(parse_labels("1,1", 2, 2).is_err());
    }
}
