use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{HyperCube, LabelGrid, SampleSet};

/// Per-class random train/test sampling protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub per_class_train: usize,
    pub seed: u64,
    pub runs: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            per_class_train: 10,
            seed: 0,
            runs: 5,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.per_class_train == 0 {
            return Err(Error::InvalidParameter("per_class_train must be >= 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be >= 1".into()));
        }
        Ok(())
    }

    /// Seed used by run `run`: `seed + run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }
}

/// Train and test pixel positions for one run.
///
/// Each class's labeled pixels (raster order) are shuffled with a ChaCha8
/// generator seeded by `spec.seed + run`; the first `per_class_train` become
/// training pixels, the rest test pixels.
pub fn split_positions(
    grid: &LabelGrid,
    spec: &SplitSpec,
    run: usize,
) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    spec.validate()?;
    let by_class = grid.positions_by_class();
    if let Some((c, pos)) = by_class
        .iter()
        .enumerate()
        .find(|(_, p)| p.len() < spec.per_class_train)
    {
        return Err(Error::InsufficientClass {
            class: c + 1,
            available: pos.len(),
            required: spec.per_class_train,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.run_seed(run));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut pos in by_class {
        pos.shuffle(&mut rng);
        let rest = pos.split_off(spec.per_class_train);
        train.extend(pos);
        test.extend(rest);
    }
    Ok((train, test))
}

pub fn split(
    grid: &LabelGrid,
    cube: &HyperCube,
    spec: &SplitSpec,
    run: usize,
) -> Result<(SampleSet, SampleSet)> {
    let (train, test) = split_positions(grid, spec, run)?;
    Ok((
        SampleSet::from_positions(cube, grid, &train)?,
        SampleSet::from_positions(cube, grid, &test)?,
    ))
}
