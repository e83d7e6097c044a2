use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};

use super::{HyperCube, LabelGrid};

/// Labeled spectra, one row per sample, with the pixel each one came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    features: Array2<f64>,
    labels: Vec<usize>,
    positions: Vec<(usize, usize)>,
    classes: usize,
}

impl SampleSet {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        positions: Vec<(usize, usize)>,
        classes: usize,
    ) -> Result<Self> {
        let n = features.nrows();
        if labels.len() != n || positions.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} feature rows, {} labels, {} positions",
                labels.len(),
                positions.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l == 0 || l > classes) {
            return Err(Error::InvalidParameter(format!(
                "label {bad} outside 1..={classes}"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite sample feature".into()));
        }
        Ok(Self {
            features,
            labels,
            positions,
            classes,
        })
    }

    /// Gathers the spectra at `positions` from `cube`, labeling them from `grid`.
    pub fn from_positions(
        cube: &HyperCube,
        grid: &LabelGrid,
        positions: &[(usize, usize)],
    ) -> Result<Self> {
        grid.check_aligned(cube)?;
        let d = cube.bands();
        let mut features = Array2::zeros((positions.len(), d));
        let mut labels = Vec::with_capacity(positions.len());
        for (i, &(r, c)) in positions.iter().enumerate() {
            if r >= cube.height() || c >= cube.width() {
                return Err(Error::InvalidParameter(format!(
                    "position ({r}, {c}) outside {}x{} cube",
                    cube.height(),
                    cube.width()
                )));
            }
            features
                .row_mut(i)
                .assign(&ndarray::ArrayView1::from(cube.pixel(r, c)));
            labels.push(grid.get(r, c));
        }
        Self::new(features, labels, positions.to_vec(), grid.classes())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn positions(&self) -> &[(usize, usize)] {
        &self.positions
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes];
        for &l in &self.labels {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Same labels and positions with replaced features.
    pub fn with_features(&self, features: Array2<f64>) -> Result<Self> {
        Self::new(
            features,
            self.labels.clone(),
            self.positions.clone(),
            self.classes,
        )
    }
}

/// Per-feature affine standardization `(x - mean) / sd`. Features with zero
/// spread keep unit scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Array1<f64>,
    pub scale: Array1<f64>,
}

impl Standardizer {
    /// Fits on the rows of `features` (population variance).
    pub fn fit(features: &Array2<f64>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::InvalidParameter("cannot standardize zero samples".into()));
        }
        let mean = features.mean_axis(Axis(0)).expect("nonempty");
        let var = features.var_axis(Axis(0), 0.0);
        let scale = var.mapv(|v| if v > 0.0 { v.sqrt() } else { 1.0 });
        Ok(Self { mean, scale })
    }

    pub fn apply(&self, features: &Array2<f64>) -> Array2<f64> {
        (features - &self.mean) / &self.scale
    }

    pub fn apply_slice(&self, x: &mut [f64]) {
        for ((v, m), s) in x.iter_mut().zip(self.mean.iter()).zip(self.scale.iter()) {
            *v = (*v - m) / s;
        }
    }

    pub fn apply_cube(&self, cube: &HyperCube) -> Result<HyperCube> {
        if cube.bands() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "standardizer has {} features, cube has {} bands",
                self.mean.len(),
                cube.bands()
            )));
        }
        cube.map_pixels(|px| self.apply_slice(px))
    }
}
