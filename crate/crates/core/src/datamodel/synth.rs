use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};

use super::{HyperCube, LabelGrid};

/// Draws `classes` mean spectra whose closest pair is exactly `sep` apart.
fn class_means(classes: usize, bands: usize, sep: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut means: Vec<Vec<f64>> = (0..classes)
        .map(|_| (0..bands).map(|_| StandardNormal.sample(rng)).collect())
        .collect();
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    };
    let mut min_dist = f64::INFINITY;
    for i in 0..classes {
        for j in i + 1..classes {
            min_dist = min_dist.min(dist(&means[i], &means[j]));
        }
    }
    if !min_dist.is_finite() {
        // one class: scale to norm `sep`
        min_dist = dist(&means[0], &vec![0.0; bands]);
    }
    let s = if min_dist > 0.0 { sep / min_dist } else { 0.0 };
    for m in &mut means {
        m.iter_mut().for_each(|v| *v *= s);
    }
    means
}

/// Block-structured synthetic cube.
///
/// `classes × blocks_per_class` square blocks of side `block_size` are tiled
/// row-major on a near-square grid; block `b` belongs to class `b % classes + 1`.
/// Unused grid cells are unlabeled with a zero mean spectrum. Every pixel is
/// its class mean plus independent `N(0, noise_sd²)` noise per band.
/// Generation is deterministic per `seed` (ChaCha8).
pub fn make_synthetic(
    classes: usize,
    blocks_per_class: usize,
    block_size: usize,
    bands: usize,
    class_sep: f64,
    noise_sd: f64,
    seed: u64,
) -> Result<(HyperCube, LabelGrid)> {
    if classes == 0 || blocks_per_class == 0 || block_size == 0 || bands == 0 {
        return Err(Error::InvalidParameter(
            "synthetic counts must all be >= 1".into(),
        ));
    }
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() || !class_sep.is_finite() || class_sep < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "need finite class_sep >= 0 and noise_sd >= 0, got {class_sep}, {noise_sd}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let means = class_means(classes, bands, class_sep, &mut rng);

    let total = classes * blocks_per_class;
    let grid_cols = (total as f64).sqrt().ceil() as usize;
    let grid_rows = total.div_ceil(grid_cols);
    let height = grid_rows * block_size;
    let width = grid_cols * block_size;

    let mut labels = vec![0usize; height * width];
    for r in 0..height {
        for c in 0..width {
            let b = (r / block_size) * grid_cols + c / block_size;
            if b < total {
                labels[r * width + c] = b % classes + 1;
            }
        }
    }

    let noise = Normal::new(0.0, noise_sd).expect("validated sd");
    let mut values = Vec::with_capacity(height * width * bands);
    for &l in &labels {
        for b in 0..bands {
            let mu = if l == 0 { 0.0 } else { means[l - 1][b] };
            let eps = if noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            values.push(mu + eps);
        }
    }

    Ok((
        HyperCube::new(height, width, bands, values)?,
        LabelGrid::new(height, width, labels)?,
    ))
}
