//! PCA guidance image and band-by-band guided filtering.
//!
//! Window statistics come from summed-area tables over pivot-shifted data
//! (the grid's first value is subtracted first), which keeps variances free of
//! large-mean cancellation and makes constant inputs come out exactly.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::datamodel::HyperCube;
use crate::eig::sym_eig;
use crate::error::{Error, Result};

/// First principal component score of every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceImage {
    pub values: Array2<f64>,
}

impl GuidanceImage {
    /// Zero mean, unit (population) variance copy.
    pub fn standardized(&self) -> Result<GuidanceImage> {
        let n = self.values.len() as f64;
        let mean = self.values.sum() / n;
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        if !(var > 0.0) {
            return Err(Error::ZeroVariance("guidance image is constant".into()));
        }
        let sd = var.sqrt();
        Ok(GuidanceImage {
            values: self.values.mapv(|v| (v - mean) / sd),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    /// Window is `(2·radius + 1)²`, clipped at the borders.
    pub radius: usize,
    pub epsilon: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            radius: 1,
            epsilon: 0.01,
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "filter epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Projects every pixel onto the leading eigenvector of the band covariance.
///
/// The eigenvector's sign is fixed so its largest-magnitude entry is positive.
pub fn pca_guidance(cube: &HyperCube) -> Result<GuidanceImage> {
    let (h, w, d) = (cube.height(), cube.width(), cube.bands());
    if h * w < 2 {
        return Err(Error::InvalidParameter(
            "PCA guidance needs at least 2 pixels".into(),
        ));
    }
    let x = Array2::from_shape_vec((h * w, d), cube.values().to_vec())
        .expect("cube layout is pixel-major");
    let mean = x.mean_axis(Axis(0)).expect("nonempty");
    let xc = &x - &mean;
    let cov = xc.t().dot(&xc) / (h * w) as f64;
    let total: f64 = cov.diag().sum();
    if !(total > 0.0) {
        return Err(Error::ZeroVariance(
            "cube has zero total variance; PCA guidance undefined".into(),
        ));
    }
    let cov = (&cov + &cov.t()) * 0.5;
    let (_, vecs) = sym_eig(&cov)?;
    let scores = xc.dot(&vecs.column(0));
    Ok(GuidanceImage {
        values: scores.into_shape_with_order((h, w)).expect("h*w scores"),
    })
}

/// Summed-area table with a zero top row and left column.
struct Integral {
    sums: Array2<f64>,
    pivot: f64,
}

impl Integral {
    fn new(grid: &Array2<f64>) -> Self {
        let (h, w) = grid.dim();
        let pivot = grid[[0, 0]];
        let mut sums = Array2::zeros((h + 1, w + 1));
        for r in 0..h {
            let mut row = 0.0;
            for c in 0..w {
                row += grid[[r, c]] - pivot;
                sums[[r + 1, c + 1]] = sums[[r, c + 1]] + row;
            }
        }
        Self { sums, pivot }
    }

    /// Sum of `(v - pivot)` over rows `r0..r1`, cols `c0..c1`.
    fn shifted_sum(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        self.sums[[r1, c1]] - self.sums[[r0, c1]] - self.sums[[r1, c0]] + self.sums[[r0, c0]]
    }
}

/// In-bounds window `[r0, r1) × [c0, c1)` of radius `radius` around (r, c).
fn window(r: usize, c: usize, radius: usize, h: usize, w: usize) -> (usize, usize, usize, usize) {
    (
        r.saturating_sub(radius),
        (r + radius + 1).min(h),
        c.saturating_sub(radius),
        (c + radius + 1).min(w),
    )
}

/// Mean over the clipped window around every pixel.
pub fn box_mean(grid: &Array2<f64>, radius: usize) -> Array2<f64> {
    let (h, w) = grid.dim();
    let sat = Integral::new(grid);
    Array2::from_shape_fn((h, w), |(r, c)| {
        let (r0, r1, c0, c1) = window(r, c, radius, h, w);
        let count = ((r1 - r0) * (c1 - c0)) as f64;
        sat.shifted_sum(r0, r1, c0, c1) / count + sat.pivot
    })
}

/// Guided filter of `input` with guidance `guide`.
///
/// Per window `k`: `a_k = cov_k(I, P) / (var_k(I) + ε)`,
/// `b_k = mean_k(P) − a_k·mean_k(I)`; the output at `i` averages
/// `a_k·I_i + b_k` over every window covering `i`.
pub fn guided_filter_band(
    input: &Array2<f64>,
    guide: &GuidanceImage,
    params: &FilterParams,
) -> Result<Array2<f64>> {
    params.validate()?;
    let guide = &guide.values;
    if input.dim() != guide.dim() {
        return Err(Error::DimensionMismatch(format!(
            "input is {:?}, guidance is {:?}",
            input.dim(),
            guide.dim()
        )));
    }
    let (h, w) = input.dim();
    let radius = params.radius;

    // Pivot-shifted copies: covariances are shift invariant.
    let i0 = guide[[0, 0]];
    let p0 = input[[0, 0]];
    let gi = guide.mapv(|v| v - i0);
    let pi = input.mapv(|v| v - p0);
    let s_i = Integral::new(&gi);
    let s_p = Integral::new(&pi);
    let s_ip = Integral::new(&(&gi * &pi));
    let s_ii = Integral::new(&(&gi * &gi));

    let mut a = Array2::zeros((h, w));
    let mut b = Array2::zeros((h, w));
    for r in 0..h {
        for c in 0..w {
            let (r0, r1, c0, c1) = window(r, c, radius, h, w);
            let n = ((r1 - r0) * (c1 - c0)) as f64;
            let m_i = (s_i.shifted_sum(r0, r1, c0, c1) + n * s_i.pivot) / n;
            let m_p = (s_p.shifted_sum(r0, r1, c0, c1) + n * s_p.pivot) / n;
            let m_ip = (s_ip.shifted_sum(r0, r1, c0, c1) + n * s_ip.pivot) / n;
            let m_ii = (s_ii.shifted_sum(r0, r1, c0, c1) + n * s_ii.pivot) / n;
            let cov = m_ip - m_i * m_p;
            let var = (m_ii - m_i * m_i).max(0.0);
            let denom = var + params.epsilon;
            let ak = if denom > 0.0 { cov / denom } else { 0.0 };
            a[[r, c]] = ak;
            // back to unshifted coordinates
            b[[r, c]] = (m_p - ak * m_i) + (p0 - ak * i0);
        }
    }

    let mean_a = box_mean(&a, radius);
    let mean_b = box_mean(&b, radius);
    Ok(&mean_a * guide + &mean_b)
}

/// Filters every band with one shared, standardized PCA guidance image.
pub fn filter_cube(cube: &HyperCube, params: &FilterParams) -> Result<HyperCube> {
    params.validate()?;
    let guide = pca_guidance(cube)?.standardized()?;
    let bands: Vec<Array2<f64>> = (0..cube.bands())
        .into_par_iter()
        .map(|b| guided_filter_band(&cube.band(b), &guide, params))
        .collect::<Result<_>>()?;
    HyperCube::from_bands(&bands)
}
