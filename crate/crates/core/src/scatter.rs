//! Dissimilarity (scatter) matrices: spectral local-scaling-cut matrices, their
//! regularized forms, the neighboring-pixel spatial matrices, and the
//! beta-weighted spatial-spectral fusion.
//!
//! Sums run over fixed-size sample chunks whose partial D×D matrices are
//! merged in chunk order, so results do not depend on the thread count.

use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::datamodel::{HyperCube, SampleSet};
use crate::eig::{asymmetry, sym_eig};
use crate::error::{Error, Result};
use crate::graph::NeighborLists;

const CHUNK: usize = 16;

/// Symmetric positive semidefinite D×D accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterMatrix(Array2<f64>);

impl ScatterMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self(Array2::zeros((dim, dim)))
    }

    /// Wraps `values` after checking it is square and symmetric.
    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        let (r, c) = values.dim();
        if r != c {
            return Err(Error::DimensionMismatch(format!("scatter matrix is {r}x{c}")));
        }
        let asym = asymmetry(&values);
        if asym > 1e-9 {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self(values))
    }

    fn symmetrized(m: Array2<f64>) -> Self {
        let t = m.t().to_owned();
        Self((m + t) * 0.5)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diag().sum()
    }

    /// Smallest eigenvalue is at least `-tol_rel · |trace|`.
    pub fn is_psd(&self, tol_rel: f64) -> Result<bool> {
        let (vals, _) = sym_eig(&self.0)?;
        let floor = -tol_rel * self.trace().abs();
        Ok(vals.iter().all(|&v| v >= floor))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizationParams {
    /// Spectral regularizer weight in [0, 1].
    pub alpha: f64,
    /// Spectral share of the spatial-spectral fusion, in [0, 1].
    pub beta: f64,
    /// Decay of the spatial patch weights `exp(-γ‖x_i − x_jk‖²)`, > 0.
    pub gamma: f64,
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")));
    }
    Ok(())
}

impl RegularizationParams {
    pub fn validate(&self) -> Result<()> {
        check_unit("alpha", self.alpha)?;
        check_unit("beta", self.beta)?;
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be finite and > 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Square spatial patch of side `window` (odd), center pixel included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpatialPatchSpec {
    pub window: usize,
}

impl SpatialPatchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.window % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "spatial window must be odd and >= 1, got {}",
                self.window
            )));
        }
        Ok(())
    }

    /// In-bounds pixels of the patch centered at `(row, col)`, raster order.
    pub fn pixels(&self, row: usize, col: usize, height: usize, width: usize) -> Vec<(usize, usize)> {
        let half = self.window / 2;
        let (r0, r1) = (row.saturating_sub(half), (row + half + 1).min(height));
        let (c0, c1) = (col.saturating_sub(half), (col + half + 1).min(width));
        (r0..r1).flat_map(|r| (c0..c1).map(move |c| (r, c))).collect()
    }
}

/// Sums `Σ w·(a−b)(a−b)ᵀ` over the terms produced for each sample index.
///
/// `terms(i, push)` calls `push(weight, diff)` for every contribution of
/// sample `i`.
fn accumulate<F>(n: usize, dim: usize, terms: F) -> Array2<f64>
where
    F: Fn(usize, &mut dyn FnMut(f64, &[f64])) + Sync,
{
    let partials: Vec<Array2<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rows: Vec<f64> = Vec::new();
            let mut weights: Vec<f64> = Vec::new();
            for i in chunk * CHUNK..((chunk + 1) * CHUNK).min(n) {
                terms(i, &mut |w, diff| {
                    weights.push(w);
                    rows.extend_from_slice(diff);
                });
            }
            let m = weights.len();
            if m == 0 {
                return Array2::zeros((dim, dim));
            }
            let z = Array2::from_shape_vec((m, dim), rows).expect("rows of length dim");
            let zw = &z * &ndarray::ArrayView1::from(&weights).insert_axis(Axis(1));
            z.t().dot(&zw)
        })
        .collect();
    partials
        .into_iter()
        .fold(Array2::zeros((dim, dim)), |acc, p| acc + p)
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn check_lists(samples: &SampleSet, nbrs: &NeighborLists) -> Result<()> {
    let n = samples.len();
    if nbrs.within.len() != n || nbrs.between.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "neighbor lists cover {} samples, sample set has {n}",
            nbrs.within.len()
        )));
    }
    if nbrs.within.iter().chain(&nbrs.between).flatten().any(|&j| j >= n) {
        return Err(Error::DimensionMismatch("neighbor index out of range".into()));
    }
    Ok(())
}

/// Between- and within-class local scaling cut matrices.
///
/// Each pair `(i, j)` with `j` in the relevant list of `i` contributes
/// `(x_i − x_j)(x_i − x_j)ᵀ / (N_c · k')` where `N_c` is the size of `i`'s
/// class and `k'` the actual length of `i`'s list.
pub fn spectral_scatter(samples: &SampleSet, nbrs: &NeighborLists) -> Result<(ScatterMatrix, ScatterMatrix)> {
    check_lists(samples, nbrs)?;
    let counts = samples.class_counts();
    let x = samples.features();
    let labels = samples.labels();
    let dim = samples.dim();

    for (c, &nc) in counts.iter().enumerate() {
        let empty = (0..samples.len())
            .filter(|&i| labels[i] == c + 1)
            .all(|i| nbrs.within[i].is_empty());
        if nc > 0 && empty {
            log::warn!("class {} has no within-class neighbors; it adds nothing to S_w", c + 1);
        }
    }

    let sum = |lists: &[Vec<usize>]| {
        accumulate(samples.len(), dim, |i, push| {
            let list = &lists[i];
            if list.is_empty() {
                return;
            }
            let w = 1.0 / (counts[labels[i] - 1] as f64 * list.len() as f64);
            let xi = x.row(i);
            for &j in list {
                let d = diff(xi.as_slice().unwrap(), x.row(j).as_slice().unwrap());
                push(w, &d);
            }
        })
    };
    let s_b = ScatterMatrix::symmetrized(sum(&nbrs.between));
    let s_w = ScatterMatrix::symmetrized(sum(&nbrs.within));
    Ok((s_b, s_w))
}

/// Regularized spectral matrices.
///
/// `RS_b = (1−α)·S_b + α·R_b` with `R_b = X̄X̄ᵀ / N` over mean-centered
/// training spectra, and `RS_w = (1−α)·S_w + α·Diag(diag(S_w))`. The
/// diagonal of `RS_w` is copied from `S_w` directly.
pub fn regularize_spectral(
    s_b: &ScatterMatrix,
    s_w: &ScatterMatrix,
    samples: &SampleSet,
    alpha: f64,
) -> Result<(ScatterMatrix, ScatterMatrix)> {
    check_unit("alpha", alpha)?;
    let dim = s_b.dim();
    if s_w.dim() != dim || samples.dim() != dim {
        return Err(Error::DimensionMismatch(format!(
            "S_b is {dim}x{dim}, S_w is {0}x{0}, samples have {1} features",
            s_w.dim(),
            samples.dim()
        )));
    }
    let x = samples.features();
    let mean = x.mean_axis(Axis(0)).ok_or_else(|| {
        Error::InvalidParameter("cannot regularize with an empty sample set".into())
    })?;
    let xc = x - &mean;
    let r_b = xc.t().dot(&xc) / samples.len() as f64;

    let rs_b = s_b.values() * (1.0 - alpha) + &r_b * alpha;
    let mut rs_w = s_w.values() * (1.0 - alpha);
    rs_w.diag_mut().assign(&s_w.values().diag());
    Ok((ScatterMatrix::symmetrized(rs_b), ScatterMatrix::symmetrized(rs_w)))
}

/// Neighboring-pixel spatial matrices.
///
/// For sample `i` and each spectral neighbor `j`, every in-bounds pixel
/// `x_jk` of the patch around `j`'s position in `cube` contributes
/// `η_ijk (x_i − x_jk)(x_i − x_jk)ᵀ` with `η_ijk = w_ijk / Σ_t w_ijt` and
/// `w_ijk = exp(−γ‖x_i − x_jk‖²)`.
pub fn spatial_scatter(
    samples: &SampleSet,
    cube: &HyperCube,
    nbrs: &NeighborLists,
    patch: &SpatialPatchSpec,
    gamma: f64,
) -> Result<(ScatterMatrix, ScatterMatrix)> {
    check_lists(samples, nbrs)?;
    patch.validate()?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma must be finite and > 0, got {gamma}")));
    }
    if cube.bands() != samples.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cube has {} bands, samples have {} features",
            cube.bands(),
            samples.dim()
        )));
    }
    if let Some(&(r, c)) = samples
        .positions()
        .iter()
        .find(|&&(r, c)| r >= cube.height() || c >= cube.width())
    {
        return Err(Error::InvalidParameter(format!("sample position ({r}, {c}) outside cube")));
    }

    let x = samples.features();
    let pos = samples.positions();
    let (h, w) = (cube.height(), cube.width());
    let sum = |lists: &[Vec<usize>]| {
        accumulate(samples.len(), samples.dim(), |i, push| {
            let xi = x.row(i);
            let xi = xi.as_slice().unwrap();
            for &j in &lists[i] {
                let (rj, cj) = pos[j];
                let diffs: Vec<Vec<f64>> = patch
                    .pixels(rj, cj, h, w)
                    .into_iter()
                    .map(|(r, c)| diff(xi, cube.pixel(r, c)))
                    .collect();
                let dists: Vec<f64> = diffs.iter().map(|d| d.iter().map(|v| v * v).sum()).collect();
                // shifting by the smallest distance leaves η unchanged and
                // keeps the exponentials from underflowing
                let d_min = dists.iter().copied().fold(f64::INFINITY, f64::min);
                let ws: Vec<f64> = dists.iter().map(|d| (-gamma * (d - d_min)).exp()).collect();
                let total: f64 = ws.iter().sum();
                for (wk, dk) in ws.iter().zip(&diffs) {
                    push(wk / total, dk);
                }
            }
        })
    };
    let s_b = ScatterMatrix::symmetrized(sum(&nbrs.between));
    let s_w = ScatterMatrix::symmetrized(sum(&nbrs.within));
    Ok((s_b, s_w))
}

/// Spatial-spectral pencil.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedPencil {
    pub ss_b: ScatterMatrix,
    pub ss_w: ScatterMatrix,
    /// `SS_w + SS_b`.
    pub t_ss: ScatterMatrix,
}

/// `SS_w = β·RS_w + (1−β)·S_w^spa`, `SS_b = β·RS_b + (1−β)·S_b^spa`,
/// `T_ss = SS_w + SS_b`.
pub fn fuse(
    rs_b: &ScatterMatrix,
    rs_w: &ScatterMatrix,
    s_b_spa: &ScatterMatrix,
    s_w_spa: &ScatterMatrix,
    beta: f64,
) -> Result<FusedPencil> {
    check_unit("beta", beta)?;
    let dim = rs_b.dim();
    if [rs_w.dim(), s_b_spa.dim(), s_w_spa.dim()].iter().any(|&d| d != dim) {
        return Err(Error::DimensionMismatch(format!(
            "fusion inputs have dims {}, {}, {}, {}",
            dim,
            rs_w.dim(),
            s_b_spa.dim(),
            s_w_spa.dim()
        )));
    }
    let ss_w = rs_w.values() * beta + s_w_spa.values() * (1.0 - beta);
    let ss_b = rs_b.values() * beta + s_b_spa.values() * (1.0 - beta);
    let t_ss = &ss_w + &ss_b;
    Ok(FusedPencil {
        ss_b: ScatterMatrix(ss_b),
        ss_w: ScatterMatrix(ss_w),
        t_ss: ScatterMatrix(t_ss),
    })
}
