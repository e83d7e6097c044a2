//! Exact within-class and between-class k-nearest-neighbor lists.

use rayon::prelude::*;

use crate::datamodel::SampleSet;
use crate::error::{Error, Result};

/// Per-sample neighbor indices into the sample set, nearest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborLists {
    /// Same-class neighbors, at most `k_w` each.
    pub within: Vec<Vec<usize>>,
    /// Other-class neighbors, at most `k_b` each.
    pub between: Vec<Vec<usize>>,
    pub k_w: usize,
    pub k_b: usize,
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` smallest `(distance, index)` pairs in ascending order.
fn nearest(mut cands: Vec<(f64, usize)>, k: usize) -> Vec<usize> {
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cands.len() {
        cands.select_nth_unstable_by(k, by_dist);
        cands.truncate(k);
    }
    cands.sort_unstable_by(by_dist);
    cands.into_iter().map(|(_, j)| j).collect()
}

/// Exact Euclidean kNN by partial selection over each sample's distance row.
///
/// Lists are clipped when a class has fewer candidates than `k`; ties go to
/// the lower sample index.
pub fn build_neighbors(samples: &SampleSet, k_w: usize, k_b: usize) -> Result<NeighborLists> {
    if k_w == 0 || k_b == 0 {
        return Err(Error::InvalidParameter(format!(
            "k_w and k_b must be >= 1, got {k_w} and {k_b}"
        )));
    }
    if let Some(c) = samples.class_counts().iter().position(|&n| n == 0) {
        return Err(Error::InvalidParameter(format!(
            "class {} has no samples",
            c + 1
        )));
    }

    let x = samples.features();
    let labels = samples.labels();
    let n = samples.len();
    let rows: Vec<(Vec<usize>, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let xi = x.row(i);
            let xi = xi.as_slice().expect("standard layout");
            let mut same = Vec::new();
            let mut other = Vec::new();
            for j in 0..n {
                if j == i {
                    continue;
                }
                let xj = x.row(j);
                let dist = squared_distance(xi, xj.as_slice().expect("standard layout"));
                if labels[j] == labels[i] {
                    same.push((dist, j));
                } else {
                    other.push((dist, j));
                }
            }
            (nearest(same, k_w), nearest(other, k_b))
        })
        .collect();

    let (within, between) = rows.into_iter().unzip();
    Ok(NeighborLists {
        within,
        between,
        k_w,
        k_b,
    })
}
