//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssrlsc::datamodel::{HyperCube, SampleSet};

/// Random cube with `n` labeled sample pixels over `classes` classes.
pub struct Fixture {
    pub cube: HyperCube,
    pub samples: SampleSet,
    pub k_w: usize,
    pub k_b: usize,
    pub window: usize,
    pub gamma: f64,
}

pub fn random_fixture(seed: u64, max_n: usize, max_d: usize) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=max_d);
    let h = rng.random_range(4..=12);
    let w = rng.random_range(4..=12);
    let classes = rng.random_range(2..=4);
    let n = rng.random_range(classes..=max_n.min(h * w));
    let values: Vec<f64> = (0..h * w * d).map(|_| rng.random::<f64>()).collect();
    let cube = HyperCube::new(h, w, d, values).unwrap();

    let mut cells: Vec<(usize, usize)> = (0..h).flat_map(|r| (0..w).map(move |c| (r, c))).collect();
    cells.shuffle(&mut rng);
    let positions: Vec<(usize, usize)> = cells[..n].to_vec();
    // every class gets at least one sample
    let labels: Vec<usize> = (0..n)
        .map(|i| if i < classes { i + 1 } else { rng.random_range(1..=classes) })
        .collect();
    let mut features = Array2::zeros((n, d));
    for (i, &(r, c)) in positions.iter().enumerate() {
        for b in 0..d {
            features[[i, b]] = cube.get(r, c, b);
        }
    }
    let samples = SampleSet::new(features, labels, positions, classes).unwrap();
    Fixture {
        cube,
        samples,
        k_w: rng.random_range(1..=7),
        k_b: rng.random_range(1..=7),
        window: [1, 3, 5][rng.random_range(0..3)],
        gamma: rng.random_range(0.05..2.0),
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn row(s: &SampleSet, i: usize) -> Vec<f64> {
    s.features().row(i).to_vec()
}

/// Full sort of every candidate by (distance, index).
pub fn oracle_neighbors(s: &SampleSet, k_w: usize, k_b: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = s.len();
    let labels = s.labels();
    let mut within = Vec::new();
    let mut between = Vec::new();
    for i in 0..n {
        let mut cands: Vec<(f64, usize, bool)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sq_dist(&row(s, i), &row(s, j)), j, labels[j] == labels[i]))
            .collect();
        cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        within.push(cands.iter().filter(|c| c.2).take(k_w).map(|c| c.1).collect());
        between.push(cands.iter().filter(|c| !c.2).take(k_b).map(|c| c.1).collect());
    }
    (within, between)
}

fn add_outer(m: &mut Array2<f64>, w: f64, v: &[f64]) {
    for p in 0..v.len() {
        for q in 0..v.len() {
            m[[p, q]] += w * v[p] * v[q];
        }
    }
}

/// Direct double sum of the weighted pair outer products.
pub fn oracle_spectral(s: &SampleSet, lists: &[Vec<usize>]) -> Array2<f64> {
    let d = s.dim();
    let counts = s.class_counts();
    let mut m = Array2::zeros((d, d));
    for i in 0..s.len() {
        let nc = counts[s.labels()[i] - 1] as f64;
        for &j in &lists[i] {
            let diff: Vec<f64> = row(s, i).iter().zip(row(s, j)).map(|(a, b)| a - b).collect();
            add_outer(&mut m, 1.0 / (nc * lists[i].len() as f64), &diff);
        }
    }
    m
}

/// Direct sum over neighbors and their clipped patches with plain softmax weights.
pub fn oracle_spatial(
    s: &SampleSet,
    cube: &HyperCube,
    lists: &[Vec<usize>],
    window: usize,
    gamma: f64,
) -> Array2<f64> {
    let d = s.dim();
    let half = window as isize / 2;
    let mut m = Array2::zeros((d, d));
    for i in 0..s.len() {
        let xi = row(s, i);
        for &j in &lists[i] {
            let (rj, cj) = s.positions()[j];
            let mut patch = Vec::new();
            for dr in -half..=half {
                for dc in -half..=half {
                    let (r, c) = (rj as isize + dr, cj as isize + dc);
                    if r >= 0 && c >= 0 && (r as usize) < cube.height() && (c as usize) < cube.width() {
                        patch.push(cube.pixel(r as usize, c as usize).to_vec());
                    }
                }
            }
            let ws: Vec<f64> = patch.iter().map(|p| (-gamma * sq_dist(&xi, p)).exp()).collect();
            let total: f64 = ws.iter().sum();
            for (p, w) in patch.iter().zip(&ws) {
                let diff: Vec<f64> = xi.iter().zip(p).map(|(a, b)| a - b).collect();
                add_outer(&mut m, w / total, &diff);
            }
        }
    }
    m
}

pub fn rel_frobenius(a: &Array2<f64>, oracle: &Array2<f64>) -> f64 {
    let num = (a - oracle).mapv(|v| v * v).sum().sqrt();
    let den = oracle.mapv(|v| v * v).sum().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Guided filter by solving each window's 2×2 ridge least-squares system.
pub fn oracle_guided(p: &Array2<f64>, guide: &Array2<f64>, radius: usize, eps: f64) -> Array2<f64> {
    let (h, w) = p.dim();
    let bounds = |r: usize, c: usize| {
        (
            r.saturating_sub(radius),
            (r + radius + 1).min(h),
            c.saturating_sub(radius),
            (c + radius + 1).min(w),
        )
    };
    let mut coef = vec![(0.0, 0.0); h * w];
    for r in 0..h {
        for c in 0..w {
            let (r0, r1, c0, c1) = bounds(r, c);
            let (mut n, mut si, mut sp, mut sii, mut sip) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for y in r0..r1 {
                for x in c0..c1 {
                    let (i, v) = (guide[[y, x]], p[[y, x]]);
                    n += 1.0;
                    si += i;
                    sp += v;
                    sii += i * i;
                    sip += i * v;
                }
            }
            // minimize Σ (a·I + b − P)² + n·ε·a²
            let (m11, m12, m22) = (sii + n * eps, si, n);
            let det = m11 * m22 - m12 * m12;
            let a = (sip * m22 - m12 * sp) / det;
            let b = (m11 * sp - m12 * sip) / det;
            coef[r * w + c] = (a, b);
        }
    }
    let mut out = Array2::zeros((h, w));
    for r in 0..h {
        for c in 0..w {
            // windows covering (r, c) are centered within radius of it
            let (r0, r1, c0, c1) = bounds(r, c);
            let mut acc = 0.0;
            let mut n = 0.0;
            for y in r0..r1 {
                for x in c0..c1 {
                    let (a, b) = coef[y * w + x];
                    acc += a * guide[[r, c]] + b;
                    n += 1.0;
                }
            }
            out[[r, c]] = acc / n;
        }
    }
    out
}
